"""Command-line entry point: ``invstat verify|decompose|dims|mc-check``.

Exit codes: 0 all checks pass, 1 a check failed, 2 usage or input error,
3 numerical breakdown.
"""
from __future__ import annotations

import argparse
import json
import sys

from .errors import InvstatError, NumericalBreakdown
from .family import RawCubicTensor
from .report import RunConfig
from .runner import run_decompose, run_dims, run_mc_check, run_verify

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_BREAKDOWN = 0, 1, 2, 3


def _abc(text: str) -> tuple[float, float, float]:
    parts = text.split(",")
    if len(parts) != 3:
        raise argparse.ArgumentTypeError("expected three comma-separated numbers a,b,c")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not numbers: {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n", type=int, default=2, help="matrix order (default 2)")
    p.add_argument("--alpha", type=float, default=1.0)
    p.add_argument("--abc", type=_abc, default=(1.0, 1.0, 1.0), help="coefficients a,b,c of a*C1+b*C2+c*C3")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--tol-geom", type=float, default=1e-5, help="tolerance of finite-difference verdicts")
    p.add_argument("--tol-exact", type=float, default=1e-10, help="tolerance of algebraic identities")
    p.add_argument("--samples", type=int, default=1_000_000, help="Monte-Carlo samples")
    p.add_argument("--fd-step", type=float, default=None, help="relative finite-difference step (default auto)")
    p.add_argument("--trials", type=int, default=100)
    _output(p)


def _output(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "csv"), default="json")
    p.add_argument("--out", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--timings", action="store_true", help="record wall times (reports are then not reproducible)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="invstat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", help="run the full verification suite")
    _common(v)
    v.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)

    d = sub.add_parser("decompose", help="power-sum coordinates of an invariant cubic tensor file")
    d.add_argument("input", help="RawCubicTensor JSON file")
    d.add_argument("--poly-out", metavar="PATH", help="write the SymCubicPoly JSON here")
    _common(d)

    m = sub.add_parser("dims", help="dimension table of invariant cubic tensors")
    m.add_argument("--max-n", type=int, required=True)
    _output(m)

    mc = sub.add_parser("mc-check", help="Monte-Carlo check of the closed-form Fisher metric and alpha-tensor")
    _common(mc)
    return parser


def _config(args) -> RunConfig:
    return RunConfig(
        n=args.n,
        alpha=args.alpha,
        abc=tuple(args.abc),
        seed=args.seed,
        tol_geom=args.tol_geom,
        tol_exact=args.tol_exact,
        samples=args.samples,
        fd_step=args.fd_step,
        trials=args.trials,
    )


def _emit(text: str, path: str | None) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "dims":
            rep = run_dims(args.max_n, timings=args.timings)
        else:
            cfg = _config(args)
            if args.command == "verify":
                rep = run_verify(cfg, inject_fault=args.inject_fault, timings=args.timings)
            elif args.command == "mc-check":
                rep = run_mc_check(cfg, timings=args.timings)
            else:
                try:
                    with open(args.input) as fh:
                        tensor = RawCubicTensor.from_json(json.load(fh))
                except (OSError, json.JSONDecodeError) as exc:
                    raise InvstatError(f"cannot read {args.input}: {exc}") from exc
                rep, poly = run_decompose(tensor, cfg, timings=args.timings)
                if poly is not None and args.poly_out:
                    with open(args.poly_out, "w") as fh:
                        json.dump(poly, fh, indent=2)
                        fh.write("\n")
    except NumericalBreakdown as exc:
        print(f"invstat: numerical breakdown: {exc}", file=sys.stderr)
        return EXIT_BREAKDOWN
    except (InvstatError, ValueError) as exc:
        print(f"invstat: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    _emit(rep.dumps(args.format), args.out)
    return EXIT_OK if rep.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())

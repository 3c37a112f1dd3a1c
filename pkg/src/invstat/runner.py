"""Verification suites behind the command-line interface."""
from __future__ import annotations

import numpy as np

from . import family
from .connections import (
    FdScheme,
    canonical_deriv,
    christoffel_closed_components,
    christoffel_fd,
    conjugate_symmetry_check,
    contract_direction,
    cov_deriv,
    cubic_field,
    exp_flow_tangent_defect,
    fisher_field,
    metric_compatibility_check,
    parallel_check,
)
from .family import (
    InvariantCubic,
    RawCubicTensor,
    invariant_cubic_eval,
    on_invariance_check,
    raw_components,
)
from .gaussian import McConfig, ac_alpha_at, act, fisher_at, fisher_components, mc_moment, pushforward
from .polys import diag_restrict, dimension, family_rank, to_power_sums
from .errors import DomainError, NumericalBreakdown
from .report import Report, RunConfig
from .symcone import from_vech, identity, sample, sym_basis, sym_sqrt, to_vech

FAULT_C2_WEIGHT = 0.5


def _sub(seed: int, k: int) -> int:
    return (int(seed) << 20) + k


def rel_err(a: float, b: float) -> float:
    diff = abs(a - b)
    return 0.0 if diff == 0 else diff / max(abs(a), abs(b))


def _scheme(cfg: RunConfig) -> FdScheme:
    return FdScheme() if cfg.fd_step is None else FdScheme(cfg.fd_step)


def _points(cfg: RunConfig) -> list:
    k = max(1, cfg.trials // 10)
    return [identity(cfg.n)] + [sample("spd", cfg.n, _sub(cfg.seed, 100 + i)) for i in range(k)]


def invariance_error(evaluate, n: int, arity: int, trials: int, seed: int, tag: int = 0) -> tuple[float, int]:
    """Worst relative error of ``evaluate`` under random group transport.

    Each trial draws ``h``, ``Sigma`` and ``arity`` directions and compares the
    evaluation at ``(h.Sigma, h.X, ...)`` with the one at ``(Sigma, X, ...)``.
    A draw whose transported point fails the positive-definiteness tolerance is
    outside the domain and is replaced by a fresh one.  Returns the worst error
    and the number of replaced draws.
    """
    worst, done, skipped, t = 0.0, 0, 0, 0
    while done < trials:
        base = _sub(seed, tag * 10_000 + 8 * t)
        t += 1
        h = sample("general-linear", n, base)
        sig = sample("spd", n, base + 1)
        dirs = [sample("sym", n, base + 2 + j) for j in range(arity)]
        try:
            moved = act(h, sig)
        except DomainError:
            skipped += 1
            if skipped > trials:
                raise NumericalBreakdown("too many group draws left the positive-definite cone")
            continue
        lhs = evaluate(moved, *[pushforward(h, x) for x in dirs])
        worst = max(worst, rel_err(lhs, evaluate(sig, *dirs)))
        done += 1
    return worst, skipped


def _invariance(cfg: RunConfig, evaluate, arity: int, tag: int) -> float:
    return invariance_error(evaluate, cfg.n, arity, cfg.trials, cfg.seed, tag)[0]


def run_verify(cfg: RunConfig, *, inject_fault: bool = False, timings: bool = False) -> Report:
    rep = Report("verify", cfg.to_json(), timings=timings)
    with family._c2_weight_fault(FAULT_C2_WEIGHT if inject_fault else family.C2_WEIGHT):
        _verify(cfg, rep)
    return rep


def _verify(cfg: RunConfig, rep: Report) -> None:
    n, tol_e, tol_g = cfg.n, cfg.tol_exact, cfg.tol_geom
    scheme = _scheme(cfg)
    alpha_c = InvariantCubic.alpha(n, cfg.alpha)
    abc_c = InvariantCubic(n, *cfg.abc)
    points = _points(cfg)
    base_inputs = {"n": n, "seed": cfg.seed, "trials": cfg.trials}

    def basis_roundtrip():
        worst = 0.0
        basis = sym_basis(n)
        for t in range(cfg.trials):
            m = sample("sym", n, _sub(cfg.seed, t)).matrix
            v = to_vech(m)
            recon = sum(c * e.matrix for c, e in zip(v, basis))
            worst = max(worst, float(np.max(np.abs(from_vech(v, n) - m))), float(np.max(np.abs(recon - m))))
        return worst, tol_e

    rep.check("basis-roundtrip", base_inputs, basis_roundtrip)

    def metric_pd():
        worst = 0.0
        for p in points:
            lam = np.linalg.eigvalsh(fisher_components(p))
            worst = max(worst, 0.0 if lam[0] > 0 else 1.0 - lam[0] / lam[-1])
        return worst, 0.0, worst == 0.0

    rep.check("fisher-positive-definite", base_inputs, metric_pd)
    rep.check("fisher-invariance", base_inputs, lambda: (_invariance(cfg, fisher_at, 2, 1), tol_e))
    rep.check(
        "alpha-tensor-invariance",
        {**base_inputs, "alpha": cfg.alpha},
        lambda: (_invariance(cfg, lambda s, x, y, z: ac_alpha_at(cfg.alpha, s, x, y, z), 3, 2), tol_e),
    )
    rep.check(
        "family-invariance",
        {**base_inputs, "abc": cfg.abc},
        lambda: (_invariance(cfg, lambda s, x, y, z: invariant_cubic_eval(abc_c, s, x, y, z), 3, 3), tol_e),
    )

    def family_consistency():
        # closed-form evaluator vs identity components pulled back by sym_sqrt
        raw = raw_components(abc_c)
        worst = 0.0
        for t in range(cfg.trials):
            base = _sub(cfg.seed, 40_000 + 4 * t)
            sig = sample("spd", n, base)
            dirs = [sample("sym", n, base + 1 + j).matrix for j in range(3)]
            hinv = np.linalg.inv(sym_sqrt(sig).mat)
            pulled = [hinv @ x @ hinv.T for x in dirs]
            worst = max(worst, rel_err(invariant_cubic_eval(abc_c, sig, *dirs), raw(*[0.5 * (p + p.T) for p in pulled])))
        return worst, tol_e

    rep.check("family-consistency", {**base_inputs, "abc": cfg.abc}, family_consistency)

    def on_inv():
        v1 = on_invariance_check(raw_components(abc_c), cfg.trials, cfg.seed, tol_e)
        v2 = on_invariance_check(raw_components(alpha_c), cfg.trials, cfg.seed, tol_e)
        return max(v1.max_violation, v2.max_violation), tol_e

    rep.check("on-invariance", {**base_inputs, "abc": cfg.abc, "alpha": cfg.alpha}, on_inv)

    def generator_rank():
        return abs(family_rank(n) - dimension(n)), 0.5

    rep.check("generator-rank", {"n": n}, generator_rank, value=dimension(n))
    if n == 1:
        def generators_coincide():
            comps = [raw_components(InvariantCubic(1, *e)).components for e in np.eye(3)]
            return max(float(np.max(np.abs(c - comps[0]))) for c in comps), tol_e

        rep.check("generators-coincide", {"n": n}, generators_coincide)

    pts_inputs = {**base_inputs, "points": [p.mat.to_json()["vech"] for p in points]}
    g = fisher_field(n)

    def worst_verdict(fn):
        vs = [fn(p) for p in points]
        return max(v.max_violation for v in vs), vs[0].tol

    rep.check("metric-compatibility", pts_inputs, lambda: worst_verdict(
        lambda p: metric_compatibility_check(g, p, scheme, tol=tol_g / 10)))
    for label, cubic in (("alpha", alpha_c), ("abc", abc_c)):
        fld = cubic_field(cubic)
        inputs = {**pts_inputs, "coeffs": list(cubic.coeffs)}
        rep.check(f"conjugate-symmetry[{label}]", inputs, lambda fld=fld: worst_verdict(
            lambda p: conjugate_symmetry_check(fld, g, p, scheme, tol_g)))
        rep.check(f"parallel[{label}]", inputs, lambda fld=fld: worst_verdict(
            lambda p: parallel_check(fld, g, p, scheme, tol_g)))

    def christoffel_oracle():
        worst = 0.0
        for p in points:
            fd = christoffel_fd(g, p).gamma
            cl = christoffel_closed_components(p).gamma
            worst = max(worst, float(np.max(np.abs(fd - cl)) / np.max(np.abs(cl))))
        return worst, tol_g

    rep.check("christoffel-oracle", pts_inputs, christoffel_oracle)

    def canonical_vs_lc():
        fld = cubic_field(abc_c)
        eye = identity(n)
        dc = cov_deriv(fld, g, eye, scheme)
        worst = 0.0
        for j in range(3):
            v = sample("sym", n, _sub(cfg.seed, 50_000 + j))
            cn = canonical_deriv(fld, v, scheme)
            worst = max(worst, float(np.max(np.abs(cn))), float(np.max(np.abs(cn - contract_direction(dc, v)))))
        return worst, tol_g

    rep.check("canonical-vs-levi-civita", {"n": n, "abc": cfg.abc, "seed": cfg.seed}, canonical_vs_lc)

    def exp_flow():
        mats = [np.eye(n), sample("sym", n, _sub(cfg.seed, 60_000)).matrix]
        return max(exp_flow_tangent_defect(a, 1e-4) for a in mats), 1e-6

    rep.check("exp-flow-tangent", {"n": n, "seed": cfg.seed, "t": 1e-4}, exp_flow)

    def exp_flow_order():
        a = np.eye(n)
        ratio = exp_flow_tangent_defect(a, 1e-4) / exp_flow_tangent_defect(a, 5e-5)
        return abs(ratio - 4.0), 0.5

    rep.check("exp-flow-convergence", {"n": n}, exp_flow_order)
    _mc_records(cfg, rep)


def _mc_records(cfg: RunConfig, rep: Report) -> None:
    n = cfg.n
    mc = McConfig(cfg.samples, cfg.seed)
    for label, sig in (("identity", identity(n)), ("spd", sample("spd", n, _sub(cfg.seed, 70_000)))):
        dirs = [sample("sym", n, _sub(cfg.seed, 70_001 + j)) for j in range(3)]
        for arity, closed in ((2, fisher_at(sig, *dirs[:2])), (3, ac_alpha_at(1.0, sig, *dirs))):
            name = f"mc-{'pair' if arity == 2 else 'triple'}[{label}]"
            inputs = {"point": sig.mat.to_json(), "dirs": [d.to_json() for d in dirs[:arity]],
                      "samples": cfg.samples, "seed": cfg.seed}

            def fn(sig=sig, arity=arity, closed=closed, dirs=dirs):
                est = mc_moment(sig, dirs[:arity], mc)
                z = abs(est.mean - closed) / est.std_error if est.std_error > 0 else float("inf")
                return z, 5.0

            rep.check(name, inputs, fn, value=closed)


def run_mc_check(cfg: RunConfig, *, timings: bool = False) -> Report:
    rep = Report("mc-check", cfg.to_json(), timings=timings)
    _mc_records(cfg, rep)
    return rep


def run_dims(max_n: int, *, timings: bool = False) -> Report:
    if max_n < 1:
        raise ValueError("max_n must be >= 1")
    rep = Report("dims", {"max_n": max_n}, timings=timings)
    table = []
    for n in range(1, max_n + 1):
        dim = dimension(n)
        table.append({"n": n, "dimension": dim})
        rep.check(f"dimension[n={n}]", {"n": n}, lambda n=n, dim=dim: (abs(family_rank(n) - dim), 0.5), value=dim)
    rep.data["table"] = table
    return rep


def run_decompose(tensor: RawCubicTensor, cfg: RunConfig, *, timings: bool = False) -> tuple[Report, dict | None]:
    rep = Report("decompose", cfg.to_json(), timings=timings)
    inputs = {"tensor": tensor.to_json()}
    inv = rep.check("on-invariance", inputs, lambda: (
        on_invariance_check(tensor, cfg.trials, cfg.seed, cfg.tol_exact).max_violation, cfg.tol_exact))
    if not inv.passed:
        return rep, None
    poly = to_power_sums(diag_restrict(tensor), tensor.n)
    from .polys import phi_inverse

    recon = raw_components(phi_inverse(poly)).components
    dev = float(np.max(np.abs(recon - tensor.components)))
    scale = max(1.0, tensor.max_abs())
    rep.check("reconstruction", inputs, lambda: (dev / scale, cfg.tol_exact), value=dev)
    if not rep.passed:
        return rep, None
    rep.data["polynomial"] = poly.to_json()
    return rep, poly.to_json()

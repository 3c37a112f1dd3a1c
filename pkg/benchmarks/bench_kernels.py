"""Compare the compiled kernels with the numpy fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 5] [--json]

Each row times one operation under every available backend (best of
``--repeat`` runs) and reports the speed-up of the compiled one.
"""
from __future__ import annotations

import argparse
import json
import timeit

import numpy as np

from invstat import _backend
from invstat.connections import cubic_field, fisher_field, parallel_check
from invstat.family import InvariantCubic
from invstat.gaussian import McConfig, mc_moment
from invstat.symcone import sample, weighted_basis


def _cases():
    for n in (3, 5, 8):
        for extended in (False, True):
            ms = weighted_basis(sample("spd", n, n), extended)
            tag = f"n={n}{' ld' if extended else ''}"
            yield f"pair_traces {tag}", lambda ms=ms: _backend.kernels().pair_traces(ms)
            yield f"cubic_components {tag}", lambda ms=ms: _backend.kernels().cubic_components(ms, 1.0, 0.5, -0.3, 1 / 3)

    rng = np.random.default_rng(0)
    x = rng.standard_normal((1 << 16, 3))
    amats = np.stack([sample("sym", 3, k).matrix for k in range(3)])
    offsets = np.zeros(3)
    yield "score_moments 65536x3", lambda: _backend.kernels().score_moments(x, amats, offsets)

    s3 = sample("spd", 3, 1)
    fld, g = cubic_field(InvariantCubic(3, 1.0, 1.0, 1.0)), fisher_field(3)
    yield "parallel_check n=3", lambda: parallel_check(fld, g, s3)

    s2 = sample("spd", 2, 2)
    dirs = [sample("sym", 2, k) for k in range(3)]
    cfg = McConfig(samples=1_000_000)
    yield "mc_moment n=2 1e6", lambda: mc_moment(s2, dirs, cfg)


def run(repeat: int) -> list[dict]:
    rows = []
    previous = _backend.name()
    try:
        for label, fn in _cases():
            row = {"case": label}
            for name in _backend.available():
                _backend.use(name)
                fn()  # warm-up
                row[name] = min(timeit.repeat(fn, number=1, repeat=repeat))
            rows.append(row)
    finally:
        _backend.use(previous)
    return rows


def main(argv=None) -> None:
    p = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    p.add_argument("--repeat", type=int, default=5)
    p.add_argument("--json", action="store_true", help="print raw timings as JSON")
    args = p.parse_args(argv)
    rows = run(args.repeat)
    if args.json:
        print(json.dumps(rows, indent=2))
        return
    names = _backend.available()
    print(f"{'case':28s}" + "".join(f"{n + ' [ms]':>14s}" for n in names) + ("  speed-up" if "native" in names else ""))
    for row in rows:
        line = f"{row['case']:28s}" + "".join(f"{1e3 * row[n]:14.3f}" for n in names)
        if "native" in names:
            line += f"  {row['python'] / row['native']:8.1f}x"
        print(line)


if __name__ == "__main__":
    main()

"""Fisher metric and Amari-Chentsov tensors on zero-mean Gaussians.

A covariance ``Sigma`` stands for ``N(0, Sigma)``; tangent vectors are
symmetric matrices.  ``GL(n)`` acts by ``h . Sigma = h Sigma h^T``.  Closed
forms at a general point follow from the values at the identity by
transport, which is why every trace is weighted by ``inv(Sigma)``.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import _backend
from .errors import ArityError, DomainError, ShapeError
from .symcone import GroupElement, SpdPoint, SymMat, as_matrix, sym_sqrt, weighted_basis

__all__ = [
    "McConfig",
    "McEstimate",
    "fisher_at",
    "ac_alpha_at",
    "fisher_components",
    "directional_score",
    "mc_moment",
    "act",
    "pushforward",
]


def _point(sigma) -> SpdPoint:
    if isinstance(sigma, SpdPoint):
        return sigma
    try:
        return SpdPoint.from_matrix(as_matrix(sigma))
    except np.linalg.LinAlgError as exc:  # pragma: no cover - eigvalsh on NaN input
        raise DomainError(str(exc)) from exc


def _weighted(sigma: SpdPoint, *dirs) -> list[np.ndarray]:
    # Whitened directions: every trace below is congruence invariant, and
    # whitening keeps accuracy at transported points with condition near 1e9.
    return sigma.whiten(*[as_matrix(x, sigma.n) for x in dirs])


def fisher_at(sigma, x, y) -> float:
    """``(1/2) tr(inv(S) X inv(S) Y)``."""
    sigma = _point(sigma)
    a, b = _weighted(sigma, x, y)
    return float(0.5 * np.sum(a * b.T))


def ac_alpha_at(alpha: float, sigma, x, y, z) -> float:
    """``alpha * tr(inv(S) X inv(S) Y inv(S) Z)``."""
    alpha = float(alpha)
    if not math.isfinite(alpha):
        raise ValueError("alpha must be finite")
    sigma = _point(sigma)
    a, b, c = _weighted(sigma, x, y, z)
    return alpha * float(np.sum((a @ b) * c.T))


def fisher_components(sigma, extended: bool = False) -> np.ndarray:
    """Gram matrix of the Fisher metric in the vech basis, shape ``(d, d)``.

    ``extended=True`` computes in long double and returns a long double array.
    """
    sigma = _point(sigma)
    return 0.5 * _backend.kernels().pair_traces(weighted_basis(sigma, extended))


def directional_score(sigma, x, sample) -> float:
    """Derivative of ``log N(sample | 0, Sigma)`` along ``X``."""
    sigma = _point(sigma)
    v = np.asarray(sample, dtype=float).reshape(-1)
    if v.size != sigma.n:
        raise ShapeError(f"sample has length {v.size}, expected {sigma.n}")
    sinv = sigma.inv
    xm = as_matrix(x, sigma.n)
    w = sinv @ v
    return 0.5 * float(w @ xm @ w) - 0.5 * float(np.sum(sinv * xm))


def _congruence(h: np.ndarray, m: np.ndarray) -> np.ndarray:
    hl = h.astype(np.longdouble)
    out = hl @ m.astype(np.longdouble) @ hl.T
    return 0.5 * (out + out.T)


def act(h, sigma) -> SpdPoint:
    """``h Sigma h^T``."""
    h = h if isinstance(h, GroupElement) else GroupElement(h)
    sigma = _point(sigma)
    if h.n != sigma.n:
        raise ShapeError("order mismatch")
    return SpdPoint(SymMat.from_matrix(_congruence(h.mat, sigma.matrix)))


def pushforward(h, x) -> SymMat:
    """``h X h^T``, the differential of ``act(h, .)``."""
    h = h if isinstance(h, GroupElement) else GroupElement(h)
    return SymMat.from_matrix(_congruence(h.mat, as_matrix(x, h.n)))


@dataclass(frozen=True)
class McConfig:
    samples: int = 1_000_000
    seed: int = 0
    chunk: int = 1 << 16

    def __post_init__(self):
        if int(self.samples) < 1:
            raise ValueError("samples must be >= 1")
        if int(self.chunk) < 1:
            raise ValueError("chunk must be >= 1")


@dataclass(frozen=True)
class McEstimate:
    mean: float
    std_error: float
    samples: int

    def to_json(self) -> dict:
        return {"mean": self.mean, "std_error": self.std_error, "samples": self.samples}

    @classmethod
    def from_json(cls, obj: dict) -> "McEstimate":
        return cls(float(obj["mean"]), float(obj["std_error"]), int(obj["samples"]))


def _chunk_stream(seed: int, index: int) -> np.random.Generator:
    ss = np.random.SeedSequence(entropy=int(seed) % 2**64, spawn_key=(index,))
    return np.random.Generator(np.random.PCG64(ss))


def mc_moment(sigma, dirs, cfg: McConfig = McConfig(), *, workers: int = 1) -> McEstimate:
    """Monte-Carlo mean of the product of directional scores under ``N(0, Sigma)``.

    With two directions the target is the Fisher metric, with three it is
    ``ac_alpha_at(1, ...)``.  Chunk ``c`` draws from a stream keyed by
    ``(cfg.seed, c)`` and chunk statistics are merged in chunk order, so the
    result does not depend on ``workers``.
    """
    sigma = _point(sigma)
    dirs = list(dirs)
    if len(dirs) not in (2, 3):
        raise ArityError(f"expected 2 or 3 directions, got {len(dirs)}")
    sinv = sigma.inv
    xs = [as_matrix(x, sigma.n) for x in dirs]
    amats = np.ascontiguousarray(np.stack([sinv @ x @ sinv for x in xs]))
    offsets = np.array([0.5 * float(np.sum(sinv * x)) for x in xs])
    root = sym_sqrt(sigma).mat
    kern = _backend.kernels()

    total, chunk = int(cfg.samples), int(cfg.chunk)
    bounds = [(c, min(chunk, total - c * chunk)) for c in range(-(-total // chunk))]

    def run(job):
        c, m = job
        z = _chunk_stream(cfg.seed, c).standard_normal((m, sigma.n))
        return kern.score_moments(z @ root, amats, offsets)

    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            stats = list(pool.map(run, bounds))
    else:
        stats = [run(b) for b in bounds]

    count, mean, m2 = 0, 0.0, 0.0
    for cb, mb, m2b in stats:
        if cb == 0:
            continue
        new = count + cb
        delta = mb - mean
        mean += delta * cb / new
        m2 += m2b + delta * delta * count * cb / new
        count = new
    se = math.sqrt(m2 / (count - 1) / count) if count > 1 else 0.0
    return McEstimate(float(mean), float(se), count)

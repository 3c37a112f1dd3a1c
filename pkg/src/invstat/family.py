"""The three-parameter family of GL(n)-invariant symmetric cubic tensors.

Generators at the identity::

    C1(X, Y, Z) = tr(XYZ)
    C2(X, Y, Z) = (trX tr(YZ) + trY tr(XZ) + trZ tr(XY)) / 3
    C3(X, Y, Z) = trX trY trZ

``C1`` with weight ``alpha`` is the Amari-Chentsov alpha-tensor.  At a general
covariance every matrix is first multiplied by ``inv(Sigma)``.
"""
from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass, field

import numpy as np

from . import _backend
from ._pykernels import symmetrize_fill
from .errors import DomainError, ShapeError
from .gaussian import _point, _weighted
from .symcone import (
    SymMat,
    as_matrix,
    basis_stack,
    identity,
    sample,
    to_vech,
    vech_dim,
    weighted_basis,
    _check_order,
)
from .verdict import Verdict

__all__ = [
    "InvariantCubic",
    "RawCubicTensor",
    "invariant_cubic_eval",
    "invariant_cubic_components",
    "raw_components",
    "on_invariance_check",
]

C2_WEIGHT = 1.0 / 3.0

# Weight used by the matrix evaluator only; the component kernels always use
# C2_WEIGHT.  Changed solely by ``_c2_weight_fault`` for fault injection.
_eval_c2_weight = C2_WEIGHT


@contextlib.contextmanager
def _c2_weight_fault(weight: float):
    global _eval_c2_weight
    old, _eval_c2_weight = _eval_c2_weight, float(weight)
    try:
        yield
    finally:
        _eval_c2_weight = old


@dataclass(frozen=True)
class InvariantCubic:
    """``a*C1 + b*C2 + c*C3`` on zero-mean Gaussians of dimension ``n``.

    Coordinates are kept raw; for ``n <= 2`` different triples can define
    the same tensor (see ``invstat.polys.phi``).
    """

    n: int
    a: float = 0.0
    b: float = 0.0
    c: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "n", _check_order(self.n))
        for name in ("a", "b", "c"):
            v = float(getattr(self, name))
            if not math.isfinite(v):
                raise ValueError(f"coefficient {name} must be finite")
            object.__setattr__(self, name, v)

    @classmethod
    def alpha(cls, n: int, alpha: float) -> "InvariantCubic":
        return cls(n, alpha, 0.0, 0.0)

    @property
    def coeffs(self) -> tuple[float, float, float]:
        return (self.a, self.b, self.c)

    def __add__(self, other: "InvariantCubic") -> "InvariantCubic":
        if self.n != other.n:
            raise ShapeError("order mismatch")
        return InvariantCubic(self.n, self.a + other.a, self.b + other.b, self.c + other.c)

    def __mul__(self, s: float) -> "InvariantCubic":
        return InvariantCubic(self.n, s * self.a, s * self.b, s * self.c)

    __rmul__ = __mul__


def invariant_cubic_eval(cubic: InvariantCubic, sigma, x, y, z) -> float:
    sigma = _point(sigma)
    if sigma.n != cubic.n:
        raise ShapeError(f"tensor has order {cubic.n}, point has order {sigma.n}")
    a, b, c = _weighted(sigma, x, y, z)
    ta, tb, tc = np.trace(a), np.trace(b), np.trace(c)
    val = cubic.a * float(np.sum((a @ b) * c.T))
    val += cubic.b * _eval_c2_weight * float(
        ta * np.sum(b * c.T) + tb * np.sum(a * c.T) + tc * np.sum(a * b.T)
    )
    val += cubic.c * float(ta * tb * tc)
    return val


def invariant_cubic_components(cubic: InvariantCubic, sigma, extended: bool = False) -> np.ndarray:
    """Full ``(d, d, d)`` component array of the field at ``sigma``.

    ``extended=True`` computes in long double and returns a long double array.
    """
    sigma = _point(sigma)
    if sigma.n != cubic.n:
        raise ShapeError(f"tensor has order {cubic.n}, point has order {sigma.n}")
    return _backend.kernels().cubic_components(weighted_basis(sigma, extended), cubic.a, cubic.b, cubic.c, C2_WEIGHT)


@dataclass(frozen=True, eq=False)
class RawCubicTensor:
    """A symmetric trilinear form on ``Sym(n)`` given by vech components."""

    n: int
    components: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = _check_order(self.n)
        d = vech_dim(n)
        t = np.array(self.components, dtype=float)
        if t.shape != (d, d, d):
            raise ShapeError(f"expected components of shape {(d, d, d)}, got {t.shape}")
        if not np.array_equal(t, symmetrize_fill(t)):
            raise DomainError("components are not symmetric under index permutations")
        t.setflags(write=False)
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "components", t)

    @classmethod
    def symmetrized(cls, n: int, components) -> "RawCubicTensor":
        """Build from the sorted-index entries of an arbitrary array."""
        return cls(n, symmetrize_fill(np.asarray(components, dtype=float)))

    @classmethod
    def zeros(cls, n: int) -> "RawCubicTensor":
        d = vech_dim(n)
        return cls(n, np.zeros((d, d, d)))

    @property
    def d(self) -> int:
        return self.components.shape[0]

    def __call__(self, x, y, z) -> float:
        u, v, w = (to_vech(as_matrix(m, self.n)) for m in (x, y, z))
        return float(np.einsum("abc,a,b,c->", self.components, u, v, w))

    def abs_scale(self, x, y, z) -> float:
        """Contraction of ``|T|`` against ``|x|, |y|, |z|``; bounds rounding error."""
        u, v, w = (np.abs(to_vech(as_matrix(m, self.n))) for m in (x, y, z))
        return float(np.einsum("abc,a,b,c->", np.abs(self.components), u, v, w))

    def max_abs(self) -> float:
        return float(np.max(np.abs(self.components)))

    def to_json(self) -> dict:
        d = self.d
        entries = [
            {"idx": [a, b, c], "val": float(self.components[a, b, c])}
            for a in range(d)
            for b in range(a, d)
            for c in range(b, d)
        ]
        return {"n": self.n, "valence": 3, "basis": "vech-lex", "entries": entries}

    @classmethod
    def from_json(cls, obj: dict) -> "RawCubicTensor":
        try:
            n = _check_order(obj["n"])
            if obj.get("valence", 3) != 3:
                raise ShapeError("only valence-3 tensors are supported")
            if obj.get("basis", "vech-lex") != "vech-lex":
                raise ShapeError(f"unsupported basis {obj.get('basis')!r}")
            d = vech_dim(n)
            t = np.zeros((d, d, d))
            seen = set()
            for e in obj["entries"]:
                idx = tuple(int(i) for i in e["idx"])
                if len(idx) != 3 or list(idx) != sorted(idx) or not all(0 <= i < d for i in idx):
                    raise ShapeError(f"bad multi-index {e['idx']!r}")
                if idx in seen:
                    raise ShapeError(f"duplicate multi-index {list(idx)}")
                seen.add(idx)
                t[idx] = float(e["val"])
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed tensor record: {exc}") from exc
        return cls.symmetrized(n, t)


def raw_components(cubic: InvariantCubic) -> RawCubicTensor:
    """Restriction of the field to the tangent space at the identity."""
    t = _backend.kernels().cubic_components(basis_stack(cubic.n), cubic.a, cubic.b, cubic.c, C2_WEIGHT)
    return RawCubicTensor(cubic.n, t)


def on_invariance_check(tensor: RawCubicTensor, trials: int = 100, seed: int = 0, tol: float = 1e-10) -> Verdict:
    """Compare ``T(kXk^T, kYk^T, kZk^T)`` with ``T(X, Y, Z)`` for random orthogonal ``k``.

    The error of each trial is measured relative to ``|T|`` contracted with
    ``|x|, |y|, |z|``.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    n = tensor.n
    worst = 0.0
    for t in range(trials):
        base = (int(seed) * 1_000_003 + 4 * t) % 2**64
        k = sample("orthogonal", n, base).mat
        xs = [sample("sym", n, base + j + 1).matrix for j in range(3)]
        rot = [k @ m @ k.T for m in xs]
        rot = [0.5 * (m + m.T) for m in rot]
        ref = tensor(*xs)
        diff = abs(tensor(*rot) - ref)
        scale = max(tensor.abs_scale(*xs), tensor.abs_scale(*rot))
        if diff > 0:
            worst = max(worst, diff / scale)
    return Verdict("on-invariance", n, identity(n).mat, worst, tol, worst < tol)

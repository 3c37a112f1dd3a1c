"""Cubic forms, restriction to diagonal matrices and power-sum coordinates.

An O(n)-invariant cubic form on ``Sym(n)`` is determined by its values on
diagonal matrices, where it becomes a symmetric cubic polynomial in the
eigenvalues.  Those are expanded in ``p3, p2*p1, p1**3`` (``p_k`` the power
sums); at ``n = 2`` only two of them are independent and at ``n = 1`` one.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .family import InvariantCubic, RawCubicTensor, raw_components
from .symcone import _check_order, basis_stack, sample, to_vech, vech_dim

__all__ = [
    "SymCubicPoly",
    "MonomialCoeffs",
    "cubic_form",
    "polarize",
    "homogeneity_defect",
    "diag_restrict",
    "to_power_sums",
    "phi",
    "phi_matrix",
    "phi_inverse",
    "dimension",
    "family_rank",
    "dependency",
]

POWER_SUM_KEYS = ("p3", "p2p1", "p1^3")
RANK_RTOL = 1e-9


def n_power_sums(n: int) -> int:
    return min(_check_order(n), 3)


@dataclass(frozen=True)
class SymCubicPoly:
    """``u*p3 + v*p2*p1 + w*p1**3`` in ``n`` variables, canonical coordinates only."""

    n: int
    u: float = 0.0
    v: float | None = None
    w: float | None = None

    def __post_init__(self):
        n = _check_order(self.n)
        k = n_power_sums(n)
        object.__setattr__(self, "n", n)
        vals = [self.u, self.v, self.w]
        for i, name in enumerate(("u", "v", "w")):
            val = vals[i]
            if i < k:
                val = 0.0 if val is None else float(val)
                if not math.isfinite(val):
                    raise ValueError(f"coefficient {name} must be finite")
            elif val not in (None, 0.0):
                raise ValueError(f"{name} is not a coordinate for n={n}")
            else:
                val = None
            object.__setattr__(self, name, val)

    @classmethod
    def from_coords(cls, n: int, coords) -> "SymCubicPoly":
        coords = [float(c) for c in coords]
        if len(coords) != n_power_sums(n):
            raise ValueError(f"expected {n_power_sums(n)} coordinates for n={n}")
        return cls(n, *coords)

    @property
    def coords(self) -> tuple[float, ...]:
        return tuple(x for x in (self.u, self.v, self.w) if x is not None)

    def __call__(self, lam) -> float:
        lam = np.asarray(lam, dtype=float)
        if lam.shape != (self.n,):
            raise ValueError(f"expected {self.n} variables")
        p1, p2, p3 = (float(np.sum(lam**k)) for k in (1, 2, 3))
        return sum(c * m for c, m in zip(self.coords, (p3, p2 * p1, p1**3)))

    def to_json(self) -> dict:
        return {
            "n": self.n,
            "basis": "power-sum",
            "coeffs": dict(zip(POWER_SUM_KEYS, self.coords)),
        }

    @classmethod
    def from_json(cls, obj: dict) -> "SymCubicPoly":
        n = _check_order(obj["n"])
        if obj.get("basis", "power-sum") != "power-sum":
            raise ValueError(f"unsupported basis {obj.get('basis')!r}")
        coeffs = obj["coeffs"]
        k = n_power_sums(n)
        extra = set(coeffs) - set(POWER_SUM_KEYS[:k])
        if extra:
            raise ValueError(f"coefficients {sorted(extra)} are not coordinates for n={n}")
        return cls.from_coords(n, [coeffs.get(key, 0.0) for key in POWER_SUM_KEYS[:k]])


@dataclass(frozen=True)
class MonomialCoeffs:
    """Coefficients on the monomial-type basis.

    ``c300`` multiplies ``sum x_i^3``, ``c210`` multiplies ``sum_{i != j} x_i^2 x_j``
    and ``c111`` multiplies ``sum_{i<j<k} x_i x_j x_k``.  Types that do not exist
    for the given ``n`` are ``None``.
    """

    c300: float
    c210: float | None = None
    c111: float | None = None

    @property
    def coords(self) -> tuple[float, ...]:
        return tuple(x for x in (self.c300, self.c210, self.c111) if x is not None)


def cubic_form(tensor: RawCubicTensor, x) -> float:
    """``T(X, X, X)``."""
    v = to_vech(np.asarray(x, dtype=float) if not hasattr(x, "matrix") else x.matrix)
    if v.size != tensor.d:
        raise ValueError(f"matrix order does not match tensor order {tensor.n}")
    return float(np.einsum("abc,a,b,c->", tensor.components, v, v, v))


def _polarize_entry(q, e, a, b, c) -> float:
    x, y, z = e[a], e[b], e[c]
    return (q(x + y + z) - q(x + y) - q(y + z) - q(x + z) + q(x) + q(y) + q(z)) / 6.0


def polarize(q: Callable[[np.ndarray], float], n: int, *, check: bool = False) -> RawCubicTensor:
    """Symmetric trilinear form whose cubic form is ``q``.

    ``q`` is called with full ``(n, n)`` symmetric matrices.  With
    ``check=True`` a ``ValueError`` is raised when ``q`` fails the
    degree-3 homogeneity probe.
    """
    n = _check_order(n)
    if check and homogeneity_defect(q, n) > 1e-9:
        raise ValueError("q is not a homogeneous cubic")
    d = vech_dim(n)
    e = basis_stack(n)
    t = np.zeros((d, d, d))
    for a in range(d):
        for b in range(a, d):
            for c in range(b, d):
                t[a, b, c] = _polarize_entry(q, e, a, b, c)
    return RawCubicTensor.symmetrized(n, t)


def homogeneity_defect(q: Callable[[np.ndarray], float], n: int, trials: int = 5, seed: int = 0) -> float:
    """Largest relative violation of ``q(2X) = 8 q(X)`` over random symmetric ``X``."""
    worst = 0.0
    for t in range(trials):
        x = sample("sym", n, seed + t).matrix
        lhs, rhs = q(2.0 * x), 8.0 * q(x)
        worst = max(worst, abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return worst


def diag_restrict(tensor: RawCubicTensor) -> MonomialCoeffs:
    """Monomial-type coefficients of ``lam -> T(diag lam, diag lam, diag lam)``."""
    n = tensor.n

    def f(k: int) -> float:
        lam = np.zeros(n)
        lam[:k] = 1.0
        return cubic_form(tensor, np.diag(lam))

    c300 = f(1)
    c210 = (f(2) - 2.0 * c300) / 2.0 if n >= 2 else None
    c111 = f(3) - 3.0 * c300 - 6.0 * c210 if n >= 3 else None
    return MonomialCoeffs(c300, c210, c111)


def to_power_sums(m: MonomialCoeffs, n: int) -> SymCubicPoly:
    n = _check_order(n)
    if n >= 3:
        w = m.c111 / 6.0
        v = m.c210 - 3.0 * w
        return SymCubicPoly(n, m.c300 - v - w, v, w)
    if n == 2:
        return SymCubicPoly(n, m.c300 - m.c210, m.c210)
    return SymCubicPoly(n, m.c300)


def phi(cubic: InvariantCubic) -> SymCubicPoly:
    """Symmetric polynomial of an invariant cubic, via its diagonal restriction."""
    return to_power_sums(diag_restrict(raw_components(cubic)), cubic.n)


def phi_matrix(n: int) -> np.ndarray:
    """Matrix of ``phi`` from ``(a, b, c)`` to canonical power-sum coordinates.

    In two variables ``p1**3 = 3*p2*p1 - 2*p3``; in one variable all three
    power-sum products equal ``x**3``.
    """
    n = _check_order(n)
    if n >= 3:
        return np.eye(3)
    if n == 2:
        return np.array([[1.0, 0.0, -2.0], [0.0, 1.0, 3.0]])
    return np.ones((1, 3))


def phi_inverse(poly: SymCubicPoly) -> InvariantCubic:
    """Right inverse of ``phi``; the ``C3`` coordinate is zero for ``n = 2``."""
    coords = list(poly.coords) + [0.0] * (3 - len(poly.coords))
    return InvariantCubic(poly.n, *coords)


def _monomial_vectors(n: int) -> np.ndarray:
    """Rows: monomial-type coefficients of ``p3, p2*p1, p1**3`` in ``n`` variables."""
    polys = [
        lambda lam: np.sum(lam**3),
        lambda lam: np.sum(lam**2) * np.sum(lam),
        lambda lam: np.sum(lam) ** 3,
    ]
    rows = []
    for p in polys:
        def f(k, p=p):
            lam = np.zeros(n)
            lam[:k] = 1.0
            return float(p(lam))

        c300 = f(1)
        row = [c300]
        if n >= 2:
            c210 = (f(2) - 2 * c300) / 2
            row.append(c210)
        if n >= 3:
            row.append(f(3) - 3 * c300 - 6 * c210)
        rows.append(row)
    return np.array(rows)


def _rank(m: np.ndarray) -> int:
    s = np.linalg.svd(m, compute_uv=False)
    if s.size == 0 or s[0] == 0.0:
        return 0
    return int(np.sum(s > RANK_RTOL * s[0]))


def dimension(n: int) -> int:
    """Dimension of the space of cubic symmetric polynomials in ``n`` variables."""
    return _rank(_monomial_vectors(_check_order(n)))


def family_rank(n: int) -> int:
    """Rank of the component arrays of ``C1, C2, C3`` at the identity."""
    rows = [raw_components(InvariantCubic(n, *e)).components.ravel() for e in np.eye(3)]
    return _rank(np.array(rows))


def dependency(n: int) -> np.ndarray | None:
    """Null vector ``(a, b, c)`` of ``p3, p2*p1, p1**3`` scaled so that ``c = 1``.

    ``None`` when the three are independent.  For ``n = 1`` the null space is
    two-dimensional and an arbitrary basis vector of it is returned.
    """
    m = _monomial_vectors(_check_order(n)).T
    _, s, vt = np.linalg.svd(m)
    rank = int(np.sum(s > RANK_RTOL * s[0]))
    if rank == 3:
        return None
    vec = vt[-1]
    return vec / vec[np.argmax(np.abs(vec))] if abs(vec[2]) < 1e-12 else vec / vec[2]

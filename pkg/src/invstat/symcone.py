"""Symmetric matrices in vech coordinates, the SPD cone and group elements.

The chart on ``Sym(n)`` is the half-vectorization ``vech`` with entries
``(i, j), i <= j`` in lexicographic order.  Off-diagonal basis elements carry
ones at both ``(i, j)`` and ``(j, i)``; they are not rescaled by ``1/sqrt(2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import DomainError, InvalidOrderError, ShapeError

SPD_TOL = 1e-10
DET_TOL = 1e-10
SPD_EPS = 1e-3

__all__ = [
    "SymMat",
    "SpdPoint",
    "GroupElement",
    "VechBasis",
    "vech_dim",
    "vech_indices",
    "to_vech",
    "from_vech",
    "sym_basis",
    "sample",
    "sym_sqrt",
    "sym_expm",
    "identity",
    "as_matrix",
]


def _check_order(n) -> int:
    if isinstance(n, (bool, np.bool_)) or not isinstance(n, (int, np.integer)) or n < 1:
        raise InvalidOrderError(f"matrix order must be a positive integer, got {n!r}")
    return int(n)


def vech_dim(n: int) -> int:
    n = _check_order(n)
    return n * (n + 1) // 2


@lru_cache(maxsize=None)
def vech_indices(n: int) -> tuple[np.ndarray, np.ndarray]:
    """Row and column index arrays of the vech chart, lexicographic in (i, j)."""
    n = _check_order(n)
    rows, cols = np.triu_indices(n)
    rows.setflags(write=False)
    cols.setflags(write=False)
    return rows, cols


def _real(a) -> np.ndarray:
    """float64 array, or long double when the input already is."""
    a = np.asarray(a)
    return a if a.dtype == np.longdouble else a.astype(float)


def to_vech(m) -> np.ndarray:
    m = _real(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    rows, cols = vech_indices(m.shape[0])
    return m[rows, cols].copy()


def _order_from_dim(d: int) -> int:
    n = int(round((np.sqrt(8 * d + 1) - 1) / 2))
    if n < 1 or n * (n + 1) // 2 != d:
        raise ShapeError(f"{d} is not a triangular number n(n+1)/2")
    return n


def from_vech(v, n: int | None = None) -> np.ndarray:
    v = _real(v)
    if v.ndim != 1:
        raise ShapeError(f"vech vector must be 1-d, got shape {v.shape}")
    if n is None:
        n = _order_from_dim(v.size)
    elif v.size != vech_dim(n):
        raise ShapeError(f"vech of order {n} has {vech_dim(n)} entries, got {v.size}")
    rows, cols = vech_indices(n)
    m = np.zeros((n, n), dtype=v.dtype)
    m[rows, cols] = v
    m[cols, rows] = v
    return m


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(_real(a))
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class SymMat:
    """A real symmetric matrix stored by its vech coordinates.

    Storage is float64, or long double when constructed from long double data
    (the group action does this to keep transported points accurate).
    """

    n: int
    vech: np.ndarray = field(repr=False)

    def __post_init__(self):
        n = _check_order(self.n)
        v = _real(self.vech)
        if v.shape != (vech_dim(n),):
            raise ShapeError(f"vech of order {n} has {vech_dim(n)} entries, got shape {v.shape}")
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "vech", _frozen(v))

    @classmethod
    def from_matrix(cls, m, *, atol: float = 0.0) -> "SymMat":
        """Wrap a square matrix; it must be symmetric up to ``atol``."""
        m = _real(m)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {m.shape}")
        if np.max(np.abs(m - m.T), initial=0.0) > atol:
            raise DomainError("matrix is not symmetric")
        return cls(m.shape[0], to_vech(m))

    @property
    def matrix(self) -> np.ndarray:
        return from_vech(self.vech, self.n)

    def __array__(self, dtype=None, copy=None):
        m = self.matrix
        return m if dtype is None else m.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SymMat):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.vech, other.vech)

    def __hash__(self):
        return hash((self.n, self.vech.tobytes()))

    def __add__(self, other: "SymMat") -> "SymMat":
        if self.n != other.n:
            raise ShapeError("order mismatch")
        return SymMat(self.n, self.vech + other.vech)

    def __sub__(self, other: "SymMat") -> "SymMat":
        if self.n != other.n:
            raise ShapeError("order mismatch")
        return SymMat(self.n, self.vech - other.vech)

    def __mul__(self, s: float) -> "SymMat":
        return SymMat(self.n, float(s) * self.vech)

    __rmul__ = __mul__

    def __neg__(self) -> "SymMat":
        return SymMat(self.n, -self.vech)

    def to_json(self) -> dict:
        return {"n": self.n, "vech": [float(x) for x in self.vech]}

    @classmethod
    def from_json(cls, obj: dict) -> "SymMat":
        try:
            return cls(obj["n"], np.asarray(obj["vech"], dtype=float))
        except (KeyError, TypeError) as exc:
            raise ShapeError(f"malformed SymMat record: {exc}") from exc


def is_spd(m: np.ndarray, tol: float = SPD_TOL) -> bool:
    lam = np.linalg.eigvalsh(np.asarray(m, dtype=float))
    return bool(lam[0] > tol * max(1.0, lam[-1]))


@dataclass(frozen=True, eq=False)
class SpdPoint:
    """A covariance matrix, i.e. a point of the open cone Sym+(n)."""

    mat: SymMat
    tol: float = SPD_TOL

    def __post_init__(self):
        if not isinstance(self.mat, SymMat):
            object.__setattr__(self, "mat", SymMat.from_matrix(self.mat))
        if not is_spd(self.mat.matrix, self.tol):
            raise DomainError("matrix is not positive definite")

    @classmethod
    def from_matrix(cls, m, tol: float = SPD_TOL) -> "SpdPoint":
        return cls(SymMat.from_matrix(m), tol)

    @property
    def n(self) -> int:
        return self.mat.n

    @property
    def matrix(self) -> np.ndarray:
        return self.mat.matrix

    def __array__(self, dtype=None, copy=None):
        return self.mat.__array__(dtype)

    def __eq__(self, other):
        if not isinstance(other, SpdPoint):
            return NotImplemented
        return self.mat == other.mat

    def __hash__(self):
        return hash(self.mat)

    @property
    def inv(self) -> np.ndarray:
        m = self.matrix.astype(float)
        return np.linalg.solve(m, np.eye(self.n))

    def inv_extended(self) -> np.ndarray:
        """Inverse in long double, refined by Newton steps from the float64 solve."""
        m = self.matrix.astype(np.longdouble)
        x = self.inv.astype(np.longdouble)
        eye = np.eye(self.n, dtype=np.longdouble)
        for _ in range(2):
            x = x + x @ (eye - m @ x)
        return 0.5 * (x + x.T)

    def eigvalsh(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix.astype(float))

    def cholesky_extended(self) -> np.ndarray:
        """Lower Cholesky factor computed in long double."""
        m = self.matrix.astype(np.longdouble)
        low = np.zeros_like(m)
        for j in range(self.n):
            piv = m[j, j] - low[j, :j] @ low[j, :j]
            if not piv > 0:
                raise DomainError("matrix is not positive definite")
            low[j, j] = np.sqrt(piv)
            low[j + 1 :, j] = (m[j + 1 :, j] - low[j + 1 :, :j] @ low[j, :j]) / low[j, j]
        return low

    def whiten(self, *mats) -> list[np.ndarray]:
        """``inv(L) M inv(L)^T`` in long double for each matrix, where ``L L^T = Sigma``.

        Traces of products of ``inv(Sigma) M`` equal traces of products of the
        whitened matrices.  The whitened form has entries of the size of the
        result, so it avoids the cancellation that explicit inverses suffer at
        ill-conditioned points.
        """
        low = self.cholesky_extended()
        return [_lower_solve(low, _lower_solve(low, np.asarray(m, dtype=np.longdouble)).T) for m in mats]


def _lower_solve(low: np.ndarray, b: np.ndarray) -> np.ndarray:
    x = np.array(b, dtype=np.longdouble)
    for i in range(low.shape[0]):
        x[i] = (x[i] - low[i, :i] @ x[:i]) / low[i, i]
    return x


@dataclass(frozen=True, eq=False)
class GroupElement:
    """An element of GL(n, R)."""

    mat: np.ndarray
    tol: float = DET_TOL

    def __post_init__(self):
        m = np.asarray(self.mat, dtype=float)
        if m.ndim != 2 or m.shape[0] != m.shape[1]:
            raise ShapeError(f"expected a square matrix, got shape {m.shape}")
        _check_order(m.shape[0])
        if not abs(np.linalg.det(m)) > self.tol:
            raise DomainError("group element is singular")
        object.__setattr__(self, "mat", _frozen(m))

    @property
    def n(self) -> int:
        return self.mat.shape[0]

    def __array__(self, dtype=None, copy=None):
        return np.array(self.mat, dtype=dtype)

    def is_orthogonal(self, atol: float = 1e-12) -> bool:
        return bool(np.max(np.abs(self.mat @ self.mat.T - np.eye(self.n))) < atol)


@dataclass(frozen=True)
class VechBasis:
    n: int
    elements: tuple[SymMat, ...]

    def __len__(self):
        return len(self.elements)

    def __iter__(self):
        return iter(self.elements)

    def __getitem__(self, i):
        return self.elements[i]

    @property
    def matrices(self) -> np.ndarray:
        """Stacked basis matrices, shape ``(d, n, n)``."""
        return basis_stack(self.n)


@lru_cache(maxsize=None)
def basis_stack(n: int) -> np.ndarray:
    d = vech_dim(n)
    out = np.empty((d, n, n))
    for a, e in enumerate(np.eye(d)):
        out[a] = from_vech(e, n)
    out.setflags(write=False)
    return out


def sym_basis(n: int) -> VechBasis:
    n = _check_order(n)
    return VechBasis(n, tuple(SymMat(n, e) for e in np.eye(vech_dim(n))))


def identity(n: int) -> SpdPoint:
    return SpdPoint(SymMat.from_matrix(np.eye(_check_order(n))))


def as_matrix(x, n: int | None = None) -> np.ndarray:
    """Full ``(n, n)`` array for a SymMat, SpdPoint, GroupElement or array."""
    if isinstance(x, (SymMat, SpdPoint)):
        m = x.matrix
    elif isinstance(x, GroupElement):
        m = x.mat
    else:
        m = _real(x)
        if m.ndim == 0:
            m = m.reshape(1, 1)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ShapeError(f"expected a square matrix, got shape {m.shape}")
    if n is not None and m.shape[0] != n:
        raise ShapeError(f"order mismatch: expected {n}, got {m.shape[0]}")
    return m


def _rng(kind: str, n: int, seed: int) -> np.random.Generator:
    tag = ("spd", "sym", "general-linear", "orthogonal").index(kind)
    return np.random.default_rng(np.random.SeedSequence([int(seed) % 2**64, tag, n]))


def sample(kind: str, n: int, seed: int, *, det_tol: float = DET_TOL):
    """Deterministic random SPD point, symmetric matrix, GL(n) or O(n) element.

    Parameters
    ----------
    kind : {"spd", "sym", "general-linear", "orthogonal"}
    n : int
        Matrix order.
    seed : int
        Any integer; reduced modulo 2**64.

    Returns
    -------
    SpdPoint, SymMat or GroupElement
    """
    n = _check_order(n)
    if kind not in ("spd", "sym", "general-linear", "orthogonal"):
        raise ValueError(f"unknown sample kind {kind!r}")
    rng = _rng(kind, n, seed)
    if kind == "spd":
        a = rng.standard_normal((n, n))
        m = a @ a.T + SPD_EPS * np.eye(n)
        return SpdPoint(SymMat.from_matrix(0.5 * (m + m.T)))
    if kind == "sym":
        a = rng.standard_normal((n, n))
        return SymMat.from_matrix(0.5 * (a + a.T))
    if kind == "general-linear":
        while True:
            a = rng.standard_normal((n, n))
            if abs(np.linalg.det(a)) > det_tol:
                return GroupElement(a, det_tol)
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    signs = np.where(np.diag(r) < 0, -1.0, 1.0)
    return GroupElement(q * signs)


def _spd_eigh(sigma) -> tuple[np.ndarray, np.ndarray]:
    m = as_matrix(sigma).astype(float)
    if not isinstance(sigma, SpdPoint) and not is_spd(m):
        raise DomainError("matrix is not positive definite")
    lam, q = np.linalg.eigh(m)
    if lam[0] <= 0:
        raise DomainError("matrix is not positive definite")
    return lam, q


def sym_sqrt(sigma) -> GroupElement:
    """Symmetric positive-definite square root ``h`` with ``h @ h = sigma``."""
    lam, q = _spd_eigh(sigma)
    h = (q * np.sqrt(lam)) @ q.T
    return GroupElement(0.5 * (h + h.T))


def sym_expm(a) -> np.ndarray:
    """Matrix exponential of a symmetric matrix via its eigendecomposition."""
    m = as_matrix(a).astype(float)
    lam, q = np.linalg.eigh(m)
    e = (q * np.exp(lam)) @ q.T
    return 0.5 * (e + e.T)


def weighted_basis(sigma: SpdPoint, extended: bool = False) -> np.ndarray:
    """Stack of ``inv(sigma) @ E_a`` over the vech basis, shape ``(d, n, n)``.

    With ``extended`` the stack is long double.
    """
    if extended:
        sinv = sigma.inv_extended()
        e = basis_stack(sigma.n).astype(np.longdouble)
    else:
        sinv, e = sigma.inv, basis_stack(sigma.n)
    return np.ascontiguousarray(np.einsum("ij,ajk->aik", sinv, e))

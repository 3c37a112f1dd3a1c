"""Levi-Civita connection of the Fisher metric and covariant derivatives.

Tensor fields are evaluated in the vech chart with constant coordinate
frames; partial derivatives are second-order central differences along the
basis directions ``E_w``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ._pykernels import symmetrize_fill
from .errors import ShapeError, StepTooLargeError
from .family import InvariantCubic, invariant_cubic_components
from .gaussian import _point, fisher_components
from .symcone import (
    SpdPoint,
    SymMat,
    as_matrix,
    basis_stack,
    identity,
    is_spd,
    sym_expm,
    to_vech,
    vech_dim,
)
from .verdict import Verdict

__all__ = [
    "TensorField",
    "ChristoffelData",
    "FdScheme",
    "fisher_field",
    "cubic_field",
    "euclidean_field",
    "zero_field",
    "christoffel_closed",
    "christoffel_closed_components",
    "christoffel_fd",
    "cov_deriv",
    "field_scale",
    "conjugate_symmetry_check",
    "parallel_check",
    "metric_compatibility_check",
    "canonical_deriv",
    "contract_direction",
    "partials",
    "exp_flow_tangent_defect",
    "phi_eta_check",
]

MAX_HALVINGS = 8


@dataclass(frozen=True)
class TensorField:
    """A symmetric covariant tensor field given by its vech components."""

    valence: int
    n: int
    eval: Callable[[SpdPoint], np.ndarray] = field(repr=False)
    name: str = "field"

    def __call__(self, sigma) -> np.ndarray:
        sigma = _point(sigma)
        if sigma.n != self.n:
            raise ShapeError(f"field has order {self.n}, point has order {sigma.n}")
        t = np.asarray(self.eval(sigma), dtype=float)
        d = vech_dim(self.n)
        if t.shape != (d,) * self.valence:
            raise ShapeError(f"field returned shape {t.shape}, expected {(d,) * self.valence}")
        return t


def fisher_field(n: int, extended: bool = True) -> TensorField:
    return TensorField(2, n, lambda s: fisher_components(s, extended), "fisher")


def cubic_field(cubic: InvariantCubic, extended: bool = True) -> TensorField:
    return TensorField(
        3,
        cubic.n,
        lambda s: invariant_cubic_components(cubic, s, extended),
        f"cubic({cubic.a:g},{cubic.b:g},{cubic.c:g})",
    )


def euclidean_field(n: int) -> TensorField:
    d = vech_dim(n)
    return TensorField(2, n, lambda s: np.eye(d), "euclidean")


def zero_field(n: int, valence: int = 3) -> TensorField:
    d = vech_dim(n)
    return TensorField(valence, n, lambda s: np.zeros((d,) * valence), "zero")


@dataclass(frozen=True, eq=False)
class ChristoffelData:
    """``gamma[c, a, b]`` is the coefficient of ``E_c`` in ``nabla_{E_a} E_b``."""

    base: SpdPoint
    gamma: np.ndarray = field(repr=False)

    def __post_init__(self):
        g = np.array(self.gamma, dtype=float)
        if not np.array_equal(g, g.transpose(0, 2, 1)):
            raise ValueError("Christoffel symbols must be symmetric in the lower indices")
        g.setflags(write=False)
        object.__setattr__(self, "gamma", g)


_ORDERS = {"central-2": 0, "richardson-4": 1, "richardson-6": 2}


@dataclass(frozen=True)
class FdScheme:
    """Central-difference stencil, optionally Richardson-extrapolated.

    The step at ``Sigma`` is ``step * lambda_min(Sigma)`` rounded to a power of
    two, so the stencil has the same relative size in every direction of the
    cone and ``Sigma +- h E_w`` is exact in floating point.
    """

    step: float = 3e-6
    order: str = "central-2"

    def __post_init__(self):
        if not 1e-8 <= self.step <= 1e-2:
            raise ValueError("step must lie in [1e-8, 1e-2]")
        if self.order not in _ORDERS:
            raise ValueError(f"unsupported scheme {self.order!r}; choose from {sorted(_ORDERS)}")

    @property
    def levels(self) -> int:
        return _ORDERS[self.order]

    def step_at(self, sigma: SpdPoint) -> float:
        h = self.step * float(sigma.eigvalsh()[0])
        return float(2.0 ** np.round(np.log2(h)))


def _lower_sym(gamma: np.ndarray) -> np.ndarray:
    d = gamma.shape[1]
    a, b = np.triu_indices(d)
    out = np.empty_like(gamma)
    out[:, a, b] = gamma[:, a, b]
    out[:, b, a] = gamma[:, a, b]
    return out


def christoffel_closed(sigma, x, y) -> SymMat:
    """``-(X inv(S) Y + Y inv(S) X) / 2``."""
    sigma = _point(sigma)
    xm, ym = as_matrix(x, sigma.n), as_matrix(y, sigma.n)
    sinv = sigma.inv
    u = xm @ sinv @ ym
    return SymMat.from_matrix(-0.5 * (u + u.T))


def christoffel_closed_components(sigma) -> ChristoffelData:
    sigma = _point(sigma)
    e = basis_stack(sigma.n)
    sinv = sigma.inv
    u = np.einsum("aij,jk,bkl->abil", e, sinv, e)
    gam = -0.5 * (u + u.transpose(0, 1, 3, 2))
    rows, cols = np.triu_indices(sigma.n)
    gamma = np.moveaxis(gam[:, :, rows, cols], 2, 0)
    return ChristoffelData(sigma, _lower_sym(gamma))


def _stencil_step(sigma: SpdPoint, scheme: FdScheme) -> float:
    h = scheme.step_at(sigma)
    m = sigma.matrix
    e = basis_stack(sigma.n)
    for _ in range(MAX_HALVINGS + 1):
        if all(is_spd(m + s * h * ew) for ew in e for s in (1.0, -1.0)):
            return h
        h *= 0.5
    raise StepTooLargeError(f"finite-difference stencil leaves the SPD cone (step {h:.3g})")


def _central(fld: TensorField, m: np.ndarray, ew: np.ndarray, h: float) -> np.ndarray:
    plus = fld(SpdPoint.from_matrix(m + h * ew))
    minus = fld(SpdPoint.from_matrix(m - h * ew))
    return (plus - minus) / (2 * h)


def partials(fld: TensorField, sigma, scheme: FdScheme = FdScheme()) -> np.ndarray:
    """``out[w, ...] = d/dE_w`` of the field components at ``sigma``.

    Keeps the field's precision (long double fields give long double output).
    """
    sigma = _point(sigma)
    h = _stencil_step(sigma, scheme)
    m = sigma.matrix
    out = []
    for ew in basis_stack(sigma.n):
        row = [_central(fld, m, ew, h / 2**j) for j in range(scheme.levels + 1)]
        for k in range(1, scheme.levels + 1):
            f = 4**k
            row = [(f * row[j + 1] - row[j]) / (f - 1) for j in range(len(row) - 1)]
        out.append(row[0])
    return np.stack(out)


# Raising an index with the vech Gram matrix amplifies errors in the metric
# partials by up to cond(Sigma)**2, hence the extrapolated default.
CHRISTOFFEL_SCHEME = FdScheme(5e-3, "richardson-6")


def christoffel_fd(g: TensorField, sigma, scheme: FdScheme = CHRISTOFFEL_SCHEME) -> ChristoffelData:
    """Christoffel symbols of ``g`` from finite-difference metric partials."""
    if g.valence != 2:
        raise ShapeError("christoffel_fd needs a valence-2 field")
    sigma = _point(sigma)
    gm = symmetrize_fill(g(sigma)).astype(float)
    dg = np.stack([symmetrize_fill(p) for p in partials(g, sigma, scheme)])
    # lowered[d, a, b] = (d_a g_bd + d_b g_ad - d_d g_ab) / 2
    lowered = (0.5 * (dg.transpose(2, 0, 1) + dg.transpose(2, 1, 0) - dg)).astype(float)
    gamma = np.linalg.solve(gm, lowered.reshape(gm.shape[0], -1)).reshape(lowered.shape)
    return ChristoffelData(sigma, _lower_sym(gamma))


def _connection(g: TensorField, sigma: SpdPoint) -> ChristoffelData:
    if g.name == "fisher":
        return christoffel_closed_components(sigma)
    return christoffel_fd(g, sigma)


def _christoffel_terms(gamma: np.ndarray, t: np.ndarray) -> np.ndarray:
    """``sum_i sum_e gamma[e, w, x_i] T[..., e, ...]`` with ``e`` in slot ``i``."""
    k = t.ndim
    total = np.zeros((gamma.shape[0],) * (k + 1))
    w, e = k + 1, k + 2
    for i in range(k):
        t_idx = list(range(k))
        t_idx[i] = e
        total += np.einsum(gamma, [e, w, i], t, t_idx, [w] + list(range(k)))
    return total


def cov_deriv(
    fld: TensorField,
    g: TensorField,
    sigma,
    scheme: FdScheme = FdScheme(),
    christoffel: ChristoffelData | None = None,
) -> np.ndarray:
    """Levi-Civita covariant derivative; ``out[w, x, y, ...] = (nabla_w T)_{x y ...}``.

    Works for any valence.  ``scheme`` drives the partials of ``fld``.  The
    Christoffel symbols are the closed form for the Fisher metric and
    ``christoffel_fd(g)`` otherwise, unless ``christoffel`` is given.
    """
    sigma = _point(sigma)
    if fld.n != sigma.n or g.n != sigma.n:
        raise ShapeError("order mismatch")
    if christoffel is None:
        christoffel = _connection(g, sigma)
    comp = fld(sigma)
    gamma = christoffel.gamma.astype(comp.dtype)
    return (partials(fld, sigma, scheme) - _christoffel_terms(gamma, comp)).astype(float)


def field_scale(fld: TensorField, sigma) -> float:
    """``max(1, |T|_max at sigma, |T|_max at the identity)``."""
    sigma = _point(sigma)
    return max(1.0, float(np.max(np.abs(fld(sigma)))), float(np.max(np.abs(fld(identity(sigma.n))))))


def conjugate_symmetry_check(fld, g, sigma, scheme: FdScheme = FdScheme(), tol: float = 1e-5) -> Verdict:
    """Symmetry of ``nabla C`` in its first two slots, relative to the field scale."""
    sigma = _point(sigma)
    dc = cov_deriv(fld, g, sigma, scheme)
    asym = float(np.max(np.abs(dc - np.swapaxes(dc, 0, 1))))
    scale = max(float(np.max(np.abs(dc))), field_scale(fld, sigma))
    viol = asym / scale
    return Verdict("conjugate-symmetry", sigma.n, sigma.mat, viol, tol, viol < tol)


def parallel_check(fld, g, sigma, scheme: FdScheme = FdScheme(), tol: float = 1e-5) -> Verdict:
    """``nabla C == 0`` relative to the field scale."""
    sigma = _point(sigma)
    dc = cov_deriv(fld, g, sigma, scheme)
    viol = float(np.max(np.abs(dc))) / field_scale(fld, sigma)
    return Verdict("parallel", sigma.n, sigma.mat, viol, tol, viol < tol)


def metric_compatibility_check(g, sigma, scheme: FdScheme = FdScheme(), tol: float = 1e-6) -> Verdict:
    """``nabla g == 0``: finite-difference partials of ``g`` against its connection.

    For the Fisher metric the connection is the closed form, so this checks
    that formula against the metric it should preserve.
    """
    sigma = _point(sigma)
    dg = cov_deriv(g, g, sigma, scheme)
    viol = float(np.max(np.abs(dg))) / field_scale(g, sigma)
    return Verdict("metric-compatibility", sigma.n, sigma.mat, viol, tol, viol < tol)


def _pullback(fld: TensorField, v: np.ndarray, t: float) -> np.ndarray:
    """Components of the pullback of ``fld`` along ``q -> E q E^T``, ``E = exp(t v / 2)``."""
    n = fld.n
    ex = sym_expm(0.5 * t * v)
    moved = np.einsum("ij,ajk,lk->ail", ex, basis_stack(n), ex)
    jac = np.stack([to_vech(0.5 * (m + m.T)) for m in moved])
    comp = fld(SpdPoint.from_matrix(ex @ ex.T))
    for i in range(fld.valence):
        comp = np.moveaxis(np.tensordot(jac, comp, axes=([1], [i])), 0, i)
    return comp


def canonical_deriv(fld: TensorField, v, scheme: FdScheme = FdScheme()) -> np.ndarray:
    """Canonical-connection derivative at the identity in direction ``v``.

    The tangent vector ``v`` is generated by the one-parameter subgroup
    ``exp(-t X)`` with ``X = -v/2``; the result is the Lie derivative of the
    field along the induced flow, by central differences in ``t``.
    """
    vm = as_matrix(v, fld.n)
    h = scheme.step
    return (_pullback(fld, vm, h) - _pullback(fld, vm, -h)) / (2.0 * h)


def contract_direction(dc: np.ndarray, v) -> np.ndarray:
    """Contract the derivative slot of ``cov_deriv`` output with ``v``."""
    vv = to_vech(as_matrix(v))
    return np.tensordot(vv, dc, axes=([0], [0]))


def exp_flow_tangent_defect(a, t: float) -> float:
    """Max-norm distance between the velocity of ``exp(-tA) exp(-tA)^T`` at 0 and ``-2A``."""
    if not 0.0 < t <= 1e-2:
        raise ValueError("t must lie in (0, 1e-2]")
    am = as_matrix(a)
    fwd, bwd = sym_expm(-t * am), sym_expm(t * am)
    diff = (fwd @ fwd.T - bwd @ bwd.T) / (2.0 * t)
    return float(np.max(np.abs(diff + 2.0 * am)))


phi_eta_check = exp_flow_tangent_defect

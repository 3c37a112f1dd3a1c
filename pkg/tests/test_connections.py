import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from invstat import ShapeError, StepTooLargeError
from invstat.connections import (
    CHRISTOFFEL_SCHEME,
    ChristoffelData,
    FdScheme,
    TensorField,
    canonical_deriv,
    christoffel_closed,
    christoffel_closed_components,
    christoffel_fd,
    conjugate_symmetry_check,
    contract_direction,
    cov_deriv,
    cubic_field,
    euclidean_field,
    exp_flow_tangent_defect,
    fisher_field,
    metric_compatibility_check,
    parallel_check,
    partials,
    phi_eta_check,
    zero_field,
)
from invstat.family import InvariantCubic
from invstat.symcone import SpdPoint, identity, sample, sym_basis, to_vech

from conftest import rel


def test_closed_form_examples():
    for n in (1, 2, 3):
        eye = identity(n).mat
        assert np.array_equal(christoffel_closed(identity(n), eye, eye).matrix, -np.eye(n))
        y = sample("sym", n, n)
        assert np.allclose(christoffel_closed(identity(n), eye, y).matrix, -y.matrix, rtol=0, atol=1e-15)


def test_closed_form_bilinear_and_symmetric():
    s = sample("spd", 3, 1)
    x1, x2, y = (sample("sym", 3, k) for k in (2, 3, 4))
    lhs = christoffel_closed(s, 2.0 * x1 + x2, y).matrix
    rhs = 2.0 * christoffel_closed(s, x1, y).matrix + christoffel_closed(s, x2, y).matrix
    assert np.allclose(lhs, rhs, rtol=1e-13, atol=1e-13)
    assert np.allclose(christoffel_closed(s, x1, y).matrix, christoffel_closed(s, y, x1).matrix, rtol=1e-14, atol=1e-14)


def test_closed_components_match_operator():
    s = sample("spd", 2, 5)
    gam = christoffel_closed_components(s).gamma
    basis = sym_basis(2)
    for a, ea in enumerate(basis):
        for b, eb in enumerate(basis):
            assert np.allclose(gam[:, a, b], to_vech(christoffel_closed(s, ea, eb).matrix), rtol=1e-14, atol=1e-14)


def test_christoffel_data_requires_lower_symmetry():
    g = np.zeros((3, 3, 3))
    g[0, 0, 1] = 1.0
    with pytest.raises(ValueError):
        ChristoffelData(identity(2), g)


@pytest.mark.parametrize("step", [0.0, 1e-9, 0.02])
def test_fd_scheme_step_range(step):
    with pytest.raises(ValueError):
        FdScheme(step)


def test_fd_scheme_unknown_order():
    with pytest.raises(ValueError):
        FdScheme(1e-4, "forward")


def test_step_is_power_of_two_scaled_by_smallest_eigenvalue():
    s = SpdPoint.from_matrix(np.diag([1.0, 1e-3]))
    h = FdScheme(1e-4).step_at(s)
    assert np.log2(h) == round(np.log2(h))
    assert 0.5e-7 < h < 2e-7


def test_stencil_shrinks_then_gives_up_at_cone_edge():
    edge = SpdPoint.from_matrix(np.diag([1.0, 1.000001e-10]))
    with pytest.raises(StepTooLargeError):
        partials(fisher_field(2), edge, FdScheme(1e-2))


def test_fd_christoffel_n1():
    gam = christoffel_fd(fisher_field(1), identity(1)).gamma
    assert gam[0, 0, 0] == pytest.approx(-1.0, rel=1e-9)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fd_christoffel_flat(n):
    s = sample("spd", n, 3)
    assert np.max(np.abs(christoffel_fd(euclidean_field(n), s).gamma)) < 1e-10


@pytest.mark.parametrize("n", [1, 2, 3])
def test_fd_christoffel_matches_closed(n):
    for seed in range(4):
        s = sample("spd", n, 40 + seed)
        assert rel(christoffel_fd(fisher_field(n), s).gamma, christoffel_closed_components(s).gamma) < 1e-5


def test_fd_christoffel_needs_metric():
    with pytest.raises(ShapeError):
        christoffel_fd(zero_field(2), identity(2))


def test_field_shape_checked():
    bad = TensorField(3, 2, lambda s: np.zeros((2, 2, 2)))
    with pytest.raises(ShapeError):
        bad(identity(2))
    with pytest.raises(ShapeError):
        fisher_field(2)(identity(3))


def test_cov_deriv_zero_field_exact():
    dc = cov_deriv(zero_field(2), fisher_field(2), sample("spd", 2, 1))
    assert dc.shape == (3, 3, 3, 3)
    assert not np.any(dc)
    v = parallel_check(zero_field(2), fisher_field(2), sample("spd", 2, 1))
    assert v.passed and v.max_violation == 0.0


@pytest.mark.parametrize("n", [1, 2, 3])
def test_alpha_field_is_parallel(n):
    fld = cubic_field(InvariantCubic.alpha(n, -0.8))
    for seed in range(3):
        s = sample("spd", n, seed)
        assert parallel_check(fld, fisher_field(n), s).passed
        assert conjugate_symmetry_check(fld, fisher_field(n), s).passed


@pytest.mark.parametrize("n", [1, 2, 3])
def test_alpha_at_identity_is_conjugate_symmetric(n):
    v = conjugate_symmetry_check(cubic_field(InvariantCubic.alpha(n, 1.0)), fisher_field(n), identity(n))
    assert v.max_violation < 1e-6


@given(
    a=st.floats(-2, 2), b=st.floats(-2, 2), c=st.floats(-2, 2),
    n=st.integers(1, 3), seed=st.integers(0, 10**6),
)
@settings(max_examples=15, deadline=None)
def test_family_is_parallel(a, b, c, n, seed):
    v = parallel_check(cubic_field(InvariantCubic(n, a, b, c)), fisher_field(n), sample("spd", n, seed))
    assert v.passed, v.max_violation


@pytest.mark.parametrize("n", [1, 2, 3])
def test_metric_compatibility(n):
    for seed in range(3):
        assert metric_compatibility_check(fisher_field(n), sample("spd", n, seed)).passed


@pytest.mark.parametrize("n", [2, 3])
def test_broken_field_fails(n, broken_field):
    s = sample("spd", n, 17)
    fld = broken_field(n)
    assert not conjugate_symmetry_check(fld, fisher_field(n), s).passed
    assert not parallel_check(fld, fisher_field(n), s).passed


def test_generic_valence_matches_fisher_connection():
    # the finite-difference connection of a non-Fisher metric reaches the same array
    s = sample("spd", 2, 9)
    g = fisher_field(2)
    disguised = TensorField(2, 2, g.eval, "disguised")
    fld = cubic_field(InvariantCubic(2, 1.0, 0.5, 0.0))
    a = cov_deriv(fld, g, s)
    b = cov_deriv(fld, disguised, s)
    assert np.max(np.abs(a - b)) < 1e-5 * np.max(np.abs(fld(s)))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_derivative_vanishes_on_invariant_fields(n):
    v = sample("sym", n, 2)
    for fld in (cubic_field(InvariantCubic(n, 0.5, -1.0, 2.0)), fisher_field(n)):
        assert np.max(np.abs(canonical_deriv(fld, v))) < 1e-5


@pytest.mark.parametrize("n", [1, 2, 3])
def test_canonical_matches_levi_civita_at_identity(n, broken_field):
    v = sample("sym", n, 6)
    g = fisher_field(n)
    for fld in (cubic_field(InvariantCubic(n, 1.0, 1.0, 1.0)), broken_field(n)):
        lc = contract_direction(cov_deriv(fld, g, identity(n)), v)
        cn = canonical_deriv(fld, v)
        assert np.max(np.abs(lc - cn)) < 1e-5


def test_exp_flow_examples():
    for n in (1, 2, 3):
        assert exp_flow_tangent_defect(identity(n).mat, 1e-4) < 1e-6
        assert exp_flow_tangent_defect(np.zeros((n, n)), 1e-4) == 0.0
    assert phi_eta_check is exp_flow_tangent_defect


def test_exp_flow_second_order():
    a = sample("sym", 3, 1)
    t = 1e-2
    ratios = [exp_flow_tangent_defect(a, t / 2**k) / exp_flow_tangent_defect(a, t / 2 ** (k + 1)) for k in range(3)]
    assert all(abs(r - 4.0) < 0.1 for r in ratios)


@pytest.mark.parametrize("t", [0.0, -1e-3, 0.011])
def test_exp_flow_t_range(t):
    with pytest.raises(ValueError):
        exp_flow_tangent_defect(identity(2).mat, t)


def test_christoffel_default_scheme():
    assert CHRISTOFFEL_SCHEME.order == "richardson-6"

"""The compiled kernels and the numpy fallback must agree."""
import numpy as np
import pytest

from invstat import _backend, _pykernels
from invstat.gaussian import McConfig, mc_moment
from invstat.symcone import basis_stack, sample, weighted_basis

native = pytest.mark.skipif("native" not in _backend.available(), reason="extension not built")


def test_fallback_always_available():
    assert "python" in _backend.available()
    with pytest.raises(ValueError):
        _backend.use("fortran")


def test_backend_switch(backend):
    assert _backend.name() == backend


@native
@pytest.mark.parametrize("n", [1, 2, 3, 4])
@pytest.mark.parametrize("extended", [False, True])
def test_kernel_parity(n, extended):
    from invstat import _ckernels

    ms = weighted_basis(sample("spd", n, n), extended)
    tol = 1e-13 if not extended else 1e-16
    a = _pykernels.pair_traces(ms)
    b = _ckernels.pair_traces(ms)
    assert a.dtype == b.dtype == ms.dtype
    assert np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(a)))
    a = _pykernels.cubic_components(ms, 0.3, -1.1, 2.0, 1 / 3)
    b = _ckernels.cubic_components(ms, 0.3, -1.1, 2.0, 1 / 3)
    assert a.dtype == b.dtype
    assert np.max(np.abs(a - b)) <= tol * max(1.0, np.max(np.abs(a)))
    for perm in [(1, 0, 2), (0, 2, 1), (2, 1, 0)]:
        assert np.array_equal(b, b.transpose(perm))


@native
def test_identity_components_are_exact_in_both():
    from invstat import _ckernels

    e = basis_stack(3)
    assert np.array_equal(_pykernels.cubic_components(e, 1, 1, 1, 1 / 3), _ckernels.cubic_components(e, 1, 1, 1, 1 / 3))


@native
def test_score_moment_parity():
    from invstat import _ckernels

    rng = np.random.default_rng(1)
    x = rng.standard_normal((5000, 3))
    amats = np.stack([sample("sym", 3, k).matrix for k in range(3)])
    offsets = rng.standard_normal(3)
    ca, ma, sa = _pykernels.score_moments(x, amats, offsets)
    cb, mb, sb = _ckernels.score_moments(x, amats, offsets)
    assert ca == cb == 5000
    assert mb == pytest.approx(ma, rel=1e-12)
    assert sb == pytest.approx(sa, rel=1e-12)


def test_mc_estimates_agree_across_backends():
    s = sample("spd", 2, 4)
    dirs = [sample("sym", 2, k) for k in range(3)]
    cfg = McConfig(samples=20_000, seed=3)
    results = []
    previous = _backend.name()
    try:
        for name in _backend.available():
            _backend.use(name)
            results.append(mc_moment(s, dirs, cfg))
    finally:
        _backend.use(previous)
    for r in results[1:]:
        assert r.mean == pytest.approx(results[0].mean, rel=1e-12)
        assert r.std_error == pytest.approx(results[0].std_error, rel=1e-10)

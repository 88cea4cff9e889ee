import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sl2harmonic.errors import PreconditionError
from sl2harmonic.spectrum import boundary_points, contains, gamma_map, par_region

finite = dict(allow_nan=False, allow_infinity=False)
ps = st.floats(1.05, 20, **finite)
half_integers = st.integers(0, 8).map(lambda k: k / 2)


@pytest.mark.parametrize("n", [0.0, 0.5, 1.0, 2.0])
def test_p2_region_is_ray_plus_points(n):
    R = par_region(2.0, n)
    assert R.delta == 0
    n2 = n * n
    assert contains(R, n2 + 0.25)
    assert contains(R, n2 + 10.0)
    assert not contains(R, n2 + 0.2)
    assert not contains(R, n2 + 1.0 + 0.01j)
    for s in (1.0, 2.0):
        if s <= n and (s - n) % 1 == 0:
            assert contains(R, n2 + s * (1 - s))
    curve, isolated = boundary_points(R, 5)
    assert curve[0] == pytest.approx(n2 + 0.25)
    assert np.all(curve.imag == 0)
    assert isolated.size == len(R.discrete_points)


@given(ps, half_integers)
def test_boundary_satisfies_parabola(p, n):
    R = par_region(p, n)
    curve, _ = boundary_points(R, 51)
    if R.delta == 0:
        return
    w = curve - n * n
    lhs = w.real
    rhs = w.imag ** 2 / (4 * R.delta ** 2) + 0.25 - R.delta ** 2
    assert np.max(np.abs(lhs - rhs) / (1 + np.abs(curve))) <= 1e-14
    assert np.all(contains(R, curve))


@given(ps, half_integers)
def test_vertex_in_region(p, n):
    R = par_region(p, n)
    assert contains(R, n * n + 0.25 - R.delta ** 2)


@given(st.floats(1.05, 1.95, **finite), st.floats(0.01, 1, **finite), half_integers)
def test_monotone_in_p(p, frac, n):
    # moving p towards 2 shrinks delta and the region
    q = p + frac * (2 - p)
    wide, narrow = par_region(p, n), par_region(q, n)
    rng = np.random.default_rng(0)
    z = n * n + rng.uniform(-2, 6, 2000) + 1j * rng.uniform(-4, 4, 2000)
    assert not np.any(contains(narrow, z) & ~contains(wide, z))


def test_dual_exponents_agree():
    a, b = par_region(4 / 3, 1.0), par_region(4.0, 1.0)
    z = np.array([0.5 + 0.3j, 1.2 - 2j, 5 + 1j])
    assert np.array_equal(contains(a, z), contains(b, z))


def test_gamma_map_on_critical_line():
    lam = np.linspace(0, 5, 11)
    assert np.allclose(gamma_map(0.5 + 1j * lam), 0.25 + lam ** 2)


def test_validation():
    with pytest.raises(PreconditionError):
        par_region(1.0, 0.0)
    with pytest.raises(PreconditionError):
        par_region(2.0, 0.3)
    with pytest.raises(PreconditionError):
        boundary_points(par_region(3.0, 0.0), 1)

import math

import numpy as np
import pytest

from sl2harmonic.errors import GridMismatchError, InsufficientDecay, PreconditionError
from sl2harmonic.group import KTypeSample
from sl2harmonic.multipliers import constant, heat
from sl2harmonic.spherical import discrete_set, zeta_axis
from sl2harmonic.transform import (
    TransformData, apply_multiplier, bump_profile, default_lambda_grid, fixture, forward_transform,
    gaussian_profile, inverse_transform, nu_density, plancherel_sides, shifted_bump_profile,
)

COARSE = default_lambda_grid(step=0.1)


def test_nu_density_branches():
    lam = np.array([0.0, 0.5, 3.0])
    assert np.allclose(nu_density(0, lam), lam * np.tanh(math.pi * lam))
    half = nu_density(0.5, lam)
    assert half[0] == pytest.approx(1 / math.pi)
    assert half[2] == pytest.approx(3.0 / math.tanh(3 * math.pi))
    with pytest.raises(PreconditionError):
        nu_density(0, -1.0)


def test_default_lambda_grid():
    g = default_lambda_grid(60, 0.05)
    assert g[0] == 0 and g[-1] == 60 and g.size == 1201


def test_forward_of_discrete_zeta_is_delta_like():
    # for s in D_n the transform of zeta_{n,s} at s is its squared L^2 norm, 1 / (s - 1/2)
    n = 2.0
    t = np.linspace(0, 16, 3201)
    f = KTypeSample(n, t, zeta_axis(n, 2.0, t))
    T = forward_transform(f, np.linspace(0, 1, 3))
    assert T.disc_values[2.0] == pytest.approx(1 / 1.5, rel=1e-6)
    # orthogonal to the other discrete function
    assert abs(T.disc_values[1.0]) < 1e-6


def test_forward_known_transform_n0():
    # F = zeta_{0,1/2+i mu} is not integrable, but a cut Gaussian is; compare against quad
    from scipy.integrate import quad

    f = gaussian_profile(0.0)
    T = forward_transform(f, np.array([0.0, 1.0, 4.0]))
    for lam, val in zip(T.lambda_grid, T.cont_values):
        ref = quad(lambda t: (1 + t * t) * math.exp(-2 * t * t) * zeta_axis(0, 0.5 + 1j * lam, t).real
                   * math.sinh(t), 0, 6, epsabs=1e-13)[0]
        assert abs(val - ref) < 1e-9


@pytest.mark.parametrize("name", ["bump", "gaussian", "shifted_bump"])
def test_plancherel(name):
    f = fixture(name, 1.0)
    lhs, rhs = plancherel_sides(f)
    assert abs(lhs - rhs) <= 1e-3 * lhs


def test_round_trip_bump():
    f = bump_profile(0.5)
    g = inverse_transform(forward_transform(f, COARSE), f.t_grid)
    assert np.max(np.abs(g.values - f.values)) < 1e-3
    assert g.info["tail"] < 1e-2


def test_zero_profile():
    f = KTypeSample(1.0, np.linspace(0, 2, 101), np.zeros(101))
    T = forward_transform(f, COARSE)
    assert not np.any(T.cont_values)
    g = inverse_transform(T, f.t_grid)
    assert not np.any(g.values)


def test_insufficient_decay():
    lam = COARSE
    T = TransformData(0.0, lam, np.ones_like(lam), {})
    with pytest.raises(InsufficientDecay):
        inverse_transform(T, np.linspace(0, 1, 5))


def test_transform_data_validation():
    lam = np.linspace(0, 1, 5)
    with pytest.raises(PreconditionError):
        TransformData(1.0, lam, np.zeros(5), {})
    with pytest.raises(PreconditionError):
        TransformData(0.0, lam[::-1], np.zeros(5), {})
    T = TransformData(1.0, lam, np.zeros(5), {1.0: 0.0})
    assert T.disc_values == {1.0: 0j}


def test_plancherel_mismatch():
    f = bump_profile(0.0)
    T = forward_transform(bump_profile(1.0), COARSE)
    with pytest.raises(GridMismatchError):
        plancherel_sides(f, T)


def test_apply_identity_multiplier():
    f = bump_profile(1.0)
    g = apply_multiplier(f, constant(1.0), COARSE)
    assert np.max(np.abs(g.values - f.values)) < 1e-3


def test_apply_heat_contracts():
    # on n = 0 the spectrum starts at 1/4, so ||e^{-tau L} f||_2 <= e^{-tau/4} ||f||_2
    from scipy.integrate import simpson

    tau = 0.5
    f = bump_profile(0.0)
    t_out = np.linspace(0, 10, 1001)
    g = apply_multiplier(f, heat(tau), COARSE, t_out=t_out)
    norm_f = simpson(np.abs(f.values) ** 2 * np.sinh(f.t_grid), x=f.t_grid)
    norm_g = simpson(np.abs(g.values) ** 2 * np.sinh(t_out), x=t_out)
    assert norm_g <= math.exp(-tau / 2) * norm_f
    assert norm_g > 0.1 * norm_f


def test_fixture_errors():
    with pytest.raises(PreconditionError):
        fixture("nope", 0)
    with pytest.raises(PreconditionError):
        shifted_bump_profile(0, center=0.5, radius=0.9)


def test_disc_values_keys_follow_discrete_set():
    T = forward_transform(bump_profile(2.5), COARSE)
    assert set(T.disc_values) == set(discrete_set(2.5))

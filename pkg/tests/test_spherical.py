import json
import math
from importlib import resources

import mpmath
import numpy as np
import pytest
import scipy.special as sc
from hypothesis import given
from hypothesis import strategies as st

from sl2harmonic import group as grp
from sl2harmonic import spherical as sph
from sl2harmonic.errors import DomainError, PreconditionError, SeriesNonConvergence

from conftest import LAM_GRID, N_GRID, T_GRID

finite = dict(allow_nan=False, allow_infinity=False)
half_integers = st.integers(-8, 8).map(lambda k: k / 2)
lams = st.floats(0, 15, **finite)
ts = st.floats(0, 6, **finite)

FIXTURES = json.loads(resources.files("sl2harmonic").joinpath("data/fixtures.json").read_text())


def mp_zeta(n, s, t):
    """Independent oracle: (cosh t/2)^{-2s} 2F1(s - |n|, s + |n|; 1; tanh^2 t/2) in mpmath."""
    with mpmath.workdps(30):
        x = mpmath.tanh(mpmath.mpf(t) / 2) ** 2
        s = mpmath.mpc(s)
        val = mpmath.cosh(mpmath.mpf(t) / 2) ** (-2 * s) * mpmath.hyp2f1(s - abs(n), s + abs(n), 1, x)
        return complex(val)


# --------------------------------------------------------------- frozen oracles

@pytest.mark.parametrize("row", FIXTURES["zeta"], ids=lambda r: f"n{r['n']}-t{r['t']}")
@pytest.mark.parametrize("route", ["auto", "theta_integral", "cosine_integral", "definition"])
def test_frozen_values(row, route):
    s = complex(*row["s"])
    assert abs(sph.zeta_axis(row["n"], s, row["t"], route) - complex(*row["value"])) < 1e-10


@pytest.mark.parametrize("row", FIXTURES["zeta"], ids=lambda r: f"n{r['n']}-t{r['t']}")
def test_frozen_values_match_mpmath(row):
    assert abs(mp_zeta(row["n"], complex(*row["s"]), row["t"]) - complex(*row["value"])) < 1e-12


def test_frozen_c_constants():
    for row in FIXTURES["c_constant"]:
        assert sph.c_constant(row["n"], row["s"]) == pytest.approx(row["value"], rel=1e-14)


def test_frozen_b0():
    assert sph.B0 == FIXTURES["b0"]
    assert abs(sph.B0 - 2 / math.sqrt(math.pi)) < 1e-15


# --------------------------------------------------------------- closed forms

def test_identity_value():
    for n in N_GRID:
        for s in (0.5 + 3j, 0.2, 1.0):
            assert sph.zeta_axis(n, s, 0.0) == 1.0


@given(ts)
def test_n1_s1_closed_form(t):
    assert abs(sph.zeta_axis(1, 1, t) - math.cosh(t / 2) ** -2) < 1e-13


@given(st.floats(0, 3, **finite))
def test_n0_legendre(t):
    # zeta_{0,s}(a_t) = P_{-s}(cosh t)
    ref = complex(mpmath.legenp(-0.5 + 0.5j, 0, mpmath.cosh(t), type=3))
    assert abs(sph.zeta_axis(0, 0.5 + 0.5j, t) - ref) < 1e-11


@pytest.mark.parametrize("n", [1.0, 1.5, 2.0, 2.5, 3.0, 4.0])
def test_discrete_jacobi_form(n):
    # s in D_n: zeta = (cosh t/2)^{-2s} P_k^{(0, 2s-1)}(1 - 2 tanh^2(t/2)), k = |n| - s
    t = np.linspace(0, 6, 13)
    x = np.tanh(t / 2) ** 2
    for s in sph.discrete_set(n):
        k = int(round(n - s))
        ref = np.cosh(t / 2) ** (-2 * s) * sc.eval_jacobi(k, 0.0, 2 * s - 1, 1 - 2 * x)
        assert np.max(np.abs(sph.zeta_axis(n, s, t) - ref)) < 1e-13


def test_discrete_sets():
    assert tuple(sph.discrete_set(0)) == ()
    assert tuple(sph.discrete_set(0.5)) == ()
    assert tuple(sph.discrete_set(1)) == (1.0,)
    assert tuple(sph.discrete_set(-2.5)) == (1.5, 2.5)
    assert tuple(sph.discrete_set(3)) == (1.0, 2.0, 3.0)
    with pytest.raises(PreconditionError):
        sph.discrete_set(0.3)


def test_c_constant_domain():
    assert sph.c_constant(1, 1) == pytest.approx(4.0)
    with pytest.raises(DomainError):
        sph.c_constant(1, 2)


# --------------------------------------------------------------- routes

@pytest.mark.parametrize("n", N_GRID)
def test_routes_against_mpmath(n):
    for lam in LAM_GRID:
        s = 0.5 + 1j * lam
        got = sph.zeta_axis(n, s, T_GRID)
        ref = np.array([mp_zeta(n, s, t) for t in T_GRID])
        assert np.max(np.abs(got - ref)) < 1e-10


@given(half_integers, lams, ts, st.sampled_from(["theta_integral", "cosine_integral"]))
def test_quadrature_routes_agree(n, lam, t, route):
    s = 0.5 + 1j * lam
    assert abs(sph.zeta_axis(n, s, t, route) - sph.zeta_axis(n, s, t, "definition")) < 1e-8


def test_hyper_route_refuses_large_t():
    with pytest.raises(SeriesNonConvergence):
        sph.zeta_axis(0, 0.5 + 1j, 4.0, "hyper")
    assert not sph.route_applicable("hyper", 0, 0.5 + 1j, 4.0)
    # terminating cases stay applicable everywhere
    assert sph.route_applicable("hyper", 2, 1.0, 10.0)


def test_unknown_route():
    with pytest.raises(PreconditionError):
        sph.zeta_axis(0, 0.5, 1.0, "magic")


def test_zeta_table_matches_axis():
    lam = np.array([0.0, 0.3, 2.0, 7.5, 40.0])
    t = np.array([0.0, 0.2, 1.0, 3.0])
    for n in (0.0, 1.5, 2.0):
        tab = sph.zeta_table(n, lam, t)
        ref = np.array([sph.zeta_axis(n, 0.5 + 1j * x, t, "theta_integral") for x in lam])
        assert np.max(np.abs(tab - ref)) < 1e-10


# --------------------------------------------------------------- symmetries

@given(half_integers, st.floats(-5, 5, **finite), st.floats(-5, 5, **finite), ts)
def test_symmetries(n, sr, si, t):
    s = complex(sr, si)
    if abs(sr - 0.5) > 1.5:
        return
    z = sph.zeta_axis(n, s, t)
    scale = max(1.0, abs(z))
    assert abs(z - sph.zeta_axis(n, 1 - s, t)) < 1e-9 * scale
    assert abs(z - sph.zeta_axis(-n, s, t)) < 1e-12 * scale
    assert sph.zeta_axis(n, s, -t) == z


@given(half_integers, lams, ts)
def test_tempered_bounded_by_one(n, lam, t):
    assert abs(sph.zeta_axis(n, 0.5 + 1j * lam, t)) <= 1 + 1e-12


@given(half_integers, st.floats(0, 1, **finite), lams, ts)
def test_comparison_bound(n, sr, lam, t):
    s = complex(sr, lam)
    assert abs(sph.zeta_axis(n, s, t)) <= sph.zeta_axis(0, sr, t).real + 1e-12


@given(st.integers(0, 10 ** 6), half_integers)
def test_group_paths_and_equivariance(seed, n):
    rng = np.random.default_rng(seed)
    g = grp.random_element(rng, 2.0)
    s = 0.5 + 1.3j
    z = sph.zeta_group(n, s, g)
    assert abs(z - sph.zeta_group(n, s, g, "verification")) < 1e-8
    th, ph = rng.uniform(0, 4 * math.pi, 2)
    rotated = sph.zeta_group(n, s, grp.u(th) @ g @ grp.u(ph))
    assert abs(rotated - np.exp(1j * n * (th + ph)) * z) < 1e-10


def test_functional_equation(rng):
    for _ in range(3):
        x, y = grp.random_element(rng, 1.5), grp.random_element(rng, 1.5)
        assert sph.functional_equation_residual(1.5, 0.5 + 2j, x, y) < 1e-8


# --------------------------------------------------------------- expansions

def test_gamma_one_derived_value():
    for n in (0.0, 0.5, 1.0, 2.5):
        for lam in (0.0, 0.7, 3.0):
            g = sph.gamma_coeffs(n, lam, 3)
            ref = 2 * n * (1 - 2 * n - 1j * lam) / (1 - 1j * lam)
            assert abs(g.coeffs[1] - ref) < 1e-14


def test_gamma_coeffs_solve_recursion():
    for n in (0.0, 0.5, 2.0):
        assert np.max(np.abs(sph.gamma_coeffs(n, 1.3, 40).residuals())) < 1e-12


def test_gamma_coeffs_bounds():
    with pytest.raises(PreconditionError):
        sph.gamma_coeffs(1.0, 1.0, 201)


@given(st.sampled_from([0.0, 0.5, 1.0, 1.5, 2.0]), st.floats(0.2, 10, **finite), st.floats(2, 8, **finite))
def test_global_expansion_within_estimate(n, lam, t):
    e = sph.global_expansion(n, lam, t, 60)
    err = abs(e.value - sph.zeta_axis(n, 0.5 + 1j * lam, t))
    assert err <= e.error_estimate
    assert err < 1e-6


def test_global_expansion_preconditions():
    with pytest.raises(PreconditionError):
        sph.global_expansion(0, 1.0, 0.3)
    with pytest.raises(PreconditionError):
        sph.global_expansion(0, 0.6j, 2.0)


def test_c_function_limit():
    for n in (0, 1, 2):
        for s in (0.25, 0.25 + 0.5j):
            assert sph.c_limit_residual(n, s, 30.0) <= 1e-5


def test_c_fn_half_odd_value():
    # c_{1/2}(0) = Gamma(1/2) / (sqrt(pi) Gamma(1)) = 1
    assert abs(sph.c_fn(0.5, 0.0) - 1.0) < 1e-14


@pytest.mark.parametrize("n", [0.0, 1.0, 2.0])
def test_local_leading(n):
    for lam in (0.0, 1.0, 5.0):
        for t in (0.05, 0.2, 0.8):
            direct = sph.zeta_axis(n, 0.5 + 1j * lam, t)
            res = sph.local_leading(n, lam, t, direct)
            assert res.remainder <= res.estimate


def test_calibrated_b0_is_n_independent():
    vals = [sph.calibrate_b0(n) for n in (0, 0.5, 1, 1.5, 2)]
    assert max(vals) - min(vals) < 1e-6
    assert abs(vals[0] - sph.B0) < 1e-8


def test_jacobi_ode_second_order():
    for n in (0.0, 1.0, 2.0):
        for lam in (0.5, 2.0):
            r1 = sph.jacobi_ode_residual(n, lam, 1.0, 0.02)
            r2 = sph.jacobi_ode_residual(n, lam, 1.0, 0.01)
            assert r1 / r2 > 3.5
            assert sph.jacobi_ode_residual(n, lam, 1.0, 1e-4) <= 1e-5 * (1 + lam ** 2)


# --------------------------------------------------------------- discrete series

@pytest.mark.parametrize("n", [1.0, 1.5, 2.0, 3.5, 5.0])
def test_discrete_bound(n):
    for s in sph.discrete_set(n):
        for t in np.linspace(0, 12, 25):
            assert sph.bound_check_discrete(n, s, t)
            assert sph.discrete_bound_ratio(n, s, t) <= 1.0 + 1e-12


@pytest.mark.parametrize("n", [1.0, 2.5, 4.0])
def test_discrete_l2_norm_derived(n):
    # ||zeta_{n,s}||_2^2 = 1 / (s - 1/2), the inversion formula applied to zeta itself
    for s in sph.discrete_set(n):
        assert sph.discrete_lq_norm(n, s, 2.0) ** 2 == pytest.approx(1 / (s - 0.5), rel=1e-10)


def test_lq_norm_needs_integrability():
    with pytest.raises(PreconditionError):
        sph.discrete_lq_norm(1.0, 1.0, 1.0)


def test_spectral_param():
    p = sph.SpectralParam(1.0, 0.5 + 2j)
    assert p.is_bounded()

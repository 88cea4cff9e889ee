import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from sl2harmonic.errors import DerivativeUnavailable, PreconditionError, StripTooNarrow
from sl2harmonic.multipliers import (
    Multiplier, constant, discrete_multiplier_sum, heat, imagpower, mh_norm, parse_multiplier,
    resolvent, strip_delta, table,
)

finite = dict(allow_nan=False, allow_infinity=False)


def test_strip_delta():
    assert strip_delta(2.0) == 0.0
    assert strip_delta(4 / 3) == pytest.approx(0.25)
    assert strip_delta(4.0) == pytest.approx(0.25)
    for bad in (1.0, 0.5, math.inf):
        with pytest.raises(PreconditionError):
            strip_delta(bad)


@pytest.mark.parametrize("p", [4 / 3, 2.0, 3.0])
@pytest.mark.parametrize("n", [0.0, 0.5, 2.0])
def test_mh_norm_of_one_is_one(p, n):
    assert mh_norm(constant(1.0), n, p) == 1.0


def test_mh_norm_of_zero():
    assert mh_norm(constant(0.0), 1.0, 3.0) == 0.0


@given(st.floats(-5, 5, **finite).filter(lambda a: abs(a) > 1e-3))
def test_mh_norm_homogeneous(alpha):
    m = heat(0.5)
    assert mh_norm(m.scaled(alpha), 1.0, 3.0) == pytest.approx(abs(alpha) * mh_norm(m, 1.0, 3.0), rel=1e-12)


def test_heat_sup_on_strip():
    tau, n, p = 0.5, 1.0, 4 / 3
    d = strip_delta(p)
    norm = mh_norm(heat(tau), n, p, max_order=0)
    assert norm == pytest.approx(math.exp(-tau * (n * n + 0.25 - d * d)), rel=1e-12)


@pytest.mark.parametrize("p", [4 / 3, 3.0])
def test_heat_mh_finite(p):
    assert math.isfinite(mh_norm(heat(0.5), 0.0, p))


def test_interior_pole_rejected():
    with pytest.raises(StripTooNarrow):
        mh_norm(resolvent(0.3), 0.0, 4 / 3)


def test_exterior_pole_accepted():
    # z0 = -1: poles at Re s - 1/2 = +-sqrt(5/4), outside the strip
    assert math.isfinite(mh_norm(resolvent(-1.0), 0.0, 4 / 3))


def test_imagpower_strip():
    m = imagpower(1.0)
    assert m.strip_halfwidth(0.0) == pytest.approx(0.5)
    assert math.isfinite(mh_norm(m, 0.0, 1.5))


def test_discrete_sum():
    m = heat(0.5)
    # D_2 = {1, 2}; m_2(s) = exp(-tau (4 + s(1 - s)))
    ref = 1 * math.exp(-0.5 * 4) + 2 * math.exp(-0.5 * 2)
    assert discrete_multiplier_sum(m, 2.0) == pytest.approx(ref)
    assert discrete_multiplier_sum(m, 0.5) == 0.0


def test_regularized_decay():
    m = resolvent(-1.0)
    assert m.decay_rate == 1
    r = m.regularized(0.1)
    assert r.decay_rate == math.inf
    z = np.array([1.0, 5.0])
    assert np.allclose(r(z), m(z) * np.exp(-0.1 * z))


def test_cauchy_derivatives_match_analytic():
    h = heat(0.7)
    bare = Multiplier(h.evaluator, (None, None), h.halfwidth, h.decay_rate, "bare")
    s = np.array([0.5 + 2j, 0.7 - 1j])
    a = h.pulled_back_derivatives(1.0, s)
    b = bare.pulled_back_derivatives(1.0, s, 0.05)
    for x, y in zip(a, b):
        assert np.allclose(x, y, rtol=1e-9, atol=1e-12)
    with pytest.raises(DerivativeUnavailable):
        bare.pulled_back_derivatives(1.0, s)


def test_parse_multiplier():
    assert parse_multiplier("heat:tau=0.5")(1.0) == pytest.approx(math.exp(-0.5))
    # m(z) = (z0 - z)^{-1}
    assert parse_multiplier("resolvent:z0=-1+0i")(1.0) == pytest.approx(-0.5)
    assert parse_multiplier("one")(3.0) == 1.0
    assert parse_multiplier("zero")(3.0) == 0.0
    assert parse_multiplier("imagpower:sigma=1")(2.0) == pytest.approx(2.0 ** 1j)
    for bad in ("heat", "heat:sigma=1", "heat:tau=1,x=2", "cosine:a=1", "heat:tau=abc", "resolvent:z0=q"):
        with pytest.raises(PreconditionError):
            parse_multiplier(bad)


def test_table_multiplier(tmp_path):
    z = np.linspace(0, 200, 4001)
    path = tmp_path / "heat.csv"
    rows = ["z,re,im"] + [f"{float(x)!r},{math.exp(-0.5 * x)!r},0" for x in z]
    path.write_text("\n".join(rows) + "\n")
    m = table(str(path))
    assert abs(m(3.3) - math.exp(-1.65)) < 1e-7
    assert mh_norm(m, 0.0, 2.0) == pytest.approx(mh_norm(heat(0.5), 0.0, 2.0), rel=1e-4)
    assert parse_multiplier(f"table:{path},halfwidth=0.4").strip_halfwidth(0) == 0.4


def test_table_validation(tmp_path):
    path = tmp_path / "short.csv"
    path.write_text("z,re,im\n0,1,0\n1,1,0\n")
    with pytest.raises(PreconditionError):
        table(str(path))

"""Classical special functions and quadrature helpers.

Everything here works on numpy scalars or arrays. The Gamma function,
the Gauss series, the normalized Bessel function and the orthogonal
polynomials are evaluated by hand; adaptive integration is delegated to
``scipy.integrate.quad``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate as _spi

from .errors import PoleError, PreconditionError, SeriesNonConvergence, ToleranceNotMet

__all__ = [
    "complex_gamma",
    "log_gamma",
    "hyp2f1_c1",
    "X_SWITCH",
    "bessel_script_j",
    "chebyshev_T",
    "jacobi_P",
    "QuadratureSpec",
    "integrate",
    "gauss_legendre",
]

# Lanczos coefficients for g = 7, nine terms. Relative accuracy is close
# to machine precision on Re z >= 1/2.
_LANCZOS_G = 7.0
_LANCZOS_C = np.array([
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
])
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

X_SWITCH = 0.75


def _check_poles(z):
    bad = (z.imag == 0) & (z.real <= 0) & (z.real == np.round(z.real))
    if np.any(bad):
        raise PoleError(f"Gamma has a pole at {z[bad][0].real:g}")


def _lanczos_log(z):
    # log Gamma(z) for Re z >= 1/2
    zm = z - 1.0
    acc = np.full(z.shape, _LANCZOS_C[0], dtype=complex)
    for k in range(1, len(_LANCZOS_C)):
        acc = acc + _LANCZOS_C[k] / (zm + k)
    tt = zm + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (zm + 0.5) * np.log(tt) - tt + np.log(acc)


def log_gamma(z):
    """Logarithm of the complex Gamma function (some branch).

    The imaginary part is only determined modulo 2*pi, which is all that is
    needed for ratios and products evaluated through ``exp``.

    Parameters
    ----------
    z : complex or array_like
        Argument, not a nonpositive integer.

    Returns
    -------
    complex or ndarray
    """
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = _lanczos_log(z[right])
    left = ~right
    if np.any(left):
        zl = z[left]
        # reflection: Gamma(z) Gamma(1-z) = pi / sin(pi z)
        out[left] = math.log(math.pi) - _log_sin_pi(zl) - _lanczos_log(1.0 - zl)
    return out[()] if out.ndim == 0 else out


def _log_sin_pi(z):
    # log sin(pi z) without overflow for large |Im z|
    y = z.imag
    big = np.abs(y) > 20
    out = np.empty(z.shape, dtype=complex)
    small = ~big
    if np.any(small):
        out[small] = np.log(np.sin(np.pi * z[small]))
    if np.any(big):
        zb = z[big]
        sgn = np.sign(zb.imag)
        # sin(pi z) = (e^{i pi z} - e^{-i pi z}) / 2i; keep the dominant term
        w = -1j * sgn * np.pi * zb
        out[big] = w + np.log((1.0 - np.exp(-2.0 * w)) / (2j * -sgn))
    return out


def complex_gamma(z):
    """Gamma function of a complex argument.

    Uses the Lanczos approximation on ``Re z >= 1/2`` and the reflection
    formula elsewhere.

    Parameters
    ----------
    z : complex or array_like
        Argument. Nonpositive integers raise :class:`PoleError`.

    Returns
    -------
    complex or ndarray
        Gamma(z), accurate to roughly 14 digits for ``|Im z| <= 50``. Within
        distance ``d`` of a pole the relative error grows like ``1e-16 / d``.

    Examples
    --------
    >>> abs(complex_gamma(0.5) - np.sqrt(np.pi)) < 1e-14
    True
    """
    z = np.asarray(z, dtype=complex)
    _check_poles(z)
    out = np.empty(z.shape, dtype=complex)
    right = z.real >= 0.5
    if np.any(right):
        out[right] = np.exp(_lanczos_log(z[right]))
    left = ~right
    if np.any(left):
        zl = z[left]
        out[left] = np.pi / (np.sin(np.pi * zl) * np.exp(_lanczos_log(1.0 - zl)))
    return out[()] if out.ndim == 0 else out


def _nonpositive_integer(a):
    a = complex(a)
    return a.imag == 0 and a.real <= 0 and a.real == round(a.real)


def hyp2f1_c1(a, b, x, x_switch=X_SWITCH, max_terms=4000, return_scale=False):
    """Gauss hypergeometric function with ``c = 1``.

    Parameters
    ----------
    a, b : complex
        Upper parameters.
    x : float or array_like
        Argument. Must satisfy ``0 <= x <= x_switch`` unless ``a`` or ``b``
        is a nonpositive integer, in which case the series is a polynomial
        and any real ``x`` is accepted.
    x_switch : float
        Largest argument accepted for a non-terminating series.
    max_terms : int
        Safety cap on the number of series terms.
    return_scale : bool
        Also return the sum of the absolute values of the terms. Its ratio
        to ``|F|`` measures the cancellation, so ``1e-16 * scale`` is a fair
        estimate of the rounding error.

    Returns
    -------
    complex or ndarray
        ``F(a, b; 1; x)``, or ``(F, scale)`` when ``return_scale`` is set.

    Raises
    ------
    SeriesNonConvergence
        If the series does not terminate and some ``x > x_switch``.
    """
    x = np.asarray(x, dtype=float)
    a = complex(a)
    b = complex(b)
    poly = _nonpositive_integer(a) or _nonpositive_integer(b)
    if poly:
        deg = int(round(-(a.real if _nonpositive_integer(a) else b.real)))
        if _nonpositive_integer(a) and _nonpositive_integer(b):
            deg = min(int(round(-a.real)), int(round(-b.real)))
        nmax = deg
    else:
        if np.any(x > x_switch) or np.any(x < 0):
            raise SeriesNonConvergence(
                f"non-terminating 2F1 series requested at x = {x.max():.6g} "
                f"> x_switch = {x_switch}"
            )
        nmax = max_terms
    term = np.ones(x.shape, dtype=complex)
    total = np.ones(x.shape, dtype=complex)
    comp = np.zeros(x.shape, dtype=complex)
    scale = np.ones(x.shape)
    quiet = 0
    for k in range(nmax):
        term = term * ((a + k) * (b + k) / ((k + 1.0) ** 2)) * x
        # Neumaier compensated summation
        y = total + term
        big = np.abs(total) >= np.abs(term)
        comp = comp + np.where(big, (total - y) + term, (term - y) + total)
        total = y
        scale = scale + np.abs(term)
        if not poly:
            ratio = abs((a + k + 1) * (b + k + 1)) / (k + 2.0) ** 2 * float(np.max(x, initial=0.0))
            if ratio < 1.0 and np.all(np.abs(term) <= 1e-17 * np.abs(total + comp)):
                quiet += 1
                if quiet >= 2:
                    break
            else:
                quiet = 0
    else:
        if not poly:
            raise SeriesNonConvergence(f"2F1 series did not settle in {max_terms} terms")
    out = total + comp
    if out.ndim == 0:
        out, scale = out[()], scale[()]
    return (out, scale) if return_scale else out


# ---------------------------------------------------------------- Bessel

_BESSEL_SWITCH = 12.0
_HANKEL_SWITCH = 1000.0


def _script_j_series(j, z):
    # J_j(z) z^{-j} 2^{j-1} Gamma(j+1/2) from the power series in z^2/4
    q = -(z * z) / 4.0
    term = np.full(z.shape, 1.0 / math.factorial(j))
    total = term.copy()
    for k in range(1, 200):
        term = term * q / (k * (k + j))
        total = total + term
        if np.all(np.abs(term) <= 1e-17 * np.maximum(np.abs(total), 1e-300)):
            break
    return total * math.gamma(j + 0.5) / 2.0


def _bessel_miller(j, z):
    # J_j(z) for a single z > 0 by backward recurrence normalized with
    # J_0 + 2 sum J_{2k} = 1
    m = 2 * ((int(z) + 20 + int(math.sqrt(60.0 * z))) // 2)
    jp1, jk = 0.0, 1e-300
    norm = 0.0
    want = 0.0
    for k in range(m, 0, -1):
        jm1 = 2.0 * k / z * jk - jp1
        jp1, jk = jk, jm1
        if abs(jk) > 1e250:
            jp1 *= 1e-250
            jk *= 1e-250
            norm *= 1e-250
            want *= 1e-250
        if (k - 1) % 2 == 0 and k - 1 > 0:
            norm += 2.0 * jk
        if k - 1 == j:
            want = jk
    norm += jk  # J_0 term
    return want / norm


def _bessel_hankel(j, z):
    # leading Hankel asymptotic expansion; only used far beyond the switch
    mu = 4.0 * j * j
    p, q = 1.0, 0.0
    term = 1.0
    for k in range(1, 30):
        term = term * (mu - (2 * k - 1) ** 2) / (k * 8.0 * z)
        if k % 2 == 1:
            q += term * (-1) ** ((k - 1) // 2)
        else:
            p += term * (-1) ** (k // 2)
        if abs(term) < 1e-17:
            break
    chi = z - (j / 2.0 + 0.25) * math.pi
    return math.sqrt(2.0 / (math.pi * z)) * (p * math.cos(chi) - q * math.sin(chi))


def bessel_script_j(j, z):
    """Normalized Bessel function ``J_j(|z|) |z|^{-j} 2^{j-1} Gamma(j+1/2)``.

    Parameters
    ----------
    j : {0, 1, 2}
        Order.
    z : float or array_like
        Argument; the function is even in ``z``.

    Returns
    -------
    float or ndarray
        Equal to ``sqrt(pi)/2`` at ``z = 0`` for ``j = 0``.

    Notes
    -----
    The power series is used for ``|z| < 12``. Larger arguments use Miller
    backward recurrence, and the Hankel expansion beyond ``|z| = 1000``.
    """
    if j not in (0, 1, 2):
        raise PreconditionError("order must be 0, 1 or 2")
    z = np.abs(np.asarray(z, dtype=float))
    out = np.empty(z.shape)
    small = z < _BESSEL_SWITCH
    if np.any(small):
        out[small] = _script_j_series(j, z[small])
    scale = 2.0 ** (j - 1) * math.gamma(j + 0.5)
    flat_z, flat_out = z.reshape(-1), out.reshape(-1)
    for i in np.flatnonzero(~small.reshape(-1)):
        zz = float(flat_z[i])
        jj = _bessel_miller(j, zz) if zz < _HANKEL_SWITCH else _bessel_hankel(j, zz)
        flat_out[i] = jj / zz ** j * scale
    return out[()] if out.ndim == 0 else out


def bessel_script_j_large(j, z):
    """Large-argument branch of :func:`bessel_script_j`, exposed for the overlap check."""
    z = abs(float(z))
    jj = _bessel_miller(j, z) if z < _HANKEL_SWITCH else _bessel_hankel(j, z)
    return jj / z ** j * 2.0 ** (j - 1) * math.gamma(j + 0.5)


def bessel_script_j_series(j, z):
    """Power-series branch of :func:`bessel_script_j`, exposed for the overlap check."""
    return float(_script_j_series(j, np.array([abs(float(z))]))[0])


# ------------------------------------------------------------ polynomials

def chebyshev_T(k, x):
    """Chebyshev polynomial of the first kind by three-term recurrence.

    Parameters
    ----------
    k : int
        Degree, ``k >= 0``.
    x : float, complex or array_like

    Returns
    -------
    float or ndarray
    """
    if k < 0:
        raise PreconditionError("degree must be nonnegative")
    x = np.asarray(x)
    t0 = np.ones_like(x, dtype=np.result_type(x, float))
    if k == 0:
        return t0[()] if t0.ndim == 0 else t0
    t1 = x * 1.0
    for _ in range(1, k):
        t0, t1 = t1, 2.0 * x * t1 - t0
    return t1[()] if np.ndim(t1) == 0 else t1


def jacobi_P(k, alpha, beta, x):
    """Jacobi polynomial ``P_k^{(alpha, beta)}(x)``.

    Evaluated with the standard three-term recurrence in the degree.

    Parameters
    ----------
    k : int
        Degree.
    alpha, beta : float
        Parameters with ``alpha + beta > -2``.
    x : float or array_like

    Returns
    -------
    float or ndarray
    """
    if k < 0:
        raise PreconditionError("degree must be nonnegative")
    x = np.asarray(x, dtype=float)
    p0 = np.ones_like(x)
    if k == 0:
        return p0[()] if p0.ndim == 0 else p0
    ab = alpha + beta
    p1 = (alpha + 1.0) + (ab + 2.0) * (x - 1.0) / 2.0
    for m in range(1, k):
        c = 2.0 * m + ab
        a1 = 2.0 * (m + 1) * (m + ab + 1) * c
        a2 = (c + 1) * (alpha * alpha - beta * beta)
        a3 = c * (c + 1) * (c + 2)
        a4 = 2.0 * (m + alpha) * (m + beta) * (c + 2)
        p0, p1 = p1, ((a2 + a3 * x) * p1 - a4 * p0) / a1
    return p1[()] if p1.ndim == 0 else p1


# -------------------------------------------------------------- quadrature

_KINDS = ("periodic-trapezoid", "adaptive-subdivision", "singular-endpoint")


@dataclass(frozen=True)
class QuadratureSpec:
    """Quadrature settings.

    Attributes
    ----------
    kind : str
        ``"periodic-trapezoid"``, ``"adaptive-subdivision"`` or
        ``"singular-endpoint"``.
    node_count : int
        Starting node count (trapezoid) or subdivision limit (adaptive).
    abs_tol, rel_tol : float
        Target tolerances, both strictly positive.
    """

    kind: str = "adaptive-subdivision"
    node_count: int = 64
    abs_tol: float = 1e-12
    rel_tol: float = 1e-10

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise PreconditionError(f"unknown quadrature kind {self.kind!r}")
        if self.node_count < 8:
            raise PreconditionError("node_count must be at least 8")
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise PreconditionError("tolerances must be strictly positive")


def _call(f, x):
    val = f(x)
    val = np.asarray(val, dtype=complex)
    if val.shape != np.shape(x):
        val = np.broadcast_to(val, np.shape(x))
    return val


def _periodic_trapezoid(f, a, b, spec, max_doublings=16):
    n = spec.node_count
    h = (b - a) / n
    x = a + h * np.arange(n)
    total = h * _call(f, x).sum()
    for _ in range(max_doublings):
        mid = x + h / 2.0
        new = 0.5 * total + (h / 2.0) * _call(f, mid).sum()
        err = abs(new - total)
        x = np.sort(np.concatenate([x, mid]))
        h /= 2.0
        total = new
        if err <= max(spec.abs_tol, spec.rel_tol * abs(total)):
            return complex(total)
    raise ToleranceNotMet(f"periodic trapezoid stalled, last change {err:.3g}", estimate=err)


def _adaptive(f, a, b, spec):
    def g(x):
        return complex(np.asarray(f(np.asarray(x, dtype=float)), dtype=complex))

    val, err = _spi.quad(g, a, b, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                         limit=max(spec.node_count, 50), complex_func=True)
    # with complex_func the error comes back as err_re + 1j * err_im
    err = abs(complex(err).real) + abs(complex(err).imag)
    if not np.isfinite(err) or err > 10 * max(spec.abs_tol, spec.rel_tol * abs(val)):
        raise ToleranceNotMet(f"adaptive quadrature error estimate {err:.3g}", estimate=err)
    return complex(val)


def integrate(f: Callable, domain, spec: QuadratureSpec | None = None) -> complex:
    """Integrate a real-to-complex function over an interval.

    Parameters
    ----------
    f : callable
        Integrand. For ``periodic-trapezoid`` it is called with arrays of
        nodes and must be vectorized; the adaptive kinds call it with scalars.
    domain : (float, float)
        Interval ``(a, b)``. For the periodic kind ``b - a`` is the period.
    spec : QuadratureSpec, optional

    Returns
    -------
    complex

    Raises
    ------
    ToleranceNotMet
        Carries the achieved error estimate in ``.estimate``.

    Notes
    -----
    The ``singular-endpoint`` kind handles an inverse-square-root
    singularity at ``a`` through ``x = a + u**2``.
    """
    spec = spec or QuadratureSpec()
    a, b = float(domain[0]), float(domain[1])
    if spec.kind == "periodic-trapezoid":
        return _periodic_trapezoid(f, a, b, spec)
    if spec.kind == "adaptive-subdivision":
        return _adaptive(f, a, b, spec)
    # singular-endpoint
    def g(u):
        u = np.asarray(u, dtype=float)
        return 2.0 * u * np.asarray(f(a + u * u), dtype=complex)

    return _adaptive(g, 0.0, math.sqrt(b - a), spec)


def gauss_legendre(a, b, n):
    """Gauss-Legendre nodes and weights mapped to ``[a, b]``."""
    x, w = np.polynomial.legendre.leggauss(n)
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w

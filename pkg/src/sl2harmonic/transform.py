"""Spherical transform, Plancherel identity and inversion for K-type profiles.

A function of K-type ``n`` that is K-central has the form
``f(u_psi a_t u_theta) = e^{i n (psi + theta)} F(t)``. Its spherical transform
reduces to the one-dimensional integral

    f_hat(n, s) = int_0^inf F(t) zeta_{n,s}(a_t) sinh t dt,

because the angular phases of ``f`` and of ``zeta(x^{-1})`` cancel. The
inversion formula reads

    F(t) = int_0^inf f_hat(1/2 + i lam) zeta_{n,1/2+i lam}(a_t) nu_n(lam) dlam
           + sum_{s in D_n} (s - 1/2) f_hat(s) zeta_{n,s}(a_t),

with ``nu_n(lam) = lam tanh(pi lam)`` for integer ``n`` and
``lam coth(pi lam)`` for half-odd ``n``.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import simpson

from .errors import GridMismatchError, InsufficientDecay, PreconditionError
from .group import KTypeSample, is_half_integer
from .spherical import discrete_set, zeta_axis, zeta_table

log = logging.getLogger(__name__)

__all__ = [
    "PLANCHEREL_NORM",
    "DEFAULT_LAMBDA_MAX",
    "TransformData",
    "nu_density",
    "default_lambda_grid",
    "forward_transform",
    "inverse_transform",
    "spectral_integral",
    "plancherel_sides",
    "apply_multiplier",
    "bump_profile",
    "gaussian_profile",
    "shifted_bump_profile",
    "tiny_bump_profile",
    "FIXTURES",
    "fixture",
    "DEFAULT_TAIL_TOL",
]

# Weight of the spectral side relative to int |F|^2 sinh t dt under the
# Haar measure with normalized angles.
PLANCHEREL_NORM = 1.0
DEFAULT_LAMBDA_MAX = 60.0

# share of the spectral mass in the last tenth of the grid below which the
# data are taken to be quadrature noise
_NOISE_FLOOR = 1e-5
# default admissible tail, relative to the peak of the output
DEFAULT_TAIL_TOL = 1e-2


def nu_density(n, lam):
    """Plancherel density ``nu_n(lam)``.

    ``lam tanh(pi lam)`` for integer ``n``; ``lam coth(pi lam)`` for
    half-odd ``n``, with the removable value ``1/pi`` at ``lam = 0``.
    """
    if not is_half_integer(n):
        raise PreconditionError("K-type must be a half-integer")
    lam = np.asarray(lam, dtype=float)
    if np.any(lam < 0):
        raise PreconditionError("nu_density needs lam >= 0")
    if float(n).is_integer():
        out = lam * np.tanh(math.pi * lam)
    else:
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(lam == 0.0, 1.0 / math.pi, lam / np.tanh(math.pi * np.where(lam == 0, 1.0, lam)))
    return out[()] if out.ndim == 0 else out


def default_lambda_grid(lambda_max: float = DEFAULT_LAMBDA_MAX, step: float = 0.05) -> np.ndarray:
    """Uniform grid ``0, step, ..., lambda_max``."""
    count = int(round(lambda_max / step))
    return np.linspace(0.0, lambda_max, count + 1)


@dataclass(frozen=True)
class TransformData:
    """Spherical transform of a K-type ``n`` profile.

    Attributes
    ----------
    n : float
    lambda_grid : ndarray
        Increasing, nonnegative.
    cont_values : ndarray
        ``f_hat(n, 1/2 + i lam)`` on ``lambda_grid``.
    disc_values : dict
        ``{s: f_hat(n, s)}`` for ``s`` in ``D_n``.
    """

    n: float
    lambda_grid: np.ndarray
    cont_values: np.ndarray
    disc_values: dict = field(default_factory=dict)

    def __post_init__(self):
        lam = np.asarray(self.lambda_grid, dtype=float)
        vals = np.asarray(self.cont_values, dtype=complex)
        if lam.ndim != 1 or lam.shape != vals.shape:
            raise PreconditionError("lambda_grid and cont_values must be 1-D of equal length")
        if lam.size < 3 or lam[0] < 0 or np.any(np.diff(lam) <= 0):
            raise PreconditionError("lambda_grid must be increasing, nonnegative, with >= 3 points")
        disc = {float(s): complex(v) for s, v in self.disc_values.items()}
        if set(disc) != set(discrete_set(self.n)):
            raise PreconditionError("disc_values must be indexed by D_n")
        object.__setattr__(self, "lambda_grid", lam)
        object.__setattr__(self, "cont_values", vals)
        object.__setattr__(self, "disc_values", disc)
        object.__setattr__(self, "n", float(self.n))

    def scaled(self, cont_factor, disc_factor: dict) -> "TransformData":
        """Pointwise product with spectral factors."""
        return TransformData(
            self.n, self.lambda_grid, self.cont_values * np.asarray(cont_factor),
            {s: v * disc_factor[s] for s, v in self.disc_values.items()},
        )


def _radial_integral(values, t):
    # int_0^T values(t) sinh t dt for samples along the last axis
    return simpson(values * np.sinh(t), x=t, axis=-1)


def forward_transform(f: KTypeSample, lambda_grid=None) -> TransformData:
    """Spherical transform of a sampled profile.

    Parameters
    ----------
    f : KTypeSample
        Profile ``F`` on its grid; it must vanish at the last grid point.
    lambda_grid : array_like, optional
        Defaults to :func:`default_lambda_grid`.

    Returns
    -------
    TransformData
    """
    lam = default_lambda_grid() if lambda_grid is None else np.asarray(lambda_grid, dtype=float)
    t, F = f.t_grid, f.values
    if abs(F[-1]) > 1e-10 * max(1.0, float(np.max(np.abs(F)))):
        raise PreconditionError("profile must vanish at the end of its grid")
    Z = zeta_table(f.n, lam, t)
    cont = _radial_integral(Z * F[None, :], t)
    disc = {}
    for s in discrete_set(f.n):
        z = zeta_axis(f.n, s, t).real
        disc[s] = complex(_radial_integral(z * F, t))
    return TransformData(f.n, lam, cont, disc)


def _tail_estimate(lam, g):
    """Tail of ``int |g| dlam`` past the grid, from the last tenth of the grid.

    Returns ``(tail, significant)``. When the last tenth carries less than
    ``_NOISE_FLOOR`` of the total mass the data are at quadrature noise and
    the tail is reported as that mass. Otherwise an exponential envelope is
    fitted to block maxima and integrated to infinity; a non-decaying
    envelope gives an infinite tail.
    """
    env_all = np.abs(g).reshape(g.shape[0], -1).max(axis=1)
    start = int(0.9 * lam.size)
    mass = float(simpson(env_all, x=lam))
    decade = float(simpson(env_all[start:], x=lam[start:]))
    if mass == 0.0 or decade <= _NOISE_FLOOR * mass:
        return decade, False
    blocks = np.array_split(np.arange(start, lam.size), 4)
    xs = np.array([lam[b].mean() for b in blocks])
    env = np.maximum(np.array([env_all[b].max() for b in blocks]), 1e-300)
    slope, icpt = np.polyfit(xs, np.log(env), 1)
    if slope >= 0:
        return math.inf, True
    return math.exp(icpt + slope * lam[-1]) / (-slope), True


def spectral_integral(n, lam, cont_weights, disc_weights: dict, t_grid, tol: float = DEFAULT_TAIL_TOL):
    """Evaluate ``int cont(lam) zeta(a_t) nu_n dlam + sum (s - 1/2) disc(s) zeta_{n,s}(a_t)``.

    Shared by the inversion formula and kernel synthesis.

    Raises
    ------
    InsufficientDecay
        The fitted tail past the grid exceeds ``tol`` times the peak output.
    """
    t = np.asarray(t_grid, dtype=float)
    lam = np.asarray(lam, dtype=float)
    Z = zeta_table(n, lam, t)
    g = (np.asarray(cont_weights) * nu_density(n, lam))[:, None] * Z * PLANCHEREL_NORM
    out = simpson(g, x=lam, axis=0)
    for s in discrete_set(n):
        out = out + PLANCHEREL_NORM * (s - 0.5) * disc_weights[s] * zeta_axis(n, s, t).real
    tail, significant = _tail_estimate(lam, g)
    scale = max(float(np.max(np.abs(out), initial=0.0)), 1e-300)
    if significant and tail > tol * scale:
        raise InsufficientDecay(
            f"spectral tail past lam = {lam[-1]:g} estimated at {tail:.3g}", estimate=tail)
    return out, tail


def inverse_transform(T: TransformData, t_grid, tol: float = DEFAULT_TAIL_TOL) -> KTypeSample:
    """Inversion formula on ``t_grid``.

    Parameters
    ----------
    T : TransformData
    t_grid : array_like
    tol : float
        Admissible tail past the last grid value, relative to the peak.

    Returns
    -------
    KTypeSample
        ``info["tail"]`` holds the tail estimate.

    Raises
    ------
    InsufficientDecay
    """
    out, tail = spectral_integral(T.n, T.lambda_grid, T.cont_values, T.disc_values, t_grid, tol)
    return KTypeSample(T.n, np.asarray(t_grid, dtype=float), out, info={"tail": tail})


def plancherel_sides(f: KTypeSample, T: TransformData | None = None):
    """Both sides of the Plancherel identity.

    Returns
    -------
    (float, float)
        ``int |F|^2 sinh t dt`` and
        ``int |f_hat|^2 nu_n dlam + sum (s - 1/2) |f_hat(s)|^2``.
    """
    T = forward_transform(f) if T is None else T
    if T.n != f.n:
        raise GridMismatchError("transform and profile have different K-types")
    lhs = float(_radial_integral(np.abs(f.values) ** 2, f.t_grid))
    rhs = simpson(np.abs(T.cont_values) ** 2 * nu_density(T.n, T.lambda_grid), x=T.lambda_grid)
    rhs += sum((s - 0.5) * abs(v) ** 2 for s, v in T.disc_values.items())
    return lhs, float(PLANCHEREL_NORM * rhs)


def apply_multiplier(f: KTypeSample, m, lambda_grid=None, tol: float = DEFAULT_TAIL_TOL,
                     t_out=None) -> KTypeSample:
    """``m(L_n) f``: transform, multiply by ``m_n``, invert.

    Parameters
    ----------
    f : KTypeSample
    m : Multiplier
        Evaluated at ``n^2 + lam^2 + 1/4`` and ``n^2 + s(1 - s)``.
    lambda_grid : array_like, optional
    tol : float
        Admissible spectral tail, see :func:`inverse_transform`.
    t_out : array_like, optional
        Output grid; defaults to the grid of ``f``.
    """
    T = forward_transform(f, lambda_grid)
    n2 = f.n ** 2
    cont = m(n2 + T.lambda_grid ** 2 + 0.25)
    disc = {s: complex(m(n2 + s * (1.0 - s))) for s in T.disc_values}
    t_out = f.t_grid if t_out is None else t_out
    return inverse_transform(T.scaled(cont, disc), t_out, tol)


# ------------------------------------------------------------ fixtures

def _bump(x):
    # exp(-1/(1 - x^2)) on |x| < 1, zero elsewhere
    x = np.asarray(x, dtype=float)
    inside = np.abs(x) < 1.0
    out = np.zeros_like(x)
    out[inside] = np.exp(-1.0 / (1.0 - x[inside] ** 2))
    return out


def bump_profile(n, radius: float = 2.0, points: int = 401) -> KTypeSample:
    """``F(t) = exp(-1/(1 - (t/R)^2))`` on ``[0, R]``."""
    t = np.linspace(0.0, radius, points)
    return KTypeSample(n, t, _bump(t / radius))


def gaussian_profile(n, width: float = 0.5, t_max: float = 4.0, points: int = 1601) -> KTypeSample:
    """``F(t) = (1 + t^2) exp(-t^2 / (2 width^2))``; negligible past ``t_max``."""
    t = np.linspace(0.0, t_max, points)
    vals = (1.0 + t ** 2) * np.exp(-0.5 * (t / width) ** 2)
    vals[-1] = 0.0
    return KTypeSample(n, t, vals)


def shifted_bump_profile(n, center: float = 1.0, radius: float = 0.9, points: int = 401) -> KTypeSample:
    """Bump of half-width ``radius`` centred at ``center``; needs ``radius < center``."""
    if radius >= center:
        raise PreconditionError("shifted bump must stay away from t = 0")
    t = np.linspace(0.0, center + radius, points)
    return KTypeSample(n, t, _bump((t - center) / radius))


def tiny_bump_profile(n, radius: float = 0.5, points: int = 201) -> KTypeSample:
    """Small-support bump used by the convolution checks."""
    return bump_profile(n, radius, points)


FIXTURES = {
    "bump": bump_profile,
    "gaussian": gaussian_profile,
    "shifted_bump": shifted_bump_profile,
}


def fixture(name: str, n) -> KTypeSample:
    """Named test profile of K-type ``n``."""
    try:
        return FIXTURES[name](n)
    except KeyError:
        raise PreconditionError(f"unknown fixture {name!r}; choose from {sorted(FIXTURES)}") from None

"""Joint L^p spectrum regions on K-type ``n``.

With ``delta = |1/p - 1/2|`` the strip ``|Re s - 1/2| <= delta`` is mapped by
``gamma(s) = s(1 - s)`` onto the parabolic region

    Par(delta) = {z : Re z >= (Im z)^2 / (4 delta^2) + 1/4 - delta^2},

which degenerates to the ray ``[1/4, inf)`` at ``delta = 0``. On K-type ``n``
the region is ``n^2 + (Par(delta) U gamma[D_n])``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import PreconditionError
from .group import is_half_integer
from .multipliers import strip_delta
from .spherical import discrete_set

__all__ = ["SpectrumRegion", "par_region", "contains", "boundary_points", "CONTAINS_TOL"]

# relative slack for membership tests, scaled by 1 + |z|
CONTAINS_TOL = 1e-12


def gamma_map(s):
    """``gamma(s) = s(1 - s)``."""
    s = np.asarray(s, dtype=complex)
    return s * (1.0 - s)


@dataclass(frozen=True)
class SpectrumRegion:
    """``n^2 + (Par(delta) U gamma[D_n])`` for ``delta = |1/p - 1/2|``."""

    n: float
    p: float
    delta: float
    discrete_points: tuple

    def contains(self, z, tol: float = CONTAINS_TOL):
        return contains(self, z, tol)


def par_region(p: float, n) -> SpectrumRegion:
    """Spectrum region for exponent ``p`` on K-type ``n``."""
    if not is_half_integer(n):
        raise PreconditionError("K-type must be a half-integer")
    delta = strip_delta(p)
    n2 = float(n) ** 2
    pts = tuple(n2 + s * (1.0 - s) for s in discrete_set(n))
    return SpectrumRegion(float(n), float(p), delta, pts)


def contains(R: SpectrumRegion, z, tol: float = CONTAINS_TOL):
    """Membership, vectorized over ``z``.

    The defining inequality is tested with slack ``tol * (1 + |z|)``.
    """
    z = np.asarray(z, dtype=complex)
    slack = tol * (1.0 + np.abs(z))
    w = z - R.n ** 2
    if R.delta == 0.0:
        inside = (np.abs(w.imag) <= slack) & (w.real >= 0.25 - slack)
    else:
        d2 = R.delta ** 2
        inside = w.real >= w.imag ** 2 / (4.0 * d2) + 0.25 - d2 - slack
    for pt in R.discrete_points:
        inside = inside | (np.abs(z - pt) <= slack)
    return inside[()] if inside.ndim == 0 else inside


def boundary_points(R: SpectrumRegion, N: int = 101, y_max: float = 3.0):
    """Boundary of the region.

    Returns
    -------
    curve : ndarray
        ``n^2 + gamma(1/2 + delta + i y)`` for ``y`` in ``[-y_max, y_max]``;
        on the real ray when ``delta = 0``, starting at ``n^2 + 1/4``.
    isolated : ndarray
        The points ``n^2 + gamma[D_n]``.
    """
    if N < 2:
        raise PreconditionError("need at least 2 boundary points")
    if R.delta == 0.0:
        y = np.linspace(0.0, y_max, N)
    else:
        y = np.linspace(-y_max, y_max, N)
    # gamma(1/2 + delta + i y) expanded; forming 1/2 + delta first would
    # cost relative accuracy in delta
    d = R.delta
    curve = (R.n ** 2 + 0.25 - d * d + y * y) - 2j * d * y
    return curve, np.array(R.discrete_points, dtype=complex)

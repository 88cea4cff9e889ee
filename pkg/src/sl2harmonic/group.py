"""SL(2, R) elements, Cartan and Iwasawa coordinates, Haar integration.

Parametrizations::

    u_theta = [[cos(theta/2),  sin(theta/2)],
               [-sin(theta/2), cos(theta/2)]]      theta in [0, 4 pi)
    a_t     = diag(e^{t/2}, e^{-t/2})
    n_xi    = [[1, xi/2], [0, 1]]
    nbar_xi = [[1, 0], [xi/2, 1]]

Every group element is ``u_psi a_t u_theta`` (Cartan) and ``n_xi a_t u_theta``
(Iwasawa). The angular measure is normalized: ``(1/4 pi) int_0^{4 pi}``.

The public functions act on scalar :class:`GroupElement` values. The
``*_arrays`` helpers take matrix entries as numpy arrays and are what the
quadrature-heavy code paths use.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import GridMismatchError, PreconditionError, ToleranceNotMet
from .special_functions import QuadratureSpec, gauss_legendre, integrate

__all__ = [
    "GroupElement",
    "CartanCoords",
    "IwasawaCoords",
    "KTypeSample",
    "u",
    "a",
    "n_elem",
    "nbar_elem",
    "from_cartan",
    "from_iwasawa",
    "compose",
    "inverse",
    "cartan_decompose",
    "iwasawa_decompose",
    "haar_integrate",
    "project_ktype",
    "convolve_ktype",
    "random_element",
    "is_half_integer",
]

FOUR_PI = 4.0 * math.pi
TWO_PI = 2.0 * math.pi


def is_half_integer(n) -> bool:
    """True when ``2 n`` is an integer."""
    return float(2 * n).is_integer()


@dataclass(frozen=True)
class GroupElement:
    """A 2x2 real matrix of determinant one.

    The entries are rescaled by ``1/sqrt(det)`` on construction, so small
    drift from products of floating-point matrices is removed.
    """

    m11: float
    m12: float
    m21: float
    m22: float

    def __post_init__(self):
        det = self.m11 * self.m22 - self.m12 * self.m21
        if not det > 0:
            raise PreconditionError(f"matrix with determinant {det:g} is not in SL(2,R) up to scale")
        if det != 1.0:
            r = 1.0 / math.sqrt(det)
            for name in ("m11", "m12", "m21", "m22"):
                object.__setattr__(self, name, float(getattr(self, name)) * r)
        else:
            for name in ("m11", "m12", "m21", "m22"):
                object.__setattr__(self, name, float(getattr(self, name)))

    @classmethod
    def from_matrix(cls, m) -> "GroupElement":
        m = np.asarray(m, dtype=float)
        return cls(m[0, 0], m[0, 1], m[1, 0], m[1, 1])

    def matrix(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    def entries(self):
        return self.m11, self.m12, self.m21, self.m22

    def __matmul__(self, other: "GroupElement") -> "GroupElement":
        return compose(self, other)

    def inverse(self) -> "GroupElement":
        return inverse(self)


@dataclass(frozen=True)
class CartanCoords:
    """Coordinates ``(psi, t, theta)`` of ``u_psi a_t u_theta``."""

    psi: float
    t: float
    theta: float


@dataclass(frozen=True)
class IwasawaCoords:
    """Coordinates ``(xi, t, theta)`` of ``n_xi a_t u_theta`` (or ``nbar_xi``)."""

    xi: float
    t: float
    theta: float
    variant: str = "N"


# ------------------------------------------------------------ array kernels

def _mul(A, B):
    a11, a12, a21, a22 = A
    b11, b12, b21, b22 = B
    return (a11 * b11 + a12 * b21, a11 * b12 + a12 * b22,
            a21 * b11 + a22 * b21, a21 * b12 + a22 * b22)


def u_arrays(theta):
    c, s = np.cos(np.asarray(theta) / 2.0), np.sin(np.asarray(theta) / 2.0)
    return c, s, -s, c


def a_arrays(t):
    e = np.exp(np.asarray(t) / 2.0)
    z = np.zeros_like(e)
    return e, z, z, 1.0 / e


def cartan_arrays(m11, m12, m21, m22):
    """Cartan coordinates of arrays of matrices; returns ``(psi, t, theta)``."""
    m11, m12, m21, m22 = (np.asarray(v, dtype=float) for v in (m11, m12, m21, m22))
    E = 0.5 * (m11 + m22)
    F = 0.5 * (m11 - m22)
    G = 0.5 * (m21 + m12)
    H = 0.5 * (m21 - m12)
    Q = np.hypot(E, H)
    R = np.hypot(F, G)
    a1 = np.arctan2(G, F)
    a2 = np.arctan2(H, E)
    # m = Rot(phi) diag(Q+R, Q-R) Rot(rho), Rot(x) the rotation by angle x,
    # and u_psi = Rot(-psi/2)
    degenerate = R <= 1e-15 * Q
    phi = np.where(degenerate, 0.0, 0.5 * (a2 + a1))
    rho = np.where(degenerate, a2, 0.5 * (a2 - a1))
    t = np.where(degenerate, 0.0, 2.0 * np.log(Q + R))
    psi = np.mod(-2.0 * phi, FOUR_PI)
    theta = np.mod(-2.0 * rho, FOUR_PI)
    shift = psi >= TWO_PI
    psi = np.where(shift, psi - TWO_PI, psi)
    theta = np.where(shift, np.mod(theta + TWO_PI, FOUR_PI), theta)
    # mod can round up to the period itself
    psi = np.where(psi >= TWO_PI, 0.0, psi)
    theta = np.where(theta >= FOUR_PI, 0.0, theta)
    return psi, t, theta


def iwasawa_arrays(m11, m12, m21, m22, variant="N"):
    """Iwasawa coordinates of arrays of matrices; returns ``(xi, t, theta)``."""
    m11, m12, m21, m22 = (np.asarray(v, dtype=float) for v in (m11, m12, m21, m22))
    if variant == "N":
        # bottom row equals e^{-t/2} (-sin(theta/2), cos(theta/2))
        half = np.arctan2(-m21, m22)
        t = -np.log(m21 * m21 + m22 * m22)
        c, s = np.cos(half), np.sin(half)
        top_right = -m11 * s + m12 * c
        xi = 2.0 * np.exp(t / 2.0) * top_right
    elif variant == "Nbar":
        # top row equals e^{t/2} (cos(theta/2), sin(theta/2))
        half = np.arctan2(m12, m11)
        t = np.log(m11 * m11 + m12 * m12)
        c, s = np.cos(half), np.sin(half)
        bottom_left = m21 * c + m22 * s
        xi = 2.0 * np.exp(-t / 2.0) * bottom_left
    else:
        raise PreconditionError("variant must be 'N' or 'Nbar'")
    theta = np.mod(2.0 * half, FOUR_PI)
    theta = np.where(theta >= FOUR_PI, 0.0, theta)
    return xi, t + 0.0, theta


# ------------------------------------------------------------ constructors

def u(theta: float) -> GroupElement:
    """Rotation ``u_theta``."""
    return GroupElement(*(float(v) for v in u_arrays(theta)))


def a(t: float) -> GroupElement:
    """Diagonal element ``a_t = diag(e^{t/2}, e^{-t/2})``."""
    return GroupElement(math.exp(t / 2.0), 0.0, 0.0, math.exp(-t / 2.0))


def n_elem(xi: float) -> GroupElement:
    """Upper unipotent ``n_xi``."""
    return GroupElement(1.0, xi / 2.0, 0.0, 1.0)


def nbar_elem(xi: float) -> GroupElement:
    """Lower unipotent ``nbar_xi``."""
    return GroupElement(1.0, 0.0, xi / 2.0, 1.0)


def compose(g: GroupElement, h: GroupElement) -> GroupElement:
    """Matrix product ``g h``."""
    return GroupElement(*(float(v) for v in _mul(g.entries(), h.entries())))


def inverse(g: GroupElement) -> GroupElement:
    """Inverse of a unimodular matrix."""
    return GroupElement(g.m22, -g.m12, -g.m21, g.m11)


def from_cartan(c: CartanCoords) -> GroupElement:
    m = _mul(_mul(u_arrays(c.psi), a_arrays(c.t)), u_arrays(c.theta))
    return GroupElement(*(float(v) for v in m))


def from_iwasawa(i: IwasawaCoords) -> GroupElement:
    unip = n_elem(i.xi) if i.variant == "N" else nbar_elem(i.xi)
    m = _mul(_mul(unip.entries(), a_arrays(i.t)), u_arrays(i.theta))
    return GroupElement(*(float(v) for v in m))


def cartan_decompose(g: GroupElement) -> CartanCoords:
    """Cartan coordinates of ``g``.

    Parameters
    ----------
    g : GroupElement

    Returns
    -------
    CartanCoords
        ``t = 2 log(sigma_max) >= 0``. For ``t > 0`` the representative with
        ``psi`` in ``[0, 2 pi)`` is returned; at ``t = 0`` all of the rotation
        is put in ``theta`` and ``psi = 0``.
    """
    psi, t, theta = cartan_arrays(*g.entries())
    return CartanCoords(float(psi), float(t), float(theta))


def iwasawa_decompose(g: GroupElement, variant: str = "N") -> IwasawaCoords:
    """Iwasawa coordinates of ``g`` for ``G = NAK`` or ``G = Nbar A K``."""
    xi, t, theta = iwasawa_arrays(*g.entries(), variant=variant)
    return IwasawaCoords(float(xi), float(t), float(theta), variant)


def random_element(rng: np.random.Generator, bound: float = 3.0) -> GroupElement:
    """Uniform entries in ``[-bound, bound]``, resampled until ``det > 0``.

    The result is renormalized to determinant one by the constructor.
    """
    while True:
        m = rng.uniform(-bound, bound, size=4)
        if m[0] * m[3] - m[1] * m[2] > 1e-3:
            return GroupElement(*m)


# ------------------------------------------------------------ integration

def haar_integrate(f: Callable[[GroupElement], complex], t_max: float,
                   spec: QuadratureSpec | None = None, angular_nodes: int = 32) -> complex:
    """Haar integral in Cartan coordinates.

    Computes ``(1/4 pi)^2 int int int f(u_psi a_t u_theta) sinh t dt dpsi dtheta``
    over ``t`` in ``[0, t_max]``.

    Parameters
    ----------
    f : callable
        Function of a :class:`GroupElement`, numerically supported in
        ``t <= t_max``.
    t_max : float
    spec : QuadratureSpec, optional
        Settings of the adaptive rule in ``t``.
    angular_nodes : int
        Trapezoid nodes per angle over ``[0, 4 pi)``.

    Returns
    -------
    complex
    """
    spec = spec or QuadratureSpec("adaptive-subdivision", 64, 1e-10, 1e-8)
    ang = FOUR_PI * np.arange(angular_nodes) / angular_nodes
    us = [u_arrays(x) for x in ang]

    def radial(t):
        t = float(np.asarray(t))
        at = a_arrays(t)
        acc = 0.0 + 0.0j
        for up in us:
            left = _mul(up, at)
            for ut in us:
                m = _mul(left, ut)
                acc += complex(f(GroupElement(*(float(v) for v in m))))
        return acc / angular_nodes ** 2 * math.sinh(t)

    return integrate(radial, (0.0, t_max), spec)


def project_ktype(f: Callable[[GroupElement], complex], n: float,
                  nodes: int = 64) -> Callable[[GroupElement], complex]:
    """Projection onto right K-type ``n``.

    Returns ``g -> (1/4 pi) int_0^{4 pi} f(g u_theta) e^{-i n theta} dtheta``,
    evaluated with the trapezoid rule on ``nodes`` points.
    """
    if not is_half_integer(n):
        raise PreconditionError("K-type must be a half-integer")
    ang = FOUR_PI * np.arange(nodes) / nodes
    phases = np.exp(-1j * n * ang)
    rots = [GroupElement(*(float(v) for v in u_arrays(x))) for x in ang]

    def projected(g: GroupElement) -> complex:
        vals = np.array([complex(f(compose(g, r))) for r in rots])
        return complex(np.mean(vals * phases))

    return projected


# ------------------------------------------------------------ K-type samples

@dataclass(frozen=True)
class KTypeSample:
    """Radial profile of ``f(u_psi a_t u_theta) = e^{i n (psi + theta)} F(t)``.

    Attributes
    ----------
    n : float
        K-type, a half-integer.
    t_grid : ndarray
        Increasing, nonnegative sample points.
    values : ndarray
        Complex samples ``F(t)``; the profile is taken to vanish beyond the
        last grid point.
    info : dict
        Free-form diagnostics attached by producers.
    """

    n: float
    t_grid: np.ndarray
    values: np.ndarray
    info: dict | None = None

    def __post_init__(self):
        t = np.asarray(self.t_grid, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if not is_half_integer(self.n):
            raise PreconditionError("K-type must be a half-integer")
        if t.ndim != 1 or t.shape != v.shape:
            raise PreconditionError("t_grid and values must be 1-D of equal length")
        if np.any(np.diff(t) <= 0) or t[0] < 0:
            raise PreconditionError("t_grid must be increasing and nonnegative")
        object.__setattr__(self, "t_grid", t)
        object.__setattr__(self, "values", v)
        object.__setattr__(self, "n", float(self.n))

    def profile(self, t):
        """Even cubic-spline interpolant of ``F``, zero past the grid."""
        from scipy.interpolate import CubicSpline

        t_abs = np.abs(np.asarray(t, dtype=float))
        tg, v = self.t_grid, self.values
        if tg[0] == 0.0:
            tt = np.concatenate([-tg[:0:-1], tg])
            vv = np.concatenate([v[:0:-1], v])
        else:
            tt = np.concatenate([-tg[::-1], tg])
            vv = np.concatenate([v[::-1], v])
        spline = CubicSpline(tt, vv)
        out = np.where(t_abs <= tg[-1], spline(np.minimum(t_abs, tg[-1])), 0.0)
        return out

    def __call__(self, g: GroupElement) -> complex:
        c = cartan_decompose(g)
        return complex(np.exp(1j * self.n * (c.psi + c.theta)) * self.profile(c.t))

    def support_radius(self) -> float:
        nz = np.flatnonzero(np.abs(self.values) > 0)
        return float(self.t_grid[nz[-1]]) if nz.size else 0.0


def _convolve_at(f: KTypeSample, g: KTypeSample, x, nodes_ang, nodes_rad):
    # (f*g)(x) = int f(y) g(y^{-1} x) dy, y = u_psi a_tau u_theta over supp f
    radius = f.support_radius()
    if radius == 0.0:
        return 0.0j
    tau, w_tau = gauss_legendre(0.0, radius, nodes_rad)
    # both angles are 2 pi periodic in the integrand, so [0, 2 pi) suffices
    ang = TWO_PI * np.arange(nodes_ang) / nodes_ang
    P, T, R = np.meshgrid(ang, tau, ang, indexing="ij")
    fy = np.exp(1j * f.n * (P + R)) * f.profile(T)
    # y^{-1} = u_{-theta} a_{-tau} u_{-psi}
    yinv = _mul(_mul(u_arrays(-R), a_arrays(-T)), u_arrays(-P))
    z = _mul(yinv, tuple(np.broadcast_to(v, P.shape) for v in x))
    psi2, t2, theta2 = cartan_arrays(*z)
    gz = np.exp(1j * g.n * (psi2 + theta2)) * g.profile(t2)
    weight = (w_tau * np.sinh(tau))[None, :, None] / nodes_ang ** 2
    return complex(np.sum(fy * gz * weight))


def convolve_ktype(f: KTypeSample, g: KTypeSample, spec: QuadratureSpec | None = None,
                   t_out=None, nodes_ang: int = 32, nodes_rad: int = 32) -> KTypeSample:
    """Profile of the convolution ``f * g`` of two K-type ``n`` functions.

    ``(f*g)(x) = int_G f(y) g(y^{-1} x) dy`` is evaluated by a tensor rule:
    trapezoid in both angles and Gauss-Legendre in ``t`` over the support
    of ``f``. Each point ``y^{-1} x`` is decomposed again in Cartan
    coordinates. At most ``32^3`` nodes are intended; this is an oracle,
    not a production path.

    Parameters
    ----------
    f, g : KTypeSample
        Profiles with the same K-type.
    spec : QuadratureSpec, optional
        Only ``abs_tol`` is used, as the admissible K-type defect.
    t_out : array_like, optional
        Output grid; defaults to 33 points on ``[0, R_f + R_g]``.
    nodes_ang, nodes_rad : int

    Returns
    -------
    KTypeSample
        ``info["ktype_defect"]`` records the check that the result
        transforms as ``e^{i n (psi + theta)}``.
    """
    if f.n != g.n:
        raise GridMismatchError(f"K-types differ: {f.n} vs {g.n}")
    spec = spec or QuadratureSpec("periodic-trapezoid", 32, 1e-6, 1e-6)
    if t_out is None:
        t_out = np.linspace(0.0, f.t_grid[-1] + g.t_grid[-1], 33)
    t_out = np.asarray(t_out, dtype=float)
    vals = np.array([_convolve_at(f, g, a_arrays(t), nodes_ang, nodes_rad) for t in t_out])
    # membership check: (f*g)(u_alpha a_t u_beta) = e^{in(alpha+beta)} (f*g)(a_t)
    k = len(t_out) // 3
    alpha, beta = 0.7, 2.9
    x = _mul(_mul(u_arrays(alpha), a_arrays(t_out[k])), u_arrays(beta))
    rotated = _convolve_at(f, g, x, nodes_ang, nodes_rad)
    defect = abs(rotated - np.exp(1j * f.n * (alpha + beta)) * vals[k])
    scale = max(1.0, float(np.max(np.abs(vals), initial=0.0)))
    if defect > max(spec.abs_tol, 1e-4) * scale:
        raise ToleranceNotMet(f"convolution is not in A_n: defect {defect:.3g}", estimate=defect)
    return KTypeSample(f.n, t_out, vals, info={"ktype_defect": defect})

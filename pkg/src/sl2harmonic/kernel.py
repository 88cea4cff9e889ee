"""Convolution kernels of spectral multipliers and their diagnostics.

The kernel of ``m(L_n)`` is the inverse spherical transform of ``m_n``:

    Phi(t) = int_0^inf m(n^2 + lam^2 + 1/4) zeta_{n,1/2+i lam}(a_t) nu_n(lam) dlam
             + sum_{s in D_n} (s - 1/2) m(n^2 + s(1 - s)) zeta_{n,s}(a_t).

The first term is the continuous part, the sum the discrete part. The
continuous part is split with a smooth cutoff ``chi`` into a local piece
supported in ``t <= 1`` and a global piece supported in ``t >= 1/2``.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass

import numpy as np
from scipy.integrate import simpson

from .errors import InsufficientDecay, PreconditionError, TailNotResolved
from .group import KTypeSample, is_half_integer
from .multipliers import Multiplier
from .special_functions import gauss_legendre
from .spherical import discrete_set, zeta_axis, zeta_table
from .transform import PLANCHEREL_NORM, nu_density

__all__ = [
    "KernelTable",
    "cutoff",
    "synthesize_kernel",
    "herz_integral",
    "kernel_to_csv",
    "kernel_to_json",
    "COMPONENTS",
]

COMPONENTS = ("cont", "disc", "loc", "glo")

# kernel values below this fraction of the peak continuous part are
# quadrature noise; the Herz weight grows like e^{t/p} and would amplify them
_KERNEL_NOISE = 1e-13
# relative size of the weighted integrand at the grid end below which the
# tail is negligible
_HERZ_NOISE = 1e-12


def _g(x):
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = np.exp(-1.0 / x[pos])
    return out


def cutoff(t):
    """Smooth cutoff: 1 on ``|t| <= 1/2``, 0 on ``|t| >= 1``.

    ``chi = g(1 - u) / (g(1 - u) + g(u))`` with ``u = 2|t| - 1`` and
    ``g(x) = e^{-1/x}`` for ``x > 0``.
    """
    u = 2.0 * np.abs(np.asarray(t, dtype=float)) - 1.0
    a, b = _g(1.0 - u), _g(u)
    return a / (a + b)


@dataclass(frozen=True)
class KernelTable:
    """Sampled kernel of a multiplier on K-type ``n``.

    Attributes
    ----------
    n : float
    t_grid : ndarray
    cont, disc : ndarray
        Continuous and discrete parts; the kernel is ``cont + disc``.
    loc, glo : ndarray
        ``loc = chi * cont`` and ``glo = cont - loc``, adjusted so that
        ``loc + glo == cont`` holds exactly in floating point.
    epsilon : float
        Regularization ``m(z) e^{-epsilon z}`` that was applied.
    lambda_max : float
    tail : float
        Bound on the spectral integral past ``lambda_max``.
    provenance : str
    """

    n: float
    t_grid: np.ndarray
    cont: np.ndarray
    disc: np.ndarray
    loc: np.ndarray
    glo: np.ndarray
    epsilon: float = 0.0
    lambda_max: float = 60.0
    tail: float = 0.0
    provenance: str = ""

    @property
    def full(self) -> np.ndarray:
        return self.cont + self.disc

    def as_sample(self) -> KTypeSample:
        """Full kernel as a K-type profile."""
        return KTypeSample(self.n, self.t_grid, self.full)

    def component(self, name: str) -> np.ndarray:
        if name == "full":
            return self.full
        if name not in COMPONENTS:
            raise PreconditionError(f"unknown component {name!r}")
        return getattr(self, name)


def _exact_split(cont, chi):
    # loc + glo must reproduce cont bit for bit
    loc = chi * cont
    glo = cont - loc
    for _ in range(8):
        bad = (loc + glo) != cont
        if not np.any(bad):
            break
        loc = np.where(bad, cont - glo, loc)
        glo = np.where((loc + glo) != cont, cont - loc, glo)
    bad = (loc + glo) != cont
    # last resort: put the whole value in the dominant piece
    loc = np.where(bad & (chi >= 0.5), cont, loc)
    glo = np.where(bad & (chi >= 0.5), 0.0, glo)
    glo = np.where(bad & (chi < 0.5), cont, glo)
    loc = np.where(bad & (chi < 0.5), 0.0, loc)
    return loc, glo


def _spectral_tail(m: Multiplier, n, lambda_max):
    # int_{lambda_max}^inf |m| nu dlam, using |zeta_{n,1/2+i lam}| <= 1
    edges = lambda_max * np.array([1.0, 1.5, 2.0, 3.0, 5.0, 10.0, 30.0, 100.0, 1000.0])
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        x, w = gauss_legendre(lo, hi, 32)
        total += float(np.sum(w * np.abs(m(n * n + x * x + 0.25)) * nu_density(n, x)))
    return total


def synthesize_kernel(m: Multiplier, n, t_grid, epsilon: float = 0.0, lambda_max: float = 60.0,
                      panel_nodes: int = 16, tol: float = 1e-6) -> KernelTable:
    """Kernel of ``m(L_n)`` on a grid.

    Parameters
    ----------
    m : Multiplier
    n : float
    t_grid : array_like
        Nonnegative, increasing.
    epsilon : float
        Regularization ``m(z) e^{-epsilon z}``.
    lambda_max : float
        Truncation of the spectral integral.
    panel_nodes : int
        Gauss-Legendre nodes per unit panel in ``lam``.
    tol : float
        Admissible spectral tail relative to the peak of the kernel.

    Raises
    ------
    InsufficientDecay
        ``epsilon = 0`` and ``m`` decays no faster than ``z^{-1}``, or the
        computed tail exceeds ``tol``.
    """
    if not is_half_integer(n):
        raise PreconditionError("K-type must be a half-integer")
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or t.size == 0 or t[0] < 0 or np.any(np.diff(t) <= 0):
        raise PreconditionError("t_grid must be increasing and nonnegative")
    if epsilon < 0:
        raise PreconditionError("epsilon must be nonnegative")
    if epsilon == 0 and m.decay_rate <= 1.0:
        raise InsufficientDecay(
            f"{m.provenance} decays like z^-{m.decay_rate:g}; pass epsilon > 0", estimate=math.inf)
    mr = m.regularized(epsilon)
    panels = max(1, int(math.ceil(lambda_max)))
    edges = np.linspace(0.0, lambda_max, panels + 1)
    lam, w = zip(*(gauss_legendre(a, b, panel_nodes) for a, b in zip(edges[:-1], edges[1:])))
    lam, w = np.concatenate(lam), np.concatenate(w)
    weights = w * mr(n * n + lam * lam + 0.25) * nu_density(n, lam) * PLANCHEREL_NORM
    Z = zeta_table(n, lam, t)
    cont = weights @ Z
    disc = np.zeros(t.shape, dtype=complex)
    for s in discrete_set(n):
        disc = disc + PLANCHEREL_NORM * (s - 0.5) * complex(mr(n * n + s * (1.0 - s))) * zeta_axis(n, s, t).real
    tail = _spectral_tail(mr, n, lambda_max)
    scale = max(float(np.max(np.abs(cont + disc), initial=0.0)), 1e-300)
    if tail > tol * scale:
        raise InsufficientDecay(f"spectral tail {tail:.3g} past lam = {lambda_max:g}", estimate=tail)
    loc, glo = _exact_split(cont, cutoff(t))
    return KernelTable(float(n), t, cont, disc, loc, glo, float(epsilon), float(lambda_max),
                       tail, mr.provenance)


def herz_integral(K: KernelTable, p: float) -> float:
    """``int_0^inf |Phi_glo(a_t)| sinh t e^{-t/p'} dt``, ``p' = p/(p-1)``.

    Simpson on the kernel grid plus the tail past its end from an
    exponential fit of the integrand on the last fifth of the grid. Kernel
    values below ``1e-13`` of the peak continuous part count as zero.

    Raises
    ------
    TailNotResolved
        The integrand does not decay at the end of the grid.
    """
    p = float(p)
    if not p > 1.0:
        raise PreconditionError("p must lie in (1, inf)")
    pprime = p / (p - 1.0) if math.isfinite(p) else 1.0
    t = K.t_grid
    glo = np.abs(K.glo)
    glo = np.where(glo <= _KERNEL_NOISE * float(np.max(np.abs(K.cont), initial=0.0)), 0.0, glo)
    h = glo * np.sinh(t) * np.exp(-t / pprime)
    peak = float(np.max(h, initial=0.0))
    if peak == 0.0:
        return 0.0
    body = float(simpson(h, x=t))
    start = int(0.8 * t.size)
    end_level = float(np.max(h[start:]))
    if end_level <= _HERZ_NOISE * peak:
        return body
    x, y = t[start:], h[start:]
    good = y > 0
    if good.sum() < 3:
        raise TailNotResolved("too few points to fit the kernel tail")
    slope, icpt = np.polyfit(x[good], np.log(y[good]), 1)
    if slope >= 0:
        raise TailNotResolved(f"kernel integrand grows at the grid end (rate {slope:.3g})", estimate=math.inf)
    tail = math.exp(icpt + slope * t[-1]) / (-slope)
    return body + tail


def kernel_to_csv(K: KernelTable, config_hash: str = "") -> str:
    """CSV rows ``t, re, im, component, config_hash`` with 17 significant digits."""
    buf = io.StringIO()
    wr = csv.writer(buf, lineterminator="\n")
    wr.writerow(["t", "re", "im", "component", "config_hash"])
    for name in COMPONENTS:
        for tt, v in zip(K.t_grid, K.component(name)):
            wr.writerow([f"{tt:.17g}", f"{v.real:.17g}", f"{v.imag:.17g}", name, config_hash])
    return buf.getvalue()


def kernel_to_json(K: KernelTable) -> dict:
    """JSON-ready dictionary of the table."""
    def pair(a):
        return [[float(v.real), float(v.imag)] for v in np.asarray(a, dtype=complex)]

    return {
        "n": K.n, "epsilon": K.epsilon, "lambda_max": K.lambda_max, "tail": K.tail,
        "provenance": K.provenance, "t": [float(x) for x in K.t_grid],
        **{name: pair(K.component(name)) for name in COMPONENTS},
    }


def kernel_json_dumps(K: KernelTable) -> str:
    return json.dumps(kernel_to_json(K), sort_keys=True)

"""Spectral multipliers of the Casimir-type operator on K-type ``n``.

A multiplier ``m`` is a function of the spectral value ``z``. On K-type
``n`` it is pulled back to the spectral parameter by
``m_n(s) = m(n^2 + s(1 - s))``. Built-in families:

``heat:tau=T``
    ``e^{-T z}``.
``resolvent:z0=Z``
    ``(Z - z)^{-1}``.
``imagpower:sigma=S``
    ``z^{i S}`` (principal branch).
``table:PATH[,halfwidth=H]``
    Cubic spline through a CSV table ``z, re, im`` on real ``z``.
``one`` / ``zero``
    Constants.
"""

from __future__ import annotations

import cmath
import csv
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import DerivativeUnavailable, PreconditionError, StripTooNarrow
from .group import is_half_integer
from .spherical import discrete_set

__all__ = [
    "Multiplier",
    "heat",
    "resolvent",
    "imagpower",
    "constant",
    "table",
    "parse_multiplier",
    "strip_delta",
    "mh_norm",
    "discrete_multiplier_sum",
]

_CAUCHY_NODES = 32


@dataclass(frozen=True)
class Multiplier:
    """Spectral multiplier with the analytic data the diagnostics need.

    Attributes
    ----------
    evaluator : callable
        ``z -> m(z)``, vectorized, accepting complex input.
    derivatives : tuple
        ``(m', m'')`` as callables in ``z``; ``None`` entries fall back to
        Cauchy-circle differentiation in ``s``.
    halfwidth : float or callable
        ``m_n`` is holomorphic on ``|Re s - 1/2| < halfwidth``; a callable
        receives ``n``.
    decay_rate : float
        ``m(z) = O(|z|^{-decay_rate})`` along the spectrum; ``inf`` for
        faster than any power.
    provenance : str
        Specification string the multiplier was built from.
    """

    evaluator: Callable
    derivatives: tuple = (None, None)
    halfwidth: float | Callable = math.inf
    decay_rate: float = 0.0
    provenance: str = "custom"

    def __call__(self, z):
        return np.asarray(self.evaluator(np.asarray(z, dtype=complex)), dtype=complex)

    @property
    def derivative_order_available(self) -> int:
        """Highest order with an analytic derivative."""
        order = 0
        for d in self.derivatives:
            if d is None:
                break
            order += 1
        return order

    def strip_halfwidth(self, n) -> float:
        hw = self.halfwidth
        return float(hw(n)) if callable(hw) else float(hw)

    def pulled_back(self, n, s):
        """``m_n(s) = m(n^2 + s(1 - s))``."""
        s = np.asarray(s, dtype=complex)
        return self(n * n + s * (1.0 - s))

    def pulled_back_derivatives(self, n, s, radius=None):
        """``(m_n, m_n', m_n'')`` at ``s``.

        Analytic derivatives use ``m_n' = m'(z)(1 - 2s)`` and
        ``m_n'' = m''(z)(1 - 2s)^2 - 2 m'(z)``; otherwise the Cauchy integral
        on a circle of the given radius around ``s``.
        """
        s = np.asarray(s, dtype=complex)
        z = n * n + s * (1.0 - s)
        v0 = self(z)
        if self.derivative_order_available >= 2:
            d1 = np.asarray(self.derivatives[0](z), dtype=complex)
            d2 = np.asarray(self.derivatives[1](z), dtype=complex)
            w = 1.0 - 2.0 * s
            return v0, d1 * w, d2 * w * w - 2.0 * d1
        if radius is None:
            raise DerivativeUnavailable("no analytic derivatives and no Cauchy radius")
        r = np.asarray(radius, dtype=float)
        ang = 2.0 * math.pi * np.arange(_CAUCHY_NODES) / _CAUCHY_NODES
        ring = np.exp(1j * ang)
        pts = s[..., None] + r[..., None] * ring
        try:
            vals = self.pulled_back(n, pts)
        except (TypeError, ValueError) as exc:
            raise DerivativeUnavailable(f"multiplier cannot be evaluated off the real axis: {exc}") from exc
        if not np.all(np.isfinite(vals)):
            raise DerivativeUnavailable("multiplier is not finite on the Cauchy circle")
        d1 = (vals * ring ** -1).mean(axis=-1) / r
        d2 = 2.0 * (vals * ring ** -2).mean(axis=-1) / r ** 2
        return v0, d1, d2

    def scaled(self, alpha: complex) -> "Multiplier":
        """``alpha * m`` with the same analytic data."""
        alpha = complex(alpha)
        ders = tuple(None if d is None else (lambda z, d=d: alpha * d(z)) for d in self.derivatives)
        return Multiplier(lambda z: alpha * self.evaluator(z), ders, self.halfwidth,
                          self.decay_rate, f"{alpha!r}*({self.provenance})")

    def regularized(self, epsilon: float) -> "Multiplier":
        """``m(z) e^{-epsilon z}``."""
        if epsilon == 0:
            return self
        if epsilon < 0:
            raise PreconditionError("epsilon must be nonnegative")
        e = float(epsilon)
        d = self.derivatives

        def ev(z):
            return self.evaluator(z) * np.exp(-e * z)

        ders = (None, None)
        if d[0] is not None and d[1] is not None:
            ders = (lambda z: (d[0](z) - e * self.evaluator(z)) * np.exp(-e * z),
                    lambda z: (d[1](z) - 2 * e * d[0](z) + e * e * self.evaluator(z)) * np.exp(-e * z))
        return Multiplier(ev, ders, self.halfwidth, math.inf, f"{self.provenance}*exp(-{e}z)")


def heat(tau: float) -> Multiplier:
    """``m(z) = e^{-tau z}``."""
    tau = float(tau)
    if tau <= 0:
        raise PreconditionError("heat multiplier needs tau > 0")
    return Multiplier(
        lambda z: np.exp(-tau * z),
        (lambda z: -tau * np.exp(-tau * z), lambda z: tau * tau * np.exp(-tau * z)),
        math.inf, math.inf, f"heat:tau={tau!r}")


def resolvent(z0: complex) -> Multiplier:
    """``m(z) = (z0 - z)^{-1}``.

    ``m_n`` has poles where ``n^2 + s(1 - s) = z0``, at
    ``Re s - 1/2 = +-Re sqrt(1/4 + n^2 - z0)``.
    """
    z0 = complex(z0)

    def hw(n):
        return abs(cmath.sqrt(0.25 + n * n - z0).real)

    return Multiplier(
        lambda z: 1.0 / (z0 - z),
        (lambda z: 1.0 / (z0 - z) ** 2, lambda z: 2.0 / (z0 - z) ** 3),
        hw, 1.0, f"resolvent:z0={_fmt_complex(z0)}")


def imagpower(sigma: float) -> Multiplier:
    """``m(z) = z^{i sigma}``; the cut along ``z <= 0`` bounds the strip."""
    sigma = float(sigma)
    return Multiplier(
        lambda z: np.exp(1j * sigma * np.log(z)),
        (lambda z: 1j * sigma * np.exp((1j * sigma - 1.0) * np.log(z)),
         lambda z: 1j * sigma * (1j * sigma - 1.0) * np.exp((1j * sigma - 2.0) * np.log(z))),
        lambda n: math.sqrt(0.25 + n * n), 0.0, f"imagpower:sigma={sigma!r}")


def constant(c: complex) -> Multiplier:
    """``m(z) = c``."""
    c = complex(c)
    zero = lambda z: np.zeros(np.shape(z), dtype=complex)  # noqa: E731
    return Multiplier(lambda z: np.full(np.shape(z), c, dtype=complex), (zero, zero),
                      math.inf, math.inf if c == 0 else 0.0, "zero" if c == 0 else ("one" if c == 1 else f"const:{c!r}"))


def table(path: str, halfwidth: float = 0.5) -> Multiplier:
    """Cubic spline through a CSV table with columns ``z, re, im``.

    The spline pieces are polynomials, so they extend to complex ``z``; the
    piece is chosen from ``Re z``. Past either end the end value is held
    constant. Tabulated data cannot certify holomorphy, so ``halfwidth`` is
    a declaration by the caller. Derivatives are those of the pieces.
    """
    from scipy.interpolate import CubicSpline

    zs, vals = [], []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            try:
                zs.append(float(row[0]))
            except ValueError:
                continue  # header
            vals.append(complex(float(row[1]), float(row[2]) if len(row) > 2 else 0.0))
    if len(zs) < 4:
        raise PreconditionError("table multiplier needs at least 4 rows")
    zs = np.asarray(zs)
    order = np.argsort(zs)
    zs, vals = zs[order], np.asarray(vals)[order]
    if np.any(np.diff(zs) <= 0):
        raise PreconditionError("table abscissae must be distinct")
    spline = CubicSpline(zs, vals, bc_type="natural")
    c, knots = spline.c, spline.x

    def pieces(z):
        z = np.asarray(z, dtype=complex)
        idx = np.clip(np.searchsorted(knots, z.real, side="right") - 1, 0, len(knots) - 2)
        inside = (z.real >= knots[0]) & (z.real <= knots[-1])
        end = np.where(z.real < knots[0], 0, len(knots) - 1)
        return z - knots[idx], idx, inside, end

    def ev(z):
        dz, i, inside, end = pieces(z)
        val = ((c[0, i] * dz + c[1, i]) * dz + c[2, i]) * dz + c[3, i]
        return np.where(inside, val, vals[end])

    def d1(z):
        dz, i, inside, _ = pieces(z)
        return np.where(inside, (3.0 * c[0, i] * dz + 2.0 * c[1, i]) * dz + c[2, i], 0.0)

    def d2(z):
        dz, i, inside, _ = pieces(z)
        return np.where(inside, 6.0 * c[0, i] * dz + 2.0 * c[1, i], 0.0)

    return Multiplier(ev, (d1, d2), float(halfwidth), 0.0, f"table:{path}")


def _fmt_complex(z: complex) -> str:
    return f"{z.real!r}{'+' if z.imag >= 0 else '-'}{abs(z.imag)!r}i"


def _parse_complex(text: str) -> complex:
    t = text.strip().replace(" ", "").replace("i", "j")
    try:
        return complex(t)
    except ValueError:
        raise PreconditionError(f"cannot parse complex number {text!r}") from None


def parse_multiplier(spec: str) -> Multiplier:
    """Build a multiplier from ``family:key=value`` text.

    Examples
    --------
    >>> parse_multiplier("heat:tau=0.5")(1.0)
    array(0.60653066+0.j)
    """
    spec = spec.strip()
    family, _, rest = spec.partition(":")
    family = family.lower()
    if family in ("one", "zero"):
        return constant(1.0 if family == "one" else 0.0)
    if family == "table":
        parts = rest.split(",")
        kw = dict(p.split("=", 1) for p in parts[1:] if "=" in p)
        unknown = set(kw) - {"halfwidth"}
        if unknown or not parts[0]:
            raise PreconditionError(f"bad table multiplier spec {spec!r}")
        return table(parts[0], float(kw.get("halfwidth", 0.5)))
    kw = {}
    for part in filter(None, rest.split(",")):
        if "=" not in part:
            raise PreconditionError(f"expected key=value in {spec!r}")
        k, v = part.split("=", 1)
        kw[k.strip()] = v.strip()
    builders = {
        "heat": ("tau", lambda v: heat(float(v))),
        "resolvent": ("z0", lambda v: resolvent(_parse_complex(v))),
        "imagpower": ("sigma", lambda v: imagpower(float(v))),
    }
    if family not in builders:
        raise PreconditionError(f"unknown multiplier family {family!r}")
    key, build = builders[family]
    if set(kw) != {key}:
        raise PreconditionError(f"{family} expects exactly the parameter {key!r}, got {sorted(kw)}")
    try:
        return build(kw[key])
    except ValueError as exc:
        if isinstance(exc, PreconditionError):
            raise
        raise PreconditionError(f"bad parameter in {spec!r}: {exc}") from None


def strip_delta(p: float) -> float:
    """``delta(p) = |1/p - 1/2|``."""
    p = float(p)
    if not p > 1.0 or not math.isfinite(p):
        raise PreconditionError("p must lie in (1, inf)")
    return abs(1.0 / p - 0.5)


def mh_norm(m: Multiplier, n, p: float, lambda_max: float = 60.0, samples: int = 2001,
            max_order: int = 2) -> float:
    """Sampled Mikhlin-Hormander norm of ``m_n`` on the strip ``|Re s - 1/2| <= delta(p)``.

    ``max_{j <= max_order} sup (1 + |s|)^j |m_n^{(j)}(s)|`` over the boundary lines
    ``Re s = 1/2 +- delta`` with ``|Im s| <= lambda_max``, the real segment
    ``[1/2 - delta, 1/2 + delta]``, and far points ``|Im s|`` up to
    ``1e4 lambda_max`` that bound the tail.

    Raises
    ------
    StripTooNarrow
        ``m_n`` is not declared holomorphic on a neighbourhood of the strip.
    DerivativeUnavailable
    """
    if not is_half_integer(n):
        raise PreconditionError("K-type must be a half-integer")
    delta = strip_delta(p)
    hw = m.strip_halfwidth(n)
    if not hw > delta:
        raise StripTooNarrow(
            f"{m.provenance}: holomorphic only for |Re s - 1/2| < {hw:.6g}, strip needs {delta:.6g}",
            estimate=hw)
    y = np.linspace(-lambda_max, lambda_max, samples)
    far = lambda_max * np.logspace(0.5, 4, 15)
    y = np.concatenate([y, far, -far])
    pts = [0.5 + delta + 1j * y, 0.5 - delta + 1j * y, np.linspace(0.5 - delta, 0.5 + delta, 41) + 0j]
    s = np.concatenate(pts)
    radius = None
    if m.derivative_order_available < 2:
        gap = hw - np.abs(s.real - 0.5)
        radius = np.minimum(1e-2, 0.5 * gap) if math.isfinite(hw) else np.full(s.shape, 1e-2)
    v0, v1, v2 = m.pulled_back_derivatives(n, s, radius)
    w = 1.0 + np.abs(s)
    terms = np.stack([np.abs(v0), w * np.abs(v1), w * w * np.abs(v2)])[: max_order + 1]
    if not np.all(np.isfinite(terms)):
        raise StripTooNarrow(f"{m.provenance}: multiplier is unbounded on the strip")
    return float(terms.max())


def discrete_multiplier_sum(m: Multiplier, n) -> float:
    """``sum_{s in D_n} s |m_n(s)|``."""
    total = 0.0
    for s in discrete_set(n):
        total += s * float(abs(m.pulled_back(n, s)))
    return total

"""Invariant suite behind ``sl2harmonic check``.

Each invariant measures one quantity and compares it with a threshold. The
suite is deterministic for a given seed: no timings or addresses enter the
report.
"""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from importlib import resources
from typing import Callable

import numpy as np

from . import group as grp
from . import spherical as sph
from .errors import Sl2Error
from .kernel import synthesize_kernel
from .multipliers import constant, heat, mh_norm
from .spectrum import boundary_points, contains, par_region
from .transform import bump_profile, default_lambda_grid, forward_transform, inverse_transform, plancherel_sides

__all__ = ["CheckResult", "INVARIANTS", "load_fixtures", "run_checks"]

DEFAULT_SEED = 20240917


@dataclass(frozen=True)
class CheckResult:
    name: str
    group: str
    passed: bool
    measured: float
    threshold: float
    detail: str = ""

    @property
    def margin(self) -> float:
        return self.threshold - self.measured

    def to_dict(self) -> dict:
        d = asdict(self)
        d["margin"] = self.margin
        return d


@dataclass(frozen=True)
class Invariant:
    name: str
    group: str
    threshold: float
    measure: Callable  # (rng, fixtures) -> float


def load_fixtures(path=None) -> dict:
    """Frozen oracle values; the packaged file unless ``path`` is given."""
    if path is None:
        text = resources.files("sl2harmonic").joinpath("data/fixtures.json").read_text()
    else:
        with open(path) as fh:
            text = fh.read()
    data = json.loads(text)
    if not isinstance(data, dict) or data.get("format") != "sl2harmonic-fixtures":
        raise ValueError("not a fixture file")
    for key in ("b0", "zeta", "c_constant"):
        if key not in data:
            raise ValueError(f"fixture file lacks {key!r}")
    return data


# ---------------------------------------------------------------- measures

_N_GRID = (0.0, 0.5, 1.0, 1.5, 2.0, 3.0)
_T_GRID = np.array([0.0, 0.1, 0.5, 1.0, 2.0, 5.0])
_LAMS = (0.0, 0.5, 1.0, 2.0, 5.0, 10.0)


def _s_grid(n):
    return [0.5 + 1j * lam for lam in _LAMS] + [complex(s) for s in sph.discrete_set(n)]


def _symmetry(rng, fx):
    worst = 0.0
    for n in _N_GRID:
        for s in _s_grid(n):
            z = sph.zeta_axis(n, s, _T_GRID)
            for other in (sph.zeta_axis(n, 1 - s, _T_GRID), sph.zeta_axis(-n, s, _T_GRID),
                          sph.zeta_axis(n, s, -_T_GRID)):
                worst = max(worst, float(np.max(np.abs(z - other))))
    return worst


def _equivariance(rng, fx):
    # zeta(u_theta g u_phi) = e^{i n (theta + phi)} zeta(g)
    worst = 0.0
    for _ in range(10):
        g = grp.random_element(rng)
        th, ph = rng.uniform(0.0, grp.FOUR_PI, 2)
        for n in (0.5, 1.0, 2.5):
            for s in (0.5 + 2j, 0.8):
                lhs = sph.zeta_group(n, s, grp.u(th) @ g @ grp.u(ph))
                rhs = np.exp(1j * n * (th + ph)) * sph.zeta_group(n, s, g)
                worst = max(worst, abs(lhs - rhs))
    return worst


def _routes(rng, fx):
    worst = 0.0
    for n in _N_GRID:
        for s in _s_grid(n):
            vals = [sph.zeta_axis(n, s, _T_GRID, r) for r in ("theta_integral", "cosine_integral", "definition")]
            mask = np.array([sph.route_applicable("hyper", n, s, t) for t in _T_GRID])
            for i in range(3):
                for j in range(i + 1, 3):
                    worst = max(worst, float(np.max(np.abs(vals[i] - vals[j]))))
                if mask.any():
                    h = sph.zeta_axis(n, s, _T_GRID[mask], "hyper")
                    worst = max(worst, float(np.max(np.abs(vals[i][mask] - h))))
    return worst


def _group_paths(rng, fx):
    worst = 0.0
    for _ in range(10):
        g = grp.random_element(rng)
        for n in (0.0, 0.5, 1.0, 2.0):
            for s in (0.5 + 2j, 0.3, 1.0):
                worst = max(worst, abs(sph.zeta_group(n, s, g) - sph.zeta_group(n, s, g, "verification")))
    return worst


def _comparison(rng, fx):
    worst = -math.inf
    for n in _N_GRID:
        for s in _s_grid(n):
            z = np.abs(sph.zeta_axis(n, s, _T_GRID))
            ref = sph.zeta_axis(0, s.real, _T_GRID).real
            worst = max(worst, float(np.max(z - ref)))
    return max(worst, 0.0)


def _discrete_bound(rng, fx):
    worst = 0.0
    for n in np.arange(1.0, 5.5, 0.5):
        for s in sph.discrete_set(n):
            for t in np.linspace(0.0, 10.0, 41):
                worst = max(worst, sph.discrete_bound_ratio(n, s, t))
    return worst


def _round_trip(rng, fx):
    worst = 0.0
    for _ in range(200):
        g = grp.random_element(rng)
        m = np.array(g.entries())
        c = np.array(grp.from_cartan(grp.cartan_decompose(g)).entries())
        i = np.array(grp.from_iwasawa(grp.iwasawa_decompose(g)).entries())
        j = np.array(grp.from_iwasawa(grp.iwasawa_decompose(g, "Nbar")).entries())
        worst = max(worst, float(np.max(np.abs(c - m))), float(np.max(np.abs(i - m))),
                    float(np.max(np.abs(j - m))))
    return worst


def _inverse_t(rng, fx):
    worst = 0.0
    for _ in range(200):
        g = grp.random_element(rng)
        worst = max(worst, abs(grp.cartan_decompose(g).t - grp.cartan_decompose(g.inverse()).t))
    return worst


def _functional(rng, fx):
    worst = 0.0
    found = 0
    while found < 5:
        x, y = grp.random_element(rng), grp.random_element(rng)
        if grp.cartan_decompose(x).t > 2 or grp.cartan_decompose(y).t > 2:
            continue
        found += 1
        for n in (0.0, 0.5, 2.0):
            for s in (0.5 + 1j, 0.5 + 5j, 1.0):
                worst = max(worst, sph.functional_equation_residual(n, s, x, y))
    return worst


def _global(rng, fx):
    worst = 0.0
    for n in (0.0, 1.0, 2.0):
        for lam in (0.2, 1.0, 5.0, 10.0):
            for t in (2.0, 4.0):
                e = sph.global_expansion(n, lam, t, 60)
                err = abs(e.value - sph.zeta_axis(n, 0.5 + 1j * lam, t))
                worst = max(worst, err / e.error_estimate)
    return worst


def _c_limit(rng, fx):
    return max(sph.c_limit_residual(n, s, 30.0) for n in (0, 1, 2) for s in (0.25, 0.25 + 0.5j))


def _ode(rng, fx):
    return max(sph.jacobi_ode_residual(n, lam, t, 1e-4) / (1 + lam * lam)
               for n in (0.0, 1.0, 2.0) for lam in (0.5, 2.0) for t in (0.5, 2.0))


def _b0_fixture(rng, fx):
    return abs(sph.calibrate_b0(0) - float(fx["b0"]))


def _b0_independent(rng, fx):
    vals = [sph.calibrate_b0(n) for n in (0.0, 0.5, 1.0, 1.5, 2.0)]
    return max(vals) - min(vals)


def _zeta_fixture(rng, fx):
    worst = 0.0
    for row in fx["zeta"]:
        v = sph.zeta_axis(row["n"], complex(*row["s"]), row["t"])
        worst = max(worst, abs(v - complex(*row["value"])))
    for row in fx["c_constant"]:
        worst = max(worst, abs(sph.c_constant(row["n"], row["s"]) - row["value"]))
    return worst


def _plancherel(rng, fx):
    f = bump_profile(0.0, points=201)
    T = forward_transform(f, default_lambda_grid(step=0.1))
    lhs, rhs = plancherel_sides(f, T)
    return abs(lhs - rhs) / lhs


def _inversion(rng, fx):
    f = bump_profile(1.0)
    T = forward_transform(f, default_lambda_grid(step=0.1))
    g = inverse_transform(T, f.t_grid)
    return float(np.max(np.abs(g.values - f.values)))


def _kernel_split(rng, fx):
    K = synthesize_kernel(heat(0.5), 1.0, np.linspace(0.0, 2.0, 81))
    return float(np.count_nonzero((K.loc + K.glo) != K.cont))


def _mh_one(rng, fx):
    return abs(mh_norm(constant(1.0), 1.0, 4.0 / 3.0) - 1.0)


def _par_boundary(rng, fx):
    worst = 0.0
    for n in (0.0, 1.5):
        for p in (4.0 / 3.0, 3.0, 1.1):
            R = par_region(p, n)
            curve, _ = boundary_points(R, 201)
            d = R.delta
            lhs = curve.real - n * n
            rhs = curve.imag ** 2 / (4 * d * d) + 0.25 - d * d
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / (1 + np.abs(curve)))))
    return worst


def _par_monotone(rng, fx):
    z = rng.uniform(-2, 6, 10_000) + 1j * rng.uniform(-4, 4, 10_000)
    ps = (1.1, 1.3, 1.6, 2.0)
    violations = 0
    for n in (0.0, 1.0):
        regions = [contains(par_region(p, n), z + n * n) for p in ps]
        for wide, narrow in zip(regions[:-1], regions[1:]):
            violations += int(np.count_nonzero(narrow & ~wide))
    return float(violations)


INVARIANTS = (
    Invariant("zeta_symmetries", "symmetry", 1e-10, _symmetry),
    Invariant("k_equivariance", "symmetry", 1e-10, _equivariance),
    Invariant("cross_route_agreement", "routes", 1e-8, _routes),
    Invariant("zeta_group_paths", "routes", 1e-8, _group_paths),
    Invariant("comparison_bound_excess", "bounds", 1e-12, _comparison),
    Invariant("discrete_bound_ratio", "bounds", 1.01, _discrete_bound),
    Invariant("decomposition_round_trip", "group", 1e-10, _round_trip),
    Invariant("cartan_t_inverse", "group", 1e-10, _inverse_t),
    Invariant("functional_equation", "functional", 1e-6, _functional),
    Invariant("global_expansion_vs_estimate", "expansion", 1.0, _global),
    Invariant("c_function_limit", "expansion", 1e-5, _c_limit),
    Invariant("jacobi_ode_residual", "expansion", 1e-5, _ode),
    Invariant("b0_n_independence", "expansion", 1e-3, _b0_independent),
    Invariant("b0_fixture", "fixtures", 1e-8, _b0_fixture),
    Invariant("frozen_values", "fixtures", 1e-10, _zeta_fixture),
    Invariant("plancherel_bump", "transform", 1e-3, _plancherel),
    Invariant("inversion_bump", "transform", 1e-3, _inversion),
    Invariant("kernel_split_exact", "kernel", 0.0, _kernel_split),
    Invariant("mh_norm_of_one", "kernel", 0.0, _mh_one),
    Invariant("parabola_boundary", "spectrum", 1e-14, _par_boundary),
    Invariant("region_monotone", "spectrum", 0.0, _par_monotone),
)


def _selected(flt):
    if not flt:
        return INVARIANTS
    keys = [k.strip() for k in flt.split(",") if k.strip()]
    return tuple(inv for inv in INVARIANTS
                 if any(k == inv.group or k in inv.name for k in keys))


def run_checks(seed: int | None = None, flt: str | None = None, fixtures_path=None) -> list:
    """Run the selected invariants.

    Parameters
    ----------
    seed : int, optional
        Seed of the generator shared by the randomized invariants; the
        fixture seed when omitted.
    flt : str, optional
        Comma-separated group names or name fragments.
    fixtures_path : str, optional
        Alternative fixture file.

    Returns
    -------
    list of CheckResult
        A fixture file that cannot be read yields a failed ``fixtures_load``
        entry; the other invariants still run on the packaged values.
    """
    results = []
    try:
        fx = load_fixtures(fixtures_path)
        results.append(CheckResult("fixtures_load", "fixtures", True, 0.0, 0.0))
    except (OSError, ValueError, TypeError) as exc:
        results.append(CheckResult("fixtures_load", "fixtures", False, 1.0, 0.0, str(exc)))
        fx = None
    seed = seed if seed is not None else int((fx or {}).get("seed", DEFAULT_SEED))
    for inv in _selected(flt):
        if fx is None and inv.group == "fixtures":
            results.append(CheckResult(inv.name, inv.group, False, math.inf, inv.threshold, "no fixtures"))
            continue
        rng = np.random.default_rng([seed, len(results)])
        try:
            measured = float(inv.measure(rng, fx))
            detail = ""
        except (Sl2Error, KeyError, TypeError, ValueError) as exc:
            measured, detail = math.inf, f"{type(exc).__name__}: {exc}"
        passed = bool(measured <= inv.threshold)
        results.append(CheckResult(inv.name, inv.group, passed, measured, inv.threshold, detail))
    return results

"""Command-line front end.

Every command resolves a flat configuration record from built-in defaults,
an optional ``--config`` file and the explicit flags, in that order of
precedence. The record is written into every output: each CSV row carries
its hash and JSON output is the envelope ``{config, results, margins,
version}``. ``sl2harmonic run --config envelope.json`` repeats a run.

Exit codes: 0 success, 2 usage or precondition failure, 3 numerical-contract
failure (including failed checks).
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import io
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .checks import run_checks
from .errors import NumericalError, PreconditionError
from .group import KTypeSample
from .kernel import herz_integral, synthesize_kernel
from .multipliers import _parse_complex, discrete_multiplier_sum, mh_norm, parse_multiplier, strip_delta
from .spectrum import boundary_points, contains, par_region
from .spherical import ROUTES, global_expansion, local_leading, route_applicable, zeta_axis
from .transform import (
    FIXTURES, TransformData, default_lambda_grid, forward_transform, inverse_transform,
    plancherel_sides, tiny_bump_profile,
)

__all__ = ["main", "parse_range", "config_hash", "DEFAULTS"]

EXIT_OK, EXIT_USAGE, EXIT_NUMERICAL = 0, 2, 3

_COMMON = {"format": "csv"}

DEFAULTS = {
    "zeta eval": {"n": "0", "s": "0.5+1i", "t": "0:0.1:2", "route": "auto", "tol": 1e-8},
    "expand": {"regime": "global", "n": "0,1,2", "lam": "0.5,1,2,5", "t": None, "K": 60},
    "transform": {"mode": "roundtrip", "profile": "bump", "n": 0.0, "lambda_max": 60.0,
                  "lambda_step": 0.05, "t": None, "input": None, "tol": 1e-3},
    "kernel": {"multiplier": "heat:tau=0.5", "n": 0.0, "p": 4.0 / 3.0, "epsilon": 0.0,
               "lambda_max": 60.0, "t": "0:0.02:8", "report": None},
    "spectrum": {"p": 2.0, "n": 0.0, "points": 101, "y_max": 3.0, "cloud": 10000, "seed": 0},
    "check": {"filter": None, "seed": None, "fixtures": None},
}

# default t grids per expansion regime
_EXPAND_T = {"local": "0.05:0.05:0.5", "global": "2:1:5"}
_PROFILES = dict(FIXTURES, tiny_bump=tiny_bump_profile)


# ------------------------------------------------------------ parsing

def parse_range(text) -> np.ndarray:
    """``a:step:b`` (inclusive), a comma list, or a single number."""
    if isinstance(text, (int, float)):
        return np.array([float(text)])
    text = str(text).strip()
    try:
        if ":" in text:
            parts = [float(p) for p in text.split(":")]
            if len(parts) != 3:
                raise ValueError
            a, step, b = parts
            if step <= 0 or b < a:
                raise PreconditionError(f"empty range {text!r}")
            count = int(math.floor((b - a) / step + 1e-9))
            return a + step * np.arange(count + 1)
        vals = np.array([float(p) for p in text.split(",") if p.strip()])
    except ValueError:
        raise PreconditionError(f"cannot parse range {text!r}") from None
    if vals.size == 0:
        raise PreconditionError("empty range")
    return vals


def parse_complex_list(text) -> list:
    if isinstance(text, (int, float)):
        return [complex(text)]
    return [_parse_complex(p) for p in str(text).split(",") if p.strip()]


def config_hash(config: dict) -> str:
    """First 16 hex digits of the SHA-256 of the canonical JSON config.

    The output format does not enter the hash.
    """
    canon = json.dumps({k: v for k, v in config.items() if k != "format"},
                       sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(canon.encode()).hexdigest()[:16]


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return f"{float(v):.17g}"
    return "" if v is None else str(v)


def _json_value(v):
    if isinstance(v, (np.floating, np.integer)):
        return v.item()
    if isinstance(v, np.bool_):
        return bool(v)
    return v


# ------------------------------------------------------------ output

class Report:
    """Rows and margins of one command, rendered as CSV or JSON."""

    def __init__(self, config: dict):
        self.config = config
        self.hash = config_hash(config)
        self.rows: list = []
        self.margins: dict = {}
        self.extra: dict = {}

    def add(self, **row):
        self.rows.append(row)

    def render(self, fmt: str) -> str:
        if fmt == "json":
            env = {
                "config": self.config,
                "results": [dict({k: _json_value(v) for k, v in r.items()}, config_hash=self.hash)
                            for r in self.rows],
                "margins": {k: _json_value(v) for k, v in self.margins.items()},
                "version": __version__,
                "config_hash": self.hash,
            }
            env.update(self.extra)
            return json.dumps(env, sort_keys=True, indent=2) + "\n"
        buf = io.StringIO()
        wr = csv.writer(buf, lineterminator="\n")
        cols = list(self.rows[0]) if self.rows else []
        wr.writerow(cols + ["config_hash"])
        for r in self.rows:
            wr.writerow([_fmt(r[c]) for c in cols] + [self.hash])
        return buf.getvalue()


class ContractFailure(Exception):
    """Numerical contract violated after the report was assembled."""


# ------------------------------------------------------------ commands

def cmd_zeta_eval(cfg: dict, rep: Report):
    route = cfg["route"]
    if route not in ROUTES:
        raise PreconditionError(f"unknown route {route!r}")
    t = parse_range(cfg["t"])
    tol = _positive(cfg["tol"], "tol")
    worst = 0.0
    for n in parse_range(cfg["n"]):
        for s in parse_complex_list(cfg["s"]):
            vals = zeta_axis(n, s, t, route)
            others = [zeta_axis(n, s, t, r) for r in ROUTES if r not in ("auto", "hyper", route)]
            hyper_ok = np.array([route_applicable("hyper", n, s, x) for x in t])
            disc = np.zeros(t.shape)
            for o in others:
                disc = np.maximum(disc, np.abs(vals - o))
            if route != "hyper" and hyper_ok.any():
                disc[hyper_ok] = np.maximum(disc[hyper_ok], np.abs(vals[hyper_ok] - zeta_axis(n, s, t[hyper_ok], "hyper")))
            for x, v, d in zip(t, vals, disc):
                rep.add(n=float(n), s_re=s.real, s_im=s.imag, t=float(x), route=route,
                        re=float(v.real), im=float(v.imag), discrepancy=float(d))
            worst = max(worst, float(disc.max()))
    rep.margins.update(max_discrepancy=worst, tol=tol)
    if worst > tol:
        raise ContractFailure(f"cross-route discrepancy {worst:.3g} exceeds {tol:g}")


def cmd_expand(cfg: dict, rep: Report):
    regime = cfg["regime"]
    if regime not in _EXPAND_T:
        raise PreconditionError("regime must be local or global")
    t = parse_range(cfg["t"] or _EXPAND_T[regime])
    K = int(cfg["K"])
    worst = 0.0
    for n in parse_range(cfg["n"]):
        for lam in parse_range(cfg["lam"]):
            direct = zeta_axis(n, 0.5 + 1j * lam, t)
            for x, d in zip(t, direct):
                if regime == "global":
                    e = global_expansion(n, lam, float(x), K)
                    val, est = e.value, e.error_estimate
                else:
                    e = local_leading(n, float(lam), float(x))
                    val, est = e.value, e.estimate
                err = abs(d - val)
                worst = max(worst, err / est if est > 0 else math.inf)
                rep.add(n=float(n), lam=float(lam), t=float(x), direct_re=float(d.real),
                        direct_im=float(d.imag), expansion_re=float(val.real),
                        expansion_im=float(val.imag), abs_error=float(err), estimate=float(est))
    rep.margins.update(max_error_over_estimate=worst)
    if worst > 1.0:
        raise ContractFailure(f"observed error exceeds the attached estimate (ratio {worst:.3g})")


def _profile(name: str, n) -> KTypeSample:
    if name == "zero":
        return KTypeSample(n, np.linspace(0.0, 2.0, 401), np.zeros(401))
    if name not in _PROFILES:
        raise PreconditionError(f"unknown profile {name!r}; choose from {sorted(_PROFILES) + ['zero']}")
    return _PROFILES[name](n)


def _transform_from_envelope(path) -> TransformData:
    env = _read_json(path)
    rows = env.get("results", [])
    cont = [r for r in rows if r.get("kind") == "cont"]
    disc = {r["s"]: complex(r["re"], r["im"]) for r in rows if r.get("kind") == "disc"}
    if not cont:
        raise PreconditionError(f"{path} holds no forward-transform rows")
    n = float(env["config"]["n"])
    lam = [r["lam"] for r in cont]
    vals = [complex(r["re"], r["im"]) for r in cont]
    return TransformData(n, lam, vals, disc)


def cmd_transform(cfg: dict, rep: Report):
    mode = cfg["mode"]
    n = float(cfg["n"])
    lam = default_lambda_grid(float(cfg["lambda_max"]), float(cfg["lambda_step"]))
    tol = _positive(cfg["tol"], "tol")
    if mode == "inverse":
        if not cfg["input"]:
            raise PreconditionError("inverse needs --input with a forward-transform JSON envelope")
        T = _transform_from_envelope(cfg["input"])
        t = parse_range(cfg["t"] or "0:0.01:2")
        g = inverse_transform(T, t)
        for x, v in zip(t, g.values):
            rep.add(t=float(x), re=float(v.real), im=float(v.imag))
        rep.margins.update(tail=g.info["tail"])
        return
    f = _profile(cfg["profile"], n)
    if mode == "forward":
        T = forward_transform(f, lam)
        for x, v in zip(T.lambda_grid, T.cont_values):
            rep.add(kind="cont", lam=float(x), s=None, re=float(v.real), im=float(v.imag))
        for s, v in sorted(T.disc_values.items()):
            rep.add(kind="disc", lam=None, s=float(s), re=float(v.real), im=float(v.imag))
        return
    if mode == "roundtrip":
        t = f.t_grid if cfg["t"] is None else parse_range(cfg["t"])
        g = inverse_transform(forward_transform(f, lam), t)
        orig = f.profile(t)
        err = np.abs(g.values - orig)
        for x, a, b, e in zip(t, orig, g.values, err):
            rep.add(t=float(x), original=float(np.real(a)), recovered_re=float(b.real),
                    recovered_im=float(b.imag), abs_error=float(e))
        sup = float(err.max())
        rep.margins.update(sup_error=sup, tol=tol, tail=g.info["tail"])
        if sup > tol:
            raise ContractFailure(f"round-trip error {sup:.3g} exceeds {tol:g}")
        return
    if mode == "plancherel":
        lhs, rhs = plancherel_sides(f, forward_transform(f, lam))
        gap = abs(lhs - rhs) / lhs if lhs else abs(rhs)
        rep.add(lhs=lhs, rhs=rhs, relative_gap=gap)
        rep.margins.update(relative_gap=gap, tol=tol)
        if gap > tol:
            raise ContractFailure(f"Plancherel gap {gap:.3g} exceeds {tol:g}")
        return
    raise PreconditionError("mode must be forward, inverse, roundtrip or plancherel")


def cmd_kernel(cfg: dict, rep: Report):
    m = parse_multiplier(cfg["multiplier"])
    n, p = float(cfg["n"]), float(cfg["p"])
    strip_delta(p)
    # the holomorphy premise is checked before any synthesis work
    norm = mh_norm(m, n, p, float(cfg["lambda_max"]))
    K = synthesize_kernel(m, n, parse_range(cfg["t"]), float(cfg["epsilon"]), float(cfg["lambda_max"]))
    report = {
        "mh_norm": norm,
        "discrete_sum": discrete_multiplier_sum(m, n),
        "herz_integral": herz_integral(K, p),
        "spectral_tail": K.tail,
        "provenance": K.provenance,
    }
    for name in ("cont", "disc", "loc", "glo"):
        for x, v in zip(K.t_grid, K.component(name)):
            rep.add(t=float(x), re=float(v.real), im=float(v.imag), component=name)
    rep.margins.update({k: v for k, v in report.items() if k != "provenance"})
    rep.extra["report"] = report


def cmd_spectrum(cfg: dict, rep: Report):
    p, n = float(cfg["p"]), float(cfg["n"])
    R = par_region(p, n)
    curve, isolated = boundary_points(R, int(cfg["points"]), float(cfg["y_max"]))
    for z in curve:
        rep.add(kind="boundary", re=float(z.real), im=float(z.imag))
    for z in isolated:
        rep.add(kind="isolated", re=float(z.real), im=float(z.imag))
    vertex = n * n + 0.25 - R.delta ** 2
    # the region for half the strip width must lie inside this one
    inner = par_region(1.0 / (0.5 + R.delta / 2.0), n)
    rng = np.random.default_rng(int(cfg["seed"]))
    count = int(cfg["cloud"])
    z = n * n + rng.uniform(-2, 6, count) + 1j * rng.uniform(-4, 4, count)
    violations = int(np.count_nonzero(contains(inner, z) & ~contains(R, z)))
    rep.margins.update(delta=R.delta, vertex=vertex, vertex_in_region=bool(contains(R, vertex)),
                       inner_delta=inner.delta, monotone_violations=violations)
    if violations:
        raise ContractFailure(f"{violations} cloud points break monotone inclusion")


def cmd_check(cfg: dict, rep: Report):
    seed = None if cfg["seed"] is None else int(cfg["seed"])
    results = run_checks(seed, cfg["filter"], cfg["fixtures"])
    for r in results:
        rep.add(name=r.name, group=r.group, passed=r.passed, measured=r.measured,
                threshold=r.threshold, margin=r.margin, detail=r.detail)
    failed = [r.name for r in results if not r.passed]
    rep.margins.update(checks=len(results), failed=len(failed))
    if failed:
        raise ContractFailure("failed checks: " + ", ".join(failed))


COMMANDS = {
    "zeta eval": cmd_zeta_eval,
    "expand": cmd_expand,
    "transform": cmd_transform,
    "kernel": cmd_kernel,
    "spectrum": cmd_spectrum,
    "check": cmd_check,
}


# ------------------------------------------------------------ plumbing

def _positive(v, name):
    v = float(v)
    if not v > 0:
        raise PreconditionError(f"{name} must be positive")
    return v


def _read_json(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise PreconditionError(f"cannot read {path}: {exc}") from None


def _build_parser() -> argparse.ArgumentParser:
    S = argparse.SUPPRESS
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("csv", "json"), default=S)
    common.add_argument("--output", default=S, help="output file (stdout if omitted)")
    common.add_argument("--config", default=S, help="JSON config or envelope supplying defaults")

    ap = argparse.ArgumentParser(prog="sl2harmonic", description="Spherical analysis on SL(2,R) K-types.")
    ap.add_argument("--version", action="version", version=__version__)
    sub = ap.add_subparsers(dest="command", required=True)

    z = sub.add_parser("zeta", help="spherical function tables")
    zs = z.add_subparsers(dest="action", required=True)
    ze = zs.add_parser("eval", parents=[common], help="evaluate zeta on a grid with a cross-route discrepancy")
    ze.add_argument("--n", default=S, help="K-types, comma list or a:step:b")
    ze.add_argument("--s", default=S, help="spectral parameters, comma list, e.g. 0.5+1i")
    ze.add_argument("--t", default=S, help="t grid, a:step:b or comma list")
    ze.add_argument("--route", choices=ROUTES, default=S)
    ze.add_argument("--tol", type=float, default=S)

    e = sub.add_parser("expand", parents=[common], help="local or global expansion error tables")
    e.add_argument("regime", nargs="?", choices=("local", "global"), default=S)
    e.add_argument("--n", default=S)
    e.add_argument("--lam", default=S)
    e.add_argument("--t", default=S)
    e.add_argument("--K", type=int, default=S)

    t = sub.add_parser("transform", parents=[common], help="spherical transform, inversion, Plancherel")
    t.add_argument("mode", nargs="?", choices=("forward", "inverse", "roundtrip", "plancherel"), default=S)
    t.add_argument("--profile", default=S, help="bump, gaussian, shifted_bump, tiny_bump or zero")
    t.add_argument("--n", type=float, default=S)
    t.add_argument("--lambda-max", dest="lambda_max", type=float, default=S)
    t.add_argument("--lambda-step", dest="lambda_step", type=float, default=S)
    t.add_argument("--t", default=S)
    t.add_argument("--input", default=S, help="forward-transform JSON envelope (inverse mode)")
    t.add_argument("--tol", type=float, default=S)

    k = sub.add_parser("kernel", parents=[common], help="kernel synthesis and multiplier diagnostics")
    k.add_argument("--multiplier", default=S, help="heat:tau=, resolvent:z0=, imagpower:sigma=, table:path, one, zero")
    k.add_argument("--n", type=float, default=S)
    k.add_argument("--p", type=float, default=S)
    k.add_argument("--epsilon", type=float, default=S)
    k.add_argument("--lambda-max", dest="lambda_max", type=float, default=S)
    k.add_argument("--t", default=S)
    k.add_argument("--report", default=S, help="JSON report path (default: next to --output)")

    sp = sub.add_parser("spectrum", parents=[common], help="joint L^p spectrum boundary")
    sp.add_argument("--p", type=float, default=S)
    sp.add_argument("--n", type=float, default=S)
    sp.add_argument("--points", type=int, default=S)
    sp.add_argument("--y-max", dest="y_max", type=float, default=S)
    sp.add_argument("--cloud", type=int, default=S)
    sp.add_argument("--seed", type=int, default=S)

    c = sub.add_parser("check", parents=[common], help="run the invariant suite")
    c.add_argument("--filter", default=S, help="comma list of groups or name fragments")
    c.add_argument("--seed", type=int, default=S)
    c.add_argument("--fixtures", default=S, help="alternative fixture file")

    sub.add_parser("run", parents=[common], help="repeat a run from a JSON envelope")
    return ap


def _resolve(command: str, file_cfg: dict, flags: dict) -> dict:
    cfg = {"command": command, **_COMMON, **DEFAULTS[command]}
    for source in (file_cfg, flags):
        unknown = set(source) - set(cfg)
        if unknown:
            raise PreconditionError(f"unknown config keys for {command!r}: {sorted(unknown)}")
        cfg.update(source)
    if cfg["command"] != command:
        raise PreconditionError(f"config is for {cfg['command']!r}, not {command!r}")
    if cfg["format"] not in ("csv", "json"):
        raise PreconditionError("format must be csv or json")
    return cfg


def _load_config(path) -> dict:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise PreconditionError(f"{path} does not hold a JSON object")
    cfg = data.get("config", data)
    if not isinstance(cfg, dict):
        raise PreconditionError(f"{path}: config must be an object")
    return dict(cfg)


def _write(text: str, path):
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def main(argv=None) -> int:
    ap = _build_parser()
    try:
        args = vars(ap.parse_args(argv))
    except SystemExit as exc:
        return int(exc.code or 0)
    command = args.pop("command")
    if command == "zeta":
        command = f"zeta {args.pop('action')}"
    output = args.pop("output", None)
    try:
        file_cfg = _load_config(args.pop("config")) if "config" in args else {}
        if command == "run":
            if "command" not in file_cfg:
                raise PreconditionError("run needs --config with a 'command' entry")
            command = file_cfg["command"]
            if command not in COMMANDS:
                raise PreconditionError(f"unknown command {command!r}")
        cfg = _resolve(command, file_cfg, args)
        rep = Report(cfg)
        failure = None
        try:
            COMMANDS[command](cfg, rep)
        except ContractFailure as exc:
            failure = str(exc)
        _write(rep.render(cfg["format"]), output)
        if command == "kernel":
            report_path = cfg["report"] or (f"{output}.report.json" if output else None)
            if report_path:
                env = {"config": cfg, "results": rep.extra.get("report", {}), "margins": rep.margins,
                       "version": __version__, "config_hash": rep.hash}
                Path(report_path).write_text(json.dumps(env, sort_keys=True, indent=2) + "\n")
        if failure:
            print(f"sl2harmonic: {failure}", file=sys.stderr)
            return EXIT_NUMERICAL
        return EXIT_OK
    except PreconditionError as exc:
        print(f"sl2harmonic: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"sl2harmonic: numerical failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())

import csv
import io
import json
import subprocess
import sys

import pytest

from sl2harmonic.cli import config_hash, main, parse_range
from sl2harmonic.errors import PreconditionError


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_parse_range():
    assert list(parse_range("0:0.5:2")) == [0.0, 0.5, 1.0, 1.5, 2.0]
    assert list(parse_range("1,3")) == [1.0, 3.0]
    assert list(parse_range(2.5)) == [2.5]
    for bad in ("1:0:2", "2:1:1", "a", "1:2"):
        with pytest.raises(PreconditionError):
            parse_range(bad)


def test_config_hash_ignores_format():
    assert config_hash({"a": 1, "format": "csv"}) == config_hash({"a": 1, "format": "json"})
    assert len(config_hash({"a": 1})) == 16


def test_zeta_eval(capsys):
    code, out, _ = run(capsys, "zeta", "eval", "--n", "0", "--s", "0.5+1i", "--t", "0:0.1:2", "--route", "auto")
    assert code == 0
    table = rows(out)
    assert len(table) == 21
    assert all(float(r["discrepancy"]) <= 1e-8 for r in table)
    assert float(table[0]["re"]) == 1.0 and float(table[0]["im"]) == 0.0
    assert len({r["config_hash"] for r in table}) == 1


def test_zeta_eval_t0_rows(capsys):
    code, out, _ = run(capsys, "zeta", "eval", "--n", "0,1.5,2", "--s", "0.5+3i,1", "--t", "0,1")
    assert code == 0
    for r in rows(out):
        if float(r["t"]) == 0:
            assert float(r["re"]) == 1.0


def test_zeta_eval_hyper_out_of_range(capsys):
    code, _, err = run(capsys, "zeta", "eval", "--n", "0", "--s", "0.5+1i", "--t", "4", "--route", "hyper")
    assert code == 3
    assert "non-terminating" in err or "SeriesNonConvergence" in err


def test_zeta_eval_bad_input(capsys):
    assert run(capsys, "zeta", "eval", "--n", "0.3")[0] == 2
    assert run(capsys, "zeta", "eval", "--s", "x+y")[0] == 2
    assert run(capsys, "zeta", "eval", "--route", "magic")[0] == 2
    assert run(capsys, "nonsense")[0] == 2


@pytest.mark.parametrize("regime", ["local", "global"])
def test_expand(capsys, regime):
    code, out, _ = run(capsys, "expand", regime, "--n", "0,1,2", "--lam", "0.5,1,5")
    assert code == 0
    for r in rows(out):
        assert float(r["abs_error"]) <= float(r["estimate"])


def test_expand_exit_3_when_estimate_fails(capsys, monkeypatch):
    from sl2harmonic import cli
    from sl2harmonic.spherical import ExpansionResult, global_expansion

    def understated(n, lam, t, K):
        e = global_expansion(n, lam, t, K)
        return ExpansionResult(e.value + 1e-6, e.tail, 1e-12)

    monkeypatch.setattr(cli, "global_expansion", understated)
    code, out, err = run(capsys, "expand", "global", "--n", "1", "--lam", "1", "--t", "3")
    assert code == 3
    assert "estimate" in err
    assert len(rows(out)) == 1


def test_transform_plancherel_json(capsys):
    code, out, _ = run(capsys, "transform", "plancherel", "--profile", "bump", "--n", "1",
                       "--lambda-step", "0.1", "--format", "json")
    assert code == 0
    env = json.loads(out)
    assert set(env) >= {"config", "results", "margins", "version"}
    assert env["margins"]["relative_gap"] < 1e-3


def test_transform_zero_and_inverse(capsys, tmp_path):
    fwd = tmp_path / "fwd.json"
    code, _, _ = run(capsys, "transform", "forward", "--profile", "zero", "--n", "1",
                     "--lambda-step", "0.5", "--format", "json", "--output", str(fwd))
    assert code == 0
    code, out, _ = run(capsys, "transform", "inverse", "--input", str(fwd), "--t", "0:0.5:2")
    assert code == 0
    assert all(float(r["re"]) == 0 and float(r["im"]) == 0 for r in rows(out))


def test_transform_roundtrip(capsys):
    code, out, _ = run(capsys, "transform", "roundtrip", "--profile", "bump", "--n", "0",
                       "--lambda-step", "0.1", "--format", "json")
    assert code == 0
    assert json.loads(out)["margins"]["sup_error"] <= 1e-3


def test_transform_inverse_needs_input(capsys):
    assert run(capsys, "transform", "inverse")[0] == 2


def test_kernel_heat_report(capsys, tmp_path):
    out_path = tmp_path / "k.csv"
    code, _, _ = run(capsys, "kernel", "--multiplier", "heat:tau=0.5", "--n", "0", "--p", "3",
                     "--t", "0:0.05:6", "--output", str(out_path))
    assert code == 0
    report = json.loads((tmp_path / "k.csv.report.json").read_text())
    for key in ("mh_norm", "discrete_sum", "herz_integral"):
        assert isinstance(report["results"][key], float)
        assert report["results"][key] == report["results"][key]  # not NaN
    table = rows(out_path.read_text())
    assert {r["component"] for r in table} == {"cont", "disc", "loc", "glo"}


def test_kernel_zero_multiplier(capsys, tmp_path):
    out_path = tmp_path / "z.csv"
    code, _, _ = run(capsys, "kernel", "--multiplier", "zero", "--n", "1", "--t", "0:0.5:3",
                     "--output", str(out_path))
    assert code == 0
    assert all(float(r["re"]) == 0 and float(r["im"]) == 0 for r in rows(out_path.read_text()))
    report = json.loads((tmp_path / "z.csv.report.json").read_text())["results"]
    assert report["mh_norm"] == 0 and report["herz_integral"] == 0 and report["discrete_sum"] == 0


def test_kernel_interior_pole(capsys):
    code, _, err = run(capsys, "kernel", "--multiplier", "resolvent:z0=0.3", "--n", "0")
    assert code == 3
    assert "StripTooNarrow" in err


def test_kernel_slow_decay_needs_epsilon(capsys):
    code, _, err = run(capsys, "kernel", "--multiplier", "resolvent:z0=-1+0i", "--n", "0", "--t", "0:0.5:2")
    assert code == 3
    assert "epsilon" in err


def test_spectrum_p2(capsys):
    code, out, _ = run(capsys, "spectrum", "--p", "2", "--n", "1", "--points", "5", "--format", "json")
    assert code == 0
    env = json.loads(out)
    boundary = [r for r in env["results"] if r["kind"] == "boundary"]
    assert boundary[0]["re"] == 1.25 and boundary[0]["im"] == 0
    assert env["margins"]["vertex_in_region"] is True
    assert env["margins"]["monotone_violations"] == 0


def test_spectrum_bad_p(capsys):
    assert run(capsys, "spectrum", "--p", "1")[0] == 2


def test_check_filter(capsys):
    code, out, _ = run(capsys, "check", "--filter", "symmetry")
    assert code == 0
    assert {r["group"] for r in rows(out)} == {"fixtures", "symmetry"}


def test_check_corrupted_fixture(capsys, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run(capsys, "check", "--filter", "fixtures", "--fixtures", str(bad))
    assert code == 3


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"config": {"n": "1", "s": "0.5+2i", "t": "0:0.5:1"}}))
    code, out, _ = run(capsys, "zeta", "eval", "--config", str(cfg), "--t", "0,2", "--format", "json")
    assert code == 0
    env = json.loads(out)
    assert env["config"]["n"] == "1" and env["config"]["t"] == "0,2"
    assert [r["t"] for r in env["results"]] == [0.0, 2.0]


def test_config_unknown_key(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"bogus": 1}))
    assert run(capsys, "zeta", "eval", "--config", str(cfg))[0] == 2


def test_run_reproduces_envelope(capsys, tmp_path):
    first = tmp_path / "a.json"
    second = tmp_path / "b.json"
    assert run(capsys, "expand", "local", "--n", "1", "--lam", "2", "--format", "json", "--output", str(first))[0] == 0
    assert run(capsys, "run", "--config", str(first), "--output", str(second))[0] == 0
    assert first.read_bytes() == second.read_bytes()


def test_run_needs_command(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text("{}")
    assert run(capsys, "run", "--config", str(cfg))[0] == 2


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "sl2harmonic", "zeta", "eval", "--t", "0"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert proc.stdout.startswith("n,s_re,s_im,t,route,re,im,discrepancy,config_hash")

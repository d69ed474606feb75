import json
import subprocess
import sys

import numpy as np
import pytest

from fesinv import cli
from fesinv.cli import RunConfig, main, read_csv, read_phase_file


def write_config(path, **kw):
    cfg = {"k": 1.0, "a": 1.0, "potential": {"kind": "square-well", "depth": 1.0, "R": 1.0}}
    cfg.update(kw)
    path.write_text(json.dumps(cfg))
    return str(path)


def synth(tmp_path, name="ps.json", *extra, **cfg):
    c = write_config(tmp_path / f"{name}.cfg.json", **cfg)
    out = tmp_path / name
    assert main(["synth", "--config", c, "--out", str(out), *extra]) == 0
    return c, out


def test_zero_potential_synth(tmp_path):
    _, out = synth(tmp_path, potential={"kind": "square-well", "depth": 0.0, "R": 1.0})
    doc = json.loads(out.read_text())
    assert doc["delta"] == [0.0] * 13
    assert doc["convention"] == "principal-branch" and doc["L_max"] == 12


def test_synth_is_deterministic(tmp_path):
    _, a = synth(tmp_path, "a.json", "--seed", "5", "--noise", "1e-3")
    _, b = synth(tmp_path, "b.json", "--seed", "5", "--noise", "1e-3")
    _, c = synth(tmp_path, "c.json", "--seed", "6", "--noise", "1e-3")
    assert a.read_bytes() == b.read_bytes()
    assert a.read_bytes() != c.read_bytes()


def test_synth_square_well_closed_form(tmp_path):
    import math

    _, out = synth(tmp_path)
    d0 = read_phase_file(out)["delta"][0]
    kap = math.sqrt(2.0)
    want = -1.0 + math.atan(math.tan(kap) / kap)
    assert abs(d0 - want) <= 1e-8


def test_noise_model(tmp_path):
    _, clean = synth(tmp_path, "clean.json")
    _, noisy = synth(tmp_path, "noisy.json", "--seed", "0", "--noise", "1e-2")
    d0 = np.array(read_phase_file(clean)["delta"])
    d1 = np.array(read_phase_file(noisy)["delta"])
    z = np.random.default_rng(0).standard_normal(d0.size)
    np.testing.assert_array_equal(d1, d0 * (1 + 1e-2 * z))


def invert(tmp_path, ps, cfg, *extra, name="rec.csv"):
    out = tmp_path / name
    code = main(["invert", str(ps), "--config", cfg, "--out", str(out), *extra])
    return code, out


def test_zero_interior_inverts_to_zero(tmp_path):
    pot = {"kind": "piecewise-linear-samples", "R": 1.0, "table_r": [0.6, 0.8, 1.0], "table_q": [-1.0, -0.5, 0.0]}
    cfg, ps = synth(tmp_path, a=0.6, potential=pot)
    code, out = invert(tmp_path, ps, cfg)
    assert code == 0
    rec = read_csv(out)
    assert np.max(np.abs(rec["q_L"])) <= 1e-8


def _born(tmp_path, eps):
    pot = {"kind": "square-well", "depth": -eps, "R": 1.0}
    cfg, ps = synth(tmp_path, f"ps{eps}.json", potential=pot)
    code, out = invert(tmp_path, ps, cfg, name=f"rec{eps}.csv")
    assert code == 0
    return json.loads(cli.diagnostics_path(out).read_text()), read_csv(out)


def test_born_scaling_via_cli(tmp_path):
    d1, rec = _born(tmp_path, 0.1)
    d2, _ = _born(tmp_path, 0.2)
    assert d1["L2_err"] is not None and d1["L2_err"] <= d2["L2_err"]
    assert list(rec) == ["r", "q_true", "q_L", "abs_err"]
    np.testing.assert_array_equal(rec["q_true"], 0.1)
    np.testing.assert_allclose(rec["abs_err"], np.abs(rec["q_L"] - rec["q_true"]), rtol=1e-15)
    assert len(d1["per_l"]) == 9 and all("iterations" in p and "b" in p for p in d1["per_l"])
    assert len(d1["points"]) == 51


def test_noise_keeps_constraints(tmp_path):
    pot = {"kind": "square-well", "depth": -0.1, "R": 1.0}
    cfg, clean = synth(tmp_path, "clean.json", potential=pot)
    _, noisy = synth(tmp_path, "noisy.json", "--seed", "1", "--noise", "1e-5", potential=pot)
    _, a = invert(tmp_path, clean, cfg, name="a.csv")
    _, b = invert(tmp_path, noisy, cfg, name="b.csv")
    qa, qb = read_csv(a)["q_L"], read_csv(b)["q_L"]
    assert np.any(qa != qb)
    diag = json.loads(cli.diagnostics_path(b).read_text())
    assert diag["max_normalization_residual"] <= 1e-8


def test_csv_format(tmp_path):
    cfg, ps = synth(tmp_path, potential={"kind": "square-well", "depth": -0.05, "R": 1.0})
    _, out = invert(tmp_path, ps, cfg, "--L", "4", "--gamma", "1.5")
    lines = out.read_text().splitlines()
    assert lines[0] == "r,q_true,q_L,abs_err"
    for field in lines[5].split(","):
        assert float(field) == float(f"{float(field):.17g}")
    diag = json.loads(cli.diagnostics_path(out).read_text())
    assert diag["L"] == 4 and diag["gamma"] == 1.5


def test_invert_without_truth(tmp_path):
    cfg, ps = synth(tmp_path, potential={"kind": "square-well", "depth": -0.05, "R": 1.0})
    doc = json.loads(ps.read_text())
    del doc["potential"]
    ps.write_text(json.dumps(doc))
    code, out = invert(tmp_path, ps, cfg)
    assert code == 0
    assert out.read_text().splitlines()[0] == "r,q_L"
    assert json.loads(cli.diagnostics_path(out).read_text())["L2_err"] is None


def test_zero_truth_reports_absolute_errors(tmp_path):
    pot = {"kind": "square-well", "depth": 0.0, "R": 1.0}
    cfg, ps = synth(tmp_path, potential=pot)
    code, out = invert(tmp_path, ps, cfg)
    assert code == 0
    diag = json.loads(cli.diagnostics_path(out).read_text())
    assert diag["errors_are_absolute"] is True and diag["max_err"] == 0.0


def test_phase_file_round_trips(tmp_path):
    _, out = synth(tmp_path)
    doc = read_phase_file(out)
    again = tmp_path / "again.json"
    again.write_text(cli._dumps(doc))
    assert again.read_bytes() == out.read_bytes()


def test_forward_command(tmp_path):
    cfg = write_config(tmp_path / "c.json", L_max=4, L_invert=4)
    out = tmp_path / "fw.json"
    assert main(["forward", "--config", cfg, "--out", str(out)]) == 0
    rep = json.loads(out.read_text())
    assert [w["l"] for w in rep["waves"]] == [0, 1, 2, 3, 4]
    assert max(w["max_discrepancy"] for w in rep["waves"]) <= 1e-6


def test_check_default_passes(tmp_path, capsys):
    assert main(["check"]) == 0
    rep = json.loads(capsys.readouterr().out)
    assert rep["passed"]
    w = next(c for c in rep["checks"] if c["name"] == "wronskian_uv")
    assert w["detail"]["l0_value"] == 1.0


def test_check_coarse_tail_fails(tmp_path):
    cfg = write_config(tmp_path / "c.json", grids={"n_tail": 11})
    out = tmp_path / "report.json"
    assert main(["check", "--config", cfg, "--out", str(out)]) == 2
    rep = json.loads(out.read_text())
    rt = next(c for c in rep["checks"] if c["name"] == "tail_round_trip")
    assert not rt["passed"] and "grid-too-coarse" in rt["detail"]["error"]


def test_invert_numeric_failure_exit_code(tmp_path):
    cfg, ps = synth(tmp_path, a=0.6)
    coarse = write_config(tmp_path / "coarse.json", a=0.6, grids={"n_tail": 11})
    code, _ = invert(tmp_path, ps, coarse)
    assert code == 2


@pytest.mark.parametrize("bad", [{"k": -1.0}, {"L_invert": 20}, {"noise": -0.1}, {"a": 2.0},
                                 {"potential": {"kind": "bogus", "R": 1.0}}, {"colour": "red"},
                                 {"grids": [1, 2]}, {"k": "fast"}])
def test_config_errors_exit_1(tmp_path, bad):
    cfg = write_config(tmp_path / "bad.json", **bad)
    assert main(["synth", "--config", cfg, "--out", str(tmp_path / "x.json")]) == 1


def test_usage_errors_exit_1(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["bogus"])
    assert info.value.code == 1
    assert main(["synth", "--config", str(tmp_path / "missing.json")]) == 1


def test_schema_mismatch(tmp_path):
    cfg, ps = synth(tmp_path)
    doc = json.loads(ps.read_text())
    for broken in ({**doc, "delta": doc["delta"][:3]}, {**doc, "convention": "continuous"}, {"k": 1.0}):
        ps.write_text(json.dumps(broken))
        assert invert(tmp_path, ps, cfg)[0] == 1
    ps.write_text(json.dumps(doc))
    other_k = write_config(tmp_path / "k2.json", k=2.0)
    assert invert(tmp_path, ps, other_k)[0] == 1
    other_tail = write_config(tmp_path / "t.json", a=0.6, potential={"kind": "square-well", "depth": 2.0, "R": 1.0})
    assert invert(tmp_path, ps, other_tail)[0] == 1


def test_run_config_round_trip():
    cfg = RunConfig(a=0.7, L_invert=5, n_tail=201, noise=1e-4)
    assert RunConfig.from_dict(cfg.to_dict()) == cfg


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "fesinv", "--help"], capture_output=True, text=True)
    assert res.returncode == 0 and "synth" in res.stdout

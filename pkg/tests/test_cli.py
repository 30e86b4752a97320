import csv
import json
import math

import numpy as np
import pytest

from zcritical import cli
from zcritical import moment as mom
from zcritical.charge import csck_charge, evaluate_charge, cp1_topology
from zcritical.config import RunConfig, default_config_text
from zcritical.errors import ConfigError
from zcritical.kgeom import CP1ProfileGeometry, TorusGeometry
from zcritical.report import emit_plot_data, emit_trace, reports_document, summary_table, write_reports


def small_config(tmp_path, **replace):
    text = default_config_text()
    for old, new in replace.items():
        text = text.replace(old, new)
    path = tmp_path / "run.ini"
    path.write_text(text)
    return str(path)


def test_default_config_loads():
    cfg = RunConfig.load()
    assert cfg.seed == 7
    assert cfg.geometry("t2").n == 1 and cfg.geometry("cp1").npts == 64
    assert evaluate_charge(cfg.charge("csck1"), cp1_topology()) == evaluate_charge(csck_charge(1), cp1_topology())


def test_config_errors_name_the_key():
    with pytest.raises(ConfigError, match="geometry.nope"):
        RunConfig.load().geometry("nope")
    with pytest.raises(ConfigError, match="run"):
        RunConfig.from_text("[other]\nx = 1\n")
    cfg = RunConfig.from_text("[run]\nseed = 1\n[geometry.g]\nbackend = torus\nn = two\n")
    with pytest.raises(ConfigError, match="geometry.g.n"):
        cfg.geometry("g")
    cfg = RunConfig.from_text("[run]\nseed = 1\n[geometry.g]\nbackend = sphere\n")
    with pytest.raises(ConfigError, match="geometry.g.backend"):
        cfg.geometry("g")
    cfg = RunConfig.from_text("[run]\nseed = 1\n[charge.c]\ndimension = 1\nkind = manifold\nterms = [[1, 0, 1, [1]]]\n")
    with pytest.raises(ConfigError, match="charge.c.terms"):
        cfg.charge("c")
    with pytest.raises(ConfigError):
        RunConfig.load("/nonexistent/file.ini")


def test_grid_override_and_seeded_geometry():
    cfg = RunConfig.load()
    cfg.grid_override = 8
    assert cfg.geometry("t4").size == 8
    a, b = cfg.geometry("t2", seed=3), cfg.geometry("t2", seed=3)
    assert np.array_equal(a.potential, b.potential)
    assert not np.array_equal(a.potential, cfg.geometry("t2", seed=4).potential)
    assert not np.any(cfg.geometry("t2", flat=True).potential)


def test_charge_eval_dhym(capsys):
    assert cli.main(["charge", "eval", "--name", "dhym", "--model", "t2"]) == 0
    out = capsys.readouterr().out
    assert "Z = -i" in out and "(-0.5 pi)" in out


def test_charge_eval_cp1_and_list(capsys):
    assert cli.main(["charge", "eval", "--name", "cscK", "--model", "cp1"]) == 0
    out = capsys.readouterr().out
    assert f"{4 * math.pi:.12g}" in out
    assert cli.main(["charge", "list"]) == 0
    assert "dhym" in capsys.readouterr().out
    assert cli.main(["charge", "eval", "--name", "hym", "--model", "cp1"]) != 0


def test_missing_geometry_section(tmp_path, capsys):
    path = small_config(tmp_path, **{"[geometry.t4fine]": "[geometry.unused]"})
    code = cli.main(["verify", "--suite", "manifold", "--config", path, "--out", str(tmp_path / "o")])
    assert code != 0
    assert "geometry.t4fine" in capsys.readouterr().err


def test_bad_tol_flag(tmp_path):
    assert cli.main(["verify", "--suite", "family", "--tol", "oops", "--out", str(tmp_path)]) != 0


def _family_run(out, *extra):
    return cli.main(["verify", "--suite", "family", "--seed", "7", "--out", str(out), *extra])


def test_verify_family_outputs_and_determinism(tmp_path, capsys):
    assert _family_run(tmp_path / "a") == 0
    assert _family_run(tmp_path / "b") == 0
    a = (tmp_path / "a" / "reports.json").read_bytes()
    assert a == (tmp_path / "b" / "reports.json").read_bytes()
    doc = json.loads(a)
    assert doc["schema_version"] and doc["all_ok"] and doc["seed"] == 7
    assert "timings_s" in json.loads((tmp_path / "a" / "metadata.json").read_text())
    assert "timings" not in a.decode() and "created" not in a.decode()
    rows = list(csv.reader(open(tmp_path / "a" / "reports.csv")))
    assert rows[0][0] == "identity" and len(rows) == len(doc["reports"]) + 1
    capsys.readouterr()
    assert cli.main(["report", "--out", str(tmp_path / "a")]) == 0
    assert "all_ok=True" in capsys.readouterr().out


def test_exit_status_follows_pass_flags(tmp_path):
    assert _family_run(tmp_path / "c", "--tol", "family-moment-map=1e-14") == 1
    doc = json.loads((tmp_path / "c" / "reports.json").read_text())
    assert not doc["all_ok"]
    assert cli.main(["report", "--out", str(tmp_path / "c")]) == 1


def test_solve_dhym_writes_trace(tmp_path, capsys):
    path = small_config(tmp_path, **{"t2_grid = 64": "t2_grid = 32"})
    assert cli.main(["solve-dhym", "--model", "t2", "--config", path, "--out", str(tmp_path)]) == 0
    rows = list(csv.reader(open(tmp_path / "dhym-t2-trace.csv")))
    assert rows[0] == ["drift", "iteration", "residual"]
    assert float(rows[-1][2]) < 1e-8
    assert len(list(open(tmp_path / "dhym-t2-residual.csv"))) == 32 * 32 + 1
    assert "converged" in capsys.readouterr().out


def test_emit_plot_data(tmp_path):
    geom = TorusGeometry(1, 64)
    field = np.cos(2 * np.pi * geom.coords()[0])
    path = emit_plot_data(field, tmp_path / "t2.csv", geom.coords())
    rows = list(csv.reader(open(path)))
    assert rows[0] == ["x0", "x1", "value"] and len(rows) == 4097
    assert rows[2][:2] == ["0.0", "0.015625"]
    cp1 = CP1ProfileGeometry(64)
    rows = list(csv.reader(open(emit_plot_data(cp1.scalar_curvature, tmp_path / "cp1.csv", cp1.coords(), ["x"]))))
    assert rows[0] == ["x", "value"] and len(rows) == 65
    rows = list(csv.reader(open(emit_plot_data(np.zeros(0), tmp_path / "empty.csv"))))
    assert rows == [["x0", "value"]]
    rows = list(csv.reader(open(emit_plot_data(np.array([1 + 2j]), tmp_path / "c.csv"))))
    assert rows[0] == ["x0", "re", "im"] and rows[1] == ["0.0", "1.0", "2.0"]


def test_emit_trace_and_summary(tmp_path):
    emit_trace([], tmp_path / "t.csv")
    assert open(tmp_path / "t.csv").read() == "iteration\n"
    reps = [mom.VerificationReport("a", "x", {"sup": 0.0}, 1.0),
            mom.VerificationReport("b [control]", "x", {"sup": 2.0}, 1.0, expect_pass=False)]
    assert "2/2 reports as expected" in summary_table(reps)
    doc = reports_document(reps, 1, "all")
    assert doc["all_ok"] and doc["reports"][1]["passed"] is False
    write_reports(reps, tmp_path / "r", 1, "all", {"all": 0.1})
    assert (tmp_path / "r" / "summary.txt").exists()

import json

import pytest

from freemimo import cli
from freemimo.errors import ConvergenceError
from freemimo.experiments import (
    ExperimentConfig,
    ResultTable,
    emit,
    load_table,
    run_experiment,
)

FAST_LOSS = {"trials": 200, "gamma_db": [0.0, 20.0], "master_seed": 5}


# ---------------------------------------------------------------------------
# config validation
# ---------------------------------------------------------------------------

def test_validation_lists_every_offending_field():
    cfg = ExperimentConfig("loss-curve",
                           {"trials": -5, "beta": 2.0, "sigma2": 0.0})
    errors = cfg.validate()
    assert len(errors) == 3
    joined = " ".join(errors)
    for name in ("trials", "beta", "sigma2"):
        assert name in joined


def test_unknown_experiment_rejected():
    assert ExperimentConfig("nonsense").validate()
    with pytest.raises(ValueError):
        run_experiment(ExperimentConfig("nonsense"))


def test_gamma_grid_must_increase():
    cfg = ExperimentConfig("loss-curve", {"gamma_db": [10.0, 5.0]})
    assert any("gamma_db" in e for e in cfg.validate())


def test_config_file_roundtrip(tmp_path):
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps({
        "schema": "freemimo-config/1",
        "experiment": "deviation-sweep",
        "params": {"n": 32, "beta_list": [0.5], "trials": 10,
                   "master_seed": 3},
        "output": {"path": "out.csv", "format": "csv"},
    }))
    cfg = ExperimentConfig.from_file(str(path))
    assert cfg.experiment == "deviation-sweep"
    assert cfg.params["n"] == 32
    assert cfg.out == "out.csv"
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"schema": "other/9", "experiment": "verify"}))
    with pytest.raises(ValueError):
        ExperimentConfig.from_file(str(bad))


# ---------------------------------------------------------------------------
# experiments and tables
# ---------------------------------------------------------------------------

def test_loss_curve_columns_and_metadata():
    table = run_experiment(ExperimentConfig("loss-curve", dict(FAST_LOSS)))
    assert table.columns == ["gamma_db", "mi_ref_bits", "mr_ref_bits",
                             "mi_proj_bits", "mr_proj_bits",
                             "loss_total_bits", "stderr_bits"]
    assert len(table.rows) == 2
    assert table.metadata["master_seed"] == 5
    assert table.metadata["wall_clock_s"] is not None


def test_deviation_sweep_discrepancy_recomputable():
    cfg = ExperimentConfig("deviation-sweep",
                           {"n": 32, "beta_list": [0.25, 0.5], "trials": 20,
                            "master_seed": 2})
    table = run_experiment(cfg)
    for row in table.rows:
        vals = dict(zip(table.columns, row))
        assert vals["discrepancy_bits"] == abs(
            vals["dev_mc_bits"] - vals["dev_asymptotic_bits"])


def test_loss_convergence_rows():
    cfg = ExperimentConfig("loss-convergence",
                           {"n_list": [16, 32], "phi": 0.5, "beta": 0.75,
                            "gamma_db": 40.0, "trials": 64, "master_seed": 4})
    table = run_experiment(cfg)
    assert [row[0] for row in table.rows] == [16, 32]
    for row in table.rows:
        vals = dict(zip(table.columns, row))
        assert vals["discrepancy_bits"] == abs(
            vals["loss_mc_bits"] - vals["loss_asymptotic_bits"])


def test_product_additivity_row():
    cfg = ExperimentConfig("product-additivity",
                           {"n": 32, "m": 2, "beta": 0.5, "trials": 30,
                            "master_seed": 6})
    table = run_experiment(cfg)
    vals = dict(zip(table.columns, table.rows[0]))
    assert vals["dev_closed_form_bits"] == 1.0
    assert abs(vals["dev_product_bits"] - vals["dev_factor_sum_bits"]) < 0.2


def test_transforms_table():
    cfg = ExperimentConfig("transforms", {"family": "bernoulli", "beta": 0.5,
                                          "points": 7})
    table = run_experiment(cfg)
    assert len(table.rows) == 7
    zs = table.column("z")
    assert all(0.0 < z < 0.5 for z in zs)
    for row in table.rows:
        vals = dict(zip(table.columns, row))
        z = vals["z"]
        assert abs(vals["s_at_minus_z"] - (1.0 - z) / (0.5 - z)) < 1e-12


def test_monotonicity_flags():
    cfg = ExperimentConfig("monotonicity",
                           {"trials": 500, "gamma_db": [0.0, 10.0, 20.0],
                            "master_seed": 8})
    table = run_experiment(cfg)
    assert all(flag == 1 for flag in table.column("nondecreasing"))


# ---------------------------------------------------------------------------
# emission
# ---------------------------------------------------------------------------

def test_emit_empty_table_is_header_only(tmp_path):
    table = ResultTable(columns=["a", "b"], rows=[], metadata={})
    path = tmp_path / "empty.csv"
    emit(table, str(path), "csv")
    assert path.read_text() == "a,b\n"


def test_csv_format_plain_decimal(tmp_path):
    table = ResultTable(columns=["x", "label"],
                        rows=[[1.5, "row"], [0.125, "other"]], metadata={})
    path = tmp_path / "t.csv"
    emit(table, str(path), "csv")
    text = path.read_text()
    assert text == "x,label\n1.5,row\n0.125,other\n"


def test_json_roundtrip_bit_exact(tmp_path):
    cfg = ExperimentConfig("deviation-sweep",
                           {"n": 16, "beta_list": [0.5], "trials": 8,
                            "master_seed": 1})
    table = run_experiment(cfg)
    path = tmp_path / "t.json"
    emit(table, str(path), "json")
    again = load_table(str(path))
    assert again.columns == table.columns
    assert again.rows == table.rows
    meta_a = dict(table.metadata)
    meta_b = dict(again.metadata)
    meta_a.pop("wall_clock_s")
    meta_b.pop("wall_clock_s")
    assert meta_a == meta_b


def test_rerun_reproduces_csv_bytes(tmp_path):
    cfg = ExperimentConfig("loss-curve", dict(FAST_LOSS))
    p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
    emit(run_experiment(cfg), str(p1), "csv")
    emit(run_experiment(cfg), str(p2), "csv")
    assert p1.read_bytes() == p2.read_bytes()


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------

def test_cli_loss_curve(tmp_path, capsys):
    out = tmp_path / "fig.csv"
    code = cli.main(["loss-curve", "--gamma-db", "0:10:20", "--trials", "100",
                     "--seed", "7", "--out", str(out)])
    assert code == 0
    lines = out.read_text().splitlines()
    assert lines[0].startswith("gamma_db,")
    assert len(lines) == 4  # header + 3 grid points


def test_cli_grid_parsing():
    assert cli._parse_grid("0:2:40") == [float(v) for v in range(0, 41, 2)]
    assert cli._parse_grid("1,2.5,7") == [1.0, 2.5, 7.0]
    assert cli._parse_grid("30") == [30.0]


def test_cli_missing_out(capsys):
    code = cli.main(["loss-curve", "--trials", "10"])
    assert code == 1
    assert "--out" in capsys.readouterr().err


def test_cli_unknown_flag(capsys):
    code = cli.main(["loss-curve", "--frobnicate"])
    assert code == 1
    err = capsys.readouterr().err
    assert "usage" in err.lower()


def test_cli_validation_error(tmp_path, capsys):
    code = cli.main(["loss-curve", "--beta", "3", "--out",
                     str(tmp_path / "x.csv")])
    assert code == 1
    assert "beta" in capsys.readouterr().err


def test_cli_numeric_failure_exit_code(monkeypatch, tmp_path, capsys):
    def boom(config):
        raise ConvergenceError("synthetic")
    monkeypatch.setattr(cli, "run_experiment", boom)
    code = cli.main(["loss-curve", "--trials", "10", "--out",
                     str(tmp_path / "x.csv")])
    assert code == 2
    assert "numeric failure" in capsys.readouterr().err


def test_cli_verify_exit_codes(monkeypatch, tmp_path, capsys):
    from freemimo import acceptance

    def fake_run_all(only=None):
        res = acceptance.CriterionResult("C0", "stub")
        res.check("stub check", 0.5, 1.0)
        return [res]

    monkeypatch.setattr(acceptance, "run_all", fake_run_all)
    out = tmp_path / "report.json"
    code = cli.main(["verify", "--out", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["rows"][0]["criterion"] == "C0"
    assert report["rows"][0]["passed"] == 1
    assert "PASS C0" in capsys.readouterr().out

    def fake_run_all_fail(only=None):
        res = acceptance.CriterionResult("C0", "stub")
        res.check("stub check", 2.0, 1.0)
        return [res]

    monkeypatch.setattr(acceptance, "run_all", fake_run_all_fail)
    assert cli.main(["verify"]) == 3


def test_cli_config_file(tmp_path):
    cfg_path = tmp_path / "cfg.json"
    cfg_path.write_text(json.dumps({
        "schema": "freemimo-config/1",
        "experiment": "transforms",
        "params": {"family": "dirac", "at": 2.0, "points": 3},
        "output": {"path": str(tmp_path / "t.json"), "format": "json"},
    }))
    code = cli.main(["transforms", "--config", str(cfg_path)])
    assert code == 0
    data = json.loads((tmp_path / "t.json").read_text())
    assert len(data["rows"]) == 3
    assert all(abs(r["s_at_minus_z"] - 0.5) < 1e-12 for r in data["rows"])

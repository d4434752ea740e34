import json

import numpy as np
import pytest

import crisscross as cc
from crisscross.cli import main

from conftest import complete_dataset


@pytest.fixture()
def dataset_csv(tmp_path):
    sim = cc.simulate_dataset(cc.ScenarioConfig(cc.SECTION61_TARGET,
                                                cc.SECTION61_MECHANISM, 800, 3))
    path = tmp_path / "data.csv"
    cc.save_dataset(sim.observed, path)
    return path


def test_simulate_writes_csv(tmp_path, capsys):
    out = tmp_path / "sim.csv"
    assert main(["simulate", "--n", "500", "--seed", "4", "--out", str(out)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_total"] == 500
    assert sum(payload["pattern_counts"]) == 500
    loaded = cc.load_dataset(out)
    assert loaded.n_total == 500


def test_estimate_pseudolik(dataset_csv, capsys):
    assert main(["estimate", str(dataset_csv), "--method", "pseudolik"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["converged"]
    assert payload["theta_hat"] == pytest.approx(0.9 / 8.19, abs=0.08)
    assert payload["or_unit_contrast"]["point"] > 0


def test_estimate_gee_with_or(dataset_csv, capsys):
    assert main(["estimate", str(dataset_csv), "--method", "gee",
                 "--sigma2", "8.19"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload["estimates"]) == {"alpha", "beta"}
    assert "or_unit_contrast" in payload


def test_estimate_gee_optimal_with_known_alpha(dataset_csv, capsys):
    assert main(["estimate", str(dataset_csv), "--method", "gee", "--f",
                 "optimal", "--known", "alpha=-1.4", "--sigma2", "8.19"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert set(payload["estimates"]) == {"beta"}


def test_identify_case(capsys):
    assert main(["identify", "--case", "bivariate_normal", "--seed", "1"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["numerical_rank"] == 3
    assert len(payload["sufficient_sets"]) == 7
    assert payload["full_law"]["completeness_holds"] == "yes"


def test_identify_generic_config(tmp_path, capsys):
    cfg = {
        "family_x": "exponential", "family_y_given_x": "exponential",
        "theta": {"alpha": -1.0, "beta": [-0.5], "eta_x": [-1.0]},
        "support_points": [0.0, 1.0, 2.0, 3.0],
    }
    path = tmp_path / "cfg.json"
    path.write_text(json.dumps(cfg))
    assert main(["identify", "--config", str(path)]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["full_rank"]
    assert payload["sufficient_sets"] == [[]]
    assert payload["full_law"]["completeness_holds"] == "unknown"


def test_verify_counterexample(capsys):
    assert main(["verify-counterexample"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["observed_laws_match"]
    assert payload["target_law_variances"][0] == pytest.approx(1.0, abs=1e-6)


def test_bootstrap_command(dataset_csv, capsys):
    assert main(["bootstrap", str(dataset_csv), "--method", "pseudolik",
                 "--resamples", "25", "--seed", "2"]) == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["se"]["theta"] > 0
    assert payload["n_resamples"] == 25


def test_experiment_command(tmp_path, capsys):
    cfg = {"sweep": "sample_size", "values": [200], "replicates": 3,
           "base_seed": 9, "methods": ["pseudolik"]}
    path = tmp_path / "exp.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "summary"
    assert main(["experiment", "--config", str(path), "--out", str(out)]) == 0
    assert (tmp_path / "summary.csv").exists()
    assert (tmp_path / "summary.json").exists()


def test_exit_code_2_on_config_error():
    assert main(["experiment"]) == 2


def test_exit_code_2_optimal_without_sigma2(dataset_csv):
    assert main(["estimate", str(dataset_csv), "--method", "gee",
                 "--f", "optimal"]) == 2


def test_exit_code_3_on_missing_file():
    assert main(["estimate", "no-such-file.csv", "--method", "pseudolik"]) == 3


def test_exit_code_3_on_data_error(tmp_path):
    bad = tmp_path / "bad.csv"
    bad.write_text("x,y,r_x,r_y\n1.5,,1,1\n")
    assert main(["estimate", str(bad), "--method", "pseudolik"]) == 3


def test_exit_code_4_on_numerical_failure(tmp_path):
    sep = tmp_path / "sep.csv"
    data = complete_dataset([0.0, 1.0, 2.0], [0.0, 1.0, 2.0])
    cc.save_dataset(data, sep)
    assert main(["estimate", str(sep), "--method", "pseudolik"]) == 4


def test_csv_validation_messages(tmp_path):
    cases = {
        "1.5,2.0,1,1\n": None,                    # valid complete row
        ",2.0,0,1\n": None,                       # valid x-missing row
        "1.5,,1,1\n": "y absent but r_y=1",
        ",2.0,1,1\n": "x absent but r_x=1",
        "1.5,2.0,0,1\n": "x present but r_x=0",
        "1.5,zz,1,1\n": "malformed numeric",
    }
    for row, msg in cases.items():
        path = tmp_path / "case.csv"
        path.write_text("x,y,r_x,r_y\n" + row)
        if msg is None:
            cc.load_dataset(path)
        else:
            with pytest.raises(cc.DataError) as exc:
                cc.load_dataset(path)
            assert ":2:" in str(exc.value)

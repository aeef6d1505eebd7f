import json

import numpy as np
import pytest

from periodrecon import ExperimentConfig, TooFewPoints, reconstruct, run_experiment, sample_cloud
from periodrecon.pipeline import (RESULT_COLUMNS, box_columns, box_columns_csv, read_results,
                                  signal_from_spec)
from periodrecon.sampler import NoiseModel


def small_config(**kw):
    base = dict(d_values=[3], n_values=[2000, 4000], trials=3, master_seed=7)
    base.update(kw)
    return ExperimentConfig(**base)


def test_ten_points_fail_in_curve_stage(chirp):
    cloud = sample_cloud(chirp, 0.39, 3, 10, NoiseModel(0.02), seed=0)
    with pytest.raises(TooFewPoints) as info:
        reconstruct(cloud, 0.1)
    assert info.value.stage == "curve"
    assert str(info.value).startswith("[curve]")


@pytest.fixture(scope="module")
def small_run():
    return run_experiment(small_config())


def test_cells_times_trials_rows(small_run):
    assert len(small_run.rows) == 6
    assert len(small_run.summary) == 2
    assert [(r["n"], r["trial"]) for r in small_run.rows] == [
        (n, i) for n in (2000, 4000) for i in range(3)]
    for s in small_run.summary:
        assert s["trials"] == 3
        ok = s["trials"] - s["failures"]
        if ok:
            assert s["eps_2_min"] <= s["eps_2_q1"] <= s["eps_2_median"] <= s["eps_2_q3"] \
                <= s["eps_2_max"]


def test_results_csv_is_reproducible(small_run):
    again = run_experiment(small_config())
    assert again.results_csv() == small_run.results_csv()
    assert again.summary_csv() == small_run.summary_csv()


def test_parallel_run_matches_serial(small_run):
    parallel = run_experiment(small_config(workers=2))
    assert parallel.results_csv() == small_run.results_csv()


def test_trials_are_independent_of_the_sweep(small_run):
    # A single-cell run reproduces the same trials of the larger sweep.
    alone = run_experiment(small_config(n_values=[4000], trials=2))
    assert alone.rows == small_run.rows[3:5]


def test_failures_become_rows(tmp_path):
    cfg = small_config(n_values=[200], trials=2, results_path=str(tmp_path / "r.csv"),
                       summary_path=str(tmp_path / "s.csv"))
    res = run_experiment(cfg)
    assert [r["failure_stage"] for r in res.rows] == ["curve", "curve"]
    assert res.summary[0]["failures"] == 2 and res.summary[0]["eps_2_median"] is None
    rows = read_results(tmp_path / "r.csv")
    assert list(rows[0]) == list(RESULT_COLUMNS)
    assert rows[0]["failure"] and rows[0]["eps_2"] == ""
    assert (tmp_path / "s.csv").read_text().startswith("d,n,trials,failures")


def test_config_round_trip(tmp_path):
    cfg = small_config(sigma=0.01, radius_rule="absolute", radius=0.08)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(cfg.to_dict()))
    back = ExperimentConfig.load(path)
    assert back == cfg
    assert back.radius_value() == 0.08


@pytest.mark.parametrize("bad", [dict(tau_ratio=0.5), dict(trials=0), dict(n_values=[]),
                                 dict(radius_rule="delta", quantization=0.0)])
def test_invalid_configs_rejected(bad):
    with pytest.raises(ValueError):
        small_config(**bad)


def test_signal_specs():
    assert signal_from_spec("chirp-like").peak_to_peak == pytest.approx(4.0)
    s = signal_from_spec({"type": "sine", "period": 2.0, "amplitude": 3.0})
    assert s.evaluate(0.5) == pytest.approx(3.0)
    doc = {"type": "fourier", "period": 1.0, "coefficients": [[1, 0.0, 1.0]]}
    assert signal_from_spec(doc).evaluate(0.25) == pytest.approx(1.0)


def test_box_columns(small_run, tmp_path):
    path = tmp_path / "r.csv"
    path.write_text(small_run.results_csv())
    rows = read_results(path)
    cols = box_columns(rows, "eps_2")
    assert list(cols) == ["d=3 n=2000", "d=3 n=4000"]
    ok = [r for r in small_run.rows if r["n"] == 4000 and not r["failure_stage"]]
    assert cols["d=3 n=4000"] == [r["eps_2"] for r in ok]
    assert box_columns_csv(rows, "eps_2").splitlines()[0] == "d=3 n=2000,d=3 n=4000"


@pytest.fixture(scope="module")
def n_sweep():
    cfg = ExperimentConfig(d_values=[3], n_values=[2000, 4000, 16000], trials=8, workers=4,
                           master_seed=11)
    return run_experiment(cfg).summary


def test_waveform_error_falls_with_n(n_sweep):
    medians = [s["eps_2_median"] for s in n_sweep]
    assert medians[0] > medians[1] > medians[2]


def test_density_error_rate(n_sweep):
    n = np.array([s["n"] for s in n_sweep], dtype=float)
    err = np.array([s["density_err_median"] for s in n_sweep])
    slope = np.polyfit(np.log(n), np.log(err), 1)[0]
    assert -0.5 <= slope <= -0.2

import csv
import io

import numpy as np
import pytest

from btlrank.errors import ValidationError
from btlrank.experiments import (
    BASE_COLUMNS,
    DEFAULTS,
    ExperimentConfig,
    format_value,
    run_experiment,
    summarize,
    trial_seed,
)


def rows_of(result):
    return list(csv.DictReader(io.StringIO(result.to_csv())))


def test_format_value():
    assert format_value(None) == "NA"
    assert format_value(float("nan")) == "NA"
    assert format_value(0.1) == "0.10000000000000001"
    assert format_value(3) == "3"
    assert format_value("ok") == "ok"


def test_trial_seeds_differ():
    states = {tuple(trial_seed(0, s, t).generate_state(2)) for s in range(3) for t in range(3)}
    assert len(states) == 9


def test_config_validation():
    with pytest.raises(ValidationError):
        ExperimentConfig("no-such-experiment")
    with pytest.raises(ValidationError):
        ExperimentConfig("path-L-sweep", trials=0)
    with pytest.raises(ValidationError):
        ExperimentConfig("path-L-sweep", params={"bogus": 1})


@pytest.mark.parametrize(
    "experiment_id, sweep",
    [
        ("island-additivity", (1,)),
        ("barbell-ratio", (20,)),
        ("banded-compare", (30,)),
        ("path-L-sweep", (100,)),
        ("barbell-additivity", (1,)),
    ],
)
def test_reruns_are_byte_identical(experiment_id, sweep, monkeypatch):
    cfg = ExperimentConfig(experiment_id, trials=2, seed=42, sweep=sweep)
    monkeypatch.setenv("BTLRANK_THREADS", "1")
    first = run_experiment(cfg).to_csv()
    monkeypatch.setenv("BTLRANK_THREADS", "3")
    second = run_experiment(cfg).to_csv()
    assert first == second
    header = first.splitlines()[0].split(",")
    assert header[: len(BASE_COLUMNS)] == BASE_COLUMNS
    assert "runtime_s" not in header


def test_seed_changes_output():
    a = run_experiment(ExperimentConfig("path-L-sweep", trials=2, seed=1, sweep=(100,))).to_csv()
    b = run_experiment(ExperimentConfig("path-L-sweep", trials=2, seed=2, sweep=(100,))).to_csv()
    assert a != b


def test_timing_column_opt_in():
    res = run_experiment(ExperimentConfig("path-L-sweep", trials=1, sweep=(100,), timing=True))
    assert res.columns[-1] == "runtime_s"
    assert res.rows[0]["runtime_s"] >= 0


def test_island_noise_free_limit():
    res = run_experiment(
        ExperimentConfig("island-additivity", trials=1, sweep=(0,), params={"L": 1_000_000})
    )
    assert np.all(res.column("linf_error") < 0.05)


def test_barbell_ratio_rows():
    res = run_experiment(ExperimentConfig("barbell-ratio", trials=2, seed=3, sweep=(30, 60)))
    for r in res.rows:
        assert r["status"] == "ok"
        assert r["ratio"] == pytest.approx(r["bound_linf"] / r["bound_yan"])
        assert r["linf_error"] <= 5


def test_banded_columns():
    res = run_experiment(ExperimentConfig("banded-compare", trials=1, sweep=(50, 100)))
    for r in res.rows:
        assert r["k"] < r["n"] - 1
        assert r["kappa_E"] < r["kappa"]
        assert r["bound_l2_kappa_E"] < r["bound_l2_kappa"]


def test_band_rule_validated():
    res = run_experiment(ExperimentConfig("banded-compare", trials=1, sweep=(30,), params={"band": "cubic"}))
    assert res.rows[0]["status"] == "failed:ValidationError"


def test_path_sweep_medians_fall():
    res = run_experiment(ExperimentConfig("path-L-sweep", trials=10, seed=0))
    med = [np.nanmedian(res.column("linf_error", sweep=L)) for L in DEFAULTS["path-L-sweep"]["sweep"]]
    assert med[2] < med[0]
    assert "iterations" not in res.columns


def test_nonexistent_mle_becomes_failure_row():
    res = run_experiment(ExperimentConfig("path-L-sweep", trials=3, sweep=(1,)))
    assert [r["status"] for r in res.rows] == ["mle-nonexistent"] * 3
    parsed = rows_of(res)
    assert parsed[0]["linf_error"] == "NA"


def test_summarize():
    res = run_experiment(ExperimentConfig("path-L-sweep", trials=4, sweep=(1, 1000)))
    summ = summarize(res)
    by_sweep = {r["sweep"]: r for r in summ.rows}
    assert by_sweep[1]["trials_ok"] == 0 and by_sweep[1]["trials_failed"] == 4
    ok = by_sweep[1000]
    assert ok["trials_ok"] == 4
    errs = res.column("linf_error", sweep=1000)
    assert ok["linf_mean"] == pytest.approx(errs.mean())
    assert ok["linf_q50"] == pytest.approx(np.quantile(errs, 0.5))

import csv

import pytest
from pydantic import ValidationError

from bench_service import (
    REPORT_FIELDS,
    BenchConfig,
    BenchReport,
    run_benchmark,
    run_sweep,
    time_vs_actions,
    write_csv,
)
from dataset_service import Difficulty, generate_dataset
from provider_service import ProviderConfig, ProviderKind
from scenarios import household_domain, household_state


@pytest.fixture
def suite(kitchen, near_fridge):
    return generate_dataset(kitchen, 4, Difficulty.EASY, seed=3, base_state=near_fridge)


def test_oracle_suite(kitchen, suite):
    settings = BenchConfig(algorithms=["obtea", "hbtp-o", "hbtp-s"], workers=1, progress=False)
    report = run_benchmark(kitchen, suite, settings)
    assert len(report.records) == 12
    assert all(r["outcome"] == "solved" and r["verified"] for r in report.records)
    by_task = {}
    for r in report.records:
        by_task.setdefault(r["task_id"], {})[r["algorithm"]] = r
    for task in suite:
        runs = by_task[task.id]
        assert runs["obtea"]["total_cost"] == runs["hbtp-o"]["total_cost"] == task.optimal_cost

    row = report.row("hbtp-o")
    assert row["runs"] == 4
    assert row["sr_nf"] == 1.0
    assert row["errors"] == 0


def test_records_are_reproducible_across_workers(kitchen, suite):
    provider = ProviderConfig(kind=ProviderKind.MOCK, correct_rate=0.5, error_rate=0.2, seed=9)
    serial = BenchConfig(algorithms=["hbtp-o", "hbtp-s"], provider=provider, repetitions=2, workers=1, progress=False)
    parallel = serial.model_copy(update={"workers": 3})
    first = run_benchmark(kitchen, suite, serial)
    second = run_benchmark(kitchen, suite, parallel)
    assert first.records == second.records
    assert first.rows() == second.rows()


def test_pruned_runs_record_rounds(kitchen, suite):
    settings = BenchConfig(algorithms=["hbtp-o"], prune=True, max_feedback=1, workers=1, progress=False)
    report = run_benchmark(kitchen, suite, settings)
    for record in report.records:
        assert record["solved_round"] == 0
        assert record["rounds"][0]["outcome"] == "solved"
        assert record["actions"] <= len(kitchen.actions)


def test_bench_config_validation():
    with pytest.raises(ValidationError):
        BenchConfig(algorithms=["astar"])
    with pytest.raises(ValidationError):
        BenchConfig(budget=0)
    with pytest.raises(ValidationError):
        BenchConfig(repetitions=0)
    with pytest.raises(ValidationError):
        BenchConfig(max_feedback=-1)


def test_sweep_and_tables(tmp_path, kitchen, suite):
    settings = BenchConfig(workers=1, progress=False)
    rows = run_sweep(kitchen, suite, settings, correct_rates=(0.5, 1.0), error_rates=(0.0,))
    assert len(rows) == 4
    assert {r["algorithm"] for r in rows} == {"hbtp-o", "hbtp-s"}
    assert all(r["timeout_rate"] == 0.0 for r in rows)

    report = run_benchmark(kitchen, suite, settings)
    timing_rows = time_vs_actions([report])
    assert {r["actions"] for r in timing_rows} == {len(kitchen.actions)}

    path = tmp_path / "report.csv"
    write_csv(report.rows(), str(path), REPORT_FIELDS)
    with open(path, newline="", encoding="utf-8") as file:
        written = list(csv.DictReader(file))
    assert [r["algorithm"] for r in written] == sorted(settings.algorithms)
    assert list(written[0]) == REPORT_FIELDS


def _record(outcome, error=None, solved_round=None):
    return {
        "algorithm": "hbtp-o",
        "outcome": outcome,
        "error": error,
        "explored_count": 0 if error else 5,
        "total_cost": 4.0 if outcome == "solved" else None,
        "optimal_cost": 4.0,
        "solved_round": solved_round,
        "verified": outcome == "solved",
    }


def test_rates_share_one_denominator():
    report = BenchReport(
        domain="kitchen_mini",
        records=[
            _record("solved", solved_round=0),
            _record("solved", solved_round=1),
            _record("timeout"),
            _record("error", error="ProviderError: down"),
        ],
    )
    row = report.row("hbtp-o")
    assert row["runs"] == 4
    assert row["errors"] == 1
    assert row["timeout_rate"] == 0.25
    assert row["sr_nf"] == 0.25
    assert row["sr_1f"] == 0.5
    assert row["sr_nf"] + row["timeout_rate"] + row["errors"] / row["runs"] <= 1.0
    assert row["mean_explored"] == 5


def test_explored_falls_as_the_heuristic_improves():
    domain = household_domain("small")
    suite = generate_dataset(domain, 10, Difficulty.EASY, seed=4, base_state=household_state(domain, 0))
    settings = BenchConfig(workers=1, progress=False)
    rates = (0.2, 0.4, 0.6, 0.8, 1.0)
    rows = run_sweep(domain, suite, settings, correct_rates=rates, error_rates=(0.0,))
    for algorithm in ("hbtp-o", "hbtp-s"):
        curve = [r["mean_explored"] for r in sorted(rows, key=lambda r: r["correct_rate"]) if r["algorithm"] == algorithm]
        assert len(curve) == len(rates)
        assert curve[-1] < curve[0]
        assert sum(curve[3:]) / 2 <= sum(curve[:2]) / 2

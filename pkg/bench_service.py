"""
File: bench_service.py
Benchmark runner: every algorithm on every task and repetition, each solved
tree replayed through the simulator, aggregated into per-algorithm rows.
Also the correct/error-rate sweep and the planning-time against |A| table.

Run records and report CSVs carry no wall-clock columns; timing goes to its
own CSV so repeated runs with the same seeds produce identical reports.
"""

import csv
import logging
import random
import statistics
import time
from concurrent.futures import ProcessPoolExecutor, as_completed
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

from pydantic import BaseModel, field_validator
from tqdm import tqdm

import config
from dataset_service import TaskRecord
from domain_model import Domain
from feedback_service import DEFAULT_K, plan_with_feedback
from heuristics import DEFAULT_ALPHA
from planner_service import ALGORITHM_NAMES, Outcome, run_algorithm
from provider_service import MockProvider, ProviderConfig, ProviderKind, ReasoningProvider, make_provider
from simulator import simulate_execution

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SWEEP_CORRECT_RATES = (0.2, 0.4, 0.6, 0.8, 1.0)
SWEEP_ERROR_RATES = (0.0, 0.2, 0.4)
HEURISTIC_ALGORITHMS = ("hbtp-o", "hbtp-s")

REPORT_FIELDS = [
    "domain", "algorithm", "runs", "solved", "errors", "mean_explored", "timeout_rate",
    "mean_cost", "mean_optimal_cost", "sr_nf", "sr_1f", "sr_3f",
]
TIMING_FIELDS = ["domain", "task_id", "algorithm", "repetition", "actions", "elapsed", "provider_elapsed"]


class BenchConfig(BaseModel):
    algorithms: List[str] = ["obtea", "hbtp-o", "hbtp-s"]
    provider: ProviderConfig = ProviderConfig()
    budget: float = config.BUDGET_MS / 1000.0
    repetitions: int = 1
    alpha: float = DEFAULT_ALPHA
    prune: bool = False
    max_feedback: int = 3
    k: int = DEFAULT_K
    guard: str = "standard"
    workers: int = max(1, config.WORKERS)
    serial: bool = False
    progress: bool = True

    @field_validator("algorithms")
    @classmethod
    def check_algorithms(cls, v: List[str]) -> List[str]:
        unknown = [a for a in v if a not in ALGORITHM_NAMES]
        if unknown or not v:
            raise ValueError(f"algorithms must be drawn from {', '.join(ALGORITHM_NAMES)}; got {v}")
        return v

    @field_validator("budget")
    @classmethod
    def check_budget(cls, v: float) -> float:
        if v <= 0:
            raise ValueError("budget must be > 0")
        return v

    @field_validator("repetitions", "workers")
    @classmethod
    def check_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be >= 1")
        return v

    @field_validator("max_feedback")
    @classmethod
    def check_feedback(cls, v: int) -> int:
        if v < 0:
            raise ValueError("max_feedback must be >= 0")
        return v


@dataclass
class BenchReport:
    domain: str
    records: List[Dict[str, Any]] = field(default_factory=list)
    timings: List[Dict[str, Any]] = field(default_factory=list)

    def rows(self) -> List[Dict[str, Any]]:
        """One aggregate row per algorithm, recomputed from the run records."""
        rows = []
        for algorithm in sorted({r["algorithm"] for r in self.records}):
            runs = [r for r in self.records if r["algorithm"] == algorithm]
            ok = [r for r in runs if r["error"] is None]
            solved = [r for r in ok if r["outcome"] == Outcome.SOLVED.value]
            rows.append(
                {
                    "domain": self.domain,
                    "algorithm": algorithm,
                    "runs": len(runs),
                    "solved": len(solved),
                    "errors": len(runs) - len(ok),
                    "mean_explored": _mean([r["explored_count"] for r in ok]),
                    "timeout_rate": _rate(runs, lambda r: r["outcome"] == Outcome.TIMEOUT.value),
                    "mean_cost": _mean([r["total_cost"] for r in solved]),
                    "mean_optimal_cost": _mean([r["optimal_cost"] for r in solved if r["optimal_cost"] is not None]),
                    "sr_nf": _rate(runs, lambda r: _solved_within(r, 0)),
                    "sr_1f": _rate(runs, lambda r: _solved_within(r, 1)),
                    "sr_3f": _rate(runs, lambda r: _solved_within(r, 3)),
                }
            )
        return rows

    def row(self, algorithm: str) -> Dict[str, Any]:
        return next(r for r in self.rows() if r["algorithm"] == algorithm)


def _mean(values: Sequence[float]) -> Optional[float]:
    return round(statistics.mean(values), 6) if values else None


def _rate(records: Sequence[Dict[str, Any]], predicate) -> Optional[float]:
    return round(sum(1 for r in records if predicate(r)) / len(records), 6) if records else None


def _solved_within(record: Dict[str, Any], rounds: int) -> bool:
    return record["solved_round"] is not None and record["solved_round"] <= rounds and record["verified"]


def _task_seed(base: int, task_id: str, repetition: int) -> int:
    return random.Random(f"{base}:{task_id}:{repetition}").randrange(2**31)


def _provider_for(settings: BenchConfig, shared: ReasoningProvider, task_id: str, repetition: int) -> ReasoningProvider:
    """Mock perturbations are seeded per task and repetition, shared by every algorithm."""
    p = settings.provider
    if p.kind == ProviderKind.MOCK:
        return MockProvider(p.correct_rate, p.error_rate, _task_seed(p.seed, task_id, repetition), p.oracle_max_states)
    return shared


def _run_one(
    domain: Domain,
    task: TaskRecord,
    algorithm: str,
    repetition: int,
    settings: BenchConfig,
    provider: ReasoningProvider,
) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    problem = task.problem(domain)
    record: Dict[str, Any] = {
        "task_id": task.id,
        "difficulty": task.difficulty.value,
        "algorithm": algorithm,
        "repetition": repetition,
        "optimal_cost": task.optimal_cost,
        "error": None,
    }
    timing = {
        "domain": domain.name,
        "task_id": task.id,
        "algorithm": algorithm,
        "repetition": repetition,
        "actions": len(domain.actions),
        "elapsed": None,
        "provider_elapsed": None,
    }
    try:
        if settings.prune:
            result, log = plan_with_feedback(
                problem,
                provider,
                algorithm,
                max_rounds=settings.max_feedback,
                budget=settings.budget,
                k=settings.k,
                alpha=settings.alpha,
                guard=settings.guard,
            )
            record["rounds"] = log.to_dict(include_timing=False)["rounds"]
            record["actions"] = log.rounds[-1].sizes["actions"]
            timing["elapsed"] = round(sum(r.elapsed for r in log.rounds), 6)
        else:
            p_hat: Tuple[str, ...] = ()
            if algorithm in HEURISTIC_ALGORITHMS:
                started = time.monotonic()
                p_hat = provider.reason(problem).path
                timing["provider_elapsed"] = round(time.monotonic() - started, 6)
            result = run_algorithm(
                algorithm, problem, p_hat, settings.alpha, settings.budget, settings.guard, record_trace=False
            )
            record["actions"] = len(domain.actions)
            timing["elapsed"] = round(result.elapsed, 6)

        trace = simulate_execution(result.tree, problem.s0) if result.solved else None
        record.update(result.to_record(include_timing=False, include_trace=False))
        record["verified"] = trace.succeeded if trace is not None else False
        record["solved_round"] = result.feedback_rounds if result.solved else None
        if result.solved and not record["verified"]:
            logger.error(f"Solved tree for {task.id} with {algorithm} failed execution: {trace.error}")
    except Exception as e:
        logger.error(f"Error running {algorithm} on {task.id}: {str(e)}")
        record.update(
            {"outcome": "error", "explored_count": 0, "total_cost": None, "verified": False, "solved_round": None}
        )
        record["error"] = f"{type(e).__name__}: {str(e)}"
    return record, timing


# worker-process state, set once per process by _init_worker
_WORKER: Dict[str, Any] = {}


def _init_worker(domain: Domain, settings: BenchConfig) -> None:
    _WORKER["domain"] = domain
    _WORKER["settings"] = settings
    _WORKER["provider"] = make_provider(settings.provider)


def _run_job(task: TaskRecord, algorithm: str, repetition: int) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    settings: BenchConfig = _WORKER["settings"]
    provider = _provider_for(settings, _WORKER["provider"], task.id, repetition)
    return _run_one(_WORKER["domain"], task, algorithm, repetition, settings, provider)


def run_benchmark(
    domain: Domain,
    dataset: Sequence[TaskRecord],
    settings: BenchConfig,
    provider: Optional[ReasoningProvider] = None,
) -> BenchReport:
    """
    Per-task failures are recorded in the rows; the suite always completes.
    With more than one worker each job runs in its own process, which builds
    its provider from settings; an explicit provider instance forces a serial run.
    """
    jobs = [
        (task, algorithm, rep)
        for task in dataset
        for algorithm in settings.algorithms
        for rep in range(settings.repetitions)
    ]
    results: List[Tuple[Dict[str, Any], Dict[str, Any]]] = []
    progress = tqdm(total=len(jobs), desc=f"bench {domain.name}", disable=not settings.progress)

    serial = settings.serial or settings.workers == 1 or provider is not None
    if serial:
        shared = provider if provider is not None else make_provider(settings.provider)
        for task, algorithm, rep in jobs:
            job_provider = _provider_for(settings, shared, task.id, rep)
            results.append(_run_one(domain, task, algorithm, rep, settings, job_provider))
            progress.update(1)
    else:
        with ProcessPoolExecutor(
            max_workers=settings.workers, initializer=_init_worker, initargs=(domain, settings)
        ) as executor:
            futures = [executor.submit(_run_job, *job) for job in jobs]
            for future in as_completed(futures):
                results.append(future.result())
                progress.update(1)
    progress.close()

    # completion order varies with workers; records are sorted back into job order
    order = {name: i for i, name in enumerate(settings.algorithms)}
    results.sort(key=lambda rt: (rt[0]["task_id"], order[rt[0]["algorithm"]], rt[0]["repetition"]))
    report = BenchReport(domain=domain.name, records=[r for r, _ in results], timings=[t for _, t in results])
    logger.info(f"Benchmark on {domain.name}: {len(jobs)} runs, {sum(r['error'] is not None for r in report.records)} errors")
    return report


def run_sweep(
    domain: Domain,
    dataset: Sequence[TaskRecord],
    settings: BenchConfig,
    correct_rates: Sequence[float] = SWEEP_CORRECT_RATES,
    error_rates: Sequence[float] = SWEEP_ERROR_RATES,
) -> List[Dict[str, Any]]:
    """Mean explored conditions per (algorithm, correct rate, error rate) cell with the mock provider."""
    rows = []
    for error_rate in error_rates:
        for correct_rate in correct_rates:
            provider = settings.provider.model_copy(
                update={"kind": ProviderKind.MOCK, "correct_rate": correct_rate, "error_rate": error_rate}
            )
            cell = settings.model_copy(
                update={"provider": provider, "algorithms": list(HEURISTIC_ALGORITHMS), "prune": False}
            )
            report = run_benchmark(domain, dataset, cell)
            for row in report.rows():
                explored = [r["explored_count"] for r in report.records if r["algorithm"] == row["algorithm"]]
                rows.append(
                    {
                        "domain": domain.name,
                        "algorithm": row["algorithm"],
                        "correct_rate": correct_rate,
                        "error_rate": error_rate,
                        "mean_explored": row["mean_explored"],
                        "var_explored": round(statistics.pvariance(explored), 6) if explored else None,
                        "timeout_rate": row["timeout_rate"],
                    }
                )
    return rows


def time_vs_actions(reports: Sequence[BenchReport]) -> List[Dict[str, Any]]:
    """Mean planning time and explored count per algorithm against action-space size."""
    rows = []
    for report in reports:
        for algorithm in sorted({t["algorithm"] for t in report.timings}):
            timings = [t for t in report.timings if t["algorithm"] == algorithm and t["elapsed"] is not None]
            explored = [r["explored_count"] for r in report.records if r["algorithm"] == algorithm]
            rows.append(
                {
                    "domain": report.domain,
                    "actions": report.timings[0]["actions"] if report.timings else 0,
                    "algorithm": algorithm,
                    "mean_time": _mean([t["elapsed"] for t in timings]),
                    "mean_explored": _mean(explored),
                }
            )
    return rows


def write_csv(rows: Sequence[Dict[str, Any]], path: str, fields: Optional[Sequence[str]] = None) -> None:
    fieldnames = list(fields) if fields is not None else (list(rows[0]) if rows else [])
    with open(path, "w", newline="", encoding="utf-8") as file:
        writer = csv.DictWriter(file, fieldnames=fieldnames, extrasaction="ignore", lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)

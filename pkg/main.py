"""
File: main.py
Command-line entry point: plan, exec, gen, bench and oracle.

Machine-readable results go to stdout (JSON) or to the --out files; progress
and summaries are printed with rich on stderr. Exit codes: 0 success,
1 planning or execution failure, 2 usage error, 3 input error, 4 provider error.
"""

import functools
import json
import logging
import os
import sys
from typing import Any, Callable, Dict, List, Optional, Tuple

import click
from pydantic import ValidationError
from rich.console import Console
from rich.table import Table

import config
from behavior_tree import BTParseError, deserialize, render, serialize
from bench_service import (
    REPORT_FIELDS,
    TIMING_FIELDS,
    BenchConfig,
    BenchReport,
    run_benchmark,
    run_sweep,
    time_vs_actions,
    write_csv,
)
from dataset_service import Difficulty, InsufficientGoals, TaskRecord, generate_dataset, load_dataset, save_dataset
from domain_model import Domain, DomainError, PlanningProblem, State, make_condition
from domain_parser import load_domain, load_task, parse_literal, serialize_domain
from feedback_service import DEFAULT_K, EmptySpace, plan_with_feedback
from heuristics import DEFAULT_ALPHA, InvalidAlpha
from oracle_service import optimal_path
from planner_service import ALGORITHM_NAMES, PlanResult, plan_dnf, run_algorithm
from provider_service import ProviderConfig, ProviderKind, make_provider
from reasoning_parser import ProviderError
from scenarios import SIZES, household_domain, household_state
from simulator import Perturbation, simulate_execution

logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

console = Console(stderr=True)

EXIT_FAILURE = 1
EXIT_INPUT = 3
EXIT_PROVIDER = 4


class PlanningFailed(Exception):
    pass


def _fail(code: int, name: str, message: str) -> None:
    logger.error(f"Error {name}: {message}")
    click.echo(json.dumps({"error": name, "message": message}), err=True)
    sys.exit(code)


def handle_errors(command: Callable) -> Callable:
    """Maps domain exceptions to exit codes and a one-line JSON error on stderr."""

    @functools.wraps(command)
    def wrapper(*args, **kwargs):
        try:
            return command(*args, **kwargs)
        except PlanningFailed as e:
            _fail(EXIT_FAILURE, "planning_failed", str(e))
        except (ValidationError, InvalidAlpha) as e:
            _fail(2, "usage", str(e))
        except (DomainError, BTParseError, InsufficientGoals, OSError, ValueError) as e:
            _fail(EXIT_INPUT, type(e).__name__, str(e))
        except (ProviderError, EmptySpace) as e:
            _fail(EXIT_PROVIDER, type(e).__name__, str(e))

    return wrapper


def provider_options(command: Callable) -> Callable:
    options = [
        click.option("--provider", type=click.Choice([k.value for k in ProviderKind]), default="oracle", show_default=True),
        click.option("--correct-rate", type=float, default=1.0, show_default=True, help="Mock provider: share of p* kept."),
        click.option("--error-rate", type=float, default=0.0, show_default=True, help="Mock provider: share of injected actions."),
        click.option("--seed", type=int, default=0, show_default=True),
        click.option("--max-retries", type=int, default=3, show_default=True, help="LLM provider: re-queries after grammar violations."),
    ]
    for option in reversed(options):
        command = option(command)
    return command


def _provider_config(provider: str, correct_rate: float, error_rate: float, seed: int, max_retries: int) -> ProviderConfig:
    return ProviderConfig.from_env(
        ProviderKind(provider),
        correct_rate=correct_rate,
        error_rate=error_rate,
        seed=seed,
        max_retries=max_retries,
        replay_only=bool(config.LLM_CACHE) and not config.LLM_KEY,
    )


def _scenario_domain(scenario: str, seed: int) -> Tuple[Domain, State]:
    domain = household_domain(scenario)
    return domain, household_state(domain, seed)


@click.group()
@click.option("--log-level", default=None, help="Overrides HBTP_LOG_LEVEL.")
def cli(log_level: Optional[str]) -> None:
    """Heuristic behavior tree planning toolkit."""
    config.configure_logging(log_level)


@cli.command()
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", "task_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--algo", type=click.Choice(ALGORITHM_NAMES), default="hbtp-o", show_default=True)
@click.option("--alpha", type=float, default=DEFAULT_ALPHA, show_default=True)
@provider_options
@click.option("--budget-ms", type=int, default=config.BUDGET_MS, show_default=True)
@click.option("--prune", is_flag=True, help="Plan in the action space pruned from the provider's reasoning.")
@click.option("--max-feedback", type=int, default=0, show_default=True, help="Feedback rounds (implies --prune when > 0).")
@click.option("--k-summary", type=int, default=DEFAULT_K, show_default=True)
@click.option("--guard", type=click.Choice(["standard", "compat"]), default="standard", show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), default="bt.json", show_default=True)
@click.option("--records", type=click.Path(dir_okay=False), default=None, help="Append run records to this JSON-lines file.")
@click.option("--show", is_flag=True, help="Print the tree as indented text.")
@handle_errors
def plan(
    domain_path, task_path, algo, alpha, provider, correct_rate, error_rate, seed, max_retries,
    budget_ms, prune, max_feedback, k_summary, guard, out, records, show,
) -> None:
    """Plan a behavior tree for a task and write it as JSON."""
    domain = load_domain(domain_path)
    task = load_task(task_path, domain)
    settings = _provider_config(provider, correct_rate, error_rate, seed, max_retries)
    reasoner = make_provider(settings)
    budget = budget_ms / 1000.0
    feedback_logs: List[Dict[str, Any]] = []

    def plan_one(problem: PlanningProblem) -> PlanResult:
        if prune or max_feedback > 0:
            result, log = plan_with_feedback(
                problem, reasoner, algo, max_feedback, budget, k_summary, alpha, guard
            )
            feedback_logs.append(log.to_dict())
            return result
        p_hat = reasoner.reason(problem).path if algo.startswith("hbtp") else ()
        return run_algorithm(algo, problem, p_hat, alpha, budget, guard)

    label = os.path.basename(task_path).split(".")[0]
    problem = task.problem(domain, label=label)
    if len(task.goals) > 1:
        tree, results = plan_dnf(problem, task.goals, plan_one)
    else:
        result = plan_one(problem)
        tree, results = result.tree, [result]

    with open(out, "w", encoding="utf-8") as file:
        file.write(serialize(tree))

    run_records = []
    for i, result in enumerate(results):
        record = result.to_record(include_trace=False)
        record.update({"domain": domain.name, "task": label, "disjunct": i})
        if feedback_logs:
            record["feedback"] = feedback_logs[i]
        run_records.append(record)
        click.echo(json.dumps(record, sort_keys=True))
    if records:
        with open(records, "a", encoding="utf-8") as file:
            for record in run_records:
                file.write(json.dumps(record, sort_keys=True) + "\n")

    if show:
        console.print(render(tree))
    solved = [r for r in results if r.solved]
    if not solved:
        raise PlanningFailed(f"{algo} did not solve {label}: {results[-1].outcome.value}")
    best = min(r.total_cost for r in solved)
    console.print(f"[green]Solved[/green] {label} with {algo}: cost {best:g}, tree written to {out}")


def _parse_perturbation(text: str) -> Perturbation:
    """STEP:+Lit(a);-Lit(b) adds and removes literals after the given step."""
    step, _, body = text.partition(":")
    add, delete = [], []
    for item in filter(None, (s.strip() for s in body.split(";"))):
        target = add if item.startswith("+") else delete
        target.append(parse_literal(item.lstrip("+-")))
    return Perturbation(int(step), make_condition(add), make_condition(delete))


@cli.command(name="exec")
@click.option("--tree", "tree_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", "task_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option(
    "--perturb",
    multiple=True,
    help="STEP:+Lit(a);-Lit(b) changes the state after STEP actions, e.g. '3:-Near(table)'.",
)
@handle_errors
def execute(tree_path, domain_path, task_path, perturb) -> None:
    """Tick a serialized tree from the task's initial state until it terminates."""
    domain = load_domain(domain_path)
    task = load_task(task_path, domain)
    with open(tree_path, "r", encoding="utf-8") as file:
        tree = deserialize(file.read())
    trace = simulate_execution(tree, task.s0, [_parse_perturbation(p) for p in perturb])
    click.echo(json.dumps(trace.to_dict(), sort_keys=True))
    if not trace.succeeded:
        raise PlanningFailed(trace.error or f"tree ended in {trace.status.value} after {trace.steps} steps")
    console.print(f"[green]Success[/green] in {trace.steps} steps: {', '.join(trace.actions)}")


def _resolve_domain(domain_path: Optional[str], task_path: Optional[str], scenario: Optional[str], seed: int) -> Tuple[Domain, State]:
    if scenario:
        return _scenario_domain(scenario, seed)
    if not domain_path:
        raise click.UsageError("give --domain or --scenario")
    domain = load_domain(domain_path)
    base = load_task(task_path, domain).s0 if task_path else make_condition(())
    return domain, base


@cli.command()
@click.option("--domain", "domain_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--task", "task_path", type=click.Path(exists=True, dir_okay=False), help="Base initial state.")
@click.option("--scenario", type=click.Choice(list(SIZES)), default=None)
@click.option("--n", "count", type=int, default=100, show_default=True)
@click.option("--difficulty", type=click.Choice([d.value for d in Difficulty]), default="easy", show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(dir_okay=False), required=True)
@click.option("--domain-out", type=click.Path(dir_okay=False), default=None, help="Also write the scenario domain file.")
@handle_errors
def gen(domain_path, task_path, scenario, count, difficulty, seed, out, domain_out) -> None:
    """Generate an oracle-checked task suite as JSON lines."""
    domain, base = _resolve_domain(domain_path, task_path, scenario, seed)
    records = generate_dataset(domain, count, Difficulty(difficulty), seed, base_state=base)
    save_dataset(records, out)
    if domain_out:
        with open(domain_out, "w", encoding="utf-8") as file:
            file.write(serialize_domain(domain))
    mean_len = sum(len(r.optimal_path) for r in records) / len(records)
    console.print(f"Wrote {len(records)} {difficulty} tasks for {domain.name} to {out} (mean |p*| {mean_len:.2f})")


def _print_report(rows: List[Dict[str, Any]]) -> None:
    table = Table(title="Benchmark results")
    for name in REPORT_FIELDS:
        table.add_column(name, justify="right" if name not in ("domain", "algorithm") else "left")
    for row in rows:
        table.add_row(*("-" if row[name] is None else str(row[name]) for name in REPORT_FIELDS))
    console.print(table)


@cli.command()
@click.option("--domain", "domain_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--task", "task_path", type=click.Path(exists=True, dir_okay=False), help="Base initial state for generation.")
@click.option("--scenario", type=click.Choice(list(SIZES)), multiple=True, help="Generated household domain; repeatable.")
@click.option("--dataset", "dataset_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--n", "count", type=int, default=20, show_default=True)
@click.option("--difficulty", type=click.Choice([d.value for d in Difficulty]), default="easy", show_default=True)
@click.option("--algo", "algorithms", type=click.Choice(ALGORITHM_NAMES), multiple=True)
@click.option("--alpha", type=float, default=DEFAULT_ALPHA, show_default=True)
@provider_options
@click.option("--budget-ms", type=int, default=config.BUDGET_MS, show_default=True)
@click.option("--repetitions", type=int, default=1, show_default=True)
@click.option("--prune", is_flag=True)
@click.option("--max-feedback", type=int, default=3, show_default=True)
@click.option("--k-summary", type=int, default=DEFAULT_K, show_default=True)
@click.option("--workers", type=int, default=max(1, config.WORKERS), show_default=True)
@click.option("--serial", is_flag=True, help="One task at a time, for clean timing.")
@click.option("--sweep", is_flag=True, help="Also run the correct/error-rate sweep with the mock provider.")
@click.option("--out", type=click.Path(file_okay=False), default="bench_out", show_default=True)
@handle_errors
def bench(
    domain_path, task_path, scenario, dataset_path, count, difficulty, algorithms, alpha,
    provider, correct_rate, error_rate, seed, max_retries, budget_ms, repetitions, prune,
    max_feedback, k_summary, workers, serial, sweep, out,
) -> None:
    """Run algorithms over task suites and write run records, report and plot tables."""
    settings = BenchConfig(
        algorithms=list(algorithms) or ["obtea", "hbtp-o", "hbtp-s"],
        provider=_provider_config(provider, correct_rate, error_rate, seed, max_retries),
        budget=budget_ms / 1000.0,
        repetitions=repetitions,
        alpha=alpha,
        prune=prune,
        max_feedback=max_feedback,
        k=k_summary,
        workers=workers,
        serial=serial,
    )
    suites: List[Tuple[Domain, List[TaskRecord]]] = []
    if scenario:
        for size in scenario:
            domain, base = _scenario_domain(size, seed)
            suites.append((domain, generate_dataset(domain, count, Difficulty(difficulty), seed, base_state=base)))
    else:
        domain, base = _resolve_domain(domain_path, task_path, None, seed)
        tasks = load_dataset(dataset_path) if dataset_path else generate_dataset(
            domain, count, Difficulty(difficulty), seed, base_state=base
        )
        suites.append((domain, tasks))

    os.makedirs(out, exist_ok=True)
    reports: List[BenchReport] = []
    sweep_rows: List[Dict[str, Any]] = []
    for domain, tasks in suites:
        console.print(f"Benchmarking {len(tasks)} tasks on {domain.name} (|A| = {len(domain.actions)})")
        reports.append(run_benchmark(domain, tasks, settings))
        if sweep:
            sweep_rows.extend(run_sweep(domain, tasks, settings))

    with open(os.path.join(out, "runs.jsonl"), "w", encoding="utf-8") as file:
        for report in reports:
            for record in report.records:
                file.write(json.dumps({"domain": report.domain, **record}, sort_keys=True) + "\n")
    rows = [row for report in reports for row in report.rows()]
    write_csv(rows, os.path.join(out, "report.csv"), REPORT_FIELDS)
    write_csv([t for report in reports for t in report.timings], os.path.join(out, "timing.csv"), TIMING_FIELDS)
    write_csv(time_vs_actions(reports), os.path.join(out, "time_vs_actions.csv"))
    if sweep:
        write_csv(sweep_rows, os.path.join(out, "sweep.csv"))

    _print_report(rows)
    unverified = [
        r["task_id"] for report in reports for r in report.records if r["outcome"] == "solved" and not r["verified"]
    ]
    if unverified:
        raise PlanningFailed(f"{len(unverified)} solved trees failed execution: {unverified[:5]}")
    console.print(f"Results written to {out}")


@cli.command()
@click.option("--domain", "domain_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--task", "task_path", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--max-states", type=int, default=200_000, show_default=True)
@handle_errors
def oracle(domain_path, task_path, max_states) -> None:
    """Print the optimal path p*, its action predicates and objects, and its cost."""
    domain = load_domain(domain_path)
    task = load_task(task_path, domain)
    found = optimal_path(task.problem(domain), max_states=max_states)
    click.echo(
        json.dumps(
            {
                "path": found.names,
                "predicates": found.predicates,
                "objects": found.objects,
                "cost": found.cost,
                "states_expanded": found.states_expanded,
            },
            sort_keys=True,
        )
    )
    console.print(f"p* = {', '.join(found.names) or '<empty>'} (cost {found.cost:g})")


if __name__ == "__main__":
    cli()

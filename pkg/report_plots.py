"""
File: report_plots.py
Renders the benchmark CSVs as HTML line charts:
  python report_plots.py out/sweep.csv
  python report_plots.py out/time_vs_actions.csv
"""

import csv
import logging
import os
from collections import defaultdict
from typing import Dict, List, Optional, Tuple

import click
import plotly.graph_objects as go

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


def _read_rows(path: str) -> List[Dict[str, str]]:
    with open(path, "r", newline="", encoding="utf-8") as file:
        return list(csv.DictReader(file))


def _value(raw: str) -> float:
    return float(raw) if raw not in ("", None) else float("nan")


def create_sweep_figure(rows: List[Dict[str, str]]) -> go.Figure:
    """Mean explored conditions against correct rate, one line per algorithm and error rate."""
    series: Dict[Tuple[str, str], List[Tuple[float, float]]] = defaultdict(list)
    for row in rows:
        series[(row["algorithm"], row["error_rate"])].append(
            (_value(row["correct_rate"]), _value(row["mean_explored"]))
        )

    fig = go.Figure()
    for (algorithm, error_rate), points in sorted(series.items()):
        points.sort()
        fig.add_trace(go.Scatter(
            x=[p[0] for p in points],
            y=[p[1] for p in points],
            name=f"{algorithm} (error rate {error_rate})",
            mode="lines+markers",
        ))
    fig.update_layout(
        title="Explored conditions against heuristic correct rate",
        xaxis_title="Correct rate",
        yaxis_title="Mean explored conditions",
        showlegend=True,
    )
    return fig


def create_time_figure(rows: List[Dict[str, str]]) -> go.Figure:
    """Mean planning time against action-space size, one line per algorithm."""
    series: Dict[str, List[Tuple[float, float]]] = defaultdict(list)
    for row in rows:
        series[row["algorithm"]].append((_value(row["actions"]), _value(row["mean_time"])))

    fig = go.Figure()
    for algorithm, points in sorted(series.items()):
        points.sort()
        fig.add_trace(go.Scatter(
            x=[p[0] for p in points],
            y=[p[1] for p in points],
            name=algorithm,
            mode="lines+markers",
        ))
    fig.update_layout(
        title="Planning time against action space size",
        xaxis_title="|A|",
        yaxis_title="Mean planning time (s)",
        showlegend=True,
    )
    return fig


def render_csv(path: str, out: Optional[str] = None) -> str:
    rows = _read_rows(path)
    if not rows:
        raise click.ClickException(f"{path} has no rows")
    if "correct_rate" in rows[0]:
        fig = create_sweep_figure(rows)
    elif "mean_time" in rows[0]:
        fig = create_time_figure(rows)
    else:
        raise click.ClickException(f"{path} is neither a sweep nor a time-vs-actions table")
    target = out or os.path.splitext(path)[0] + ".html"
    fig.write_html(target)
    logger.info(f"Wrote {target}")
    return target


@click.command()
@click.argument("csv_path", type=click.Path(exists=True, dir_okay=False))
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="HTML file (default: next to the CSV).")
def main(csv_path: str, out: Optional[str]) -> None:
    click.echo(render_csv(csv_path, out))


if __name__ == "__main__":
    main()

"""Render figures from regenmax CSV output.

Two kinds:

- ``envelope``: one thin trace per seed of a chosen statistic column vs
  log-scaled time, a thick cross-seed median, and dashed horizontal
  reference lines at the theoretical levels.
- ``qq``: sorted scaled hitting times against the quantiles of the
  exponential limit law with a given rate.

The script only reads the documented CSV schemas; it computes no
statistics of its own.  Output is deterministic for a fixed input file,
DPI, and matplotlib version (the Agg backend with bundled fonts).

Usage: regenmax-plot INPUT KIND OUTPUT [--stat s2] [--ref L ...] [--rate R]
"""

from __future__ import annotations

import argparse
import csv
import sys
from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DPI = 120
KINDS = ("envelope", "qq")


@dataclass(frozen=True)
class PlotJob:
    """One rendering task: input CSV, figure kind, references, output path."""

    input_csv: str
    kind: str
    output_path: str
    reference_levels: tuple[float, ...] = ()
    stat: str = "s2"  # envelope column to draw
    rate: float = 1.0  # exponential rate for the qq reference law

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == "qq" and not self.rate > 0.0:
            raise ValueError(f"qq plots need a positive rate, got {self.rate}")


def read_csv_columns(path: str, required: tuple[str, ...]) -> dict[str, np.ndarray]:
    """Load the required columns as float arrays, validating the header."""
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        missing = [c for c in required if c not in header]
        if missing:
            raise ValueError(f"{path}: missing columns {missing} (header: {header})")
        rows = list(reader)
    if not rows:
        raise ValueError(f"{path}: no data rows")
    return {c: np.array([float(r[c]) for r in rows]) for c in required}


def plot_envelope(job: PlotJob) -> None:
    """Per-seed traces plus the cross-seed median of one statistic vs log t."""
    cols = read_csv_columns(job.input_csv, ("seed", "t", job.stat))
    seeds = np.unique(cols["seed"])
    fig, ax = plt.subplots(figsize=(7.0, 4.2))
    for s in seeds:
        mask = cols["seed"] == s
        ax.plot(cols["t"][mask], cols[job.stat][mask], lw=0.6, alpha=0.45, color="#4878a8")
    ts = np.unique(cols["t"])
    median = np.array(
        [np.median(cols[job.stat][cols["t"] == t]) for t in ts]
    )
    ax.plot(ts, median, lw=2.2, color="#1f3b5c", label=f"median {job.stat} ({len(seeds)} seeds)")
    for level in job.reference_levels:
        ax.axhline(level, ls="--", lw=1.0, color="#b03a2e")
    ax.set_xscale("log")
    ax.set_xlabel("t")
    ax.set_ylabel(job.stat)
    ax.legend(loc="lower right", frameon=False)
    ax.set_title(f"normalized running-maximum statistic {job.stat}")
    _save(fig, job.output_path)


def plot_qq(job: PlotJob) -> None:
    """Sorted scaled hitting times vs exponential quantiles at the given rate."""
    cols = read_csv_columns(job.input_csv, ("scaled_time",))
    sample = np.sort(cols["scaled_time"])
    n = len(sample)
    probs = (np.arange(1, n + 1) - 0.5) / n
    theory = -np.log1p(-probs) / job.rate
    fig, ax = plt.subplots(figsize=(4.8, 4.8))
    ax.plot(theory, sample, ".", ms=3.5, color="#4878a8")
    lim = max(theory[-1], sample[-1]) * 1.05
    ax.plot([0.0, lim], [0.0, lim], ls="--", lw=1.0, color="#b03a2e")
    ax.set_xlim(0.0, lim)
    ax.set_ylim(0.0, lim)
    ax.set_xlabel(f"Exp(rate={job.rate:g}) quantiles")
    ax.set_ylabel("scaled hitting times")
    ax.set_title("first-passage scaling vs exponential limit")
    _save(fig, job.output_path)


def _save(fig, path: str) -> None:
    fig.savefig(path, dpi=DPI, metadata={"Software": "regenmax-plots"})
    plt.close(fig)


def render(job: PlotJob) -> None:
    if job.kind == "envelope":
        plot_envelope(job)
    else:
        plot_qq(job)


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="regenmax-plot", description="Render figures from regenmax CSV output"
    )
    parser.add_argument("input_csv")
    parser.add_argument("kind", choices=KINDS)
    parser.add_argument("output_path")
    parser.add_argument("--stat", default="s2", help="statistic column for envelope plots")
    parser.add_argument(
        "--ref", type=float, action="append", default=None,
        help="horizontal reference level (repeatable)",
    )
    parser.add_argument("--rate", type=float, default=1.0, help="exponential rate for qq plots")
    args = parser.parse_args(argv)
    try:
        job = PlotJob(
            input_csv=args.input_csv,
            kind=args.kind,
            output_path=args.output_path,
            reference_levels=tuple(args.ref) if args.ref else (),
            stat=args.stat,
            rate=args.rate,
        )
        render(job)
    except (OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())

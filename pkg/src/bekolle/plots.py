"""Figure writers for the experiment reports.

Every renderer draws to a file through the Agg backend and returns the
written path; the command-line layer calls these when --figures is given,
so each delimited table gets a picture sitting next to it.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from .experiments import (
    DominationReport,
    FitResult,
    SweepRecord,
    max_arg_span,
    span_probe,
)
from .weights import FamilyReport

__all__ = [
    "sweep_figure",
    "domination_figure",
    "angle_figure",
    "extrapolation_figure",
    "constant_figure",
]


def _finish(fig, path: str | Path) -> Path:
    out = Path(path)
    out.parent.mkdir(parents=True, exist_ok=True)
    fig.tight_layout()
    fig.savefig(out, dpi=144)
    plt.close(fig)
    return out


def sweep_figure(
    records: Sequence[SweepRecord],
    path: str | Path,
    fits: dict[str, FitResult] | None = None,
) -> Path:
    """Log-log panels: box characteristic and norm ratio against 1/delta,
    with the fitted power laws overlaid."""
    inv = np.array([1.0 / r.delta for r in records])
    panels = [
        ("bekolle", np.array([r.bekolle for r in records]), "box characteristic"),
        ("ratio", np.array([r.ratio for r in records]), "norm ratio"),
    ]
    fig, axes = plt.subplots(1, 2, figsize=(9.0, 3.8))
    for ax, (key, ys, label) in zip(axes, panels):
        ax.loglog(inv, ys, "o", color="tab:blue", label=label)
        fit = (fits or {}).get(key)
        if fit is not None:
            ax.loglog(
                inv,
                np.exp(fit.intercept) * inv**fit.slope,
                "-",
                color="tab:orange",
                label=f"slope {fit.slope:.4f}",
            )
        ax.set_xlabel("1 / delta")
        ax.set_ylabel(label)
        ax.legend(frameon=False)
        ax.grid(True, which="both", alpha=0.3)
    return _finish(fig, path)


def domination_figure(report: DominationReport, path: str | Path) -> Path:
    """Histogram of the sampled kernel quotients with the proof bound."""
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.hist(np.log10(report.ratios), bins=60, color="tab:blue", alpha=0.8)
    ax.axvline(
        math.log10(report.empirical_constant),
        color="tab:orange",
        label=f"empirical sup {report.empirical_constant:.3g}",
    )
    ax.axvline(
        math.log10(report.bound),
        color="tab:red",
        linestyle="--",
        label=f"bound {report.bound:.3g}",
    )
    ax.set_xlabel("log10 kernel quotient")
    ax.set_ylabel("pairs")
    ax.set_title(f"alpha = {report.alpha}")
    ax.legend(frameon=False)
    return _finish(fig, path)


def angle_figure(
    alpha: float,
    measured: float,
    formula: float,
    path: str | Path,
    samples: int = 4096,
) -> Path:
    """Measured phase span against the radius, with the quarter-turn line
    and both threshold candidates marked."""
    probe = span_probe(alpha, samples)
    ms = np.geomspace(1.02, 2.0 * measured, 80)
    spans = np.array([max_arg_span(alpha, float(m), probe) for m in ms])
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.plot(ms, spans, color="tab:blue", label="max phase span")
    ax.axhline(0.5 * math.pi, color="tab:red", linestyle="--", label="pi/2")
    ax.axvline(measured, color="tab:orange", label=f"measured M {measured:.4f}")
    ax.axvline(
        formula, color="tab:green", linestyle=":", label=f"formula M {formula:.4f}"
    )
    ax.set_xlabel("|z|")
    ax.set_ylabel("span (radians)")
    ax.set_title(f"alpha = {alpha}")
    ax.legend(frameon=False)
    return _finish(fig, path)


def extrapolation_figure(
    rows: Sequence[dict], path: str | Path
) -> Path:
    """Paired bars: measured value against its bound for each property."""
    labels = [str(r["property"]) for r in rows]
    lhs = [float(r["lhs"]) for r in rows]
    rhs = [float(r["rhs"]) for r in rows]
    pos = np.arange(len(rows))
    fig, ax = plt.subplots(figsize=(6.0, 3.8))
    ax.bar(pos - 0.18, lhs, width=0.36, color="tab:blue", label="measured")
    ax.bar(pos + 0.18, rhs, width=0.36, color="tab:orange", label="bound / reference")
    ax.set_xticks(pos, labels)
    ax.set_yscale("log")
    ax.legend(frameon=False)
    return _finish(fig, path)


def constant_figure(
    report: FamilyReport, label: str, path: str | Path
) -> Path:
    """Single-value summary: the family maximum and where it is attained."""
    fig, ax = plt.subplots(figsize=(5.0, 3.6))
    ax.bar([0], [report.value], width=0.5, color="tab:blue")
    ax.axhline(1.0, color="tab:red", linestyle="--", label="lower bound 1")
    wb = report.worst
    ax.annotate(
        f"worst box [{wb.left:.4g}, {wb.right:.4g})\n{report.searched} boxes searched",
        xy=(0, report.value),
        xytext=(0.08, report.value),
        fontsize=9,
    )
    ax.set_xticks([0], [label])
    ax.set_ylabel("box characteristic")
    ax.set_ylim(bottom=0.0)
    ax.legend(frameon=False)
    return _finish(fig, path)

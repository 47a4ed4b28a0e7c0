"""Tabular reports and figure rendering for pipeline runs.

The report directory gets one TSV with a row per input sentence plus, per
sentence, a lattice-width bar chart and (when parsing ran with tracing) an
activation-over-cycles plot of the strongest relaxation nodes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .lattice import PhonemeLattice

REPORT_COLUMNS = (
    "sentence",
    "truth",
    "positions",
    "mean_alternatives",
    "chains",
    "analyses",
    "best_rendering",
    "trees",
    "best_category",
    "best_activation",
)


@dataclass
class SentenceReport:
    """Everything the report shows about one input sentence."""

    index: int
    truth: str
    lattice: PhonemeLattice | None = None
    chains: int = 0
    renderings: tuple[str, ...] = ()
    trees: tuple[str, ...] = ()
    best_category: str = "-"
    best_activation: float | None = None
    trace: tuple[tuple[int, int, str, tuple[int, int], float], ...] = field(
        default_factory=tuple
    )

    def row(self) -> tuple[str, ...]:
        positions = len(self.lattice) if self.lattice is not None else 0
        mean_alts = (
            sum(len(a) for a in self.lattice.positions) / positions
            if positions
            else 0.0
        )
        return (
            str(self.index),
            self.truth,
            str(positions),
            f"{mean_alts:.3f}",
            str(self.chains),
            str(len(self.renderings)),
            self.renderings[0] if self.renderings else "-",
            str(len(self.trees)),
            self.best_category,
            f"{self.best_activation:.6f}" if self.best_activation is not None else "-",
        )


def write_report(directory: str | Path, reports: Sequence[SentenceReport]) -> Path:
    """Write report.tsv plus per-sentence figures; returns the TSV path."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    tsv = directory / "report.tsv"
    lines = ["\t".join(REPORT_COLUMNS)]
    lines += ["\t".join(r.row()) for r in reports]
    tsv.write_text("\n".join(lines) + "\n", encoding="utf-8")
    for r in reports:
        if r.lattice is not None and len(r.lattice):
            save_lattice_figure(
                r.lattice, directory / f"sentence{r.index:03d}_lattice.png"
            )
        if r.trace:
            save_trace_figure(
                r.trace, directory / f"sentence{r.index:03d}_activation.png"
            )
    return tsv


def save_lattice_figure(lattice: PhonemeLattice, path: str | Path) -> Path:
    """Bar chart of alternatives per lattice position, annotated with the
    first (best) phoneme of each position."""
    widths = [len(a) for a in lattice.positions]
    fig, ax = plt.subplots(figsize=(max(4.0, 0.35 * len(widths)), 2.8))
    ax.bar(range(1, len(widths) + 1), widths, color="#4878a8")
    ax.set_xlabel("lattice position")
    ax.set_ylabel("alternatives")
    ax.set_xticks(range(1, len(widths) + 1))
    ax.set_xticklabels([a[0] for a in lattice.positions], fontsize=7)
    ax.set_ylim(0, max(widths) + 1)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)


def save_trace_figure(
    trace: Sequence[tuple[int, int, str, tuple[int, int], float]],
    path: str | Path,
    max_nodes: int = 12,
) -> Path:
    """Activation-versus-cycle lines for the nodes with the highest peaks."""
    series: dict[tuple[int, str, tuple[int, int]], list[tuple[int, float]]] = {}
    for cycle, node_id, category, span, activation in trace:
        series.setdefault((node_id, category, span), []).append((cycle, activation))
    strongest = sorted(
        series.items(), key=lambda kv: -max(a for _, a in kv[1])
    )[:max_nodes]
    fig, ax = plt.subplots(figsize=(6.4, 3.6))
    for (node_id, category, span), points in strongest:
        xs, ys = zip(*points)
        ax.plot(xs, ys, marker=".", markersize=3, linewidth=1.0,
                label=f"{category}({span[0]},{span[1]})")
    ax.set_xlabel("cycle")
    ax.set_ylabel("activation")
    if strongest:
        ax.legend(fontsize=6, ncols=2, frameon=False)
    fig.tight_layout()
    fig.savefig(path, dpi=110)
    plt.close(fig)
    return Path(path)

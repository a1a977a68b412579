"""Figures written next to the JSON reports.

Everything renders through the Agg backend and is saved without software
or date metadata so that repeated runs produce identical files.
"""

from __future__ import annotations

from pathlib import Path
from typing import Sequence

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .chains import ChainBlockSystem, UniversalBlockDistribution  # noqa: E402

STYLE = {
    "font.size": 9,
    "axes.titlesize": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "figure.dpi": 100,
    "savefig.bbox": "tight",
}

VERDICT_COLORS = {"valid": "#4c9a5f", "marginal": "#d9a441", "invalid": "#c0504d"}


def save(fig, directory: Path, name: str) -> str:
    directory.mkdir(parents=True, exist_ok=True)
    path = directory / f"{name}.png"
    fig.savefig(path, metadata={"Software": None})
    plt.close(fig)
    return path.name


def membership(ax, blocks: Sequence[frozenset], labels: Sequence[str], title: str = "blocks"):
    """Objects against blocks, filled where the object belongs to the block."""
    grid = np.zeros((len(labels), max(len(blocks), 1)))
    for j, b in enumerate(blocks):
        for i in b:
            grid[i, j] = 1
    ax.imshow(grid, aspect="auto", cmap="Greys", vmin=0, vmax=1, interpolation="nearest")
    if len(labels) <= 40:
        ax.set_yticks(range(len(labels)))
        ax.set_yticklabels(labels)
    ax.set_xlabel("block")
    ax.set_ylabel("object")
    ax.set_title(title)


def intervals(ax, system: ChainBlockSystem, chain: Sequence | None = None, title: str = ""):
    """Chain block system drawn as stacked horizontal segments."""
    for row, (a, b) in enumerate(system.intervals):
        ax.plot([a, b], [row, row], lw=4, solid_capstyle="butt", color="#3b6ea5")
        ax.plot([a, b], [row, row], "o", ms=3, color="#1d3557")
    ax.set_xlim(-0.5, system.n - 0.5)
    ax.set_ylim(-0.5, len(system.intervals) - 0.5)
    ax.invert_yaxis()
    ax.set_yticks([])
    if chain is not None and system.n <= 20:
        ax.set_xticks(range(system.n))
        ax.set_xticklabels([str(v) for v in chain], rotation=90 if system.n > 10 else 0)
    ax.set_title(title)


def validation_figures(report, objects: Sequence[str], directory: Path) -> list[str]:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(3, 0.6 * len(report.per_cluster) + 2), 3))
        scores = [c.score for c in report.per_cluster]
        ax.bar(range(len(scores)), scores, color=[VERDICT_COLORS[c.verdict] for c in report.per_cluster])
        ax.axhline(report.thresholds.valid, ls="--", lw=1, color="k")
        ax.axhline(report.thresholds.invalid, ls=":", lw=1, color="k")
        ax.set_ylim(0, 1.05)
        ax.set_xticks(range(len(scores)))
        ax.set_xlabel("cluster")
        ax.set_ylabel("closeness")
        ax.set_title(f"overall {report.overall:.3f} ({report.verdict})")
        names = [save(fig, directory, "validation_closeness")]

        fig, ax = plt.subplots(figsize=(4, max(3, 0.12 * len(objects))))
        blocks = [frozenset(b) for b in report.model["blocks"]["blocks"]]
        membership(ax, blocks, objects)
        names.append(save(fig, directory, "validation_blocks"))
    return names


def model_figures(model, directory: Path, prefix: str = "model") -> list[str]:
    with plt.rc_context(STYLE):
        n = len(model.attributes)
        fig, axes = plt.subplots(n, 1, figsize=(5, 1.4 * n + 0.5), squeeze=False)
        for ax, attr, system, chain in zip(axes[:, 0], model.attributes, model.per_attribute_blocks, model.chains):
            intervals(ax, system, chain, title=attr)
        fig.tight_layout()
        names = [save(fig, directory, f"{prefix}_intervals")]

        fig, ax = plt.subplots(figsize=(4, max(3, 0.12 * len(model.objects))))
        membership(ax, model.table_blocks.blocks, model.objects,
                   title=f"table blocks, quality {model.decision_quality:.3f}")
        names.append(save(fig, directory, f"{prefix}_blocks"))
    return names


def ranking_figure(ranked, directory: Path) -> list[str]:
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots(figsize=(max(3, 0.35 * len(ranked) + 2), 3))
        ax.bar(range(len(ranked)), [m.decision_quality for m in ranked], color="#3b6ea5")
        ax.set_xticks(range(len(ranked)))
        ax.set_xticklabels(
            [",".join(map(str, m.provenance.get("labels", []))) for m in ranked], rotation=90
        )
        ax.set_ylim(0, 1.05)
        ax.set_ylabel("decision quality")
        ax.set_title(f"{len(ranked)} selected instances")
        return [save(fig, directory, "lmr_ranking")]


def enumeration_figure(ubd: UniversalBlockDistribution, directory: Path, limit: int = 64) -> list[str]:
    shown = ubd.systems[:limit]
    cols = min(8, len(shown))
    rows = -(-len(shown) // cols)
    with plt.rc_context(STYLE):
        fig, axes = plt.subplots(rows, cols, figsize=(1.4 * cols, 1.0 * rows + 0.4), squeeze=False)
        for ax in axes.flat:
            ax.axis("off")
        for ax, (i, system) in zip(axes.flat, enumerate(shown)):
            ax.axis("on")
            intervals(ax, system, title=str(i))
            ax.set_xticks([])
        fig.suptitle(f"{ubd.kind} block systems on L_{ubd.n}: {len(ubd)}")
        return [save(fig, directory, f"enumerate_{ubd.kind}_{ubd.n}")]

"""SVG heat maps of sweep tables.

Cells are drawn as vector rectangles (not an embedded raster) so each one
carries its own fill colour and an id ``cell-<row>-<col>``. Output bytes
depend only on the inputs.
"""

from __future__ import annotations

import io
from typing import Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from matplotlib.colors import Normalize, to_hex  # noqa: E402
from matplotlib.patches import Rectangle  # noqa: E402

_RC = {
    "svg.hashsalt": "coevonet",
    "svg.fonttype": "none",
    "font.family": "DejaVu Sans",
}


def cell_colors(table: np.ndarray, cmap: str = "viridis", vmin=None, vmax=None) -> np.ndarray:
    """Hex colour per table entry under a linear colour scale."""
    t = np.asarray(table, dtype=float)
    lo = np.nanmin(t) if vmin is None else vmin
    hi = np.nanmax(t) if vmax is None else vmax
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5
    cm = plt.get_cmap(cmap)
    norm = Normalize(lo, hi)
    return np.array([[to_hex(cm(norm(v))) for v in row] for row in t])


def render_heatmap(
    table,
    deltas: Sequence[float],
    rs: Sequence[float],
    title: str = "",
    label: str = "",
    cmap: str = "viridis",
    vmin=None,
    vmax=None,
) -> str:
    """Heat map with delta on the vertical axis and r on the horizontal one.

    ``table[a, b]`` is the value at ``deltas[a]``, ``rs[b]``.
    """
    t = np.asarray(table, dtype=float)
    if t.ndim != 2 or t.size == 0:
        raise ValueError("heat map table must be a non-empty 2-D array")
    if t.shape != (len(deltas), len(rs)):
        raise ValueError(f"table shape {t.shape} does not match axes ({len(deltas)}, {len(rs)})")
    colors = cell_colors(t, cmap, vmin, vmax)
    lo = np.nanmin(t) if vmin is None else vmin
    hi = np.nanmax(t) if vmax is None else vmax
    if hi == lo:
        lo, hi = lo - 0.5, hi + 0.5

    with plt.rc_context(_RC):
        fig, ax = plt.subplots(figsize=(1.6 + 0.55 * t.shape[1], 1.2 + 0.45 * t.shape[0]))
        for a in range(t.shape[0]):
            for b in range(t.shape[1]):
                ax.add_patch(
                    Rectangle((b, a), 1, 1, facecolor=colors[a, b], edgecolor="none", gid=f"cell-{a}-{b}")
                )
        ax.set_xlim(0, t.shape[1])
        ax.set_ylim(0, t.shape[0])
        ax.set_xticks(np.arange(t.shape[1]) + 0.5, [f"{r:g}" for r in rs])
        ax.set_yticks(np.arange(t.shape[0]) + 0.5, [f"{d:g}" for d in deltas])
        ax.set_xlabel("r")
        ax.set_ylabel("δ")
        if title:
            ax.set_title(title)
        sm = plt.cm.ScalarMappable(norm=Normalize(lo, hi), cmap=cmap)
        fig.colorbar(sm, ax=ax, label=label)
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None}, bbox_inches="tight")
        plt.close(fig)
    return buf.getvalue()


def write_heatmap(path, *args, **kwargs) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(render_heatmap(*args, **kwargs))

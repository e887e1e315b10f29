"""The plot kinds.

Every function takes already-validated CSV paths plus a Style and returns a
matplotlib Figure; nothing here computes statistics beyond histogram binning
(50 bins over [0, 1], matching the source figures' granularity) and the
standard Tukey box-plot reduction of raw sweep values. Scientific quantities
(means, quartiles, fits) come from the producer's CSVs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt
import numpy as np
from matplotlib import cbook
from matplotlib.colors import LogNorm

from .io import SchemaError, read_columns, snapshot_dims

HIST_BINS = 50


@dataclass
class Style:
    labels: list[str] = field(default_factory=list)
    xlabel: str = ""
    ylabel: str = ""
    title: str = ""
    cmap: str = "viridis"  # dark blue to yellow
    log_color: bool = True  # histogram2d color normalization
    dpi: int = 150


def _curve_colors(n: int, cmap: str):
    return plt.get_cmap(cmap)(np.linspace(0.0, 1.0, max(n, 2)))[:n]


def _label(style: Style, i: int, path: str | Path) -> str:
    if i < len(style.labels):
        return style.labels[i]
    return Path(path).stem.replace("_timeseries", "")


def render_timeseries(paths: list[str], style: Style) -> plt.Figure:
    """One polarization-vs-step curve per input CSV, colormap-ordered."""
    fig, ax = plt.subplots(figsize=(7, 4.5))
    colors = _curve_colors(len(paths), style.cmap)
    for i, path in enumerate(paths):
        cols = read_columns(path, ("step", "polarization"))
        ax.plot(cols["step"], cols["polarization"],
                color=colors[i], lw=1.2, label=_label(style, i, path))
    ax.set_xlabel(style.xlabel or "step")
    ax.set_ylabel(style.ylabel or "polarization")
    if style.title:
        ax.set_title(style.title)
    if len(paths) > 1:
        ax.legend(fontsize=7, ncol=2, frameon=False)
    fig.tight_layout()
    return fig


def render_heatmap(paths: list[str], style: Style) -> plt.Figure:
    """Mean final polarization over a 2-axis grid from an aggregate CSV."""
    (path,) = paths
    cols = read_columns(path, ("axis1", "axis2", "mean"))
    if np.isnan(cols["axis2"]).any():
        raise SchemaError(f"{path}: column 'axis2' empty; heatmap needs a 2-axis sweep")
    xs = np.unique(cols["axis1"])
    ys = np.unique(cols["axis2"])
    grid = np.full((ys.size, xs.size), np.nan)
    xi = np.searchsorted(xs, cols["axis1"])
    yi = np.searchsorted(ys, cols["axis2"])
    grid[yi, xi] = cols["mean"]

    fig, ax = plt.subplots(figsize=(6.5, 5))
    mesh = ax.pcolormesh(_edges(xs), _edges(ys), grid, cmap=style.cmap, shading="flat")
    fig.colorbar(mesh, ax=ax, label=style.title or "mean polarization")
    ax.set_xlabel(style.xlabel or "axis1")
    ax.set_ylabel(style.ylabel or "axis2")
    fig.tight_layout()
    return fig


def _edges(centers: np.ndarray) -> np.ndarray:
    mids = (centers[:-1] + centers[1:]) / 2
    first = centers[0] - (mids[0] - centers[0]) if centers.size > 1 else centers[0] - 0.5
    last = centers[-1] + (centers[-1] - mids[-1]) if centers.size > 1 else centers[-1] + 0.5
    return np.concatenate([[first], mids, [last]])


def render_histogram(paths: list[str], style: Style) -> plt.Figure:
    """Position histograms from a snapshot CSV, one panel per recorded step."""
    (path,) = paths
    cols = read_columns(path, ("step", "actor", "dim0"))
    steps = np.unique(cols["step"])
    fig, axes = plt.subplots(
        len(steps), 1, figsize=(6, 2.2 * len(steps)), sharex=True, squeeze=False
    )
    edges = np.linspace(0.0, 1.0, HIST_BINS + 1)
    for ax, step in zip(axes[:, 0], steps):
        values = cols["dim0"][cols["step"] == step]
        ax.hist(values, bins=edges, color="#3b528b", edgecolor="white", lw=0.3)
        ax.set_ylabel("actors")
        ax.set_title(f"step {int(step):,}", fontsize=9, loc="left")
    axes[-1, 0].set_xlabel(style.xlabel or "position")
    if style.title:
        fig.suptitle(style.title)
    fig.tight_layout()
    return fig


def render_histogram2d(paths: list[str], style: Style) -> plt.Figure:
    """2D position density from a snapshot CSV, log color scale by default."""
    (path,) = paths
    dims = snapshot_dims(path)
    if len(dims) < 2:
        raise SchemaError(f"{path}: missing column(s) dim1 (histogram2d needs 2 dimensions)")
    cols = read_columns(path, ("step", "dim0", "dim1"))
    steps = np.unique(cols["step"])
    fig, axes = plt.subplots(
        1, len(steps), figsize=(4.2 * len(steps), 4), squeeze=False
    )
    edges = np.linspace(0.0, 1.0, HIST_BINS + 1)
    for ax, step in zip(axes[0], steps):
        sel = cols["step"] == step
        counts, _, _ = np.histogram2d(cols["dim0"][sel], cols["dim1"][sel],
                                      bins=(edges, edges))
        norm = LogNorm(vmin=1) if style.log_color else None
        masked = np.ma.masked_equal(counts.T, 0)
        mesh = ax.pcolormesh(edges, edges, masked, cmap=style.cmap, norm=norm)
        ax.set_title(f"step {int(step):,}", fontsize=9)
        ax.set_xlabel(style.xlabel or "dimension 1")
        ax.set_ylabel(style.ylabel or "dimension 2")
        ax.set_aspect("equal")
        fig.colorbar(mesh, ax=ax, label="actors")
    fig.tight_layout()
    return fig


def tukey_box_stats(values: np.ndarray) -> dict:
    """Box-plot statistics with whiskers per Tukey's original definition."""
    (stats,) = cbook.boxplot_stats(values, whis=1.5)
    return stats


def render_boxplot(paths: list[str], style: Style) -> plt.Figure:
    """Per-cell box plots of raw sweep values; red solid median, dashed mean."""
    (path,) = paths
    cols = read_columns(path, ("axis1", "final_polarization"))
    values = np.unique(cols["axis1"])
    groups = [cols["final_polarization"][cols["axis1"] == v] for v in values]
    stats = []
    for v, group in zip(values, groups):
        s = tukey_box_stats(group)
        s["label"] = f"{v:g}"
        stats.append(s)

    fig, ax = plt.subplots(figsize=(7, 4.5))
    ax.bxp(
        stats,
        showfliers=False,  # outliers beyond the whiskers are not drawn
        showmeans=True,
        meanline=True,
        medianprops={"color": "red", "linestyle": "-"},
        meanprops={"color": "red", "linestyle": "--"},
    )
    ax.set_xlabel(style.xlabel or "axis value")
    ax.set_ylabel(style.ylabel or "final polarization")
    if style.title:
        ax.set_title(style.title)
    fig.tight_layout()
    return fig


def render_fitcurve(paths: list[str], style: Style) -> plt.Figure:
    """Per-iteration finals from a sweep CSV with the fitted curve overlaid."""
    if len(paths) != 2:
        raise SchemaError("fitcurve needs exactly two inputs: sweep CSV then fit CSV")
    sweep_path, fit_path = paths
    sweep = read_columns(sweep_path, ("axis1", "final_polarization"))
    fit = read_columns(fit_path, ("a", "k", "x0"))
    a, k, x0 = fit["a"][0], fit["k"][0], fit["x0"][0]

    fig, ax = plt.subplots(figsize=(6.5, 4.5))
    ax.plot(sweep["axis1"], sweep["final_polarization"], "o",
            ms=3, alpha=0.4, color="#3b528b", label="iterations")
    xs = np.linspace(sweep["axis1"].min(), sweep["axis1"].max(), 400)
    with np.errstate(over="ignore"):
        curve = a / (1.0 + np.exp(-k * (xs - x0)))
    ax.plot(xs, curve, color="red", lw=1.5,
            label=f"fit: midpoint {x0:.3f}, rate {k:.1f}")
    ax.set_xlabel(style.xlabel or "axis value")
    ax.set_ylabel(style.ylabel or "final polarization")
    if style.title:
        ax.set_title(style.title)
    ax.legend(frameon=False, fontsize=8)
    fig.tight_layout()
    return fig


KINDS = {
    "timeseries": render_timeseries,
    "heatmap": render_heatmap,
    "histogram": render_histogram,
    "histogram2d": render_histogram2d,
    "boxplot": render_boxplot,
    "fitcurve": render_fitcurve,
}


def render(kind: str, inputs: list[str], output: str | Path, style: Style) -> Path:
    """Render one job; a byte-identical input set yields identical output."""
    if kind not in KINDS:
        raise SchemaError(f"unknown plot kind {kind!r}; valid: {', '.join(sorted(KINDS))}")
    fig = KINDS[kind](inputs, style)
    output = Path(output)
    fig.savefig(output, dpi=style.dpi, metadata={"Software": "figrender"})
    plt.close(fig)
    return output

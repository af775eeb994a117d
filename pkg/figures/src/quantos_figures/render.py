"""Panel renderers: build a matplotlib Figure from a FigureSpec.

Everything is read-only over the input CSVs and deterministic: the same
files and spec produce byte-identical vector output (PDF metadata that
would timestamp the file is suppressed).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pandas as pd
from matplotlib import pyplot as plt
from matplotlib.colors import ListedColormap

from .schemas import (ALPHA_T1, CLASSICAL, FISHER_N, FISHER_OMEGA, FIT,
                      PHASE, manifest_value, read_table)
from .spec import FigureSpec

FIGSIZE = {
    "scaling": (4.2, 3.2),
    "phase-heatmap": (4.2, 3.6),
    "alpha-vs-t1": (4.2, 3.2),
    "fisher-vs-omega": (4.2, 3.2),
    "classical-inset": (3.0, 2.4),
}

DEFAULT_SCALES = {
    "scaling": ("linear", "log"),
    "phase-heatmap": ("linear", "linear"),
    "alpha-vs-t1": ("linear", "linear"),
    "fisher-vs-omega": ("linear", "log"),
    "classical-inset": ("linear", "linear"),
}

PHASE_COLORS = ("#4878cf", "#f2f2f2", "#d65f5f")
SERIES_COLORS = ("#4878cf", "#d65f5f", "#6acc65", "#b47cc7", "#c4ad66")


def _apply_scales(ax, spec: FigureSpec) -> None:
    xd, yd = DEFAULT_SCALES[spec.kind]
    ax.set_xscale(spec.x_scale or xd)
    ax.set_yscale(spec.y_scale or yd)


def _auto_label_column(frames) -> str | None:
    if len(frames) < 2:
        return None
    for col in ("t1", "big_gamma", "omega", "t2", "gamma"):
        vals = {float(df[col].iloc[0]) for df in frames}
        if len(vals) > 1:
            return col
    return None


def _scaling(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=FIGSIZE["scaling"])
    frames = [read_table(p, FISHER_N) for p in spec.inputs]
    label_col = spec.label_by or _auto_label_column(frames)
    for i, df in enumerate(frames):
        label = None
        if label_col is not None:
            label = f"{label_col} = {df[label_col].iloc[0]:g}"
        ax.plot(df["N"], df["fisher"], marker="o", ms=3, lw=1.0,
                color=SERIES_COLORS[i % len(SERIES_COLORS)], label=label)
    for path in spec.fits:
        row = read_table(path, FIT).iloc[0]
        if pd.isna(row["alpha"]):
            ax.annotate("no exponential window", xy=(0.04, 0.92),
                        xycoords="axes fraction", fontsize=8, color="0.3")
            continue
        xw = np.linspace(row["window_min"], row["window_max"], 64)
        ax.plot(xw, np.exp(row["intercept"] + row["two_alpha"] * xw),
                "k--", lw=1.0)
    ax.set_xlabel("N")
    ax.set_ylabel("Fisher information")
    _apply_scales(ax, spec)
    if label_col is not None:
        ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    return fig


def _phase_heatmap(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=FIGSIZE["phase-heatmap"])
    df = read_table(spec.inputs[0], PHASE)
    t1 = np.sort(df["t1"].unique())
    t2 = np.sort(df["t2"].unique())
    grid = (df.pivot_table(index="t2", columns="t1", values="nu")
            .reindex(index=t2, columns=t1).to_numpy())
    values = np.unique(grid)
    # one flat color per winding value actually present
    index = np.searchsorted(values, grid)
    cmap = ListedColormap(PHASE_COLORS[:len(values)])
    mesh = ax.pcolormesh(t1, t2, index, cmap=cmap, shading="nearest",
                         vmin=-0.5, vmax=len(values) - 0.5, rasterized=True)
    cbar = fig.colorbar(mesh, ax=ax, ticks=range(len(values)), shrink=0.85)
    cbar.ax.set_yticklabels([f"{int(v):d}" for v in values])
    cbar.set_label("winding number")
    gamma = abs(float(df["gamma"].iloc[0]))
    x = np.linspace(t1.min(), t1.max(), 400)
    for branch in (x - gamma, x + gamma, gamma - x):
        y = np.where((branch >= t2.min()) & (branch <= t2.max()),
                     branch, np.nan)
        ax.plot(x, y, color="k", lw=1.0)
    ax.set_xlabel("t1")
    ax.set_ylabel("t2")
    _apply_scales(ax, spec)
    fig.tight_layout()
    return fig


def _classical_points(ax, paths):
    pts = []
    for path in paths:
        df = read_table(path, CLASSICAL)
        running = df["alpha_c_running"].dropna()
        if running.empty:
            raise ValueError(f"{path}: no resolved alpha_c values")
        pts.append((float(manifest_value(path, "t1")), float(running.iloc[-1])))
    pts.sort()
    xs, ys = zip(*pts)
    ax.plot(xs, ys, marker="s", ms=3, lw=1.0, color="#d65f5f")
    ax.set_xlabel("t1", fontsize=8)
    ax.set_ylabel("classical rate", fontsize=8)
    ax.tick_params(labelsize=7)


def _alpha_vs_t1(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=FIGSIZE["alpha-vs-t1"])
    df = read_table(spec.inputs[0], ALPHA_T1)
    omegas = df["omega"].unique()
    for i, (omega, sub) in enumerate(df.groupby("omega", sort=True)):
        label = f"omega = {omega:g}" if len(omegas) > 1 else None
        ax.plot(sub["t1"], sub["alpha"], marker="o", ms=3, lw=1.0,
                color=SERIES_COLORS[i % len(SERIES_COLORS)], label=label)
    ax.set_xlabel("t1")
    ax.set_ylabel("growth rate")
    _apply_scales(ax, spec)
    if len(omegas) > 1:
        ax.legend(fontsize=7, frameon=False)
    if spec.insets:
        axin = ax.inset_axes([0.14, 0.55, 0.38, 0.38])
        _classical_points(axin, spec.insets)
    fig.tight_layout()
    return fig


def _fisher_vs_omega(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=FIGSIZE["fisher-vs-omega"])
    df = read_table(spec.inputs[0], FISHER_OMEGA)
    for i, (n, sub) in enumerate(df.groupby("N", sort=True)):
        color = SERIES_COLORS[i % len(SERIES_COLORS)]
        ax.plot(sub["omega"], sub["fisher"], lw=1.0, color=color,
                label=f"N = {int(n)}")
        peak = sub[sub["peak_flag"] == 1]
        ax.plot(peak["omega"], peak["fisher"], marker="v", ms=5,
                ls="none", color=color)
    ax.set_xlabel("omega")
    ax.set_ylabel("Fisher information")
    _apply_scales(ax, spec)
    ax.legend(fontsize=7, frameon=False)
    fig.tight_layout()
    return fig


def _classical_inset(spec: FigureSpec):
    fig, ax = plt.subplots(figsize=FIGSIZE["classical-inset"])
    _classical_points(ax, spec.inputs)
    _apply_scales(ax, spec)
    fig.tight_layout()
    return fig


_BUILDERS = {
    "scaling": _scaling,
    "phase-heatmap": _phase_heatmap,
    "alpha-vs-t1": _alpha_vs_t1,
    "fisher-vs-omega": _fisher_vs_omega,
    "classical-inset": _classical_inset,
}


def build_figure(spec: FigureSpec):
    """Assemble the panel without writing it; render() saves and closes."""
    return _BUILDERS[spec.kind](spec)


def render(spec: FigureSpec) -> str:
    fig = build_figure(spec)
    try:
        kwargs = {}
        if spec.output.lower().endswith(".pdf"):
            kwargs["metadata"] = {"CreationDate": None}
        fig.savefig(spec.output, **kwargs)
    finally:
        plt.close(fig)
    return spec.output

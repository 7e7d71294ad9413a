"""Figure rendering for reports: every CLI report path can drop a rendered
PNG next to its delimited output.  Rendering is deterministic (fixed dpi, no
embedded software/date metadata) so repeated runs produce identical bytes.
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

_DPI = 120


def _save(fig, path) -> None:
    fig.savefig(path, dpi=_DPI, metadata={"Software": None})
    plt.close(fig)


def plot_sweep(result, path) -> None:
    """Success rate against the number of replaced entries, one line per
    fitting mode."""
    fig, ax = plt.subplots(figsize=(6, 4))
    labels = {"l1": "least absolute value", "l2": "least squares"}
    for mode in result.config.modes:
        counts = list(result.config.noisy_counts)
        rates = [result.cells[(mode, k)].rate for k in counts]
        ax.plot(counts, rates, marker="o", label=labels.get(mode, mode))
    ax.set_xlabel("number of noisy entries")
    ax.set_ylabel("success rate")
    ax.set_ylim(-0.05, 1.05)
    ax.set_title(f"recovery under sparse noise, n={result.config.n}")
    ax.legend()
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_convergence(table, path, target_label: str = "limit") -> None:
    """Sup-distance to the limit objective for each exponent in the schedule."""
    ps = [p for p, _ in table]
    ds = [d for _, d in table]
    fig, ax = plt.subplots(figsize=(6, 4))
    ax.plot(ps, ds, marker="o")
    ax.set_xlabel("exponent p")
    ax.set_ylabel(f"sup |f_p - {target_label}| on grid")
    if min(ds) > 0:
        ax.set_yscale("log")
    ax.grid(True, alpha=0.3)
    fig.tight_layout()
    _save(fig, path)


def plot_grid_report(values, box, report, path) -> None:
    """Heatmap (2-D) or curve (1-D) of the swept values with the reported
    minima marked.  Higher-dimensional grids are not rendered."""
    if box.ndim > 2:
        raise ValueError("grid plots support only 1-D and 2-D boxes")
    fig, ax = plt.subplots(figsize=(6, 5))
    if box.ndim == 1:
        xs = box.axes()[0]
        ax.plot(xs, values.ravel(), lw=1.0)
        for point, value in report.grid_local_minima:
            ax.plot(point[0], value, "r.", ms=8)
        ax.set_xlabel("x")
        ax.set_ylabel("value")
    else:
        masked = np.ma.masked_invalid(values)
        extent = (box.lower[0], box.upper[0], box.lower[1], box.upper[1])
        im = ax.imshow(
            masked.T, origin="lower", extent=extent, aspect="auto", cmap="viridis"
        )
        fig.colorbar(im, ax=ax, label="value")
        for point, _ in report.grid_local_minima:
            ax.plot(point[0], point[1], "r.", ms=6)
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    ax.set_title(f"verdict: {report.verdict}")
    fig.tight_layout()
    _save(fig, path)


def plot_surface(rows, path, name: str = "") -> None:
    """Render gallery export rows: a curve for (x, value) rows, a heatmap for
    (x1, x2, value) rows."""
    rows = np.asarray(rows, dtype=float)
    fig, ax = plt.subplots(figsize=(6, 5))
    if rows.shape[1] == 2:
        ax.plot(rows[:, 0], rows[:, 1], lw=1.0)
        ax.set_xlabel("x")
        ax.set_ylabel("value")
    else:
        xs = np.unique(rows[:, 0])
        ys = np.unique(rows[:, 1])
        grid = rows[:, 2].reshape(xs.size, ys.size)
        im = ax.imshow(
            grid.T,
            origin="lower",
            extent=(xs[0], xs[-1], ys[0], ys[-1]),
            aspect="auto",
            cmap="viridis",
        )
        fig.colorbar(im, ax=ax, label="value")
        ax.set_xlabel("x1")
        ax.set_ylabel("x2")
    if name:
        ax.set_title(name)
    fig.tight_layout()
    _save(fig, path)

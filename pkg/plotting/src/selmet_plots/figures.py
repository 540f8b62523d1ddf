"""The five figure kinds, rendered from engine output files.

Rendering is deterministic for fixed inputs: fixed figure sizes, fixed
dpi, no timestamps in the image metadata.
"""

from dataclasses import dataclass, field

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

from . import readers

FIGURE_KINDS = ("trajectories", "landscape", "heatmap", "acf", "histogram")

_SAVE_OPTS = dict(dpi=110, metadata={"Software": "selmet-plots"})


@dataclass
class FigureJob:
    """One figure to render: input files, kind, output path, styling."""

    kind: str
    inputs: list
    output: str
    title: str | None = None
    options: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in FIGURE_KINDS:
            raise ValueError(f"unknown figure kind {self.kind!r}; choose from {FIGURE_KINDS}")
        if not self.inputs:
            raise ValueError("at least one input file is required")


def render(job):
    """Dispatch a FigureJob to its renderer; returns the output path."""
    if job.kind == "trajectories":
        plot_trajectories(job.inputs, job.output, title=job.title, **job.options)
    elif job.kind == "landscape":
        plot_landscape(job.inputs[0], job.output, title=job.title, **job.options)
    elif job.kind == "heatmap":
        plot_heatmap(job.inputs[0], job.output, title=job.title, **job.options)
    elif job.kind == "acf":
        plot_acf(job.inputs[0], job.output, title=job.title, **job.options)
    else:
        plot_histogram(job.inputs[0], job.output, title=job.title, **job.options)
    return job.output


def _finish(fig, path):
    fig.savefig(path, **_SAVE_OPTS)
    plt.close(fig)


def plot_trajectories(paths, output, title=None):
    """One panel per trajectory file: landmark paths, start dot, end cross."""
    n = len(paths)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 4.2), squeeze=False)
    for ax, path in zip(axes[0], paths):
        _, q, _, _ = readers.read_trajectory(path)
        for i in range(q.shape[1]):
            ax.plot(q[:, i, 0], q[:, i, 1], "-", lw=1.4)
            ax.plot(q[0, i, 0], q[0, i, 1], "o", ms=7, mfc="white", mec="black")
            ax.plot(q[-1, i, 0], q[-1, i, 1], "x", ms=8, mew=2, color="black")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.set_title(str(path).rsplit("/", 1)[-1])
        ax.set_aspect("equal", adjustable="datalim")
        ax.grid(alpha=0.3)
    if title:
        fig.suptitle(title)
    _finish(fig, output)


def plot_landscape(scan_path, output, minima_path=None, title=None):
    """Filled map of the action over centroid positions; failed cells hatched grey."""
    xs, ys, actions, converged = readers.read_scan(scan_path)
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    masked = np.ma.masked_invalid(actions.T)
    cmap = plt.get_cmap("viridis").copy()
    cmap.set_bad(color="lightgrey")
    dx = xs[1] - xs[0] if len(xs) > 1 else 1.0
    dy = ys[1] - ys[0] if len(ys) > 1 else 1.0
    x_edges = np.concatenate([xs - dx / 2, [xs[-1] + dx / 2]])
    y_edges = np.concatenate([ys - dy / 2, [ys[-1] + dy / 2]])
    pc = ax.pcolormesh(x_edges, y_edges, masked, cmap=cmap, shading="flat")
    fig.colorbar(pc, ax=ax, label="action")
    if minima_path is not None:
        minima = readers.read_minima(minima_path)
        if len(minima):
            ax.plot(minima[:, 0], minima[:, 1], "r*", ms=10, mec="white")
    ax.set_xlabel("centroid x")
    ax.set_ylabel("centroid y")
    ax.set_title(title or "action landscape")
    _finish(fig, output)


def plot_heatmap(chain_path, output, bounds=(-2.0, 2.0, -2.0, 2.0), bins=(40, 40),
                 centroid=1, title=None):
    """2-D histogram of one centroid's sampled positions."""
    _, cents, _, _, _ = readers.read_chain(chain_path)
    k = cents.shape[1]
    if not 1 <= centroid <= k:
        raise ValueError(f"centroid must be in 1..{k}, got {centroid}")
    pts = cents[:, centroid - 1, :]
    fig, ax = plt.subplots(figsize=(5.2, 4.6))
    h, xe, ye = np.histogram2d(
        pts[:, 0], pts[:, 1], bins=bins,
        range=[[bounds[0], bounds[1]], [bounds[2], bounds[3]]],
    )
    pc = ax.pcolormesh(xe, ye, h.T, cmap="magma")
    fig.colorbar(pc, ax=ax, label="samples")
    ax.set_xlabel("centroid x")
    ax.set_ylabel("centroid y")
    ax.set_title(title or f"sampled positions (centroid {centroid})")
    _finish(fig, output)


def plot_acf(acf_path, output, title=None):
    lags, values = readers.read_acf(acf_path)
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.plot(lags, values, "-", lw=1.4)
    ax.axhline(0.0, color="black", lw=0.8)
    ax.axhline(0.1, color="grey", lw=0.8, ls="--")
    ax.axhline(-0.1, color="grey", lw=0.8, ls="--")
    ax.set_xlabel("lag")
    ax.set_ylabel("autocorrelation")
    ax.set_title(title or "chain autocorrelation")
    ax.grid(alpha=0.3)
    _finish(fig, output)


def plot_histogram(chain_path, output, n_bins=30, title=None):
    """Histogram of the sampled action over converged samples."""
    _, _, actions, _, converged = readers.read_chain(chain_path)
    vals = actions[converged]
    if len(vals) == 0:
        raise ValueError(f"{chain_path}: no converged samples to histogram")
    fig, ax = plt.subplots(figsize=(5.2, 3.6))
    ax.hist(vals, bins=n_bins, color="steelblue", edgecolor="black", lw=0.4)
    ax.set_xlabel("action")
    ax.set_ylabel("samples")
    ax.set_title(title or "sampled action values")
    _finish(fig, output)

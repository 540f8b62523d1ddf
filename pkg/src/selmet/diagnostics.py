"""Chain post-processing: autocorrelation, heat maps, histograms, MAP."""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSeriesError, InvalidInputError
from .landscape import GridSpec


@dataclass(eq=False)
class AcfResult:
    """Normalised autocovariance at lags 0..max_lag; values[0] == 1."""

    lags: np.ndarray
    values: np.ndarray


@dataclass(eq=False)
class Histogram2D:
    """Counts per half-open grid cell plus the number of points outside."""

    grid: GridSpec
    counts: np.ndarray
    n_out_of_bounds: int


@dataclass(eq=False)
class Histogram1D:
    edges: np.ndarray
    counts: np.ndarray


def autocorrelation(series, max_lag):
    """Autocorrelation with the biased normalisation (denominator over the full series)."""
    s = np.asarray(series, dtype=float)
    if s.ndim != 1 or len(s) < max_lag + 2:
        raise InvalidInputError(
            f"series must be 1-D with at least max_lag + 2 = {max_lag + 2} entries, got {s.shape}"
        )
    if max_lag < 0:
        raise InvalidInputError(f"max_lag must be >= 0, got {max_lag}")
    d = s - s.mean()
    c0 = float(d @ d)
    if c0 <= 0.0:
        raise DegenerateSeriesError("series has zero variance")
    values = np.empty(max_lag + 1)
    for k in range(max_lag + 1):
        values[k] = float(d[: len(d) - k] @ d[k:]) / c0
    return AcfResult(lags=np.arange(max_lag + 1), values=values)


def decorrelation_lag(acf, threshold=0.1):
    """Smallest lag with |acf| < threshold, or None if never reached."""
    below = np.nonzero(np.abs(acf.values) < threshold)[0]
    return int(below[0]) if len(below) else None


def heatmap(points, grid):
    """Bin points into half-open grid cells [edge_i, edge_{i+1})."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    counts = np.zeros((grid.nx, grid.ny), dtype=np.int64)
    out = 0
    for pt in points:
        cell = grid.cell_of(pt)
        if cell is None:
            out += 1
        else:
            counts[cell] += 1
    return Histogram2D(grid=grid, counts=counts, n_out_of_bounds=out)


def map_estimate(chain, prior_scale=None, include_prior=True):
    """Sample minimising action + 1/2 |centroids|^2 / prior_scale^2.

    The penalty is the negative log of the pCN Gaussian reference
    measure, making this the maximum a posteriori state; pass
    include_prior=False for the plain minimum-action sample.  Ties break
    to the earliest index.  Only samples whose shooting converged are
    considered.
    """
    if prior_scale is None:
        prior_scale = chain.config.prior_scale if chain.config is not None else 1.0
    best = None
    best_score = np.inf
    for s in chain.samples:
        if not s.shooting_converged:
            continue
        score = s.action
        if include_prior:
            score = score + 0.5 * float((s.centroids**2).sum()) / prior_scale**2
        if score < best_score:
            best, best_score = s, score
    if best is None:
        raise InvalidInputError("chain has no samples with converged shooting")
    return best


def action_histogram(chain, n_bins):
    """Histogram of the action over samples with converged shooting.

    Uniform bins spanning [min, max]; the counts partition the converged
    samples (the top edge is closed).
    """
    if n_bins < 1:
        raise InvalidInputError(f"n_bins must be >= 1, got {n_bins}")
    actions = np.array([s.action for s in chain.samples if s.shooting_converged])
    if len(actions) == 0:
        raise InvalidInputError("chain has no samples with converged shooting")
    counts, edges = np.histogram(actions, bins=n_bins)
    return Histogram1D(edges=edges, counts=counts)

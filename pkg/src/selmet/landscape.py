"""Action landscape over single-centroid positions.

Places one control-field centroid at every cell centre of a grid, solves
the boundary value problem there, and records the optimal action.  The
resulting surface is what the sampler's posterior concentrates on; its
strict local minima mark the candidate growth locations.
"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

from .errors import InvalidInputError, SolverFailureError
from .kernels import NuField
from .shooting import solve_bvp_robust

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class GridSpec:
    """Rectangular cell grid; values live at cell centres."""

    x_min: float = -2.0
    x_max: float = 2.0
    y_min: float = -2.0
    y_max: float = 2.0
    nx: int = 40
    ny: int = 40

    def __post_init__(self):
        if not (np.isfinite(self.x_min) and np.isfinite(self.x_max) and self.x_max > self.x_min):
            raise InvalidInputError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")
        if not (np.isfinite(self.y_min) and np.isfinite(self.y_max) and self.y_max > self.y_min):
            raise InvalidInputError(f"need y_max > y_min, got [{self.y_min}, {self.y_max}]")
        if self.nx < 1 or self.ny < 1:
            raise InvalidInputError(f"nx and ny must be >= 1, got {self.nx}x{self.ny}")

    @property
    def dx(self):
        return (self.x_max - self.x_min) / self.nx

    @property
    def dy(self):
        return (self.y_max - self.y_min) / self.ny

    def x_centers(self):
        return self.x_min + (np.arange(self.nx) + 0.5) * self.dx

    def y_centers(self):
        return self.y_min + (np.arange(self.ny) + 0.5) * self.dy

    def x_edges(self):
        return self.x_min + np.arange(self.nx + 1) * self.dx

    def y_edges(self):
        return self.y_min + np.arange(self.ny + 1) * self.dy

    def cell_of(self, point):
        """(ix, iy) of the half-open cell containing point, or None if outside."""
        x, y = float(point[0]), float(point[1])
        ix = int(np.searchsorted(self.x_edges(), x, side="right")) - 1
        iy = int(np.searchsorted(self.y_edges(), y, side="right")) - 1
        if 0 <= ix < self.nx and 0 <= iy < self.ny:
            return ix, iy
        return None


@dataclass(eq=False)
class ScanResult:
    """actions[ix, iy] is the optimal action with the centroid at cell (ix, iy).

    NaN where shooting failed to converge; ``converged`` is the matching
    boolean mask.
    """

    grid: GridSpec
    actions: np.ndarray
    converged: np.ndarray


class CellMinimum(NamedTuple):
    ix: int
    iy: int
    position: np.ndarray
    action: float


def solve_cell(prob_template, cx, cy, sigma_nu_sq):
    """Optimal action with a single centroid at (cx, cy).

    Uses the deterministic robust solve (multi-start seeds plus floor
    continuation), so the result does not depend on any other cell or on
    call order.  Returns (action, converged);
    failures give (nan, False).
    """
    fld = NuField(np.array([[cx, cy]]), sigma_nu_sq)
    prob = replace(prob_template, field=fld, p0_init=None)
    try:
        res = solve_bvp_robust(prob)
    except SolverFailureError:
        return np.nan, False
    if not res.converged:
        return np.nan, False
    return res.action, True


def _solve_cell_task(args):
    prob_template, sigma_nu_sq, ix, iy, cx, cy = args
    act, conv = solve_cell(prob_template, cx, cy, sigma_nu_sq)
    return ix, iy, act, conv


def scan_grid(prob_template, grid, sigma_nu_sq, workers=1):
    """Solve a single-centroid field at every grid cell centre.

    Every cell is solved independently with the same deterministic
    multi-start procedure, so the sequential sweep (workers == 1) and
    any parallel partition of the cells (workers > 1) produce identical
    results.  Per-cell failures are recorded as NaN, never raised.
    """
    xs = grid.x_centers()
    ys = grid.y_centers()
    actions = np.full((grid.nx, grid.ny), np.nan)
    converged = np.zeros((grid.nx, grid.ny), dtype=bool)
    if workers > 1:
        tasks = [
            (prob_template, sigma_nu_sq, ix, iy, xs[ix], ys[iy])
            for ix in range(grid.nx)
            for iy in range(grid.ny)
        ]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            for ix, iy, act, conv in pool.map(_solve_cell_task, tasks, chunksize=8):
                actions[ix, iy] = act
                converged[ix, iy] = conv
    else:
        for ix in range(grid.nx):
            for iy in range(grid.ny):
                actions[ix, iy], converged[ix, iy] = solve_cell(
                    prob_template, xs[ix], ys[iy], sigma_nu_sq
                )
    n_failed = grid.nx * grid.ny - int(converged.sum())
    if n_failed:
        logger.info("scan: %d of %d cells failed to converge", n_failed, grid.nx * grid.ny)
    return ScanResult(grid=grid, actions=actions, converged=converged)


def find_local_minima(scan):
    """Converged cells strictly below every converged 8-neighbour.

    Border cells compare against their existing neighbours only.
    Returned minima are sorted by ascending action.
    """
    conv = scan.converged
    if not conv.any():
        raise InvalidInputError("scan has no converged cells")
    acts = scan.actions
    nx, ny = acts.shape
    xs = scan.grid.x_centers()
    ys = scan.grid.y_centers()
    minima = []
    for ix in range(nx):
        for iy in range(ny):
            if not conv[ix, iy]:
                continue
            a = acts[ix, iy]
            is_min = True
            for dx in (-1, 0, 1):
                for dy in (-1, 0, 1):
                    if dx == 0 and dy == 0:
                        continue
                    jx, jy = ix + dx, iy + dy
                    if 0 <= jx < nx and 0 <= jy < ny and conv[jx, jy]:
                        if not (a < acts[jx, jy]):
                            is_min = False
                            break
                if not is_min:
                    break
            if is_min:
                minima.append(CellMinimum(ix, iy, np.array([xs[ix], ys[iy]]), float(a)))
    minima.sort(key=lambda m: m.action)
    return minima


def lowest_quartile_mask(scan, fraction=0.25):
    """Converged cells whose action is within the lowest quartile of the scan."""
    conv = scan.converged
    if not conv.any():
        raise InvalidInputError("scan has no converged cells")
    threshold = np.quantile(scan.actions[conv], fraction)
    return conv & (scan.actions <= threshold)


def fraction_in_region(points, grid, mask):
    """Fraction of the given points whose grid cell lies in the mask."""
    points = np.asarray(points, dtype=float).reshape(-1, 2)
    if len(points) == 0:
        return 0.0
    hits = 0
    for pt in points:
        cell = grid.cell_of(pt)
        if cell is not None and mask[cell]:
            hits += 1
    return hits / len(points)

"""Delimited-text serialisation of trajectories, chains and scans.

All writers are deterministic (same input, same bytes): comma-separated
values, floats with 17 significant digits (lossless for float64), "\\n"
line endings, booleans as 0/1.  Each format round-trips through its
reader; see the README for the column schemas.
"""

import numpy as np

from .dynamics import Trajectory
from .errors import FileFormatError
from .landscape import GridSpec, ScanResult
from .sampler import Chain, ChainSample


def _fmt(x):
    return f"{float(x):.17g}"


def _write_lines(path, lines):
    try:
        with open(path, "w", newline="") as fh:
            fh.write("\n".join(lines) + "\n")
    except OSError as e:
        raise FileFormatError(path, f"cannot write: {e}") from e


def _read_rows(path, expected_header):
    try:
        with open(path, "r", newline="") as fh:
            raw = fh.read().splitlines()
    except OSError as e:
        raise FileFormatError(path, f"cannot read: {e}") from e
    if not raw:
        raise FileFormatError(path, "file is empty", row=1)
    header = raw[0].split(",")
    if header != expected_header:
        raise FileFormatError(
            path, f"expected header {','.join(expected_header)!r}, got {raw[0]!r}", row=1
        )
    rows = []
    for lineno, line in enumerate(raw[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(expected_header):
            raise FileFormatError(
                path, f"expected {len(expected_header)} columns, got {len(cells)}", row=lineno
            )
        rows.append((lineno, cells))
    return rows


def _parse_float(path, lineno, cell, column):
    try:
        return float(cell)
    except ValueError:
        raise FileFormatError(path, f"bad {column} value {cell!r}", row=lineno) from None


def _parse_int(path, lineno, cell, column):
    try:
        return int(cell)
    except ValueError:
        raise FileFormatError(path, f"bad {column} value {cell!r}", row=lineno) from None


TRAJECTORY_HEADER = ["t", "landmark", "qx", "qy", "px", "py", "hamiltonian"]
SCAN_HEADER = ["ix", "iy", "cx", "cy", "action", "converged"]
MINIMA_HEADER = ["ix", "iy", "cx", "cy", "action"]
ACF_HEADER = ["lag", "value"]
HIST_HEADER = ["bin_lo", "bin_hi", "count"]


def write_trajectory(traj, path):
    """One row per (time step, landmark)."""
    lines = [",".join(TRAJECTORY_HEADER)]
    for s in range(len(traj.times)):
        t = traj.times[s]
        for i in range(traj.n_landmarks):
            lines.append(
                ",".join(
                    [
                        _fmt(t),
                        str(i),
                        _fmt(traj.q[s, i, 0]),
                        _fmt(traj.q[s, i, 1]),
                        _fmt(traj.p[s, i, 0]),
                        _fmt(traj.p[s, i, 1]),
                        _fmt(traj.hamiltonians[s]),
                    ]
                )
            )
    _write_lines(path, lines)


def read_trajectory(path):
    rows = _read_rows(path, TRAJECTORY_HEADER)
    if not rows:
        raise FileFormatError(path, "trajectory has no data rows", row=2)
    landmarks = []
    for lineno, cells in rows:
        landmarks.append(_parse_int(path, lineno, cells[1], "landmark"))
    M = max(landmarks) + 1
    if len(rows) % M != 0:
        raise FileFormatError(path, f"row count {len(rows)} is not a multiple of M={M}")
    n = len(rows) // M
    times = np.empty(n)
    q = np.empty((n, M, 2))
    p = np.empty((n, M, 2))
    hs = np.empty(n)
    for idx, (lineno, cells) in enumerate(rows):
        s, i = divmod(idx, M)
        if landmarks[idx] != i:
            raise FileFormatError(path, f"expected landmark {i}, got {landmarks[idx]}", row=lineno)
        times[s] = _parse_float(path, lineno, cells[0], "t")
        q[s, i, 0] = _parse_float(path, lineno, cells[2], "qx")
        q[s, i, 1] = _parse_float(path, lineno, cells[3], "qy")
        p[s, i, 0] = _parse_float(path, lineno, cells[4], "px")
        p[s, i, 1] = _parse_float(path, lineno, cells[5], "py")
        hs[s] = _parse_float(path, lineno, cells[6], "hamiltonian")
    if n > 1 and not np.all(np.diff(times) > 0):
        raise FileFormatError(path, "times are not strictly increasing")
    action = float(np.trapezoid(hs, times)) if n > 1 else 0.0
    return Trajectory(times=times, q=q, p=p, hamiltonians=hs, action=action)


def chain_header(n_centroids):
    cols = ["iter"]
    for k in range(1, n_centroids + 1):
        cols += [f"h{k}x", f"h{k}y"]
    return cols + ["action", "accepted", "converged"]


def write_chain(chain, path):
    """One row per sample: iteration, centroid coordinates, action, flags."""
    k = chain.samples[0].centroids.shape[0]
    lines = [",".join(chain_header(k))]
    for j, s in enumerate(chain.samples):
        cells = [str(j)]
        for c in s.centroids:
            cells += [_fmt(c[0]), _fmt(c[1])]
        cells += [_fmt(s.action), str(int(s.accepted)), str(int(s.shooting_converged))]
        lines.append(",".join(cells))
    _write_lines(path, lines)


def read_chain(path):
    """Rebuild a Chain from file; the sampler config is not stored in the format."""
    try:
        with open(path, "r", newline="") as fh:
            first = fh.readline().rstrip("\n")
    except OSError as e:
        raise FileFormatError(path, f"cannot read: {e}") from e
    ncols = len(first.split(","))
    if ncols < 6 or (ncols - 4) % 2 != 0:
        raise FileFormatError(path, f"malformed chain header {first!r}", row=1)
    k = (ncols - 4) // 2
    rows = _read_rows(path, chain_header(k))
    samples = []
    for lineno, cells in rows:
        cent = np.empty((k, 2))
        for i in range(k):
            cent[i, 0] = _parse_float(path, lineno, cells[1 + 2 * i], f"h{i + 1}x")
            cent[i, 1] = _parse_float(path, lineno, cells[2 + 2 * i], f"h{i + 1}y")
        action = _parse_float(path, lineno, cells[-3], "action")
        accepted = bool(_parse_int(path, lineno, cells[-2], "accepted"))
        converged = bool(_parse_int(path, lineno, cells[-1], "converged"))
        samples.append(ChainSample(cent, action, accepted, converged))
    if not samples:
        raise FileFormatError(path, "chain has no samples", row=2)
    n_acc = sum(s.accepted for s in samples[1:])
    rate = n_acc / (len(samples) - 1) if len(samples) > 1 else 0.0
    return Chain(samples=samples, acceptance_rate=rate, config=None)


def write_scan(scan, path):
    """Row-major cells: indices, cell centre, action ('nan' if failed), converged flag."""
    xs = scan.grid.x_centers()
    ys = scan.grid.y_centers()
    lines = [",".join(SCAN_HEADER)]
    for ix in range(scan.grid.nx):
        for iy in range(scan.grid.ny):
            lines.append(
                ",".join(
                    [
                        str(ix),
                        str(iy),
                        _fmt(xs[ix]),
                        _fmt(ys[iy]),
                        _fmt(scan.actions[ix, iy]),
                        str(int(scan.converged[ix, iy])),
                    ]
                )
            )
    _write_lines(path, lines)


def read_scan(path):
    """Rebuild a ScanResult; grid bounds are inferred from the cell centres.

    The inference is exact only up to float rounding, and a 1x1 scan is
    given unit cell extent (the format stores centres, not bounds).
    """
    rows = _read_rows(path, SCAN_HEADER)
    if not rows:
        raise FileFormatError(path, "scan has no data rows", row=2)
    ixs, iys, cxs, cys, acts, convs = [], [], [], [], [], []
    for lineno, cells in rows:
        ixs.append(_parse_int(path, lineno, cells[0], "ix"))
        iys.append(_parse_int(path, lineno, cells[1], "iy"))
        cxs.append(_parse_float(path, lineno, cells[2], "cx"))
        cys.append(_parse_float(path, lineno, cells[3], "cy"))
        acts.append(_parse_float(path, lineno, cells[4], "action"))
        convs.append(bool(_parse_int(path, lineno, cells[5], "converged")))
    nx = max(ixs) + 1
    ny = max(iys) + 1
    if len(rows) != nx * ny:
        raise FileFormatError(path, f"expected {nx * ny} cells, got {len(rows)}")
    x_centers = np.full(nx, np.nan)
    y_centers = np.full(ny, np.nan)
    actions = np.full((nx, ny), np.nan)
    converged = np.zeros((nx, ny), dtype=bool)
    for ix, iy, cx, cy, act, conv in zip(ixs, iys, cxs, cys, acts, convs):
        x_centers[ix] = cx
        y_centers[iy] = cy
        actions[ix, iy] = act
        converged[ix, iy] = conv
    dx = x_centers[1] - x_centers[0] if nx > 1 else 1.0
    dy = y_centers[1] - y_centers[0] if ny > 1 else 1.0
    grid = GridSpec(
        x_min=float(x_centers[0] - dx / 2),
        x_max=float(x_centers[0] - dx / 2 + nx * dx),
        y_min=float(y_centers[0] - dy / 2),
        y_max=float(y_centers[0] - dy / 2 + ny * dy),
        nx=nx,
        ny=ny,
    )
    return ScanResult(grid=grid, actions=actions, converged=converged)


def write_minima(minima, path):
    lines = [",".join(MINIMA_HEADER)]
    for m in minima:
        lines.append(
            ",".join([str(m.ix), str(m.iy), _fmt(m.position[0]), _fmt(m.position[1]), _fmt(m.action)])
        )
    _write_lines(path, lines)


def write_acf(acf, path):
    lines = [",".join(ACF_HEADER)]
    for lag, value in zip(acf.lags, acf.values):
        lines.append(f"{int(lag)},{_fmt(value)}")
    _write_lines(path, lines)


def write_histogram(hist, path):
    lines = [",".join(HIST_HEADER)]
    for i, count in enumerate(hist.counts):
        lines.append(f"{_fmt(hist.edges[i])},{_fmt(hist.edges[i + 1])},{int(count)}")
    _write_lines(path, lines)


def write_heatmap(hist2d, path):
    """Same cell layout as scan files, with a count per cell."""
    xs = hist2d.grid.x_centers()
    ys = hist2d.grid.y_centers()
    lines = ["ix,iy,cx,cy,count"]
    for ix in range(hist2d.grid.nx):
        for iy in range(hist2d.grid.ny):
            lines.append(
                f"{ix},{iy},{_fmt(xs[ix])},{_fmt(ys[iy])},{int(hist2d.counts[ix, iy])}"
            )
    _write_lines(path, lines)


def write_map_estimate(sample, path):
    k = sample.centroids.shape[0]
    cols = []
    for i in range(1, k + 1):
        cols += [f"h{i}x", f"h{i}y"]
    cols.append("action")
    cells = []
    for c in sample.centroids:
        cells += [_fmt(c[0]), _fmt(c[1])]
    cells.append(_fmt(sample.action))
    _write_lines(path, [",".join(cols), ",".join(cells)])

"""Parsers for the engine's delimited output files.

Deliberately self-contained: this package talks to the engine only
through its published file formats, never in-process.
"""

import numpy as np


class ParseError(ValueError):
    """A data file did not match its schema; ``row`` is the 1-based line."""

    def __init__(self, path, message, row=None):
        self.path = str(path)
        self.row = row
        where = f"{path}:{row}" if row is not None else str(path)
        super().__init__(f"{where}: {message}")


def _read_table(path, expected_header):
    try:
        with open(path, "r", newline="") as fh:
            raw = fh.read().splitlines()
    except OSError as e:
        raise ParseError(path, f"cannot read: {e}") from e
    if not raw:
        raise ParseError(path, "file is empty", row=1)
    header = raw[0].split(",")
    if expected_header is not None and header != expected_header:
        raise ParseError(
            path, f"expected header {','.join(expected_header)!r}, got {raw[0]!r}", row=1
        )
    rows = []
    for lineno, line in enumerate(raw[1:], start=2):
        if not line:
            continue
        cells = line.split(",")
        if len(cells) != len(header):
            raise ParseError(
                path, f"expected {len(header)} columns, got {len(cells)}", row=lineno
            )
        rows.append((lineno, cells))
    if not rows:
        raise ParseError(path, "no data rows", row=2)
    return header, rows


def _floats(path, lineno, cells, idx):
    try:
        return [float(cells[i]) for i in idx]
    except ValueError as e:
        raise ParseError(path, str(e), row=lineno) from None


def read_trajectory(path):
    """Returns (times (n,), q (n, M, 2), p (n, M, 2), hamiltonians (n,))."""
    _, rows = _read_table(path, ["t", "landmark", "qx", "qy", "px", "py", "hamiltonian"])
    recs = []
    for lineno, cells in rows:
        t, qx, qy, px, py, h = _floats(path, lineno, cells, [0, 2, 3, 4, 5, 6])
        try:
            lm = int(cells[1])
        except ValueError:
            raise ParseError(path, f"bad landmark index {cells[1]!r}", row=lineno) from None
        recs.append((t, lm, qx, qy, px, py, h))
    m = max(r[1] for r in recs) + 1
    if len(recs) % m != 0:
        raise ParseError(path, f"row count {len(recs)} is not a multiple of M={m}")
    n = len(recs) // m
    times = np.empty(n)
    q = np.empty((n, m, 2))
    p = np.empty((n, m, 2))
    hs = np.empty(n)
    for idx, (t, lm, qx, qy, px, py, h) in enumerate(recs):
        s = idx // m
        times[s] = t
        hs[s] = h
        q[s, lm] = (qx, qy)
        p[s, lm] = (px, py)
    return times, q, p, hs


def read_chain(path):
    """Returns (iters (n,), centroids (n, K, 2), actions (n,), accepted, converged)."""
    header, rows = _read_table(path, None)
    if (
        len(header) < 6
        or header[0] != "iter"
        or header[-3:] != ["action", "accepted", "converged"]
        or (len(header) - 4) % 2 != 0
    ):
        raise ParseError(path, f"unrecognised chain header {','.join(header)!r}", row=1)
    k = (len(header) - 4) // 2
    n = len(rows)
    iters = np.empty(n, dtype=int)
    cents = np.empty((n, k, 2))
    actions = np.empty(n)
    accepted = np.empty(n, dtype=bool)
    converged = np.empty(n, dtype=bool)
    for j, (lineno, cells) in enumerate(rows):
        vals = _floats(path, lineno, cells, range(len(cells)))
        iters[j] = int(vals[0])
        for i in range(k):
            cents[j, i] = (vals[1 + 2 * i], vals[2 + 2 * i])
        actions[j] = vals[-3]
        accepted[j] = bool(int(vals[-2]))
        converged[j] = bool(int(vals[-1]))
    return iters, cents, actions, accepted, converged


def read_scan(path):
    """Returns (x_centers (nx,), y_centers (ny,), actions (nx, ny), converged)."""
    _, rows = _read_table(path, ["ix", "iy", "cx", "cy", "action", "converged"])
    parsed = []
    for lineno, cells in rows:
        cx, cy, action = _floats(path, lineno, cells, [2, 3, 4])
        try:
            ix, iy, conv = int(cells[0]), int(cells[1]), int(cells[5])
        except ValueError:
            raise ParseError(path, "bad integer cell", row=lineno) from None
        parsed.append((ix, iy, cx, cy, action, bool(conv)))
    nx = max(p[0] for p in parsed) + 1
    ny = max(p[1] for p in parsed) + 1
    if len(parsed) != nx * ny:
        raise ParseError(path, f"expected {nx * ny} cells, got {len(parsed)}")
    xs = np.empty(nx)
    ys = np.empty(ny)
    actions = np.full((nx, ny), np.nan)
    converged = np.zeros((nx, ny), dtype=bool)
    for ix, iy, cx, cy, action, conv in parsed:
        xs[ix] = cx
        ys[iy] = cy
        actions[ix, iy] = action
        converged[ix, iy] = conv
    return xs, ys, actions, converged


def read_minima(path):
    """Returns an (n, 3) array of (cx, cy, action) rows; n may be 0."""
    try:
        _, rows = _read_table(path, ["ix", "iy", "cx", "cy", "action"])
    except ParseError as e:
        if e.row == 2 and "no data rows" in str(e):
            return np.empty((0, 3))
        raise
    out = np.empty((len(rows), 3))
    for j, (lineno, cells) in enumerate(rows):
        out[j] = _floats(path, lineno, cells, [2, 3, 4])
    return out


def read_acf(path):
    """Returns (lags (n,), values (n,))."""
    _, rows = _read_table(path, ["lag", "value"])
    lags = np.empty(len(rows), dtype=int)
    values = np.empty(len(rows))
    for j, (lineno, cells) in enumerate(rows):
        try:
            lags[j] = int(cells[0])
        except ValueError:
            raise ParseError(path, f"bad lag {cells[0]!r}", row=lineno) from None
        values[j] = _floats(path, lineno, cells, [1])[0]
    return lags, values

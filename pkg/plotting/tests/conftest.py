import numpy as np
import pytest


def fmt(x):
    return f"{float(x):.17g}"


def write_trajectory_file(path, times, q, p, hs):
    lines = ["t,landmark,qx,qy,px,py,hamiltonian"]
    for s, t in enumerate(times):
        for i in range(q.shape[1]):
            lines.append(
                ",".join([fmt(t), str(i), fmt(q[s, i, 0]), fmt(q[s, i, 1]),
                          fmt(p[s, i, 0]), fmt(p[s, i, 1]), fmt(hs[s])])
            )
    path.write_text("\n".join(lines) + "\n")


def write_chain_file(path, cents, actions, accepted, converged):
    k = cents.shape[1]
    header = ["iter"]
    for i in range(1, k + 1):
        header += [f"h{i}x", f"h{i}y"]
    header += ["action", "accepted", "converged"]
    lines = [",".join(header)]
    for j in range(len(actions)):
        cells = [str(j)]
        for i in range(k):
            cells += [fmt(cents[j, i, 0]), fmt(cents[j, i, 1])]
        cells += [fmt(actions[j]), str(int(accepted[j])), str(int(converged[j]))]
        lines.append(",".join(cells))
    path.write_text("\n".join(lines) + "\n")


def write_scan_file(path, xs, ys, actions, converged):
    lines = ["ix,iy,cx,cy,action,converged"]
    for ix in range(len(xs)):
        for iy in range(len(ys)):
            lines.append(
                ",".join([str(ix), str(iy), fmt(xs[ix]), fmt(ys[iy]),
                          fmt(actions[ix, iy]), str(int(converged[ix, iy]))])
            )
    path.write_text("\n".join(lines) + "\n")


def write_acf_file(path, lags, values):
    lines = ["lag,value"] + [f"{int(l)},{fmt(v)}" for l, v in zip(lags, values)]
    path.write_text("\n".join(lines) + "\n")


@pytest.fixture
def straight_trajectory_file(tmp_path):
    n = 11
    times = np.linspace(0, 1, n)
    q = np.zeros((n, 1, 2))
    q[:, 0, 0] = times
    p = np.zeros((n, 1, 2))
    p[:, 0, 0] = 1.0
    hs = np.full(n, 0.5)
    path = tmp_path / "straight.csv"
    write_trajectory_file(path, times, q, p, hs)
    return path


@pytest.fixture
def small_chain_file(tmp_path):
    rng = np.random.default_rng(0)
    n = 50
    cents = rng.normal(scale=0.4, size=(n, 1, 2))
    actions = rng.uniform(1.5, 3.5, n)
    accepted = rng.random(n) < 0.6
    accepted[0] = True
    converged = np.ones(n, dtype=bool)
    converged[7] = False
    path = tmp_path / "chain.csv"
    write_chain_file(path, cents, actions, accepted, converged)
    return path


@pytest.fixture
def small_scan_file(tmp_path):
    xs = np.array([-0.5, 0.0, 0.5])
    ys = np.array([-0.5, 0.5])
    actions = np.array([[2.0, 1.5], [np.nan, 1.0], [1.8, 2.2]])
    converged = np.isfinite(actions)
    path = tmp_path / "scan.csv"
    write_scan_file(path, xs, ys, actions, converged)
    return path


@pytest.fixture
def small_acf_file(tmp_path):
    lags = np.arange(20)
    values = 0.9**lags
    path = tmp_path / "acf.csv"
    write_acf_file(path, lags, values)
    return path

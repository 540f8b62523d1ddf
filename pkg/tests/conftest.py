import numpy as np
import pytest

import selmet as sm


@pytest.fixture(scope="session")
def kp():
    return sm.KernelParams(0.5)


@pytest.fixture(scope="session")
def crisscross():
    return sm.preset_scenario("crisscross")


@pytest.fixture(scope="session")
def pinch():
    return sm.preset_scenario("pinch")


def central_diff(f, x, eps=1e-6):
    """Central finite-difference gradient of scalar f at x (1-D array)."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for j in range(len(x)):
        xp = x.copy()
        xp[j] += eps
        xm = x.copy()
        xm[j] -= eps
        g[j] = (f(xp) - f(xm)) / (2 * eps)
    return g


def random_field(rng, allow_zero=True):
    """A random control field: off, constant, or a few Gaussian bumps."""
    kind = rng.integers(0, 3) if allow_zero else 2
    if kind == 0:
        return sm.NuField.zero()
    if kind == 1:
        return sm.NuField.constant(rng.uniform(0.01, 0.5))
    k = int(rng.integers(1, 4))
    return sm.NuField(
        rng.uniform(-1, 1, (k, 2)),
        rng.uniform(0.03, 0.5),
        float(rng.choice([0.0, rng.uniform(0.0, 0.2)])),
    )


def random_state(rng, max_m=5, p_max=1.0):
    m = int(rng.integers(1, max_m + 1))
    q = rng.uniform(-1.5, 1.5, (m, 2))
    p = rng.uniform(-p_max, p_max, (m, 2))
    return sm.PhaseState(q, p)

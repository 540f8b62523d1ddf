"""Built-in matching scenarios.

The coordinates are documented constants of this package, chosen so the
qualitative behaviour is testable: "crisscross" swaps the vertical order
of two landmarks (reflection-symmetric in x and y), "pinch" pulls two
landmarks to a near-collapse at the origin.
"""

import numpy as np

from .dynamics import IntegratorParams
from .errors import InvalidInputError
from .kernels import KernelParams, NuField
from .shooting import ShootingProblem

# Shared preset parameters: kernel length-scale 0.7 (variance 0.49),
# control-field length-scale 0.2 (sigma_nu_sq 0.04), 100 RK4 steps on [0, 1].
PRESET_SIGMA_K_SQ = 0.49
PRESET_SIGMA_NU_SQ = 0.04
PRESET_N_STEPS = 100

_SCENARIOS = {
    "crisscross": (
        [[0.0, 0.5], [0.0, -0.5]],
        [[0.0, -0.5], [0.0, 0.5]],
    ),
    "pinch": (
        [[0.0, 0.5], [0.0, -0.5]],
        [[0.0, 0.05], [0.0, -0.05]],
    ),
}


def preset_names():
    return sorted(_SCENARIOS)


def preset_scenario(name):
    """ShootingProblem for a named preset, with a single centroid at the origin."""
    if name not in _SCENARIOS:
        raise InvalidInputError(
            f"unknown preset {name!r}; available presets: {', '.join(preset_names())}"
        )
    q0, q1 = _SCENARIOS[name]
    return ShootingProblem(
        q0=np.array(q0),
        q1=np.array(q1),
        field=NuField(np.array([[0.0, 0.0]]), PRESET_SIGMA_NU_SQ),
        kp=KernelParams(PRESET_SIGMA_K_SQ),
        ip=IntegratorParams(n_steps=PRESET_N_STEPS),
    )

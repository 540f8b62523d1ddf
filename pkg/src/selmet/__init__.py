"""Landmark matching with a spatially varying metamorphosis control field.

The engine solves diffeomorphic landmark registration whose template is
allowed to deform where a control field nu(x) is large: geodesic
shooting for the boundary value problem, an action-landscape scanner
over single-centroid control fields, and a preconditioned
Crank-Nicolson sampler inferring where the field should act.
"""

from .diagnostics import (
    AcfResult,
    Histogram1D,
    Histogram2D,
    action_histogram,
    autocorrelation,
    decorrelation_lag,
    heatmap,
    map_estimate,
)
from .dynamics import (
    IntegratorParams,
    PhaseState,
    Trajectory,
    action,
    hamiltonian,
    integrate,
    rhs,
    rhs_jacobian,
)
from .errors import (
    BlowUpError,
    ConfigError,
    DegenerateSeriesError,
    FileFormatError,
    InvalidInputError,
    SamplerInitError,
    SelmetError,
    SolverFailureError,
)
from .kernels import (
    KernelParams,
    NuField,
    kernel_eval,
    kernel_grad,
    nu_eval,
    nu_grad,
    velocity_field_eval,
)
from .landscape import (
    CellMinimum,
    GridSpec,
    ScanResult,
    find_local_minima,
    fraction_in_region,
    lowest_quartile_mask,
    scan_grid,
)
from .presets import preset_names, preset_scenario
from .sampler import Chain, ChainSample, SamplerConfig, accept_test, propose, run_chain
from .shooting import (
    ShootingProblem,
    ShootingResult,
    aimed_momenta,
    default_seeds,
    endpoint_jacobian,
    objective,
    solve_bvp,
    solve_bvp_homotopy,
    solve_bvp_multistart,
    solve_bvp_robust,
)

__version__ = "0.1.0"

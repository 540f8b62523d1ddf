"""Geodesic equations of selective metamorphosis for landmarks.

The phase space is (q, p) with M planar landmark positions q and
conjugate momenta p.  The equations of motion are

    dq_i/dt =  sum_j p_j K(q_i - q_j) + nu(q_i) p_i
    dp_i/dt = -sum_j (p_i . p_j) grad K(q_i - q_j) - 1/2 grad nu(q_i) |p_i|^2

which are Hamilton's equations for

    h(q, p) = 1/2 sum_{ij} K(q_i - q_j) p_i . p_j + 1/2 sum_i nu(q_i) |p_i|^2.

With nu constant the grad-nu term vanishes (classic metamorphosis); with
nu == 0 the system reduces to plain diffeomorphic landmark dynamics.
"""

from dataclasses import dataclass

import numpy as np

from . import _core
from .errors import BlowUpError, InvalidInputError
from .kernels import KernelParams, NuField, _as_points


@dataclass(eq=False)
class PhaseState:
    """Positions q and momenta p of M landmarks, each of shape (M, 2)."""

    q: np.ndarray
    p: np.ndarray

    def __post_init__(self):
        self.q = _as_points(self.q, "q")
        self.p = _as_points(self.p, "p")
        self.validate()

    def validate(self):
        if self.q.shape != self.p.shape:
            raise InvalidInputError(
                f"q and p must have matching shapes, got {self.q.shape} vs {self.p.shape}"
            )
        if self.q.shape[0] < 1:
            raise InvalidInputError("at least one landmark is required")
        if not (np.all(np.isfinite(self.q)) and np.all(np.isfinite(self.p))):
            raise InvalidInputError("phase state has non-finite entries")

    @property
    def n_landmarks(self):
        return self.q.shape[0]


@dataclass(frozen=True)
class IntegratorParams:
    """Fixed-step RK4 settings: n_steps steps from t0 to t1."""

    n_steps: int = 100
    t0: float = 0.0
    t1: float = 1.0

    def __post_init__(self):
        if int(self.n_steps) != self.n_steps or self.n_steps < 1:
            raise InvalidInputError(f"n_steps must be a positive integer, got {self.n_steps}")
        if not (np.isfinite(self.t0) and np.isfinite(self.t1) and self.t1 > self.t0):
            raise InvalidInputError(f"need finite t1 > t0, got t0={self.t0}, t1={self.t1}")


@dataclass(eq=False)
class Trajectory:
    """Time-discretised phase-space path.

    times, hamiltonians: (n_steps+1,); q, p: (n_steps+1, M, 2).
    ``action`` is the trapezoidal quadrature of the hamiltonian series,
    i.e. the reduced path energy.
    """

    times: np.ndarray
    q: np.ndarray
    p: np.ndarray
    hamiltonians: np.ndarray
    action: float

    @property
    def n_steps(self):
        return len(self.times) - 1

    @property
    def n_landmarks(self):
        return self.q.shape[1]

    def state(self, i):
        return PhaseState(self.q[i].copy(), self.p[i].copy())

    def final_state(self):
        return self.state(-1)


def _field_args(field, kp):
    return field.centroids, float(field.sigma_nu_sq), float(field.floor), float(kp.sigma_k_sq)


def rhs(state, field, kp):
    """Phase velocity (dq/dt, dp/dt) at the given state."""
    state.validate()
    dq = np.empty_like(state.q)
    dp = np.empty_like(state.p)
    _core.rhs(state.q, state.p, *_field_args(field, kp), dq, dp)
    return dq, dp


def hamiltonian(state, field, kp):
    """Conserved energy: kinetic kernel term plus the control-field term."""
    state.validate()
    return float(_core.hamiltonian(state.q, state.p, *_field_args(field, kp)))


def rhs_jacobian(state, field, kp):
    """Jacobian of rhs w.r.t. the flattened phase vector [q.ravel(), p.ravel()].

    Shape (4M, 4M); used by the forward-sensitivity shooting solver.
    """
    state.validate()
    M = state.n_landmarks
    A = np.empty((4 * M, 4 * M))
    _core.rhs_jacobian(state.q, state.p, *_field_args(field, kp), A)
    return A


def integrate(state, field, kp, ip=IntegratorParams()):
    """Integrate the geodesic equations with classical fixed-step RK4.

    Parameters
    ----------
    state: initial PhaseState at time ip.t0.
    field, kp: control field and kernel parameters.
    ip: integrator settings.

    Returns a Trajectory holding every intermediate state, the
    Hamiltonian series and the accumulated action.  Raises BlowUpError
    (carrying the step index) if the state becomes non-finite.
    """
    state.validate()
    qs, ps, hs, blow = _core.rk4_path(
        state.q, state.p, *_field_args(field, kp), float(ip.t0), float(ip.t1), int(ip.n_steps)
    )
    if blow >= 0:
        raise BlowUpError(blow)
    times = ip.t0 + (ip.t1 - ip.t0) * (np.arange(ip.n_steps + 1) / ip.n_steps)
    act = float(np.trapezoid(hs, times))
    return Trajectory(times=times, q=qs, p=ps, hamiltonians=hs, action=act)


def action(traj, field, kp):
    """Path energy: trapezoidal quadrature of the Hamiltonian over the stored states.

    The integrand 1/2 (|u_t|_V^2 + sum_i nu(q_i) |p_i|^2) equals the
    Hamiltonian, which this recomputes from the stored states rather
    than trusting traj.hamiltonians.
    """
    n = len(traj.times)
    if n == 0:
        raise InvalidInputError("trajectory has no states")
    args = _field_args(field, kp)
    hs = np.empty(n)
    for i in range(n):
        hs[i] = _core.hamiltonian(traj.q[i], traj.p[i], *args)
    return float(np.trapezoid(hs, traj.times))

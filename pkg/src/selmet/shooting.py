"""Two-point boundary value solver: find initial momenta hitting q1.

Given endpoints q0, q1 and a control field, the solver optimises the
initial momenta p0 so the geodesic launched from (q0, p0) lands on q1 at
t = t1.  The endpoint Jacobian d q(t1) / d p0 comes from the forward
variational system propagated through the same discrete RK4 stages, so
Gauss-Newton steps see the exact derivative of the discrete map.
"""

import logging
from dataclasses import dataclass, replace

import numpy as np

from . import _core
from .dynamics import IntegratorParams, PhaseState, integrate
from .errors import BlowUpError, InvalidInputError, SolverFailureError
from .kernels import KernelParams, NuField, _as_points

logger = logging.getLogger(__name__)

_MU0 = 1e-3
_MU_MIN = 1e-15
_MU_MAX = 1e16


@dataclass(eq=False)
class ShootingProblem:
    """Endpoints, model parameters and solver settings for one solve."""

    q0: np.ndarray
    q1: np.ndarray
    field: NuField
    kp: KernelParams
    ip: IntegratorParams = IntegratorParams()
    tol: float = 1e-6
    max_iters: int = 200
    p0_init: np.ndarray | None = None

    def __post_init__(self):
        self.q0 = _as_points(self.q0, "q0")
        self.q1 = _as_points(self.q1, "q1")
        if self.q0.shape != self.q1.shape:
            raise InvalidInputError(
                f"q0 and q1 must have matching shapes, got {self.q0.shape} vs {self.q1.shape}"
            )
        if self.q0.shape[0] < 1:
            raise InvalidInputError("at least one landmark is required")
        if not (np.isfinite(self.tol) and self.tol > 0):
            raise InvalidInputError(f"tol must be positive, got {self.tol}")
        if self.max_iters < 1:
            raise InvalidInputError(f"max_iters must be >= 1, got {self.max_iters}")
        if self.p0_init is not None:
            self.p0_init = _as_points(self.p0_init, "p0_init")
            if self.p0_init.shape != self.q0.shape:
                raise InvalidInputError("p0_init must match q0 in shape")

    @property
    def n_landmarks(self):
        return self.q0.shape[0]

    def initial_momenta(self):
        if self.p0_init is None:
            return np.zeros_like(self.q0)
        return self.p0_init.copy()


@dataclass(eq=False)
class ShootingResult:
    """Best momenta found, their trajectory and convergence metadata."""

    p0: np.ndarray
    trajectory: object
    residual: float
    action: float
    iterations: int
    converged: bool


def _coerce_momenta(p0, prob):
    p0 = _as_points(p0, "p0")
    if p0.shape != prob.q0.shape:
        raise InvalidInputError(f"p0 must have shape {prob.q0.shape}, got {p0.shape}")
    return p0


def _shoot(p0, prob):
    return integrate(PhaseState(prob.q0, p0), prob.field, prob.kp, prob.ip)


def _residual_vector(traj, prob):
    return (traj.q[-1] - prob.q1).ravel()


def objective(p0, prob):
    """Least-squares endpoint mismatch 1/2 sum_i |q_i(t1) - q1_i|^2."""
    p0 = _coerce_momenta(p0, prob)
    r = _residual_vector(_shoot(p0, prob), prob)
    return 0.5 * float(r @ r)


def endpoint_jacobian(p0, prob):
    """d q(t1) / d p0 as a (2M, 2M) matrix, by forward sensitivity."""
    p0 = _coerce_momenta(p0, prob)
    y, S, blow = _core.rk4_endpoint_sensitivity(
        prob.q0,
        p0,
        prob.field.centroids,
        float(prob.field.sigma_nu_sq),
        float(prob.field.floor),
        float(prob.kp.sigma_k_sq),
        float(prob.ip.t0),
        float(prob.ip.t1),
        int(prob.ip.n_steps),
    )
    if blow >= 0:
        raise BlowUpError(blow)
    m2 = 2 * prob.n_landmarks
    return np.ascontiguousarray(S[:m2, :])


def solve_bvp(prob):
    """Levenberg-damped Gauss-Newton on the endpoint residual.

    Iterates p0 <- p0 - (J^T J + mu I)^{-1} J^T r, halving mu after an
    improving step and quadrupling it after a failed one, until the
    endpoint residual norm drops below prob.tol or prob.max_iters trial
    steps have been spent.  Returns the best iterate either way;
    non-convergence is reported through the ``converged`` flag, not an
    exception.  Raises SolverFailureError only when no trajectory can be
    evaluated at all (initial guess or every damped trial blows up).
    """
    p = prob.initial_momenta()
    try:
        traj = _shoot(p, prob)
    except BlowUpError as e:
        raise SolverFailureError(
            f"trajectory from the initial momenta blew up at step {e.step}"
        ) from e
    r = _residual_vector(traj, prob)
    rn = float(np.linalg.norm(r))
    best_p, best_traj, best_rn = p, traj, rn
    iters = 0
    m2 = 2 * prob.n_landmarks
    eye = np.eye(m2)
    mu = _MU0
    n_trial_evals = 0
    n_trial_blowups = 0
    while rn > prob.tol and iters < prob.max_iters:
        try:
            J = endpoint_jacobian(p, prob)
        except BlowUpError:
            break
        JtJ = J.T @ J
        g = J.T @ r
        if not (np.all(np.isfinite(JtJ)) and np.all(np.isfinite(g))):
            break
        improved = False
        while iters < prob.max_iters:
            try:
                step = np.linalg.solve(JtJ + mu * eye, -g)
            except np.linalg.LinAlgError:
                step = None
            iters += 1
            if step is None or not np.all(np.isfinite(step)):
                mu *= 4.0
                if mu > _MU_MAX:
                    break
                continue
            try:
                traj_t = _shoot(p + step.reshape(-1, 2), prob)
            except BlowUpError:
                n_trial_blowups += 1
                mu *= 4.0
                if mu > _MU_MAX:
                    break
                continue
            n_trial_evals += 1
            r_t = _residual_vector(traj_t, prob)
            rn_t = float(np.linalg.norm(r_t))
            if rn_t < rn:
                p = p + step.reshape(-1, 2)
                traj, r, rn = traj_t, r_t, rn_t
                if rn < best_rn:
                    best_p, best_traj, best_rn = p, traj, rn
                mu = max(mu * 0.5, _MU_MIN)
                improved = True
                break
            mu *= 4.0
            if mu > _MU_MAX:
                break
        if not improved:
            break
    if n_trial_blowups > 0 and n_trial_evals == 0 and best_rn > prob.tol:
        raise SolverFailureError("every trial step blew up; no usable update found")
    converged = best_rn <= prob.tol
    if not converged:
        logger.debug(
            "shooting did not converge: residual %.3e after %d iterations", best_rn, iters
        )
    return ShootingResult(
        p0=best_p,
        trajectory=best_traj,
        residual=best_rn,
        action=best_traj.action,
        iterations=iters,
        converged=converged,
    )


def warm_started(prob, p0):
    """Copy of prob starting the solve from the given momenta."""
    return replace(prob, p0_init=None if p0 is None else np.asarray(p0, dtype=float).copy())


def aimed_momenta(prob):
    """Momenta whose initial velocity points each landmark straight at its target.

    Solves (K(q0_i - q0_j) + nu(q0_i) delta_ij) p = q1 - q0; the matrix
    is symmetric positive definite for any valid field.
    """
    q0 = prob.q0
    d = q0[:, None, :] - q0[None, :, :]
    kmat = np.exp(-(d * d).sum(axis=2) / (2.0 * prob.kp.sigma_k_sq))
    nu_diag = np.array(
        [
            _core.nu_at(x, y, prob.field.centroids, prob.field.sigma_nu_sq, prob.field.floor)
            for x, y in q0
        ]
    )
    return np.linalg.solve(kmat + np.diag(nu_diag), prob.q1 - prob.q0)


def default_seeds(prob, swirls=(1.0, 2.0, 4.0)):
    """Deterministic initial-momenta seeds for multi-start solves.

    Zero, the aimed guess, and the aimed guess bent sideways at the
    given strengths in both directions.  The sideways seeds break the
    symmetry that traps descent from zero when landmarks must pass
    around each other; both chiralities are present so mirror-image
    problems see mirror-image seeds, and two strengths cover both gentle
    and strongly swirling solution branches.
    """
    aim = aimed_momenta(prob)
    disp = prob.q1 - prob.q0
    perp = np.stack([-disp[:, 1], disp[:, 0]], axis=1)
    seeds = [np.zeros_like(aim), aim]
    for s in swirls:
        seeds.append(aim + s * perp)
        seeds.append(aim - s * perp)
    return seeds


def solve_bvp_multistart(prob, seeds=None):
    """Run solve_bvp from several seeds; keep the lowest-action converged result.

    The boundary value problem can have several geodesic solutions;
    descent from a single seed is branch- and symmetry-dependent.  The
    default seed set is fixed and order-free, so the outcome is
    independent of where the call happens (safe for parallel grid
    scans).  Falls back to the lowest-residual attempt when no seed
    converges.  ``iterations`` counts all seeds' trial steps together.
    """
    if seeds is None:
        seeds = default_seeds(prob)
    best = None
    total_iters = 0
    n_failures = 0
    for seed in seeds:
        try:
            res = solve_bvp(replace(prob, p0_init=seed))
        except SolverFailureError:
            n_failures += 1
            continue
        total_iters += res.iterations
        best = _better_result(best, res)
    if best is None:
        raise SolverFailureError(f"all {n_failures} seed solves blew up")
    best.iterations = total_iters
    return best


def _better_result(a, b):
    if a is None:
        return b
    if b is None:
        return a
    if a.converged != b.converged:
        return a if a.converged else b
    if a.converged:
        return a if a.action <= b.action else b
    return a if a.residual <= b.residual else b


def solve_bvp_homotopy(prob, extra_floors=(0.5, 0.2, 0.1, 0.05, 0.02, 0.01), start=None):
    """Continuation in the control-field floor, ending at the actual problem.

    A generously lifted field makes the boundary value problem easy;
    each stage warm-starts the next as the lift decays to zero.  Returns
    None when a stage stops converging (the tracked solution branch
    folds before the lift is gone).  ``start`` seeds the first stage
    (zero momenta by default).
    """
    total_iters = 0
    carry = start if start is not None else np.zeros_like(prob.q0)
    res = None
    for lift in (*extra_floors, 0.0):
        fld = replace(prob.field, floor=prob.field.floor + lift)
        stage = replace(prob, field=fld, p0_init=carry)
        try:
            res = solve_bvp(stage)
        except SolverFailureError:
            return None
        total_iters += res.iterations
        if not res.converged:
            return None
        carry = res.p0
    res.iterations = total_iters
    return res


def solve_bvp_robust(prob):
    """Best converged solution from the multi-start seeds and the homotopies.

    Deterministic and independent of call order, so grid scans can run
    any partition of cells in parallel and still match the serial sweep
    exactly.
    """
    best = None
    try:
        best = solve_bvp_multistart(prob)
    except SolverFailureError:
        pass
    best = _better_result(best, solve_bvp_homotopy(prob))
    if best is None or not best.converged:
        best = _better_result(best, solve_bvp_homotopy(prob, start=aimed_momenta(prob)))
    if best is None:
        raise SolverFailureError("no seed or continuation produced a usable trajectory")
    return best

"""Preconditioned Crank-Nicolson sampling of the control-field centroids.

The chain state is the K centroid positions of the control field.  Each
proposal is scored by a fresh shooting solve (warm-started from the
current state's momenta) and accepted with the Metropolis probability
min(1, exp(S_current - S_proposed)), so the chain targets a density
proportional to exp(-S) times the centred Gaussian reference measure of
the pCN proposal.
"""

import logging
from dataclasses import dataclass, field, replace

import numpy as np

from .errors import InvalidInputError, SamplerInitError, SolverFailureError
from .kernels import NuField, _as_points
from .shooting import solve_bvp

logger = logging.getLogger(__name__)


@dataclass(eq=False)
class SamplerConfig:
    """Chain length, proposal step size and prior for the centroid walk."""

    n_samples: int
    n_centroids: int
    beta: float
    sigma_nu_sq: float
    seed: int
    prior_scale: float = 1.0
    initial_centroids: np.ndarray | None = None

    def __post_init__(self):
        if self.n_samples < 1:
            raise InvalidInputError(f"n_samples must be >= 1, got {self.n_samples}")
        if self.n_centroids < 1:
            raise InvalidInputError(f"n_centroids must be >= 1, got {self.n_centroids}")
        if not (0.0 < self.beta <= 1.0):
            raise InvalidInputError(f"beta must be in (0,1], got {self.beta}")
        if not (np.isfinite(self.sigma_nu_sq) and self.sigma_nu_sq > 0):
            raise InvalidInputError(f"sigma_nu_sq must be positive, got {self.sigma_nu_sq}")
        if not (np.isfinite(self.prior_scale) and self.prior_scale > 0):
            raise InvalidInputError(f"prior_scale must be positive, got {self.prior_scale}")
        if not (0 <= int(self.seed) < 2**64):
            raise InvalidInputError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.initial_centroids is None:
            self.initial_centroids = np.zeros((self.n_centroids, 2))
        else:
            self.initial_centroids = _as_points(self.initial_centroids, "initial_centroids")
            if self.initial_centroids.shape[0] != self.n_centroids:
                raise InvalidInputError(
                    f"initial_centroids has {self.initial_centroids.shape[0]} rows, "
                    f"expected n_centroids = {self.n_centroids}"
                )


@dataclass(eq=False)
class ChainSample:
    """Chain state after one step.

    ``accepted`` says whether this step's proposal was taken;
    ``shooting_converged`` whether this step's shooting solve converged
    (a False value marks a proposal rejected for non-convergence; the
    stored centroids and action are then the retained current state).
    """

    centroids: np.ndarray
    action: float
    accepted: bool
    shooting_converged: bool


@dataclass(eq=False)
class Chain:
    """Full sampler output: one ChainSample per step plus the acceptance rate."""

    samples: list
    acceptance_rate: float
    config: SamplerConfig | None = None

    def __len__(self):
        return len(self.samples)

    def actions(self):
        return np.array([s.action for s in self.samples])

    def centroid_array(self):
        """Sampled centroids stacked as (n_samples, K, 2)."""
        return np.stack([s.centroids for s in self.samples])


def propose(h, beta, noise, prior_scale=1.0):
    """pCN proposal beta * (prior_scale * noise) + sqrt(1 - beta^2) * h.

    Preserves the centred Gaussian N(0, prior_scale^2 I) exactly, so
    with a constant likelihood the chain's marginal is that prior.
    """
    if not (0.0 < beta <= 1.0):
        raise InvalidInputError(f"beta must be in (0,1], got {beta}")
    h = np.asarray(h, dtype=float)
    noise = np.asarray(noise, dtype=float)
    if noise.shape != h.shape:
        raise InvalidInputError(f"noise shape {noise.shape} does not match state {h.shape}")
    return beta * (prior_scale * noise) + np.sqrt(1.0 - beta * beta) * h


def accept_test(action_current, action_proposed, u):
    """Metropolis test: accept iff u < min(1, exp(action_current - action_proposed))."""
    if not (np.isfinite(action_current) and np.isfinite(action_proposed)):
        raise InvalidInputError("actions must be finite")
    if not (0.0 <= u < 1.0):
        raise InvalidInputError(f"u must lie in [0, 1), got {u}")
    if action_proposed <= action_current:
        return True
    return u < np.exp(action_current - action_proposed)


def run_chain(cfg, prob_template, action_fn=None):
    """Run the pCN chain over centroid configurations.

    Parameters
    ----------
    cfg: SamplerConfig
        Chain settings; cfg.initial_centroids seeds the state.
    prob_template: ShootingProblem
        Supplies endpoints, kernel and integrator settings; its field is
        replaced by the proposal's field at every step, and each solve is
        warm-started from the current state's converged momenta.
    action_fn: optional callable (K, 2) array -> float
        Test hook replacing the shooting score entirely (used to check
        prior invariance with a constant likelihood).

    Deterministic for a fixed seed: each step draws exactly 2K standard
    normals followed by one uniform.  Proposals whose shooting solve
    fails to converge are rejected and flagged on the stored sample.
    """
    rng = np.random.default_rng(cfg.seed)
    k = cfg.n_centroids
    h = cfg.initial_centroids.copy()

    def score(centroids, p0_warm):
        if action_fn is not None:
            return float(action_fn(centroids)), True, None
        fld = NuField(centroids, cfg.sigma_nu_sq)
        prob = replace(prob_template, field=fld, p0_init=p0_warm)
        try:
            res = solve_bvp(prob)
        except SolverFailureError:
            return np.nan, False, None
        if not res.converged:
            return np.nan, False, None
        return res.action, True, res.p0

    s_cur, ok, p0_cur = score(h, prob_template.p0_init)
    if not ok:
        raise SamplerInitError(
            "shooting for the initial centroid configuration did not converge"
        )
    samples = [ChainSample(h.copy(), s_cur, accepted=True, shooting_converged=True)]
    n_accepted = 0
    n_failed = 0
    for _ in range(cfg.n_samples - 1):
        noise = rng.standard_normal((k, 2))
        u = rng.random()
        h_prop = propose(h, cfg.beta, noise, cfg.prior_scale)
        s_prop, conv, p0_prop = score(h_prop, p0_cur)
        accepted = conv and accept_test(s_cur, s_prop, u)
        if accepted:
            h, s_cur = h_prop, s_prop
            p0_cur = p0_prop
            n_accepted += 1
        if not conv:
            n_failed += 1
            logger.debug("proposal rejected: shooting did not converge at %s", h_prop.ravel())
        samples.append(
            ChainSample(h.copy(), s_cur, accepted=accepted, shooting_converged=conv)
        )
    if n_failed:
        logger.info("%d of %d proposals rejected for non-converged shooting",
                    n_failed, cfg.n_samples - 1)
    rate = n_accepted / (cfg.n_samples - 1) if cfg.n_samples > 1 else 0.0
    return Chain(samples=samples, acceptance_rate=rate, config=cfg)

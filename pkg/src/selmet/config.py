"""Run configuration: YAML parsing, defaults, presets and validation."""

from dataclasses import dataclass, field

import numpy as np
import yaml

from .dynamics import IntegratorParams
from .errors import ConfigError, InvalidInputError
from .kernels import KernelParams, NuField
from .landscape import GridSpec
from .presets import PRESET_N_STEPS, PRESET_SIGMA_K_SQ, PRESET_SIGMA_NU_SQ, preset_names, preset_scenario
from .sampler import SamplerConfig
from .shooting import ShootingProblem


@dataclass(eq=False)
class RunConfig:
    """Everything one CLI run needs; see README for the YAML schema."""

    q0: np.ndarray
    q1: np.ndarray
    scenario: str | None = None
    sigma_k_sq: float = PRESET_SIGMA_K_SQ
    sigma_nu_sq: float = PRESET_SIGMA_NU_SQ
    nu_floor: float = 0.0
    centroids: np.ndarray = field(default_factory=lambda: np.array([[0.0, 0.0]]))
    n_steps: int = PRESET_N_STEPS
    t0: float = 0.0
    t1: float = 1.0
    tol: float = 1e-6
    max_iters: int = 200
    n_samples: int = 5000
    beta: float = 0.2
    prior_scale: float = 1.0
    seed: int = 0
    grid: GridSpec = field(default_factory=GridSpec)
    out_dir: str = "out"

    def __post_init__(self):
        self.q0 = np.asarray(self.q0, dtype=float)
        self.q1 = np.asarray(self.q1, dtype=float)
        self.centroids = np.asarray(self.centroids, dtype=float)

    def to_dict(self):
        d = {
            "kernel": {"sigma_k_sq": float(self.sigma_k_sq)},
            "nu": {
                "sigma_nu_sq": float(self.sigma_nu_sq),
                "floor": float(self.nu_floor),
                "centroids": self.centroids.tolist(),
            },
            "integrator": {"n_steps": int(self.n_steps), "t0": float(self.t0), "t1": float(self.t1)},
            "solver": {"tol": float(self.tol), "max_iters": int(self.max_iters)},
            "sampler": {
                "n_samples": int(self.n_samples),
                "beta": float(self.beta),
                "prior_scale": float(self.prior_scale),
                "seed": int(self.seed),
            },
            "grid": {
                "x_min": float(self.grid.x_min),
                "x_max": float(self.grid.x_max),
                "y_min": float(self.grid.y_min),
                "y_max": float(self.grid.y_max),
                "nx": int(self.grid.nx),
                "ny": int(self.grid.ny),
            },
            "out_dir": self.out_dir,
        }
        if self.scenario is not None:
            d["scenario"] = self.scenario
        else:
            d["scenario"] = {"q0": self.q0.tolist(), "q1": self.q1.tolist()}
        return d

    def __eq__(self, other):
        return isinstance(other, RunConfig) and self.to_dict() == other.to_dict()

    # --- materialised engine objects -------------------------------------

    def kernel_params(self):
        return KernelParams(self.sigma_k_sq)

    def nu_field(self):
        return NuField(self.centroids, self.sigma_nu_sq, self.nu_floor)

    def integrator_params(self):
        return IntegratorParams(n_steps=self.n_steps, t0=self.t0, t1=self.t1)

    def shooting_problem(self):
        return ShootingProblem(
            q0=self.q0,
            q1=self.q1,
            field=self.nu_field(),
            kp=self.kernel_params(),
            ip=self.integrator_params(),
            tol=self.tol,
            max_iters=self.max_iters,
        )

    def sampler_config(self):
        return SamplerConfig(
            n_samples=self.n_samples,
            n_centroids=len(self.centroids),
            beta=self.beta,
            sigma_nu_sq=self.sigma_nu_sq,
            seed=self.seed,
            prior_scale=self.prior_scale,
            initial_centroids=self.centroids,
        )


def validate(cfg):
    """All constraint violations of a RunConfig, as human-readable strings."""
    v = []
    if cfg.q0.ndim != 2 or cfg.q0.shape[1] != 2 or cfg.q0.shape[0] < 1:
        v.append(f"q0 must be a non-empty list of [x, y] pairs, got shape {cfg.q0.shape}")
    if cfg.q1.shape != cfg.q0.shape:
        v.append(f"q1 must match q0 in shape, got {cfg.q1.shape} vs {cfg.q0.shape}")
    for name, arr in (("q0", cfg.q0), ("q1", cfg.q1), ("centroids", cfg.centroids)):
        if not np.all(np.isfinite(arr)):
            v.append(f"{name} has non-finite entries")
    if cfg.centroids.ndim != 2 or cfg.centroids.shape[1] != 2 or cfg.centroids.shape[0] < 1:
        v.append(f"centroids must be a non-empty list of [x, y] pairs, got shape {cfg.centroids.shape}")
    if not cfg.sigma_k_sq > 0:
        v.append(f"kernel.sigma_k_sq must be > 0, got {cfg.sigma_k_sq}")
    if not cfg.sigma_nu_sq > 0:
        v.append(f"nu.sigma_nu_sq must be > 0, got {cfg.sigma_nu_sq}")
    if not cfg.nu_floor >= 0:
        v.append(f"nu.floor must be >= 0, got {cfg.nu_floor}")
    if cfg.n_steps < 1:
        v.append(f"integrator.n_steps must be >= 1, got {cfg.n_steps}")
    if not cfg.t1 > cfg.t0:
        v.append(f"integrator needs t1 > t0, got t0={cfg.t0}, t1={cfg.t1}")
    if not cfg.tol > 0:
        v.append(f"solver.tol must be > 0, got {cfg.tol}")
    if cfg.max_iters < 1:
        v.append(f"solver.max_iters must be >= 1, got {cfg.max_iters}")
    if cfg.n_samples < 1:
        v.append(f"sampler.n_samples must be >= 1, got {cfg.n_samples}")
    if not (0 < cfg.beta <= 1):
        v.append(f"beta must be in (0,1], got {cfg.beta}")
    if not cfg.prior_scale > 0:
        v.append(f"sampler.prior_scale must be > 0, got {cfg.prior_scale}")
    if not (0 <= cfg.seed < 2**64):
        v.append(f"sampler.seed must be a 64-bit unsigned integer, got {cfg.seed}")
    if not cfg.grid.x_max > cfg.grid.x_min:
        v.append("grid needs x_max > x_min")
    if not cfg.grid.y_max > cfg.grid.y_min:
        v.append("grid needs y_max > y_min")
    if cfg.grid.nx < 1 or cfg.grid.ny < 1:
        v.append(f"grid.nx and grid.ny must be >= 1, got {cfg.grid.nx}x{cfg.grid.ny}")
    return v


def _section(raw, name):
    sec = raw.get(name, {})
    if sec is None:
        sec = {}
    if not isinstance(sec, dict):
        raise ConfigError(f"config section {name!r} must be a mapping, got {type(sec).__name__}")
    return sec


def config_from_dict(raw):
    """Build a RunConfig from a nested dict: preset first, explicit keys override."""
    if not isinstance(raw, dict):
        raise ConfigError(f"config root must be a mapping, got {type(raw).__name__}")
    known = {"scenario", "kernel", "nu", "integrator", "solver", "sampler", "grid", "out_dir"}
    unknown = set(raw) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "scenario" not in raw:
        raise ConfigError("config must name a scenario (preset name or inline {q0, q1})")
    scenario = raw["scenario"]
    kw = {}
    if isinstance(scenario, str):
        try:
            prob = preset_scenario(scenario)
        except InvalidInputError as e:
            raise ConfigError(str(e)) from e
        kw.update(
            scenario=scenario,
            q0=prob.q0,
            q1=prob.q1,
            sigma_k_sq=PRESET_SIGMA_K_SQ,
            sigma_nu_sq=PRESET_SIGMA_NU_SQ,
            n_steps=PRESET_N_STEPS,
        )
    elif isinstance(scenario, dict) and {"q0", "q1"} <= set(scenario):
        kw.update(scenario=None, q0=np.asarray(scenario["q0"], dtype=float),
                  q1=np.asarray(scenario["q1"], dtype=float))
    else:
        raise ConfigError(
            f"scenario must be one of {preset_names()} or an inline mapping with q0 and q1"
        )

    kernel = _section(raw, "kernel")
    if "sigma_k_sq" in kernel:
        kw["sigma_k_sq"] = float(kernel["sigma_k_sq"])
    nu = _section(raw, "nu")
    if "sigma_nu_sq" in nu:
        kw["sigma_nu_sq"] = float(nu["sigma_nu_sq"])
    if "floor" in nu:
        kw["nu_floor"] = float(nu["floor"])
    if "centroids" in nu:
        kw["centroids"] = np.asarray(nu["centroids"], dtype=float)
    integ = _section(raw, "integrator")
    for key in ("n_steps", "t0", "t1"):
        if key in integ:
            kw[key] = integ[key]
    solver = _section(raw, "solver")
    if "tol" in solver:
        kw["tol"] = float(solver["tol"])
    if "max_iters" in solver:
        kw["max_iters"] = int(solver["max_iters"])
    samp = _section(raw, "sampler")
    for key in ("n_samples", "beta", "prior_scale", "seed"):
        if key in samp:
            kw[key] = samp[key]
    grid_raw = _section(raw, "grid")
    if grid_raw:
        base = GridSpec()
        grid_kw = {k: getattr(base, k) for k in ("x_min", "x_max", "y_min", "y_max", "nx", "ny")}
        for key in grid_kw:
            if key in grid_raw:
                grid_kw[key] = grid_raw[key]
        try:
            kw["grid"] = GridSpec(**grid_kw)
        except InvalidInputError as e:
            raise ConfigError(str(e), violations=[str(e)]) from e
    if "out_dir" in raw:
        kw["out_dir"] = str(raw["out_dir"])

    cfg = RunConfig(**kw)
    violations = validate(cfg)
    if violations:
        raise ConfigError(
            "invalid configuration:\n  - " + "\n  - ".join(violations), violations=violations
        )
    return cfg


def load_config(path):
    """Parse and validate a YAML config file."""
    try:
        with open(path, "r") as fh:
            text = fh.read()
    except OSError as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        if mark is not None:
            raise ConfigError(
                f"{path}:{mark.line + 1}:{mark.column + 1}: {getattr(e, 'problem', e)}"
            ) from e
        raise ConfigError(f"{path}: {e}") from e
    if raw is None:
        raise ConfigError(f"{path}: config file is empty")
    return config_from_dict(raw)


def write_config(cfg, path):
    with open(path, "w") as fh:
        yaml.safe_dump(cfg.to_dict(), fh, sort_keys=True)

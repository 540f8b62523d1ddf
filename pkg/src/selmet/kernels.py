"""Velocity kernel and control field: values and spatial gradients.

Points and displacement vectors are array-likes of shape (2,); landmark
collections are (M, 2) arrays.  The velocity kernel is the isotropic
Gaussian K(r) = exp(-|r|^2 / (2 sigma_k_sq)).  The control field is a
sum of Gaussian bumps nu(x) = floor + sum_k exp(-|h_k - x|^2 /
sigma_nu_sq); note the missing factor 2 in the second exponent.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidInputError


def _as_vec2(x, name):
    v = np.asarray(x, dtype=float)
    if v.shape != (2,):
        raise InvalidInputError(f"{name} must have shape (2,), got {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} has non-finite components: {v}")
    return v


def _as_points(x, name):
    a = np.asarray(x, dtype=float)
    if a.ndim != 2 or a.shape[1] != 2:
        raise InvalidInputError(f"{name} must have shape (n, 2), got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InvalidInputError(f"{name} has non-finite entries")
    return np.ascontiguousarray(a)


@dataclass(frozen=True)
class KernelParams:
    """Variance of the Gaussian velocity kernel."""

    sigma_k_sq: float = 0.5

    def __post_init__(self):
        s = self.sigma_k_sq
        if not (np.isfinite(s) and s > 0):
            raise InvalidInputError(f"sigma_k_sq must be positive and finite, got {s}")


@dataclass(frozen=True, eq=False)
class NuField:
    """Spatially varying control field: Gaussian bumps plus a constant floor.

    K = 0 centroids with floor = 0 gives nu == 0 (pure diffeomorphic
    matching); K = 0 with floor = c gives the classic constant-control
    model nu == c.
    """

    centroids: np.ndarray = field(default_factory=lambda: np.zeros((0, 2)))
    sigma_nu_sq: float = 0.04
    floor: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "centroids", _as_points(self.centroids, "centroids"))
        if not (np.isfinite(self.sigma_nu_sq) and self.sigma_nu_sq > 0):
            raise InvalidInputError(
                f"sigma_nu_sq must be positive and finite, got {self.sigma_nu_sq}"
            )
        if not (np.isfinite(self.floor) and self.floor >= 0):
            raise InvalidInputError(f"floor must be >= 0 and finite, got {self.floor}")

    @property
    def n_centroids(self):
        return self.centroids.shape[0]

    @classmethod
    def zero(cls):
        """nu == 0: motion is purely diffeomorphic (LDDMM mode)."""
        return cls(np.zeros((0, 2)), 1.0, 0.0)

    @classmethod
    def constant(cls, value):
        """nu == value everywhere (classic metamorphosis mode)."""
        return cls(np.zeros((0, 2)), 1.0, value)


def kernel_eval(r, params):
    """Gaussian kernel value at displacement r; in (0, 1], maximal at r = 0."""
    r = _as_vec2(r, "r")
    return float(np.exp(-(r @ r) / (2.0 * params.sigma_k_sq)))


def kernel_grad(r, params):
    """Gradient of kernel_eval with respect to r."""
    r = _as_vec2(r, "r")
    return (-r / params.sigma_k_sq) * np.exp(-(r @ r) / (2.0 * params.sigma_k_sq))


def nu_eval(x, field):
    """Control-field value at x: floor plus the Gaussian bump sum."""
    x = _as_vec2(x, "x")
    if field.n_centroids == 0:
        return float(field.floor)
    d = field.centroids - x
    return float(field.floor + np.exp(-(d * d).sum(axis=1) / field.sigma_nu_sq).sum())


def nu_grad(x, field):
    """Gradient of nu_eval with respect to x (the floor contributes nothing)."""
    x = _as_vec2(x, "x")
    if field.n_centroids == 0:
        return np.zeros(2)
    d = field.centroids - x
    w = np.exp(-(d * d).sum(axis=1) / field.sigma_nu_sq)
    return (2.0 / field.sigma_nu_sq) * (d * w[:, None]).sum(axis=0)


def velocity_field_eval(x, q, p, params):
    """Velocity field at x induced by landmarks q carrying momenta p.

    Returns sum_i p_i K(x - q_i).
    """
    x = _as_vec2(x, "x")
    q = _as_points(q, "q")
    p = _as_points(p, "p")
    if q.shape != p.shape:
        raise InvalidInputError(
            f"q and p must have matching shapes, got {q.shape} vs {p.shape}"
        )
    if q.shape[0] < 1:
        raise InvalidInputError("at least one landmark is required")
    d = x - q
    w = np.exp(-(d * d).sum(axis=1) / (2.0 * params.sigma_k_sq))
    return (p * w[:, None]).sum(axis=0)

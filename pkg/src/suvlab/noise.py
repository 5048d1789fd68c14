"""Stochastic-field realizations xi(t) on a uniform time grid.

Three field kinds: the white-noise limit with the discrete convention
Var(xi_k) = 1/dt (so the grid autocorrelation approximates a unit-weight
delta), a stationary Ornstein-Uhlenbeck field with autocovariance
exp(-|lag|/tau_t)/(2 tau_t) whose integral is 1 (recovering the white
convention as tau_t -> 0), and constant fields for flow-diagram studies.

Sampling is reproducible: equal (kind, dt, length, seed) give
bit-identical paths. Seeds may be single non-negative integers or
(root, index) sequences; ensembles sub-seed trajectories as
(seed, trajectory_index), which yields independent streams.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field
from typing import Union

import numpy as np

from . import _kernels
from .errors import UnderResolvedNoiseWarning


@dataclass(frozen=True)
class WhiteNoise:
    """Uncorrelated field: independent Normal(0, 1/dt) samples."""


@dataclass(frozen=True)
class OrnsteinUhlenbeck:
    """Exponentially correlated field with correlation time tau_t > 0 (s)."""

    tau_t: float

    def __post_init__(self):
        if not self.tau_t > 0:
            raise ValueError(f"tau_t must be > 0, got {self.tau_t!r}")


@dataclass(frozen=True)
class ConstantField:
    """Time-independent field value; xi = cos(eta) in fixed-point studies."""

    xi: float


NoiseKind = Union[WhiteNoise, OrnsteinUhlenbeck, ConstantField]


@dataclass(frozen=True)
class NoisePath:
    """A sampled field realization: timestep, values, and the seed that made it."""

    dt: float
    values: np.ndarray
    seed: object = None

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        values = np.asarray(self.values, dtype=np.float64)
        if values.ndim != 1 or values.size < 1:
            raise ValueError("values must be a non-empty 1-D array")
        object.__setattr__(self, "values", values)

    def __len__(self):
        return self.values.size


def _ou_coefficients(dt: float, tau_t: float) -> tuple[float, float, float]:
    """(decay alpha, stationary sigma, per-step innovation sigma) for the exact update."""
    alpha = math.exp(-dt / tau_t)
    s_stat = math.sqrt(1.0 / (2.0 * tau_t))
    s_step = s_stat * math.sqrt(1.0 - alpha * alpha)
    return alpha, s_stat, s_step


def sample_white(dt: float, n: int, seed) -> NoisePath:
    """n independent draws from Normal(0, 1/dt)."""
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    values = np.random.default_rng(seed).standard_normal(n) * math.sqrt(1.0 / dt)
    return NoisePath(dt, values, seed)


def sample_ou(dt: float, n: int, tau_t: float, seed) -> NoisePath:
    """Stationary Ornstein-Uhlenbeck path via the exact one-step update.

    The first draw initializes xi from the stationary Normal(0, 1/(2 tau_t));
    dt > tau_t produces a path but warns that the field is under-resolved.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt!r}")
    if not tau_t > 0:
        raise ValueError(f"tau_t must be > 0, got {tau_t!r}")
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n!r}")
    if dt > tau_t:
        warnings.warn(
            f"dt={dt:g} exceeds tau_t={tau_t:g}; the correlated field is "
            "under-resolved on this grid",
            UnderResolvedNoiseWarning,
            stacklevel=2,
        )
    draws = np.random.default_rng(seed).standard_normal(n)
    alpha, s_stat, s_step = _ou_coefficients(dt, tau_t)
    return NoisePath(dt, _kernels.ou_from_draws(draws, alpha, s_stat, s_step), seed)


def sample_constant(xi: float, n: int, dt: float = 1.0) -> NoisePath:
    """n copies of a fixed field value (dt is grid bookkeeping only)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n!r}")
    return NoisePath(dt, np.full(n, float(xi)), None)


def sample_path(kind: NoiseKind, dt: float, n: int, seed) -> NoisePath:
    """Sample whichever field the kind describes."""
    if isinstance(kind, WhiteNoise):
        return sample_white(dt, n, seed)
    if isinstance(kind, OrnsteinUhlenbeck):
        return sample_ou(dt, n, kind.tau_t, seed)
    if isinstance(kind, ConstantField):
        return sample_constant(kind.xi, n, dt)
    raise TypeError(f"unknown noise kind {kind!r}")


def autocorrelation(path: NoisePath, lag: int) -> float:
    """Unbiased sample autocovariance of the path at the given lag (mean removed)."""
    v = path.values
    n = v.size
    if not 0 <= lag < n:
        raise ValueError(f"lag must be in [0, {n}), got {lag!r}")
    d = v - v.mean()
    if lag == 0:
        return float(d @ d) / (n - 1) if n > 1 else 0.0
    return float(d[:-lag] @ d[lag:]) / (n - lag)

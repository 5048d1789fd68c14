"""Time integration of the two-state collapse dynamics.

Covers the polar-angle stochastic equation
    d(theta) = -dt * J_eff * sin(theta) * (cos(theta) - (G/J) xi(t)),
the equivalent non-unitary state-vector evolution, the unitary Rabi
baseline, and constant-field flow/fixed-point analysis. The couplings
enter through the effective rates J_eff = epsilon * N_order * J and
G_eff = epsilon * N_order * G, so collapse times scale as 1/(epsilon*N).

The default scheme is a Heun predictor-corrector, which integrates the
Stratonovich reading of the equation; with the white-noise convention
Var(xi) = 1/dt and G/J = 1 (J = 1/s) this keeps the ensemble mean of
cos(theta) constant during collapse, which is what makes the Born
weights come out right. An Ito-Euler scheme is kept for
convention-sensitivity studies.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .bloch import BlochState, renormalize
from .errors import IllDefinedRatioError, SolverBlowupError

SCHEMES = ("stratonovich_heun", "ito_euler")

OUTCOME_POLE0 = "pole0"
OUTCOME_POLE1 = "pole1"
OUTCOME_UNRESOLVED = "unresolved"

_STATUS_TO_OUTCOME = {
    _kernels.POLE0: OUTCOME_POLE0,
    _kernels.POLE1: OUTCOME_POLE1,
    _kernels.UNRESOLVED: OUTCOME_UNRESOLVED,
}


@dataclass(frozen=True)
class SuvParams:
    """Physical couplings of the collapse model.

    J, G are the self- and stochastic-coupling rates (1/s); epsilon is the
    unitarity-breaking strength, N_order the order-parameter magnitude, and
    omega_rabi the baseline precession frequency for the unitary Hamiltonian.
    """

    J: float = 1.0
    G: float = 1.0
    epsilon: float = 1.0
    n_order: float = 1.0
    omega_rabi: float = 2.0 * math.pi

    def __post_init__(self):
        if self.J < 0 or self.G < 0 or self.epsilon < 0:
            raise ValueError("J, G, epsilon must be >= 0")
        if self.n_order < 1:
            raise ValueError(f"n_order must be >= 1, got {self.n_order!r}")
        if self.omega_rabi < 0:
            raise ValueError("omega_rabi must be >= 0")

    @property
    def j_eff(self) -> float:
        return self.epsilon * self.n_order * self.J

    @property
    def g_eff(self) -> float:
        return self.epsilon * self.n_order * self.G


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float = 1e-4
    scheme: str = "stratonovich_heun"
    max_time: float = 30.0
    pole_epsilon: float = 1e-3
    renormalize_every_step: bool = True

    def __post_init__(self):
        if not self.dt > 0:
            raise ValueError(f"dt must be > 0, got {self.dt!r}")
        if self.scheme not in SCHEMES:
            raise ValueError(f"scheme must be one of {SCHEMES}, got {self.scheme!r}")
        if not self.max_time > 0:
            raise ValueError(f"max_time must be > 0, got {self.max_time!r}")
        if not 0 < self.pole_epsilon < 0.5 * math.pi:
            raise ValueError(
                f"pole_epsilon must lie in (0, pi/2), got {self.pole_epsilon!r}")

    @property
    def n_steps(self) -> int:
        return int(round(self.max_time / self.dt))

    @property
    def is_heun(self) -> bool:
        return self.scheme == "stratonovich_heun"


@dataclass(frozen=True)
class Trajectory:
    """Single-run polar-angle series with its collapse outcome."""

    times: np.ndarray
    thetas: np.ndarray
    outcome: str
    collapse_time: Optional[float]
    noise_seed: object = None


@dataclass(frozen=True)
class FixedPointReport:
    attractive: tuple
    repulsive: tuple


def _check_rates(j_rate: float, g_rate: float) -> None:
    if j_rate == 0.0 and g_rate > 0.0:
        raise IllDefinedRatioError(
            "J = 0 with G > 0 leaves the ratio G/J undefined in the drift")


def theta_drift(theta: float, xi: float, j_rate: float, g_rate: float) -> float:
    """Deterministic drift -J sin(theta) (cos(theta) - (G/J) xi), in rad/s."""
    _check_rates(j_rate, g_rate)
    return -math.sin(theta) * (j_rate * math.cos(theta) - g_rate * xi)


def classify_fixed_points(xi: float, j_rate: float, g_rate: float) -> FixedPointReport:
    """Fixed points of the constant-field flow on [0, pi].

    The poles are always attractive endpoints; an interior repulsive point
    sits at arccos((G/J) xi) when |(G/J) xi| < 1. At |(G/J) xi| = 1 the
    interior point merges with a pole and the repulsive set is empty.
    """
    _check_rates(j_rate, g_rate)
    if j_rate == 0.0:
        raise ValueError("J = 0, G = 0 has no flow to classify")
    u = (g_rate / j_rate) * xi
    repulsive = (math.acos(u),) if -1.0 < u < 1.0 else ()
    return FixedPointReport(attractive=(0.0, math.pi), repulsive=repulsive)


def flow_field(theta_grid: Sequence[float], xi: float,
               j_rate: float, g_rate: float) -> np.ndarray:
    """Tabulate (theta, dtheta/dt) over a theta grid for plot emission."""
    _check_rates(j_rate, g_rate)
    thetas = np.asarray(theta_grid, dtype=np.float64)
    drifts = -np.sin(thetas) * (j_rate * np.cos(thetas) - g_rate * xi)
    return np.column_stack([thetas, drifts])


def even_theta_grid(n_points: int) -> np.ndarray:
    """n_points evenly spaced polar angles covering [0, pi] inclusive."""
    if n_points < 2:
        raise ValueError("n_points must be >= 2")
    return np.linspace(0.0, math.pi, n_points)


def _initial_theta(s0) -> float:
    if isinstance(s0, BlochState):
        return s0.theta
    return BlochState(float(s0)).theta


def evolve_trajectory(s0, params: SuvParams, path, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the polar-angle equation against a noise path.

    s0 may be a BlochState or a bare angle. The path must share the
    integrator timestep and cover the horizon; integration stops at the
    first entry into a pole band of half-width cfg.pole_epsilon.
    """
    theta0 = _initial_theta(s0)
    _check_rates(params.j_eff, params.g_eff)
    if not math.isclose(path.dt, cfg.dt, rel_tol=1e-12):
        raise ValueError(f"path.dt={path.dt!r} does not match cfg.dt={cfg.dt!r}")
    n = cfg.n_steps
    if len(path) < n:
        raise ValueError(f"path has {len(path)} samples, horizon needs {n}")
    thetas = np.empty(n + 1)
    k, status = _kernels.theta_path(
        theta0, path.values[:n], cfg.dt, params.j_eff, params.g_eff,
        math.sin(cfg.pole_epsilon), cfg.is_heun, thetas)
    if status == _kernels.BLOWUP:
        raise SolverBlowupError(f"non-finite polar angle at step {k}")
    outcome = _STATUS_TO_OUTCOME[status]
    collapse_time = k * cfg.dt if outcome != OUTCOME_UNRESOLVED else None
    times = np.arange(k + 1) * cfg.dt
    return Trajectory(times=times, thetas=thetas[:k + 1].copy(), outcome=outcome,
                      collapse_time=collapse_time, noise_seed=path.seed)


def evolve_state_vector(v0, params: SuvParams, path, cfg: IntegratorConfig,
                        include_h0: bool = False) -> np.ndarray:
    """Evolve amplitudes under the non-unitary generator, renormalizing as configured.

    Returns an (n+1, 2) complex array of (c0, c1) rows. The amplitude drift
    is (epsilon N / 2) (J <sigma_z> - G xi) (sigma_z - <sigma_z>), whose
    induced polar angle obeys the same equation as evolve_trajectory with
    the effective rates (epsilon N J, epsilon N G); include_h0 adds the
    unitary precession (omega_rabi / 2) sigma_x.
    """
    v = renormalize(v0)
    _check_rates(params.j_eff, params.g_eff)
    if not math.isclose(path.dt, cfg.dt, rel_tol=1e-12):
        raise ValueError(f"path.dt={path.dt!r} does not match cfg.dt={cfg.dt!r}")
    n = min(len(path), cfg.n_steps)
    out = np.empty((n + 1, 2), dtype=np.complex128)
    k, status = _kernels.state_vector_path(
        complex(v.c0), complex(v.c1), path.values[:n], cfg.dt,
        params.j_eff, params.g_eff, params.omega_rabi, include_h0,
        cfg.renormalize_every_step, cfg.is_heun, out)
    if status == _kernels.BLOWUP:
        raise SolverBlowupError(f"zero or non-finite state norm at step {k}")
    return out


def rabi_evolution(v0, omega: float, dt: float, t_end: float) -> np.ndarray:
    """Unitary baseline: exact per-step rotation under H0 = (hbar omega / 2) sigma_x.

    Returns an (n+1, 2) complex array; the Bloch-sphere orbit is a closed
    circle about the x-axis and the norm is conserved to rounding.
    """
    if not omega > 0:
        raise ValueError(f"omega must be > 0, got {omega!r}")
    if not dt > 0 or not t_end > 0:
        raise ValueError("dt and t_end must be > 0")
    v = renormalize(v0)
    n = int(round(t_end / dt))
    half = 0.5 * omega * dt
    cr, sr = math.cos(half), math.sin(half)
    out = np.empty((n + 1, 2), dtype=np.complex128)
    a0, a1 = complex(v.c0), complex(v.c1)
    out[0] = a0, a1
    for k in range(1, n + 1):
        a0, a1 = cr * a0 - 1j * sr * a1, cr * a1 - 1j * sr * a0
        out[k] = a0, a1
    return out


def sigma_z_series(amplitudes: np.ndarray) -> np.ndarray:
    """<sigma_z>(t) from an (n+1, 2) amplitude array (normalized rowwise)."""
    a = np.asarray(amplitudes)
    p0 = np.abs(a[:, 0]) ** 2
    p1 = np.abs(a[:, 1]) ** 2
    return (p0 - p1) / (p0 + p1)


def theta_series(amplitudes: np.ndarray) -> np.ndarray:
    """Polar angle arccos(<sigma_z>) for each row of an amplitude array."""
    return np.arccos(np.clip(sigma_z_series(amplitudes), -1.0, 1.0))


def pure_python_heun_reference(theta0: float, xi: np.ndarray, dt: float,
                               j_rate: float, g_rate: float) -> np.ndarray:
    """Direct (trig-per-step) evaluation of the Heun scheme, for cross-checks.

    Kept dependency-free and deliberately naive; the compiled kernel must
    agree with this to ~1e-12 per step.
    """
    thetas = np.empty(xi.size + 1)
    thetas[0] = theta = theta0
    for k, x in enumerate(xi):
        f0 = -math.sin(theta) * (j_rate * math.cos(theta) - g_rate * x)
        tp = theta + dt * f0
        f1 = -math.sin(tp) * (j_rate * math.cos(tp) - g_rate * x)
        theta = theta + 0.5 * dt * (f0 + f1)
        if theta < 0.0:
            theta = -theta
        elif theta > math.pi:
            theta = 2.0 * math.pi - theta
        thetas[k + 1] = theta
    return thetas

"""Wigner quasi-probability machinery for the harmonic-crystal model.

Builds discretized Wigner functions from 1-D wavefunctions, evaluates
the quantum-correction series (identically zero for the quadratic
potentials in scope), and evolves fields under the phase-space transport

    dW/dt = 2 i eps N (X - x0) dW/dP - (P / m) dW/dX

in two modes: `as_written_complex` keeps the literal imaginary
coefficient (the field becomes complex and is not conserved; half the
momentum spectrum is amplified, which is a property of the equation and
is surfaced, not hidden), while `real_effective` replaces 2i eps N by
2 eps N. The real mode is classical transport under an attractive
quadratic force: characteristics rotate about (x0, 0) at
omega = sqrt(2 eps N / m), which is what drives the localization
experiments. eps = 0 reduces both modes to free streaming.

Space is discretized with first-order upwind differences (central for
the imaginary-coefficient term, which has no upwind direction), time
with the three-stage SSP Runge-Kutta scheme, guarded by a CFL check.
Boundaries are outflow; mass leaving the grid is monitored.
"""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, replace
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (CflViolationError, GridTooSmallWarning, InvalidStateError,
                     NormalizationError, UnsupportedPotentialError)

MODES = ("real_effective", "as_written_complex")
LIMIT_ORDERS = ("eps_first", "n_first")


@dataclass(frozen=True)
class PhaseGrid:
    """Uniform rectangular grid over (position, momentum)."""

    x_min: float
    x_max: float
    nx: int
    p_min: float
    p_max: float
    np: int

    def __post_init__(self):
        if self.nx < 16 or self.np < 16:
            raise ValueError("nx and np must be >= 16")
        if not (self.x_max > self.x_min and self.p_max > self.p_min):
            raise ValueError("grid bounds must be ordered")

    @property
    def x(self) -> np.ndarray:
        return np.linspace(self.x_min, self.x_max, self.nx)

    @property
    def p(self) -> np.ndarray:
        return np.linspace(self.p_min, self.p_max, self.np)

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.nx - 1)

    @property
    def dp(self) -> float:
        return (self.p_max - self.p_min) / (self.np - 1)

    @classmethod
    def conjugate(cls, x_min: float, x_max: float, nx: int, np_: int,
                  hbar: float = 1.0, periods: int = 1) -> "PhaseGrid":
        """Grid whose momentum span is an integer multiple of pi*hbar/dx.

        On such grids the trapezoid momentum integral cancels every
        finite-shift mode of the discrete Wigner transform exactly, so
        position marginals reproduce |psi|^2 to rounding.
        """
        dx = (x_max - x_min) / (nx - 1)
        half_span = 0.5 * periods * math.pi * hbar / dx
        return cls(x_min, x_max, nx, -half_span, half_span, np_)


@dataclass(frozen=True)
class WignerField:
    """Field values over (x, p) with the grid, current time, and action scale."""

    grid: PhaseGrid
    values: np.ndarray
    time: float = 0.0
    hbar: float = 1.0

    def __post_init__(self):
        values = np.asarray(self.values)
        if values.shape != (self.grid.nx, self.grid.np):
            raise ValueError(
                f"values shape {values.shape} does not match grid "
                f"({self.grid.nx}, {self.grid.np})")
        object.__setattr__(self, "values", values)


@dataclass(frozen=True)
class CrystalParams:
    """Total mass, perturbation strength, order parameter, and localization center."""

    m_tot: float = 1.0
    epsilon: float = 0.0
    n_order: float = 1.0
    x0: float = 0.0

    def __post_init__(self):
        if not self.m_tot > 0:
            raise ValueError(f"m_tot must be > 0, got {self.m_tot!r}")
        if self.n_order < 1:
            raise ValueError(f"n_order must be >= 1, got {self.n_order!r}")

    @property
    def force_rate(self) -> float:
        """Coefficient 2 * epsilon * N multiplying (x - x0) in the momentum term."""
        return 2.0 * self.epsilon * self.n_order


class Marginals(NamedTuple):
    position: np.ndarray
    momentum: np.ndarray
    imag_residual: float


class Moments(NamedTuple):
    mass: float
    x_mean: float
    p_mean: float
    sigma_x: float
    sigma_p: float


def wigner_mass(field: WignerField):
    """Phase-space integral of the field (complex for complex fields)."""
    g = field.grid
    return np.trapezoid(np.trapezoid(field.values, g.p, axis=1), g.x)


def compute_wigner(psi: np.ndarray, grid: PhaseGrid, hbar: float = 1.0) -> WignerField:
    """Discrete Wigner transform of a wavefunction sampled on the grid's x-axis.

    W(x, p) = (1/2 pi hbar) Int dy e^{-i p y / hbar} psi(x + y/2) psi*(x - y/2),
    evaluated with y on the doubled x-lattice (step 2 dx) and psi taken as
    zero outside the grid. Input must be normalized to 1e-6 in the
    discrete L2 norm.
    """
    psi = np.asarray(psi, dtype=np.complex128)
    if psi.shape != (grid.nx,):
        raise ValueError(f"psi must have shape ({grid.nx},), got {psi.shape}")
    dx = grid.dx
    norm = float(np.sum(np.abs(psi) ** 2) * dx)
    if abs(norm - 1.0) > 1e-6:
        raise NormalizationError(f"|psi|^2 integrates to {norm!r}, expected 1")
    nx = grid.nx
    shifts = np.arange(-(nx - 1), nx)
    corr = np.zeros((nx, shifts.size), dtype=np.complex128)
    idx = np.arange(nx)
    for j, m in enumerate(shifts):
        ip = idx + m
        im = idx - m
        ok = (ip >= 0) & (ip < nx) & (im >= 0) & (im < nx)
        corr[ok, j] = psi[ip[ok]] * np.conj(psi[im[ok]])
    phases = np.exp(-2j * np.outer(shifts, grid.p) * dx / hbar)
    w = (dx / (math.pi * hbar)) * (corr @ phases)
    # pure-state transform is real; the +/- shift terms are conjugate pairs
    return WignerField(grid=grid, values=w.real.copy(), time=0.0, hbar=hbar)


def gaussian_wigner(x_mean: float, p_mean: float, sigma_x: float, sigma_p: float,
                    grid: PhaseGrid, hbar: float = 1.0) -> WignerField:
    """Normalized Gaussian field; widths must satisfy sigma_x sigma_p >= hbar/2."""
    if not (sigma_x > 0 and sigma_p > 0):
        raise ValueError("widths must be positive")
    if sigma_x * sigma_p < 0.5 * hbar * (1.0 - 1e-12):
        raise InvalidStateError(
            f"sigma_x*sigma_p = {sigma_x * sigma_p:g} below hbar/2 = {0.5 * hbar:g}")
    x = grid.x[:, None]
    p = grid.p[None, :]
    w = np.exp(-((x - x_mean) ** 2) / (2 * sigma_x**2)
               - (p - p_mean) ** 2 / (2 * sigma_p**2))
    w /= 2.0 * math.pi * sigma_x * sigma_p
    return WignerField(grid=grid, values=w, time=0.0, hbar=hbar)


def quantum_correction(potential_coeffs, field: WignerField) -> np.ndarray:
    """Correction series sum_n (-hbar^2/4)^n / (2n+1)! d^{2n+1}U/dq * d^{2n+1}W/dp.

    Every term carries a third-or-higher derivative of the potential, so
    for the quadratic potentials supported here the result is identically
    zero (returned explicitly, same shape as the field). potential_coeffs
    is a scalar quadratic coefficient or ascending polynomial coefficients;
    degree > 2 raises UnsupportedPotentialError.
    """
    coeffs = np.atleast_1d(np.asarray(potential_coeffs, dtype=np.float64))
    if coeffs.ndim != 1:
        raise ValueError("potential_coeffs must be a scalar or 1-D sequence")
    if coeffs.size > 3 and np.any(coeffs[3:] != 0.0):
        raise UnsupportedPotentialError(
            f"potential degree {coeffs.size - 1} exceeds the quadratic scope")
    return np.zeros_like(field.values, dtype=np.float64)


def _upwind_x(v: np.ndarray, speed_p: np.ndarray, dx: float) -> np.ndarray:
    """Upwind speed_p(p) * dW/dx with zero-inflow (outflow) boundaries."""
    bwd = np.empty_like(v)
    bwd[1:, :] = v[1:, :] - v[:-1, :]
    bwd[0, :] = v[0, :]
    fwd = np.empty_like(v)
    fwd[:-1, :] = v[1:, :] - v[:-1, :]
    fwd[-1, :] = -v[-1, :]
    pos = np.maximum(speed_p, 0.0)[None, :]
    neg = np.minimum(speed_p, 0.0)[None, :]
    return (pos * bwd + neg * fwd) / dx


def _upwind_p(v: np.ndarray, speed_x: np.ndarray, dp: float) -> np.ndarray:
    """Upwind speed_x(x) * dW/dp with zero-inflow (outflow) boundaries."""
    bwd = np.empty_like(v)
    bwd[:, 1:] = v[:, 1:] - v[:, :-1]
    bwd[:, 0] = v[:, 0]
    fwd = np.empty_like(v)
    fwd[:, :-1] = v[:, 1:] - v[:, :-1]
    fwd[:, -1] = -v[:, -1]
    pos = np.maximum(speed_x, 0.0)[:, None]
    neg = np.minimum(speed_x, 0.0)[:, None]
    return (pos * bwd + neg * fwd) / dp


def _central_p(v: np.ndarray, coef_x: np.ndarray, dp: float) -> np.ndarray:
    """Central coef_x(x) * dW/dp for the imaginary-coefficient term."""
    d = np.empty_like(v)
    d[:, 1:-1] = (v[:, 2:] - v[:, :-2]) / (2.0 * dp)
    d[:, 0] = v[:, 1] / (2.0 * dp)
    d[:, -1] = -v[:, -2] / (2.0 * dp)
    return coef_x[:, None] * d


def cfl_timestep(grid: PhaseGrid, params: CrystalParams, safety: float = 0.8) -> float:
    """Largest stable timestep: safety * min(dx/|v_x|max, dp/|v_p|max)."""
    vmax_x = max(abs(grid.p_min), abs(grid.p_max)) / params.m_tot
    vmax_p = params.force_rate * max(abs(grid.x_min - params.x0),
                                     abs(grid.x_max - params.x0))
    dt = math.inf
    if vmax_x > 0:
        dt = min(dt, grid.dx / vmax_x)
    if vmax_p > 0:
        dt = min(dt, grid.dp / vmax_p)
    if not math.isfinite(dt):
        raise ValueError("flow has no advection anywhere; any dt is stable")
    return safety * dt


def evolve_wigner(field: WignerField, params: CrystalParams, dt: float, steps: int,
                  mode: str = "real_effective", renormalize: bool = False) -> WignerField:
    """Advance the field `steps` SSP-RK3 steps of size dt; returns a new field.

    Raises CflViolationError if dt exceeds 0.8 * cell/speed on either axis.
    Warns (once) with GridTooSmallWarning when net boundary outflow passes
    1e-3 of the initial mass. renormalize rescales the field each step so
    its phase-space integral stays 1 (meaningful mainly in the complex
    mode, where the evolution does not conserve it).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}, got {mode!r}")
    if steps < 0:
        raise ValueError("steps must be >= 0")
    g = field.grid
    x = g.x
    p = g.p
    vx = p / params.m_tot
    complex_coef = mode == "as_written_complex" and params.force_rate != 0.0
    # advection form dW/dt + vx dW/dx - a(x) dW/dp = 0 with a = (2 i) eps N (x - x0)
    if steps > 0:
        if not dt > 0:
            raise ValueError(f"dt must be > 0, got {dt!r}")
        vmax_x = float(np.max(np.abs(vx)))
        limit_x = 0.8 * (g.dx / vmax_x) if vmax_x > 0 else math.inf
        vmax_p = params.force_rate * max(abs(g.x_min - params.x0),
                                         abs(g.x_max - params.x0))
        limit_p = 0.8 * (g.dp / vmax_p) if vmax_p > 0 else math.inf
        bound = min(limit_x, limit_p)
        if dt > bound * (1.0 + 1e-9):
            raise CflViolationError(
                f"dt={dt:g} exceeds the stability bound {bound:g} "
                "for this grid and flow")

    v = np.array(field.values,
                 dtype=np.complex128 if complex_coef else field.values.dtype)
    a_real = params.force_rate * (x - params.x0)

    if complex_coef:
        def rhs(u):
            return -_upwind_x(u, vx, g.dx) + 1j * _central_p(u, a_real, g.dp)
    elif params.force_rate != 0.0:
        neg_a = -a_real  # advection speed in p is -a(x)

        def rhs(u):
            return -_upwind_x(u, vx, g.dx) - _upwind_p(u, neg_a, g.dp)
    else:
        def rhs(u):
            return -_upwind_x(u, vx, g.dx)

    mass0 = wigner_mass(field)
    warned = False
    for _ in range(steps):
        k1 = v + dt * rhs(v)
        k2 = 0.75 * v + 0.25 * (k1 + dt * rhs(k1))
        v = v / 3.0 + (2.0 / 3.0) * (k2 + dt * rhs(k2))
        if renormalize:
            total = np.trapezoid(np.trapezoid(v, p, axis=1), x)
            if abs(total) > 0:
                v = v / total
        elif not warned and abs(mass0) > 0:
            total = np.trapezoid(np.trapezoid(v, p, axis=1), x)
            if abs(total - mass0) > 1e-3 * abs(mass0):
                warnings.warn(
                    f"boundary outflow reached {abs(total - mass0) / abs(mass0):.2e} "
                    "of the initial mass; consider a larger grid",
                    GridTooSmallWarning, stacklevel=2)
                warned = True
    return WignerField(grid=g, values=v, time=field.time + steps * dt, hbar=field.hbar)


def marginals(field: WignerField) -> Marginals:
    """Trapezoid marginals over momentum and position.

    Complex fields are reduced through their real part; the magnitude of
    the largest imaginary entry is reported alongside.
    """
    g = field.grid
    v = field.values
    residual = float(np.max(np.abs(v.imag))) if np.iscomplexobj(v) else 0.0
    vr = v.real if np.iscomplexobj(v) else v
    return Marginals(position=np.trapezoid(vr, g.p, axis=1),
                     momentum=np.trapezoid(vr, g.x, axis=0),
                     imag_residual=residual)


def phase_space_moments(field: WignerField) -> Moments:
    """Mass, centroid, and second moments of |W| (normalized internally)."""
    g = field.grid
    w = np.abs(field.values)
    pos = np.trapezoid(w, g.p, axis=1)
    mom = np.trapezoid(w, g.x, axis=0)
    mass = float(np.trapezoid(pos, g.x))
    if mass <= 0:
        raise ValueError("field has no mass")
    x_mean = float(np.trapezoid(pos * g.x, g.x) / mass)
    p_mean = float(np.trapezoid(mom * g.p, g.p) / mass)
    var_x = float(np.trapezoid(pos * (g.x - x_mean) ** 2, g.x) / mass)
    var_p = float(np.trapezoid(mom * (g.p - p_mean) ** 2, g.p) / mass)
    return Moments(mass=mass, x_mean=x_mean, p_mean=p_mean,
                   sigma_x=math.sqrt(max(var_x, 0.0)),
                   sigma_p=math.sqrt(max(var_p, 0.0)))


def localization_widths(field: WignerField) -> tuple[float, float]:
    """(sigma_x_eff, sigma_p_eff): second moments of |W| about its centroid."""
    m = phase_space_moments(field)
    return m.sigma_x, m.sigma_p


@dataclass(frozen=True)
class LimitPoint:
    eps: float
    n_order: float
    sigma_x_eff: float
    sigma_p_eff: float
    centroid_x: float
    centroid_p: float
    mass: float


def limit_experiment(order: str, eps_sequence: Sequence[float],
                     n_sequence: Sequence[float], base: CrystalParams,
                     field0: WignerField, dt: Optional[float], t_end: float
                     ) -> list[LimitPoint]:
    """Width table probing the order of the eps -> 0 and N -> infinity limits.

    eps_first takes the eps limit first: rows traverse eps_sequence at
    N = n_sequence[0], so the force products eps*N shrink and transport
    dominates (momentum profile frozen, position spreading). n_first takes
    the N limit first: rows traverse n_sequence at eps = eps_sequence[0],
    the products grow, and the quadratic force converts position structure
    into momentum structure (centroid and width collapse toward x0).

    Each row evolves a copy of field0 in real_effective mode to t_end;
    dt=None picks a CFL-stable step per row. Sequences must be monotone
    (eps non-increasing, N non-decreasing).
    """
    if order not in LIMIT_ORDERS:
        raise ValueError(f"order must be one of {LIMIT_ORDERS}, got {order!r}")
    eps_seq = [float(e) for e in eps_sequence]
    n_seq = [float(n) for n in n_sequence]
    if not eps_seq or not n_seq:
        raise ValueError("sequences must be non-empty")
    if any(e2 > e1 for e1, e2 in zip(eps_seq, eps_seq[1:])):
        raise ValueError("eps_sequence must be non-increasing")
    if any(n2 < n1 for n1, n2 in zip(n_seq, n_seq[1:])):
        raise ValueError("n_sequence must be non-decreasing")

    if order == "eps_first":
        rows = [(e, n_seq[0]) for e in eps_seq]
    else:
        rows = [(eps_seq[0], n) for n in n_seq]

    out = []
    for eps, n_order in rows:
        params = replace(base, epsilon=eps, n_order=n_order)
        if t_end > 0:
            if dt is None:
                try:
                    step = min(cfl_timestep(field0.grid, params, safety=0.72), t_end)
                except ValueError:
                    step = t_end
            else:
                step = dt
            n_steps = max(1, int(math.ceil(t_end / step)))
            step = t_end / n_steps
            evolved = evolve_wigner(field0, params, step, n_steps,
                                    mode="real_effective")
        else:
            evolved = field0
        m = phase_space_moments(evolved)
        out.append(LimitPoint(eps=eps, n_order=n_order,
                              sigma_x_eff=m.sigma_x, sigma_p_eff=m.sigma_p,
                              centroid_x=m.x_mean, centroid_p=m.p_mean,
                              mass=m.mass))
    return out

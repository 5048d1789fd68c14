"""Monte Carlo ensembles over collapse trajectories and their statistics.

Trajectory i draws its noise from the sub-seeded stream (seed, i), so an
ensemble is a pure function of its config: results are bit-identical
across runs, execution orders, and worker counts. Worker blocks have a
fixed size and partial sums are reduced in block order, which keeps
floating-point accumulation deterministic under threading.

After a trajectory is absorbed at a pole it keeps contributing its pole
value (+1 or -1) to the ensemble mean of <sigma_z> at later record
times; the statistics-conservation check concerns the whole measurement
interval, not just the surviving trajectories.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np

from . import _kernels
from .dynamics import IntegratorConfig, SuvParams, _check_rates
from .errors import HorizonTooShortError, SolverBlowupError
from .noise import ConstantField, NoiseKind, OrnsteinUhlenbeck, WhiteNoise, _ou_coefficients

_BLOCK = 512  # trajectories per work unit; fixed so threading cannot reorder sums


@dataclass(frozen=True)
class EnsembleConfig:
    m: int
    theta0: float
    params: SuvParams
    noise: NoiseKind
    integrator: IntegratorConfig
    seed: int
    record_stride: int = 100

    def __post_init__(self):
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m!r}")
        if not 0.0 <= self.theta0 <= math.pi:
            raise ValueError(f"theta0 must lie in [0, pi], got {self.theta0!r}")
        if self.record_stride < 1:
            raise ValueError("record_stride must be >= 1")
        if int(self.seed) < 0:
            raise ValueError("seed must be a non-negative integer")


@dataclass(frozen=True)
class EnsembleResult:
    count_pole0: int
    count_pole1: int
    count_unresolved: int
    collapse_times: np.ndarray  # length m; NaN for unresolved trajectories
    record_times: np.ndarray
    mean_sigma_z: np.ndarray
    config: EnsembleConfig

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def empirical_p0(self) -> float:
        return self.count_pole0 / self.config.m


@dataclass(frozen=True)
class BornTest:
    expected_p0: float
    empirical_p0: float
    z_score: float
    passed: bool
    threshold_sigma: float = 4.0


def _worker_count(workers: Optional[int]) -> int:
    cap = os.environ.get("SUVLAB_THREADS")
    requested = workers if workers is not None else (os.cpu_count() or 1)
    if cap:
        requested = min(requested, int(cap))
    return max(1, requested)


def _run_block(cfg: EnsembleConfig, lo: int, hi: int, n_max: int, n_rec: int):
    """Integrate trajectories [lo, hi); returns counts, collapse times, z-sum."""
    p = cfg.params
    it = cfg.integrator
    stride = cfg.record_stride
    s_band = math.sin(it.pole_epsilon)
    heun = it.is_heun
    j, g = p.j_eff, p.g_eff
    kind = cfg.noise

    counts = [0, 0, 0]
    tcol = np.full(hi - lo, np.nan)
    zsum = np.zeros(n_rec + 1)
    rec = np.empty(n_rec + 1)

    if isinstance(kind, WhiteNoise):
        scale = math.sqrt(1.0 / it.dt)
    elif isinstance(kind, OrnsteinUhlenbeck):
        alpha, s_stat, s_step = _ou_coefficients(it.dt, kind.tau_t)

    for i in range(lo, hi):
        if isinstance(kind, ConstantField):
            c, k, status = _kernels.traj_const(
                kind.xi, cfg.theta0, n_max, it.dt, j, g, s_band, heun, rec, stride)
        else:
            rng = np.random.default_rng([cfg.seed, i])
            if isinstance(kind, WhiteNoise):
                c, k, status = _kernels.traj_white(
                    rng, cfg.theta0, n_max, it.dt, scale, j, g, s_band, heun,
                    rec, stride)
            else:
                c, k, status = _kernels.traj_ou(
                    rng, cfg.theta0, n_max, it.dt, alpha, s_stat, s_step,
                    j, g, s_band, heun, rec, stride)
        if status == _kernels.BLOWUP:
            raise SolverBlowupError(f"trajectory {i}: non-finite angle at step {k}")
        counts[status] += 1
        if status != _kernels.UNRESOLVED:
            tcol[i - lo] = k * it.dt
            pole = 1.0 if status == _kernels.POLE0 else -1.0
            last = (k - 1) // stride if k >= 1 else 0
            rec[last + 1:] = pole
        zsum += rec
    return counts, tcol, zsum


def run_ensemble(cfg: EnsembleConfig, workers: Optional[int] = None) -> EnsembleResult:
    """Run m independent trajectories and aggregate outcome statistics.

    workers > 1 parallelizes over fixed-size trajectory blocks (the
    SUVLAB_THREADS environment variable caps the count); results are
    identical for every worker count.
    """
    _check_rates(cfg.params.j_eff, cfg.params.g_eff)
    it = cfg.integrator
    n_max = it.n_steps
    n_rec = n_max // cfg.record_stride
    record_times = np.arange(n_rec + 1) * (cfg.record_stride * it.dt)

    blocks = [(lo, min(lo + _BLOCK, cfg.m)) for lo in range(0, cfg.m, _BLOCK)]
    nw = _worker_count(workers)
    if nw > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=nw) as pool:
            parts = list(pool.map(
                lambda b: _run_block(cfg, b[0], b[1], n_max, n_rec), blocks))
    else:
        parts = [_run_block(cfg, lo, hi, n_max, n_rec) for lo, hi in blocks]

    counts = [0, 0, 0]
    collapse_times = np.empty(cfg.m)
    zsum = np.zeros(n_rec + 1)
    for (lo, hi), (c, tcol, zs) in zip(blocks, parts):
        counts = [a + b for a, b in zip(counts, c)]
        collapse_times[lo:hi] = tcol
        zsum += zs
    return EnsembleResult(
        count_pole0=counts[_kernels.POLE0],
        count_pole1=counts[_kernels.POLE1],
        count_unresolved=counts[_kernels.UNRESOLVED],
        collapse_times=collapse_times,
        record_times=record_times,
        mean_sigma_z=zsum / cfg.m,
        config=cfg,
    )


def born_statistics_test(result: EnsembleResult, threshold_sigma: float = 4.0) -> BornTest:
    """Binomial z-test of the pole-0 rate against the Born weight cos^2(theta0/2).

    Requires fewer than 1% unresolved trajectories; raises
    HorizonTooShortError otherwise.
    """
    cfg = result.config
    m = cfg.m
    if result.count_unresolved / m >= 0.01:
        raise HorizonTooShortError(
            f"{result.count_unresolved}/{m} trajectories unresolved; "
            "extend max_time before testing statistics")
    expected = math.cos(0.5 * cfg.theta0) ** 2
    empirical = result.count_pole0 / m
    se = math.sqrt(expected * (1.0 - expected) / m)
    z = (empirical - expected) / se if se > 0 else 0.0
    return BornTest(expected_p0=expected, empirical_p0=empirical, z_score=z,
                    passed=abs(z) < threshold_sigma, threshold_sigma=threshold_sigma)


def martingale_check(result: EnsembleResult) -> float:
    """Max deviation of the ensemble mean <sigma_z>(t) from its initial value."""
    series = result.mean_sigma_z
    if series.size == 0:
        raise ValueError("result has an empty mean series")
    return float(np.max(np.abs(series - math.cos(result.config.theta0))))


@dataclass(frozen=True)
class GjRatioPoint:
    ratio: float
    empirical_p0: float
    count_unresolved: int


@dataclass(frozen=True)
class TauPoint:
    tau_t: float
    empirical_p0: float
    deviation_sigma: float


@dataclass(frozen=True)
class ScalingPoint:
    scale: float
    median_collapse_time: float


def gj_ratio_sweep(ratios: Sequence[float], theta0: float,
                   base: EnsembleConfig, workers: Optional[int] = None
                   ) -> list[GjRatioPoint]:
    """Ensembles at G = ratio * J for each ratio, recording the pole-0 rate.

    The timestep is rescaled per row to dt / max(1, ratio) so the fastest
    rate stays resolved in the noise-dominated regime.
    """
    rows = []
    for ratio in ratios:
        if not ratio > 0:
            raise ValueError(f"ratios must be > 0, got {ratio!r}")
        params = replace(base.params, G=ratio * base.params.J)
        integ = replace(base.integrator, dt=base.integrator.dt / max(1.0, ratio))
        cfg = replace(base, theta0=theta0, params=params, integrator=integ)
        res = run_ensemble(cfg, workers)
        rows.append(GjRatioPoint(ratio=float(ratio), empirical_p0=res.empirical_p0,
                                 count_unresolved=res.count_unresolved))
    return rows


def tau_sweep(tau_values: Sequence[float], theta0: float,
              base: EnsembleConfig, workers: Optional[int] = None) -> list[TauPoint]:
    """Ensembles under correlated noise, reporting the Born deviation in
    binomial standard errors per correlation time."""
    expected = math.cos(0.5 * theta0) ** 2
    rows = []
    for tau in tau_values:
        cfg = replace(base, theta0=theta0, noise=OrnsteinUhlenbeck(tau_t=float(tau)))
        res = run_ensemble(cfg, workers)
        se = math.sqrt(expected * (1.0 - expected) / cfg.m)
        rows.append(TauPoint(tau_t=float(tau), empirical_p0=res.empirical_p0,
                             deviation_sigma=(res.empirical_p0 - expected) / se))
    return rows


def scaling_sweep(rate_scales: Sequence[float], theta0: float,
                  base: EnsembleConfig, workers: Optional[int] = None
                  ) -> tuple[list[ScalingPoint], float]:
    """Median collapse time per epsilon*N scale, plus the log-log slope.

    In the deterministic limit (G = 0) the dynamics are autonomous in
    (epsilon N J) * t, so the slope is -1; theta0 = pi/2 is excluded there
    because the equator is a stationary point.
    """
    if base.params.G == 0 and math.isclose(theta0, 0.5 * math.pi, abs_tol=1e-12):
        raise ValueError("theta0 = pi/2 never collapses in the deterministic limit")
    rows = []
    for scale in rate_scales:
        if not scale > 0:
            raise ValueError(f"rate scales must be > 0, got {scale!r}")
        params = replace(base.params, epsilon=base.params.epsilon * scale)
        cfg = replace(base, theta0=theta0, params=params)
        res = run_ensemble(cfg, workers)
        med = float(np.nanmedian(res.collapse_times))
        rows.append(ScalingPoint(scale=float(scale), median_collapse_time=med))
    if len(rows) < 2:
        return rows, float("nan")
    scales = np.array([r.scale * base.params.epsilon * base.params.n_order
                       for r in rows])
    medians = np.array([r.median_collapse_time for r in rows])
    slope = float(np.polyfit(np.log(scales), np.log(medians), 1)[0])
    return rows, slope


def frozen_noise_exit_probability(theta0: float, tau_t: float) -> float:
    """Quenched-field prediction for the pole-0 rate at large correlation time.

    For tau_t far above the collapse time the field is effectively frozen
    at its stationary draw xi ~ Normal(0, 1/(2 tau_t)); the trajectory
    flows to pole 0 exactly when theta0 < arccos(xi), so
    p0 = P(xi < cos theta0). Independent of the integrators.
    """
    if not tau_t > 0:
        raise ValueError(f"tau_t must be > 0, got {tau_t!r}")
    return 0.5 * (1.0 + math.erf(math.cos(theta0) * math.sqrt(tau_t)))

"""Prototype: theta-SDE kernels to calibrate acceptance thresholds before the real build."""
import math
import time

import numpy as np
from numba import njit


@njit(cache=True, nogil=True)
def theta_chunk_heun(theta, xi, dt, j_rate, g_rate, pole_eps):
    """Integrate len(xi) Heun steps; return (theta, local_step_of_collapse or -1)."""
    lo = pole_eps
    hi = math.pi - pole_eps
    if theta <= lo or theta >= hi:
        return theta, 0
    for k in range(xi.shape[0]):
        x = xi[k]
        f0 = -math.sin(theta) * (j_rate * math.cos(theta) - g_rate * x)
        tp = theta + dt * f0
        f1 = -math.sin(tp) * (j_rate * math.cos(tp) - g_rate * x)
        theta = theta + 0.5 * dt * (f0 + f1)
        if theta < 0.0:
            theta = -theta
        elif theta > math.pi:
            theta = 2.0 * math.pi - theta
        if theta <= lo or theta >= hi:
            return theta, k + 1
    return theta, -1


@njit(cache=True, nogil=True)
def ou_chunk(draws, xi_prev, alpha, s_step):
    out = np.empty_like(draws)
    x = xi_prev
    for k in range(draws.shape[0]):
        x = alpha * x + s_step * draws[k]
        out[k] = x
    return out


def run_white_ensemble(theta0, M, dt, J, G, max_time, pole_eps, seed, chunk=32768):
    n_max = int(round(max_time / dt))
    scale = math.sqrt(1.0 / dt)
    outcomes = np.zeros(M, dtype=np.int8)  # 0 pole0, 1 pole1, 2 unresolved
    tcol = np.full(M, np.nan)
    for i in range(M):
        rng = np.random.default_rng([seed, i])
        theta = theta0
        done = False
        step0 = 0
        while step0 < n_max:
            b = min(chunk, n_max - step0)
            xi = rng.standard_normal(b) * scale
            theta, k = theta_chunk_heun(theta, xi, dt, J, G, pole_eps)
            if k >= 0:
                tcol[i] = (step0 + k) * dt
                outcomes[i] = 0 if theta < 0.5 * math.pi else 1
                done = True
                break
            step0 += b
        if not done:
            outcomes[i] = 2
    return outcomes, tcol


def run_ou_ensemble(theta0, M, dt, J, G, tau, max_time, pole_eps, seed, chunk=32768):
    n_max = int(round(max_time / dt))
    alpha = math.exp(-dt / tau)
    s_stat = math.sqrt(1.0 / (2.0 * tau))
    s_step = s_stat * math.sqrt(1.0 - alpha * alpha)
    outcomes = np.zeros(M, dtype=np.int8)
    tcol = np.full(M, np.nan)
    for i in range(M):
        rng = np.random.default_rng([seed, i])
        theta = theta0
        done = False
        step0 = 0
        xi_prev = 0.0
        first = True
        while step0 < n_max:
            b = min(chunk, n_max - step0)
            draws = rng.standard_normal(b)
            if first:
                xi0 = s_stat * draws[0]
                rest = ou_chunk(draws[1:], xi0, alpha, s_step)
                xi = np.concatenate((np.array([xi0]), rest))
                first = False
            else:
                xi = ou_chunk(draws, xi_prev, alpha, s_step)
            xi_prev = xi[-1]
            theta, k = theta_chunk_heun(theta, xi, dt, J, G, pole_eps)
            if k >= 0:
                tcol[i] = (step0 + k) * dt
                outcomes[i] = 0 if theta < 0.5 * math.pi else 1
                done = True
                break
            step0 += b
        if not done:
            outcomes[i] = 2
    return outcomes, tcol


def report(name, outcomes, tcol, theta0, M):
    p0 = np.count_nonzero(outcomes == 0) / M
    unres = np.count_nonzero(outcomes == 2)
    expected = math.cos(theta0 / 2.0) ** 2
    se = math.sqrt(expected * (1 - expected) / M)
    z = (p0 - expected) / se
    print(f"{name}: p0={p0:.4f} expected={expected:.4f} z={z:+.2f}  unresolved={unres}  "
          f"median_tc={np.nanmedian(tcol):.3f} max_tc={np.nanmax(tcol):.2f}")


if __name__ == "__main__":
    dt = 1e-4
    J = G = 1.0
    M = 10000
    t0 = time.time()
    out, tc = run_white_ensemble(math.pi / 3, 200, dt, J, G, 30.0, 1e-3, 12345)
    print("warmup", time.time() - t0)

    t0 = time.time()
    out, tc = run_white_ensemble(math.pi / 3, M, dt, J, G, 30.0, 1e-3, 12345)
    report("white pi/3", out, tc, math.pi / 3, M)
    print("  time", time.time() - t0)

    t0 = time.time()
    for th in (math.pi / 6, math.pi / 2, 2 * math.pi / 3, 5 * math.pi / 6):
        out, tc = run_white_ensemble(th, M, dt, J, G, 30.0, 1e-3, 777)
        report(f"white {th:.3f}", out, tc, th, M)
    print("  time for 4 ensembles", time.time() - t0)

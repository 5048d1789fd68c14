"""Prototype: upwind/SSP-RK3 phase-space transport to calibrate Wigner criteria."""
import math
import time

import numpy as np


def make_grid(x_min, x_max, nx, p_min, p_max, np_):
    x = np.linspace(x_min, x_max, nx)
    p = np.linspace(p_min, p_max, np_)
    return x, p, x[1] - x[0], p[1] - p[0]


def gaussian_field(x, p, x0, p0, sx, sp):
    X, P = np.meshgrid(x, p, indexing="ij")
    w = np.exp(-((X - x0) ** 2) / (2 * sx**2) - (P - p0) ** 2 / (2 * sp**2))
    return w / (2 * math.pi * sx * sp)


def upwind_x(v, speed_p, dx):
    # d/dx with speed depending on p (columns); outflow (zero ghost)
    out = np.empty_like(v)
    fwd = np.empty_like(v)
    bwd = np.empty_like(v)
    bwd[1:, :] = (v[1:, :] - v[:-1, :]) / dx
    bwd[0, :] = v[0, :] / dx
    fwd[:-1, :] = (v[1:, :] - v[:-1, :]) / dx
    fwd[-1, :] = -v[-1, :] / dx
    pos = np.maximum(speed_p, 0.0)
    neg = np.minimum(speed_p, 0.0)
    out = pos[None, :] * bwd + neg[None, :] * fwd
    return out


def upwind_p(v, speed_x, dp):
    out = np.empty_like(v)
    bwd = np.empty_like(v)
    fwd = np.empty_like(v)
    bwd[:, 1:] = (v[:, 1:] - v[:, :-1]) / dp
    bwd[:, 0] = v[:, 0] / dp
    fwd[:, :-1] = (v[:, 1:] - v[:, :-1]) / dp
    fwd[:, -1] = -v[:, -1] / dp
    pos = np.maximum(speed_x, 0.0)
    neg = np.minimum(speed_x, 0.0)
    out = pos[:, None] * bwd + neg[:, None] * fwd
    return out


def rhs(v, x, p, dx, dp, m, eps_n, x0):
    # dW/dt = -vx dW/dx - vp dW/dp with vx = p/m, vp = -2 eps N (x - x0)
    vx = p / m
    vp = -2.0 * eps_n * (x - x0)
    return -upwind_x(v, vx, dx) - upwind_p(v, vp, dp)


def step_rk3(v, dt, x, p, dx, dp, m, eps_n, x0):
    k1 = v + dt * rhs(v, x, p, dx, dp, m, eps_n, x0)
    k2 = 0.75 * v + 0.25 * (k1 + dt * rhs(k1, x, p, dx, dp, m, eps_n, x0))
    return v / 3.0 + (2.0 / 3.0) * (k2 + dt * rhs(k2, x, p, dx, dp, m, eps_n, x0))


def moments(v, x, p):
    w = np.abs(v)
    mass = np.trapezoid(np.trapezoid(w, p, axis=1), x)
    mx = np.trapezoid(np.trapezoid(w, p, axis=1) * x, x) / mass
    mp = np.trapezoid(np.trapezoid(w, x, axis=0) * p, p) / mass
    sx = math.sqrt(np.trapezoid(np.trapezoid(w, p, axis=1) * (x - mx) ** 2, x) / mass)
    sp = math.sqrt(np.trapezoid(np.trapezoid(w, x, axis=0) * (p - mp) ** 2, p) / mass)
    return mass, mx, mp, sx, sp


def run(v, t_end, x, p, dx, dp, m, eps_n, x0, cfl=0.8):
    vmax_x = max(abs(p[0]), abs(p[-1])) / m
    vmax_p = 2.0 * eps_n * max(abs(x[0] - x0), abs(x[-1] - x0))
    dt = cfl * min(dx / vmax_x if vmax_x > 0 else np.inf,
                   dp / vmax_p if vmax_p > 0 else np.inf)
    n = int(math.ceil(t_end / dt))
    dt = t_end / n
    for _ in range(n):
        v = step_rk3(v, dt, x, p, dx, dp, m, eps_n, x0)
    return v, n


if __name__ == "__main__":
    # ---- criterion 9: free spreading on 256x256 within 1% at t* = m sx0/sp ----
    for L_x, L_p, sx0, sp0 in [(5.0, 3.2, 1.0, 1.0), (6.0, 3.5, 1.0, 1.0),
                               (4.5, 3.0, 1.0, 1.0), (5.0, 4.0, 1.0, 1.0)]:
        x, p, dx, dp = make_grid(-L_x, L_x, 256, -L_p, L_p, 256)
        w0 = gaussian_field(x, p, 0.0, 0.0, sx0, sp0)
        m = 1.0
        _, _, _, sx_i, sp_i = moments(w0, x, p)
        tstar = m * sx_i / sp_i
        t0 = time.time()
        w, nst = run(w0, tstar, x, p, dx, dp, m, 0.0, 0.0)
        mass, mx, mp, sx_f, sp_f = moments(w, x, p)
        expect = sx_i**2 + (tstar * sp_i / m) ** 2
        err = (sx_f**2 - expect) / expect
        print(f"Lx={L_x} Lp={L_p}: steps={nst} mass={mass:.6f} "
              f"sx2_err={err*100:+.2f}%  ({time.time()-t0:.1f}s)")

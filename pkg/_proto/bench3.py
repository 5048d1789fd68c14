import math
import time

import numpy as np
from numba import njit

# ---- reference: straight Heun on theta ----


@njit(nogil=True)
def ref_path(theta0, xi, dt, j_rate, g_rate):
    th = np.empty(xi.shape[0] + 1)
    th[0] = theta0
    theta = theta0
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
        th[k + 1] = theta
    return th


# ---- rotation-state Heun ----


@njit(nogil=True, fastmath=True, inline="always")
def _rot(s, c, h):
    # sin/cos of the small increment h; exact fallback for large steps
    if h > 0.25 or h < -0.25:
        sh = math.sin(h)
        ch = math.cos(h)
    else:
        h2 = h * h
        sh = h * (1.0 - h2 / 6.0 * (1.0 - h2 / 20.0))
        ch = 1.0 - h2 * 0.5 * (1.0 - h2 / 12.0 * (1.0 - h2 / 30.0))
    s2 = s * ch + c * sh
    c2 = c * ch - s * sh
    return s2, c2


@njit(nogil=True, fastmath=True)
def rot_path(theta0, xi, dt, j_rate, g_rate):
    th = np.empty(xi.shape[0] + 1)
    th[0] = theta0
    s = math.sin(theta0)
    c = math.cos(theta0)
    for k in range(xi.shape[0]):
        x = xi[k]
        f0 = -s * (j_rate * c - g_rate * x)
        sp, cp = _rot(s, c, dt * f0)
        f1 = -sp * (j_rate * cp - g_rate * x)
        s, c = _rot(s, c, 0.5 * dt * (f0 + f1))
        if s < 0.0:
            s = -s
        r2 = s * s + c * c
        fix = 1.5 - 0.5 * r2
        s *= fix
        c *= fix
        th[k + 1] = math.atan2(s, c)
    return th


@njit(nogil=True, fastmath=True)
def rot_speed(theta0, xi, dt, j_rate, g_rate, c_band):
    s = math.sin(theta0)
    c = math.cos(theta0)
    for k in range(xi.shape[0]):
        x = xi[k]
        f0 = -s * (j_rate * c - g_rate * x)
        sp, cp = _rot(s, c, dt * f0)
        f1 = -sp * (j_rate * cp - g_rate * x)
        s, c = _rot(s, c, 0.5 * dt * (f0 + f1))
        if s < 0.0:
            s = -s
        r2 = s * s + c * c
        fix = 1.5 - 0.5 * r2
        s *= fix
        c *= fix
        if c >= c_band or c <= -c_band:
            return s, c, k + 1
    return s, c, -1


@njit(nogil=True, fastmath=True)
def rot_inline_speed(rng, theta0, n_max, scale, dt, j_rate, g_rate, c_band):
    s = math.sin(theta0)
    c = math.cos(theta0)
    for k in range(n_max):
        x = rng.standard_normal() * scale
        f0 = -s * (j_rate * c - g_rate * x)
        sp, cp = _rot(s, c, dt * f0)
        f1 = -sp * (j_rate * cp - g_rate * x)
        s, c = _rot(s, c, 0.5 * dt * (f0 + f1))
        if s < 0.0:
            s = -s
        r2 = s * s + c * c
        fix = 1.5 - 0.5 * r2
        s *= fix
        c *= fix
        if c >= c_band or c <= -c_band:
            return s, c, k + 1
    return s, c, -1


n = 200_000
rng = np.random.default_rng(42)
xi = rng.standard_normal(n) * 100.0  # dt=1e-4 white noise
a = ref_path(math.pi / 3, xi, 1e-4, 1.0, 1.0)
b = rot_path(math.pi / 3, xi, 1e-4, 1.0, 1.0)
print("max |ref - rot| over path:", np.max(np.abs(a - b)))

big = np.ascontiguousarray(np.tile(xi, 20))
rot_speed(math.pi / 3, xi[:10], 1e-4, 1e-9, 1e-9, math.cos(1e-3))
t = time.time()
rot_speed(math.pi / 3, big, 1e-4, 1e-9, 1e-9, math.cos(1e-3))
print(f"rot kernel (array noise): {(time.time()-t)/big.size*1e9:.1f} ns/step")

g = np.random.default_rng(5)
rot_inline_speed(g, math.pi / 3, 10, 100.0, 1e-4, 1e-9, 1e-9, math.cos(1e-3))
t = time.time()
out = rot_inline_speed(g, math.pi / 3, 4_000_000, 100.0, 1e-4, 1e-9, 1e-9, math.cos(1e-3))
print(f"rot kernel (inline noise): {(time.time()-t)/4e6*1e9:.1f} ns/step")

import math
import time

import numpy as np
from numba import njit


@njit(nogil=True)
def draw_loop(rng, n):
    s = 0.0
    for _ in range(n):
        s += rng.standard_normal()
    return s


@njit(nogil=True, fastmath=True)
def traj_inline(rng, theta0, n_max, dt, scale, j_rate, g_rate, pole_eps):
    lo = pole_eps
    hi = math.pi - pole_eps
    theta = theta0
    for k in range(n_max):
        x = rng.standard_normal() * scale
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


# stream equality: numba Generator vs numpy
r1 = np.random.default_rng([9, 4])
r2 = np.random.default_rng([9, 4])
ref = r2.standard_normal(1000)
got = np.array([float(r1.standard_normal()) for _ in range(0)])  # placeholder


@njit
def take(rng, n):
    out = np.empty(n)
    for i in range(n):
        out[i] = rng.standard_normal()
    return out


got = take(r1, 1000)
print("stream equal numba vs numpy:", np.array_equal(got, ref))

rng = np.random.default_rng(3)
draw_loop(rng, 10)
t = time.time()
draw_loop(rng, 4_000_000)
print(f"numba scalar standard_normal: {(time.time()-t)/4e6*1e9:.1f} ns/draw")

rng = np.random.default_rng(3)
traj_inline(rng, 1.0, 10, 1e-4, 100.0, 1.0, 1.0, 1e-3)
t = time.time()
th, k = traj_inline(rng, math.pi / 3, 4_000_000, 1e-4, 100.0, 1e-9, 1e-9, 1e-3)
print(f"full inline step: {(time.time()-t)/4e6*1e9:.1f} ns/step")

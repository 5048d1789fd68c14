import math
import time

import numpy as np
from numba import njit


@njit(nogil=True)
def kern_plain(theta, xi, dt, j_rate, g_rate, pole_eps):
    lo = pole_eps
    hi = math.pi - pole_eps
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


@njit(nogil=True, fastmath=True)
def kern_fast(theta, xi, dt, j_rate, g_rate, pole_eps):
    lo = pole_eps
    hi = math.pi - pole_eps
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


n = 4_000_000
rng = np.random.default_rng(1)
xi = rng.standard_normal(n) * 100.0
kern_plain(1.0, xi[:10], 1e-4, 1e-9, 1e-9, 1e-3)
kern_fast(1.0, xi[:10], 1e-4, 1e-9, 1e-9, 1e-3)
t = time.time()
kern_plain(1.0, xi, 1e-4, 1e-9, 1e-9, 1e-3)
print(f"plain:    {(time.time()-t)/n*1e9:.1f} ns/step")
t = time.time()
kern_fast(1.0, xi, 1e-4, 1e-9, 1e-9, 1e-3)
print(f"fastmath: {(time.time()-t)/n*1e9:.1f} ns/step")
t = time.time()
rng.standard_normal(n)
print(f"noise:    {(time.time()-t)/n*1e9:.1f} ns/draw")
t = time.time()
for i in range(2000):
    np.random.default_rng([123, i])
print(f"default_rng([s,i]): {(time.time()-t)/2000*1e6:.1f} us each")

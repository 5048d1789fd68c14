import math
import time

import numpy as np
from numba import njit

C6 = 1.0 / 6.0
C20 = 1.0 / 20.0
C12 = 1.0 / 12.0
C30 = 1.0 / 30.0


@njit(nogil=True, fastmath=True)
def rot_v2(rng, theta0, n_max, scale, dt, j_rate, g_rate, c_band, renorm_every):
    s = math.sin(theta0)
    c = math.cos(theta0)
    half_dt = 0.5 * dt
    for k in range(n_max):
        x = rng.standard_normal() * scale
        f0 = -s * (j_rate * c - g_rate * x)
        h = dt * f0
        if -0.25 < h < 0.25:
            h2 = h * h
            sh = h * (1.0 - h2 * C6)
            ch = 1.0 - h2 * 0.5 * (1.0 - h2 * C12)
        else:
            sh = math.sin(h)
            ch = math.cos(h)
        sp = s * ch + c * sh
        cp = c * ch - s * sh
        f1 = -sp * (j_rate * cp - g_rate * x)
        h = half_dt * (f0 + f1)
        if -0.25 < h < 0.25:
            h2 = h * h
            sh = h * (1.0 - h2 * C6 * (1.0 - h2 * C20))
            ch = 1.0 - h2 * 0.5 * (1.0 - h2 * C12 * (1.0 - h2 * C30))
        else:
            sh = math.sin(h)
            ch = math.cos(h)
        s, c = s * ch + c * sh, c * ch - s * sh
        if s < 0.0:
            s = -s
        if c >= c_band or c <= -c_band:
            return s, c, k + 1
        if k % renorm_every == 0:
            fix = 1.5 - 0.5 * (s * s + c * c)
            s *= fix
            c *= fix
    return s, c, -1


g = np.random.default_rng(5)
rot_v2(g, math.pi / 3, 10, 100.0, 1e-4, 1e-9, 1e-9, math.cos(1e-3), 1024)
t = time.time()
rot_v2(g, math.pi / 3, 4_000_000, 100.0, 1e-4, 1e-9, 1e-9, math.cos(1e-3), 1024)
print(f"rot_v2 inline: {(time.time()-t)/4e6*1e9:.1f} ns/step")

# realistic ensemble timing at criterion-1 settings
t = time.time()
tot = 0
for i in range(400):
    rng = np.random.default_rng([12345, i])
    s, c, k = rot_v2(rng, math.pi / 3, 300_000, 100.0, 1e-4, 1.0, 1.0, math.cos(1e-3), 1024)
    tot += k
el = time.time() - t
print(f"400 trajectories: {el:.2f} s  mean_steps={tot/400:.0f}  -> per-10k-ensemble {el*25:.0f} s")

import math
import time

import numpy as np
from scipy.integrate import quad

from bench4 import rot_v2


def ens(theta0, M, dt, J, G, max_time, seed):
    n_max = int(round(max_time / dt))
    cb = math.cos(1e-3)
    scale = math.sqrt(1.0 / dt)
    n0 = n1 = nu = 0
    for i in range(M):
        rng = np.random.default_rng([seed, i])
        s, c, k = rot_v2(rng, theta0, n_max, scale, dt, J, G, cb, 1024)
        if k < 0:
            nu += 1
        elif c > 0:
            n0 += 1
        else:
            n1 += 1
    return n0 / M, nu


# continuum exit probability from scale function:
# h(z0) = [S(z0)-S(-zb)]/[S(zb)-S(-zb)], S(z)=int_0^z (1-u^2)^(-alpha) du, alpha=1-J/G^2
def cont_exit(theta0, J, G, band=1e-3):
    alpha = 1.0 - J / G**2
    zb = math.cos(band)
    z0 = math.cos(theta0)

    def f(u):
        return (1.0 - u * u) ** (-alpha)

    S = {}
    for name, z in (("z0", z0), ("zb", zb)):
        val, _ = quad(f, 0.0, z, points=[z], limit=200)
        S[name] = val
    return (S["z0"] + S["zb"]) / (2 * S["zb"])


if __name__ == "__main__":
    th0 = math.pi / 6
    print("continuum exit prob (G=100):", cont_exit(th0, 1.0, 100.0))
    for dt, M in [(1e-6, 4000), (1e-7, 4000), (1e-8, 1000)]:
        t0 = time.time()
        p0, nu = ens(th0, M, dt, 1.0, 100.0, 2.0, 555)
        se = math.sqrt(0.25 / M)
        print(f"dt={dt:.0e} M={M}: p0={p0:.4f} (+-{se:.3f}) unresolved={nu} [{time.time()-t0:.0f}s]")

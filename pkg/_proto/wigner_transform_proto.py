import math

import numpy as np


def compute_wigner(psi, x, p, hbar):
    nx = x.size
    dx = x[1] - x[0]
    mmax = nx - 1
    ms = np.arange(-mmax, mmax + 1)
    # correlation C[i, m] = psi(x_i + m dx) psi*(x_i - m dx)
    C = np.zeros((nx, ms.size), dtype=complex)
    for j, m in enumerate(ms):
        ip = np.arange(nx) + m
        im = np.arange(nx) - m
        ok = (ip >= 0) & (ip < nx) & (im >= 0) & (im < nx)
        C[ok, j] = psi[ip[ok]] * np.conj(psi[im[ok]])
    E = np.exp(-2j * np.outer(ms, p) * dx / hbar)
    W = (dx / (math.pi * hbar)) * (C.T[None, :, :] * 0).sum(0)  # placeholder
    W = (dx / (math.pi * hbar)) * (C @ E)
    return W


def conjugate_p_axis(x, np_, hbar, k=1):
    dx = x[1] - x[0]
    span = k * math.pi * hbar / dx
    return np.linspace(-span / 2, span / 2, np_)


hbar = 1.0
nx = np_ = 256
x = np.linspace(-8, 8, nx)
sx = 1.0
x0w, p0w = 0.4, -0.3
psi = (2 * math.pi * sx**2) ** (-0.25) * np.exp(-((x - x0w) ** 2) / (4 * sx**2) + 1j * p0w * x / hbar)
dx = x[1] - x[0]
print("norm:", np.sum(np.abs(psi) ** 2) * dx)

p = conjugate_p_axis(x, np_, hbar)
W = compute_wigner(psi, x, p, hbar)
print("max |Im W|:", np.max(np.abs(W.imag)))
Wr = W.real

# marginal over p (trapezoid) vs |psi|^2
pos = np.trapezoid(Wr, p, axis=1)
print("max |marginal - |psi|^2|:", np.max(np.abs(pos - np.abs(psi) ** 2)))

# total mass
mass = np.trapezoid(np.trapezoid(Wr, p, axis=1), x)
print("mass:", mass)

# analytic Gaussian Wigner comparison
sp = hbar / (2 * sx)
X, P = np.meshgrid(x, p, indexing="ij")
Wa = np.exp(-((X - x0w) ** 2) / (2 * sx**2) - (P - p0w) ** 2 / (2 * sp**2)) / (math.pi * hbar)
print("max |W - analytic|:", np.max(np.abs(Wr - Wa)))

# momentum marginal vs analytic
mom = np.trapezoid(Wr, x, axis=0)
mom_a = np.exp(-((p - p0w) ** 2) / (2 * sp**2)) / math.sqrt(2 * math.pi * sp**2)
print("max |p-marginal - analytic|:", np.max(np.abs(mom - mom_a)))

"""Independent oracles used to freeze expected values in the tests.

Nothing here touches the integrators: exit probabilities come from the
scale function of the polar-angle diffusion, quenched-field predictions
from the stationary field distribution, and phase-space predictions from
closed-form Gaussian evolution. Keeping these routes separate from the
code under test is the point.
"""
import math

import numpy as np


def scale_function_exit_probability(theta0: float, j_rate: float, g_rate: float,
                                    pole_eps: float, n_quad: int = 200_001) -> float:
    """P(absorb at pole 0) for the white-noise polar diffusion.

    The Stratonovich equation in z = cos(theta) has Ito drift
    z (1-z^2)(J - G^2) and diffusion G (1-z^2); its scale density is
    s'(z) = (1 - z^2)^{J/G^2 - 1}. With absorbing bands at z = +-cos(eps),
    p0 = (S(z0) + S(zb)) / (2 S(zb)) where S(z) = int_0^z s'. The
    substitution z = tanh(v) turns S into int_0^{atanh z} sech^{2J/G^2} v dv,
    a smooth decaying integrand evaluated by trapezoid quadrature.
    """
    if not (j_rate > 0 and g_rate > 0):
        raise ValueError("needs J > 0 and G > 0")
    power = 2.0 * j_rate / g_rate**2
    zb = math.cos(pole_eps)
    z0 = math.cos(theta0)

    def s_of(z: float) -> float:
        v_end = math.atanh(z)
        sign = 1.0 if v_end >= 0 else -1.0
        v = np.linspace(0.0, abs(v_end), n_quad)
        integrand = np.exp(-power * np.log(np.cosh(v)))
        return sign * float(np.trapezoid(integrand, v))

    s_b = s_of(zb)
    return (s_of(z0) + s_b) / (2.0 * s_b)


def quenched_field_p0(theta0: float, tau_t: float) -> float:
    """Frozen-field exit probability P(xi < cos theta0), xi ~ N(0, 1/(2 tau))."""
    return 0.5 * (1.0 + math.erf(math.cos(theta0) * math.sqrt(tau_t)))


def free_gaussian_sigma_x(sigma_x0: float, sigma_p0: float, m: float,
                          t: float) -> float:
    """Width of a freely streaming Gaussian phase-space density."""
    return math.sqrt(sigma_x0**2 + (t * sigma_p0 / m) ** 2)


def rotated_gaussian_moments(d_offset: float, sigma_x0: float, sigma_p0: float,
                             m: float, omega: float, t: float):
    """(centroid offset from x0, sigma_x) after harmonic phase-space rotation.

    Characteristics of the effective-force transport rotate rigidly about
    (x0, 0) at angular rate omega = sqrt(2 eps N / m): position structure
    trades places with momentum structure every quarter period.
    """
    c, s = math.cos(omega * t), math.sin(omega * t)
    centroid = d_offset * c
    sigma_x = math.sqrt((sigma_x0 * c) ** 2 + (sigma_p0 * s / (m * omega)) ** 2)
    return centroid, sigma_x


def deterministic_collapse_time(theta0: float, rate: float, pole_eps: float) -> float:
    """Exact pole-band arrival time for the noise-free flow d(theta)/dt = -rate sin cos.

    Separable: t = [ln tan(theta)] / rate evaluated between the band edge
    and theta0 (toward whichever pole theta0 flows).
    """
    if not 0 < theta0 < 0.5 * math.pi:
        theta0 = math.pi - theta0
        if not 0 < theta0 < 0.5 * math.pi:
            raise ValueError("theta0 must lie strictly inside a hemisphere")
    return (math.log(math.tan(theta0)) - math.log(math.tan(pole_eps))) / rate

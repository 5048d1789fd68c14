"""Two-level states on the Bloch sphere: angle and amplitude forms.

Conventions: theta = 0 is the pointer state |0>, theta = pi is |1>,
and the azimuth phi is fixed to 0 at the poles where it is undefined.
Global phase is discarded; every observable in this package depends
only on (theta, phi). All functions here are pure.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

from .errors import InvalidStateError, SolverBlowupError

TWO_PI = 2.0 * math.pi

# absolute slack for polar-angle domain checks (rounding from upstream trig)
_THETA_SLACK = 1e-9


@dataclass(frozen=True)
class BlochState:
    """Pure two-level state as polar angle theta in [0, pi], azimuth phi in [0, 2*pi)."""

    theta: float
    phi: float = 0.0

    def __post_init__(self):
        theta = float(self.theta)
        if not math.isfinite(theta) or theta < -_THETA_SLACK or theta > math.pi + _THETA_SLACK:
            raise InvalidStateError(f"theta={theta!r} outside [0, pi]")
        theta = min(max(theta, 0.0), math.pi)
        phi = float(self.phi) % TWO_PI
        object.__setattr__(self, "theta", theta)
        object.__setattr__(self, "phi", phi)


class StateVector(NamedTuple):
    """Complex amplitude pair (c0, c1) with |c0|^2 + |c1|^2 = 1 after normalization."""

    c0: complex
    c1: complex


def to_state_vector(s: BlochState) -> StateVector:
    """Map Bloch angles to amplitudes: c0 = cos(theta/2), c1 = e^{i phi} sin(theta/2)."""
    half = 0.5 * s.theta
    return StateVector(complex(math.cos(half)), cmath.exp(1j * s.phi) * math.sin(half))


def from_state_vector(v) -> BlochState:
    """Recover Bloch angles from amplitudes, discarding global phase.

    Accepts a StateVector or any (c0, c1) pair. At the poles phi is
    unconstrained and comes out as 0 (the amplitude product vanishes).

    Raises InvalidStateError for degenerate input with norm^2 < 1e-14.
    """
    c0, c1 = complex(v[0]), complex(v[1])
    n2 = abs(c0) ** 2 + abs(c1) ** 2
    if n2 < 1e-14:
        raise InvalidStateError(f"degenerate amplitudes, |c0|^2+|c1|^2 = {n2:.3e}")
    theta = 2.0 * math.atan2(abs(c1), abs(c0))
    phi = cmath.phase(c1 * c0.conjugate()) % TWO_PI
    return BlochState(theta, phi)


def sigma_z_expectation(s: BlochState) -> float:
    """<sigma_z> = cos(theta), in [-1, 1]."""
    return math.cos(s.theta)


def born_weights(s: BlochState) -> tuple[float, float]:
    """Measurement weights (p0, p1) = (cos^2(theta/2), sin^2(theta/2))."""
    half = 0.5 * s.theta
    return math.cos(half) ** 2, math.sin(half) ** 2


def renormalize(v) -> StateVector:
    """Rescale amplitudes to unit norm, preserving direction.

    Raises SolverBlowupError on zero norm (the non-unitary generator
    can drive amplitudes to zero if renormalization is disabled).
    """
    c0, c1 = complex(v[0]), complex(v[1])
    norm = math.sqrt(abs(c0) ** 2 + abs(c1) ** 2)
    if norm == 0.0 or not math.isfinite(norm):
        raise SolverBlowupError(f"state norm {norm!r} during renormalization")
    return StateVector(c0 / norm, c1 / norm)

"""Ermentrout-Kopell theta neuron driven by instantaneous charge injection.

The neuron moves on the circle, ``dtheta/dt = 1 - cos(theta) + I (1 + cos(theta))``,
and fires when ``theta`` reaches an odd multiple of pi. Angles are kept in
the principal interval (-pi, pi); firing happens at the right end.

A pulse makes the voltage analogue ``v = 1/2 + tan(theta/2)/2`` jump by
``delta_v``. In phase coordinates the jump becomes the PRF

    g(phi, eps) = atan(tan((phi - 1/2) pi) + eps) / pi - (phi - 1/2),

with ``eps = 2 delta_v / sqrt(I)``. Writing ``x = tan((phi - 1/2) pi)`` the
difference ``atan(x + eps) - atan(x)`` equals
``atan2(eps, 1 + x^2 + eps x)``; multiplying both arguments by
``cos^2((phi - 1/2) pi) = sin^2(pi phi)`` gives a form with no cancellation
near the endpoints and no pole:

    g = atan2(eps sin^2(pi phi), 1 - (eps/2) sin(2 pi phi)) / pi.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import EndpointSingularity, InfiniteVoltage, InvalidParameter
from .prf import PhaseResponse


@dataclass(frozen=True)
class ThetaParams:
    drive: float
    delta_v: float = 0.0

    def __post_init__(self):
        if not self.drive > 0.0 or not math.isfinite(self.drive):
            raise InvalidParameter(f"drive I must be > 0, got {self.drive!r}")
        if not self.delta_v >= 0.0:
            raise InvalidParameter(f"delta_v must be >= 0, got {self.delta_v!r}")

    @property
    def eps(self) -> float:
        return 2.0 * self.delta_v / math.sqrt(self.drive)

    @property
    def period(self) -> float:
        return math.pi / math.sqrt(self.drive)


def theta_period(params: ThetaParams) -> float:
    return math.pi / math.sqrt(params.drive)


def _check_theta(theta: float) -> float:
    theta = float(theta)
    if not -math.pi < theta < math.pi:
        raise InfiniteVoltage(f"theta={theta!r} is at (or beyond) a firing angle; v is infinite")
    return theta


def theta_voltage(theta: float) -> float:
    theta = _check_theta(theta)
    return 0.5 + 0.5 * math.tan(theta / 2.0)


def theta_charge_jump(theta: float, delta_v: float) -> float:
    """Angle after the voltage analogue jumps by ``delta_v``."""
    theta = _check_theta(theta)
    if not delta_v >= 0.0:
        raise InvalidParameter(f"delta_v must be >= 0, got {delta_v!r}")
    return 2.0 * math.atan(math.tan(theta / 2.0) + 2.0 * delta_v)


def theta_to_phase(theta: float, drive: float) -> float:
    theta = _check_theta(theta)
    if not drive > 0.0:
        raise InvalidParameter(f"drive I must be > 0, got {drive!r}")
    return 0.5 + math.atan(math.tan(theta / 2.0) / math.sqrt(drive)) / math.pi


def phase_to_theta(phi: float, drive: float) -> float:
    phi = float(phi)
    if not 0.0 < phi < 1.0:
        raise EndpointSingularity(f"phase {phi!r} maps to a firing angle (theta = +-pi)")
    if not drive > 0.0:
        raise InvalidParameter(f"drive I must be > 0, got {drive!r}")
    return 2.0 * math.atan(math.sqrt(drive) * math.tan((phi - 0.5) * math.pi))


# Closed forms. D = 1 - eps sin(2 pi phi) + eps^2 sin^2(pi phi) > 0 is
# (1 + (x + eps)^2) cos^2((phi - 1/2) pi).

def _theta_g(phi, eps):
    s1 = np.sin(np.pi * phi)
    return np.arctan2(eps * s1 * s1, 1.0 - 0.5 * eps * np.sin(2.0 * np.pi * phi)) / np.pi


def _theta_dphi(phi, eps):
    s1 = np.sin(np.pi * phi)
    s2 = np.sin(2.0 * np.pi * phi)
    d = 1.0 - eps * s2 + eps * eps * s1 * s1
    return (eps * s2 - eps * eps * s1 * s1) / d


def _theta_deps(phi, eps):
    s1 = np.sin(np.pi * phi)
    s2 = np.sin(2.0 * np.pi * phi)
    d = 1.0 - eps * s2 + eps * eps * s1 * s1
    return s1 * s1 / (np.pi * d)


def _theta_dphi_deps(phi, eps):
    s1 = np.sin(np.pi * phi)
    s2 = np.sin(2.0 * np.pi * phi)
    d = 1.0 - eps * s2 + eps * eps * s1 * s1
    return (s2 - 2.0 * eps * s1 * s1) / (d * d)


def theta_prf() -> PhaseResponse:
    return PhaseResponse(
        name="theta",
        g=_theta_g,
        dphi=_theta_dphi,
        deps=_theta_deps,
        dphi_deps=_theta_dphi_deps,
        provenance="builtin",
        cacheable=True,
    )

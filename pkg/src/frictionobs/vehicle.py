"""Single-track lateral dynamics with distributed Dahl tire friction.

Instantiates the general ODE-PDE plant for a vehicle cruising at constant
longitudinal speed. Lumped states are lateral velocity and yaw rate; the
distributed states are bristle deflections over the front and rear contact
patches. Slip velocities at the axles are

    v1 = vy + l1 r - vx delta1,    v2 = vy - l2 r - vx delta2,

and the tire forces are pressure-weighted integrals of the deflection
fields. The friction source matrix is diagonal with entries
``-sigma_i |v_i| / mu_i(v_i)`` scaled by the uncertain per-axle parameters;
an optional smoothing ``sqrt(v^2 + eps^2) - eps`` replaces ``|v|`` for
regularized variants (it vanishes at v = 0, so the zero-velocity source is
preserved exactly).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .exceptions import ConfigurationError
from .model import InputSignal, SystemDefinition, ThetaSchedule, trapezoid_weights

__all__ = [
    "VehicleParams",
    "SteeringSpec",
    "build_vehicle_system",
    "pressure_profile",
    "sigma_matrix",
    "smoothed_abs",
    "steering_input",
    "make_steering_signal",
    "tire_forces",
    "DEFAULT_THETA_SCHEDULE",
    "DEFAULT_STEERING",
]

# True friction parameters step from [1.2, 0.8] to [0.6, 0.4] at t = 5 s,
# emulating an abrupt road-friction change (mu-split maneuver).
DEFAULT_THETA_SCHEDULE = ((0.0, (1.2, 0.8)), (5.0, (0.6, 0.4)))


def _unit_mu(_v: float) -> float:
    return 1.0


@dataclass(frozen=True)
class VehicleParams:
    """Benchmark vehicle parameters (defaults: 20 m/s mid-size sedan).

    Lengths in m, mass in kg, inertia in kg m^2, micro-stiffness in 1/m,
    contact pressure in N/m. ``mu1``/``mu2`` are nominal friction-coefficient
    functions of the slip velocity (constant 1 by default, kept callable so
    velocity-dependent laws drop in unchanged).
    """

    v_x: float = 20.0
    m: float = 1300.0
    I_z: float = 2000.0
    l1: float = 1.0
    l2: float = 1.6
    L1_patch: float = 0.11
    L2_patch: float = 0.09
    sigma1: float = 165.0
    sigma2: float = 415.0
    mu1: Callable[[float], float] = _unit_mu
    mu2: Callable[[float], float] = _unit_mu
    p01: float = 3.75e4
    p02: float = 2.86e4
    a1: float = 0.1
    a2: float = 0.1
    theta_schedule: tuple = DEFAULT_THETA_SCHEDULE
    smoothing_eps: float = 0.0

    def __post_init__(self):
        positive = {
            "v_x": self.v_x, "m": self.m, "I_z": self.I_z,
            "l1": self.l1, "l2": self.l2,
            "L1_patch": self.L1_patch, "L2_patch": self.L2_patch,
            "sigma1": self.sigma1, "sigma2": self.sigma2,
            "p01": self.p01, "p02": self.p02,
        }
        for name, value in positive.items():
            if value <= 0.0:
                raise ConfigurationError(f"vehicle parameter {name} must be positive")
        if self.a1 < 0.0 or self.a2 < 0.0:
            raise ConfigurationError("pressure decay parameters must be nonnegative")
        if self.smoothing_eps < 0.0:
            raise ConfigurationError("smoothing_eps must be nonnegative")
        for mu in (self.mu1, self.mu2):
            for v in (-5.0, 0.0, 5.0):
                if mu(v) <= 0.0:
                    raise ConfigurationError("friction coefficient functions must stay positive")

    def theta(self) -> ThetaSchedule:
        return ThetaSchedule.from_pairs(self.theta_schedule)


@dataclass(frozen=True)
class SteeringSpec:
    """Sum-of-sines steering profiles: lists of (amplitude, frequency) pairs."""

    front: Sequence[tuple[float, float]] = ((0.05, 2.0), (0.01, 4.0))
    rear: Sequence[tuple[float, float]] = ()

    def __post_init__(self):
        for terms in (self.front, self.rear):
            for amp, freq in terms:
                if not (math.isfinite(amp) and math.isfinite(freq)):
                    raise ConfigurationError("steering coefficients must be finite")


DEFAULT_STEERING = SteeringSpec()


def pressure_profile(xi: float, p0: float, a: float) -> float:
    """Exponentially decreasing contact pressure ``p0 exp(-a xi)`` on [0, 1]."""
    if np.any(np.asarray(xi) < 0.0) or np.any(np.asarray(xi) > 1.0):
        raise ConfigurationError("pressure profile is defined on xi in [0, 1]")
    return p0 * np.exp(-a * np.asarray(xi, dtype=float))


def smoothed_abs(x: float, eps: float) -> float:
    """|x| for eps = 0, else the smooth surrogate sqrt(x^2 + eps^2) - eps."""
    if eps == 0.0:
        return abs(x)
    return math.sqrt(x * x + eps * eps) - eps


def sigma_matrix(v: np.ndarray, p: VehicleParams) -> np.ndarray:
    """Diagonal friction source matrix; entries are nonpositive for all v."""
    eps = p.smoothing_eps
    s1 = -p.sigma1 * smoothed_abs(float(v[0]), eps) / p.mu1(float(v[0]))
    s2 = -p.sigma2 * smoothed_abs(float(v[1]), eps) / p.mu2(float(v[1]))
    return np.array([[s1, 0.0], [0.0, s2]])


def build_vehicle_system(p: VehicleParams) -> SystemDefinition:
    """Assemble the benchmark plant matrices, kernels, and source functions."""
    A1 = np.array([[0.0, -p.v_x], [0.0, 0.0]])
    A2 = np.array([[1.0, p.l1], [1.0, -p.l2]])
    G1 = -np.array([[1.0 / p.m, 1.0 / p.m], [p.l1 / p.I_z, -p.l2 / p.I_z]])
    G2 = -p.v_x * np.eye(2)
    lam = np.array([p.v_x / p.L1_patch, p.v_x / p.L2_patch])
    front_gain = p.L1_patch * p.sigma1 * p.p01
    rear_gain = p.L2_patch * p.sigma2 * p.p02
    two_eye = 2.0 * np.eye(2)

    def K1(xi: float) -> np.ndarray:
        return np.array([
            [front_gain * math.exp(-p.a1 * xi), 0.0],
            [0.0, rear_gain * math.exp(-p.a2 * xi)],
        ])

    return SystemDefinition(
        n_X=2, n_z=2, n_U=2,
        A1=A1, A2=A2, G1=G1, G2=G2, Lambda=lam,
        Sigma=lambda v: sigma_matrix(v, p),
        h2=lambda v: 2.0 * np.asarray(v, dtype=float),
        h2_inv=lambda y: 0.5 * np.asarray(y, dtype=float),
        h1=None,
        Dh2=lambda v: two_eye,
        K1=K1,
        K2=None,
        K3=None,
    )


def steering_input(t, spec: SteeringSpec = DEFAULT_STEERING):
    """Steering angles [delta1, delta2] and their analytic time derivative.

    Accepts scalar or array ``t``; arrays return shape (..., 2).
    """
    t = np.asarray(t, dtype=float)
    d = [np.zeros_like(t), np.zeros_like(t)]
    dd = [np.zeros_like(t), np.zeros_like(t)]
    for i, terms in enumerate((spec.front, spec.rear)):
        for amp, freq in terms:
            d[i] = d[i] + amp * np.sin(freq * t)
            dd[i] = dd[i] + amp * freq * np.cos(freq * t)
    return np.stack(d, axis=-1), np.stack(dd, axis=-1)


def make_steering_signal(spec: SteeringSpec = DEFAULT_STEERING) -> InputSignal:
    return InputSignal(
        u=lambda t: steering_input(t, spec)[0],
        u_dot=lambda t: steering_input(t, spec)[1],
    )


def tire_forces(zfield: np.ndarray, p: VehicleParams, dxi: float):
    """Per-axle lateral forces: pressure-weighted integrals of the deflections."""
    zfield = np.asarray(zfield, dtype=float)
    w = trapezoid_weights(zfield.shape[0], dxi)
    xi = np.arange(zfield.shape[0]) * dxi
    f1 = p.L1_patch * p.sigma1 * float(w @ (pressure_profile(xi, p.p01, p.a1) * zfield[:, 0]))
    f2 = p.L2_patch * p.sigma2 * float(w @ (pressure_profile(xi, p.p02, p.a2) * zfield[:, 1]))
    return f1, f2

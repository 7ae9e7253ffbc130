"""Finite-dimensional friction-parameter estimator driven by boundary data.

From the measurements a scalar linear parametric model is formed,

    dZ1/dt = theta^T phi + Z2,
    Z1 = sum(Y1),  Z2 = sum(Y2),
    phi = -Lambda Sigma(h2_inv(Y1)) Lambda^-1 Y1,

then first-order filters with gain ``rho`` produce (zeta1, zeta2, varphi),
and a gradient law with integral cost and forgetting factor ``psi`` updates
the estimate:

    dR/dt        = -psi R + varphi varphi^T / (1 + |varphi|^2)
    dQ/dt        = -psi Q - (Z1 - zeta) varphi / (1 + |varphi|^2)
    dtheta_hat/dt = -Gamma (R theta_hat + Q),   zeta = zeta1 + zeta2.

All updates are fully explicit at the solver step; R stays symmetric and
positive semidefinite up to integration tolerance. A windowed Gram-matrix
monitor quantifies persistence of excitation of the filtered regressor.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .exceptions import ConfigurationError
from .model import MeasurementFrame, SystemDefinition

__all__ = [
    "RegressionFrame",
    "FilterState",
    "IdentifierState",
    "IdentifierGains",
    "regression_frame",
    "step_filters",
    "nonadaptive_estimate",
    "step_adaptive_law",
    "pe_monitor",
]


@dataclass(frozen=True)
class RegressionFrame:
    """Scalar outputs and vector regressor of the parametric model at one instant."""

    Z1: float
    Z2: float
    phi: np.ndarray


@dataclass(frozen=True)
class FilterState:
    """States of the three first-order filters."""

    zeta1: float
    zeta2: float
    varphi: np.ndarray

    @classmethod
    def zero(cls, n_z: int) -> "FilterState":
        return cls(zeta1=0.0, zeta2=0.0, varphi=np.zeros(n_z))

    @property
    def zeta(self) -> float:
        return self.zeta1 + self.zeta2


@dataclass(frozen=True)
class IdentifierState:
    """Parameter estimate and the integral-cost accumulators."""

    theta_hat: np.ndarray
    R: np.ndarray
    Q: np.ndarray

    @classmethod
    def zero(cls, n_z: int, theta_hat0=None) -> "IdentifierState":
        th0 = np.zeros(n_z) if theta_hat0 is None else np.array(theta_hat0, dtype=float)
        return cls(theta_hat=th0, R=np.zeros((n_z, n_z)), Q=np.zeros(n_z))


@dataclass(frozen=True)
class IdentifierGains:
    """Filter gain rho, forgetting factor psi, and adaptation gain matrix Gamma."""

    rho: float
    psi: float
    Gamma: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "Gamma", np.array(self.Gamma, dtype=float))
        if self.rho <= 0.0 or self.psi <= 0.0:
            raise ConfigurationError("filter and forgetting gains must be positive")
        G = self.Gamma
        if G.ndim != 2 or G.shape[0] != G.shape[1]:
            raise ConfigurationError("Gamma must be square")
        if np.max(np.abs(G - G.T)) > 1e-12 or np.any(np.linalg.eigvalsh(G) <= 0.0):
            raise ConfigurationError("Gamma must be symmetric positive definite")

    @classmethod
    def scaled_identity(cls, n_z: int, rho: float, psi: float, gamma: float) -> "IdentifierGains":
        return cls(rho=rho, psi=psi, Gamma=gamma * np.eye(n_z))


def regression_frame(m: MeasurementFrame, sys: SystemDefinition) -> RegressionFrame:
    """Reduce a measurement frame to the scalar model outputs and regressor."""
    sig = np.asarray(sys.Sigma(sys.h2_inv(m.Y1)), dtype=float)
    phi = -sys.Lambda * (sig @ (m.Y1 / sys.Lambda))
    return RegressionFrame(Z1=float(np.sum(m.Y1)), Z2=float(np.sum(m.Y2)), phi=phi)


def step_filters(f: FilterState, frame: RegressionFrame, gains: IdentifierGains,
                 dt: float) -> FilterState:
    """One explicit Euler step of the three regression filters."""
    rho = gains.rho
    return FilterState(
        zeta1=f.zeta1 + dt * (-rho * (f.zeta1 - frame.Z1)),
        zeta2=f.zeta2 + dt * (-rho * f.zeta2 + frame.Z2),
        varphi=f.varphi + dt * (-rho * f.varphi + frame.phi),
    )


def nonadaptive_estimate(theta_ref: np.ndarray, f: FilterState) -> float:
    """Filtered prediction of Z1 for a fixed reference parameter vector."""
    return float(np.asarray(theta_ref, dtype=float) @ f.varphi) + f.zeta


def step_adaptive_law(s: IdentifierState, f: FilterState, Z1: float,
                      gains: IdentifierGains, dt: float) -> IdentifierState:
    """One explicit step of the gradient law; all updates use pre-step values."""
    varphi = f.varphi
    denom = 1.0 + float(varphi @ varphi)
    outer = varphi[:, None] * varphi
    R_new = s.R + dt * (-gains.psi * s.R + outer / denom)
    Q_new = s.Q + dt * (-gains.psi * s.Q - ((Z1 - f.zeta) / denom) * varphi)
    th_new = s.theta_hat + dt * (-(gains.Gamma @ (s.R @ s.theta_hat + s.Q)))
    return IdentifierState(theta_hat=th_new, R=R_new, Q=Q_new)


def pe_monitor(varphi_samples: np.ndarray, window: float, dt: float) -> Optional[float]:
    """Smallest eigenvalue of the windowed Gram matrix of the filtered regressor.

    ``varphi_samples`` are uniformly spaced by ``dt``; the Gram matrix is the
    trapezoid integral of ``varphi varphi^T / (1 + |varphi|^2)`` over the last
    ``window`` seconds. Returns None while the history is shorter than the
    window (not ready).
    """
    if window <= 0.0 or dt <= 0.0:
        raise ConfigurationError("pe_monitor needs positive window and dt")
    samples = np.atleast_2d(np.asarray(varphi_samples, dtype=float))
    n_w = int(round(window / dt))
    if samples.shape[0] < n_w + 1:
        return None
    seg = samples[-(n_w + 1):]
    weights = np.full(n_w + 1, dt)
    weights[0] = weights[-1] = 0.5 * dt
    denom = 1.0 + (seg * seg).sum(axis=1)
    gram = np.einsum("j,ja,jb->ab", weights / denom, seg, seg)
    return float(np.linalg.eigvalsh(gram)[0])

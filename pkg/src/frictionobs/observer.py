"""Adaptive state observer driven by boundary measurements.

Mirrors the plant structure but is fed only by the measured ``Y1``, the
input ``U``, and the current parameter estimate:

    dXh/dt = A1 Xh + G1 (K1op zh) + G1 Th Sigma(h2_inv(Y1)) (K2op zh)
             + G1 h1(h2_inv(Y1)) - L1 (h2_inv(Y1) - h2_inv(Y1h))
    dzh/dt = -Lambda dzh/dxi + Th Sigma(h2_inv(Y1)) zh + Y1,   zh(0) = 0
    Y1h    = h2(A2 Xh + G2 U)

The output injection gain L1 makes ``A1 + L1 A2`` Hurwitz; the closed-form
design ``L1 = -(A1 + q I) A2^-1`` places both error poles at ``-q`` when A2
is invertible. The observer PDE may run with deliberately rescaled transport
velocities for the mismatch robustness study.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BlowUpError, ConfigurationError, GainDesignError
from .model import CouplingOperators, PlantState, SystemDefinition
from .solver import Grid, StepperConfig, _advance, _field_rhs, cfl_check, state_norm_h1, state_norm_l2

__all__ = [
    "ObserverState",
    "ObserverGains",
    "ErrorMetrics",
    "design_gain_L1",
    "make_observer_gains",
    "estimated_output",
    "step_observer",
    "error_metrics",
]


@dataclass(frozen=True)
class ObserverState:
    """Estimated lumped vector and field on the plant's grid."""

    t: float
    X_hat: np.ndarray
    z_hat: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "X_hat", np.asarray(self.X_hat, dtype=float))
        object.__setattr__(self, "z_hat", np.asarray(self.z_hat, dtype=float))
        if self.z_hat.ndim != 2:
            raise ConfigurationError("z_hat must be a (n_nodes, n_z) field")
        if np.any(self.z_hat[0] != 0.0):
            raise ConfigurationError("z_hat at the inflow node must be zero")


@dataclass(frozen=True)
class ObserverGains:
    """Output injection gain; ``q`` records the pole location when designed."""

    L1: np.ndarray
    q: float | None = None

    def __post_init__(self):
        object.__setattr__(self, "L1", np.asarray(self.L1, dtype=float))


@dataclass(frozen=True)
class ErrorMetrics:
    """Estimation error summary at one instant."""

    err_norm_X: float
    err_norm_Y: float
    X_tilde: np.ndarray
    theta_tilde_norm: float


def design_gain_L1(A1: np.ndarray, A2: np.ndarray, q: float) -> np.ndarray:
    """Closed-form injection gain ``-(A1 + q I) A2^-1`` (error poles at -q).

    Needs a square invertible A2; otherwise the pair is only detectable in
    general and the gain must be supplied manually.
    """
    A1 = np.asarray(A1, dtype=float)
    A2 = np.asarray(A2, dtype=float)
    n = A1.shape[0]
    if A2.shape != (n, n):
        raise GainDesignError(
            "closed-form design needs a square A2; supply L1 directly for "
            f"A2 of shape {A2.shape}"
        )
    det = np.linalg.det(A2)
    if abs(det) < 1e-12:
        raise GainDesignError("A2 is singular; supply L1 directly")
    return -(A1 + q * np.eye(n)) @ np.linalg.inv(A2)


def make_observer_gains(sys: SystemDefinition, q: float | None = None,
                        L1: np.ndarray | None = None) -> ObserverGains:
    """Build gains from either the pole location q or an explicit L1.

    Verifies at construction that ``A1 + L1 A2`` is Hurwitz.
    """
    if L1 is None:
        if q is None:
            raise ConfigurationError("pass a pole location q or an explicit L1")
        L1 = design_gain_L1(sys.A1, sys.A2, q)
    L1 = np.asarray(L1, dtype=float)
    closed = sys.A1 + L1 @ sys.A2
    eigs = np.linalg.eigvals(closed)
    if np.any(eigs.real >= 0.0):
        raise ConfigurationError(
            f"A1 + L1 A2 is not Hurwitz (eigenvalues {np.sort_complex(eigs)})"
        )
    return ObserverGains(L1=L1, q=q)


def estimated_output(X_hat: np.ndarray, U: np.ndarray, sys: SystemDefinition) -> np.ndarray:
    """Predicted first measurement ``h2(A2 X_hat + G2 U)``."""
    return sys.h2(sys.A2 @ np.asarray(X_hat, dtype=float) + sys.G2 @ np.asarray(U, dtype=float))


def _observer_rhs(Xh, zh, Y1, theta_hat, U, sys, gains, coup, lam_over_dxi,
                  v_meas=None, sig_meas=None):
    """Joint derivative of the observer state at one instant.

    ``v_meas``/``sig_meas`` may be precomputed from Y1 by the caller (they are
    pure functions of the measurement) to avoid redundant evaluations.
    """
    if v_meas is None:
        v_meas = np.asarray(sys.h2_inv(Y1), dtype=float)
    if sig_meas is None:
        sig_meas = np.asarray(sys.Sigma(v_meas), dtype=float)
    coef = theta_hat[:, None] * sig_meas
    drive = coup.k1(zh)
    if coup.has_interior_coupling:
        drive = drive + coef @ coup.k2(zh)
    if sys.h1 is not None:
        drive = drive + sys.h1(v_meas)
    innovation = v_meas - np.asarray(sys.h2_inv(estimated_output(Xh, U, sys)), dtype=float)
    Xdot = sys.A1 @ Xh + sys.G1 @ drive - gains.L1 @ innovation
    zdot = _field_rhs(zh, lam_over_dxi, coef, Y1)
    return Xdot, zdot


def step_observer(obs: ObserverState, Y1: np.ndarray, theta_hat: np.ndarray,
                  U: np.ndarray, sys: SystemDefinition, gains: ObserverGains,
                  grid: Grid, cfg: StepperConfig) -> ObserverState:
    """Advance the observer one step, holding Y1, U, and theta_hat over the step.

    ``cfg.observer_lambda_scale`` rescales the transport velocities used here
    (mismatch robustness mode); the measured signals are zero-order held, so
    under RK4 only the internal states are substage-evaluated.
    """
    if obs.z_hat.shape[0] != grid.n_nodes:
        raise ConfigurationError("observer field does not match the grid")
    lam = sys.Lambda * cfg.observer_lambda_scale
    cour = cfl_check(lam, cfg.dt, grid.dxi)
    if cour > cfg.cfl_limit:
        raise ConfigurationError(
            f"observer Courant number {cour:.4g} exceeds limit {cfg.cfl_limit:g}"
        )
    coup = CouplingOperators.for_system(sys, grid.n_nodes, grid.dxi)
    lam_over_dxi = lam / grid.dxi
    Y1 = np.asarray(Y1, dtype=float)
    theta_hat = np.asarray(theta_hat, dtype=float)
    U = np.asarray(U, dtype=float)

    def rhs(Xh, zh, U_held):
        return _observer_rhs(Xh, zh, Y1, theta_hat, U_held, sys, gains, coup, lam_over_dxi)

    Xn, zn = _advance(obs.X_hat, obs.z_hat, obs.t, cfg.dt, cfg.scheme, rhs, lambda t: U)
    t_next = obs.t + cfg.dt
    if not np.all(np.isfinite(Xn)):
        raise BlowUpError(f"observer lumped state non-finite at t={t_next:g}")
    if not np.all(np.isfinite(zn)):
        raise BlowUpError(f"observer distributed state non-finite at t={t_next:g}")
    return ObserverState(t=t_next, X_hat=Xn, z_hat=zn)


def error_metrics(plant: PlantState, obs: ObserverState, theta_hat: np.ndarray,
                  dxi: float) -> ErrorMetrics:
    """Estimation error norms between matching plant and observer states."""
    if plant.z.shape != obs.z_hat.shape:
        raise ConfigurationError(
            f"grid mismatch: plant field {plant.z.shape} vs observer {obs.z_hat.shape}"
        )
    X_tilde = plant.X - obs.X_hat
    z_tilde = plant.z - obs.z_hat
    theta_tilde = plant.theta - np.asarray(theta_hat, dtype=float)
    return ErrorMetrics(
        err_norm_X=state_norm_l2(X_tilde, z_tilde, dxi),
        err_norm_Y=state_norm_h1(X_tilde, z_tilde, dxi),
        X_tilde=X_tilde,
        theta_tilde_norm=float(np.linalg.norm(theta_tilde)),
    )

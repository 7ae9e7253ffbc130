"""Spatial discretization and time stepping for the coupled ODE-PDE plant.

Space: first-order upwind (backward) differences on a uniform grid over
[0, 1]; all transport velocities are positive so the inflow node at xi = 0
is algebraically pinned to zero rather than evolved. Time: fixed-step
explicit Euler (default) or classic RK4, guarded by a CFL check.

Also provides the trapezoid-based composite norms used for error metrics:
Euclidean + L2 (``state_norm_l2``) and Euclidean + H1 (``state_norm_h1``).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import BlowUpError, ConfigurationError
from .model import (
    CouplingOperators,
    InputSignal,
    PlantState,
    SystemDefinition,
    _ode_rhs,
    trapezoid_weights,
)

__all__ = [
    "Grid",
    "StepperConfig",
    "SCHEMES",
    "upwind_transport",
    "cfl_check",
    "step_plant",
    "state_norm_l2",
    "state_norm_h1",
]

SCHEMES = ("explicit-euler", "rk4")


@dataclass(frozen=True)
class Grid:
    """Uniform grid over [0, 1] with N cells (N + 1 nodes)."""

    N: int

    def __post_init__(self):
        if self.N < 2:
            raise ConfigurationError("grid needs at least 2 cells")

    @property
    def dxi(self) -> float:
        return 1.0 / self.N

    @property
    def n_nodes(self) -> int:
        return self.N + 1

    def nodes(self) -> np.ndarray:
        return np.linspace(0.0, 1.0, self.n_nodes)


@dataclass(frozen=True)
class StepperConfig:
    """Fixed-step explicit integrator settings.

    ``observer_lambda_scale`` rescales the observer's transport velocities
    only (plant stepping ignores it); it exists for the transport-mismatch
    robustness study.
    """

    dt: float
    scheme: str = "explicit-euler"
    cfl_limit: float = 1.0
    observer_lambda_scale: float = 1.0

    def __post_init__(self):
        if self.dt <= 0.0:
            raise ConfigurationError("dt must be positive")
        if self.scheme not in SCHEMES:
            raise ConfigurationError(f"unknown scheme '{self.scheme}', pick one of {SCHEMES}")
        if self.observer_lambda_scale <= 0.0:
            raise ConfigurationError("observer_lambda_scale must be positive")


def cfl_check(Lambda: np.ndarray, dt: float, dxi: float) -> float:
    """Courant number ``max(Lambda) * dt / dxi``; callers reject values above the limit."""
    return float(np.max(Lambda)) * dt / dxi


def upwind_transport(zfield: np.ndarray, Lambda: np.ndarray, dxi: float) -> np.ndarray:
    """Backward-difference approximation of ``Lambda dz/dxi`` per node.

    Node 0 carries zero: the inflow value is pinned, never advanced.
    """
    zfield = np.asarray(zfield, dtype=float)
    out = np.empty_like(zfield)
    out[0] = 0.0
    out[1:] = (zfield[1:] - zfield[:-1]) * (np.asarray(Lambda, dtype=float) / dxi)
    return out


def _field_rhs(zfield, lam_over_dxi, coef, inhom):
    """Semi-discrete field derivative: -upwind transport + coef @ z + inhom.

    ``coef`` is the (n_z, n_z) source matrix, ``inhom`` the xi-independent
    inhomogeneity. Row 0 is identically zero (pinned inflow). Shared by the
    plant and observer steppers so exact-initialization stays exact.
    """
    out = np.empty_like(zfield)
    out[0] = 0.0
    out[1:] = (zfield[:-1] - zfield[1:]) * lam_over_dxi + zfield[1:] @ coef.T + inhom
    return out


def _plant_rhs(X, z, U, theta_vec, sys, coup, lam_over_dxi):
    """Joint time derivative of (X, z) for the plant at one instant."""
    Xdot, v, sig = _ode_rhs(X, U, z, theta_vec, sys, coup)
    coef = theta_vec[:, None] * sig
    zdot = _field_rhs(z, lam_over_dxi, coef, sys.h2(v))
    return Xdot, zdot


def _advance(X, z, t, dt, scheme, rhs, u_of):
    """One explicit step of the coupled system; ``rhs(X, z, U) -> (Xdot, zdot)``.

    RK4 re-evaluates the input at the substage times; the parameter schedule
    is sampled once per step by the caller (left-continuous).
    """
    U0 = u_of(t)
    if scheme == "explicit-euler":
        Xd, zd = rhs(X, z, U0)
        Xn = X + dt * Xd
        zn = z + dt * zd
    else:  # rk4
        Uh = u_of(t + 0.5 * dt)
        U1 = u_of(t + dt)
        k1X, k1z = rhs(X, z, U0)
        k2X, k2z = rhs(X + 0.5 * dt * k1X, z + 0.5 * dt * k1z, Uh)
        k3X, k3z = rhs(X + 0.5 * dt * k2X, z + 0.5 * dt * k2z, Uh)
        k4X, k4z = rhs(X + dt * k3X, z + dt * k3z, U1)
        Xn = X + (dt / 6.0) * (k1X + 2.0 * k2X + 2.0 * k3X + k4X)
        zn = z + (dt / 6.0) * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
    zn[0] = 0.0
    return Xn, zn


def step_plant(state: PlantState, signal: InputSignal, sys: SystemDefinition,
               grid: Grid, cfg: StepperConfig) -> PlantState:
    """Advance the plant one step; refuses to run past the CFL limit."""
    if state.z.shape[0] != grid.n_nodes:
        raise ConfigurationError("plant field does not match the grid")
    cour = cfl_check(sys.Lambda, cfg.dt, grid.dxi)
    if cour > cfg.cfl_limit:
        raise ConfigurationError(
            f"Courant number {cour:.4g} exceeds limit {cfg.cfl_limit:g}; reduce dt"
        )
    coup = CouplingOperators.for_system(sys, grid.n_nodes, grid.dxi)
    lam_over_dxi = sys.Lambda / grid.dxi
    theta_vec = state.Theta.value(state.t)

    def rhs(X, z, U):
        return _plant_rhs(X, z, U, theta_vec, sys, coup, lam_over_dxi)

    Xn, zn = _advance(state.X, state.z, state.t, cfg.dt, cfg.scheme, rhs, signal.u)
    t_next = state.t + cfg.dt
    if not np.all(np.isfinite(Xn)):
        raise BlowUpError(f"plant lumped state non-finite at t={t_next:g}")
    if not np.all(np.isfinite(zn)):
        raise BlowUpError(f"plant distributed state non-finite at t={t_next:g}")
    return PlantState(t=t_next, X=Xn, z=zn, Theta=state.Theta)


def state_norm_l2(Xvec: np.ndarray, zfield: np.ndarray, dxi: float) -> float:
    """Composite norm: sqrt(|X|^2 + trapezoid integral of |z(xi)|^2)."""
    Xvec = np.asarray(Xvec, dtype=float)
    zfield = np.asarray(zfield, dtype=float)
    w = trapezoid_weights(zfield.shape[0], dxi)
    return float(np.sqrt(Xvec @ Xvec + w @ (zfield * zfield).sum(axis=1)))


def state_norm_h1(Xvec: np.ndarray, zfield: np.ndarray, dxi: float) -> float:
    """As :func:`state_norm_l2` plus the L2 norm of the spatial derivative.

    The derivative uses central differences in the interior and one-sided
    differences at the boundaries.
    """
    Xvec = np.asarray(Xvec, dtype=float)
    zfield = np.asarray(zfield, dtype=float)
    w = trapezoid_weights(zfield.shape[0], dxi)
    dz = np.gradient(zfield, dxi, axis=0)
    total = (Xvec @ Xvec
             + w @ (zfield * zfield).sum(axis=1)
             + w @ (dz * dz).sum(axis=1))
    return float(np.sqrt(total))

"""Semilinear transport ODE-PDE plant model and boundary measurement synthesis.

The plant couples a lumped state ``X`` (ODE) with a distributed state
``z(xi, t)`` transported along ``xi in [0, 1]``:

    dX/dt      = A1 X + G1 (K1op z) + G1 Theta Sigma(v) (K2op z) + G1 h1(v)
    dz/dt      = -Lambda dz/dxi + Theta Sigma(v) z + h2(v)
    z(0, t)    = 0

with the rigid relative velocity ``v = A2 X + G2 U`` driving the friction
source. ``K1op`` and ``K2op`` are integral couplings of the field back into
the ODE (with an optional boundary term for ``K1op``). Two boundary signals
are synthesized from the inflow end of the field: ``Y1 = h2(v)`` and
``Y2 = Theta Lambda Sigma(h2_inv(Y1)) Lambda^-1 Y1 + dY1/dt``.

Everything here is a pure function of its inputs; :class:`SystemDefinition`
is immutable after construction and safe to share between threads.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .exceptions import BlowUpError, ConfigurationError

__all__ = [
    "SystemDefinition",
    "ThetaSchedule",
    "PlantState",
    "InputSignal",
    "MeasurementFrame",
    "CouplingOperators",
    "trapezoid_weights",
    "relative_velocity",
    "apply_K1",
    "apply_K2",
    "plant_ode_rhs",
    "pde_source",
    "synthesize_Y1",
    "synthesize_Y1_dot",
    "synthesize_Y2",
    "synthesize_measurements",
]


def trapezoid_weights(n_nodes: int, dxi: float) -> np.ndarray:
    """Trapezoid quadrature weights for a uniform grid of ``n_nodes`` points."""
    if n_nodes < 2:
        raise ConfigurationError("quadrature needs at least 2 grid nodes")
    w = np.full(n_nodes, dxi)
    w[0] = w[-1] = 0.5 * dxi
    return w


def _readonly(a) -> np.ndarray:
    out = np.array(a, dtype=float)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class SystemDefinition:
    """Matrices, kernels, and source functions defining one plant instance.

    ``Lambda`` holds the diagonal entries of the (strictly positive) transport
    velocity matrix. ``Sigma`` maps the relative velocity to the source matrix.
    ``h2`` must be invertible with inverse ``h2_inv``; ``Dh2`` is its Jacobian
    and is required for analytic measurement-derivative synthesis. ``h1`` and
    ``K3`` may be ``None``, meaning identically zero (skipped in hot paths).
    """

    n_X: int
    n_z: int
    n_U: int
    A1: np.ndarray
    A2: np.ndarray
    G1: np.ndarray
    G2: np.ndarray
    Lambda: np.ndarray
    Sigma: Callable[[np.ndarray], np.ndarray]
    h2: Callable[[np.ndarray], np.ndarray]
    h2_inv: Callable[[np.ndarray], np.ndarray]
    h1: Optional[Callable[[np.ndarray], np.ndarray]] = None
    Dh2: Optional[Callable[[np.ndarray], np.ndarray]] = None
    K1: Optional[Callable[[float], np.ndarray]] = None
    K2: Optional[np.ndarray] = None
    K3: Optional[Callable[[float], np.ndarray]] = None

    def __post_init__(self):
        for name in ("A1", "A2", "G1", "G2", "Lambda"):
            object.__setattr__(self, name, _readonly(getattr(self, name)))
        expected = {
            "A1": (self.n_X, self.n_X),
            "A2": (self.n_z, self.n_X),
            "G1": (self.n_X, self.n_z),
            "G2": (self.n_z, self.n_U),
            "Lambda": (self.n_z,),
        }
        for name, shape in expected.items():
            got = getattr(self, name).shape
            if got != shape:
                raise ConfigurationError(f"{name} has shape {got}, expected {shape}")
        if np.any(self.Lambda <= 0.0):
            raise ConfigurationError("Lambda entries must be strictly positive")
        if self.K2 is not None:
            object.__setattr__(self, "K2", _readonly(self.K2))
            if self.K2.shape != (self.n_z, self.n_z):
                raise ConfigurationError("K2 must be n_z x n_z")
        self._check_h2_roundtrip()

    def _check_h2_roundtrip(self, tol: float = 1e-10) -> None:
        rng = np.random.default_rng(20240512)
        samples = [np.zeros(self.n_z), np.ones(self.n_z)]
        samples += [rng.normal(scale=3.0, size=self.n_z) for _ in range(4)]
        for v in samples:
            back = np.asarray(self.h2_inv(self.h2(v)), dtype=float)
            if np.max(np.abs(back - v)) > tol * max(1.0, float(np.max(np.abs(v)))):
                raise ConfigurationError("h2_inv(h2(v)) != v; h2/h2_inv are inconsistent")

    @property
    def has_boundary_coupling(self) -> bool:
        return self.K2 is not None and bool(np.any(self.K2))


@dataclass(frozen=True)
class ThetaSchedule:
    """Piecewise-constant true-parameter schedule, left-continuous in time.

    ``value(t)`` returns the entry whose switch time is the largest one <= t,
    so a switch at ``t_s`` takes effect at the first query with ``t >= t_s``.
    """

    times: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "times", _readonly(np.atleast_1d(self.times)))
        object.__setattr__(self, "values", _readonly(np.atleast_2d(self.values)))
        if self.times.ndim != 1 or self.values.shape[0] != self.times.shape[0]:
            raise ConfigurationError("schedule times and values must align")
        if np.any(np.diff(self.times) <= 0.0):
            raise ConfigurationError("schedule times must be strictly increasing")
        if np.any(self.values <= 0.0):
            raise ConfigurationError("true parameters must be strictly positive")

    @classmethod
    def constant(cls, theta) -> "ThetaSchedule":
        return cls(times=np.array([0.0]), values=np.atleast_2d(theta))

    @classmethod
    def from_pairs(cls, pairs) -> "ThetaSchedule":
        times = np.array([float(t) for t, _ in pairs])
        values = np.array([list(map(float, th)) for _, th in pairs])
        return cls(times=times, values=values)

    def value(self, t: float) -> np.ndarray:
        idx = int(np.searchsorted(self.times, t, side="right")) - 1
        return self.values[max(idx, 0)]


@dataclass(frozen=True)
class PlantState:
    """Lumped vector plus distributed field on the uniform grid at one instant.

    ``z`` has shape (n_nodes, n_z) with node 0 at ``xi = 0``; the inflow node
    is pinned to zero (boundary condition) and validated here.
    """

    t: float
    X: np.ndarray
    z: np.ndarray
    Theta: ThetaSchedule

    def __post_init__(self):
        object.__setattr__(self, "X", _readonly(self.X))
        object.__setattr__(self, "z", _readonly(self.z))
        if self.z.ndim != 2:
            raise ConfigurationError("z must be a (n_nodes, n_z) field")
        if np.any(self.z[0] != 0.0):
            raise ConfigurationError("z at the inflow node must be zero")

    @property
    def theta(self) -> np.ndarray:
        """True parameter vector in effect at this state's time."""
        return self.Theta.value(self.t)


@dataclass(frozen=True)
class InputSignal:
    """Input trajectory with an analytic time derivative, defined for t >= 0."""

    u: Callable[[float], np.ndarray]
    u_dot: Callable[[float], np.ndarray]

    @classmethod
    def zero(cls, n_U: int) -> "InputSignal":
        z = np.zeros(n_U)
        return cls(u=lambda t: z, u_dot=lambda t: z)


@dataclass(frozen=True)
class MeasurementFrame:
    """Boundary measurements at one time instant; entries must be finite."""

    t: float
    Y1: np.ndarray
    Y2: np.ndarray

    def __post_init__(self):
        if not (np.all(np.isfinite(self.Y1)) and np.all(np.isfinite(self.Y2))):
            raise BlowUpError(f"boundary measurements non-finite at t={self.t:g}")


class CouplingOperators:
    """Trapezoid-discretized integral couplings for a fixed grid.

    Precomputes the kernel tables once so the per-step cost is a single
    matrix-vector product; used by the steppers and by the public
    :func:`apply_K1` / :func:`apply_K2`.
    """

    @classmethod
    def for_system(cls, sys: "SystemDefinition", n_nodes: int, dxi: float) -> "CouplingOperators":
        """Per-system cached lookup; the tables are immutable so sharing is safe."""
        cache = getattr(sys, "_coupling_cache", None)
        if cache is None:
            cache = {}
            object.__setattr__(sys, "_coupling_cache", cache)
        key = (n_nodes, round(dxi, 15))
        ops = cache.get(key)
        if ops is None:
            ops = cls(sys, n_nodes, dxi)
            cache[key] = ops
        return ops

    def __init__(self, sys: SystemDefinition, n_nodes: int, dxi: float):
        self.n_z = sys.n_z
        w = trapezoid_weights(n_nodes, dxi)
        xi = np.arange(n_nodes) * dxi
        self._k1_flat = self._flatten(sys.K1, xi, w, sys.n_z)
        self._k3_flat = self._flatten(sys.K3, xi, w, sys.n_z)
        self.K2 = sys.K2 if sys.has_boundary_coupling else None
        self.has_interior_coupling = self._k3_flat is not None

    @staticmethod
    def _flatten(kernel, xi, w, n_z):
        if kernel is None:
            return None
        table = np.stack([np.asarray(kernel(float(x)), dtype=float) for x in xi])
        if table.shape[1:] != (n_z, n_z):
            raise ConfigurationError("kernel must return n_z x n_z matrices")
        table = table * w[:, None, None]
        # (nodes, out, in) -> (out, nodes*in) so k(z) = flat @ z.ravel()
        return np.ascontiguousarray(table.transpose(1, 0, 2).reshape(n_z, -1))

    def k1(self, zfield: np.ndarray) -> np.ndarray:
        out = self._k1_flat @ zfield.ravel() if self._k1_flat is not None else np.zeros(self.n_z)
        if self.K2 is not None:
            out = out + self.K2 @ zfield[-1]
        return out

    def k2(self, zfield: np.ndarray) -> np.ndarray:
        if self._k3_flat is None:
            return np.zeros(self.n_z)
        return self._k3_flat @ zfield.ravel()


def relative_velocity(X: np.ndarray, U: np.ndarray, sys: SystemDefinition) -> np.ndarray:
    """Rigid relative velocity ``v = A2 X + G2 U``."""
    X = np.asarray(X, dtype=float)
    U = np.asarray(U, dtype=float)
    if X.shape != (sys.n_X,) or U.shape != (sys.n_U,):
        raise ConfigurationError(
            f"expected X of shape ({sys.n_X},) and U of shape ({sys.n_U},), "
            f"got {X.shape} and {U.shape}"
        )
    return sys.A2 @ X + sys.G2 @ U


def apply_K1(zfield: np.ndarray, sys: SystemDefinition, dxi: float) -> np.ndarray:
    """Integral coupling with boundary term: trapezoid of K1(xi) z(xi) plus K2 z(1)."""
    zfield = np.asarray(zfield, dtype=float)
    return CouplingOperators.for_system(sys, zfield.shape[0], dxi).k1(zfield)


def apply_K2(zfield: np.ndarray, sys: SystemDefinition, dxi: float) -> np.ndarray:
    """Interior integral coupling: trapezoid of K3(xi) z(xi), no boundary term."""
    zfield = np.asarray(zfield, dtype=float)
    return CouplingOperators.for_system(sys, zfield.shape[0], dxi).k2(zfield)


def _ode_rhs(X, U, zfield, theta_vec, sys, coup):
    """Lumped-state derivative; shared between plant and observer stepping.

    Returns (Xdot, v, Sigma(v)) so callers can reuse the source evaluation.
    """
    v = sys.A2 @ X + sys.G2 @ U
    sig = np.asarray(sys.Sigma(v), dtype=float)
    drive = coup.k1(zfield)
    if coup.has_interior_coupling:
        drive = drive + (theta_vec[:, None] * sig) @ coup.k2(zfield)
    if sys.h1 is not None:
        drive = drive + sys.h1(v)
    return sys.A1 @ X + sys.G1 @ drive, v, sig


def plant_ode_rhs(state: PlantState, U: np.ndarray, sys: SystemDefinition) -> np.ndarray:
    """Time derivative of the lumped state at the given instant."""
    n_nodes = state.z.shape[0]
    coup = CouplingOperators.for_system(sys, n_nodes, 1.0 / (n_nodes - 1))
    Xdot, _, _ = _ode_rhs(state.X, np.asarray(U, dtype=float), state.z,
                          state.theta, sys, coup)
    if not np.all(np.isfinite(Xdot)):
        raise BlowUpError(f"plant ODE right-hand side non-finite at t={state.t:g}")
    return Xdot


def pde_source(zj: np.ndarray, v: np.ndarray, Theta: np.ndarray, sys: SystemDefinition) -> np.ndarray:
    """Field source at one node: ``Theta Sigma(v) z_j + h2(v)`` (xi-independent)."""
    sig = np.asarray(sys.Sigma(v), dtype=float)
    return np.asarray(Theta, dtype=float) * (sig @ np.asarray(zj, dtype=float)) + sys.h2(v)


def synthesize_Y1(state: PlantState, U: np.ndarray, sys: SystemDefinition) -> np.ndarray:
    """First boundary measurement ``Y1 = h2(v(X, U))``, exact from plant truth."""
    return sys.h2(relative_velocity(state.X, U, sys))


def synthesize_Y1_dot(state: PlantState, U: np.ndarray, U_dot: np.ndarray,
                      sys: SystemDefinition) -> np.ndarray:
    """Analytic measurement derivative via the chain rule.

    ``dY1/dt = Dh2(v) (A2 dX/dt + G2 dU/dt)`` with the plant ODE providing
    ``dX/dt``; avoids differentiating a sampled signal.
    """
    if sys.Dh2 is None:
        raise ConfigurationError("analytic Y1 derivative needs the h2 Jacobian Dh2")
    v = relative_velocity(state.X, U, sys)
    Xdot = plant_ode_rhs(state, U, sys)
    return np.asarray(sys.Dh2(v), dtype=float) @ (sys.A2 @ Xdot + sys.G2 @ np.asarray(U_dot, dtype=float))


def synthesize_Y2(Y1: np.ndarray, Y1_dot: np.ndarray, Theta: np.ndarray,
                  sys: SystemDefinition) -> np.ndarray:
    """Second boundary measurement from Y1 and its time derivative."""
    Y1 = np.asarray(Y1, dtype=float)
    sig = np.asarray(sys.Sigma(sys.h2_inv(Y1)), dtype=float)
    w = sys.Lambda * (sig @ (Y1 / sys.Lambda))
    return np.asarray(Theta, dtype=float) * w + np.asarray(Y1_dot, dtype=float)


def synthesize_measurements(state: PlantState, signal: InputSignal,
                            sys: SystemDefinition,
                            prev_Y1: Optional[np.ndarray] = None,
                            dt: Optional[float] = None) -> MeasurementFrame:
    """Build both boundary measurements at the state's time.

    By default the Y1 derivative is analytic (chain rule). Passing the
    previous sample and the step gives a backward-difference derivative
    instead, mimicking a sensor-side numerical path.
    """
    t = state.t
    U = signal.u(t)
    Y1 = synthesize_Y1(state, U, sys)
    if prev_Y1 is None:
        Y1_dot = synthesize_Y1_dot(state, U, signal.u_dot(t), sys)
    else:
        if dt is None or dt <= 0.0:
            raise ConfigurationError("backward-difference Y1 derivative needs dt > 0")
        Y1_dot = (Y1 - np.asarray(prev_Y1, dtype=float)) / dt
    Y2 = synthesize_Y2(Y1, Y1_dot, state.theta, sys)
    return MeasurementFrame(t=t, Y1=Y1, Y2=Y2)

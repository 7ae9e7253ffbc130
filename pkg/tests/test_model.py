"""Core plant model: coupling operators, sources, and measurement synthesis."""

import numpy as np
import pytest

from frictionobs import (
    ConfigurationError,
    InputSignal,
    PlantState,
    SystemDefinition,
    ThetaSchedule,
    apply_K1,
    apply_K2,
    pde_source,
    plant_ode_rhs,
    relative_velocity,
    synthesize_measurements,
    synthesize_Y1,
    synthesize_Y2,
)
from frictionobs.solver import Grid, StepperConfig, step_plant
from frictionobs.vehicle import make_steering_signal

from conftest import pinned_field


def make_custom_system(n_z=2, K1=None, K2=None, K3=None, Sigma=None, h1=None,
                       A1=None, A2=None, G1=None, G2=None, Lambda=None):
    """Small helper for hand-built systems with identity-ish defaults."""
    eye = np.eye(n_z)
    return SystemDefinition(
        n_X=n_z, n_z=n_z, n_U=n_z,
        A1=np.zeros((n_z, n_z)) if A1 is None else A1,
        A2=eye if A2 is None else A2,
        G1=eye if G1 is None else G1,
        G2=eye if G2 is None else G2,
        Lambda=np.ones(n_z) if Lambda is None else Lambda,
        Sigma=(lambda v: np.zeros((n_z, n_z))) if Sigma is None else Sigma,
        h2=lambda v: np.asarray(v, dtype=float),
        h2_inv=lambda y: np.asarray(y, dtype=float),
        h1=h1,
        Dh2=lambda v: np.eye(n_z),
        K1=K1, K2=K2, K3=K3,
    )


class TestRelativeVelocity:
    def test_benchmark_point(self, vehicle):
        v = relative_velocity(np.array([3.0, -0.4]), np.zeros(2), vehicle)
        # v1 = vy + l1 r, v2 = vy - l2 r with l1 = 1, l2 = 1.6
        np.testing.assert_allclose(v, [3.0 - 0.4, 3.0 + 1.6 * 0.4], rtol=1e-14)
        np.testing.assert_allclose(v, [2.6, 3.64], rtol=1e-12)

    def test_origin(self, vehicle):
        assert np.all(relative_velocity(np.zeros(2), np.zeros(2), vehicle) == 0.0)

    def test_steering_channel(self, vehicle):
        delta = 0.0321
        v = relative_velocity(np.zeros(2), np.array([delta, 0.0]), vehicle)
        np.testing.assert_allclose(v, [-20.0 * delta, 0.0], rtol=1e-14)

    def test_dimension_mismatch(self, vehicle):
        with pytest.raises(ConfigurationError):
            relative_velocity(np.zeros(3), np.zeros(2), vehicle)

    def test_linearity(self, vehicle):
        rng = np.random.default_rng(7)
        for _ in range(5):
            X1, X2 = rng.normal(size=(2, 2))
            U1, U2 = rng.normal(size=(2, 2))
            a, b = rng.normal(size=2)
            lhs = relative_velocity(a * X1 + b * X2, a * U1 + b * U2, vehicle)
            rhs = (a * relative_velocity(X1, U1, vehicle)
                   + b * relative_velocity(X2, U2, vehicle))
            scale = max(1.0, np.max(np.abs(lhs)))
            assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


class TestCouplingOperators:
    def test_constant_field_closed_form(self, vehicle, params):
        c = 0.01
        z = np.tile([c, 0.0], (51, 1))
        out = apply_K1(z, vehicle, 0.02)
        # closed form of the exponential pressure integral
        exact = params.L1_patch * params.sigma1 * params.p01 \
            * (1.0 - np.exp(-params.a1)) / params.a1 * c
        assert abs(out[0] - exact) < 0.01
        assert abs(out[0] - 6477.0) < 0.1
        assert out[1] == 0.0

    def test_zero_field(self, vehicle):
        assert np.all(apply_K1(np.zeros((51, 2)), vehicle, 0.02) == 0.0)

    def test_boundary_term_only(self):
        sys = make_custom_system(K1=None, K2=np.eye(2))
        z = np.zeros((11, 2))
        z[-1] = [1.0, 2.0]
        np.testing.assert_allclose(apply_K1(z, sys, 0.1), [1.0, 2.0], rtol=1e-14)

    def test_unit_interior_kernel(self):
        sys = make_custom_system(K3=lambda xi: np.eye(2))
        z = np.ones((51, 2))
        np.testing.assert_allclose(apply_K2(z, sys, 0.02), [1.0, 1.0], rtol=1e-12)

    def test_linear_interior_kernel(self):
        sys = make_custom_system(K3=lambda xi: xi * np.eye(2))
        z = np.ones((51, 2))
        # trapezoid integrates the linear kernel exactly: integral of xi = 1/2
        np.testing.assert_allclose(apply_K2(z, sys, 0.02), [0.5, 0.5], atol=1e-4)

    def test_apply_K2_zero_kernel(self, vehicle):
        assert np.all(apply_K2(np.ones((51, 2)), vehicle, 0.02) == 0.0)

    def test_superposition(self, vehicle):
        rng = np.random.default_rng(11)
        for _ in range(5):
            z1, z2 = rng.normal(size=(2, 51, 2))
            a, b = rng.normal(size=2)
            lhs = apply_K1(a * z1 + b * z2, vehicle, 0.02)
            rhs = a * apply_K1(z1, vehicle, 0.02) + b * apply_K1(z2, vehicle, 0.02)
            scale = max(1.0, np.max(np.abs(lhs)))
            assert np.max(np.abs(lhs - rhs)) <= 1e-12 * scale


class TestPlantOdeRhs:
    def test_rest_is_equilibrium(self, vehicle, default_schedule):
        state = PlantState(t=0.0, X=np.zeros(2), z=np.zeros((51, 2)), Theta=default_schedule)
        assert np.all(plant_ode_rhs(state, np.zeros(2), vehicle) == 0.0)

    def test_zero_field_reduces_to_linear_part(self, vehicle, default_schedule):
        state = PlantState(t=0.0, X=np.array([3.0, -0.4]), z=np.zeros((51, 2)),
                           Theta=default_schedule)
        # A1 X = [-v_x * r, 0]
        np.testing.assert_allclose(plant_ode_rhs(state, np.zeros(2), vehicle),
                                   [8.0, 0.0], rtol=1e-14)

    def test_no_coupling(self, default_schedule):
        sys = make_custom_system(G1=np.zeros((2, 2)), A1=np.array([[0.0, 1.0], [-1.0, 0.0]]),
                                 K1=lambda xi: np.eye(2))
        state = PlantState(t=0.0, X=np.array([2.0, 5.0]),
                           z=pinned_field([1.0, 1.0], 21), Theta=default_schedule)
        np.testing.assert_allclose(plant_ode_rhs(state, np.zeros(2), sys), [5.0, -2.0],
                                   rtol=1e-14)


class TestPdeSource:
    def test_zero_deflection(self, vehicle):
        v = np.array([2.6, 3.64])
        out = pde_source(np.zeros(2), v, np.array([1.2, 0.8]), vehicle)
        np.testing.assert_allclose(out, 2.0 * v, rtol=1e-14)

    def test_zero_velocity(self, vehicle):
        out = pde_source(np.array([0.4, -0.2]), np.zeros(2), np.array([1.2, 0.8]), vehicle)
        assert np.all(out == 0.0)

    def test_identity_algebra(self):
        sys = make_custom_system(Sigma=lambda v: -np.eye(2))
        out = pde_source(np.array([1.0, 2.0]), np.zeros(2), np.ones(2), sys)
        np.testing.assert_allclose(out, [-1.0, -2.0], rtol=1e-14)


class TestMeasurements:
    def test_Y1_benchmark(self, vehicle, benchmark_state):
        Y1 = synthesize_Y1(benchmark_state, np.zeros(2), vehicle)
        np.testing.assert_allclose(Y1, [5.2, 7.28], rtol=1e-12)

    def test_Y1_zero(self, vehicle, default_schedule):
        state = PlantState(t=0.0, X=np.zeros(2), z=np.zeros((51, 2)), Theta=default_schedule)
        assert np.all(synthesize_Y1(state, np.zeros(2), vehicle) == 0.0)

    def test_Y1_roundtrip_recovers_velocity(self, vehicle, default_schedule):
        rng = np.random.default_rng(3)
        for _ in range(5):
            X = rng.normal(size=2)
            U = rng.normal(size=2) * 0.1
            state = PlantState(t=0.0, X=X, z=np.zeros((51, 2)), Theta=default_schedule)
            v = relative_velocity(X, U, vehicle)
            back = vehicle.h2_inv(synthesize_Y1(state, U, vehicle))
            assert np.max(np.abs(back - v)) <= 1e-10 * max(1.0, np.max(np.abs(v)))

    def test_Y2_zero(self, vehicle):
        out = synthesize_Y2(np.zeros(2), np.zeros(2), np.array([1.2, 0.8]), vehicle)
        assert np.all(out == 0.0)

    def test_Y2_benchmark_values(self, vehicle, params):
        Y1 = np.array([5.2, 7.28])
        # diagonal Sigma commutes with Lambda: Y2_i = theta_i * Sigma_ii * Y1_i
        sig = np.array([-params.sigma1 * 2.6, -params.sigma2 * 3.64])
        expected = np.array([1.2, 0.8]) * sig * Y1
        out = synthesize_Y2(Y1, np.zeros(2), np.array([1.2, 0.8]), vehicle)
        np.testing.assert_allclose(out, expected, rtol=1e-12)
        np.testing.assert_allclose(out, [-2676.96, -8797.7344], rtol=1e-9)

    def test_Y2_zero_parameters(self, vehicle):
        Y1_dot = np.array([0.7, -0.3])
        out = synthesize_Y2(np.array([5.2, 7.28]), Y1_dot, np.zeros(2), vehicle)
        np.testing.assert_allclose(out, Y1_dot, rtol=1e-14)

    def test_backward_difference_mode_converges(self, vehicle, benchmark_state):
        """The sensor-style finite-difference derivative approaches the analytic one."""
        signal = make_steering_signal()
        grid = Grid(50)
        errs = []
        for dt in (2e-6, 1e-6):
            cfg = StepperConfig(dt=dt)
            prev = synthesize_Y1(benchmark_state, signal.u(0.0), vehicle)
            state = step_plant(benchmark_state, signal, vehicle, grid, cfg)
            analytic = synthesize_measurements(state, signal, vehicle)
            fd = synthesize_measurements(state, signal, vehicle, prev_Y1=prev, dt=dt)
            assert fd.t == analytic.t
            np.testing.assert_allclose(fd.Y1, analytic.Y1, rtol=1e-14)
            errs.append(np.max(np.abs(fd.Y2 - analytic.Y2)))
        assert errs[1] <= 0.75 * errs[0] + 1e-9


class TestBoundaryIdentity:
    def test_discrete_boundary_derivative_tracks_Y1(self, vehicle, benchmark_state):
        """Lambda z(dxi)/dxi approximates the first measurement after the IC washes out."""
        signal = make_steering_signal()
        grid = Grid(50)
        cfg = StepperConfig(dt=1e-5)
        state = benchmark_state
        worst = 0.0
        for k in range(3000):
            state = step_plant(state, signal, vehicle, grid, cfg)
            if state.t >= 0.02 and k % 20 == 0:
                Y1 = synthesize_Y1(state, signal.u(state.t), vehicle)
                bnd = vehicle.Lambda * state.z[1] / grid.dxi
                worst = max(worst, float(np.max(np.abs(bnd - Y1))))
        assert worst < 1.0


class TestThetaSchedule:
    def test_left_continuous_switch(self, default_schedule):
        np.testing.assert_array_equal(default_schedule.value(4.999999), [1.2, 0.8])
        np.testing.assert_array_equal(default_schedule.value(5.0), [0.6, 0.4])
        np.testing.assert_array_equal(default_schedule.value(9.0), [0.6, 0.4])

    def test_invalid_schedules(self):
        with pytest.raises(ConfigurationError):
            ThetaSchedule.from_pairs([[0.0, [1.0, -1.0]]])
        with pytest.raises(ConfigurationError):
            ThetaSchedule.from_pairs([[0.0, [1.0, 1.0]], [0.0, [2.0, 2.0]]])


class TestInvariants:
    def test_plant_state_requires_pinned_inflow(self, default_schedule):
        with pytest.raises(ConfigurationError):
            PlantState(t=0.0, X=np.zeros(2), z=np.full((11, 2), 0.3), Theta=default_schedule)

    def test_lambda_must_be_positive(self):
        with pytest.raises(ConfigurationError):
            make_custom_system(Lambda=np.array([1.0, 0.0]))

    def test_h2_roundtrip_enforced(self):
        with pytest.raises(ConfigurationError):
            SystemDefinition(
                n_X=2, n_z=2, n_U=2,
                A1=np.zeros((2, 2)), A2=np.eye(2), G1=np.eye(2), G2=np.eye(2),
                Lambda=np.ones(2),
                Sigma=lambda v: np.zeros((2, 2)),
                h2=lambda v: 2.0 * np.asarray(v),
                h2_inv=lambda y: np.asarray(y),  # wrong inverse
            )

    def test_dimension_checks(self):
        with pytest.raises(ConfigurationError):
            make_custom_system(A2=np.zeros((3, 2)))

    def test_zero_input_signal(self):
        sig = InputSignal.zero(2)
        assert np.all(sig.u(1.23) == 0.0) and np.all(sig.u_dot(4.56) == 0.0)

    def test_measurement_frame_rejects_nonfinite(self):
        from frictionobs import BlowUpError, MeasurementFrame
        with pytest.raises(BlowUpError):
            MeasurementFrame(t=0.0, Y1=np.array([np.nan, 0.0]), Y2=np.zeros(2))

import numpy as np
import pytest

from frictionobs import (
    PlantState,
    ThetaSchedule,
    VehicleParams,
    build_vehicle_system,
)


@pytest.fixture(scope="session")
def params():
    return VehicleParams()


@pytest.fixture(scope="session")
def vehicle(params):
    return build_vehicle_system(params)


@pytest.fixture(scope="session")
def default_schedule():
    return ThetaSchedule.from_pairs([[0.0, [1.2, 0.8]], [5.0, [0.6, 0.4]]])


def pinned_field(values, n_nodes):
    """Constant-per-component field with the inflow node pinned to zero."""
    z = np.tile(np.asarray(values, dtype=float), (n_nodes, 1))
    z[0] = 0.0
    return z


@pytest.fixture(scope="session")
def benchmark_state(default_schedule):
    return PlantState(
        t=0.0,
        X=np.array([3.0, -0.4]),
        z=pinned_field([0.3, 0.3], 51),
        Theta=default_schedule,
    )

"""Simulation and adaptive estimation for rolling-contact ODE-PDE systems.

A transport PDE over the contact patch, coupled to rigid-body ODE dynamics,
is simulated with upwind finite differences; an adaptive observer plus a
gradient parameter identifier reconstruct the lumped states, the distributed
states, and the unknown friction parameters from boundary measurements only.
"""

__version__ = "0.1.0"

from .exceptions import BlowUpError, ConfigurationError, GainDesignError
from .identifier import (
    FilterState,
    IdentifierGains,
    IdentifierState,
    RegressionFrame,
    nonadaptive_estimate,
    pe_monitor,
    regression_frame,
    step_adaptive_law,
    step_filters,
)
from .model import (
    CouplingOperators,
    InputSignal,
    MeasurementFrame,
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
    synthesize_Y1_dot,
    synthesize_Y2,
)
from .observer import (
    ErrorMetrics,
    ObserverGains,
    ObserverState,
    design_gain_L1,
    error_metrics,
    estimated_output,
    make_observer_gains,
    step_observer,
)
from .runner import (
    DEFAULTS,
    SNAPSHOT_COLUMNS,
    TIMESERIES_COLUMNS,
    RunSummary,
    ScenarioConfig,
    load_config,
    run_experiment,
)
from .solver import (
    Grid,
    StepperConfig,
    cfl_check,
    state_norm_h1,
    state_norm_l2,
    step_plant,
    upwind_transport,
)
from .vehicle import (
    SteeringSpec,
    VehicleParams,
    build_vehicle_system,
    make_steering_signal,
    pressure_profile,
    sigma_matrix,
    steering_input,
    tire_forces,
)

//! Mass–spring–damper model of the actuator, PID regulation and response analysis.

mod closed_loop;
mod frequency;
mod integrate;
mod metrics;
mod pid;
mod plant;
mod trajectory;

pub use closed_loop::{
    simulate_closed_loop, simulate_closed_loop_with, substeps, ClosedLoopOptions,
};
pub use frequency::{
    bandwidth, crossing_count, frequency_grid, frequency_response, frequency_response_with,
    response_amplitude, to_db, DriveSpec, FrequencyPoint, MINUS_3DB, MIN_STEPS_PER_CYCLE,
};
pub use integrate::{
    integrate_rk4, integrate_rk4_loaded, terminal_state, PlantState, SimTrace, TraceSample,
    DEFAULT_DT, DIVERGENCE_LIMIT,
};
pub use metrics::{
    amplitude_and_phase, fit_sinusoid, response_metrics, step_figures, ResponseMetrics,
    StepFigures, SETTLING_BAND, SINE_FIT_CYCLES,
};
pub use pid::{pid_step, PidGains, PidState};
pub use plant::{
    plant_derivatives, Disturbance, PlantParams, PressureLag, DEFAULT_DAMPING, DEFAULT_FILL_TAU,
    DEFAULT_MASS, DEFAULT_PRESSURE_MAX, DEFAULT_VENT_TAU,
};
pub use trajectory::{TrajectoryKind, TrajectorySpec};

//! Controlled-phase gate on {|00⟩, |+⟩, |−⟩, |11⟩}: qubit bookkeeping,
//! fidelity functionals, pulse optimization and the speed-limit estimate.

mod fidelity;
mod optimize;
mod speed_limit;
mod system;

pub use fidelity::{fidelities, GateTarget, Objective};
pub use optimize::{
    crab_start, gradient_ascent, optimize, CrabParametrization, GateResult, OptimizerSettings,
    Outcome, StopReason, TraceEntry,
};
pub use speed_limit::{
    effective_coupling, speed_limit_estimate, speed_limit_from_spectrum, SpeedLimit,
    DEFAULT_SPEED_LIMIT_THRESHOLD,
};
pub use system::{
    BlockSystem, GateEvaluation, GateOptions, GateSystem, QubitBasis, QubitLabel, QubitState,
};

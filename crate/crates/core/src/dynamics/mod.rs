//! Interaction-picture dynamics in the field-free eigenbasis under β(t).

mod initial;
mod propagate;
mod pulse;
mod window;

pub use initial::{internal_character, trap_initial_state, PairLabel};
pub use propagate::{
    populations, InitialState, PropagationResult, PropagationSettings, Propagator,
};
pub use pulse::{beta_of_t, EnvelopeMode, FourierTerm, PulseKind, PulseSpec};
pub use window::{dominant_branch, field_window, FieldWindow};

pub type C64 = num_complex::Complex64;

/// `count` equally spaced times on [0, tau], seconds.
pub fn sample_times(tau: f64, count: usize) -> Vec<f64> {
    match count {
        0 => Vec::new(),
        1 => vec![tau],
        _ => (0..count)
            .map(|i| tau * i as f64 / (count - 1) as f64)
            .collect(),
    }
}

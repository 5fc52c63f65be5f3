use num_complex::Complex64 as C64;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::system::QubitBasis;
use crate::dynamics::PropagationResult;
use crate::error::{Error, Result};

/// Target phase per logical state, in `QubitLabel::ALL` order.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GateTarget {
    pub phases: [f64; 4],
}

impl Default for GateTarget {
    fn default() -> Self {
        GateTarget {
            phases: [PI, PI, PI, 0.0],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Objective {
    Internal,
    Full,
}

impl Objective {
    pub fn as_str(&self) -> &'static str {
        match self {
            Objective::Internal => "internal",
            Objective::Full => "full",
        }
    }
}

const NORM_TOLERANCE: f64 = 1e-6;

/// (internal, full) fidelities of the final amplitudes.
///
/// full = |¼ Σ_q e^{−iφ_q} c_q(τ)|², with c_q the amplitude on the initial
/// eigenstate. internal replaces c_q by e^{i arg c_q}·√P_q, where P_q is the
/// population on any eigenstate of the same internal character.
pub fn fidelities(
    results: &[PropagationResult],
    qubits: &QubitBasis,
    target: &GateTarget,
) -> Result<(f64, f64)> {
    if results.len() != 4 {
        return Err(Error::invalid(
            "results",
            format!("expected 4 propagations, got {}", results.len()),
        ));
    }
    let mut full = C64::new(0.0, 0.0);
    let mut internal = C64::new(0.0, 0.0);
    for ((res, q), phi) in results.iter().zip(&qubits.states).zip(target.phases) {
        let amps = res.final_amplitudes();
        let norm: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > NORM_TOLERANCE {
            return Err(Error::invalid(
                "results",
                format!("state {} has norm {norm:.9}", q.label),
            ));
        }
        let pos = res.position(q.index).ok_or_else(|| {
            Error::invalid(
                "results",
                format!("initial state of {} not propagated", q.label),
            )
        })?;
        let c = amps[pos];
        let kept: f64 = q
            .members
            .iter()
            .filter_map(|&k| res.position(k))
            .map(|p| amps[p].norm_sqr())
            .sum();
        let rot = C64::from_polar(1.0, -phi);
        full += rot * c;
        internal += rot * C64::from_polar(kept.sqrt(), c.arg());
    }
    let f = |z: C64| (z.norm_sqr() / 16.0).clamp(0.0, 1.0);
    Ok((f(internal), f(full)))
}

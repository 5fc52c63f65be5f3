use std::f64::consts::FRAC_1_SQRT_2;

use crate::assembly::{BasisSet, EigenSystem};
use crate::error::{Error, Result};
use crate::rotor::PairState;

/// Named internal pair states used as initial conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PairLabel {
    /// |0,0⟩|0,0⟩
    Ground,
    /// (|0,0⟩|1,1⟩ + |1,1⟩|0,0⟩)/√2
    Plus,
    /// (|0,0⟩|1,1⟩ − |1,1⟩|0,0⟩)/√2
    Minus,
    /// |1,1⟩|1,1⟩
    Excited,
}

impl PairLabel {
    pub fn m_total(&self) -> i32 {
        match self {
            PairLabel::Ground => 0,
            PairLabel::Plus | PairLabel::Minus => 1,
            PairLabel::Excited => 2,
        }
    }

    pub fn terms(&self) -> Vec<(f64, PairState)> {
        let a = PairState::new(0, 0, 1, 1);
        let b = PairState::new(1, 1, 0, 0);
        match self {
            PairLabel::Ground => vec![(1.0, PairState::new(0, 0, 0, 0))],
            PairLabel::Plus => vec![(FRAC_1_SQRT_2, a), (FRAC_1_SQRT_2, b)],
            PairLabel::Minus => vec![(FRAC_1_SQRT_2, a), (-FRAC_1_SQRT_2, b)],
            PairLabel::Excited => vec![(1.0, PairState::new(1, 1, 1, 1))],
        }
    }

    /// The state's coefficients in the basis's internal ordering.
    pub fn internal_vector(&self, basis: &BasisSet) -> Result<Vec<f64>> {
        let mut chi = vec![0.0; basis.n_int()];
        for (c, s) in self.terms() {
            let i = basis.internal.position(&s).ok_or_else(|| {
                Error::invalid(
                    "m_total",
                    format!("pair state {s} not in the internal basis"),
                )
            })?;
            chi[i] = c;
        }
        Ok(chi)
    }
}

/// Eigenstate with the largest squared overlap with both molecules in their
/// own trap ground state and internal state `chi`: (index, overlap²).
pub fn trap_initial_state(
    eig: &EigenSystem,
    basis: &BasisSet,
    a: f64,
    chi: &[f64],
) -> (usize, f64) {
    let reference = basis.separated_ground_state(a, chi);
    (0..eig.dim())
        .map(|k| (k, eig.overlap(k, &reference).powi(2)))
        .fold(
            (0, -1.0),
            |best, (k, o)| if o > best.1 { (k, o) } else { best },
        )
}

/// Weight of `v` on motional states ⊗ `chi`.
pub fn internal_character(v: &[f64], chi: &[f64]) -> f64 {
    v.chunks(chi.len())
        .map(|blk| blk.iter().zip(chi).map(|(x, c)| x * c).sum::<f64>().powi(2))
        .sum()
}

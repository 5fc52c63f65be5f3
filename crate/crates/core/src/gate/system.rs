use serde::{Deserialize, Serialize};

use super::fidelity::{fidelities, GateTarget};
use crate::assembly::{diagonalize, Assembler, EigenSystem, ModelOptions};
use crate::dynamics::{
    field_window, internal_character, trap_initial_state, FieldWindow, InitialState, PairLabel,
    PropagationResult, PropagationSettings, Propagator, PulseSpec,
};
use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum QubitLabel {
    #[serde(rename = "00")]
    Zero,
    #[serde(rename = "+")]
    Plus,
    #[serde(rename = "-")]
    Minus,
    #[serde(rename = "11")]
    One,
}

impl QubitLabel {
    pub const ALL: [QubitLabel; 4] = [
        QubitLabel::Zero,
        QubitLabel::Plus,
        QubitLabel::Minus,
        QubitLabel::One,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            QubitLabel::Zero => "00",
            QubitLabel::Plus => "+",
            QubitLabel::Minus => "-",
            QubitLabel::One => "11",
        }
    }

    /// File-name friendly form.
    pub fn slug(&self) -> &'static str {
        match self {
            QubitLabel::Zero => "00",
            QubitLabel::Plus => "plus",
            QubitLabel::Minus => "minus",
            QubitLabel::One => "11",
        }
    }

    pub fn pair(&self) -> PairLabel {
        match self {
            QubitLabel::Zero => PairLabel::Ground,
            QubitLabel::Plus => PairLabel::Plus,
            QubitLabel::Minus => PairLabel::Minus,
            QubitLabel::One => PairLabel::Excited,
        }
    }

    pub fn m_total(&self) -> i32 {
        self.pair().m_total()
    }
}

impl std::fmt::Display for QubitLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug)]
pub struct QubitState {
    pub label: QubitLabel,
    pub m_total: i32,
    /// Eigen-index in the block's field-free eigensystem.
    pub index: usize,
    /// Squared overlap with the separated-trap reference.
    pub overlap: f64,
    pub internal: Vec<f64>,
    /// Propagated eigenstates whose internal content is dominantly `internal`.
    pub members: Vec<usize>,
}

#[derive(Clone, Debug)]
pub struct QubitBasis {
    pub states: [QubitState; 4],
}

impl QubitBasis {
    pub fn get(&self, label: QubitLabel) -> &QubitState {
        &self.states[QubitLabel::ALL.iter().position(|l| *l == label).unwrap()]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct GateOptions {
    pub j_max: u32,
    pub n_max: usize,
    /// Propagation window half-width around each qubit state, ħω.
    pub half_width: f64,
    pub depth: usize,
    pub model: ModelOptions,
    pub propagation: PropagationSettings,
}

impl Default for GateOptions {
    fn default() -> Self {
        GateOptions {
            j_max: 2,
            n_max: 120,
            half_width: 8.0,
            depth: 1,
            model: ModelOptions::default(),
            propagation: PropagationSettings::default(),
        }
    }
}

pub struct BlockSystem {
    pub m_total: i32,
    pub assembler: Assembler,
    pub eig: EigenSystem,
    pub window: FieldWindow,
    pub propagator: Propagator,
}

/// One field-free eigensystem and propagator per M block.
pub struct GateSystem {
    pub params: SystemParams,
    pub blocks: Vec<BlockSystem>,
    pub qubits: QubitBasis,
}

#[derive(Clone, Debug)]
pub struct GateEvaluation {
    pub internal: f64,
    pub full: f64,
    pub results: Vec<PropagationResult>,
}

impl GateSystem {
    pub fn new(params: &SystemParams, opts: &GateOptions) -> Result<Self> {
        let a = params.a_over_aho;
        let mut blocks = Vec::new();
        let mut qubits = Vec::new();
        for m in [0, 1, 2] {
            let asm = Assembler::new(params, m, opts.j_max, opts.n_max, opts.model.clone())?;
            let eig = diagonalize(&asm.h0(a))?;
            let labels: Vec<QubitLabel> = QubitLabel::ALL
                .into_iter()
                .filter(|l| l.m_total() == m)
                .collect();
            let mut found = Vec::new();
            for &label in &labels {
                let chi = label.pair().internal_vector(&asm.basis)?;
                let (index, overlap) = trap_initial_state(&eig, &asm.basis, a, &chi);
                found.push((label, chi, index, overlap));
            }
            let centers: Vec<usize> = found.iter().map(|f| f.2).collect();
            let window = field_window(
                &eig,
                &asm.basis,
                params.b,
                &centers,
                opts.half_width,
                opts.depth,
            );
            let propagator = Propagator::new(
                &eig,
                &asm.w(),
                params.omega,
                &window.indices,
                Some(&window.branches),
                opts.propagation,
            )?;
            for (label, chi, index, overlap) in found {
                let members = window
                    .indices
                    .iter()
                    .copied()
                    .filter(|&k| {
                        let v: Vec<f64> = eig.vectors.col(k).iter().copied().collect();
                        internal_character(&v, &chi) > 0.5
                    })
                    .collect();
                qubits.push(QubitState {
                    label,
                    m_total: m,
                    index,
                    overlap,
                    internal: chi,
                    members,
                });
            }
            blocks.push(BlockSystem {
                m_total: m,
                assembler: asm,
                eig,
                window,
                propagator,
            });
        }
        let states: [QubitState; 4] = qubits
            .try_into()
            .map_err(|_| Error::Numerical("qubit bookkeeping".into()))?;
        Ok(GateSystem {
            params: params.clone(),
            blocks,
            qubits: QubitBasis { states },
        })
    }

    pub fn block(&self, m_total: i32) -> &BlockSystem {
        self.blocks
            .iter()
            .find(|b| b.m_total == m_total)
            .expect("M block present")
    }

    /// Propagates the four qubit states; results in `QubitLabel::ALL` order.
    pub fn propagate(
        &self,
        pulse: &PulseSpec,
        sample_times: &[f64],
    ) -> Result<Vec<PropagationResult>> {
        let mut out: Vec<Option<PropagationResult>> = vec![None, None, None, None];
        for block in &self.blocks {
            let members: Vec<usize> = (0..4)
                .filter(|&i| self.qubits.states[i].m_total == block.m_total)
                .collect();
            let initials: Vec<InitialState> = members
                .iter()
                .map(|&i| InitialState::Eigenstate(self.qubits.states[i].index))
                .collect();
            let results = block.propagator.run_batch(pulse, &initials, sample_times)?;
            for (i, r) in members.into_iter().zip(results) {
                out[i] = Some(r);
            }
        }
        Ok(out
            .into_iter()
            .map(|r| r.expect("every qubit propagated"))
            .collect())
    }

    pub fn evaluate(&self, pulse: &PulseSpec, target: &GateTarget) -> Result<GateEvaluation> {
        let results = self.propagate(pulse, &[pulse.tau])?;
        let (internal, full) = fidelities(&results, &self.qubits, target)?;
        Ok(GateEvaluation {
            internal,
            full,
            results,
        })
    }
}

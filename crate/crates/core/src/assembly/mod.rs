//! Pair Hamiltonian in the product basis |n_z⟩ ⊗ |j₁m₁j₂m₂⟩, spectra and
//! state classification.

mod anticrossing;
mod basis;
mod classify;
mod eigen;
mod hamiltonian;
mod scan;

pub use anticrossing::{
    find_anticrossings, find_in_levels, trap_anticrossings, trap_boundary_warnings, Anticrossing,
};
pub use basis::{coherent_amplitudes, BasisSet};
pub use classify::{classify_state, Classifier, ClassifyThresholds, StateCharacter};
pub use eigen::{diagonalize, eigenvalues, EigenSystem};
pub use hamiltonian::{build, Assembler, HamiltonianPair, ModelOptions};
pub use scan::{
    scan_field, scan_separation, trap_reference_internal, Branch, ScanOptions, ScanParameter,
    SpectrumScan,
};

//! Two polar molecules in a pair of optical tweezers.
//!
//! Rotational ⊗ relative-motion Hamiltonian in an oscillator basis, spectra
//! against trap separation and field, interaction-picture dynamics under
//! field pulses, and controlled-phase gate optimization.

pub mod assembly;
pub mod cli;
pub mod constants;
pub mod dynamics;
pub mod error;
pub mod gate;
pub mod params;
pub mod rotor;
pub mod spatial;
pub mod special;

pub use error::{Error, Result};
pub use params::{derive_params, preset, MoleculeSpec, SystemParams, TrapSpec};

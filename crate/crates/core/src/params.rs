//! Physical inputs and the dimensionless parameter set.
//!
//! Energies are measured in ħω, lengths in the relative-motion oscillator
//! length a_ho = sqrt(ħ/(μω)) with μ = m/2, times in 1/ω.  Dipolar energies
//! are SI throughout (d²/4πε₀r³).

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::constants::{ATOMIC_MASS_UNIT, DEBYE, FOUR_PI_EPS0, HBAR, PLANCK};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoleculeSpec {
    pub name: String,
    /// Debye.
    pub dipole_moment: f64,
    /// B/h in Hz.
    pub rotational_constant: f64,
    /// Atomic mass units.
    pub mass: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TrapSpec {
    /// Axial angular frequency, rad/s.
    pub omega: f64,
    pub eta: f64,
    /// Trap separation in units of a_ho.
    pub separation: f64,
    /// Angle between trap axis and field axis, radians.
    #[serde(default)]
    pub theta: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemParams {
    pub b: f64,
    pub dip_strength: f64,
    pub eta: f64,
    pub a_over_aho: f64,
    pub beta: f64,
    pub theta: f64,
    pub omega: f64,
    pub aho_meters: f64,
    pub lperp_over_aho: f64,
    pub r_b_over_aho: f64,
    pub mass_amu: f64,
}

const PRESETS: &[(&str, f64, f64, f64)] = &[
    // name, d [D], B/h [Hz], mass [u]
    ("NaCs", 4.607, 1.813e9, 155.895),
    ("KRb", 0.574, 1.1139e9, 126.873),
    ("RbCs", 1.225, 0.490_17e9, 219.814),
    ("NaK", 2.72, 2.8217e9, 62.953),
];

pub fn preset_names() -> Vec<&'static str> {
    PRESETS.iter().map(|p| p.0).collect()
}

/// Tabulated molecule, looked up case-insensitively.
pub fn preset(name: &str) -> Result<MoleculeSpec> {
    PRESETS
        .iter()
        .find(|p| p.0.eq_ignore_ascii_case(name.trim()))
        .map(|&(n, d, b, m)| MoleculeSpec {
            name: n.to_string(),
            dipole_moment: d,
            rotational_constant: b,
            mass: m,
        })
        .ok_or_else(|| Error::UnknownPreset {
            name: name.to_string(),
            available: preset_names().join(", "),
        })
}

fn positive(field: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(
            field,
            format!("must be positive and finite, got {v}"),
        ))
    }
}

impl MoleculeSpec {
    pub fn validate(&self) -> Result<()> {
        positive("MoleculeSpec.dipole_moment", self.dipole_moment)?;
        positive("MoleculeSpec.rotational_constant", self.rotational_constant)?;
        positive("MoleculeSpec.mass", self.mass)
    }
}

impl TrapSpec {
    pub fn validate(&self) -> Result<()> {
        positive("TrapSpec.omega", self.omega)?;
        if !(self.eta.is_finite() && self.eta >= 1.0) {
            return Err(Error::invalid(
                "TrapSpec.eta",
                format!("must be >= 1, got {}", self.eta),
            ));
        }
        if !(self.separation.is_finite() && self.separation >= 0.0) {
            return Err(Error::invalid(
                "TrapSpec.separation",
                format!("must be >= 0, got {}", self.separation),
            ));
        }
        if !self.theta.is_finite() {
            return Err(Error::invalid("TrapSpec.theta", "must be finite"));
        }
        Ok(())
    }
}

pub fn derive_params(mol: &MoleculeSpec, trap: &TrapSpec, field_beta: f64) -> Result<SystemParams> {
    mol.validate()?;
    trap.validate()?;
    if !(field_beta.is_finite() && field_beta >= 0.0) {
        return Err(Error::invalid(
            "beta",
            format!("must be >= 0, got {field_beta}"),
        ));
    }
    let mu = 0.5 * mol.mass * ATOMIC_MASS_UNIT;
    let aho = (HBAR / (mu * trap.omega)).sqrt();
    let d = mol.dipole_moment * DEBYE;
    let quantum = HBAR * trap.omega;
    let r_b = (d * d / (FOUR_PI_EPS0 * PLANCK * mol.rotational_constant)).cbrt();
    Ok(SystemParams {
        b: 2.0 * PI * mol.rotational_constant / trap.omega,
        dip_strength: d * d / (FOUR_PI_EPS0 * aho.powi(3) * quantum),
        eta: trap.eta,
        a_over_aho: trap.separation,
        beta: field_beta,
        theta: trap.theta,
        omega: trap.omega,
        aho_meters: aho,
        lperp_over_aho: 1.0 / trap.eta.sqrt(),
        r_b_over_aho: r_b / aho,
        mass_amu: mol.mass,
    })
}

impl SystemParams {
    pub fn with_separation(&self, a: f64) -> Self {
        SystemParams {
            a_over_aho: a,
            ..self.clone()
        }
    }

    pub fn with_beta(&self, beta: f64) -> Self {
        SystemParams {
            beta,
            ..self.clone()
        }
    }

    /// D_⊥ = D η^{3/2}.
    pub fn dip_strength_perp(&self) -> f64 {
        self.dip_strength * self.eta.powf(1.5)
    }

    /// Coefficient of f(z/l_⊥) ⊗ G in the Hamiltonian.
    pub fn dipolar_prefactor(&self) -> f64 {
        -self.dip_strength_perp() / 8.0 * (1.0 + 3.0 * (2.0 * self.theta).cos())
    }

    pub fn separation_meters(&self) -> f64 {
        self.a_over_aho * self.aho_meters
    }

    pub fn rotational_constant_hz(&self) -> f64 {
        self.b * self.omega / (2.0 * PI)
    }

    pub fn dipole_moment_debye(&self) -> f64 {
        let d2 = self.dip_strength * FOUR_PI_EPS0 * self.aho_meters.powi(3) * HBAR * self.omega;
        d2.sqrt() / DEBYE
    }

    /// Molecule mass recovered from a_ho and ω, in u.
    pub fn mass_from_length(&self) -> f64 {
        2.0 * HBAR / (self.omega * self.aho_meters.powi(2)) / ATOMIC_MASS_UNIT
    }

    /// Seconds per dimensionless time unit.
    pub fn time_unit(&self) -> f64 {
        1.0 / self.omega
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("SystemParams.b", self.b),
            ("SystemParams.eta", self.eta),
            ("SystemParams.omega", self.omega),
            ("SystemParams.aho_meters", self.aho_meters),
        ] {
            positive(name, v)?;
        }
        if !(self.dip_strength.is_finite() && self.dip_strength >= 0.0) {
            return Err(Error::invalid("SystemParams.dip_strength", "must be >= 0"));
        }
        if !(self.beta.is_finite() && self.beta >= 0.0) {
            return Err(Error::invalid("SystemParams.beta", "must be >= 0"));
        }
        if !(self.a_over_aho.is_finite() && self.a_over_aho >= 0.0) {
            return Err(Error::invalid("SystemParams.a_over_aho", "must be >= 0"));
        }
        Ok(())
    }
}

/// NaCs in a 50 kHz tweezer pair with η = 10 at a = 10.4 a_ho.
pub fn nacs_default() -> SystemParams {
    let trap = TrapSpec {
        omega: 2.0 * PI * 50e3,
        eta: 10.0,
        separation: 10.4,
        theta: 0.0,
    };
    derive_params(&preset("NaCs").unwrap(), &trap, 0.0).unwrap()
}

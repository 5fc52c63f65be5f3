use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PulseKind {
    Quench,
    Sine,
    Crab,
}

/// A cos(ξt) + B sin(ξt), ξ in rad/s.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FourierTerm {
    pub a: f64,
    pub b: f64,
    pub xi: f64,
}

/// C(t) = 1 + Σ (default) or C(t) = Σ.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EnvelopeMode {
    #[default]
    OnePlusSeries,
    SeriesOnly,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PulseSpec {
    pub kind: PulseKind,
    pub beta0: f64,
    /// Seconds.
    pub tau: f64,
    #[serde(default)]
    pub fourier: Vec<FourierTerm>,
    #[serde(default)]
    pub mode: EnvelopeMode,
}

impl PulseSpec {
    pub fn quench(beta0: f64, tau: f64) -> Self {
        PulseSpec {
            kind: PulseKind::Quench,
            beta0,
            tau,
            fourier: Vec::new(),
            mode: EnvelopeMode::OnePlusSeries,
        }
    }

    pub fn sine(beta0: f64, tau: f64) -> Self {
        PulseSpec {
            kind: PulseKind::Sine,
            ..Self::quench(beta0, tau)
        }
    }

    pub fn crab(beta0: f64, tau: f64, fourier: Vec<FourierTerm>) -> Self {
        PulseSpec {
            kind: PulseKind::Crab,
            fourier,
            ..Self::quench(beta0, tau)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.tau.is_finite() && self.tau > 0.0) {
            return Err(Error::invalid(
                "PulseSpec.tau",
                format!("must be positive, got {}", self.tau),
            ));
        }
        if !self.beta0.is_finite() {
            return Err(Error::invalid("PulseSpec.beta0", "must be finite"));
        }
        if self
            .fourier
            .iter()
            .any(|f| !(f.a.is_finite() && f.b.is_finite() && f.xi.is_finite()))
        {
            return Err(Error::invalid(
                "PulseSpec.fourier",
                "coefficients must be finite",
            ));
        }
        Ok(())
    }

    pub fn correction(&self, t: f64) -> f64 {
        let s: f64 = self
            .fourier
            .iter()
            .map(|f| f.a * (f.xi * t).cos() + f.b * (f.xi * t).sin())
            .sum();
        match self.mode {
            EnvelopeMode::OnePlusSeries => 1.0 + s,
            EnvelopeMode::SeriesOnly => s,
        }
    }

    /// β(t) without the domain check; t is clamped to [0, τ].
    pub fn value(&self, t: f64) -> f64 {
        let t = t.clamp(0.0, self.tau);
        match self.kind {
            PulseKind::Quench => self.beta0,
            PulseKind::Sine => self.beta0 * (PI * t / self.tau).sin(),
            PulseKind::Crab => self.beta0 * self.correction(t) * (PI * t / self.tau).sin(),
        }
    }

    pub fn beta_of_t(&self, t: f64) -> Result<f64> {
        let slack = 1e-12 * self.tau;
        if !(t >= -slack && t <= self.tau + slack) {
            return Err(Error::OutsidePulse { t, tau: self.tau });
        }
        Ok(self.value(t))
    }

    /// (t, β) every `dt` seconds including both ends.
    pub fn waveform(&self, dt: f64) -> Vec<(f64, f64)> {
        let n = (self.tau / dt).round().max(1.0) as usize;
        (0..=n)
            .map(|i| {
                let t = self.tau * i as f64 / n as f64;
                (t, self.value(t))
            })
            .collect()
    }
}

pub fn beta_of_t(pulse: &PulseSpec, t: f64) -> Result<f64> {
    pulse.beta_of_t(t)
}

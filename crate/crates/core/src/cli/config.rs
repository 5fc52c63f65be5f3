use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use crate::assembly::{ModelOptions, ScanOptions};
use crate::dynamics::{EnvelopeMode, FourierTerm, PropagationSettings, PulseKind, PulseSpec};
use crate::error::{Error, Result};
use crate::gate::{GateOptions, Objective, OptimizerSettings, DEFAULT_SPEED_LIMIT_THRESHOLD};
use crate::params::{derive_params, preset, MoleculeSpec, SystemParams, TrapSpec};
use crate::spatial::QuadratureOptions;

/// Parses "200ns", "1.5 us", "20µs", "3ms", "2e-7 s" or a bare number of seconds.
pub fn parse_duration(text: &str) -> Result<f64> {
    let t = text.trim();
    let (num, divisor) = [
        ("ns", 1e9),
        ("us", 1e6),
        ("µs", 1e6),
        ("μs", 1e6),
        ("ms", 1e3),
        ("s", 1.0),
    ]
    .iter()
    .find_map(|(u, d)| t.strip_suffix(u).map(|n| (n, *d)))
    .unwrap_or((t, 1.0));
    let value: f64 = num.trim().parse().map_err(|_| {
        Error::invalid(
            "time",
            format!("cannot parse `{text}` (units: s, ms, us, ns)"),
        )
    })?;
    Ok(value / divisor)
}

/// Seconds, written either as a number or as a string with a unit suffix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum TimeValue {
    Seconds(f64),
    Text(String),
}

impl TimeValue {
    pub fn seconds(&self) -> Result<f64> {
        match self {
            TimeValue::Seconds(s) => Ok(*s),
            TimeValue::Text(t) => parse_duration(t),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct MoleculeConfig {
    pub preset: Option<String>,
    pub name: Option<String>,
    /// Debye.
    pub dipole_moment: Option<f64>,
    /// B/h, Hz.
    pub rotational_constant: Option<f64>,
    /// u.
    pub mass: Option<f64>,
}

impl Default for MoleculeConfig {
    fn default() -> Self {
        MoleculeConfig {
            preset: Some("NaCs".into()),
            name: None,
            dipole_moment: None,
            rotational_constant: None,
            mass: None,
        }
    }
}

impl MoleculeConfig {
    /// Preset values overridden by any explicit field; a full explicit
    /// triple needs no preset.
    pub fn resolve(&self) -> Result<MoleculeSpec> {
        let mut spec = match &self.preset {
            Some(p) => preset(p)?,
            None => MoleculeSpec {
                name: self.name.clone().unwrap_or_else(|| "custom".into()),
                dipole_moment: self
                    .dipole_moment
                    .ok_or_else(|| missing("molecule.dipole_moment"))?,
                rotational_constant: self
                    .rotational_constant
                    .ok_or_else(|| missing("molecule.rotational_constant"))?,
                mass: self.mass.ok_or_else(|| missing("molecule.mass"))?,
            },
        };
        if let Some(n) = &self.name {
            spec.name = n.clone();
        }
        if let Some(d) = self.dipole_moment {
            spec.dipole_moment = d;
        }
        if let Some(b) = self.rotational_constant {
            spec.rotational_constant = b;
        }
        if let Some(m) = self.mass {
            spec.mass = m;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn missing(field: &str) -> Error {
    Error::invalid(field, "required when no preset is given")
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrapConfig {
    /// Axial trap frequency ω/2π, Hz.
    pub frequency: f64,
    pub eta: f64,
    /// a_ho.
    pub separation: f64,
    /// Radians.
    pub theta: f64,
}

impl Default for TrapConfig {
    fn default() -> Self {
        TrapConfig {
            frequency: 50e3,
            eta: 10.0,
            separation: 10.4,
            theta: 0.0,
        }
    }
}

impl TrapConfig {
    pub fn spec(&self) -> TrapSpec {
        TrapSpec {
            omega: 2.0 * PI * self.frequency,
            eta: self.eta,
            separation: self.separation,
            theta: self.theta,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub m_total: i32,
    pub j_max: u32,
    pub n_max: usize,
    /// Eigenvalues kept per scan point.
    pub levels: usize,
    pub quadrature_tol: f64,
    pub dimension_cap: usize,
    /// Contact term strength g, ħω·a_ho.
    pub contact_strength: f64,
    pub propagation_tol: f64,
    /// Step cap as a fraction of the fastest period.
    pub resolution: f64,
    /// Propagation window half-width, ħω.
    pub window_half_width: f64,
    pub window_depth: usize,
    pub samples: usize,
    pub cache_dir: Option<PathBuf>,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let prop = PropagationSettings::default();
        NumericsConfig {
            m_total: 1,
            j_max: 2,
            n_max: 120,
            levels: 40,
            quadrature_tol: QuadratureOptions::default().rel_tol,
            dimension_cap: ModelOptions::default().dimension_cap,
            contact_strength: 0.0,
            propagation_tol: prop.tolerance,
            resolution: prop.resolution,
            window_half_width: 8.0,
            window_depth: 1,
            samples: 500,
            cache_dir: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ScanConfig {
    pub a_min: f64,
    pub a_max: f64,
    pub a_points: usize,
    /// Field for separation scans.
    pub beta: f64,
    pub beta_min: f64,
    pub beta_max: f64,
    pub beta_points: usize,
    /// Widest gap (ħω) still counted as an anticrossing.
    pub gap_max: f64,
}

impl Default for ScanConfig {
    fn default() -> Self {
        ScanConfig {
            a_min: 4.0,
            a_max: 14.0,
            a_points: 101,
            beta: 0.0,
            beta_min: 0.0,
            beta_max: 0.16,
            beta_points: 33,
            gap_max: 1.0,
        }
    }
}

fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

impl ScanConfig {
    pub fn separation_grid(&self) -> Vec<f64> {
        linspace(self.a_min, self.a_max, self.a_points)
    }

    pub fn field_grid(&self) -> Vec<f64> {
        linspace(self.beta_min, self.beta_max, self.beta_points)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PulseConfig {
    pub kind: PulseKind,
    pub beta0: f64,
    pub tau: TimeValue,
    pub fourier: Vec<FourierTerm>,
    pub mode: EnvelopeMode,
}

impl Default for PulseConfig {
    fn default() -> Self {
        PulseConfig {
            kind: PulseKind::Quench,
            beta0: 0.16,
            tau: TimeValue::Text("200ns".into()),
            fourier: Vec::new(),
            mode: EnvelopeMode::OnePlusSeries,
        }
    }
}

impl PulseConfig {
    pub fn spec(&self) -> Result<PulseSpec> {
        let p = PulseSpec {
            kind: self.kind,
            beta0: self.beta0,
            tau: self.tau.seconds()?,
            fourier: self.fourier.clone(),
            mode: self.mode,
        };
        p.validate()?;
        Ok(p)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GateConfig {
    pub tau: TimeValue,
    /// Amplitude of the sine start.
    pub beta0: f64,
    pub terms: usize,
    pub seed: u64,
    pub objective: Objective,
    pub optimizer: OptimizerSettings,
    /// Effective couplings below this fraction of the diagonal are ignored.
    pub speed_limit_threshold: f64,
}

impl Default for GateConfig {
    fn default() -> Self {
        GateConfig {
            tau: TimeValue::Text("150ns".into()),
            beta0: 0.12,
            terms: 3,
            seed: 1,
            objective: Objective::Internal,
            optimizer: OptimizerSettings::default(),
            speed_limit_threshold: DEFAULT_SPEED_LIMIT_THRESHOLD,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub directory: Option<PathBuf>,
    pub formats: Vec<String>,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            directory: None,
            formats: vec!["tsv".into()],
        }
    }
}

/// Everything a run needs; unknown keys are rejected.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub molecule: MoleculeConfig,
    pub trap: TrapConfig,
    pub numerics: NumericsConfig,
    pub scan: ScanConfig,
    pub pulse: PulseConfig,
    pub gate: GateConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_toml(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Validation {
            field: path.display().to_string(),
            reason: e.message().to_string(),
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text, path)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn system_params(&self) -> Result<SystemParams> {
        let mol = self.molecule.resolve()?;
        derive_params(&mol, &self.trap.spec(), self.scan.beta)
    }

    pub fn model_options(&self) -> ModelOptions {
        ModelOptions {
            dimension_cap: self.numerics.dimension_cap,
            contact_strength: self.numerics.contact_strength,
            quadrature: QuadratureOptions {
                rel_tol: self.numerics.quadrature_tol,
                ..QuadratureOptions::default()
            },
            cache_dir: self
                .numerics
                .cache_dir
                .clone()
                .or_else(|| std::env::var_os(CACHE_ENV).map(PathBuf::from)),
        }
    }

    pub fn scan_options(&self) -> ScanOptions {
        ScanOptions {
            levels: self.numerics.levels,
            model: self.model_options(),
            ..ScanOptions::default()
        }
    }

    pub fn propagation(&self) -> PropagationSettings {
        PropagationSettings {
            tolerance: self.numerics.propagation_tol,
            resolution: self.numerics.resolution,
            ..PropagationSettings::default()
        }
    }

    pub fn gate_options(&self) -> GateOptions {
        GateOptions {
            j_max: self.numerics.j_max,
            n_max: self.numerics.n_max,
            half_width: self.numerics.window_half_width,
            depth: self.numerics.window_depth,
            model: self.model_options(),
            propagation: self.propagation(),
        }
    }

    /// Checks everything that can be checked without building matrices.
    pub fn validate(&self) -> Result<()> {
        self.system_params()?;
        let n = &self.numerics;
        if n.j_max == 0 {
            return Err(Error::invalid("numerics.j_max", "must be at least 1"));
        }
        if n.levels == 0 {
            return Err(Error::invalid("numerics.levels", "must be positive"));
        }
        for (field, v) in [
            ("numerics.quadrature_tol", n.quadrature_tol),
            ("numerics.propagation_tol", n.propagation_tol),
            ("numerics.resolution", n.resolution),
            ("numerics.window_half_width", n.window_half_width),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(field, format!("must be positive, got {v}")));
            }
        }
        if !n.contact_strength.is_finite() {
            return Err(Error::invalid(
                "numerics.contact_strength",
                "must be finite",
            ));
        }
        let s = &self.scan;
        if !(s.a_min > 0.0 && s.a_max > s.a_min && s.a_points >= 2) {
            return Err(Error::invalid(
                "scan.a_*",
                "need 0 < a_min < a_max and a_points ≥ 2",
            ));
        }
        if !(s.beta_max > s.beta_min && s.beta_points >= 2) {
            return Err(Error::invalid(
                "scan.beta_*",
                "need beta_min < beta_max and beta_points ≥ 2",
            ));
        }
        if !(s.gap_max > 0.0) {
            return Err(Error::invalid("scan.gap_max", "must be positive"));
        }
        self.pulse.spec()?;
        let tau = self.gate.tau.seconds()?;
        if !(tau > 0.0) {
            return Err(Error::invalid("gate.tau", "must be positive"));
        }
        if !(self.gate.speed_limit_threshold >= 0.0) {
            return Err(Error::invalid(
                "gate.speed_limit_threshold",
                "must be non-negative",
            ));
        }
        if let Some(f) = self.output.formats.iter().find(|f| f.as_str() != "tsv") {
            return Err(Error::invalid(
                "output.formats",
                format!("unsupported format `{f}` (only tsv)"),
            ));
        }
        Ok(())
    }
}

pub const OUTPUT_ENV: &str = "TWEEZER_OUTPUT_DIR";
pub const CACHE_ENV: &str = "TWEEZER_CACHE_DIR";

#[cfg(test)]
mod tests {
    use super::*;

    fn shipped() -> RunConfig {
        RunConfig::load(&Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/nacs.toml")).unwrap()
    }

    #[test]
    fn durations() {
        assert_eq!(parse_duration("200ns").unwrap(), 200e-9);
        assert_eq!(parse_duration("1.5 us").unwrap(), 1.5e-6);
        assert_eq!(parse_duration("20µs").unwrap(), 20e-6);
        assert_eq!(parse_duration("3ms").unwrap(), 3e-3);
        assert_eq!(parse_duration("2e-7").unwrap(), 2e-7);
        assert_eq!(parse_duration("2e-7 s").unwrap(), 2e-7);
        assert!(parse_duration("5 min").is_err());
        assert!(parse_duration("ns").is_err());
    }

    #[test]
    fn shipped_config_matches_defaults() {
        let c = shipped();
        c.validate().unwrap();
        let mut d = RunConfig::default();
        d.pulse.tau = c.pulse.tau.clone();
        d.gate.tau = c.gate.tau.clone();
        assert_eq!(c, d);
        let back = RunConfig::from_toml(&c.to_toml(), Path::new("round-trip")).unwrap();
        assert_eq!(back, c);
    }

    #[test]
    fn strict_parsing() {
        let e = RunConfig::from_toml("[trap]\nfrequncy = 1.0\n", Path::new("x.toml")).unwrap_err();
        assert!(e.is_validation());
        assert!(e.to_string().contains("frequncy"), "{e}");
        assert!(RunConfig::from_toml("[bogus]\n", Path::new("x.toml")).is_err());
        assert!(RunConfig::from_toml("[pulse]\nkind = \"square\"\n", Path::new("x.toml")).is_err());
    }

    #[test]
    fn rejections_name_the_field() {
        let mut c = RunConfig::default();
        c.trap.eta = 0.5;
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("TrapSpec.eta"));
        let mut c = RunConfig::default();
        c.output.formats = vec!["hdf5".into()];
        assert!(c
            .validate()
            .unwrap_err()
            .to_string()
            .contains("output.formats"));
        let mut c = RunConfig::default();
        c.pulse.tau = TimeValue::Text("-5ns".into());
        assert!(c.validate().is_err());
    }

    #[test]
    fn explicit_molecule() {
        let m = MoleculeConfig {
            preset: None,
            name: Some("toy".into()),
            dipole_moment: Some(1.0),
            rotational_constant: Some(2e9),
            mass: Some(100.0),
        };
        let spec = m.resolve().unwrap();
        assert_eq!(
            (spec.dipole_moment, spec.rotational_constant, spec.mass),
            (1.0, 2e9, 100.0)
        );
        let partial = MoleculeConfig {
            preset: None,
            dipole_moment: Some(1.0),
            ..MoleculeConfig::default()
        };
        assert!(partial
            .resolve()
            .unwrap_err()
            .to_string()
            .contains("molecule"));
        let over = MoleculeConfig {
            mass: Some(150.0),
            ..MoleculeConfig::default()
        };
        assert_eq!(over.resolve().unwrap().mass, 150.0);
    }
}

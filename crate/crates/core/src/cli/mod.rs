//! Command-line front end: TOML run configuration, the five workflows and
//! their tab-separated outputs with `.meta.toml` sidecars.
//!
//! Exit codes: 0 success, 1 invalid input, 2 numerical failure (a
//! `diagnostics.txt` is written to the output directory), 3 I/O.

mod config;
mod output;
mod run;

use clap::{Args, Parser, Subcommand};
use std::ffi::OsString;
use std::path::{Path, PathBuf};

pub use config::{
    parse_duration, GateConfig, MoleculeConfig, NumericsConfig, OutputConfig, PulseConfig,
    RunConfig, ScanConfig, TimeValue, TrapConfig, CACHE_ENV, OUTPUT_ENV,
};
pub use output::{num, RunOutput, Table};
pub use run::{
    output_dir, run, summarize, validate, BlockRun, QuenchSummary, WindowView, Workflow,
};

use crate::error::Error;

#[derive(Debug, Parser)]
#[command(
    name = "tweezer",
    version,
    about = "Two polar molecules in neighbouring optical tweezers"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum against trap separation.
    SpectrumSeparation(Overrides),
    /// Spectrum against field at fixed separation.
    SpectrumField(Overrides),
    /// Field quench from the trap state.
    Quench(Overrides),
    /// Shaped pulse applied to the four qubit states.
    Pulse(Overrides),
    /// Optimize a controlled-phase pulse.
    GateOptimize(Overrides),
    /// Check a configuration and report basis sizes without computing.
    Validate {
        #[command(flatten)]
        overrides: Overrides,
        /// Also check the blocks this workflow needs.
        #[arg(long)]
        workflow: Option<String>,
    },
}

#[derive(Debug, Default, Clone, Args)]
pub struct Overrides {
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub preset: Option<String>,
    /// Total angular-momentum projection.
    #[arg(long = "M", visible_alias = "m-total")]
    pub m_total: Option<i32>,
    /// Scan field for spectrum-separation, pulse amplitude otherwise.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Pulse length with ns/us/ms suffix.
    #[arg(long)]
    pub tau: Option<String>,
    /// Trap separation, a_ho.
    #[arg(long)]
    pub separation: Option<f64>,
    #[arg(long)]
    pub j_max: Option<u32>,
    #[arg(long)]
    pub n_max: Option<usize>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub output_dir: Option<PathBuf>,
}

impl Overrides {
    /// Loads the config (defaults when none is given) and applies the flags.
    pub fn resolve(&self, workflow: Option<Workflow>) -> crate::Result<RunConfig> {
        let mut c = match &self.config {
            Some(p) => RunConfig::load(p)?,
            None => RunConfig::default(),
        };
        if let Some(p) = &self.preset {
            c.molecule.preset = Some(p.clone());
        }
        if let Some(m) = self.m_total {
            c.numerics.m_total = m;
        }
        if let Some(a) = self.separation {
            c.trap.separation = a;
        }
        if let Some(j) = self.j_max {
            c.numerics.j_max = j;
        }
        if let Some(n) = self.n_max {
            c.numerics.n_max = n;
        }
        if let Some(s) = self.samples {
            c.numerics.samples = s;
        }
        if let Some(s) = self.seed {
            c.gate.seed = s;
        }
        if let Some(i) = self.max_iters {
            c.gate.optimizer.max_iters = i;
        }
        if let Some(t) = &self.tau {
            parse_duration(t)?;
            match workflow {
                Some(Workflow::GateOptimize) => c.gate.tau = TimeValue::Text(t.clone()),
                _ => c.pulse.tau = TimeValue::Text(t.clone()),
            }
        }
        if let Some(b) = self.beta {
            match workflow {
                Some(Workflow::SpectrumSeparation) | None => c.scan.beta = b,
                Some(Workflow::SpectrumField) => c.scan.beta_max = b,
                Some(Workflow::GateOptimize) => c.gate.beta0 = b,
                Some(Workflow::Quench) | Some(Workflow::Pulse) => c.pulse.beta0 = b,
            }
        }
        if workflow == Some(Workflow::Quench) {
            c.pulse.kind = crate::dynamics::PulseKind::Quench;
        }
        Ok(c)
    }
}

pub fn parse_workflow(name: &str) -> crate::Result<Workflow> {
    [
        Workflow::SpectrumSeparation,
        Workflow::SpectrumField,
        Workflow::Quench,
        Workflow::Pulse,
        Workflow::GateOptimize,
    ]
    .into_iter()
    .find(|w| w.name() == name)
    .ok_or_else(|| Error::invalid("workflow", format!("unknown workflow `{name}`")))
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        1
    } else if e.is_io() {
        3
    } else {
        2
    }
}

fn write_diagnostics(dir: &Path, command: &str, config: &RunConfig, err: &Error) {
    let text = format!(
        "command = {command:?}\nerror = {:?}\nversion = {:?}\n\n[config]\n{}",
        err.to_string(),
        env!("CARGO_PKG_VERSION"),
        config.to_toml()
    );
    if std::fs::create_dir_all(dir).is_ok() {
        let _ = std::fs::write(dir.join("diagnostics.txt"), text);
    }
}

/// Runs one command; returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    let (overrides, workflow, validate_only) = match &cli.command {
        Command::SpectrumSeparation(o) => (o, Some(Workflow::SpectrumSeparation), false),
        Command::SpectrumField(o) => (o, Some(Workflow::SpectrumField), false),
        Command::Quench(o) => (o, Some(Workflow::Quench), false),
        Command::Pulse(o) => (o, Some(Workflow::Pulse), false),
        Command::GateOptimize(o) => (o, Some(Workflow::GateOptimize), false),
        Command::Validate {
            overrides,
            workflow,
        } => {
            let w = match workflow.as_deref().map(parse_workflow).transpose() {
                Ok(w) => w,
                Err(e) => {
                    eprintln!("error: {e}");
                    return exit_code(&e);
                }
            };
            (overrides, w, true)
        }
    };
    let config = match overrides.resolve(workflow) {
        Ok(c) => c,
        Err(e) => {
            eprintln!("error: {e}");
            return exit_code(&e);
        }
    };
    if validate_only {
        return match validate(&config, workflow) {
            Ok(report) => {
                print!("{report}");
                println!("valid");
                0
            }
            Err(e) => {
                eprintln!("error: {e}");
                if let Error::DimensionCap { dim, .. } = e {
                    eprintln!("hint: set numerics.dimension_cap = {dim} or larger");
                }
                exit_code(&e)
            }
        };
    }
    let workflow = workflow.expect("workflow commands");
    let dir = output_dir(overrides.output_dir.as_deref(), &config);
    match run(workflow, &config, &dir) {
        Ok(out) => {
            for (k, v) in out.summary() {
                println!("{k} = {v}");
            }
            println!("wrote {} files to {}", out.files().len() + 1, dir.display());
            0
        }
        Err(e) => {
            eprintln!("error: {e}");
            let code = exit_code(&e);
            if code == 2 {
                write_diagnostics(&dir, workflow.name(), &config, &e);
            }
            code
        }
    }
}

/// Parses `args` (program name first) and runs.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            code
        }
    }
}

use std::path::{Path, PathBuf};

use super::config::{RunConfig, OUTPUT_ENV};
use super::output::{num, RunOutput, Table};
use crate::assembly::{
    diagonalize, trap_anticrossings, trap_boundary_warnings, Assembler, Classifier,
    ClassifyThresholds, EigenSystem, ScanParameter, SpectrumScan, StateCharacter,
};
use crate::dynamics::{
    field_window, sample_times, trap_initial_state, FieldWindow, InitialState, PairLabel,
    PropagationResult, Propagator, PulseKind, PulseSpec,
};
use crate::error::{Error, Result};
use crate::gate::{crab_start, fidelities, optimize, speed_limit_estimate, GateSystem, GateTarget};
use crate::rotor::enumerate_internal;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Workflow {
    SpectrumSeparation,
    SpectrumField,
    Quench,
    Pulse,
    GateOptimize,
}

impl Workflow {
    pub fn name(&self) -> &'static str {
        match self {
            Workflow::SpectrumSeparation => "spectrum-separation",
            Workflow::SpectrumField => "spectrum-field",
            Workflow::Quench => "quench",
            Workflow::Pulse => "pulse",
            Workflow::GateOptimize => "gate-optimize",
        }
    }

    /// M blocks the workflow diagonalizes.
    pub fn blocks(&self, config: &RunConfig) -> Vec<i32> {
        match self {
            Workflow::Pulse | Workflow::GateOptimize => vec![0, 1, 2],
            _ => vec![config.numerics.m_total],
        }
    }
}

/// Output directory: explicit, then config, then environment, then `tweezer-out`.
pub fn output_dir(explicit: Option<&Path>, config: &RunConfig) -> PathBuf {
    explicit
        .map(Path::to_path_buf)
        .or_else(|| config.output.directory.clone())
        .or_else(|| std::env::var_os(OUTPUT_ENV).map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("tweezer-out"))
}

/// Dry-run report: basis sizes and a dense-storage memory bound per block.
pub fn validate(config: &RunConfig, workflow: Option<Workflow>) -> Result<String> {
    config.validate()?;
    let params = config.system_params()?;
    let n = &config.numerics;
    let blocks = workflow
        .map(|w| w.blocks(config))
        .unwrap_or_else(|| vec![n.m_total]);
    let mut report = String::new();
    report.push_str(&format!(
        "molecule a_ho = {:.4e} m, b = {:.6}, D = {:.6}, l_perp = {:.6} a_ho, r_B = {:.6} a_ho\n",
        params.aho_meters,
        params.b,
        params.dip_strength,
        params.lperp_over_aho,
        params.r_b_over_aho
    ));
    for m in blocks {
        let internal = enumerate_internal(n.j_max, m)?;
        let dim = (n.n_max + 1) * internal.len();
        if dim > n.dimension_cap {
            return Err(Error::DimensionCap {
                dim,
                cap: n.dimension_cap,
            });
        }
        let bytes = 4.0 * (dim as f64).powi(2) * 8.0;
        report.push_str(&format!(
            "M = {m}: {} internal x {} motional = {dim} states, dense memory bound {:.1} MiB\n",
            internal.len(),
            n.n_max + 1,
            bytes / (1024.0 * 1024.0)
        ));
    }
    Ok(report)
}

pub fn run(workflow: Workflow, config: &RunConfig, dir: &Path) -> Result<RunOutput> {
    config.validate()?;
    validate(config, Some(workflow))?;
    let mut out = RunOutput::new(dir, workflow.name());
    match workflow {
        Workflow::SpectrumSeparation => spectrum(config, ScanParameter::Separation, &mut out)?,
        Workflow::SpectrumField => spectrum(config, ScanParameter::Field, &mut out)?,
        Workflow::Quench => quench(config, &mut out)?,
        Workflow::Pulse => pulse(config, &mut out)?,
        Workflow::GateOptimize => gate_optimize(config, &mut out)?,
    }
    out.finish(config)?;
    Ok(out)
}

fn assembler(config: &RunConfig, m: i32) -> Result<Assembler> {
    let params = config.system_params()?;
    Assembler::new(
        &params,
        m,
        config.numerics.j_max,
        config.numerics.n_max,
        config.model_options(),
    )
}

fn spectrum(config: &RunConfig, parameter: ScanParameter, out: &mut RunOutput) -> Result<()> {
    let m = config.numerics.m_total;
    let asm = assembler(config, m)?;
    let grid = match parameter {
        ScanParameter::Separation => config.scan.separation_grid(),
        ScanParameter::Field => config.scan.field_grid(),
    };
    let scan = asm.scan(parameter, &grid, &config.scan_options())?;
    let stem = format!("{}_M{m}", out.command.replace('-', "_"));
    out.table(&format!("{stem}.tsv"), &levels_table(&scan))?;
    out.table(&format!("{stem}_branches.tsv"), &branches_table(&scan))?;
    out.record("m_total", m as i64);
    out.record("rotational_offset", scan.rotational_offset);
    if parameter == ScanParameter::Separation {
        let found = trap_anticrossings(&scan, config.scan.gap_max)?;
        let edges = trap_boundary_warnings(&scan, config.scan.gap_max)?;
        let mut t = Table::new(&[
            ("a", "a_ho"),
            ("gap", "hbar_omega"),
            ("lower", ""),
            ("upper", ""),
            ("boundary", ""),
            ("resolved", ""),
        ]);
        for ac in found.iter().chain(&edges) {
            t.push(vec![
                num(ac.parameter),
                num(ac.gap),
                ac.lower.to_string(),
                ac.upper.to_string(),
                ac.boundary.to_string(),
                ac.resolved.to_string(),
            ]);
        }
        out.table(&format!("{stem}_anticrossings.tsv"), &t)?;
        out.record("trap_anticrossings", found.len() as i64);
        out.record("boundary_warnings", edges.len() as i64);
    } else {
        let e = scan.trap_energies();
        out.record("trap_shift", e.last().unwrap() - e[0]);
    }
    Ok(())
}

fn levels_table(scan: &SpectrumScan) -> Table {
    let (sym, unit) = (scan.parameter.symbol(), scan.parameter.unit());
    let mut t = Table::new(&[
        (sym, unit),
        ("level", ""),
        ("energy", "hbar_omega"),
        ("character", ""),
        ("trap", ""),
    ]);
    for (p, x) in scan.grid.iter().enumerate() {
        for (l, e) in scan.energies[p].iter().enumerate() {
            t.push(vec![
                num(*x),
                l.to_string(),
                num(e - scan.rotational_offset),
                scan.characters[p][l].to_string(),
                u8::from(scan.trap_index[p] == l).to_string(),
            ]);
        }
    }
    t
}

fn branches_table(scan: &SpectrumScan) -> Table {
    let (sym, unit) = (scan.parameter.symbol(), scan.parameter.unit());
    let mut t = Table::new(&[
        ("branch", ""),
        (sym, unit),
        ("level", ""),
        ("energy", "hbar_omega"),
        ("character", ""),
    ]);
    for (id, b) in scan.branches.iter().enumerate() {
        for (i, &l) in b.levels.iter().enumerate() {
            let p = b.start + i;
            t.push(vec![
                id.to_string(),
                num(scan.grid[p]),
                l.to_string(),
                num(scan.energies[p][l] - scan.rotational_offset),
                scan.characters[p][l].to_string(),
            ]);
        }
    }
    t
}

/// Field-free eigensystem of one block with its propagation window.
pub struct BlockRun {
    pub assembler: Assembler,
    pub eig: EigenSystem,
    pub window: FieldWindow,
    pub propagator: Propagator,
    pub initial: usize,
    pub overlap: f64,
}

impl BlockRun {
    pub fn new(config: &RunConfig, label: PairLabel) -> Result<Self> {
        let asm = assembler(config, label.m_total())?;
        let a = asm.params.a_over_aho;
        let eig = diagonalize(&asm.h0(a))?;
        let chi = label.internal_vector(&asm.basis)?;
        let (initial, overlap) = trap_initial_state(&eig, &asm.basis, a, &chi);
        let window = field_window(
            &eig,
            &asm.basis,
            asm.params.b,
            &[initial],
            config.numerics.window_half_width,
            config.numerics.window_depth,
        );
        let propagator = Propagator::new(
            &eig,
            &asm.w(),
            asm.params.omega,
            &window.indices,
            Some(&window.branches),
            config.propagation(),
        )?;
        Ok(BlockRun {
            assembler: asm,
            eig,
            window,
            propagator,
            initial,
            overlap,
        })
    }

    pub fn view(&self) -> WindowView<'_> {
        WindowView {
            assembler: &self.assembler,
            eig: &self.eig,
            window: &self.window,
            initial: self.initial,
        }
    }
}

/// What the tables need to label propagated states.
#[derive(Clone, Copy)]
pub struct WindowView<'a> {
    pub assembler: &'a Assembler,
    pub eig: &'a EigenSystem,
    pub window: &'a FieldWindow,
    pub initial: usize,
}

impl WindowView<'_> {
    pub fn characters(&self) -> Vec<StateCharacter> {
        let p = &self.assembler.params;
        let cls = Classifier::new(
            &self.assembler.basis,
            p.a_over_aho,
            p.r_b_over_aho,
            ClassifyThresholds::default(),
        );
        self.window
            .indices
            .iter()
            .map(|&k| cls.classify(&self.eig.vector(k)))
            .collect()
    }
}

/// Per-time populations: initial state, bound states, other rotational branches.
pub struct QuenchSummary {
    pub times: Vec<f64>,
    pub initial: Vec<f64>,
    pub bound: Vec<f64>,
    pub higher_branch: Vec<f64>,
    pub norm_defect: Vec<f64>,
}

pub fn summarize(run: WindowView<'_>, result: &PropagationResult) -> QuenchSummary {
    let chars = run.characters();
    let pos = result
        .position(run.initial)
        .expect("initial state propagated");
    let home = run.window.branches[pos];
    let mut s = QuenchSummary {
        times: result.times.clone(),
        initial: Vec::new(),
        bound: Vec::new(),
        higher_branch: Vec::new(),
        norm_defect: Vec::new(),
    };
    for amps in &result.amplitudes {
        let p: Vec<f64> = amps.iter().map(|c| c.norm_sqr()).collect();
        s.initial.push(p[pos]);
        let total = |it: &mut dyn Iterator<Item = f64>| it.fold(0.0, |acc, x| acc + x);
        s.bound.push(total(
            &mut p
                .iter()
                .zip(&chars)
                .filter(|(_, c)| **c == StateCharacter::Bound)
                .map(|(x, _)| *x),
        ));
        s.higher_branch.push(total(
            &mut p
                .iter()
                .zip(&run.window.branches)
                .filter(|(_, b)| **b != home)
                .map(|(x, _)| *x),
        ));
        s.norm_defect.push((p.iter().sum::<f64>() - 1.0).abs());
    }
    s
}

fn summary_table(s: &QuenchSummary) -> Table {
    let mut t = Table::new(&[
        ("t", "ns"),
        ("initial_population", ""),
        ("bound_population", ""),
        ("higher_branch_population", ""),
        ("norm_defect", ""),
    ]);
    for i in 0..s.times.len() {
        t.push(vec![
            num(s.times[i] * 1e9),
            num(s.initial[i]),
            num(s.bound[i]),
            num(s.higher_branch[i]),
            num(s.norm_defect[i]),
        ]);
    }
    t
}

/// Amplitudes of every state whose population ever exceeds `floor`.
fn states_table(run: WindowView<'_>, result: &PropagationResult, floor: f64) -> Table {
    let chars = run.characters();
    let offset = run.eig.energies[run.initial];
    let mut t = Table::new(&[
        ("t", "ns"),
        ("state", ""),
        ("energy", "hbar_omega"),
        ("character", ""),
        ("branch", ""),
        ("re", ""),
        ("im", ""),
        ("population", ""),
    ]);
    let keep: Vec<usize> = (0..result.active.len())
        .filter(|&i| result.amplitudes.iter().any(|a| a[i].norm_sqr() > floor))
        .collect();
    for (ti, time) in result.times.iter().enumerate() {
        for &i in &keep {
            let c = result.amplitudes[ti][i];
            t.push(vec![
                num(time * 1e9),
                result.active[i].to_string(),
                num(result.energies[i] - offset),
                chars[i].to_string(),
                run.window.branches[i].to_string(),
                num(c.re),
                num(c.im),
                num(c.norm_sqr()),
            ]);
        }
    }
    t
}

fn waveform_table(pulse: &PulseSpec) -> Table {
    let mut t = Table::new(&[("t", "ns"), ("beta", "")]);
    for (time, b) in pulse.waveform(1e-9) {
        t.push(vec![num(time * 1e9), num(b)]);
    }
    t
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

fn quench(config: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let m = config.numerics.m_total;
    let label = match m {
        0 => PairLabel::Ground,
        1 => PairLabel::Plus,
        2 => PairLabel::Excited,
        _ => {
            return Err(Error::invalid(
                "numerics.m_total",
                "quench needs M in {0, 1, 2}",
            ))
        }
    };
    let base = config.pulse.spec()?;
    let pulse = PulseSpec {
        kind: PulseKind::Quench,
        ..PulseSpec::quench(base.beta0, base.tau)
    };
    let run = BlockRun::new(config, label)?;
    let times = sample_times(pulse.tau, config.numerics.samples);
    let result = run
        .propagator
        .run(&pulse, &InitialState::Eigenstate(run.initial), &times)?;
    let s = summarize(run.view(), &result);
    let stem = format!("quench_M{m}");
    out.table(&format!("{stem}_summary.tsv"), &summary_table(&s))?;
    out.table(
        &format!("{stem}_states.tsv"),
        &states_table(run.view(), &result, 1e-3),
    )?;
    out.record("m_total", m as i64);
    out.record("initial_state", run.initial as i64);
    out.record("initial_overlap", run.overlap);
    out.record("window_states", run.window.indices.len() as i64);
    out.record("min_initial_population", min(&s.initial));
    out.record("max_bound_population", max(&s.bound));
    out.record("max_higher_branch_population", max(&s.higher_branch));
    out.record("max_norm_defect", max(&s.norm_defect));
    out.record("steps", result.steps as i64);
    Ok(())
}

fn pulse(config: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let pulse = config.pulse.spec()?;
    let system = GateSystem::new(&config.system_params()?, &config.gate_options())?;
    let times = sample_times(pulse.tau, config.numerics.samples);
    let results = system.propagate(&pulse, &times)?;
    for (q, r) in system.qubits.states.iter().zip(&results) {
        let block = system.block(q.m_total);
        let view = WindowView {
            assembler: &block.assembler,
            eig: &block.eig,
            window: &block.window,
            initial: q.index,
        };
        let s = summarize(view, r);
        out.table(
            &format!("pulse_{}_summary.tsv", q.label.slug()),
            &summary_table(&s),
        )?;
        out.table(
            &format!("pulse_{}_states.tsv", q.label.slug()),
            &states_table(view, r, 1e-3),
        )?;
        out.record(
            &format!("min_initial_population_{}", q.label.slug()),
            min(&s.initial),
        );
    }
    out.table("pulse_waveform.tsv", &waveform_table(&pulse))?;
    let finals: Vec<PropagationResult> = results
        .iter()
        .map(|r| PropagationResult {
            times: vec![*r.times.last().unwrap()],
            amplitudes: vec![r.final_amplitudes().to_vec()],
            ..r.clone()
        })
        .collect();
    let (internal, full) = fidelities(&finals, &system.qubits, &GateTarget::default())?;
    out.record("internal_fidelity", internal);
    out.record("full_fidelity", full);
    Ok(())
}

fn gate_optimize(config: &RunConfig, out: &mut RunOutput) -> Result<()> {
    let g = &config.gate;
    let tau = g.tau.seconds()?;
    let system = GateSystem::new(&config.system_params()?, &config.gate_options())?;
    let start = crab_start(g.beta0, tau, g.terms, g.seed);
    let target = GateTarget::default();
    let result = optimize(&system, &start, &target, g.objective, &g.optimizer)?;
    let limit = speed_limit_estimate(&system, g.speed_limit_threshold);

    let mut trace = Table::new(&[
        ("iteration", ""),
        ("trial", ""),
        ("best", ""),
        ("step", ""),
        ("accepted", ""),
        ("failures", ""),
        ("evaluations", ""),
    ]);
    for e in &result.trace {
        trace.push(vec![
            e.iteration.to_string(),
            num(e.trial),
            num(e.best),
            num(e.step),
            e.accepted.to_string(),
            e.failures.to_string(),
            e.evaluations.to_string(),
        ]);
    }
    out.table("gate_trace.tsv", &trace)?;
    out.table("gate_waveform.tsv", &waveform_table(&result.pulse))?;
    out.toml("gate_report.toml", &result)?;
    let mut qubits = Table::new(&[
        ("label", ""),
        ("M", ""),
        ("state", ""),
        ("overlap", ""),
        ("members", ""),
    ]);
    for q in &system.qubits.states {
        qubits.push(vec![
            q.label.to_string(),
            q.m_total.to_string(),
            q.index.to_string(),
            num(q.overlap),
            q.members.len().to_string(),
        ]);
    }
    out.table("gate_qubits.tsv", &qubits)?;
    out.record("internal_fidelity", result.internal_fidelity);
    out.record("full_fidelity", result.full_fidelity);
    out.record("iterations", (result.trace.len() - 1) as i64);
    out.record("speed_limit_seconds", limit.seconds);
    out.record("speed_limit_gap", limit.gap);
    if let Some(l) = limit.label {
        out.record("speed_limit_qubit", l.as_str());
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_reports_dimensions() {
        let c = RunConfig::default();
        let r = validate(&c, None).unwrap();
        let internal = enumerate_internal(2, 1).unwrap().len();
        assert!(r.contains(&format!("= {} states", 121 * internal)), "{r}");
        let r = validate(&c, Some(Workflow::GateOptimize)).unwrap();
        assert_eq!(r.matches(" states,").count(), 3);
    }

    #[test]
    fn dimension_cap_rejection() {
        let mut c = RunConfig::default();
        c.numerics.n_max = 5000;
        match validate(&c, None).unwrap_err() {
            Error::DimensionCap { dim, cap } => {
                assert_eq!(dim, 5001 * enumerate_internal(2, 1).unwrap().len());
                assert_eq!(cap, 20000);
            }
            e => panic!("{e}"),
        }
    }
}

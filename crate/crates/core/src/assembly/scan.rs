use faer::{Mat, Side};
use serde::{Deserialize, Serialize};

use super::classify::{Classifier, ClassifyThresholds, StateCharacter};
use super::eigen::diagonalize;
use super::hamiltonian::{Assembler, ModelOptions};
use crate::error::{Error, Result};
use crate::params::SystemParams;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanParameter {
    Separation,
    Field,
}

impl ScanParameter {
    pub fn symbol(&self) -> &'static str {
        match self {
            ScanParameter::Separation => "a",
            ScanParameter::Field => "beta",
        }
    }

    pub fn unit(&self) -> &'static str {
        match self {
            ScanParameter::Separation => "a_ho",
            ScanParameter::Field => "dE/B",
        }
    }
}

#[derive(Clone, Debug)]
pub struct ScanOptions {
    /// Number of lowest levels kept per point.
    pub levels: usize,
    pub thresholds: ClassifyThresholds,
    /// Squared overlap required to continue a branch between points.
    pub min_overlap: f64,
    pub model: ModelOptions,
    /// Internal vector of the tracked trap state; defaults to
    /// [`trap_reference_internal`].
    pub reference: Option<Vec<f64>>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions {
            levels: 40,
            thresholds: ClassifyThresholds::default(),
            min_overlap: 0.25,
            model: ModelOptions::default(),
            reference: None,
        }
    }
}

/// Overlap-continued sequence of levels starting at grid point `start`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Branch {
    pub start: usize,
    pub levels: Vec<usize>,
}

impl Branch {
    pub fn end(&self) -> usize {
        self.start + self.levels.len()
    }

    pub fn level_at(&self, p: usize) -> Option<usize> {
        (p >= self.start && p < self.end()).then(|| self.levels[p - self.start])
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SpectrumScan {
    pub parameter: ScanParameter,
    pub grid: Vec<f64>,
    /// Separation for field scans, field for separation scans.
    pub fixed: f64,
    /// `energies[p][l]`, ascending in l, units ħω.
    pub energies: Vec<Vec<f64>>,
    pub characters: Vec<Vec<StateCharacter>>,
    /// Level with the largest overlap with the separated-trap reference.
    pub trap_index: Vec<usize>,
    pub trap_overlap: Vec<f64>,
    pub branches: Vec<Branch>,
    pub params: SystemParams,
    pub m_total: i32,
    pub j_max: u32,
    pub n_max: usize,
    /// b · min(j₁(j₁+1)+j₂(j₂+1)).
    pub rotational_offset: f64,
}

impl SpectrumScan {
    pub fn levels(&self) -> usize {
        self.energies.first().map_or(0, |e| e.len())
    }

    pub fn trap_energies(&self) -> Vec<f64> {
        self.energies
            .iter()
            .zip(&self.trap_index)
            .map(|(e, &i)| e[i])
            .collect()
    }

    /// (grid index, energy) along a branch.
    pub fn branch_energies(&self, branch: &Branch) -> Vec<(usize, f64)> {
        branch
            .levels
            .iter()
            .enumerate()
            .map(|(i, &l)| (branch.start + i, self.energies[branch.start + i][l]))
            .collect()
    }
}

/// Internal vector of the lowest rotational branch that the dipolar term
/// lowers most: the lowest eigenvector of prefactor·G on that branch.
pub fn trap_reference_internal(asm: &Assembler) -> Vec<f64> {
    let lowest = asm.basis.internal.lowest_branch();
    let n = lowest.len();
    let pref = asm.params.dipolar_prefactor();
    let g = Mat::from_fn(n, n, |r, c| pref * asm.ops.g_pair[(lowest[r], lowest[c])]);
    let evd = g
        .self_adjoint_eigen(Side::Lower)
        .expect("small symmetric eigenproblem");
    let u = evd.U();
    let mut chi = vec![0.0; asm.basis.n_int()];
    let sign = if u
        .col(0)
        .iter()
        .fold(0.0, |m: f64, x| if x.abs() > m.abs() { *x } else { m })
        < 0.0
    {
        -1.0
    } else {
        1.0
    };
    for (r, &i) in lowest.iter().enumerate() {
        chi[i] = sign * u[(r, 0)];
    }
    chi
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("grid", "empty"));
    }
    if grid.iter().any(|x| !x.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid(
            "grid",
            "must be finite and strictly increasing",
        ));
    }
    Ok(())
}

fn run_scan(
    asm: &Assembler,
    parameter: ScanParameter,
    grid: &[f64],
    fixed: f64,
    opts: &ScanOptions,
) -> Result<SpectrumScan> {
    check_grid(grid)?;
    let k = opts.levels;
    if k == 0 || k > asm.dim() {
        return Err(Error::invalid(
            "levels",
            format!("must be in 1..={}", asm.dim()),
        ));
    }
    let chi = opts
        .reference
        .clone()
        .unwrap_or_else(|| trap_reference_internal(asm));
    if chi.len() != asm.basis.n_int() {
        return Err(Error::invalid(
            "reference",
            "length differs from the internal basis",
        ));
    }
    let mut scan = SpectrumScan {
        parameter,
        grid: grid.to_vec(),
        fixed,
        energies: Vec::with_capacity(grid.len()),
        characters: Vec::with_capacity(grid.len()),
        trap_index: Vec::with_capacity(grid.len()),
        trap_overlap: Vec::with_capacity(grid.len()),
        branches: Vec::new(),
        params: asm.params.clone(),
        m_total: asm.basis.internal.m_total,
        j_max: asm.basis.internal.j_max,
        n_max: asm.basis.n_max(),
        rotational_offset: asm.params.b
            * asm
                .basis
                .internal
                .states
                .iter()
                .map(|s| s.rotational_energy())
                .min()
                .unwrap_or(0) as f64,
    };
    let mut prev: Option<Mat<f64>> = None;
    let mut open: Vec<Option<usize>> = Vec::new();
    let mut classifier = None;
    for (p, &x) in grid.iter().enumerate() {
        let (a, beta) = match parameter {
            ScanParameter::Separation => (x, fixed),
            ScanParameter::Field => (fixed, x),
        };
        let eig = diagonalize(&asm.hamiltonian(a, beta))?;
        let vecs = eig.vectors.subcols(0, k).to_owned();
        let reference = asm.basis.separated_ground_state(a, &chi);
        let overlaps: Vec<f64> = (0..k)
            .map(|l| {
                vecs.col(l)
                    .iter()
                    .zip(&reference)
                    .map(|(u, v)| u * v)
                    .sum::<f64>()
                    .powi(2)
            })
            .collect();
        let (ti, tov) =
            overlaps.iter().enumerate().fold(
                (0, -1.0),
                |best, (l, &o)| if o > best.1 { (l, o) } else { best },
            );
        if parameter == ScanParameter::Separation || classifier.is_none() {
            classifier = Some(Classifier::new(
                &asm.basis,
                a,
                asm.params.r_b_over_aho,
                opts.thresholds,
            ));
        }
        let cls = classifier.as_ref().unwrap();
        let characters = (0..k)
            .map(|l| cls.classify(&vecs.col(l).iter().copied().collect::<Vec<_>>()))
            .collect();

        let mut next_open = vec![None; k];
        match &prev {
            None => {
                for (l, slot) in next_open.iter_mut().enumerate() {
                    scan.branches.push(Branch {
                        start: 0,
                        levels: vec![l],
                    });
                    *slot = Some(scan.branches.len() - 1);
                }
            }
            Some(pv) => {
                let o = pv.transpose() * &vecs;
                let mut pairs: Vec<(f64, usize, usize)> = Vec::with_capacity(k * k);
                for i in 0..k {
                    for j in 0..k {
                        let s = o[(i, j)] * o[(i, j)];
                        if s >= opts.min_overlap {
                            pairs.push((s, i, j));
                        }
                    }
                }
                pairs.sort_by(|x, y| y.0.total_cmp(&x.0).then(x.1.cmp(&y.1)).then(x.2.cmp(&y.2)));
                let mut used_prev = vec![false; k];
                for (_, i, j) in pairs {
                    if used_prev[i] || next_open[j].is_some() {
                        continue;
                    }
                    if let Some(b) = open[i] {
                        used_prev[i] = true;
                        scan.branches[b].levels.push(j);
                        next_open[j] = Some(b);
                    }
                }
                for (j, slot) in next_open.iter_mut().enumerate() {
                    if slot.is_none() {
                        scan.branches.push(Branch {
                            start: p,
                            levels: vec![j],
                        });
                        *slot = Some(scan.branches.len() - 1);
                    }
                }
            }
        }
        open = next_open;
        prev = Some(vecs);
        scan.energies.push(eig.energies[..k].to_vec());
        scan.characters.push(characters);
        scan.trap_index.push(ti);
        scan.trap_overlap.push(tov);
    }
    Ok(scan)
}

/// Lowest `opts.levels` energies against separation at field `params.beta`.
pub fn scan_separation(
    params: &SystemParams,
    m_total: i32,
    j_max: u32,
    n_max: usize,
    a_grid: &[f64],
    opts: &ScanOptions,
) -> Result<SpectrumScan> {
    let asm = Assembler::new(params, m_total, j_max, n_max, opts.model.clone())?;
    run_scan(&asm, ScanParameter::Separation, a_grid, params.beta, opts)
}

/// Lowest `opts.levels` energies against field at separation `params.a_over_aho`.
pub fn scan_field(
    params: &SystemParams,
    m_total: i32,
    j_max: u32,
    n_max: usize,
    beta_grid: &[f64],
    opts: &ScanOptions,
) -> Result<SpectrumScan> {
    let asm = Assembler::new(params, m_total, j_max, n_max, opts.model.clone())?;
    run_scan(
        &asm,
        ScanParameter::Field,
        beta_grid,
        params.a_over_aho,
        opts,
    )
}

impl Assembler {
    pub fn scan(
        &self,
        parameter: ScanParameter,
        grid: &[f64],
        opts: &ScanOptions,
    ) -> Result<SpectrumScan> {
        let fixed = match parameter {
            ScanParameter::Separation => self.params.beta,
            ScanParameter::Field => self.params.a_over_aho,
        };
        run_scan(self, parameter, grid, fixed, opts)
    }
}

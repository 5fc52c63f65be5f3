use faer::Mat;
use std::path::PathBuf;

use super::basis::BasisSet;
use crate::error::{Error, Result};
use crate::params::SystemParams;
use crate::rotor::{
    build_internal_operators, enumerate_internal, InternalOperators, InternalPairBasis,
};
use crate::spatial::{
    cached_spatial_coupling, hermite_functions, spatial_coupling, trap_element, QuadratureOptions,
    SpatialBasis, SpatialCoupling,
};

#[derive(Clone, Debug, PartialEq)]
pub struct ModelOptions {
    pub dimension_cap: usize,
    /// Optional contact term g δ(z), units ħω·a_ho.  Off by default.
    pub contact_strength: f64,
    pub quadrature: QuadratureOptions,
    pub cache_dir: Option<PathBuf>,
}

impl Default for ModelOptions {
    fn default() -> Self {
        ModelOptions {
            dimension_cap: 20_000,
            contact_strength: 0.0,
            quadrature: QuadratureOptions::default(),
            cache_dir: None,
        }
    }
}

/// H(t) = h0 + β(t) w.
#[derive(Clone, Debug)]
pub struct HamiltonianPair {
    pub h0: Mat<f64>,
    pub w: Mat<f64>,
}

/// Holds the a-independent pieces so scans only redo the trap part.
#[derive(Clone, Debug)]
pub struct Assembler {
    pub params: SystemParams,
    pub basis: BasisSet,
    pub ops: InternalOperators,
    pub coupling: SpatialCoupling,
    pub options: ModelOptions,
    g_entries: Vec<(usize, usize, f64)>,
    w_entries: Vec<(usize, usize, f64)>,
}

fn nonzeros(m: &Mat<f64>) -> Vec<(usize, usize, f64)> {
    let mut out = Vec::new();
    for r in 0..m.nrows() {
        for c in 0..m.ncols() {
            if m[(r, c)] != 0.0 {
                out.push((r, c, m[(r, c)]));
            }
        }
    }
    out
}

impl Assembler {
    pub fn new(
        params: &SystemParams,
        m_total: i32,
        j_max: u32,
        n_max: usize,
        options: ModelOptions,
    ) -> Result<Self> {
        Self::with_internal(params, enumerate_internal(j_max, m_total)?, n_max, options)
    }

    pub fn with_internal(
        params: &SystemParams,
        internal: InternalPairBasis,
        n_max: usize,
        options: ModelOptions,
    ) -> Result<Self> {
        params.validate()?;
        let basis = BasisSet::new(internal, SpatialBasis::new(n_max));
        if basis.dim() > options.dimension_cap {
            return Err(Error::DimensionCap {
                dim: basis.dim(),
                cap: options.dimension_cap,
            });
        }
        let ops = build_internal_operators(&basis.internal)?;
        let coupling = match &options.cache_dir {
            Some(dir) => cached_spatial_coupling(
                dir,
                basis.spatial,
                params.lperp_over_aho,
                &options.quadrature,
            )?,
            None => spatial_coupling(basis.spatial, params.lperp_over_aho, &options.quadrature)?,
        };
        let g_entries = nonzeros(&ops.g_pair);
        let w_entries = nonzeros(&ops.w_field);
        Ok(Assembler {
            params: params.clone(),
            basis,
            ops,
            coupling,
            options,
            g_entries,
            w_entries,
        })
    }

    pub fn dim(&self) -> usize {
        self.basis.dim()
    }

    /// Field-free Hamiltonian at separation `a`, units ħω.
    pub fn h0(&self, a: f64) -> Mat<f64> {
        let ni = self.basis.n_int();
        let d = self.basis.spatial.dim();
        let mut h = Mat::<f64>::zeros(self.dim(), self.dim());
        let b = self.params.b;
        let pref = self.params.dipolar_prefactor();
        let psi0 = hermite_functions(self.basis.n_max(), 0.0);
        let g = self.options.contact_strength;
        for n in 0..d {
            for np in 0..d {
                let t = trap_element(n, np, a);
                let contact = g * psi0[n] * psi0[np];
                if t != 0.0 || contact != 0.0 {
                    for i in 0..ni {
                        h[(n * ni + i, np * ni + i)] += t + contact;
                    }
                }
                let s = pref * self.coupling.matrix[(n, np)];
                if s != 0.0 {
                    for &(i, k, v) in &self.g_entries {
                        h[(n * ni + i, np * ni + k)] += s * v;
                    }
                }
            }
            for i in 0..ni {
                h[(n * ni + i, n * ni + i)] += b * self.ops.jsq[(i, i)];
            }
        }
        // summation order differs between mirrored entries
        for c in 0..h.ncols() {
            for r in c + 1..h.nrows() {
                h[(c, r)] = h[(r, c)];
            }
        }
        h
    }

    /// Coefficient of β: b (1 ⊗ w_field).
    pub fn w(&self) -> Mat<f64> {
        let ni = self.basis.n_int();
        let mut w = Mat::<f64>::zeros(self.dim(), self.dim());
        for n in 0..self.basis.spatial.dim() {
            for &(i, k, v) in &self.w_entries {
                w[(n * ni + i, n * ni + k)] = self.params.b * v;
            }
        }
        w
    }

    pub fn hamiltonian(&self, a: f64, beta: f64) -> Mat<f64> {
        let mut h = self.h0(a);
        if beta != 0.0 {
            let ni = self.basis.n_int();
            for n in 0..self.basis.spatial.dim() {
                for &(i, k, v) in &self.w_entries {
                    h[(n * ni + i, n * ni + k)] += beta * self.params.b * v;
                }
            }
        }
        h
    }

    pub fn pair(&self) -> HamiltonianPair {
        HamiltonianPair {
            h0: self.h0(self.params.a_over_aho),
            w: self.w(),
        }
    }
}

pub fn build(
    params: &SystemParams,
    m_total: i32,
    j_max: u32,
    n_max: usize,
) -> Result<(BasisSet, HamiltonianPair)> {
    let asm = Assembler::new(params, m_total, j_max, n_max, ModelOptions::default())?;
    let pair = asm.pair();
    Ok((asm.basis, pair))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::assembly::eigen::{diagonalize, eigenvalues};
    use crate::params::nacs_default;

    #[test]
    fn m2_jmax1_is_single_channel() {
        let p = nacs_default();
        let (basis, hp) = build(&p, 2, 1, 8).unwrap();
        assert_eq!(basis.n_int(), 1);
        for r in 0..9 {
            for c in 0..9 {
                let want = trap_element(r, c, p.a_over_aho) + if r == c { 4.0 * p.b } else { 0.0 };
                assert_eq!(hp.h0[(r, c)], want);
            }
        }
        assert_eq!(hp.w[(0, 0)], 0.0);
    }

    #[test]
    fn free_limit() {
        let mut p = nacs_default();
        p.dip_strength = 0.0;
        let (_, hp) = build(&p.with_separation(0.0), 0, 1, 30).unwrap();
        let e = eigenvalues(&hp.h0).unwrap();
        assert!((e[0] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn hermitian_and_attractive() {
        let p = nacs_default();
        let (_, hp) = build(&p, 1, 2, 60).unwrap();
        let n = hp.h0.nrows();
        for r in 0..n {
            for c in 0..r {
                assert!((hp.h0[(r, c)] - hp.h0[(c, r)]).abs() < 1e-12);
                assert_eq!(hp.w[(r, c)], hp.w[(c, r)]);
            }
        }
        let (_, hp) = build(&p, 0, 1, 60).unwrap();
        let eig = diagonalize(&hp.h0).unwrap();
        assert!(eig.energies[0] < 0.5);
        assert!(eig.max_residual(&hp.h0) < 1e-9);
    }

    #[test]
    fn dimension_cap() {
        let opts = ModelOptions {
            dimension_cap: 100,
            ..Default::default()
        };
        let e = Assembler::new(&nacs_default(), 0, 2, 60, opts).unwrap_err();
        assert!(matches!(
            e,
            Error::DimensionCap {
                dim: 1159,
                cap: 100
            }
        ));
    }
}

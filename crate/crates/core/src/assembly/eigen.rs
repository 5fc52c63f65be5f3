use faer::{Mat, Side};

use crate::error::{Error, Result};

/// Full spectrum, ascending, eigenvectors as columns.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub energies: Vec<f64>,
    pub vectors: Mat<f64>,
}

impl EigenSystem {
    pub fn dim(&self) -> usize {
        self.energies.len()
    }

    pub fn vector(&self, k: usize) -> Vec<f64> {
        self.vectors.col(k).iter().copied().collect()
    }

    pub fn overlap(&self, k: usize, v: &[f64]) -> f64 {
        self.vectors.col(k).iter().zip(v).map(|(a, b)| a * b).sum()
    }

    /// max_k ‖H v_k − λ_k v_k‖₂ / ‖H‖₂.
    pub fn max_residual(&self, h: &Mat<f64>) -> f64 {
        let hv = h * &self.vectors;
        let norm = self
            .energies
            .iter()
            .fold(0.0f64, |m, e| m.max(e.abs()))
            .max(f64::MIN_POSITIVE);
        let mut worst = 0.0f64;
        for k in 0..self.dim() {
            let r: f64 = (0..self.dim())
                .map(|i| {
                    let d = hv[(i, k)] - self.energies[k] * self.vectors[(i, k)];
                    d * d
                })
                .sum();
            worst = worst.max(r.sqrt());
        }
        worst / norm
    }

    /// max |VᵀV − 1|.
    pub fn orthonormality_defect(&self) -> f64 {
        let g = self.vectors.transpose() * &self.vectors;
        let mut worst = 0.0f64;
        for r in 0..self.dim() {
            for c in 0..self.dim() {
                let target = if r == c { 1.0 } else { 0.0 };
                worst = worst.max((g[(r, c)] - target).abs());
            }
        }
        worst
    }
}

fn check_input(h: &Mat<f64>) -> Result<()> {
    let n = h.nrows();
    if n != h.ncols() {
        return Err(Error::Eigensolver {
            dim: n,
            reason: format!("not square ({}x{})", n, h.ncols()),
        });
    }
    let mut scale = 0.0f64;
    for c in 0..n {
        for r in 0..n {
            let x = h[(r, c)];
            if !x.is_finite() {
                return Err(Error::Eigensolver {
                    dim: n,
                    reason: format!("non-finite entry at ({r}, {c})"),
                });
            }
            scale = scale.max(x.abs());
        }
    }
    for c in 0..n {
        for r in c + 1..n {
            if (h[(r, c)] - h[(c, r)]).abs() > 1e-12 * scale.max(1.0) {
                return Err(Error::Eigensolver {
                    dim: n,
                    reason: format!("not symmetric at ({r}, {c}): {:e}", h[(r, c)] - h[(c, r)]),
                });
            }
        }
    }
    Ok(())
}

/// Dense symmetric eigendecomposition.  Each eigenvector's largest
/// component is made positive so results are reproducible.
pub fn diagonalize(h: &Mat<f64>) -> Result<EigenSystem> {
    check_input(h)?;
    let n = h.nrows();
    let evd = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Eigensolver {
            dim: n,
            reason: format!("{e:?}"),
        })?;
    let energies: Vec<f64> = evd.S().column_vector().iter().copied().collect();
    let mut vectors = evd.U().to_owned();
    for k in 0..n {
        let mut big = 0.0f64;
        let mut sign = 1.0;
        for x in vectors.col(k).iter() {
            if x.abs() > big + 1e-12 {
                big = x.abs();
                sign = x.signum();
            }
        }
        if sign < 0.0 {
            for x in vectors.col_mut(k).iter_mut() {
                *x = -*x;
            }
        }
    }
    Ok(EigenSystem { energies, vectors })
}

pub fn eigenvalues(h: &Mat<f64>) -> Result<Vec<f64>> {
    check_input(h)?;
    h.self_adjoint_eigenvalues(Side::Lower)
        .map_err(|e| Error::Eigensolver {
            dim: h.nrows(),
            reason: format!("{e:?}"),
        })
}

use serde::{Deserialize, Serialize};

use super::basis::BasisSet;
use crate::params::SystemParams;
use crate::spatial::hermite_functions;
use crate::special::gauss_legendre;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StateCharacter {
    Trap,
    Bound,
    Mixed,
}

impl StateCharacter {
    pub fn as_str(&self) -> &'static str {
        match self {
            StateCharacter::Trap => "trap",
            StateCharacter::Bound => "bound",
            StateCharacter::Mixed => "mixed",
        }
    }
}

impl std::fmt::Display for StateCharacter {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyThresholds {
    /// Bound region |z| < min(factor·r_B, a/2).
    pub bound_radius_factor: f64,
    /// Trap region |z − a| < half width (a_ho).
    pub trap_half_width: f64,
    pub weight: f64,
}

impl Default for ClassifyThresholds {
    fn default() -> Self {
        ClassifyThresholds {
            bound_radius_factor: 3.0,
            trap_half_width: 3.0,
            weight: 0.5,
        }
    }
}

/// Position-space weights of basis vectors in the bound and trap regions,
/// by Gauss–Legendre quadrature of the spatial marginal.
#[derive(Clone, Debug)]
pub struct Classifier {
    n_int: usize,
    thresholds: ClassifyThresholds,
    bound_nodes: Vec<(f64, Vec<f64>)>,
    trap_nodes: Vec<(f64, Vec<f64>)>,
}

fn nodes(n_max: usize, lo: f64, hi: f64) -> Vec<(f64, Vec<f64>)> {
    let (x, w) = gauss_legendre(16);
    let panels = ((hi - lo) / 0.25).ceil().max(1.0) as usize;
    let h = (hi - lo) / panels as f64;
    let mut out = Vec::with_capacity(panels * 16);
    for p in 0..panels {
        let mid = lo + (p as f64 + 0.5) * h;
        for (x, w) in x.iter().zip(&w) {
            let z = mid + 0.5 * h * x;
            out.push((0.5 * h * w, hermite_functions(n_max, z)));
        }
    }
    out
}

impl Classifier {
    pub fn new(basis: &BasisSet, a: f64, r_b: f64, thresholds: ClassifyThresholds) -> Self {
        let radius = (thresholds.bound_radius_factor * r_b).min(0.5 * a);
        let n_max = basis.n_max();
        let hw = thresholds.trap_half_width;
        Classifier {
            n_int: basis.n_int(),
            thresholds,
            bound_nodes: nodes(n_max, -radius, radius),
            trap_nodes: nodes(n_max, a - hw, a + hw),
        }
    }

    fn weight(&self, table: &[(f64, Vec<f64>)], v: &[f64]) -> f64 {
        let ni = self.n_int;
        let mut phi = vec![0.0; ni];
        let mut total = 0.0;
        for (w, psi) in table {
            phi.iter_mut().for_each(|x| *x = 0.0);
            for (n, p) in psi.iter().enumerate() {
                if *p == 0.0 {
                    continue;
                }
                for (f, x) in phi.iter_mut().zip(&v[n * ni..(n + 1) * ni]) {
                    *f += p * x;
                }
            }
            total += w * phi.iter().map(|x| x * x).sum::<f64>();
        }
        total
    }

    /// (bound-region weight, trap-region weight).
    pub fn weights(&self, v: &[f64]) -> (f64, f64) {
        (
            self.weight(&self.bound_nodes, v),
            self.weight(&self.trap_nodes, v),
        )
    }

    pub fn classify(&self, v: &[f64]) -> StateCharacter {
        let (bound, trap) = self.weights(v);
        if bound > self.thresholds.weight {
            StateCharacter::Bound
        } else if trap > self.thresholds.weight {
            StateCharacter::Trap
        } else {
            StateCharacter::Mixed
        }
    }
}

pub fn classify_state(v: &[f64], basis: &BasisSet, params: &SystemParams) -> StateCharacter {
    Classifier::new(
        basis,
        params.a_over_aho,
        params.r_b_over_aho,
        ClassifyThresholds::default(),
    )
    .classify(v)
}

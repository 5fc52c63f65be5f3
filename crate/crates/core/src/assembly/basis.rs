use crate::rotor::InternalPairBasis;
use crate::spatial::SpatialBasis;

/// Flat index = n_z · |internal| + internal index.
#[derive(Clone, Debug, PartialEq)]
pub struct BasisSet {
    pub internal: InternalPairBasis,
    pub spatial: SpatialBasis,
}

impl BasisSet {
    pub fn new(internal: InternalPairBasis, spatial: SpatialBasis) -> Self {
        BasisSet { internal, spatial }
    }

    pub fn n_int(&self) -> usize {
        self.internal.len()
    }

    pub fn n_max(&self) -> usize {
        self.spatial.n_max
    }

    pub fn dim(&self) -> usize {
        self.spatial.dim() * self.n_int()
    }

    pub fn index(&self, n: usize, internal: usize) -> usize {
        n * self.n_int() + internal
    }

    pub fn split(&self, flat: usize) -> (usize, usize) {
        (flat / self.n_int(), flat % self.n_int())
    }

    /// Σ_n |v_{n,i}|² for every internal state i.
    pub fn internal_weights(&self, v: &[f64]) -> Vec<f64> {
        let ni = self.n_int();
        let mut w = vec![0.0; ni];
        for (k, x) in v.iter().enumerate() {
            w[k % ni] += x * x;
        }
        w
    }

    /// Weight per rotational branch j₁(j₁+1)+j₂(j₂+1), keyed like
    /// `internal.branch_energies()`.
    pub fn branch_weights(&self, v: &[f64]) -> Vec<f64> {
        let branches = self.internal.branch_energies();
        let mut out = vec![0.0; branches.len()];
        for (i, w) in self.internal_weights(v).into_iter().enumerate() {
            let e = self.internal.states[i].rotational_energy();
            let b = branches.binary_search(&e).unwrap();
            out[b] += w;
        }
        out
    }

    /// Both molecules in the ground state of their own trap (relative
    /// coordinate displaced to z = a), internal part `chi`.
    pub fn separated_ground_state(&self, a: f64, chi: &[f64]) -> Vec<f64> {
        let c = coherent_amplitudes(self.n_max(), a);
        let ni = self.n_int();
        let mut v = vec![0.0; self.dim()];
        for (n, cn) in c.iter().enumerate() {
            for (i, x) in chi.iter().enumerate() {
                v[n * ni + i] = cn * x;
            }
        }
        v
    }
}

/// Oscillator ground state centred at z = a in the z = 0 basis.
pub fn coherent_amplitudes(n_max: usize, a: f64) -> Vec<f64> {
    let alpha = a / std::f64::consts::SQRT_2;
    let mut c = vec![0.0; n_max + 1];
    c[0] = (-0.5 * alpha * alpha).exp();
    for n in 1..=n_max {
        c[n] = c[n - 1] * alpha / (n as f64).sqrt();
    }
    c
}

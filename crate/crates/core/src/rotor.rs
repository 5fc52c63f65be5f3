//! Rigid-rotor angular momentum algebra for the molecule pair.

use faer::Mat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct RotorState {
    pub j: u32,
    pub m: i32,
}

impl RotorState {
    pub fn new(j: u32, m: i32) -> Result<Self> {
        if m.unsigned_abs() > j {
            return Err(Error::invalid(
                "RotorState.m",
                format!("|m| = {} > j = {j}", m.abs()),
            ));
        }
        Ok(RotorState { j, m })
    }

    /// j(j+1), units of B.
    pub fn energy(&self) -> f64 {
        (self.j * (self.j + 1)) as f64
    }
}

/// |j₁ m₁⟩ ⊗ |j₂ m₂⟩.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct PairState {
    pub j1: u32,
    pub m1: i32,
    pub j2: u32,
    pub m2: i32,
}

impl PairState {
    pub fn new(j1: u32, m1: i32, j2: u32, m2: i32) -> Self {
        PairState { j1, m1, j2, m2 }
    }

    pub fn first(&self) -> RotorState {
        RotorState {
            j: self.j1,
            m: self.m1,
        }
    }

    pub fn second(&self) -> RotorState {
        RotorState {
            j: self.j2,
            m: self.m2,
        }
    }

    /// j₁(j₁+1) + j₂(j₂+1).
    pub fn rotational_energy(&self) -> u32 {
        self.j1 * (self.j1 + 1) + self.j2 * (self.j2 + 1)
    }
}

impl std::fmt::Display for PairState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "({},{},{},{})", self.j1, self.m1, self.j2, self.m2)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InternalPairBasis {
    pub j_max: u32,
    pub m_total: i32,
    pub states: Vec<PairState>,
}

impl InternalPairBasis {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn position(&self, s: &PairState) -> Option<usize> {
        self.states.iter().position(|x| x == s)
    }

    /// Indices of the states with the lowest j₁(j₁+1)+j₂(j₂+1).
    pub fn lowest_branch(&self) -> Vec<usize> {
        let e0 = self
            .states
            .iter()
            .map(|s| s.rotational_energy())
            .min()
            .unwrap_or(0);
        (0..self.len())
            .filter(|&i| self.states[i].rotational_energy() == e0)
            .collect()
    }

    /// Distinct rotational energies, ascending.
    pub fn branch_energies(&self) -> Vec<u32> {
        let mut e: Vec<u32> = self.states.iter().map(|s| s.rotational_energy()).collect();
        e.sort_unstable();
        e.dedup();
        e
    }
}

/// Dense real matrices in the internal pair basis.
#[derive(Clone, Debug)]
pub struct InternalOperators {
    /// j₁(j₁+1)+j₂(j₂+1), units of B.
    pub jsq: Mat<f64>,
    /// −(d₀⁽¹⁾ + d₀⁽²⁾)/d.
    pub w_field: Mat<f64>,
    /// (d₀d₀ + ½d₊d₋ + ½d₋d₊)/d².
    pub g_pair: Mat<f64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Raise,
    Lower,
}

fn factorial(n: i64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn frac(n: i64) -> BigRational {
    BigRational::from_integer(factorial(n))
}

/// ⟨j₁m₁; j₂m₂|JM⟩ in the Condon–Shortley convention, from the Racah sum in
/// exact rational arithmetic.  Returns 0 when a selection rule fails.
pub fn clebsch_gordan(j1: i32, m1: i32, j2: i32, m2: i32, j: i32, m: i32) -> Result<f64> {
    if j1 < 0 || j2 < 0 || j < 0 {
        return Err(Error::invalid(
            "angular momentum",
            format!("negative j in ({j1},{m1};{j2},{m2}|{j},{m})"),
        ));
    }
    if m1 + m2 != m || m1.abs() > j1 || m2.abs() > j2 || m.abs() > j {
        return Ok(0.0);
    }
    if j < (j1 - j2).abs() || j > j1 + j2 {
        return Ok(0.0);
    }
    let (j1, m1, j2, m2, j, m) = (
        j1 as i64, m1 as i64, j2 as i64, m2 as i64, j as i64, m as i64,
    );

    let mut pref = BigRational::from_integer(BigInt::from(2 * j + 1));
    for n in [
        j + j1 - j2,
        j - j1 + j2,
        j1 + j2 - j,
        j + m,
        j - m,
        j1 - m1,
        j1 + m1,
        j2 - m2,
        j2 + m2,
    ] {
        pref *= frac(n);
    }
    pref /= frac(j1 + j2 + j + 1);

    let kmin = 0.max(j2 - j - m1).max(j1 + m2 - j);
    let kmax = (j1 + j2 - j).min(j1 - m1).min(j2 + m2);
    let mut sum = BigRational::zero();
    for k in kmin..=kmax {
        let den = factorial(k)
            * factorial(j1 + j2 - j - k)
            * factorial(j1 - m1 - k)
            * factorial(j2 + m2 - k)
            * factorial(j - j2 + m1 + k)
            * factorial(j - j1 - m2 + k);
        let term = BigRational::new(BigInt::one(), den);
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    if sum.is_zero() {
        return Ok(0.0);
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let square = pref * &sum * &sum;
    let value = square
        .to_f64()
        .ok_or_else(|| Error::Numerical("CG magnitude out of range".into()))?;
    Ok(sign * value.sqrt())
}

/// ⟨j±1, m+q|d_q|j, m⟩/d.
pub fn dipole_element(j: u32, m: i32, q: i32, direction: Direction) -> f64 {
    if m.unsigned_abs() > j || !(-1..=1).contains(&q) {
        return 0.0;
    }
    let jp = match direction {
        Direction::Raise => j as i32 + 1,
        Direction::Lower => j as i32 - 1,
    };
    if jp < 0 || (m + q).abs() > jp {
        return 0.0;
    }
    let ji = j as i32;
    let a = clebsch_gordan(ji, m, 1, q, jp, m + q).unwrap_or(0.0);
    let b = clebsch_gordan(ji, 0, 1, 0, jp, 0).unwrap_or(0.0);
    a * b * ((2 * ji + 1) as f64 / (2 * jp + 1) as f64).sqrt()
}

/// ⟨bra|d_q|ket⟩/d for arbitrary single-rotor states.
pub fn dipole_matrix_element(bra: RotorState, q: i32, ket: RotorState) -> f64 {
    if bra.m != ket.m + q {
        return 0.0;
    }
    if bra.j == ket.j + 1 {
        dipole_element(ket.j, ket.m, q, Direction::Raise)
    } else if bra.j + 1 == ket.j {
        dipole_element(ket.j, ket.m, q, Direction::Lower)
    } else {
        0.0
    }
}

/// All (j₁,m₁,j₂,m₂) with m₁+m₂ = M and j₁,j₂ ≤ j_max, in lexicographic order.
pub fn enumerate_internal(j_max: u32, m_total: i32) -> Result<InternalPairBasis> {
    let mut states = Vec::new();
    for j1 in 0..=j_max {
        for m1 in -(j1 as i32)..=(j1 as i32) {
            for j2 in 0..=j_max {
                let m2 = m_total - m1;
                if m2.unsigned_abs() <= j2 {
                    states.push(PairState::new(j1, m1, j2, m2));
                }
            }
        }
    }
    if states.is_empty() {
        return Err(Error::EmptyBasis { j_max, m_total });
    }
    Ok(InternalPairBasis {
        j_max,
        m_total,
        states,
    })
}

/// Union of several M blocks, concatenated in the order given.
pub fn merged_internal(j_max: u32, m_values: &[i32]) -> Result<InternalPairBasis> {
    let mut states = Vec::new();
    for &m in m_values {
        states.extend(enumerate_internal(j_max, m)?.states);
    }
    Ok(InternalPairBasis {
        j_max,
        m_total: m_values.first().copied().unwrap_or(0),
        states,
    })
}

pub fn build_internal_operators(basis: &InternalPairBasis) -> Result<InternalOperators> {
    let n = basis.len();
    if n == 0 {
        return Err(Error::EmptyBasis {
            j_max: basis.j_max,
            m_total: basis.m_total,
        });
    }
    let s = &basis.states;
    let jsq = Mat::from_fn(n, n, |r, c| {
        if r == c {
            s[r].rotational_energy() as f64
        } else {
            0.0
        }
    });
    let w_field = Mat::from_fn(n, n, |r, c| {
        let (a, b) = (s[r.max(c)], s[r.min(c)]);
        let mut v = 0.0;
        if a.second() == b.second() {
            v += dipole_matrix_element(a.first(), 0, b.first());
        }
        if a.first() == b.first() {
            v += dipole_matrix_element(a.second(), 0, b.second());
        }
        -v
    });
    let g_pair = Mat::from_fn(n, n, |r, c| {
        let (a, b) = (s[r.max(c)], s[r.min(c)]);
        let d = |q1: i32, q2: i32| {
            dipole_matrix_element(a.first(), q1, b.first())
                * dipole_matrix_element(a.second(), q2, b.second())
        };
        d(0, 0) + 0.5 * d(1, -1) + 0.5 * d(-1, 1)
    });
    Ok(InternalOperators {
        jsq,
        w_field,
        g_pair,
    })
}

/// Single rotor in a static field, units of B: j(j+1) − β d₀/d, fixed m.
pub fn single_rotor_hamiltonian(j_max: u32, m: i32, beta: f64) -> Mat<f64> {
    let js: Vec<u32> = (m.unsigned_abs()..=j_max).collect();
    let n = js.len();
    Mat::from_fn(n, n, |r, c| {
        let (a, b) = (RotorState { j: js[r], m }, RotorState { j: js[c], m });
        let diag = if r == c { a.energy() } else { 0.0 };
        diag - beta * dipole_matrix_element(a, 0, b)
    })
}

use std::collections::BTreeSet;

use crate::assembly::{BasisSet, EigenSystem};
use crate::rotor::build_internal_operators;

/// Eigenstates kept in a propagation, grouped by rotational branch.
#[derive(Clone, Debug, PartialEq)]
pub struct FieldWindow {
    /// Eigen-indices, contiguous per branch.
    pub indices: Vec<usize>,
    /// Branch label j₁(j₁+1)+j₂(j₂+1) of each entry.
    pub branches: Vec<u32>,
}

/// Rotational branch carrying the largest weight of `v`.
pub fn dominant_branch(basis: &BasisSet, v: &[f64]) -> u32 {
    let energies = basis.internal.branch_energies();
    let w = basis.branch_weights(v);
    let best = w
        .iter()
        .enumerate()
        .fold(0, |b, (i, x)| if *x > w[b] { i } else { b });
    energies[best]
}

/// States within `half_width` (ħω) of a centre state, after removing the
/// branch offset b·Δ(j₁(j₁+1)+j₂(j₂+1)), on the centre's branch and the
/// branches reachable from it by `depth` applications of the field operator.
pub fn field_window(
    eig: &EigenSystem,
    basis: &BasisSet,
    b: f64,
    centers: &[usize],
    half_width: f64,
    depth: usize,
) -> FieldWindow {
    let ops = build_internal_operators(&basis.internal).expect("non-empty internal basis");
    let states = &basis.internal.states;
    let mut links: Vec<(u32, u32)> = Vec::new();
    for r in 0..states.len() {
        for c in 0..states.len() {
            if ops.w_field[(r, c)] != 0.0 {
                links.push((states[r].rotational_energy(), states[c].rotational_energy()));
            }
        }
    }
    let branch: Vec<u32> = (0..eig.dim())
        .map(|k| {
            dominant_branch(
                basis,
                eig.vectors.col(k).try_as_col_major().unwrap().as_slice(),
            )
        })
        .collect();
    let mut allowed: BTreeSet<u32> = centers.iter().map(|&c| branch[c]).collect();
    for _ in 0..depth {
        let next: Vec<u32> = links
            .iter()
            .filter(|(x, _)| allowed.contains(x))
            .map(|&(_, y)| y)
            .collect();
        allowed.extend(next);
    }
    let mut picked: Vec<(u32, usize)> = (0..eig.dim())
        .filter(|&k| allowed.contains(&branch[k]))
        .filter(|&k| {
            centers.iter().any(|&c| {
                let shift = b * (branch[k] as f64 - branch[c] as f64);
                (eig.energies[k] - eig.energies[c] - shift).abs() <= half_width
            }) || centers.contains(&k)
        })
        .map(|k| (branch[k], k))
        .collect();
    picked.sort_unstable();
    FieldWindow {
        indices: picked.iter().map(|p| p.1).collect(),
        branches: picked.iter().map(|p| p.0).collect(),
    }
}

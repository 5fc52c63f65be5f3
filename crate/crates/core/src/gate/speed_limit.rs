use faer::Mat;
use std::f64::consts::PI;

use super::system::{GateSystem, QubitLabel};

/// Relative floor on effective couplings; symmetry-forbidden entries sit
/// near 1e-15 of the diagonal, physical ones above 1e-9.
pub const DEFAULT_SPEED_LIMIT_THRESHOLD: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct SpeedLimit {
    pub seconds: f64,
    /// Smallest relevant gap, ħω.
    pub gap: f64,
    pub label: Option<QubitLabel>,
    /// Eigen-indices of the qubit state and its nearest coupled neighbour.
    pub qubit: usize,
    pub neighbour: usize,
}

/// 2π/(Δω) for the smallest gap Δ (ħω) between state `qubit` and any state
/// whose coupling to it exceeds `threshold` in magnitude.
pub fn speed_limit_from_spectrum(
    energies: &[f64],
    coupling: &Mat<f64>,
    qubit: usize,
    threshold: f64,
    omega: f64,
) -> Option<SpeedLimit> {
    (0..energies.len())
        .filter(|&k| k != qubit && coupling[(qubit, k)].abs() > threshold)
        .map(|k| (k, (energies[k] - energies[qubit]).abs()))
        .filter(|(_, g)| *g > 0.0)
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(k, gap)| SpeedLimit {
            seconds: 2.0 * PI / (gap * omega),
            gap,
            label: None,
            qubit,
            neighbour: k,
        })
}

/// Second-order coupling among states of one branch through the others:
/// K_qk = ½ Σ_l W_ql W_lk [1/(E_q − E_l) + 1/(E_k − E_l)], l outside the branch.
/// Returns (members, K) with `members` positions into `energies`.
pub fn effective_coupling(
    energies: &[f64],
    coupling: &Mat<f64>,
    groups: &[u32],
    branch: u32,
) -> (Vec<usize>, Mat<f64>) {
    let inside: Vec<usize> = (0..energies.len())
        .filter(|&i| groups[i] == branch)
        .collect();
    let outside: Vec<usize> = (0..energies.len())
        .filter(|&i| groups[i] != branch)
        .collect();
    let k = Mat::from_fn(inside.len(), inside.len(), |r, c| {
        let (q, p) = (inside[r], inside[c]);
        outside
            .iter()
            .map(|&l| {
                let w = coupling[(q, l)] * coupling[(l, p)];
                0.5 * w * (1.0 / (energies[q] - energies[l]) + 1.0 / (energies[p] - energies[l]))
            })
            .sum::<f64>()
    });
    (inside, k)
}

/// 2π/(Δω) for the smallest gap Δ between any qubit state and a state it is
/// coupled to by the effective (second-order) field coupling within its
/// branch. Couplings below `relative_threshold`·|K_qq| are ignored.
pub fn speed_limit_estimate(system: &GateSystem, relative_threshold: f64) -> SpeedLimit {
    let mut best = SpeedLimit {
        seconds: f64::INFINITY,
        gap: 0.0,
        label: None,
        qubit: 0,
        neighbour: 0,
    };
    for q in &system.qubits.states {
        let block = system.block(q.m_total);
        let prop = &block.propagator;
        let Some(pos) = prop.active().iter().position(|&k| k == q.index) else {
            continue;
        };
        let branch = block.window.branches[pos];
        let (inside, kmat) = effective_coupling(
            prop.energies(),
            prop.coupling(),
            &block.window.branches,
            branch,
        );
        let local = inside
            .iter()
            .position(|&i| i == pos)
            .expect("qubit in own branch");
        let energies: Vec<f64> = inside.iter().map(|&i| prop.energies()[i]).collect();
        let threshold = relative_threshold * kmat[(local, local)].abs();
        if let Some(s) =
            speed_limit_from_spectrum(&energies, &kmat, local, threshold, system.params.omega)
        {
            if best.label.is_none() || s.gap < best.gap {
                best = SpeedLimit {
                    label: Some(q.label),
                    qubit: q.index,
                    neighbour: prop.active()[inside[s.neighbour]],
                    ..s
                };
            }
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spectrum() -> (Vec<f64>, Mat<f64>) {
        let e = vec![0.0, 0.4, 1.0, 2.5];
        let mut c = Mat::zeros(4, 4);
        for (i, j, v) in [(0, 1, 1e-14), (0, 2, 0.3), (0, 3, 0.2)] {
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
        (e, c)
    }

    #[test]
    fn smallest_coupled_gap() {
        let (e, c) = spectrum();
        let omega = 2.0 * PI * 50e3;
        let s = speed_limit_from_spectrum(&e, &c, 0, 1e-9, omega).unwrap();
        assert_eq!(s.neighbour, 2);
        assert_eq!(s.seconds, 2.0 * PI / (1.0 * omega));
        assert!((s.seconds - 20e-6).abs() < 1e-12);
        let fast = speed_limit_from_spectrum(&e, &c, 0, 1e-9, 2.0 * omega).unwrap();
        assert!((fast.seconds / s.seconds - 0.5).abs() < 1e-15);
        assert_eq!(
            speed_limit_from_spectrum(&e, &c, 0, 0.0, omega)
                .unwrap()
                .neighbour,
            1
        );
        assert!(speed_limit_from_spectrum(&e, &c, 0, 1.0, omega).is_none());
    }

    #[test]
    fn effective_coupling_two_paths() {
        // states 0, 1 in branch 0; state 2 in branch 1 couples to both
        let e = vec![0.0, 1.0, 10.0];
        let mut c = Mat::zeros(3, 3);
        for (i, j, v) in [(0, 2, 2.0), (1, 2, 3.0)] {
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
        let (inside, k) = effective_coupling(&e, &c, &[0, 0, 1], 0);
        assert_eq!(inside, vec![0, 1]);
        assert!((k[(0, 0)] - 4.0 / -10.0).abs() < 1e-15);
        assert!((k[(1, 1)] - 9.0 / -9.0).abs() < 1e-15);
        assert!((k[(0, 1)] - 0.5 * 6.0 * (1.0 / -10.0 + 1.0 / -9.0)).abs() < 1e-15);
        assert_eq!(k[(0, 1)], k[(1, 0)]);
    }
}

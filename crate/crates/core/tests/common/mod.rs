#![allow(dead_code)]

use faer::Mat;
use num_complex::Complex64 as C64;
use tweezer::assembly::{diagonalize, Assembler, EigenSystem, ModelOptions};
use tweezer::dynamics::{
    trap_initial_state, InitialState, PairLabel, PropagationSettings, Propagator, PulseSpec,
};
use tweezer::params::nacs_default;

pub struct Small {
    pub asm: Assembler,
    pub eig: EigenSystem,
    pub h0: Mat<f64>,
    pub w: Mat<f64>,
    pub initial: usize,
}

/// NaCs, M = 1, |+⟩ trap state, small basis.
pub fn small(j_max: u32, n_max: usize) -> Small {
    let p = nacs_default();
    let asm = Assembler::new(&p, 1, j_max, n_max, ModelOptions::default()).unwrap();
    let h0 = asm.h0(p.a_over_aho);
    let eig = diagonalize(&h0).unwrap();
    let chi = PairLabel::Plus.internal_vector(&asm.basis).unwrap();
    let (initial, _) = trap_initial_state(&eig, &asm.basis, p.a_over_aho, &chi);
    let w = asm.w();
    Small {
        asm,
        eig,
        h0,
        w,
        initial,
    }
}

pub fn full_propagator(s: &Small) -> Propagator {
    let all: Vec<usize> = (0..s.eig.dim()).collect();
    Propagator::new(
        &s.eig,
        &s.w,
        s.asm.params.omega,
        &all,
        None,
        PropagationSettings::default(),
    )
    .unwrap()
}

fn matvec(h: &Mat<f64>, beta: f64, w: &Mat<f64>, shift: f64, x: &[C64], y: &mut [C64]) {
    let n = x.len();
    for r in 0..n {
        let mut acc = C64::new(0.0, 0.0);
        for c in 0..n {
            let v = h[(r, c)] + beta * w[(r, c)] - if r == c { shift } else { 0.0 };
            acc += x[c] * v;
        }
        y[r] = C64::new(acc.im, -acc.re);
    }
}

/// Schrödinger-picture RK4 in the raw product basis, returned as
/// interaction-picture amplitudes in the H0 eigenbasis.
pub fn direct_amplitudes(s: &Small, pulse: &PulseSpec, steps_per_unit_phase: f64) -> Vec<C64> {
    let omega = s.asm.params.omega;
    let n = s.eig.dim();
    let (lo, hi) = (s.eig.energies[0], s.eig.energies[n - 1]);
    let shift = 0.5 * (lo + hi);
    let tau_end = pulse.tau * omega;
    let steps = (tau_end * (0.5 * (hi - lo) + 1.0) * steps_per_unit_phase).ceil() as usize;
    let h = tau_end / steps as f64;
    let mut psi: Vec<C64> = (0..n)
        .map(|r| C64::new(s.eig.vectors[(r, s.initial)], 0.0))
        .collect();
    let (mut k1, mut k2, mut k3, mut k4, mut tmp) = (
        vec![C64::default(); n],
        vec![C64::default(); n],
        vec![C64::default(); n],
        vec![C64::default(); n],
        vec![C64::default(); n],
    );
    let beta = |tau: f64| pulse.value(tau / omega);
    for i in 0..steps {
        let t = i as f64 * h;
        matvec(&s.h0, beta(t), &s.w, shift, &psi, &mut k1);
        for j in 0..n {
            tmp[j] = psi[j] + k1[j] * (0.5 * h);
        }
        matvec(&s.h0, beta(t + 0.5 * h), &s.w, shift, &tmp, &mut k2);
        for j in 0..n {
            tmp[j] = psi[j] + k2[j] * (0.5 * h);
        }
        matvec(&s.h0, beta(t + 0.5 * h), &s.w, shift, &tmp, &mut k3);
        for j in 0..n {
            tmp[j] = psi[j] + k3[j] * h;
        }
        matvec(&s.h0, beta(t + h), &s.w, shift, &tmp, &mut k4);
        for j in 0..n {
            psi[j] += (k1[j] + k2[j] * 2.0 + k3[j] * 2.0 + k4[j]) * (h / 6.0);
        }
    }
    to_interaction(s, &psi, shift, tau_end)
}

fn to_interaction(s: &Small, psi: &[C64], shift: f64, tau: f64) -> Vec<C64> {
    (0..s.eig.dim())
        .map(|k| {
            let proj: C64 = (0..psi.len()).map(|r| psi[r] * s.eig.vectors[(r, k)]).sum();
            proj * C64::from_polar(1.0, (s.eig.energies[k] - shift) * tau)
        })
        .collect()
}

/// Constant field: exact exponential of H0 + βW.
pub fn quench_amplitudes(s: &Small, beta: f64, t: f64) -> Vec<C64> {
    let n = s.eig.dim();
    let h = Mat::from_fn(n, n, |r, c| s.h0[(r, c)] + beta * s.w[(r, c)]);
    let field = diagonalize(&h).unwrap();
    let shift = 0.5 * (s.eig.energies[0] + s.eig.energies[n - 1]);
    let tau = t * s.asm.params.omega;
    let coef: Vec<C64> = (0..n)
        .map(|k| {
            let o: f64 = (0..n)
                .map(|r| field.vectors[(r, k)] * s.eig.vectors[(r, s.initial)])
                .sum();
            C64::from_polar(o, -(field.energies[k] - shift) * tau)
        })
        .collect();
    let psi: Vec<C64> = (0..n)
        .map(|r| (0..n).map(|k| coef[k] * field.vectors[(r, k)]).sum())
        .collect();
    to_interaction(s, &psi, shift, tau)
}

pub fn propagated(s: &Small, pulse: &PulseSpec) -> Vec<C64> {
    let r = full_propagator(s)
        .run(pulse, &InitialState::Eigenstate(s.initial), &[pulse.tau])
        .unwrap();
    r.final_amplitudes().to_vec()
}

pub fn max_diff(a: &[C64], b: &[C64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

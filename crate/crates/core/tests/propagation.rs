mod common;

use common::*;
use num_complex::Complex64 as C64;
use proptest::prelude::*;
use tweezer::dynamics::{PropagationSettings, Propagator, PulseSpec};

#[test]
fn quench_matches_exact_exponential() {
    let s = small(1, 5);
    let pulse = PulseSpec::quench(0.16, 200e-9);
    let exact = quench_amplitudes(&s, 0.16, 200e-9);
    let got = propagated(&s, &pulse);
    assert!(max_diff(&exact, &got) < 1e-6, "{}", max_diff(&exact, &got));
    let norm: f64 = got.iter().map(|c| c.norm_sqr()).sum();
    assert!((norm - 1.0).abs() < 1e-8);
}

#[test]
fn sine_pulse_matches_direct_integration() {
    let s = small(1, 5);
    let pulse = PulseSpec::sine(0.16, 200e-9);
    let direct = direct_amplitudes(&s, &pulse, 200.0);
    let got = propagated(&s, &pulse);
    assert!(
        max_diff(&direct, &got) < 1e-6,
        "{}",
        max_diff(&direct, &got)
    );
}

fn windowed(s: &Small, pulse: &PulseSpec, half_width: f64, depth: usize) -> C64 {
    let window = tweezer::dynamics::field_window(
        &s.eig,
        &s.asm.basis,
        s.asm.params.b,
        &[s.initial],
        half_width,
        depth,
    );
    let prop = Propagator::new(
        &s.eig,
        &s.w,
        s.asm.params.omega,
        &window.indices,
        Some(&window.branches),
        PropagationSettings::default(),
    )
    .unwrap();
    let r = prop
        .run(
            pulse,
            &tweezer::dynamics::InitialState::Eigenstate(s.initial),
            &[pulse.tau],
        )
        .unwrap();
    r.final_amplitudes()[r.position(s.initial).unwrap()]
}

#[test]
fn windowed_propagation_agrees_with_full() {
    let s = small(2, 5);
    let pulse = PulseSpec::sine(0.12, 150e-9);
    let full = propagated(&s, &pulse)[s.initial];
    let everything = windowed(&s, &pulse, 1e7, 3);
    assert!((everything - full).norm() < 1e-6, "{everything} {full}");
    let reachable = windowed(&s, &pulse, 1e7, 1);
    assert!((reachable - full).norm() < 5e-3, "{reachable} {full}");
}

#[test]
fn backward_evolution_restores_the_state() {
    let s = small(1, 5);
    let prop = full_propagator(&s);
    let pulse = PulseSpec::sine(0.16, 200e-9);
    let beta = |t: f64| pulse.value(t);
    let mut state = prop
        .initial_vector(&tweezer::dynamics::InitialState::Eigenstate(s.initial))
        .unwrap();
    let start = state.clone();
    prop.evolve(&beta, &mut state, 1, 0.0, pulse.tau).unwrap();
    assert!(max_diff(&state, &start) > 1e-3);
    prop.evolve(&beta, &mut state, 1, pulse.tau, 0.0).unwrap();
    assert!(max_diff(&state, &start) < 1e-8);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn norm_is_conserved(beta0 in -0.3f64..0.3, tau_ns in 20.0f64..200.0, phase in 0.0f64..std::f64::consts::TAU) {
        let s = small(1, 3);
        let prop = full_propagator(&s);
        let n = s.eig.dim();
        let mut init = vec![C64::new(0.0, 0.0); n];
        init[s.initial] = C64::from_polar(0.6, phase);
        init[(s.initial + 1) % n] = C64::new(0.8, 0.0);
        let pulse = PulseSpec::sine(beta0, tau_ns * 1e-9);
        let r = prop.run(&pulse, &tweezer::dynamics::InitialState::Amplitudes(init), &[0.5 * pulse.tau, pulse.tau]).unwrap();
        prop_assert!(r.norm_defect() < 1e-8);
    }
}

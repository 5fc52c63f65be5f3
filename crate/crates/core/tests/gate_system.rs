use std::f64::consts::PI;

use tweezer::dynamics::PulseSpec;
use tweezer::gate::{
    crab_start, optimize, speed_limit_estimate, GateOptions, GateSystem, GateTarget, Objective,
    OptimizerSettings, QubitLabel, DEFAULT_SPEED_LIMIT_THRESHOLD,
};
use tweezer::params::nacs_default;

// a = 5 keeps the displaced trap states inside a small oscillator basis
fn system() -> GateSystem {
    let p = nacs_default().with_separation(5.0);
    GateSystem::new(
        &p,
        &GateOptions {
            n_max: 30,
            ..Default::default()
        },
    )
    .unwrap()
}

#[test]
fn qubits_live_in_their_blocks() {
    let s = system();
    let blocks: Vec<i32> = s.qubits.states.iter().map(|q| q.m_total).collect();
    assert_eq!(blocks, [0, 1, 1, 2]);
    for q in &s.qubits.states {
        assert!(q.overlap > 0.5, "{} {}", q.label, q.overlap);
        assert!(q.members.contains(&q.index));
    }
    let plus = s.qubits.get(QubitLabel::Plus).index;
    let minus = s.qubits.get(QubitLabel::Minus).index;
    assert_ne!(plus, minus);
}

#[test]
fn zero_pulse_is_identity_and_optimizer_respects_zero_budget() {
    let s = system();
    let e = s
        .evaluate(&PulseSpec::sine(0.0, 150e-9), &GateTarget::default())
        .unwrap();
    // |(-1 - 1 - 1 + 1)/4|²
    assert!(
        (e.internal - 0.25).abs() < 1e-12 && (e.full - 0.25).abs() < 1e-12,
        "{} {}",
        e.internal,
        e.full
    );
    let identity = s
        .evaluate(
            &PulseSpec::sine(0.0, 150e-9),
            &GateTarget { phases: [0.0; 4] },
        )
        .unwrap();
    assert!((identity.full - 1.0).abs() < 1e-12);

    let start = crab_start(0.12, 150e-9, 2, 7);
    let settings = OptimizerSettings {
        max_iters: 0,
        ..Default::default()
    };
    let r = optimize(
        &s,
        &start,
        &GateTarget::default(),
        Objective::Internal,
        &settings,
    )
    .unwrap();
    assert_eq!(r.pulse, start);
    assert_eq!(r.internal_fidelity, r.initial_internal);
    assert_eq!(r.trace.len(), 1);

    let global = GateTarget {
        phases: [PI + 0.3, PI + 0.3, PI + 0.3, 0.3],
    };
    let shifted = s.evaluate(&start, &global).unwrap();
    assert!((shifted.full - r.full_fidelity).abs() < 1e-12);
}

#[test]
fn speed_limit_is_on_the_trap_scale() {
    let s = system();
    let limit = speed_limit_estimate(&s, DEFAULT_SPEED_LIMIT_THRESHOLD);
    assert!(limit.seconds.is_finite());
    // gaps between trap states are of order ħω
    let period = 2.0 * PI / s.params.omega;
    assert!(
        limit.seconds > 0.2 * period && limit.seconds < 5.0 * period,
        "{}",
        limit.seconds
    );
}

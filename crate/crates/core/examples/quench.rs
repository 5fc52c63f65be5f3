//! Sudden field quench from the |+> trap state.
//!
//! `cargo run --release --example quench -- <beta> <tau_ns>`

use tweezer::assembly::{diagonalize, Assembler, ModelOptions};
use tweezer::dynamics::{
    field_window, sample_times, trap_initial_state, InitialState, PairLabel, PropagationSettings,
    Propagator, PulseSpec,
};
use tweezer::params::nacs_default;

fn main() -> tweezer::Result<()> {
    let mut args = std::env::args().skip(1);
    let beta: f64 = args.next().map_or(0.16, |s| s.parse().expect("beta"));
    let tau = args
        .next()
        .map_or(200.0, |s| s.parse::<f64>().expect("tau in ns"))
        * 1e-9;

    let p = nacs_default();
    let asm = Assembler::new(&p, 1, 2, 120, ModelOptions::default())?;
    let eig = diagonalize(&asm.h0(p.a_over_aho))?;
    let chi = PairLabel::Plus.internal_vector(&asm.basis)?;
    let (initial, overlap) = trap_initial_state(&eig, &asm.basis, p.a_over_aho, &chi);
    let window = field_window(&eig, &asm.basis, p.b, &[initial], 8.0, 1);
    let prop = Propagator::new(
        &eig,
        &asm.w(),
        p.omega,
        &window.indices,
        Some(&window.branches),
        PropagationSettings::default(),
    )?;
    println!(
        "initial state {initial} (overlap {overlap:.4}), {} states propagated",
        window.indices.len()
    );

    let times = sample_times(tau, 11);
    let r = prop.run(
        &PulseSpec::quench(beta, tau),
        &InitialState::Eigenstate(initial),
        &times,
    )?;
    for (t, pop) in times.iter().zip(r.population(initial)) {
        println!("t = {:6.1} ns  P(initial) = {pop:.6}", t * 1e9);
    }
    println!("norm defect {:.2e}, {} steps", r.norm_defect(), r.steps);
    Ok(())
}

//! A few gradient steps on the CRAB coefficients of a 150 ns pulse.

use tweezer::gate::{
    crab_start, optimize, GateOptions, GateSystem, GateTarget, Objective, OptimizerSettings,
};
use tweezer::params::nacs_default;

fn main() -> tweezer::Result<()> {
    let iters: usize = std::env::args()
        .nth(1)
        .map_or(3, |s| s.parse().expect("iterations"));
    let system = GateSystem::new(&nacs_default(), &GateOptions::default())?;
    let start = crab_start(0.12, 150e-9, 3, 1);
    let settings = OptimizerSettings {
        max_iters: iters,
        ..Default::default()
    };
    let result = optimize(
        &system,
        &start,
        &GateTarget::default(),
        Objective::Internal,
        &settings,
    )?;
    for e in &result.trace {
        println!(
            "iter {:>3}  best {:.6}  step {:.2e}  evaluations {}",
            e.iteration, e.best, e.step, e.evaluations
        );
    }
    println!(
        "internal {:.4} -> {:.4}, full {:.4} -> {:.4}, stop {:?}",
        result.initial_internal,
        result.internal_fidelity,
        result.initial_full,
        result.full_fidelity,
        result.stop
    );
    println!("beta0 = {:.5}", result.pulse.beta0);
    for f in &result.pulse.fourier {
        println!(
            "  A = {:+.5}  B = {:+.5}  xi = {:.4e} rad/s",
            f.a, f.b, f.xi
        );
    }
    Ok(())
}

//! Gate time bound from the smallest coupled gap of the qubit states.

use faer::Mat;
use tweezer::gate::{
    speed_limit_estimate, speed_limit_from_spectrum, GateOptions, GateSystem,
    DEFAULT_SPEED_LIMIT_THRESHOLD,
};
use tweezer::params::nacs_default;

fn main() -> tweezer::Result<()> {
    // three levels, only the 0-2 pair coupled
    let energies = [0.0, 0.3, 1.0];
    let w = Mat::from_fn(3, 3, |r, c| if r + c == 2 && r != c { 0.1 } else { 0.0 });
    let omega = 2.0 * std::f64::consts::PI * 50e3;
    let s = speed_limit_from_spectrum(&energies, &w, 0, 1e-9, omega).unwrap();
    println!(
        "synthetic: gap {:.2} hbar_omega -> {:.2} us",
        s.gap,
        s.seconds * 1e6
    );

    let system = GateSystem::new(&nacs_default(), &GateOptions::default())?;
    let limit = speed_limit_estimate(&system, DEFAULT_SPEED_LIMIT_THRESHOLD);
    println!(
        "NaCs: gap {:.4} hbar_omega from |{}> -> {:.2} us",
        limit.gap,
        limit.label.map_or("?", |l| l.as_str()),
        limit.seconds * 1e6
    );
    Ok(())
}

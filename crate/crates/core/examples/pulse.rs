//! A sine pulse on the four qubit states: phases, populations, fidelities.

use tweezer::dynamics::PulseSpec;
use tweezer::gate::{fidelities, GateOptions, GateSystem, GateTarget};
use tweezer::params::nacs_default;

fn main() -> tweezer::Result<()> {
    let beta0: f64 = std::env::args()
        .nth(1)
        .map_or(0.12, |s| s.parse().expect("beta0"));
    let system = GateSystem::new(&nacs_default(), &GateOptions::default())?;
    let pulse = PulseSpec::sine(beta0, 150e-9);
    let results = system.propagate(&pulse, &[pulse.tau])?;
    for (q, r) in system.qubits.states.iter().zip(&results) {
        let c = r.final_amplitudes()[r.position(q.index).unwrap()];
        println!(
            "|{}>  M = {}  phase {:+.4} rad  population {:.6}",
            q.label,
            q.m_total,
            c.arg(),
            c.norm_sqr()
        );
    }
    let (internal, full) = fidelities(&results, &system.qubits, &GateTarget::default())?;
    println!("internal fidelity {internal:.4}, full fidelity {full:.4}");
    Ok(())
}

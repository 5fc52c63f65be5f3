//! Dimensionless parameters for every molecule preset.

use std::f64::consts::PI;

use tweezer::constants::BOHR_RADIUS;
use tweezer::params::{derive_params, preset, preset_names, TrapSpec};

fn main() -> tweezer::Result<()> {
    let trap = TrapSpec {
        omega: 2.0 * PI * 50e3,
        eta: 10.0,
        separation: 10.4,
        theta: 0.0,
    };
    println!(
        "{:<6} {:>10} {:>10} {:>10} {:>8} {:>8}",
        "", "a_ho [a0]", "b", "D", "l_perp", "r_B"
    );
    for name in preset_names() {
        let p = derive_params(&preset(name)?, &trap, 0.0)?;
        println!(
            "{name:<6} {:>10.1} {:>10.1} {:>10.3} {:>8.4} {:>8.4}",
            p.aho_meters / BOHR_RADIUS,
            p.b,
            p.dip_strength,
            p.lperp_over_aho,
            p.r_b_over_aho
        );
    }

    // a tighter trap shrinks a_ho as ω^(-1/2)
    let nacs = preset("NaCs")?;
    for khz in [25.0, 50.0, 100.0] {
        let p = derive_params(
            &nacs,
            &TrapSpec {
                omega: 2.0 * PI * khz * 1e3,
                ..trap
            },
            0.0,
        )?;
        println!(
            "NaCs at {khz:>5} kHz: a_ho = {:.1} a0, time unit {:.3} us",
            p.aho_meters / BOHR_RADIUS,
            p.time_unit() * 1e6
        );
    }
    Ok(())
}

//! Spectrum against trap separation with trap-state anticrossings.
//!
//! `cargo run --release --example separation_scan -- <M> <n_max>`

use tweezer::assembly::{trap_anticrossings, Assembler, ModelOptions, ScanOptions, ScanParameter};
use tweezer::params::nacs_default;

fn main() -> tweezer::Result<()> {
    let mut args = std::env::args().skip(1);
    let m: i32 = args.next().map_or(1, |s| s.parse().expect("M"));
    let n_max: usize = args.next().map_or(60, |s| s.parse().expect("n_max"));

    let p = nacs_default();
    let asm = Assembler::new(&p, m, 2, n_max, ModelOptions::default())?;
    let grid: Vec<f64> = (0..=50).map(|i| 4.0 + 0.2 * i as f64).collect();
    let scan = asm.scan(
        ScanParameter::Separation,
        &grid,
        &ScanOptions {
            levels: 30,
            ..Default::default()
        },
    )?;

    println!("M = {m}, n_max = {n_max}, dim = {}", asm.dim());
    for (x, e) in grid.iter().zip(scan.trap_energies()).step_by(5) {
        println!(
            "a = {x:5.2}  trap state E = {:+.5} hbar_omega",
            e - scan.rotational_offset
        );
    }
    let found = trap_anticrossings(&scan, 1.0)?;
    println!("{} anticrossings of the trap state:", found.len());
    for ac in found {
        let kind = if ac.resolved {
            ""
        } else {
            " (unresolved, gap is an upper bound)"
        };
        println!(
            "  a = {:.3}, gap {:.4} between levels {} and {}{kind}",
            ac.parameter, ac.gap, ac.lower, ac.upper
        );
    }
    Ok(())
}

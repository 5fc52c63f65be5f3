//! Trap-state energy against field strength for the three M blocks.

use tweezer::assembly::{Assembler, ModelOptions, ScanOptions, ScanParameter};
use tweezer::params::nacs_default;

fn main() -> tweezer::Result<()> {
    let n_max: usize = std::env::args()
        .nth(1)
        .map_or(60, |s| s.parse().expect("n_max"));
    let p = nacs_default();
    let grid: Vec<f64> = (0..=8).map(|i| 0.02 * i as f64).collect();
    let mut columns = Vec::new();
    for m in 0..=2 {
        let asm = Assembler::new(&p, m, 2, n_max, ModelOptions::default())?;
        let scan = asm.scan(
            ScanParameter::Field,
            &grid,
            &ScanOptions {
                levels: 20,
                ..Default::default()
            },
        )?;
        columns.push(
            scan.trap_energies()
                .iter()
                .map(|e| e - scan.rotational_offset)
                .collect::<Vec<_>>(),
        );
    }
    println!(
        "{:>6} {:>12} {:>12} {:>12}",
        "beta", "M = 0", "M = 1", "M = 2"
    );
    for (i, b) in grid.iter().enumerate() {
        println!(
            "{b:>6.2} {:>12.4} {:>12.4} {:>12.4}",
            columns[0][i], columns[1][i], columns[2][i]
        );
    }
    Ok(())
}

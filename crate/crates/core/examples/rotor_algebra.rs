//! Clebsch-Gordan coefficients, dipole elements and pair bases.

use tweezer::assembly::eigenvalues;
use tweezer::rotor::{
    build_internal_operators, clebsch_gordan, dipole_matrix_element, enumerate_internal,
    single_rotor_hamiltonian, RotorState,
};

fn main() -> tweezer::Result<()> {
    println!("<1 0; 1 0 | J 0>:");
    for j in 0..=2 {
        println!("  J = {j}: {:+.12}", clebsch_gordan(1, 0, 1, 0, j, 0)?);
    }

    let d10 = dipole_matrix_element(RotorState::new(1, 0)?, 0, RotorState::new(0, 0)?);
    let d21 = dipole_matrix_element(RotorState::new(2, 0)?, 0, RotorState::new(1, 0)?);
    println!(
        "<1,0|d0|0,0> = {d10:.12} (1/sqrt3 = {:.12})",
        1.0 / 3f64.sqrt()
    );
    println!(
        "<2,0|d0|1,0> = {d21:.12} (2/sqrt15 = {:.12})",
        2.0 / 15f64.sqrt()
    );

    for m_total in 0..=2 {
        let basis = enumerate_internal(2, m_total)?;
        let ops = build_internal_operators(&basis)?;
        println!(
            "j_max = 2, M = {m_total}: {} pair states, lowest branch {:?}, G is {}x{}",
            basis.len(),
            basis.lowest_branch(),
            ops.g_pair.nrows(),
            ops.g_pair.ncols()
        );
    }

    // single rotor Stark shift against the perturbative −β²/6
    println!("{:>6} {:>14} {:>14}", "beta", "E0 [B]", "-beta^2/6");
    for beta in [0.01, 0.05, 0.1, 0.5, 1.0] {
        let e = eigenvalues(&single_rotor_hamiltonian(6, 0, beta))?[0];
        println!("{beta:>6} {e:>14.8} {:>14.8}", -beta * beta / 6.0);
    }
    Ok(())
}

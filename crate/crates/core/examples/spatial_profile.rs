//! The quasi-1D dipolar profile and its oscillator matrix.

use tweezer::spatial::{
    cached_spatial_coupling, spatial_coupling, v_profile, QuadratureOptions, SpatialBasis,
};

fn main() -> tweezer::Result<()> {
    println!("{:>6} {:>16} {:>16}", "u", "f(u)", "4/u^3");
    for u in [0.0, 0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 50.0] {
        let tail = if u > 0.0 { 4.0 / (u * u * u) } else { f64::NAN };
        println!("{u:>6} {:>16.9e} {tail:>16.9e}", v_profile(u));
    }

    let lperp = 10f64.powf(-0.5);
    let opts = QuadratureOptions::default();
    let s = spatial_coupling(SpatialBasis::new(8), lperp, &opts)?;
    println!(
        "\n<n|f|n'> for n, n' <= 4, l_perp = {lperp:.4} (estimated error {:.1e}):",
        s.achieved_error
    );
    for r in 0..5 {
        let row: Vec<String> = (0..5)
            .map(|c| format!("{:+.6}", s.matrix[(r, c)]))
            .collect();
        println!("  {}", row.join(" "));
    }

    let dir = std::env::temp_dir().join("tweezer-spatial-example");
    let cached = cached_spatial_coupling(&dir, SpatialBasis::new(8), lperp, &opts)?;
    println!(
        "\ncached under {} (identical: {})",
        dir.display(),
        cached.matrix == s.matrix
    );
    Ok(())
}

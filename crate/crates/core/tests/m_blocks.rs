use tweezer::assembly::{eigenvalues, Assembler, ModelOptions};
use tweezer::params::nacs_default;
use tweezer::rotor::merged_internal;

fn block_union(a: f64, beta: f64, j_max: u32, n_max: usize) -> (Vec<f64>, Vec<f64>) {
    let p = nacs_default();
    let mut per_block = Vec::new();
    for m in [0, 1, 2] {
        let asm = Assembler::new(&p, m, j_max, n_max, ModelOptions::default()).unwrap();
        per_block.extend(eigenvalues(&asm.hamiltonian(a, beta)).unwrap());
    }
    per_block.sort_by(f64::total_cmp);
    let merged = Assembler::with_internal(
        &p,
        merged_internal(j_max, &[0, 1, 2]).unwrap(),
        n_max,
        ModelOptions::default(),
    )
    .unwrap();
    let mut all = eigenvalues(&merged.hamiltonian(a, beta)).unwrap();
    all.sort_by(f64::total_cmp);
    (per_block, all)
}

#[test]
fn merged_and_per_block_spectra_agree() {
    for (a, beta) in [(10.4, 0.0), (7.0, 0.16)] {
        let (blocks, merged) = block_union(a, beta, 2, 15);
        assert_eq!(blocks.len(), merged.len());
        let scale = merged.iter().fold(0.0f64, |m, e| m.max(e.abs()));
        for (x, y) in blocks.iter().zip(&merged) {
            assert!((x - y).abs() <= 1e-10 * scale.max(1.0), "{x} {y}");
        }
    }
}

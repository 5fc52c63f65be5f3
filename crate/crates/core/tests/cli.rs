use std::path::Path;
use std::process::{Command, Output};

fn tweezer(args: &[&str], env: &[(&str, &Path)]) -> Output {
    let mut c = Command::new(env!("CARGO_BIN_EXE_tweezer"));
    c.args(args)
        .env_remove("TWEEZER_OUTPUT_DIR")
        .env_remove("TWEEZER_CACHE_DIR");
    for (k, v) in env {
        c.env(k, v);
    }
    c.output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.display().to_string()
}

const SMALL: &str =
    "[numerics]\nn_max = 20\nsamples = 11\nlevels = 10\n[scan]\na_points = 6\nbeta_points = 3\n";

#[test]
fn missing_config_is_io_error_without_outputs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("out");
    let o = tweezer(
        &[
            "quench",
            "--config",
            "/nonexistent/run.toml",
            "--output-dir",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn validation_failures_exit_1() {
    let tmp = tempfile::tempdir().unwrap();
    let bad_eta = write(tmp.path(), "eta.toml", "[trap]\neta = 0.5\n");
    let o = tweezer(&["validate", "--config", &bad_eta], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("TrapSpec.eta"));

    let typo = write(tmp.path(), "typo.toml", "[numerics]\nnmax = 10\n");
    assert_eq!(
        tweezer(&["validate", "--config", &typo], &[]).status.code(),
        Some(1)
    );

    let o = tweezer(&["validate", "--n-max", "5000"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("dimension_cap"));

    assert_eq!(
        tweezer(&["quench", "--tau", "5 min"], &[]).status.code(),
        Some(1)
    );
    assert_eq!(tweezer(&["no-such-command"], &[]).status.code(), Some(1));
}

#[test]
fn validate_reports_without_computing() {
    let shipped = Path::new(env!("CARGO_MANIFEST_DIR")).join("configs/nacs.toml");
    let o = tweezer(
        &[
            "validate",
            "--config",
            shipped.to_str().unwrap(),
            "--workflow",
            "gate-optimize",
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("valid"));
    assert_eq!(text.matches(" states,").count(), 3);
}

#[test]
fn quench_tables_are_reproducible() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL);
    let run = |dir: &str| {
        let out = tmp.path().join(dir);
        let o = tweezer(
            &[
                "quench", "--config", &cfg, "--beta", "0.16", "--M", "1", "--tau", "200ns",
            ],
            &[("TWEEZER_OUTPUT_DIR", &out)],
        );
        assert_eq!(
            o.status.code(),
            Some(0),
            "{}",
            String::from_utf8_lossy(&o.stderr)
        );
        out
    };
    let (a, b) = (run("a"), run("b"));
    for f in ["quench_M1_summary.tsv", "quench_M1_states.tsv"] {
        let x = std::fs::read(a.join(f)).unwrap();
        assert_eq!(x, std::fs::read(b.join(f)).unwrap(), "{f}");
    }
    let summary = std::fs::read_to_string(a.join("quench_M1_summary.tsv")).unwrap();
    assert!(summary.starts_with("t [ns]\tinitial_population"));
    assert_eq!(summary.lines().count(), 12);
    let meta: toml::Table = std::fs::read_to_string(a.join("quench.meta.toml"))
        .unwrap()
        .parse()
        .unwrap();
    assert_eq!(meta["config"]["numerics"]["n_max"].as_integer(), Some(20));
    assert_eq!(meta["config"]["pulse"]["beta0"].as_float(), Some(0.16));
    assert!(meta["summary"]["min_initial_population"]
        .as_float()
        .is_some());
}

#[test]
fn spectrum_workflows_write_tables() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(tmp.path(), "small.toml", SMALL);
    let out = tmp.path().join("spec");
    let o = tweezer(
        &[
            "spectrum-separation",
            "--config",
            &cfg,
            "--M",
            "0",
            "--output-dir",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let levels = std::fs::read_to_string(out.join("spectrum_separation_M0.tsv")).unwrap();
    assert!(levels.starts_with("a [a_ho]\tlevel\tenergy [hbar_omega]\tcharacter\ttrap"));
    assert_eq!(levels.lines().count(), 1 + 6 * 10);
    assert!(out
        .join("spectrum_separation_M0_anticrossings.tsv")
        .exists());
    assert!(out.join("spectrum-separation.meta.toml").exists());

    let o = tweezer(
        &[
            "spectrum-field",
            "--config",
            &cfg,
            "--output-dir",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(o.status.code(), Some(0));
    let field = std::fs::read_to_string(out.join("spectrum_field_M1.tsv")).unwrap();
    assert!(field.starts_with("beta [dE/B]\tlevel"));
    assert_eq!(field.lines().count(), 1 + 3 * 10);
}

#[test]
fn numerical_failure_exit_2_with_diagnostics() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write(
        tmp.path(),
        "tight.toml",
        "[numerics]\nn_max = 20\nquadrature_tol = 1e-30\n",
    );
    let out = tmp.path().join("diag");
    let o = tweezer(
        &[
            "quench",
            "--config",
            &cfg,
            "--output-dir",
            out.to_str().unwrap(),
        ],
        &[],
    );
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
    let d = std::fs::read_to_string(out.join("diagnostics.txt")).unwrap();
    assert!(d.contains("quadrature"));
}

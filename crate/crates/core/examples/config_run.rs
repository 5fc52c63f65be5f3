//! Running a workflow from a TOML config, as the `tweezer` binary does.

use tweezer::cli::{run, RunConfig, Workflow};

const CONFIG: &str = r#"
[trap]
separation = 6.0

[numerics]
m_total = 1
n_max = 40
samples = 21

[pulse]
beta0 = 0.16
tau = "200ns"
"#;

fn main() -> tweezer::Result<()> {
    let config = RunConfig::from_toml(CONFIG, "inline.toml".as_ref())?;
    print!(
        "{}",
        tweezer::cli::validate(&config, Some(Workflow::Quench))?
    );
    let dir = std::env::temp_dir().join("tweezer-config-example");
    let out = run(Workflow::Quench, &config, &dir)?;
    println!("wrote {} files to {}", out.files().len(), dir.display());
    for (k, v) in out.summary() {
        println!("  {k} = {v}");
    }
    Ok(())
}

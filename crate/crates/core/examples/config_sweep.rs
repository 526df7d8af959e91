use irs_link::harness::{read_csv, run_sweep, write_csv};
use irs_link::SystemConfig;

const CONFIG: &str = r#"
# element-count sweep at M = 4
M = 4
P_db = 20
rho_db = 20
sigma2 = 1
trials = 200
seed = 11
sweep = [[1, 16], [4, 4], [1, 32], [4, 8]]
methods = ["statistical", "random"]
"#;

/// Parses a config, runs its sweep and round-trips the CSV.
pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SystemConfig::parse(CONFIG)?;
    let rows = run_sweep(&cfg, &cfg.sweep, &cfg.methods)?;
    let dir = std::env::temp_dir().join(format!("irs-link-example-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("sweep.csv");
    write_csv(&rows, &path)?;
    let back = read_csv(&path)?;
    print!("{}", std::fs::read_to_string(&path)?);
    std::fs::remove_dir_all(&dir)?;
    assert_eq!(back.len(), rows.len());
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

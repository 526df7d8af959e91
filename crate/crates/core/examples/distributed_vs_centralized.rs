// Four 16-element surfaces against one 64-element surface, over a handful
// of deployment seeds, with the sweep rows written as CSV.

use irs_link::harness::{emit_csv, run_sweep, Method};
use irs_link::SystemConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let mut rows = Vec::new();
    for seed in 0..5 {
        let cfg = SystemConfig { seed, trials: 300, c0: 1.0, ..Default::default() };
        rows.extend(run_sweep(&cfg, &[(1, 64), (4, 16)], &[Method::Statistical, Method::Random])?);
    }
    for (seed, chunk) in rows.chunks(4).enumerate() {
        let rate = |n: usize, m: Method| chunk.iter().find(|r| r.n == n && r.method == m).map(|r| r.rate_mc).unwrap_or(f64::NAN);
        println!(
            "deployment {seed}: centralized {:.4}  distributed {:.4}  (random: {:.4} / {:.4})",
            rate(1, Method::Statistical),
            rate(4, Method::Statistical),
            rate(1, Method::Random),
            rate(4, Method::Random)
        );
    }
    let mut csv = Vec::new();
    emit_csv(&rows[..4], &mut csv)?;
    print!("{}", String::from_utf8(csv)?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

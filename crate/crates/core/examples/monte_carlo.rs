use irs_link::analysis::{build_jq, theorem1_rate};
use irs_link::beamforming::statistical_reflection;
use irs_link::harness::sweep_positions;
use irs_link::scenario::{build_statistics, ula_geometry};
use irs_link::simulator::{monte_carlo_rate, ReflectionPolicy};
use irs_link::SystemConfig;

/// Closed-form rate against the Monte Carlo ergodic rate, with perfect and
/// imperfect CSI.
pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    for perfect_csi in [true, false] {
        let cfg = SystemConfig { perfect_csi, ..Default::default() };
        let geometry = ula_geometry(&cfg, &sweep_positions(&cfg, cfg.n)?, cfg.l)?;
        let stats = build_statistics(&cfg, &geometry)?;
        let sm = build_jq(&stats, &cfg)?;
        let v = statistical_reflection(&sm)?;
        let closed = theorem1_rate(v.as_vector(), &sm, cfg.p)?;
        let mc = monte_carlo_rate(&stats, &ReflectionPolicy::Fixed(v), &cfg, 2000, cfg.seed)?;
        println!(
            "xi = {:.3e}: closed form {closed:.4}, Monte Carlo {:.4} +/- {:.4} ({} trials)",
            cfg.xi(),
            mc.mean_rate,
            mc.std_error,
            mc.trials
        );
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

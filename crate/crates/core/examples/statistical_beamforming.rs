// Designs the reflection vector from channel statistics and compares it
// with random phases and the exhaustive phase grid on a small surface.

use irs_link::analysis::{build_jq, theorem1_rate};
use irs_link::beamforming::{random_reflection, solve_statistical_reflection, statistical_reflection};
use irs_link::harness::sweep_positions;
use irs_link::rng::stream_rng;
use irs_link::scenario::{build_statistics, ula_geometry};
use irs_link::simulator::grid_search_pencil;
use irs_link::SystemConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SystemConfig { m: 4, n: 2, l: 2, c0: 1.0, ..Default::default() };
    let geometry = ula_geometry(&cfg, &sweep_positions(&cfg, cfg.n)?, cfg.l)?;
    let stats = build_statistics(&cfg, &geometry)?;
    let sm = build_jq(&stats, &cfg)?;

    let relaxed = solve_statistical_reflection(&sm)?;
    let v = statistical_reflection(&sm)?;
    let designed = theorem1_rate(v.as_vector(), &sm, cfg.p)?;
    println!("relaxed eigenvalue {:.6}", relaxed.eigenvalue);
    println!("phase shifts (rad): {:?}", v.phase_shifts().iter().map(|p| (p * 1e3).round() / 1e3).collect::<Vec<_>>());

    let mut rng = stream_rng(cfg.seed, 1);
    let random: f64 = (0..100)
        .map(|_| theorem1_rate(random_reflection(stats.nl(), &mut rng).as_vector(), &sm, cfg.p))
        .sum::<Result<f64, _>>()?
        / 100.0;
    let grid = grid_search_pencil(&sm, cfg.p, 16)?;
    println!("statistical {designed:.5}  random (mean of 100) {random:.5}  grid optimum {:.5}", grid.rate);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

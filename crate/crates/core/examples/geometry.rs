// Large-scale quantities of a sampled deployment: distances, pathloss and
// Rician K-factors for every IRS.

use irs_link::harness::sweep_positions;
use irs_link::scenario::{build_statistics, pathloss, rician_k, ula_geometry};
use irs_link::SystemConfig;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SystemConfig::default();
    let centers = sweep_positions(&cfg, cfg.n)?;
    let geometry = ula_geometry(&cfg, &centers, cfg.l)?;
    let stats = build_statistics(&cfg, &geometry)?;

    println!("user at ({:.1}, {:.1})", geometry.user[0], geometry.user[1]);
    println!(" n     center          d1      d2     beta        alpha       K1     K2");
    for n in 0..cfg.n {
        let (d1, d2) = (geometry.d1(n), geometry.d2(n));
        let c = geometry.irs_center(n);
        println!(
            "{n:2}  ({:5.2}, {:5.2})  {d1:6.2}  {d2:6.2}  {:.3e}  {:.3e}  {:5.2}  {:5.2}",
            c[0],
            c[1],
            pathloss(d1, &cfg)?,
            pathloss(d2, &cfg)?,
            rician_k(d1)?,
            rician_k(d2)?,
        );
    }
    println!("stacked statistics: NL = {}, M = {}", stats.nl(), stats.m);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

use irs_link::channel::sample_channels;
use irs_link::estimation::sample_estimates;
use irs_link::harness::sweep_positions;
use irs_link::rng::stream_rng;
use irs_link::scenario::{build_statistics, ula_geometry};
use irs_link::SystemConfig;

/// Draws a few fading realizations with imperfect CSI and reports the
/// per-draw power of each channel component.
pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = SystemConfig { m: 4, n: 2, l: 8, corr_r: 0.5, ..Default::default() };
    let geometry = ula_geometry(&cfg, &sweep_positions(&cfg, cfg.n)?, cfg.l)?;
    let stats = build_statistics(&cfg, &geometry)?;
    let xi = cfg.xi();

    for trial in 0..4 {
        let mut rng = stream_rng(cfg.seed, trial);
        let real = sample_channels(&stats, &mut rng);
        let est = sample_estimates(&real, xi, &mut rng)?;
        let recon = (&real.z - real.g_diag_matrix() * &real.h).norm();
        println!(
            "trial {trial}: |H|^2 {:.3e}  |Z|^2 {:.3e}  |h_d|^2 {:.3}  |E_Z|^2 {:.3e}  reconstruction {:.1e}",
            real.h.norm_squared(),
            real.z.norm_squared(),
            real.h_d.norm_squared(),
            est.e_z.norm_squared(),
            recon
        );
    }
    println!("error variance xi = {xi:.4e}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

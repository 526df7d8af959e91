// Single-antenna closed forms for a two-IRS network with normalized gains.

use irs_link::analysis::{case1_rate, case2_rate, case3_rate, lemma2_rate, los_limit_diagnostic};
use irs_link::KFactor;

pub fn run_example() -> Result<(), Box<dyn std::error::Error>> {
    let (alpha, beta) = (vec![1.0, 0.5], vec![1.0, 0.8]);
    let (p, sigma2) = (100.0, 1.0);

    for l in [8, 32, 128] {
        let k = vec![KFactor::Finite(5.0); 2];
        let rician = lemma2_rate(&alpha, &beta, &k, &k, l, p, sigma2)?;
        let los = case1_rate(&alpha, &beta, l, p, sigma2)?;
        let rayleigh = case2_rate(&alpha, &beta, l, p, sigma2)?;
        let hybrid = case3_rate(&alpha, &beta, l, &[0], p, sigma2)?;
        println!(
            "L = {l:3}: K=5 {rician:6.3}  LoS {los:6.3}  Rayleigh {rayleigh:6.3}  hybrid {:6.3} (bound {:6.3})",
            hybrid.rate, hybrid.bound
        );
    }

    let d = los_limit_diagnostic(&alpha, &beta, 32, p, sigma2)?;
    println!(
        "pure-LoS form {:.4} vs K -> inf limit {:.4}: extra SNR term L*sum(ab) = {:.3}",
        d.pure_los_rate, d.limit_rate, d.extra_term
    );
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn std::error::Error>> {
    run_example()
}

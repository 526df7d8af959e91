//! Monte Carlo evaluation of the exact ergodic rate and the exhaustive
//! phase-grid oracle.
//!
//! Every trial draws a channel realization and the CSI errors jointly from
//! its own random stream, beamforms with MRT on the estimate and records
//! `log2(1 + SNR)`. Per-trial rates are collected in trial order and summed
//! sequentially, so the estimate does not depend on the rayon pool size.

use std::f64::consts::TAU;

use rayon::prelude::*;

use crate::analysis::{build_jq, theorem1_rate, StatMatrices};
use crate::beamforming::{mrt_vector, random_reflection, ReflectionVector};
use crate::channel::sample_channels;
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::estimation::{sample_estimates, CsiEstimates};
use crate::rng::stream_rng;
use crate::scenario::ChannelStatistics;
use crate::{CVector, C64};

/// Sample mean of the per-trial rate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct McEstimate {
    /// bits/s/Hz
    pub mean_rate: f64,
    /// Sample standard deviation over `sqrt(trials)`; zero for a single trial.
    pub std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

impl McEstimate {
    pub fn from_samples(samples: &[f64], seed: u64) -> Result<Self> {
        let n = samples.len();
        if n == 0 {
            return Err(Error::invalid("need at least one trial"));
        }
        let mean = samples.iter().sum::<f64>() / n as f64;
        let std_error = if n > 1 {
            let ss: f64 = samples.iter().map(|x| (x - mean) * (x - mean)).sum();
            (ss / (n - 1) as f64).sqrt() / (n as f64).sqrt()
        } else {
            0.0
        };
        Ok(McEstimate { mean_rate: mean, std_error, trials: n, seed })
    }
}

/// How the reflection vector is chosen in each trial.
#[derive(Debug, Clone, PartialEq)]
pub enum ReflectionPolicy {
    Fixed(ReflectionVector),
    /// Fresh i.i.d. uniform phases per trial, drawn after the channel and
    /// the errors from the trial's stream.
    RandomPerTrial,
}

/// Signal and noise-plus-error powers of one draw.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrTerms {
    /// `P |(h_d_hat + Z_hat^H v)^H f|^2`
    pub signal: f64,
    /// `sigma2 + |(e_d + E_Z^H v)^H f|^2`
    pub denominator: f64,
}

impl SnrTerms {
    pub fn snr(&self) -> f64 {
        self.signal / self.denominator
    }
}

pub fn snr_terms(est: &CsiEstimates, v: &CVector, f: &CVector, p: f64, sigma2: f64) -> Result<SnrTerms> {
    let m = est.h_d_hat.len();
    if f.len() != m || v.len() != est.z_hat.nrows() {
        return Err(Error::dim(format!(
            "beamformer of length {} and reflection of length {} do not fit an {}x{} channel",
            f.len(),
            v.len(),
            est.z_hat.nrows(),
            m
        )));
    }
    let combined = &est.h_d_hat + est.z_hat.ad_mul(v);
    if combined.norm() == 0.0 {
        return Err(Error::DegenerateChannel);
    }
    let error = &est.e_d + est.e_z.ad_mul(v);
    Ok(SnrTerms {
        signal: p * combined.dotc(f).norm_sqr(),
        denominator: sigma2 + error.dotc(f).norm_sqr(),
    })
}

/// Per-draw SNR `P |c^H f|^2 / (sigma2 + |e^H f|^2)` with `c` the combined
/// estimate and `e` the combined error.
pub fn instantaneous_snr(est: &CsiEstimates, v: &CVector, f: &CVector, p: f64, sigma2: f64) -> Result<f64> {
    Ok(snr_terms(est, v, f, p, sigma2)?.snr())
}

fn trial_rate(stats: &ChannelStatistics, policy: &ReflectionPolicy, cfg: &SystemConfig, xi: f64, seed: u64, t: u64) -> Result<f64> {
    let mut rng = stream_rng(seed, t);
    let realization = sample_channels(stats, &mut rng);
    let est = sample_estimates(&realization, xi, &mut rng)?;
    let drawn;
    let v = match policy {
        ReflectionPolicy::Fixed(v) => v.as_vector(),
        ReflectionPolicy::RandomPerTrial => {
            drawn = random_reflection(stats.nl(), &mut rng);
            drawn.as_vector()
        }
    };
    let f = mrt_vector(&est.h_d_hat, &est.z_hat, v)?;
    let snr = instantaneous_snr(&est, v, &f, cfg.p, cfg.sigma2)?;
    Ok(snr.ln_1p() / std::f64::consts::LN_2)
}

/// Average of `log2(1 + SNR)` over `trials` independent draws of the
/// channels and CSI errors. Trial `t` uses stream `t` of `seed`.
pub fn monte_carlo_rate(
    stats: &ChannelStatistics,
    policy: &ReflectionPolicy,
    cfg: &SystemConfig,
    trials: usize,
    seed: u64,
) -> Result<McEstimate> {
    if trials == 0 {
        return Err(Error::invalid("need at least one trial"));
    }
    if let ReflectionPolicy::Fixed(v) = policy {
        if v.len() != stats.nl() {
            return Err(Error::dim(format!("reflection has {} entries, expected {}", v.len(), stats.nl())));
        }
    }
    let xi = cfg.xi();
    let rates: Vec<f64> = (0..trials as u64)
        .into_par_iter()
        .map(|t| trial_rate(stats, policy, cfg, xi, seed, t))
        .collect::<Result<_>>()?;
    McEstimate::from_samples(&rates, seed)
}

/// Largest search space the grid oracle accepts.
pub const GRID_LIMIT: u64 = 10_000_000;

/// Result of the exhaustive phase grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridOptimum {
    pub reflection: ReflectionVector,
    /// Index tuple of the winner; element `i` has phase shift `2 pi k_i / levels`.
    pub indices: Vec<usize>,
    pub rate: f64,
    pub evaluated: u64,
}

/// Exhaustive search of the closed-form rate over `levels` uniformly spaced
/// phase shifts per element. Tuples are visited in lexicographic order and a
/// later tuple replaces the incumbent only when strictly better (beyond a
/// relative `1e-12`), so ties go to the smallest tuple.
pub fn grid_search_pencil(sm: &StatMatrices, p: f64, levels: usize) -> Result<GridOptimum> {
    let nl = sm.nl();
    if levels == 0 || nl == 0 {
        return Err(Error::invalid("grid search needs at least one level and one element"));
    }
    let too_large = || Error::SearchTooLarge { levels, elements: nl, limit: GRID_LIMIT };
    let exponent = u32::try_from(nl).map_err(|_| too_large())?;
    let total = (levels as u64).checked_pow(exponent).filter(|&t| t <= GRID_LIMIT).ok_or_else(too_large)?;

    let table: Vec<C64> = (0..levels).map(|k| C64::from_polar(1.0, -TAU * k as f64 / levels as f64)).collect();
    let mut idx = vec![0usize; nl];
    let mut v = CVector::from_element(nl, table[0]);
    let mut best_idx = idx.clone();
    let mut best = sm.objective(&v);

    for _ in 1..total {
        let mut pos = nl - 1;
        loop {
            idx[pos] += 1;
            if idx[pos] < levels {
                v[pos] = table[idx[pos]];
                break;
            }
            idx[pos] = 0;
            v[pos] = table[0];
            pos -= 1;
        }
        let value = sm.objective(&v);
        if value > best + 1e-12 * best.abs() {
            best = value;
            best_idx.copy_from_slice(&idx);
        }
    }

    let phases: Vec<f64> = best_idx.iter().map(|&k| TAU * k as f64 / levels as f64).collect();
    let reflection = ReflectionVector::from_phase_shifts(&phases);
    let rate = theorem1_rate(reflection.as_vector(), sm, p)?;
    Ok(GridOptimum { reflection, indices: best_idx, rate, evaluated: total })
}

/// [`grid_search_pencil`] on the matrices built from `stats` and `cfg`.
pub fn grid_search_reflection(stats: &ChannelStatistics, cfg: &SystemConfig, levels: usize) -> Result<GridOptimum> {
    let sm = build_jq(stats, cfg)?;
    grid_search_pencil(&sm, cfg.p, levels)
}

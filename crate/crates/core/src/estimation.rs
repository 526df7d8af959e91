//! Imperfect CSI: additive estimation errors with variance `xi` per entry.
//!
//! The true channel and the error are drawn independently and the estimate
//! is their difference, so `Z = Z_hat + E_Z` and `h_d = h_d_hat + e_d` hold
//! exactly for every draw.

use rand::Rng;

use crate::channel::ChannelRealization;
use crate::error::{Error, Result};
use crate::rng::complex_normal;
use crate::{CMatrix, CVector, C64};

/// Channel estimates together with the errors that produced them.
#[derive(Debug, Clone, PartialEq)]
pub struct CsiEstimates {
    pub z_hat: CMatrix,
    pub h_d_hat: CVector,
    pub e_z: CMatrix,
    pub e_d: CVector,
    pub xi: f64,
}

/// LMMSE error variance `1 / (1 + T rho)` for training length `T` and
/// training SNR `rho`.
pub fn estimation_error_variance(training_len: u64, rho: f64) -> Result<f64> {
    if !(rho >= 0.0) {
        return Err(Error::invalid(format!("training SNR must be nonnegative, got {rho}")));
    }
    Ok(1.0 / (1.0 + training_len as f64 * rho))
}

/// Draws `E_Z ~ CN(0, xi I)` and `e_d ~ CN(0, xi I)` and subtracts them from
/// the realization. Errors are drawn after (and independently of) the channel.
pub fn sample_estimates<R: Rng + ?Sized>(
    realization: &ChannelRealization,
    xi: f64,
    rng: &mut R,
) -> Result<CsiEstimates> {
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::invalid(format!("error variance must be nonnegative, got {xi}")));
    }
    let (nl, m) = realization.z.shape();
    if xi == 0.0 {
        return Ok(CsiEstimates {
            z_hat: realization.z.clone(),
            h_d_hat: realization.h_d.clone(),
            e_z: CMatrix::zeros(nl, m),
            e_d: CVector::zeros(m),
            xi,
        });
    }
    let sd = C64::new(xi.sqrt(), 0.0);
    let mut e_z = CMatrix::zeros(nl, m);
    for i in 0..nl {
        for j in 0..m {
            e_z[(i, j)] = complex_normal(rng) * sd;
        }
    }
    let e_d = CVector::from_fn(m, |_, _| complex_normal(rng) * sd);
    Ok(CsiEstimates {
        z_hat: &realization.z - &e_z,
        h_d_hat: &realization.h_d - &e_d,
        e_z,
        e_d,
        xi,
    })
}

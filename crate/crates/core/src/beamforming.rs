//! Active (MRT) and passive (IRS reflection) beamformers.

use std::f64::consts::TAU;

use rand::Rng;

use crate::analysis::StatMatrices;
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, inverse_sqrt_pd, power_iteration};
use crate::scenario::ChannelStatistics;
use crate::{CMatrix, CVector, C64};

/// Unit-modulus reflection vector `v` (the vector whose Hermitian multiplies
/// the cascaded channel, `v^H Z`).
///
/// Entry `i` is `exp(-j phi_i)` where `phi_i` in `[0, 2 pi)` is the phase shift
/// applied by reflecting element `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionVector(CVector);

impl ReflectionVector {
    /// Accepts a vector whose entries all have modulus one (to 1e-9).
    pub fn new(v: CVector) -> Result<Self> {
        if let Some((i, z)) = v.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > 1e-9) {
            return Err(Error::invalid(format!("entry {i} has modulus {}", z.norm())));
        }
        Ok(ReflectionVector(v))
    }

    /// Builds `v` from element phase shifts (`v_i = exp(-j phi_i)`).
    pub fn from_phase_shifts(phases: &[f64]) -> Self {
        ReflectionVector(CVector::from_iterator(
            phases.len(),
            phases.iter().map(|&p| C64::from_polar(1.0, -p)),
        ))
    }

    pub fn ones(n: usize) -> Self {
        ReflectionVector(CVector::from_element(n, C64::new(1.0, 0.0)))
    }

    /// Element phase shifts `phi_i` in `[0, 2 pi)`.
    pub fn phase_shifts(&self) -> Vec<f64> {
        self.0.iter().map(|z| (-z.arg()).rem_euclid(TAU)).collect()
    }

    pub fn as_vector(&self) -> &CVector {
        &self.0
    }

    pub fn into_vector(self) -> CVector {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Maximum-ratio transmit vector `(h_d_hat + Z_hat^H v) / ||.||`.
pub fn mrt_vector(h_d_hat: &CVector, z_hat: &CMatrix, v: &CVector) -> Result<CVector> {
    if z_hat.ncols() != h_d_hat.len() || z_hat.nrows() != v.len() {
        return Err(Error::dim(format!(
            "MRT inputs disagree: h_d {} , Z {:?}, v {}",
            h_d_hat.len(),
            z_hat.shape(),
            v.len()
        )));
    }
    let combined = h_d_hat + z_hat.ad_mul(v);
    let norm = combined.norm();
    if norm == 0.0 || !norm.is_finite() {
        return Err(Error::DegenerateChannel);
    }
    Ok(combined / C64::new(norm, 0.0))
}

/// How the dominant eigenvector is computed.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum EigenMethod {
    /// Dense Hermitian eigendecomposition up to 512 elements, power
    /// iteration above.
    #[default]
    Auto,
    Dense,
    /// Shifted power iteration, tolerance 1e-10, at most 10^4 iterations.
    PowerIteration,
}

pub const POWER_TOL: f64 = 1e-10;
pub const POWER_MAX_ITER: usize = 10_000;
const DENSE_LIMIT: usize = 512;

/// Relaxed (not yet unit-modulus) solution of the reflection design.
#[derive(Debug, Clone, PartialEq)]
pub struct RelaxedSolution {
    /// `v'`, scaled to unit norm with its largest entry rotated onto the
    /// positive real axis.
    pub vector: CVector,
    /// Dominant eigenvalue of the matrix that produced the direction.
    pub eigenvalue: f64,
    /// `true` when `Q` is a multiple of `J` and the direction came from `J`.
    pub flat_pencil: bool,
}

fn dominant_eigenvector(a: &CMatrix, method: EigenMethod) -> Result<(CVector, f64)> {
    let dense = match method {
        EigenMethod::Auto => a.nrows() <= DENSE_LIMIT,
        EigenMethod::Dense => true,
        EigenMethod::PowerIteration => false,
    };
    if dense {
        let (values, vectors) = hermitian_eigen(a)?;
        Ok((vectors.column(0).into_owned(), values[0]))
    } else {
        let it = power_iteration(a, POWER_TOL, POWER_MAX_ITER)?;
        Ok((it.vector, it.eigenvalue))
    }
}

fn canonical_phase(mut v: CVector) -> CVector {
    let norm = v.norm();
    if norm > 0.0 {
        v /= C64::new(norm, 0.0);
    }
    let mut best = 0;
    for i in 1..v.len() {
        if v[i].norm() > v[best].norm() * (1.0 + 1e-12) {
            best = i;
        }
    }
    if !v.is_empty() && v[best].norm() > 0.0 {
        let rot = v[best].conj() / C64::new(v[best].norm(), 0.0);
        v *= rot;
    }
    v
}

/// Relaxed maximizer of `(v^H J v)^2 / (v^H Q v)`.
///
/// Whitens with `Q^{-1/2}`, takes the dominant eigenvector `w` of
/// `B = Q^{-1/2} J Q^{-1/2}` and returns `v' = Q^{-1/2} w`. When `Q` is a
/// scalar multiple of `J` (perfect CSI), `B` is a multiple of the identity and
/// carries no direction; the objective is then `v^H J v` up to a constant and
/// the dominant eigenvector of `J` is returned instead.
pub fn solve_statistical_reflection(sm: &StatMatrices) -> Result<RelaxedSolution> {
    solve_statistical_reflection_with(sm, EigenMethod::Auto)
}

pub fn solve_statistical_reflection_with(sm: &StatMatrices, method: EigenMethod) -> Result<RelaxedSolution> {
    let q_inv_sqrt = inverse_sqrt_pd(&sm.q_eff)?;

    let trace_j: f64 = (0..sm.nl()).map(|i| sm.j_eff[(i, i)].re).sum();
    let trace_q: f64 = (0..sm.nl()).map(|i| sm.q_eff[(i, i)].re).sum();
    let ratio = trace_q / trace_j;
    let flat = ratio.is_finite()
        && (&sm.q_eff - &sm.j_eff * C64::new(ratio, 0.0)).norm() <= 1e-12 * sm.q_eff.norm();

    if flat {
        let (v, lam) = dominant_eigenvector(&sm.j_eff, method)?;
        return Ok(RelaxedSolution { vector: canonical_phase(v), eigenvalue: lam, flat_pencil: true });
    }

    let b = &q_inv_sqrt * &sm.j_eff * &q_inv_sqrt;
    let b = (&b + b.adjoint()) * C64::new(0.5, 0.0);
    let (w, lam) = dominant_eigenvector(&b, method)?;
    let v = &q_inv_sqrt * w;
    Ok(RelaxedSolution { vector: canonical_phase(v), eigenvalue: lam, flat_pencil: false })
}

/// Unit-modulus projection by phase extraction: `v_i = exp(j arg v'_i)`.
/// Entries with `|v'_i| < 1e-12` get phase zero.
pub fn phase_extract(v: &CVector) -> ReflectionVector {
    ReflectionVector(v.map(|z| {
        if z.norm() < 1e-12 {
            C64::new(1.0, 0.0)
        } else {
            z / C64::new(z.norm(), 0.0)
        }
    }))
}

/// Statistical design: relaxed solve followed by phase extraction.
pub fn statistical_reflection(sm: &StatMatrices) -> Result<ReflectionVector> {
    Ok(phase_extract(&solve_statistical_reflection(sm)?.vector))
}

/// Phase shifts drawn i.i.d. uniform on `[0, 2 pi)`.
pub fn random_reflection<R: Rng + ?Sized>(nl: usize, rng: &mut R) -> ReflectionVector {
    let phases: Vec<f64> = (0..nl).map(|_| TAU * rng.random::<f64>()).collect();
    ReflectionVector::from_phase_shifts(&phases)
}

/// Element phase shift that cancels the cascaded LoS phase:
/// `phi = -(theta_g + theta_h)`, wrapped to `[0, 2 pi)`.
///
/// `theta_g` is the phase of the IRS-user LoS coefficient as it enters the
/// cascade (the conjugated entry of `gbar`), `theta_h` that of the BS-IRS LoS
/// coefficient.
pub fn siso_phase(theta_g: f64, theta_h: f64) -> f64 {
    (-(theta_g + theta_h)).rem_euclid(TAU)
}

/// Optimal reflection for a single-antenna BS with uncorrelated channels and
/// perfect CSI: every element co-phases its LoS cascade.
pub fn siso_optimal_phases(stats: &ChannelStatistics) -> Result<ReflectionVector> {
    if stats.m != 1 {
        return Err(Error::invalid(format!(
            "single-antenna optimum requires M = 1, got M = {}",
            stats.m
        )));
    }
    let phases: Vec<f64> = stats
        .links
        .iter()
        .flat_map(|link| {
            (0..stats.l).map(move |i| siso_phase(link.los_g[i].conj().arg(), link.los_h[(i, 0)].arg()))
        })
        .collect();
    Ok(ReflectionVector::from_phase_shifts(&phases))
}

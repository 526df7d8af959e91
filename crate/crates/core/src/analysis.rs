//! Closed-form ergodic-rate analysis.
//!
//! The rate under MRT with imperfect CSI is approximated by
//! `log2(1 + P X^2 / (sigma2 X + Y))` where, for a unit-modulus reflection
//! vector `v`,
//!
//! * `X = E{ ||h_d_hat^H + v^H Z_hat||^2 }`
//! * `Y = E{ |(e_d^H + v^H E_Z)(h_d_hat + Z_hat^H v)|^2 }`
//!
//! Both are quadratic forms in `v` once every scalar term `s` is folded onto
//! the identity as `(s / NL) I` (valid because `v^H v = NL`):
//!
//! * `X = v^H J v`, `J = ((g1 + xi M NL) / NL) I + C`
//! * `Y = v^H Yq v`, `Yq = ((g2 + g3 NL xi + cross) / NL) I + g4 C`
//! * `Q = Yq + sigma2 J`
//!
//! with `g1 = (1+xi) M`, `g2 = xi M + xi^2 M (M+1)`,
//! `g3 = g1 + xi M + xi (M+1) M NL`, `g4 = xi (1 + NL)`.
//!
//! `cross` is the term `2 xi^2 M^2 NL` coming from the correlation between
//! `e_d^H h_d_hat` and `v^H E_Z Z_hat^H v` (both contain a squared error).
//! [`DenominatorModel::Exact`] keeps it, so the quadratic form equals the
//! expectation; [`DenominatorModel::NoCrossTerm`] drops it.

use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::linalg::quad_form;
use crate::scenario::{ChannelStatistics, KFactor};
use crate::{CMatrix, CVector, C64};

/// Which constant term the denominator matrix carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DenominatorModel {
    /// Exact expectation, including the `2 xi^2 M^2 NL` cross term.
    #[default]
    Exact,
    /// Closed form without the cross term.
    NoCrossTerm,
}

/// Scalar bookkeeping behind [`StatMatrices`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Gammas {
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
    pub gamma4: f64,
    /// `2 xi^2 M^2 NL` under [`DenominatorModel::Exact`], zero otherwise.
    pub cross: f64,
    pub xi: f64,
    pub m: usize,
    pub nl: usize,
    pub sigma2: f64,
}

impl Gammas {
    pub fn new(xi: f64, m: usize, nl: usize, sigma2: f64, model: DenominatorModel) -> Self {
        let (mf, nlf) = (m as f64, nl as f64);
        let gamma1 = (1.0 + xi) * mf;
        let gamma2 = xi * mf + xi * xi * mf * (mf + 1.0);
        let gamma3 = gamma1 + xi * mf + xi * (mf + 1.0) * mf * nlf;
        let gamma4 = xi * (1.0 + nlf);
        let cross = match model {
            DenominatorModel::Exact => 2.0 * xi * xi * mf * mf * nlf,
            DenominatorModel::NoCrossTerm => 0.0,
        };
        Gammas { gamma1, gamma2, gamma3, gamma4, cross, xi, m, nl, sigma2 }
    }

    /// Identity coefficient of `J` (times `NL`).
    pub fn numerator_constant(&self) -> f64 {
        self.gamma1 + self.xi * self.m as f64 * self.nl as f64
    }

    /// Identity coefficient of `Yq` (times `NL`).
    pub fn excess_constant(&self) -> f64 {
        self.gamma2 + self.gamma3 * self.nl as f64 * self.xi + self.cross
    }
}

/// Numerator and denominator matrices of the rate approximation.
#[derive(Debug, Clone, PartialEq)]
pub struct StatMatrices {
    pub c: CMatrix,
    pub j_eff: CMatrix,
    /// Error-induced part of the denominator (`Q - sigma2 J`).
    pub y_eff: CMatrix,
    pub q_eff: CMatrix,
    pub ledger: Gammas,
}

fn scaled_identity(n: usize, s: f64) -> CMatrix {
    CMatrix::identity(n, n) * C64::new(s, 0.0)
}

/// Second-moment matrix
/// `C = Gbar Hbar Hbar^H Gbar^H + M Gbar K1 R K1 Gbar^H
///      + [tr(K2 Hbar Hbar^H K2) + M tr(K2 K1 R K1 K2)] / NL * I`.
pub fn build_c(stats: &ChannelStatistics) -> Result<CMatrix> {
    let nl = stats.nl();
    if stats.hbar.nrows() != nl || stats.gbar.len() != nl || stats.r.shape() != (nl, nl) {
        return Err(Error::dim("statistics blocks disagree on NL"));
    }
    let m = stats.m as f64;

    // A = Gbar Hbar
    let mut a = stats.hbar.clone();
    for i in 0..nl {
        let gi = stats.gbar[i];
        for j in 0..stats.m {
            a[(i, j)] *= gi;
        }
    }
    let mut c = &a * a.adjoint();

    for i in 0..nl {
        let left = stats.gbar[i] * stats.k1[i];
        for j in 0..nl {
            let r = stats.r[(i, j)];
            if r == C64::new(0.0, 0.0) {
                continue;
            }
            c[(i, j)] += left * r * (stats.gbar[j] * stats.k1[j]).conj() * m;
        }
    }

    let mut trace = 0.0;
    for i in 0..nl {
        let k2sq = stats.k2[i] * stats.k2[i];
        let row_power: f64 = stats.hbar.row(i).iter().map(|z| z.norm_sqr()).sum();
        trace += k2sq * row_power;
        trace += m * k2sq * stats.k1[i] * stats.k1[i] * stats.r[(i, i)].re;
    }
    c += scaled_identity(nl, trace / nl as f64);
    Ok(c)
}

/// [`StatMatrices`] for the configuration's `xi` and `sigma2` (exact model).
pub fn build_jq(stats: &ChannelStatistics, cfg: &SystemConfig) -> Result<StatMatrices> {
    build_jq_with(stats, cfg.xi(), cfg.sigma2, DenominatorModel::Exact)
}

pub fn build_jq_with(
    stats: &ChannelStatistics,
    xi: f64,
    sigma2: f64,
    model: DenominatorModel,
) -> Result<StatMatrices> {
    if !(sigma2 > 0.0 && sigma2.is_finite()) {
        return Err(Error::invalid(format!("noise variance must be positive, got {sigma2}")));
    }
    if !(xi >= 0.0 && xi.is_finite()) {
        return Err(Error::invalid(format!("error variance must be nonnegative, got {xi}")));
    }
    let nl = stats.nl();
    let c = build_c(stats)?;
    let ledger = Gammas::new(xi, stats.m, nl, sigma2, model);
    let nlf = nl as f64;
    let j_eff = scaled_identity(nl, ledger.numerator_constant() / nlf) + &c;
    let y_eff = scaled_identity(nl, ledger.excess_constant() / nlf) + &c * C64::new(ledger.gamma4, 0.0);
    let q_eff = &y_eff + &j_eff * C64::new(sigma2, 0.0);
    Ok(StatMatrices { c, j_eff, y_eff, q_eff, ledger })
}

impl StatMatrices {
    /// Wraps an arbitrary `(J, Q)` pencil; the objective becomes
    /// `(v^H J v)^2 / (v^H Q v)`.
    pub fn from_pencil(j: CMatrix, q: CMatrix) -> Result<Self> {
        let n = j.nrows();
        if !j.is_square() || q.shape() != j.shape() {
            return Err(Error::dim("J and Q must be square and of equal size"));
        }
        Ok(StatMatrices {
            c: CMatrix::zeros(n, n),
            j_eff: j,
            y_eff: q.clone(),
            q_eff: q,
            ledger: Gammas::new(0.0, 0, n, 0.0, DenominatorModel::Exact),
        })
    }

    pub fn nl(&self) -> usize {
        self.j_eff.nrows()
    }

    /// `X = v^H J v`.
    pub fn numerator(&self, v: &CVector) -> f64 {
        quad_form(&self.j_eff, v)
    }

    /// `Y = v^H (Q - sigma2 J) v`.
    pub fn excess(&self, v: &CVector) -> f64 {
        quad_form(&self.y_eff, v)
    }

    /// `v^H Q v`.
    pub fn denominator(&self, v: &CVector) -> f64 {
        quad_form(&self.q_eff, v)
    }

    /// `X^2 / (sigma2 X + Y)`, the effective SNR per unit transmit power.
    pub fn objective(&self, v: &CVector) -> f64 {
        let x = self.numerator(v);
        x * x / (self.ledger.sigma2 * x + self.excess(v))
    }
}

fn check_unit_modulus(v: &CVector, nl: usize) -> Result<()> {
    if v.len() != nl {
        return Err(Error::dim(format!("reflection vector has {} entries, expected {nl}", v.len())));
    }
    if let Some((i, z)) = v.iter().enumerate().find(|(_, z)| (z.norm() - 1.0).abs() > 1e-9) {
        return Err(Error::invalid(format!(
            "reflection entry {i} has modulus {} (must be 1)",
            z.norm()
        )));
    }
    Ok(())
}

/// `log2(1 + P (v^H J v)^2 / (v^H Q v))` in bits/s/Hz.
pub fn theorem1_rate(v: &CVector, sm: &StatMatrices, p: f64) -> Result<f64> {
    check_unit_modulus(v, sm.nl())?;
    Ok((p * sm.objective(v)).ln_1p() / std::f64::consts::LN_2)
}

fn log2_1p(x: f64) -> f64 {
    x.ln_1p() / std::f64::consts::LN_2
}

fn check_gain_vectors(alpha: &[f64], beta: &[f64], p: f64, sigma2: f64) -> Result<()> {
    if alpha.is_empty() || alpha.len() != beta.len() {
        return Err(Error::dim(format!(
            "alpha and beta must be nonempty and equally long ({} vs {})",
            alpha.len(),
            beta.len()
        )));
    }
    if alpha.iter().chain(beta).any(|&g| !(g >= 0.0 && g.is_finite())) {
        return Err(Error::invalid("large-scale gains must be finite and nonnegative"));
    }
    if !(p >= 0.0 && sigma2 > 0.0) {
        return Err(Error::invalid("need P >= 0 and sigma2 > 0"));
    }
    Ok(())
}

/// The SNR gain `Upsilon_1` of the single-antenna, uncorrelated, perfect-CSI
/// closed form:
/// `L^2 (sum_n sqrt(a b K1 K2 / ((K1+1)(K2+1))))^2
///  + L sum_n a b (K1 + K2 + 1) / ((K1+1)(K2+1))`.
pub fn lemma2_upsilon(alpha: &[f64], beta: &[f64], k1: &[KFactor], k2: &[KFactor], l: usize) -> Result<f64> {
    check_gain_vectors(alpha, beta, 0.0, 1.0)?;
    if k1.len() != alpha.len() || k2.len() != alpha.len() {
        return Err(Error::dim("K-factor vectors must match the gain vectors"));
    }
    for k in k1.iter().chain(k2) {
        if let KFactor::Finite(x) = k {
            if !(*x >= 0.0 && x.is_finite()) {
                return Err(Error::invalid(format!("K-factor must be nonnegative, got {x}")));
            }
        }
    }
    let lf = l as f64;
    let mut coherent = 0.0;
    let mut scattered = 0.0;
    for n in 0..alpha.len() {
        let ab = alpha[n] * beta[n];
        let los = k1[n].los_fraction() * k2[n].los_fraction();
        coherent += (ab * los).sqrt();
        // (K1 + K2 + 1) / ((K1+1)(K2+1)) = 1 - K1 K2 / ((K1+1)(K2+1))
        scattered += ab * (1.0 - los);
    }
    Ok(lf * lf * coherent * coherent + lf * scattered)
}

/// `log2(1 + (P / sigma2)(1 + Upsilon_1))`.
pub fn lemma2_rate(
    alpha: &[f64],
    beta: &[f64],
    k1: &[KFactor],
    k2: &[KFactor],
    l: usize,
    p: f64,
    sigma2: f64,
) -> Result<f64> {
    check_gain_vectors(alpha, beta, p, sigma2)?;
    let ups = lemma2_upsilon(alpha, beta, k1, k2, l)?;
    Ok(log2_1p(p / sigma2 * (1.0 + ups)))
}

/// Pure-LoS closed form
/// `log2(1 + (P/sigma2)(1 + L^2 (sum sqrt(a b))^2 + L sum a b))`.
pub fn case1_rate(alpha: &[f64], beta: &[f64], l: usize, p: f64, sigma2: f64) -> Result<f64> {
    let all: Vec<usize> = (0..alpha.len()).collect();
    case3_rate(alpha, beta, l, &all, p, sigma2).map(|c| c.rate)
}

/// Rich-scattering closed form `log2(1 + (P/sigma2)(1 + L sum a b))`.
pub fn case2_rate(alpha: &[f64], beta: &[f64], l: usize, p: f64, sigma2: f64) -> Result<f64> {
    case3_rate(alpha, beta, l, &[], p, sigma2).map(|c| c.rate)
}

/// Hybrid closed form and its normalized-gain bound.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridRate {
    /// `log2(1 + (P/sigma2)(1 + L^2 (sum_{j in R} sqrt(a_j b_j))^2 + L sum_n a_n b_n))`
    pub rate: f64,
    /// `log2(1 + (P/sigma2)(1 + L^2 m^2 + L N))` with `m = |R|`.
    pub bound: f64,
}

/// Hybrid propagation: IRSs in `pure_los_set` have LoS on both hops.
pub fn case3_rate(
    alpha: &[f64],
    beta: &[f64],
    l: usize,
    pure_los_set: &[usize],
    p: f64,
    sigma2: f64,
) -> Result<HybridRate> {
    check_gain_vectors(alpha, beta, p, sigma2)?;
    let n = alpha.len();
    let mut seen = vec![false; n];
    for &j in pure_los_set {
        if j >= n {
            return Err(Error::invalid(format!("pure-LoS index {j} out of range for N = {n}")));
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::invalid(format!("pure-LoS index {j} listed twice")));
        }
    }
    let lf = l as f64;
    let coherent: f64 = pure_los_set.iter().map(|&j| (alpha[j] * beta[j]).sqrt()).sum();
    let scattered: f64 = alpha.iter().zip(beta).map(|(a, b)| a * b).sum();
    let snr = p / sigma2;
    let mf = pure_los_set.len() as f64;
    Ok(HybridRate {
        rate: log2_1p(snr * (1.0 + lf * lf * coherent * coherent + lf * scattered)),
        bound: log2_1p(snr * (1.0 + lf * lf * mf * mf + lf * n as f64)),
    })
}

/// Side-by-side view of the pure-LoS closed form and the K -> inf
/// limit of the general closed form, which differ by the `L sum a b` term.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LosLimitDiagnostic {
    /// Pure-LoS closed-form rate (keeps `L sum a b`).
    pub pure_los_rate: f64,
    /// Limit of the general closed form with both K-factors infinite.
    pub limit_rate: f64,
    /// `L sum a b`, present only in the pure-LoS SNR gain.
    pub extra_term: f64,
}

pub fn los_limit_diagnostic(alpha: &[f64], beta: &[f64], l: usize, p: f64, sigma2: f64) -> Result<LosLimitDiagnostic> {
    let los = vec![KFactor::PureLos; alpha.len()];
    Ok(LosLimitDiagnostic {
        pure_los_rate: case1_rate(alpha, beta, l, p, sigma2)?,
        limit_rate: lemma2_rate(alpha, beta, &los, &los, l, p, sigma2)?,
        extra_term: l as f64 * alpha.iter().zip(beta).map(|(a, b)| a * b).sum::<f64>(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::hermitian_eigen;
    use crate::scenario::IrsLink;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn ones_link(l: usize, m: usize, k: KFactor) -> IrsLink {
        IrsLink {
            beta: 1.0,
            alpha: 1.0,
            k1: k,
            k2: k,
            los_h: CMatrix::from_element(l, m, C64::new(1.0, 0.0)),
            los_g: CVector::from_element(l, C64::new(1.0, 0.0)),
        }
    }

    fn ones(n: usize) -> CVector {
        CVector::from_element(n, C64::new(1.0, 0.0))
    }

    #[test]
    fn pure_los_c_is_all_ones() {
        let s = ChannelStatistics::from_links(vec![ones_link(2, 1, KFactor::PureLos)], 0.0).unwrap();
        let c = build_c(&s).unwrap();
        for z in c.iter() {
            assert_relative_eq!(z.re, 1.0, max_relative = 1e-15);
            assert_eq!(z.im, 0.0);
        }
    }

    #[test]
    fn c_is_degree_one_in_beta() {
        let mut link = ones_link(3, 2, KFactor::Finite(2.0));
        link.los_h[(1, 0)] = C64::from_polar(1.0, 0.7);
        link.los_g[2] = C64::from_polar(1.0, -1.1);
        let base = ChannelStatistics::from_links(vec![link.clone()], 0.4).unwrap();
        link.beta *= 3.0;
        let scaled = ChannelStatistics::from_links(vec![link], 0.4).unwrap();
        let (c0, c1) = (build_c(&base).unwrap(), build_c(&scaled).unwrap());
        assert!((c1 - c0 * C64::new(3.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn c_is_hermitian_psd() {
        let mut link = ones_link(4, 3, KFactor::Finite(1.5));
        for i in 0..4 {
            link.los_g[i] = C64::from_polar(1.0, 0.3 * i as f64);
            for j in 0..3 {
                link.los_h[(i, j)] = C64::from_polar(1.0, 0.9 * (i * j) as f64);
            }
        }
        let s = ChannelStatistics::from_links(vec![link.clone(), link], 0.7).unwrap();
        let c = build_c(&s).unwrap();
        let (vals, _) = hermitian_eigen(&c).unwrap();
        assert!(*vals.last().unwrap() >= -1e-10);
    }

    #[test]
    fn gammas_follow_definitions() {
        let g = Gammas::new(0.1, 2, 4, 1.0, DenominatorModel::NoCrossTerm);
        assert_relative_eq!(g.gamma1, 2.2, max_relative = 1e-15);
        assert_relative_eq!(g.gamma2, 0.2 + 0.01 * 6.0, max_relative = 1e-15);
        assert_relative_eq!(g.gamma3, 2.2 + 0.2 + 0.1 * 3.0 * 2.0 * 4.0, max_relative = 1e-15);
        assert_relative_eq!(g.gamma4, 0.5, max_relative = 1e-15);
        assert_eq!(g.cross, 0.0);
        let e = Gammas::new(0.1, 2, 4, 1.0, DenominatorModel::Exact);
        assert_relative_eq!(e.cross, 2.0 * 0.01 * 4.0 * 4.0, max_relative = 1e-15);
    }

    #[test]
    fn perfect_csi_collapse() {
        let s = ChannelStatistics::from_links(vec![ones_link(2, 2, KFactor::Finite(3.0))], 0.0).unwrap();
        let sm = build_jq_with(&s, 0.0, 2.0, DenominatorModel::Exact).unwrap();
        let expect_j = scaled_identity(2, 2.0 / 2.0) + &sm.c;
        assert!((&sm.j_eff - &expect_j).norm() < 1e-14);
        assert!((&sm.q_eff - &sm.j_eff * C64::new(2.0, 0.0)).norm() < 1e-14);
        let v = ones(2);
        let p = 10.0;
        let expected = log2_1p(p / 2.0 * (2.0 + quad_form(&sm.c, &v)));
        assert_relative_eq!(theorem1_rate(&v, &sm, p).unwrap(), expected, max_relative = 1e-13);
    }

    #[test]
    fn zero_c_gives_constant_numerator() {
        // alpha = 0 switches off every reflected path, so C = 0.
        let mut link = ones_link(3, 2, KFactor::Finite(1.0));
        link.alpha = 0.0;
        let s = ChannelStatistics::from_links(vec![link], 0.0).unwrap();
        let xi = 0.05;
        let sm = build_jq_with(&s, xi, 1.0, DenominatorModel::Exact).unwrap();
        assert!(sm.c.norm() == 0.0);
        let expected = (1.0 + xi) * 2.0 + xi * 2.0 * 3.0;
        for phase in [0.0, 0.4, 2.0] {
            let v = CVector::from_fn(3, |i, _| C64::from_polar(1.0, phase * i as f64));
            assert_relative_eq!(sm.numerator(&v), expected, max_relative = 1e-14);
        }
    }

    #[test]
    fn scalar_collapse() {
        let c = 0.37;
        let link = IrsLink {
            beta: c,
            alpha: 1.0,
            k1: KFactor::PureLos,
            k2: KFactor::PureLos,
            los_h: CMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            los_g: CVector::from_element(1, C64::new(1.0, 0.0)),
        };
        let s = ChannelStatistics::from_links(vec![link], 0.0).unwrap();
        let sm = build_jq_with(&s, 0.0, 0.5, DenominatorModel::Exact).unwrap();
        assert_relative_eq!(sm.c[(0, 0)].re, c, max_relative = 1e-14);
        let rate = theorem1_rate(&ones(1), &sm, 3.0).unwrap();
        assert_relative_eq!(rate, log2_1p(3.0 / 0.5 * (1.0 + c)), max_relative = 1e-14);
    }

    #[test]
    fn theorem1_rejects_bad_vectors() {
        let s = ChannelStatistics::from_links(vec![ones_link(2, 1, KFactor::Finite(1.0))], 0.0).unwrap();
        let sm = build_jq_with(&s, 0.01, 1.0, DenominatorModel::Exact).unwrap();
        let v = CVector::from_vec(vec![C64::new(1.0, 0.0), C64::new(0.5, 0.0)]);
        assert!(matches!(theorem1_rate(&v, &sm, 1.0), Err(Error::InvalidArgument(_))));
        assert!(matches!(theorem1_rate(&ones(3), &sm, 1.0), Err(Error::Dimension(_))));
        assert!(build_jq_with(&s, 0.01, 0.0, DenominatorModel::Exact).is_err());
    }

    #[test]
    fn quadratic_forms_real_and_positive() {
        let mut link = ones_link(3, 2, KFactor::Finite(0.8));
        link.los_h[(2, 1)] = C64::from_polar(1.0, 2.0);
        let s = ChannelStatistics::from_links(vec![link.clone(), link], 0.2).unwrap();
        let sm = build_jq_with(&s, 0.2, 1.0, DenominatorModel::Exact).unwrap();
        let (qv, _) = hermitian_eigen(&sm.q_eff).unwrap();
        assert!(*qv.last().unwrap() > 0.0);
        let v = CVector::from_fn(6, |i, _| C64::from_polar(1.0, 1.3 * i as f64));
        let x = v.dotc(&(&sm.j_eff * &v));
        assert!(x.re > 0.0 && x.im.abs() < 1e-12 * x.re);
        assert!(sm.denominator(&v) > 0.0);
    }

    #[test]
    fn exact_and_reduced_differ_by_cross_term() {
        let s = ChannelStatistics::from_links(vec![ones_link(2, 2, KFactor::Finite(1.0))], 0.0).unwrap();
        let xi = 0.1;
        let e = build_jq_with(&s, xi, 1.0, DenominatorModel::Exact).unwrap();
        let p = build_jq_with(&s, xi, 1.0, DenominatorModel::NoCrossTerm).unwrap();
        let v = ones(2);
        assert_relative_eq!(e.denominator(&v) - p.denominator(&v), 2.0 * xi * xi * 4.0 * 2.0, max_relative = 1e-12);
    }

    #[test]
    fn lemma2_values() {
        let r = lemma2_rate(&[1.0; 4], &[1.0; 4], &[KFactor::Finite(0.0); 4], &[KFactor::Finite(0.0); 4], 16, 100.0, 1.0).unwrap();
        assert_relative_eq!(r, (1.0f64 + 100.0 * (1.0 + 64.0)).log2(), max_relative = 1e-14);

        let one = [KFactor::Finite(1.0)];
        assert_relative_eq!(lemma2_upsilon(&[1.0], &[1.0], &one, &one, 1).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(lemma2_rate(&[1.0], &[1.0], &one, &one, 1, 2.0, 1.0).unwrap(), 5f64.log2(), max_relative = 1e-15);

        let los = [KFactor::PureLos; 2];
        let ups = lemma2_upsilon(&[1.0, 4.0], &[1.0, 1.0], &los, &los, 3).unwrap();
        assert_relative_eq!(ups, 9.0 * 9.0, max_relative = 1e-15);
        assert!(lemma2_rate(&[-1.0], &[1.0], &one, &one, 1, 1.0, 1.0).is_err());
        assert!(lemma2_rate(&[1.0], &[1.0], &[KFactor::Finite(-2.0)], &one, 1, 1.0, 1.0).is_err());
    }

    #[test]
    fn case_formulas() {
        assert_relative_eq!(case1_rate(&[1.0; 4], &[1.0; 4], 16, 100.0, 1.0).unwrap(), 416101f64.log2(), max_relative = 1e-14);
        assert_relative_eq!(case1_rate(&[1.0; 4], &[1.0; 4], 16, 100.0, 1.0).unwrap(), 18.666574, epsilon = 1e-5);
        assert_relative_eq!(case1_rate(&[1.0], &[1.0], 1, 1.0, 1.0).unwrap(), 2.0, max_relative = 1e-15);
        assert_relative_eq!(case2_rate(&[1.0; 4], &[1.0; 4], 16, 100.0, 1.0).unwrap(), 6501f64.log2(), max_relative = 1e-14);
        assert_relative_eq!(case2_rate(&[1.0; 4], &[1.0; 4], 16, 100.0, 1.0).unwrap(), 12.666446, epsilon = 1e-5);

        let h = case3_rate(&[1.0; 4], &[1.0; 4], 8, &[0, 2], 100.0, 1.0).unwrap();
        assert_relative_eq!(h.bound, 28901f64.log2(), max_relative = 1e-14);
        assert_relative_eq!(h.bound, 14.8188, epsilon = 1e-3);
        assert!(case3_rate(&[1.0; 2], &[1.0; 2], 8, &[0, 0], 1.0, 1.0).is_err());
        assert!(case3_rate(&[1.0; 2], &[1.0; 2], 8, &[5], 1.0, 1.0).is_err());
    }

    #[test]
    fn case3_collapses_to_cases_1_and_2() {
        let a = [0.3, 1.2, 0.8];
        let b = [2.0, 0.4, 1.1];
        let all = case3_rate(&a, &b, 5, &[0, 1, 2], 7.0, 0.5).unwrap().rate;
        assert_relative_eq!(all, case1_rate(&a, &b, 5, 7.0, 0.5).unwrap(), max_relative = 1e-15);
        let none = case3_rate(&a, &b, 5, &[], 7.0, 0.5).unwrap().rate;
        assert_relative_eq!(none, case2_rate(&a, &b, 5, 7.0, 0.5).unwrap(), max_relative = 1e-15);
    }

    #[test]
    fn case2_upper_bound_under_normalized_gains() {
        let a = [0.9, 0.2, 1.0];
        let b = [1.0, 0.7, 0.5];
        let bound = log2_1p(100.0 * (1.0 + 8.0 * 3.0));
        assert!(case2_rate(&a, &b, 8, 100.0, 1.0).unwrap() <= bound);
    }

    #[test]
    fn diagnostic_reports_extra_term() {
        let d = los_limit_diagnostic(&[1.0; 4], &[1.0; 4], 16, 100.0, 1.0).unwrap();
        assert_eq!(d.extra_term, 64.0);
        assert_relative_eq!(d.limit_rate, log2_1p(100.0 * (1.0 + 4096.0)), max_relative = 1e-14);
        assert!(d.pure_los_rate > d.limit_rate);
    }

    fn k_strategy() -> impl Strategy<Value = KFactor> {
        prop_oneof![ (0.0f64..50.0).prop_map(KFactor::Finite), Just(KFactor::PureLos) ]
    }

    fn bump(k: KFactor, by: f64) -> KFactor {
        match k {
            KFactor::Finite(x) => KFactor::Finite(x + by),
            KFactor::PureLos => KFactor::PureLos,
        }
    }

    proptest! {
        #[test]
        fn lemma2_monotone_in_every_parameter(
            a in prop::collection::vec(0.01f64..2.0, 3),
            b in prop::collection::vec(0.01f64..2.0, 3),
            k1 in prop::collection::vec(k_strategy(), 3),
            k2 in prop::collection::vec(k_strategy(), 3),
            idx in 0usize..3,
            by in 0.001f64..5.0,
            l in 1usize..32,
        ) {
            let base = lemma2_rate(&a, &b, &k1, &k2, l, 10.0, 1.0).unwrap();
            let tol = 1e-12 * base.abs().max(1.0);
            let mut a2 = a.clone(); a2[idx] += by;
            prop_assert!(lemma2_rate(&a2, &b, &k1, &k2, l, 10.0, 1.0).unwrap() >= base - tol);
            let mut b2 = b.clone(); b2[idx] += by;
            prop_assert!(lemma2_rate(&a, &b2, &k1, &k2, l, 10.0, 1.0).unwrap() >= base - tol);
            let mut k1b = k1.clone(); k1b[idx] = bump(k1b[idx], by);
            prop_assert!(lemma2_rate(&a, &b, &k1b, &k2, l, 10.0, 1.0).unwrap() >= base - tol);
            let mut k2b = k2.clone(); k2b[idx] = bump(k2b[idx], by);
            prop_assert!(lemma2_rate(&a, &b, &k1, &k2b, l, 10.0, 1.0).unwrap() >= base - tol);
        }
    }
}

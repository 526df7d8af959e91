//! Deployment geometry and the deterministic channel statistics it implies.
//!
//! For IRS `n` the BS-IRS channel is Rician with LoS matrix `Hbar_n`
//! (`[Hbar_n]_{ij} = exp(-j 2 pi d_ij / lambda)`), large-scale gain `beta_n`
//! and K-factor `K1_n`; the IRS-user hop has `gbar_n`, `alpha_n`, `K2_n`.
//! [`ChannelStatistics`] stacks all IRSs into `NL`-row blocks:
//!
//! * `hbar`  (`NL x M`): block `n` is `sqrt(beta K1/(K1+1)) Hbar_n`
//! * `gbar`  (`NL` diagonal): block `n` is `sqrt(alpha K2/(K2+1)) conj(gbar_n)`
//! * `k1`, `k2` (`NL` diagonals): `sqrt(beta/(K1+1))`, `sqrt(alpha/(K2+1))`
//! * `r` (`NL x NL`): block-diagonal spatial correlation
//!
//! The IRS-user channel is kept in diagonal form so that `v^H diag(gbar) hbar`
//! equals the per-IRS sum `sum_n gbar_n^H Phi_n Hbar_n`.

use std::f64::consts::PI;

use rand::Rng;

use crate::config::{KFactorLaw, SystemConfig};
use crate::error::{Error, Result};
use crate::linalg::matrix_sqrt_psd;
use crate::{CMatrix, CVector, C64};

/// A point in the plane, in meters.
pub type Point = [f64; 2];

fn dist(a: Point, b: Point) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Rician K-factor with an exact representation of the pure-LoS limit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KFactor {
    Finite(f64),
    /// K = infinity: no scattered component.
    PureLos,
}

impl KFactor {
    pub fn finite(k: f64) -> Result<Self> {
        if k >= 0.0 && k.is_finite() {
            Ok(KFactor::Finite(k))
        } else {
            Err(Error::invalid(format!("K-factor must be finite and nonnegative, got {k}")))
        }
    }

    /// `K / (K + 1)`, the LoS share of the hop power.
    pub fn los_fraction(self) -> f64 {
        match self {
            KFactor::Finite(k) => k / (k + 1.0),
            KFactor::PureLos => 1.0,
        }
    }

    /// `1 / (K + 1)`, the scattered share of the hop power.
    pub fn nlos_fraction(self) -> f64 {
        match self {
            KFactor::Finite(k) => 1.0 / (k + 1.0),
            KFactor::PureLos => 0.0,
        }
    }

    pub fn is_pure_los(self) -> bool {
        matches!(self, KFactor::PureLos)
    }
}

/// Large-scale gain `C0 (d / D0)^(-alpha_exp)`.
pub fn pathloss(d: f64, cfg: &SystemConfig) -> Result<f64> {
    if !(d > 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("pathloss distance must be positive, got {d}")));
    }
    Ok(cfg.c0 * (d / cfg.d0).powf(-cfg.alpha_exp))
}

/// Distance-dependent K-factor `10^(1.3 - 0.003 d)`.
pub fn rician_k(d: f64) -> Result<f64> {
    if !(d >= 0.0 && d.is_finite()) {
        return Err(Error::invalid(format!("K-factor distance must be nonnegative, got {d}")));
    }
    Ok(10f64.powf(1.3 - 0.003 * d))
}

fn k_from_law(law: KFactorLaw, d: f64) -> Result<KFactor> {
    match law {
        KFactorLaw::Distance => rician_k(d).map(KFactor::Finite),
        KFactorLaw::Fixed(k) => KFactor::finite(k),
        KFactorLaw::PureLos => Ok(KFactor::PureLos),
    }
}

fn check_lambda(lambda: f64) -> Result<()> {
    if lambda > 0.0 && lambda.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("wavelength must be positive, got {lambda}")))
    }
}

fn los_phase(d: f64, lambda: f64) -> C64 {
    // Reduce in cycles first so that whole wavelengths land exactly on 1.
    let cycles = (d / lambda).rem_euclid(1.0);
    C64::from_polar(1.0, -2.0 * PI * cycles)
}

/// `L x M` matrix with entry `(i, j) = exp(-j 2 pi |e_i - a_j| / lambda)`.
pub fn los_matrix(irs_elements: &[Point], bs_antennas: &[Point], lambda: f64) -> Result<CMatrix> {
    check_lambda(lambda)?;
    Ok(CMatrix::from_fn(irs_elements.len(), bs_antennas.len(), |i, j| {
        los_phase(dist(irs_elements[i], bs_antennas[j]), lambda)
    }))
}

/// Length-`L` vector with entry `i = exp(-j 2 pi |e_i - u| / lambda)`.
pub fn los_vector(irs_elements: &[Point], user: Point, lambda: f64) -> Result<CVector> {
    check_lambda(lambda)?;
    Ok(CVector::from_fn(irs_elements.len(), |i, _| {
        los_phase(dist(irs_elements[i], user), lambda)
    }))
}

/// Exponential correlation `[R]_{ij} = r^|i-j|`.
pub fn correlation_block(l: usize, corr_r: f64) -> Result<CMatrix> {
    if !(0.0..1.0).contains(&corr_r) {
        return Err(Error::invalid(format!("correlation coefficient must lie in [0, 1), got {corr_r}")));
    }
    Ok(CMatrix::from_fn(l, l, |i, j| {
        let lag = i.abs_diff(j) as i32;
        C64::new(if lag == 0 { 1.0 } else { corr_r.powi(lag) }, 0.0)
    }))
}

/// Antenna and element positions of one deployment.
#[derive(Debug, Clone, PartialEq)]
pub struct DeploymentGeometry {
    pub bs_antennas: Vec<Point>,
    /// One list of element positions per IRS.
    pub irs_elements: Vec<Vec<Point>>,
    pub user: Point,
}

impl DeploymentGeometry {
    pub fn new(bs_antennas: Vec<Point>, irs_elements: Vec<Vec<Point>>, user: Point) -> Result<Self> {
        if bs_antennas.is_empty() {
            return Err(Error::dim("geometry needs at least one BS antenna"));
        }
        if irs_elements.is_empty() || irs_elements.iter().any(Vec::is_empty) {
            return Err(Error::dim("geometry needs at least one IRS with at least one element"));
        }
        for (n, elems) in irs_elements.iter().enumerate() {
            for i in 0..elems.len() {
                for j in i + 1..elems.len() {
                    if dist(elems[i], elems[j]) == 0.0 {
                        return Err(Error::invalid(format!(
                            "IRS {n} has coincident elements {i} and {j}"
                        )));
                    }
                }
            }
        }
        Ok(DeploymentGeometry { bs_antennas, irs_elements, user })
    }

    fn centroid(points: &[Point]) -> Point {
        let k = points.len() as f64;
        let (x, y) = points.iter().fold((0.0, 0.0), |(x, y), p| (x + p[0], y + p[1]));
        [x / k, y / k]
    }

    pub fn bs_center(&self) -> Point {
        Self::centroid(&self.bs_antennas)
    }

    pub fn irs_center(&self, n: usize) -> Point {
        Self::centroid(&self.irs_elements[n])
    }

    /// BS-to-IRS `n` distance (array centers).
    pub fn d1(&self, n: usize) -> f64 {
        dist(self.bs_center(), self.irs_center(n))
    }

    /// IRS `n`-to-user distance.
    pub fn d2(&self, n: usize) -> f64 {
        dist(self.irs_center(n), self.user)
    }
}

/// Uniform linear array along the y-axis, centered at `center`.
pub fn ula(center: Point, count: usize, spacing: f64) -> Vec<Point> {
    let mid = (count as f64 - 1.0) / 2.0;
    (0..count)
        .map(|k| [center[0], center[1] + (k as f64 - mid) * spacing])
        .collect()
}

/// Draws `count` IRS centers uniformly over the region allowed by the
/// distance bounds: `d_min <= |p - bs| <= d1_max` and
/// `d_min <= |p - user| <= d2_max`, with the BS array centered at the origin.
pub fn sample_irs_positions<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    count: usize,
    rng: &mut R,
) -> Result<Vec<Point>> {
    const MAX_ATTEMPTS: usize = 1_000_000;
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut accepted = None;
        for _ in 0..MAX_ATTEMPTS {
            let radius = cfg.d1_max * rng.random::<f64>().sqrt();
            let angle = 2.0 * PI * rng.random::<f64>();
            let p = [radius * angle.cos(), radius * angle.sin()];
            let d2 = dist(p, cfg.user_position);
            if radius >= cfg.d_min && d2 >= cfg.d_min && d2 <= cfg.d2_max {
                accepted = Some(p);
                break;
            }
        }
        out.push(accepted.ok_or_else(|| {
            Error::config("user_x", "IRS placement region allowed by the distance bounds is empty")
        })?);
    }
    Ok(out)
}

/// Default layout: half-wavelength ULAs for the BS (at the origin) and for
/// each IRS (centered at `irs_centers`).
pub fn ula_geometry(cfg: &SystemConfig, irs_centers: &[Point], elements_per_irs: usize) -> Result<DeploymentGeometry> {
    let spacing = cfg.lambda / 2.0;
    DeploymentGeometry::new(
        ula([0.0, 0.0], cfg.m, spacing),
        irs_centers.iter().map(|&c| ula(c, elements_per_irs, spacing)).collect(),
        cfg.user_position,
    )
}

/// Samples `cfg.n` IRS positions and builds the default ULA layout.
pub fn sample_geometry<R: Rng + ?Sized>(cfg: &SystemConfig, rng: &mut R) -> Result<DeploymentGeometry> {
    let centers = sample_irs_positions(cfg, cfg.n, rng)?;
    ula_geometry(cfg, &centers, cfg.l)
}

/// Per-IRS statistical description.
#[derive(Debug, Clone, PartialEq)]
pub struct IrsLink {
    /// BS-IRS large-scale gain.
    pub beta: f64,
    /// IRS-user large-scale gain.
    pub alpha: f64,
    pub k1: KFactor,
    pub k2: KFactor,
    /// Unweighted BS-IRS LoS matrix (`L x M`, unit-modulus entries).
    pub los_h: CMatrix,
    /// Unweighted IRS-user LoS vector (`L`, unit-modulus entries).
    pub los_g: CVector,
}

/// Deterministic statistics of the stacked channel.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelStatistics {
    pub m: usize,
    pub n: usize,
    pub l: usize,
    pub hbar: CMatrix,
    /// Diagonal of the `NL x NL` IRS-user LoS matrix.
    pub gbar: CVector,
    /// Diagonal of `K1`.
    pub k1: Vec<f64>,
    /// Diagonal of `K2`.
    pub k2: Vec<f64>,
    pub r: CMatrix,
    /// Per-IRS square roots of the correlation blocks.
    pub r_sqrt_blocks: Vec<CMatrix>,
    pub corr_r: f64,
    pub links: Vec<IrsLink>,
}

impl ChannelStatistics {
    /// Assembles the stacked statistics from per-IRS descriptions.
    pub fn from_links(links: Vec<IrsLink>, corr_r: f64) -> Result<Self> {
        let first = links.first().ok_or_else(|| Error::dim("at least one IRS is required"))?;
        let (l, m) = (first.los_h.nrows(), first.los_h.ncols());
        if l == 0 || m == 0 {
            return Err(Error::dim("LoS matrices must be nonempty"));
        }
        for (n, link) in links.iter().enumerate() {
            if link.los_h.shape() != (l, m) || link.los_g.len() != l {
                return Err(Error::dim(format!(
                    "IRS {n}: LoS shapes {:?}/{} differ from {:?}/{}",
                    link.los_h.shape(),
                    link.los_g.len(),
                    (l, m),
                    l
                )));
            }
            if !(link.beta >= 0.0 && link.beta.is_finite() && link.alpha >= 0.0 && link.alpha.is_finite()) {
                return Err(Error::invalid(format!("IRS {n}: gains must be finite and nonnegative")));
            }
        }
        let n = links.len();
        let nl = n * l;
        let block = correlation_block(l, corr_r)?;
        let block_sqrt = matrix_sqrt_psd(&block)?;

        let mut hbar = CMatrix::zeros(nl, m);
        let mut gbar = CVector::zeros(nl);
        let mut k1 = vec![0.0; nl];
        let mut k2 = vec![0.0; nl];
        let mut r = CMatrix::zeros(nl, nl);
        for (idx, link) in links.iter().enumerate() {
            let rows = idx * l..(idx + 1) * l;
            let h_los = (link.beta * link.k1.los_fraction()).sqrt();
            let h_nlos = (link.beta * link.k1.nlos_fraction()).sqrt();
            let g_los = (link.alpha * link.k2.los_fraction()).sqrt();
            let g_nlos = (link.alpha * link.k2.nlos_fraction()).sqrt();
            hbar.view_mut((rows.start, 0), (l, m))
                .copy_from(&(&link.los_h * C64::new(h_los, 0.0)));
            for (i, row) in rows.clone().enumerate() {
                gbar[row] = link.los_g[i].conj() * g_los;
                k1[row] = h_nlos;
                k2[row] = g_nlos;
            }
            r.view_mut((rows.start, rows.start), (l, l)).copy_from(&block);
        }
        Ok(ChannelStatistics {
            m,
            n,
            l,
            hbar,
            gbar,
            k1,
            k2,
            r,
            r_sqrt_blocks: vec![block_sqrt; n],
            corr_r,
            links,
        })
    }

    pub fn nl(&self) -> usize {
        self.n * self.l
    }

    /// `Gbar` as a dense `NL x NL` diagonal matrix.
    pub fn gbar_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&self.gbar)
    }

    pub fn k1_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(self.k1.len(), self.k1.iter().map(|&x| C64::new(x, 0.0))))
    }

    pub fn k2_matrix(&self) -> CMatrix {
        CMatrix::from_diagonal(&CVector::from_iterator(self.k2.len(), self.k2.iter().map(|&x| C64::new(x, 0.0))))
    }

    pub fn betas(&self) -> Vec<f64> {
        self.links.iter().map(|k| k.beta).collect()
    }

    pub fn alphas(&self) -> Vec<f64> {
        self.links.iter().map(|k| k.alpha).collect()
    }

    pub fn k1_factors(&self) -> Vec<KFactor> {
        self.links.iter().map(|k| k.k1).collect()
    }

    pub fn k2_factors(&self) -> Vec<KFactor> {
        self.links.iter().map(|k| k.k2).collect()
    }
}

/// Statistics implied by a configuration and a concrete geometry.
pub fn build_statistics(cfg: &SystemConfig, geometry: &DeploymentGeometry) -> Result<ChannelStatistics> {
    if geometry.bs_antennas.len() != cfg.m {
        return Err(Error::dim(format!(
            "config has M = {} but geometry has {} BS antennas",
            cfg.m,
            geometry.bs_antennas.len()
        )));
    }
    if geometry.irs_elements.len() != cfg.n {
        return Err(Error::dim(format!(
            "config has N = {} but geometry has {} IRSs",
            cfg.n,
            geometry.irs_elements.len()
        )));
    }
    if let Some(bad) = geometry.irs_elements.iter().position(|e| e.len() != cfg.l) {
        return Err(Error::dim(format!(
            "config has L = {} but IRS {bad} has {} elements",
            cfg.l,
            geometry.irs_elements[bad].len()
        )));
    }
    let links = (0..cfg.n)
        .map(|n| {
            let elems = &geometry.irs_elements[n];
            let (d1, d2) = (geometry.d1(n), geometry.d2(n));
            Ok(IrsLink {
                beta: pathloss(d1, cfg)?,
                alpha: pathloss(d2, cfg)?,
                k1: k_from_law(cfg.k1, d1)?,
                k2: k_from_law(cfg.k2, d2)?,
                los_h: los_matrix(elems, &geometry.bs_antennas, cfg.lambda)?,
                los_g: los_vector(elems, geometry.user, cfg.lambda)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    ChannelStatistics::from_links(links, cfg.corr_r)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{hermitian_defect, hermitian_eigen};
    use crate::rng::stream_rng;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn cfg() -> SystemConfig {
        SystemConfig::default()
    }

    #[test]
    fn pathloss_reference_points() {
        let c = cfg();
        assert_relative_eq!(pathloss(1.0, &c).unwrap(), 1e-3, max_relative = 1e-15);
        let c5 = SystemConfig { c0: 0.37, d0: 2.5, ..cfg() };
        assert_relative_eq!(pathloss(2.5, &c5).unwrap(), 0.37, max_relative = 1e-15);
        assert_relative_eq!(pathloss(10.0, &c).unwrap(), 3.1622776601683795e-6, max_relative = 1e-12);
    }

    #[test]
    fn pathloss_rejects_nonpositive_distance() {
        assert!(matches!(pathloss(0.0, &cfg()), Err(Error::InvalidArgument(_))));
        assert!(matches!(pathloss(-1.0, &cfg()), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn rician_k_law() {
        assert_relative_eq!(rician_k(0.0).unwrap(), 19.952623149688797, max_relative = 1e-12);
        assert_relative_eq!(rician_k(10.0).unwrap(), 18.620871366628677, max_relative = 1e-12);
        assert_relative_eq!(rician_k(1.3 / 0.003).unwrap(), 1.0, max_relative = 1e-12);
        assert!(rician_k(-0.5).is_err());
    }

    #[test]
    fn los_phases_at_fractions_of_a_wavelength() {
        let lambda = 0.1;
        let bs = [[0.0, 0.0]];
        let one = los_matrix(&[[lambda, 0.0]], &bs, lambda).unwrap();
        assert!((one[(0, 0)] - C64::new(1.0, 0.0)).norm() < 1e-12);
        let half = los_matrix(&[[lambda / 2.0, 0.0]], &bs, lambda).unwrap();
        assert!((half[(0, 0)] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        let quarter = los_matrix(&[[0.0, lambda / 4.0]], &bs, lambda).unwrap();
        assert!((quarter[(0, 0)] - C64::new(0.0, -1.0)).norm() < 1e-12);

        let g = los_vector(&[[lambda, 0.0], [lambda / 2.0, 0.0]], [0.0, 0.0], lambda).unwrap();
        assert!((g[0] - C64::new(1.0, 0.0)).norm() < 1e-12);
        assert!((g[1] - C64::new(-1.0, 0.0)).norm() < 1e-12);
        assert!(los_vector(&[[0.0, 0.0]], [1.0, 0.0], 0.0).is_err());
    }

    #[test]
    fn correlation_block_cases() {
        assert_eq!(correlation_block(3, 0.0).unwrap(), CMatrix::identity(3, 3));
        let b = correlation_block(2, 0.5).unwrap();
        assert_eq!(b[(0, 1)], C64::new(0.5, 0.0));
        assert_eq!(b[(1, 0)], C64::new(0.5, 0.0));
        let (vals, _) = hermitian_eigen(&correlation_block(3, 0.9).unwrap()).unwrap();
        assert!(*vals.last().unwrap() > 0.0);
        assert!(correlation_block(2, 1.0).is_err());
        assert!(correlation_block(2, -0.1).is_err());
    }

    fn unit_link(k: KFactor) -> IrsLink {
        IrsLink {
            beta: 1.0,
            alpha: 1.0,
            k1: k,
            k2: k,
            los_h: CMatrix::from_element(1, 1, C64::new(1.0, 0.0)),
            los_g: CVector::from_element(1, C64::new(1.0, 0.0)),
        }
    }

    #[test]
    fn single_element_substitution() {
        let s = ChannelStatistics::from_links(vec![unit_link(KFactor::Finite(1.0))], 0.0).unwrap();
        let h = 0.5f64.sqrt();
        assert_relative_eq!(s.hbar[(0, 0)].re, h, max_relative = 1e-15);
        assert_relative_eq!(s.gbar[0].re, h, max_relative = 1e-15);
        assert_relative_eq!(s.k1[0], h, max_relative = 1e-15);
        assert_relative_eq!(s.k2[0], h, max_relative = 1e-15);
    }

    #[test]
    fn pure_los_limit_is_exact() {
        let mut link = unit_link(KFactor::PureLos);
        link.beta = 4.0;
        link.alpha = 9.0;
        let s = ChannelStatistics::from_links(vec![link], 0.0).unwrap();
        assert_eq!(s.k1, vec![0.0]);
        assert_eq!(s.k2, vec![0.0]);
        assert_eq!(s.hbar[(0, 0)], C64::new(2.0, 0.0));
        assert_eq!(s.gbar[0], C64::new(3.0, 0.0));
    }

    #[test]
    fn reference_scene_has_block_diagonal_correlation() {
        let c = SystemConfig { corr_r: 0.6, ..cfg() };
        let g = sample_geometry(&c, &mut stream_rng(5, 0)).unwrap();
        let s = build_statistics(&c, &g).unwrap();
        let l = c.l;
        for i in 0..s.nl() {
            for j in 0..s.nl() {
                if i / l != j / l {
                    assert_eq!(s.r[(i, j)], C64::new(0.0, 0.0));
                } else {
                    assert!(s.r[(i, j)].re > 0.0);
                }
            }
        }
        assert!(hermitian_defect(&s.r) < 1e-12);
        let (vals, _) = hermitian_eigen(&s.r).unwrap();
        assert!(*vals.last().unwrap() >= -1e-10);
        for link in &s.links {
            assert!(link.los_h.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
            assert!(link.los_g.iter().all(|z| (z.norm() - 1.0).abs() < 1e-12));
        }
    }

    #[test]
    fn sampled_geometry_respects_bounds() {
        let c = cfg();
        let mut rng = stream_rng(11, 0);
        for _ in 0..50 {
            let g = sample_geometry(&c, &mut rng).unwrap();
            for n in 0..c.n {
                assert!(g.d1(n) <= c.d1_max && g.d1(n) >= c.d_min);
                assert!(g.d2(n) <= c.d2_max && g.d2(n) >= c.d_min);
            }
        }
    }

    #[test]
    fn build_statistics_rejects_mismatched_geometry() {
        let c = cfg();
        let g = sample_geometry(&c, &mut stream_rng(1, 0)).unwrap();
        let wrong = SystemConfig { l: 8, ..cfg() };
        assert!(matches!(build_statistics(&wrong, &g), Err(Error::Dimension(_))));
        let wrong = SystemConfig { m: 2, ..cfg() };
        assert!(matches!(build_statistics(&wrong, &g), Err(Error::Dimension(_))));
    }

    #[test]
    fn coincident_elements_are_rejected() {
        let err = DeploymentGeometry::new(vec![[0.0, 0.0]], vec![vec![[1.0, 1.0], [1.0, 1.0]]], [5.0, 0.0]);
        assert!(err.is_err());
    }

    #[test]
    fn build_statistics_is_bitwise_deterministic() {
        let c = SystemConfig { corr_r: 0.3, ..cfg() };
        let g = sample_geometry(&c, &mut stream_rng(2, 0)).unwrap();
        assert_eq!(build_statistics(&c, &g).unwrap(), build_statistics(&c, &g).unwrap());
    }

    proptest! {
        #[test]
        fn pathloss_strictly_decreasing(d1 in 0.01f64..100.0, gap in 1e-3f64..50.0) {
            let c = cfg();
            prop_assert!(pathloss(d1, &c).unwrap() > pathloss(d1 + gap, &c).unwrap());
        }

        #[test]
        fn rician_k_strictly_decreasing(d1 in 0.0f64..1000.0, gap in 1e-2f64..100.0) {
            prop_assert!(rician_k(d1).unwrap() > rician_k(d1 + gap).unwrap());
        }

        #[test]
        fn los_entries_unit_modulus(x in -20.0f64..20.0, y in -20.0f64..20.0, lambda in 0.01f64..1.0) {
            let h = los_matrix(&[[x, y], [x + 0.3, y]], &[[0.0, 0.0], [0.0, 0.05]], lambda).unwrap();
            for z in h.iter() {
                prop_assert!((z.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

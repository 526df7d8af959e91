//! System configuration and its `key = value` file format.
//!
//! The file is one key per line with `#` comments; values are numbers,
//! booleans, quoted strings or bracketed lists. Keys mirror the
//! [`SystemConfig`] field names (`M`, `N`, `L`, `P`, `sigma2`, `T`, `rho`,
//! ...). Power-like quantities may instead be given in decibels through a
//! `_db` suffix (`P_db = 20`), converted to linear at parse time.

use std::path::Path;

use crate::error::{Error, Result};
use crate::estimation::estimation_error_variance;
use crate::harness::Method;
use crate::scenario::Point;

/// How the Rician K-factor of one hop is chosen.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KFactorLaw {
    /// `10^(1.3 - 0.003 d)` from the hop distance.
    Distance,
    /// The same finite K for every IRS.
    Fixed(f64),
    /// Pure line of sight (K = infinity, taken as the exact limit).
    PureLos,
}

/// All scalar parameters of one experiment.
#[derive(Debug, Clone, PartialEq)]
pub struct SystemConfig {
    /// BS antennas.
    pub m: usize,
    /// Number of IRSs.
    pub n: usize,
    /// Reflecting elements per IRS.
    pub l: usize,
    /// Transmit power (linear).
    pub p: f64,
    /// Noise variance (linear).
    pub sigma2: f64,
    /// Training length in symbols.
    pub t: u64,
    /// Training SNR (linear).
    pub rho: f64,
    /// Ignore `t`/`rho` and assume error-free CSI.
    pub perfect_csi: bool,
    /// Carrier wavelength in meters.
    pub lambda: f64,
    /// Pathloss at the reference distance (linear).
    pub c0: f64,
    /// Reference distance in meters.
    pub d0: f64,
    /// Pathloss exponent.
    pub alpha_exp: f64,
    /// Exponential correlation coefficient between adjacent IRS elements.
    pub corr_r: f64,
    pub k1: KFactorLaw,
    pub k2: KFactorLaw,
    pub user_position: Point,
    /// Upper bound on the BS-IRS distance used by the geometry sampler.
    pub d1_max: f64,
    /// Upper bound on the IRS-user distance used by the geometry sampler.
    pub d2_max: f64,
    /// Lower bound on both distances used by the geometry sampler.
    pub d_min: f64,
    pub seed: u64,
    /// Monte Carlo trials per evaluated point.
    pub trials: usize,
    /// Phase levels per element for the exhaustive oracle.
    pub grid_levels: usize,
    /// (N, L) pairs evaluated by a sweep.
    pub sweep: Vec<(usize, usize)>,
    pub methods: Vec<Method>,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemConfig {
            m: 9,
            n: 4,
            l: 16,
            p: 100.0,
            sigma2: 1.0,
            t: 10,
            rho: 100.0,
            perfect_csi: false,
            lambda: 0.1,
            c0: 1e-3,
            d0: 1.0,
            alpha_exp: 2.5,
            corr_r: 0.0,
            k1: KFactorLaw::Distance,
            k2: KFactorLaw::Distance,
            user_position: [15.0, 0.0],
            d1_max: 10.0,
            d2_max: 20.0,
            d_min: 1.0,
            seed: 1,
            trials: 1000,
            grid_levels: 16,
            sweep: vec![(1, 64), (4, 16)],
            methods: vec![Method::Statistical, Method::Random],
        }
    }
}

const KEYS: &[&str] = &[
    "M", "N", "L", "P", "P_db", "sigma2", "sigma2_db", "T", "rho", "rho_db", "perfect_csi",
    "lambda", "C0", "C0_db", "D0", "alpha_exp", "corr_r", "K1", "K2", "user_x", "user_y",
    "d1_max", "d2_max", "d_min", "seed", "trials", "grid_levels", "sweep", "methods",
];

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

fn as_f64(key: &str, v: &toml::Value) -> Result<f64> {
    match v {
        toml::Value::Float(x) => Ok(*x),
        toml::Value::Integer(i) => Ok(*i as f64),
        _ => Err(Error::config(key, "expected a number")),
    }
}

fn as_count(key: &str, v: &toml::Value) -> Result<u64> {
    match v {
        toml::Value::Integer(i) if *i >= 0 => Ok(*i as u64),
        toml::Value::Integer(_) => Err(Error::config(key, "must be nonnegative")),
        _ => Err(Error::config(key, "expected an integer")),
    }
}

fn as_k_law(key: &str, v: &toml::Value) -> Result<KFactorLaw> {
    match v {
        toml::Value::String(s) => match s.as_str() {
            "distance" => Ok(KFactorLaw::Distance),
            "los" | "inf" => Ok(KFactorLaw::PureLos),
            other => Err(Error::config(
                key,
                format!("unknown K-factor law {other:?}; expected \"distance\", \"los\" or a number"),
            )),
        },
        _ => {
            let k = as_f64(key, v)?;
            if !(k >= 0.0 && k.is_finite()) {
                return Err(Error::config(key, "K-factor must be finite and nonnegative"));
            }
            Ok(KFactorLaw::Fixed(k))
        }
    }
}

/// Reads a linear value from `key` or its `key_db` variant.
fn linear_or_db(table: &toml::Table, key: &str) -> Result<Option<f64>> {
    let db_key = format!("{key}_db");
    match (table.get(key), table.get(&db_key)) {
        (Some(_), Some(_)) => Err(Error::config(&db_key, format!("conflicts with `{key}`"))),
        (Some(v), None) => as_f64(key, v).map(Some),
        (None, Some(v)) => as_f64(&db_key, v).map(|db| Some(db_to_linear(db))),
        (None, None) => Ok(None),
    }
}

impl SystemConfig {
    /// Parses the `key = value` text, starting from the defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let table: toml::Table = text
            .parse()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))?;
        for key in table.keys() {
            if !KEYS.contains(&key.as_str()) {
                return Err(Error::config(key, "unknown key"));
            }
        }

        let mut cfg = SystemConfig::default();
        let count = |key: &str| -> Result<Option<u64>> {
            table.get(key).map(|v| as_count(key, v)).transpose()
        };
        let number = |key: &str| -> Result<Option<f64>> {
            table.get(key).map(|v| as_f64(key, v)).transpose()
        };

        if let Some(v) = count("M")? {
            cfg.m = v as usize;
        }
        if let Some(v) = count("N")? {
            cfg.n = v as usize;
        }
        if let Some(v) = count("L")? {
            cfg.l = v as usize;
        }
        if let Some(v) = linear_or_db(&table, "P")? {
            cfg.p = v;
        }
        if let Some(v) = linear_or_db(&table, "sigma2")? {
            cfg.sigma2 = v;
        }
        if let Some(v) = count("T")? {
            cfg.t = v;
        }
        if let Some(v) = linear_or_db(&table, "rho")? {
            cfg.rho = v;
        }
        if let Some(v) = table.get("perfect_csi") {
            cfg.perfect_csi = v
                .as_bool()
                .ok_or_else(|| Error::config("perfect_csi", "expected true or false"))?;
        }
        if let Some(v) = number("lambda")? {
            cfg.lambda = v;
        }
        if let Some(v) = linear_or_db(&table, "C0")? {
            cfg.c0 = v;
        }
        if let Some(v) = number("D0")? {
            cfg.d0 = v;
        }
        if let Some(v) = number("alpha_exp")? {
            cfg.alpha_exp = v;
        }
        if let Some(v) = number("corr_r")? {
            cfg.corr_r = v;
        }
        if let Some(v) = table.get("K1") {
            cfg.k1 = as_k_law("K1", v)?;
        }
        if let Some(v) = table.get("K2") {
            cfg.k2 = as_k_law("K2", v)?;
        }
        if let Some(v) = number("user_x")? {
            cfg.user_position[0] = v;
        }
        if let Some(v) = number("user_y")? {
            cfg.user_position[1] = v;
        }
        if let Some(v) = number("d1_max")? {
            cfg.d1_max = v;
        }
        if let Some(v) = number("d2_max")? {
            cfg.d2_max = v;
        }
        if let Some(v) = number("d_min")? {
            cfg.d_min = v;
        }
        if let Some(v) = count("seed")? {
            cfg.seed = v;
        }
        if let Some(v) = count("trials")? {
            cfg.trials = v as usize;
        }
        if let Some(v) = count("grid_levels")? {
            cfg.grid_levels = v as usize;
        }
        if let Some(v) = table.get("sweep") {
            cfg.sweep = parse_sweep(v)?;
        }
        if let Some(v) = table.get("methods") {
            let list = v
                .as_array()
                .ok_or_else(|| Error::config("methods", "expected a list of method names"))?;
            cfg.methods = list
                .iter()
                .map(|m| {
                    m.as_str()
                        .ok_or_else(|| Error::config("methods", "method names must be strings"))
                        .and_then(|s| s.parse::<Method>().map_err(|e| Error::config("methods", e)))
                })
                .collect::<Result<_>>()?;
        }

        cfg.validate()?;
        Ok(cfg)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    /// Checks every range constraint, naming the offending key.
    pub fn validate(&self) -> Result<()> {
        let positive_count = [("M", self.m), ("N", self.n), ("L", self.l), ("trials", self.trials)];
        for (key, v) in positive_count {
            if v == 0 {
                return Err(Error::config(key, "must be at least 1"));
            }
        }
        let positive = [
            ("P", self.p),
            ("sigma2", self.sigma2),
            ("lambda", self.lambda),
            ("C0", self.c0),
            ("D0", self.d0),
            ("d1_max", self.d1_max),
            ("d2_max", self.d2_max),
            ("d_min", self.d_min),
        ];
        for (key, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::config(key, format!("must be positive and finite, got {v}")));
            }
        }
        if !(self.rho >= 0.0 && self.rho.is_finite()) {
            return Err(Error::config("rho", format!("must be nonnegative, got {}", self.rho)));
        }
        if !(self.alpha_exp >= 0.0 && self.alpha_exp.is_finite()) {
            return Err(Error::config("alpha_exp", "must be nonnegative"));
        }
        if !(0.0..1.0).contains(&self.corr_r) {
            return Err(Error::config("corr_r", format!("must lie in [0, 1), got {}", self.corr_r)));
        }
        if self.d_min >= self.d1_max || self.d_min >= self.d2_max {
            return Err(Error::config("d_min", "must be below d1_max and d2_max"));
        }
        if !self.user_position.iter().all(|c| c.is_finite()) {
            return Err(Error::config("user_x", "user position must be finite"));
        }
        if self.grid_levels < 2 {
            return Err(Error::config("grid_levels", "must be at least 2"));
        }
        if self.sweep.iter().any(|&(n, l)| n == 0 || l == 0) {
            return Err(Error::config("sweep", "every (N, L) pair must be positive"));
        }
        if self.methods.is_empty() {
            return Err(Error::config("methods", "at least one method is required"));
        }
        Ok(())
    }

    /// CSI error variance: zero under `perfect_csi`, otherwise `1 / (1 + T rho)`.
    pub fn xi(&self) -> f64 {
        if self.perfect_csi {
            0.0
        } else {
            estimation_error_variance(self.t, self.rho).expect("rho validated nonnegative")
        }
    }

    /// Total reflecting elements `N * L`.
    pub fn total_elements(&self) -> usize {
        self.n * self.l
    }

    /// Copy with a different IRS split.
    pub fn with_split(&self, n: usize, l: usize) -> Self {
        SystemConfig { n, l, ..self.clone() }
    }
}

fn parse_sweep(v: &toml::Value) -> Result<Vec<(usize, usize)>> {
    let err = || Error::config("sweep", "expected a list of [N, L] pairs");
    let list = v.as_array().ok_or_else(err)?;
    list.iter()
        .map(|pair| {
            let pair = pair.as_array().ok_or_else(err)?;
            if pair.len() != 2 {
                return Err(err());
            }
            let n = as_count("sweep", &pair[0])? as usize;
            let l = as_count("sweep", &pair[1])? as usize;
            Ok((n, l))
        })
        .collect()
}

//! Experiment sweeps and the CSV they produce.
//!
//! A sweep walks a list of `(N, L)` splits. IRS centers are drawn once per
//! sweep from a seed derived from `cfg.seed`, and a split with `N` surfaces
//! uses the first `N` centers, so the single-surface scenario sits at the
//! position of the first surface of every distributed scenario. Each
//! scenario gets its Monte Carlo seed from `(cfg.seed, scenario_id)`.

use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use crate::analysis::{build_jq, theorem1_rate};
use crate::beamforming::{random_reflection, siso_optimal_phases, statistical_reflection, ReflectionVector};
use crate::config::SystemConfig;
use crate::error::{Error, Result};
use crate::rng::{derive_seed, stream_rng};
use crate::scenario::{build_statistics, sample_irs_positions, ula_geometry, Point};
use crate::simulator::{grid_search_pencil, monte_carlo_rate, ReflectionPolicy};

/// Reflection design evaluated in a sweep row.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Method {
    Statistical,
    Random,
    SisoOptimal,
    GridOracle,
}

impl Method {
    pub const ALL: [Method; 4] = [Method::Statistical, Method::Random, Method::SisoOptimal, Method::GridOracle];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Statistical => "statistical",
            Method::Random => "random",
            Method::SisoOptimal => "siso_optimal",
            Method::GridOracle => "grid_oracle",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| format!("unknown method `{s}` (expected statistical, random, siso_optimal or grid_oracle)"))
    }
}

/// One CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct RateReport {
    pub scenario_id: String,
    pub n: usize,
    pub l: usize,
    pub m: usize,
    pub xi: f64,
    pub method: Method,
    pub rate_analytical: Option<f64>,
    pub rate_mc: f64,
    pub mc_std_error: f64,
    pub trials: usize,
    pub seed: u64,
}

pub const CSV_HEADER: [&str; 11] = [
    "scenario_id",
    "N",
    "L",
    "M",
    "xi",
    "method",
    "rate_analytical",
    "rate_mc",
    "mc_std_error",
    "trials",
    "seed",
];

pub fn scenario_id(n: usize, l: usize) -> String {
    format!("N{n}-L{l}")
}

/// The reflection vector `method` picks for one scenario.
pub fn design_reflection(
    method: Method,
    cfg: &SystemConfig,
    stats: &crate::scenario::ChannelStatistics,
    sm: &crate::analysis::StatMatrices,
    id: &str,
) -> Result<ReflectionVector> {
    match method {
        Method::Statistical => statistical_reflection(sm),
        Method::Random => {
            let mut rng = stream_rng(derive_seed(cfg.seed, &format!("{id}/random")), 0);
            Ok(random_reflection(stats.nl(), &mut rng))
        }
        Method::SisoOptimal => siso_optimal_phases(stats),
        Method::GridOracle => Ok(grid_search_pencil(sm, cfg.p, cfg.grid_levels)?.reflection),
    }
}

/// IRS centers shared by every split of a sweep.
pub fn sweep_positions(cfg: &SystemConfig, count: usize) -> Result<Vec<Point>> {
    let mut rng = stream_rng(derive_seed(cfg.seed, "geometry"), 0);
    sample_irs_positions(cfg, count, &mut rng)
}

/// Runs every `(N, L)` split against every method, in that nesting order.
pub fn run_sweep(cfg: &SystemConfig, pairs: &[(usize, usize)], methods: &[Method]) -> Result<Vec<RateReport>> {
    cfg.validate()?;
    if let Some(&(n, l)) = pairs.iter().find(|&&(n, l)| n == 0 || l == 0) {
        return Err(Error::config("sweep", format!("split ({n}, {l}) must have positive N and L")));
    }
    let max_n = pairs.iter().map(|p| p.0).max().unwrap_or(0);
    let centers = sweep_positions(cfg, max_n)?;

    let mut reports = Vec::with_capacity(pairs.len() * methods.len());
    for &(n, l) in pairs {
        let scfg = cfg.with_split(n, l);
        let geometry = ula_geometry(&scfg, &centers[..n], l)?;
        let stats = build_statistics(&scfg, &geometry)?;
        let sm = build_jq(&stats, &scfg)?;
        let id = scenario_id(n, l);
        let mc_seed = derive_seed(cfg.seed, &id);
        for &method in methods {
            let v = design_reflection(method, &scfg, &stats, &sm, &id)?;
            let analytical = theorem1_rate(v.as_vector(), &sm, scfg.p)?;
            let mc = monte_carlo_rate(&stats, &ReflectionPolicy::Fixed(v), &scfg, scfg.trials, mc_seed)?;
            reports.push(RateReport {
                scenario_id: id.clone(),
                n,
                l,
                m: scfg.m,
                xi: scfg.xi(),
                method,
                rate_analytical: Some(analytical),
                rate_mc: mc.mean_rate,
                mc_std_error: mc.std_error,
                trials: mc.trials,
                seed: mc_seed,
            });
        }
    }
    Ok(reports)
}

/// Formats `x` with nine significant digits, dropping trailing zeros.
pub fn format_sig9(x: f64) -> String {
    if !x.is_finite() {
        return x.to_string();
    }
    let rounded: f64 = format!("{x:.8e}").parse().expect("scientific literal parses");
    rounded.to_string()
}

/// Writes the header and one line per report.
pub fn emit_csv<W: Write>(reports: &[RateReport], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in reports {
        w.write_record([
            r.scenario_id.clone(),
            r.n.to_string(),
            r.l.to_string(),
            r.m.to_string(),
            format_sig9(r.xi),
            r.method.as_str().to_string(),
            r.rate_analytical.map(format_sig9).unwrap_or_default(),
            format_sig9(r.rate_mc),
            format_sig9(r.mc_std_error),
            r.trials.to_string(),
            r.seed.to_string(),
        ])?;
    }
    w.flush().map_err(|source| Error::Io { path: "<csv output>".into(), source })?;
    Ok(())
}

pub fn write_csv(reports: &[RateReport], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = std::fs::File::create(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    emit_csv(reports, std::io::BufWriter::new(file))
}

fn field<T: FromStr>(record: &csv::StringRecord, i: usize, line: u64) -> Result<T> {
    let raw = record.get(i).unwrap_or("");
    raw.parse()
        .map_err(|_| Error::config(CSV_HEADER[i], format!("line {line}: cannot parse `{raw}`")))
}

/// Parses a CSV written by [`emit_csv`].
pub fn read_csv(path: impl AsRef<Path>) -> Result<Vec<RateReport>> {
    let path = path.as_ref();
    let file = std::fs::File::open(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    let mut rdr = csv::Reader::from_reader(file);
    let header = rdr.headers()?.clone();
    if header.iter().ne(CSV_HEADER) {
        return Err(Error::config("header", format!("unexpected CSV header {:?}", header.iter().collect::<Vec<_>>())));
    }
    let mut out = Vec::new();
    for (k, rec) in rdr.records().enumerate() {
        let rec = rec?;
        let line = k as u64 + 2;
        let analytical = match rec.get(6) {
            Some("") | None => None,
            Some(_) => Some(field(&rec, 6, line)?),
        };
        out.push(RateReport {
            scenario_id: rec.get(0).unwrap_or("").to_string(),
            n: field(&rec, 1, line)?,
            l: field(&rec, 2, line)?,
            m: field(&rec, 3, line)?,
            xi: field(&rec, 4, line)?,
            method: rec
                .get(5)
                .unwrap_or("")
                .parse()
                .map_err(|e: String| Error::config("method", format!("line {line}: {e}")))?,
            rate_analytical: analytical,
            rate_mc: field(&rec, 7, line)?,
            mc_std_error: field(&rec, 8, line)?,
            trials: field(&rec, 9, line)?,
            seed: field(&rec, 10, line)?,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick_cfg() -> SystemConfig {
        SystemConfig { m: 2, trials: 50, ..Default::default() }
    }

    #[test]
    fn method_names_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("optimal".parse::<Method>().is_err());
    }

    #[test]
    fn sig9_formatting() {
        assert_eq!(format_sig9(0.1), "0.1");
        assert_eq!(format_sig9(1.0 / 3.0), "0.333333333");
        assert_eq!(format_sig9(1.0 / 1001.0), "0.000999000999");
        assert_eq!(format_sig9(123456789.4), "123456789");
        assert_eq!(format_sig9(0.0), "0");
    }

    #[test]
    fn sweep_cardinality_and_ids() {
        let r = run_sweep(&quick_cfg(), &[(1, 8), (4, 2)], &[Method::Statistical, Method::Random]).unwrap();
        assert_eq!(r.len(), 4);
        assert_eq!(r[0].scenario_id, "N1-L8");
        assert_eq!(r[3].scenario_id, "N4-L2");
        assert_eq!(r[3].method, Method::Random);
        assert!(r.iter().all(|x| x.trials == 50 && x.rate_mc >= 0.0));
    }

    #[test]
    fn bad_split_rejected() {
        let e = run_sweep(&quick_cfg(), &[(0, 4)], &[Method::Statistical]).unwrap_err();
        assert!(e.to_string().contains("sweep"));
    }

    #[test]
    fn adding_a_scenario_keeps_existing_rows() {
        let cfg = quick_cfg();
        let a = run_sweep(&cfg, &[(2, 4)], &[Method::Statistical]).unwrap();
        let b = run_sweep(&cfg, &[(1, 8), (2, 4)], &[Method::Statistical]).unwrap();
        assert_eq!(a[0], b[1]);
    }

    #[test]
    fn empty_report_list_is_header_only() {
        let mut buf = Vec::new();
        emit_csv(&[], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{}\n", CSV_HEADER.join(",")));
    }

    #[test]
    fn csv_round_trip() {
        let r = run_sweep(&quick_cfg(), &[(2, 2)], &[Method::Statistical, Method::GridOracle]).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("rows.csv");
        write_csv(&r, &path).unwrap();
        let text = std::fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        let back = read_csv(&path).unwrap();
        assert_eq!(back.len(), r.len());
        for (a, b) in r.iter().zip(&back) {
            assert_eq!((a.method, a.n, a.l, a.seed, &a.scenario_id), (b.method, b.n, b.l, b.seed, &b.scenario_id));
            for (x, y) in [(a.rate_mc, b.rate_mc), (a.xi, b.xi), (a.rate_analytical.unwrap(), b.rate_analytical.unwrap())] {
                assert!((x - y).abs() <= 5e-9 * x.abs(), "{x} vs {y}");
            }
        }
    }
}

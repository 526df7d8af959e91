use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use irs_link::analysis::{build_jq, theorem1_rate};
use irs_link::beamforming::{solve_statistical_reflection_with, statistical_reflection, EigenMethod};
use irs_link::channel::sample_channels;
use irs_link::harness::{design_reflection, run_sweep, scenario_id, sweep_positions, write_csv, emit_csv};
use irs_link::linalg::hermitian_defect;
use irs_link::rng::stream_rng;
use irs_link::scenario::{build_statistics, ula_geometry};
use irs_link::simulator::grid_search_pencil;
use irs_link::{ChannelStatistics, SystemConfig};

#[derive(Parser)]
#[command(name = "irs-sim", version, about = "Distributed-IRS MISO link simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// `key = value` config file; defaults apply when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output file (CSV for `sweep`); standard output when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check the config and print invariant summaries for every sweep split.
    Validate(Common),
    /// Run the sweep and write the CSV.
    Sweep(Common),
    /// Closed-form rate of each configured method at the config's (N, L).
    Rate(Common),
    /// Compare the statistical design with the exhaustive phase grid.
    Oracle(Common),
}

fn load(c: &Common) -> irs_link::Result<SystemConfig> {
    let mut cfg = match &c.config {
        Some(p) => SystemConfig::from_file(p)?,
        None => SystemConfig::default(),
    };
    if let Some(s) = c.seed {
        cfg.seed = s;
    }
    if let Some(t) = c.trials {
        cfg.trials = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn scenario(cfg: &SystemConfig) -> irs_link::Result<ChannelStatistics> {
    let centers = sweep_positions(cfg, cfg.n)?;
    build_statistics(cfg, &ula_geometry(cfg, &centers, cfg.l)?)
}

fn emit(out: &Option<PathBuf>, text: String) -> irs_link::Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).map_err(|source| irs_link::Error::Io { path: p.display().to_string(), source }),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn validate(c: &Common) -> irs_link::Result<()> {
    let cfg = load(c)?;
    let mut text = format!("config ok: M={} P={} sigma2={} xi={:.6e} seed={}\n", cfg.m, cfg.p, cfg.sigma2, cfg.xi(), cfg.seed);
    let max_n = cfg.sweep.iter().map(|p| p.0).max().unwrap_or(0);
    let centers = sweep_positions(&cfg, max_n)?;
    for &(n, l) in &cfg.sweep {
        let scfg = cfg.with_split(n, l);
        let stats = build_statistics(&scfg, &ula_geometry(&scfg, &centers[..n], l)?)?;
        let sm = build_jq(&stats, &scfg)?;
        let real = sample_channels(&stats, &mut stream_rng(cfg.seed, 0));
        let recon = (&real.z - real.g_diag_matrix() * &real.h).norm();
        let dense = solve_statistical_reflection_with(&sm, EigenMethod::Dense)?;
        let power = solve_statistical_reflection_with(&sm, EigenMethod::PowerIteration)?;
        let align = dense.vector.dotc(&power.vector).norm();
        let rate = theorem1_rate(statistical_reflection(&sm)?.as_vector(), &sm, scfg.p)?;
        text += &format!(
            "{}: reconstruction {recon:.1e}, J hermitian defect {:.1e}, Q hermitian defect {:.1e}, dense/power alignment {align:.12}, statistical rate {rate:.6}\n",
            scenario_id(n, l),
            hermitian_defect(&sm.j_eff),
            hermitian_defect(&sm.q_eff),
        );
    }
    emit(&c.out, text)
}

fn sweep(c: &Common) -> irs_link::Result<()> {
    let cfg = load(c)?;
    let reports = run_sweep(&cfg, &cfg.sweep, &cfg.methods)?;
    match &c.out {
        Some(p) => write_csv(&reports, p),
        None => emit_csv(&reports, std::io::stdout().lock()),
    }
}

fn rate(c: &Common) -> irs_link::Result<()> {
    let cfg = load(c)?;
    let stats = scenario(&cfg)?;
    let sm = build_jq(&stats, &cfg)?;
    let id = scenario_id(cfg.n, cfg.l);
    let mut text = String::new();
    for &method in &cfg.methods {
        let v = design_reflection(method, &cfg, &stats, &sm, &id)?;
        text += &format!("{id} {method}: {:.9} bits/s/Hz\n", theorem1_rate(v.as_vector(), &sm, cfg.p)?);
    }
    emit(&c.out, text)
}

fn oracle(c: &Common) -> irs_link::Result<()> {
    let cfg = load(c)?;
    let stats = scenario(&cfg)?;
    let sm = build_jq(&stats, &cfg)?;
    let grid = grid_search_pencil(&sm, cfg.p, cfg.grid_levels)?;
    let solver = theorem1_rate(statistical_reflection(&sm)?.as_vector(), &sm, cfg.p)?;
    emit(
        &c.out,
        format!(
            "{} levels={} tuples={}\ngrid optimum {:.9}\nstatistical  {:.9}\nratio        {:.6}\n",
            scenario_id(cfg.n, cfg.l),
            cfg.grid_levels,
            grid.evaluated,
            grid.rate,
            solver,
            solver / grid.rate
        ),
    )
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Validate(c) => validate(c),
        Command::Sweep(c) => sweep(c),
        Command::Rate(c) => rate(c),
        Command::Oracle(c) => oracle(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("irs-sim: {e}");
            ExitCode::FAILURE
        }
    }
}

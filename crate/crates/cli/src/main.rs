//! Batch experiment driver: sweeps, validation reports, and admission
//! statistics over the semi-grant-free transmission schemes, written
//! as CSV for downstream plotting.

mod config;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use config::{db_to_linear, RawSettings, Settings};
use sgf_core::analytic::{outage_diversity, outage_exact, outage_highsnr, outage_quadrature};
use sgf_core::montecarlo::{estimate_admission, estimate_ergodic_rate, estimate_outage};
use sgf_core::params::{derive_constants, DerivedConstants, SystemParams};
use sgf_core::scheme::Scheme;
use sgf_core::Error;

// --- command line ---

#[derive(Parser)]
#[command(
    name = "sgf",
    version,
    about = "Semi-grant-free NOMA uplink experiments: outage, ergodic rate, admission"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sweep a power grid and emit every metric per scheme as CSV.
    Sweep(RunArgs),
    /// Cross-check simulation against the analytic outage values.
    Validate(RunArgs),
    /// Estimate which grant-free user the proposed scheme admits.
    Admission(RunArgs),
    /// Sweep a power grid and emit only the ergodic rate rows.
    Ergodic(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    /// Grant-based power in dB (for --p0-policy fixed).
    #[arg(long)]
    p0_db: Option<f64>,
    /// Single grant-free power point in dB.
    #[arg(long)]
    ps_db: Option<f64>,
    /// Grant-free power grid in dB, start:stop:step inclusive.
    #[arg(long)]
    ps_sweep: Option<String>,
    /// Grant-based power policy: equal, fixed, or ratio:<x> for p0 = x*ps.
    #[arg(long)]
    p0_policy: Option<String>,
    /// Grant-based target rate in bits per channel use.
    #[arg(long)]
    r0: Option<f64>,
    /// Grant-free target rate in bits per channel use.
    #[arg(long)]
    rs: Option<f64>,
    /// Comma-separated grant-free user counts.
    #[arg(long)]
    m_users: Option<String>,
    /// Comma-separated schemes: proposed, scheme_i, scheme_ii, oma.
    #[arg(long)]
    schemes: Option<String>,
    /// Monte Carlo trials per estimate.
    #[arg(long)]
    trials: Option<u64>,
    /// Seed for the reproducible trial stream.
    #[arg(long)]
    seed: Option<u64>,
    /// Output file path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Config file with key=value lines; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Absolute agreement tolerance for validate verdicts.
    #[arg(long)]
    tolerance: Option<f64>,
}

impl RunArgs {
    fn settings(&self) -> Result<Settings> {
        let cli = RawSettings {
            ps_db: self.ps_db,
            ps_sweep: self.ps_sweep.as_deref().map(config::parse_sweep).transpose()?,
            p0_db: self.p0_db,
            p0_policy: self
                .p0_policy
                .as_deref()
                .map(config::parse_policy)
                .transpose()?,
            r0: self.r0,
            rs: self.rs,
            m_users: self
                .m_users
                .as_deref()
                .map(config::parse_m_users)
                .transpose()?,
            schemes: self
                .schemes
                .as_deref()
                .map(config::parse_schemes)
                .transpose()?,
            trials: self.trials,
            seed: self.seed,
            out: self.out.clone(),
            tolerance: self.tolerance,
        };
        let file = self
            .config
            .as_deref()
            .map(config::load_file)
            .transpose()?;
        Settings::resolve(cli, file)
    }
}

fn main() -> Result<()> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep(args) => cmd_sweep(&args.settings()?, Metric::ALL),
        Command::Validate(args) => cmd_validate(&args.settings()?),
        Command::Admission(args) => cmd_admission(&args.settings()?),
        Command::Ergodic(args) => cmd_sweep(&args.settings()?, &[Metric::ErgodicMc]),
    }
}

// --- metrics and cells ---

#[derive(Debug, Clone, Copy, PartialEq)]
enum Metric {
    OutageMc,
    OutageExact,
    OutageHighsnr,
    OutageDiversity,
    ErgodicMc,
}

impl Metric {
    const ALL: &'static [Metric] = &[
        Metric::OutageMc,
        Metric::OutageExact,
        Metric::OutageHighsnr,
        Metric::OutageDiversity,
        Metric::ErgodicMc,
    ];

    fn name(self) -> &'static str {
        match self {
            Metric::OutageMc => "outage_mc",
            Metric::OutageExact => "outage_exact",
            Metric::OutageHighsnr => "outage_highsnr",
            Metric::OutageDiversity => "outage_diversity",
            Metric::ErgodicMc => "ergodic_mc",
        }
    }
}

/// One CSV value cell: a number, or the domain flag for analytic
/// metrics evaluated outside their validity region.
#[derive(Debug, Clone, Copy)]
enum Cell {
    Value(f64),
    NaDomain,
}

impl fmt::Display for Cell {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Cell::Value(v) => write!(f, "{v}"),
            Cell::NaDomain => write!(f, "NA_DOMAIN"),
        }
    }
}

/// Exact outage with the documented quadrature fallback for user
/// counts beyond the closed form's supported range.
fn exact_or_fallback(
    params: &SystemParams,
    consts: &DerivedConstants,
) -> Result<Cell> {
    match outage_exact(params, consts) {
        Ok(breakdown) => Ok(Cell::Value(breakdown.total)),
        Err(Error::OutsideDomain(_)) => Ok(Cell::NaDomain),
        Err(Error::UnsupportedUserCount(m)) => {
            eprintln!(
                "warning: exact form supports at most 12 users; M={m} row carries the \
                 quadrature value"
            );
            Ok(Cell::Value(outage_quadrature(params, consts)?))
        }
        Err(Error::Numerical(why)) => {
            eprintln!("warning: exact form unusable ({why}); row carries the quadrature value");
            Ok(Cell::Value(outage_quadrature(params, consts)?))
        }
        Err(other) => Err(other.into()),
    }
}

fn highsnr_cell(params: &SystemParams, consts: &DerivedConstants) -> Result<Cell> {
    match outage_highsnr(params, consts) {
        Ok(value) => Ok(Cell::Value(value)),
        Err(Error::OutsideDomain(_)) => Ok(Cell::NaDomain),
        Err(other) => Err(other.into()),
    }
}

// --- sweep / ergodic ---

fn cmd_sweep(settings: &Settings, metrics: &[Metric]) -> Result<()> {
    let mut csv = String::from(
        "snr_db,p0_db,ps_db,m_users,r0,rs,scheme,metric,value,stderr,trials,seed\n",
    );
    for &ps_db in &settings.ps_db {
        let p0_db = settings.p0_db_for(ps_db);
        for &m_users in &settings.m_users {
            let params = SystemParams::new(
                db_to_linear(p0_db),
                db_to_linear(ps_db),
                settings.r0,
                settings.rs,
                m_users,
            )?;
            let consts = derive_constants(&params);
            for &scheme in &settings.schemes {
                for &metric in metrics {
                    let (value, stderr) = match metric {
                        Metric::OutageMc => {
                            let est =
                                estimate_outage(scheme, &params, settings.trials, settings.seed)?;
                            (Cell::Value(est.value), Some(est.stderr))
                        }
                        Metric::ErgodicMc => {
                            let est = estimate_ergodic_rate(
                                scheme,
                                &params,
                                settings.trials,
                                settings.seed,
                            )?;
                            (Cell::Value(est.value), Some(est.stderr))
                        }
                        Metric::OutageExact if scheme == Scheme::Proposed => {
                            (exact_or_fallback(&params, &consts)?, None)
                        }
                        Metric::OutageHighsnr if scheme == Scheme::Proposed => {
                            (highsnr_cell(&params, &consts)?, None)
                        }
                        Metric::OutageDiversity if scheme == Scheme::Proposed => {
                            if consts.floor_regime() {
                                (Cell::NaDomain, None)
                            } else {
                                (Cell::Value(outage_diversity(&params, &consts)), None)
                            }
                        }
                        // Closed forms exist only for the proposed scheme.
                        _ => (Cell::NaDomain, None),
                    };
                    let stderr = stderr.map(|s| s.to_string()).unwrap_or_default();
                    csv.push_str(&format!(
                        "{ps_db},{p0_db},{ps_db},{m_users},{r0},{rs},{scheme},{metric},{value},{stderr},{trials},{seed}\n",
                        r0 = settings.r0,
                        rs = settings.rs,
                        scheme = scheme.name(),
                        metric = metric.name(),
                        trials = settings.trials,
                        seed = settings.seed,
                    ));
                }
            }
        }
    }
    write_text(settings.out.as_deref(), &csv)
}

// --- validate ---

fn cmd_validate(settings: &Settings) -> Result<()> {
    let mut report = String::from(
        "snr_db,p0_db,m_users,outage_mc,mc_stderr,outage_exact,outage_quadrature,\
         outage_highsnr,outage_diversity,exact_vs_quadrature,mc_vs_exact\n",
    );
    let mut failures = 0u32;
    for &ps_db in &settings.ps_db {
        let p0_db = settings.p0_db_for(ps_db);
        for &m_users in &settings.m_users {
            let params = SystemParams::new(
                db_to_linear(p0_db),
                db_to_linear(ps_db),
                settings.r0,
                settings.rs,
                m_users,
            )?;
            let consts = derive_constants(&params);
            let mc = estimate_outage(Scheme::Proposed, &params, settings.trials, settings.seed)?;
            let quad = outage_quadrature(&params, &consts)?;
            let exact = match outage_exact(&params, &consts) {
                Ok(breakdown) => Cell::Value(breakdown.total),
                Err(Error::OutsideDomain(_)) | Err(Error::UnsupportedUserCount(_)) => {
                    Cell::NaDomain
                }
                Err(other) => return Err(other.into()),
            };
            let highsnr = highsnr_cell(&params, &consts)?;
            let diversity = if consts.floor_regime() {
                Cell::NaDomain
            } else {
                Cell::Value(outage_diversity(&params, &consts))
            };

            let (verdict_eq, verdict_mc) = match exact {
                Cell::NaDomain => ("skip", "skip"),
                Cell::Value(exact) => {
                    let eq = if (exact - quad).abs() < settings.tolerance {
                        "pass"
                    } else {
                        "fail"
                    };
                    let sigma = (exact * (1.0 - exact) / settings.trials as f64).sqrt();
                    let mc_ok = if (mc.value - exact).abs() <= 3.0 * sigma {
                        "pass"
                    } else {
                        "fail"
                    };
                    (eq, mc_ok)
                }
            };
            failures += u32::from(verdict_eq == "fail") + u32::from(verdict_mc == "fail");
            report.push_str(&format!(
                "{ps_db},{p0_db},{m_users},{},{},{exact},{quad},{highsnr},{diversity},{verdict_eq},{verdict_mc}\n",
                mc.value, mc.stderr,
            ));
        }
    }
    write_text(settings.out.as_deref(), &report)?;
    if failures > 0 {
        bail!("validation failed: {failures} verdicts did not pass");
    }
    Ok(())
}

// --- admission ---

fn cmd_admission(settings: &Settings) -> Result<()> {
    let mut csv =
        String::from("snr_db,p0_db,m_users,user_index,prob,stderr,trials,seed\n");
    for &ps_db in &settings.ps_db {
        let p0_db = settings.p0_db_for(ps_db);
        for &m_users in &settings.m_users {
            let params = SystemParams::new(
                db_to_linear(p0_db),
                db_to_linear(ps_db),
                settings.r0,
                settings.rs,
                m_users,
            )?;
            let dist = estimate_admission(&params, settings.trials, settings.seed)?;
            for user_index in 0..m_users {
                csv.push_str(&format!(
                    "{ps_db},{p0_db},{m_users},{user_index},{},{},{},{}\n",
                    dist.probs[user_index], dist.stderrs[user_index], settings.trials,
                    settings.seed,
                ));
            }
        }
    }
    write_text(settings.out.as_deref(), &csv)
}

// --- output ---

fn write_text(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => fs::write(path, content)
            .with_context(|| format!("cannot write output file {}", path.display())),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

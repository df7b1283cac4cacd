//! Settings assembly: command-line flags override config-file entries,
//! which override the built-in defaults.

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use sgf_core::scheme::Scheme;

// --- raw layers ---

/// How the grant-based power follows the swept grant-free power.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PowerPolicy {
    /// p0 = ps at every grid point.
    Equal,
    /// p0 pinned to the `p0_db` setting.
    Fixed,
    /// p0 = factor * ps (factor in linear scale).
    Ratio(f64),
}

/// One settings layer with every knob still optional.
#[derive(Debug, Clone, Default)]
pub struct RawSettings {
    pub ps_db: Option<f64>,
    pub ps_sweep: Option<(f64, f64, f64)>,
    pub p0_db: Option<f64>,
    pub p0_policy: Option<PowerPolicy>,
    pub r0: Option<f64>,
    pub rs: Option<f64>,
    pub m_users: Option<Vec<usize>>,
    pub schemes: Option<Vec<Scheme>>,
    pub trials: Option<u64>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub tolerance: Option<f64>,
}

impl RawSettings {
    /// Field-wise overlay; `self` wins over `under`. The two ways of
    /// giving the power grid travel together so a flag-level grid
    /// fully replaces a file-level one instead of mixing with it.
    fn over(self, under: RawSettings) -> RawSettings {
        let (ps_db, ps_sweep) = if self.ps_db.is_some() || self.ps_sweep.is_some() {
            (self.ps_db, self.ps_sweep)
        } else {
            (under.ps_db, under.ps_sweep)
        };
        RawSettings {
            ps_db,
            ps_sweep,
            p0_db: self.p0_db.or(under.p0_db),
            p0_policy: self.p0_policy.or(under.p0_policy),
            r0: self.r0.or(under.r0),
            rs: self.rs.or(under.rs),
            m_users: self.m_users.or(under.m_users),
            schemes: self.schemes.or(under.schemes),
            trials: self.trials.or(under.trials),
            seed: self.seed.or(under.seed),
            out: self.out.or(under.out),
            tolerance: self.tolerance.or(under.tolerance),
        }
    }
}

// --- parsing helpers ---

pub fn parse_policy(token: &str) -> Result<PowerPolicy> {
    let token = token.trim();
    if token.eq_ignore_ascii_case("equal") {
        return Ok(PowerPolicy::Equal);
    }
    if token.eq_ignore_ascii_case("fixed") {
        return Ok(PowerPolicy::Fixed);
    }
    if let Some(rest) = token
        .strip_prefix("ratio:")
        .or_else(|| token.strip_prefix("RATIO:"))
    {
        let factor: f64 = rest
            .trim()
            .parse()
            .with_context(|| format!("bad ratio factor `{rest}`"))?;
        if !(factor > 0.0 && factor.is_finite()) {
            bail!("ratio factor must be positive and finite, got {factor}");
        }
        return Ok(PowerPolicy::Ratio(factor));
    }
    bail!("unknown power policy `{token}` (expected equal, fixed, or ratio:<x>)");
}

pub fn parse_sweep(token: &str) -> Result<(f64, f64, f64)> {
    let parts: Vec<&str> = token.split(':').collect();
    if parts.len() != 3 {
        bail!("sweep must be start:stop:step, got `{token}`");
    }
    let nums: Vec<f64> = parts
        .iter()
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .with_context(|| format!("bad sweep number `{p}`"))
        })
        .collect::<Result<_>>()?;
    Ok((nums[0], nums[1], nums[2]))
}

pub fn parse_m_users(token: &str) -> Result<Vec<usize>> {
    let list: Vec<usize> = token
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| {
            p.trim()
                .parse::<usize>()
                .with_context(|| format!("bad user count `{p}`"))
        })
        .collect::<Result<_>>()?;
    if list.is_empty() {
        bail!("user count list is empty");
    }
    if let Some(&zero) = list.iter().find(|&&m| m == 0) {
        bail!("user counts must be at least 1, got {zero}");
    }
    Ok(list)
}

pub fn parse_scheme(token: &str) -> Result<Scheme> {
    let folded: String = token
        .trim()
        .chars()
        .filter(|c| *c != '_' && *c != '-')
        .collect::<String>()
        .to_ascii_lowercase();
    match folded.as_str() {
        "proposed" => Ok(Scheme::Proposed),
        "schemei" => Ok(Scheme::SchemeI),
        "schemeii" => Ok(Scheme::SchemeII),
        "oma" | "omabaseline" => Ok(Scheme::OmaBaseline),
        _ => bail!(
            "unknown scheme `{token}` (expected proposed, scheme_i, scheme_ii, or oma)"
        ),
    }
}

pub fn parse_schemes(token: &str) -> Result<Vec<Scheme>> {
    let list: Vec<Scheme> = token
        .split(',')
        .filter(|p| !p.trim().is_empty())
        .map(parse_scheme)
        .collect::<Result<_>>()?;
    if list.is_empty() {
        bail!("scheme list is empty");
    }
    Ok(list)
}

// --- config file ---

pub fn load_file(path: &Path) -> Result<RawSettings> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read config file {}", path.display()))?;
    let mut raw = RawSettings::default();
    let mut seen: Vec<String> = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            bail!(
                "{}:{}: expected key=value, got `{line}`",
                path.display(),
                lineno + 1
            );
        };
        let key = key.trim();
        let value = value.trim();
        if seen.iter().any(|k| k == key) {
            bail!("{}:{}: duplicate key `{key}`", path.display(), lineno + 1);
        }
        seen.push(key.to_string());
        let parse_f64 = || -> Result<f64> {
            value
                .parse::<f64>()
                .with_context(|| format!("{}:{}: bad number `{value}`", path.display(), lineno + 1))
        };
        match key {
            "ps_db" => raw.ps_db = Some(parse_f64()?),
            "ps_sweep" => raw.ps_sweep = Some(parse_sweep(value)?),
            "p0_db" => raw.p0_db = Some(parse_f64()?),
            "p0_policy" => raw.p0_policy = Some(parse_policy(value)?),
            "r0" => raw.r0 = Some(parse_f64()?),
            "rs" => raw.rs = Some(parse_f64()?),
            "m_users" => raw.m_users = Some(parse_m_users(value)?),
            "schemes" => raw.schemes = Some(parse_schemes(value)?),
            "trials" => {
                raw.trials = Some(value.parse::<u64>().with_context(|| {
                    format!("{}:{}: bad trial count `{value}`", path.display(), lineno + 1)
                })?)
            }
            "seed" => {
                raw.seed = Some(value.parse::<u64>().with_context(|| {
                    format!("{}:{}: bad seed `{value}`", path.display(), lineno + 1)
                })?)
            }
            "out" => raw.out = Some(PathBuf::from(value)),
            "tolerance" => raw.tolerance = Some(parse_f64()?),
            _ => bail!(
                "{}:{}: unknown config key `{key}`",
                path.display(),
                lineno + 1
            ),
        }
    }
    Ok(raw)
}

// --- final settings ---

/// Fully resolved settings with every knob decided.
#[derive(Debug, Clone)]
pub struct Settings {
    pub ps_db: Vec<f64>,
    pub policy: PowerPolicy,
    pub p0_db: Option<f64>,
    pub r0: f64,
    pub rs: f64,
    pub m_users: Vec<usize>,
    pub schemes: Vec<Scheme>,
    pub trials: u64,
    pub seed: u64,
    pub out: Option<PathBuf>,
    pub tolerance: f64,
}

impl Settings {
    pub fn resolve(cli: RawSettings, file: Option<RawSettings>) -> Result<Settings> {
        let merged = match file {
            Some(file) => cli.over(file),
            None => cli,
        };

        let ps_db = match (merged.ps_db, merged.ps_sweep) {
            (Some(_), Some(_)) => {
                bail!("give either a single ps point or a sweep, not both")
            }
            (Some(db), None) => vec![db],
            (None, Some((start, stop, step))) => sweep_points(start, stop, step)?,
            (None, None) => bail!("no power grid: set ps_db or ps_sweep"),
        };

        let policy = merged.p0_policy.unwrap_or(PowerPolicy::Equal);
        if policy == PowerPolicy::Fixed && merged.p0_db.is_none() {
            bail!("p0_policy fixed needs p0_db");
        }

        let trials = merged.trials.unwrap_or(10_000_000);
        if trials == 0 {
            bail!("trials must be at least 1");
        }

        Ok(Settings {
            ps_db,
            policy,
            p0_db: merged.p0_db,
            r0: merged.r0.unwrap_or(1.0),
            rs: merged.rs.unwrap_or(0.9),
            m_users: merged.m_users.unwrap_or_else(|| vec![1]),
            schemes: merged.schemes.unwrap_or_else(|| {
                vec![Scheme::Proposed, Scheme::SchemeI, Scheme::SchemeII]
            }),
            trials,
            seed: merged.seed.unwrap_or(1),
            out: merged.out,
            tolerance: merged.tolerance.unwrap_or(1e-8),
        })
    }

    /// Grant-based power in dB at one grid point.
    pub fn p0_db_for(&self, ps_db: f64) -> f64 {
        match self.policy {
            PowerPolicy::Equal => ps_db,
            PowerPolicy::Fixed => self.p0_db.expect("checked at resolve time"),
            PowerPolicy::Ratio(factor) => ps_db + 10.0 * factor.log10(),
        }
    }
}

fn sweep_points(start: f64, stop: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0 && step.is_finite()) {
        bail!("sweep step must be positive, got {step}");
    }
    if stop < start {
        bail!("sweep stop {stop} is below start {start}");
    }
    let mut points = Vec::new();
    let mut k = 0u32;
    loop {
        let value = start + f64::from(k) * step;
        if value > stop + step * 1e-9 {
            break;
        }
        points.push(value);
        k += 1;
    }
    Ok(points)
}

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

// --- tests ---

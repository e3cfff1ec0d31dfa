//! Config-file parsing and flag merging. The file format is flat
//! `key = value` text grouped under `[model]`, `[sweep]`, `[phase]`, and
//! `[constants]` section headers, UTF-8 encoded, with `#` starting a
//! comment anywhere on a line. Every key is also exposed as a long flag on
//! the matching subcommand; a flag wins over the file value, and anything
//! left unset falls back to the built-in defaults.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use clap::Args;
use dqd_core::model::{ModelSpec, Topology};
use dqd_core::pipeline::SolveOptions;
use dqd_core::scales::ScaleConstants;

use crate::fail::Failure;

/// Dot-lead coupling used when none is given: `t0 / sqrt(20)`.
pub fn default_t_prime() -> f64 {
    0.05f64.sqrt()
}

/// Parsed config file; every field optional so flags and defaults can
/// fill the gaps.
#[derive(Debug, Default)]
pub struct FileConfig {
    pub model: ModelKeys,
    pub sweep: SweepKeys,
    pub phase: PhaseKeys,
    pub constants: ConstantKeys,
}

#[derive(Debug, Default)]
pub struct ModelKeys {
    pub topology: Option<Topology>,
    pub leads: Option<usize>,
    pub t: Option<f64>,
    pub t_prime: Option<f64>,
    pub t0: Option<f64>,
    pub u: Option<f64>,
    pub eps_d: Option<f64>,
    pub b: Option<f64>,
    pub temperature: Option<f64>,
}

#[derive(Debug, Default)]
pub struct SweepKeys {
    pub axis: Option<Axis>,
    pub min: Option<f64>,
    pub max: Option<f64>,
    pub count: Option<usize>,
    pub spacing: Option<Spacing>,
}

#[derive(Debug, Default)]
pub struct PhaseKeys {
    pub u_over_gamma: Option<Vec<f64>>,
    pub t_lo: Option<f64>,
    pub t_hi: Option<f64>,
}

#[derive(Debug, Default)]
pub struct ConstantKeys {
    pub d1: Option<f64>,
    pub d2: Option<f64>,
    pub c: Option<f64>,
}

/// Which model parameter a sweep varies.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Axis {
    Hopping,
    DotLead,
    Repulsion,
    Temperature,
    Field,
}

/// Grid spacing of a sweep.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum Spacing {
    Linear,
    Log,
}

pub fn load_config(path: &Path) -> Result<FileConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| {
        Failure::config(format!("cannot read config {}: {e}", path.display()))
    })?;
    parse_config(&text).map_err(|msg| Failure::config(format!("{}: {msg}", path.display())))
}

pub fn load_or_default(path: &Option<PathBuf>) -> Result<FileConfig, Failure> {
    match path {
        Some(p) => load_config(p),
        None => Ok(FileConfig::default()),
    }
}

fn parse_config(text: &str) -> Result<FileConfig, String> {
    let mut cfg = FileConfig::default();
    let mut section: Option<&'static str> = None;
    let mut seen: HashSet<(&'static str, String)> = HashSet::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or(format!("line {lineno}: unterminated section header `{line}`"))?
                .trim();
            section = Some(match name {
                "model" => "model",
                "sweep" => "sweep",
                "phase" => "phase",
                "constants" => "constants",
                other => return Err(format!("line {lineno}: unknown section [{other}]")),
            });
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or(format!("line {lineno}: expected `key = value`, got `{line}`"))?;
        let key = key.trim();
        let value = value.trim();
        let sec = section
            .ok_or(format!("line {lineno}: key `{key}` appears before any [section] header"))?;
        if !seen.insert((sec, key.to_string())) {
            return Err(format!("line {lineno}: duplicate key `{key}` in [{sec}]"));
        }
        apply_key(&mut cfg, sec, key, value).map_err(|msg| format!("line {lineno}: {msg}"))?;
    }
    Ok(cfg)
}

fn apply_key(cfg: &mut FileConfig, sec: &str, key: &str, value: &str) -> Result<(), String> {
    match sec {
        "model" => match key {
            "topology" => {
                cfg.model.topology =
                    Some(parse_topology(value).map_err(|m| format!("key `topology`: {m}"))?)
            }
            "leads" => cfg.model.leads = Some(parse_usize(key, value)?),
            "t" => cfg.model.t = Some(parse_f64(key, value)?),
            "t_prime" => cfg.model.t_prime = Some(parse_f64(key, value)?),
            "t0" => cfg.model.t0 = Some(parse_f64(key, value)?),
            "u" => cfg.model.u = Some(parse_f64(key, value)?),
            "eps_d" => cfg.model.eps_d = Some(parse_f64(key, value)?),
            "b" => cfg.model.b = Some(parse_f64(key, value)?),
            "temperature" => cfg.model.temperature = Some(parse_f64(key, value)?),
            other => return Err(format!("unknown key `{other}` in [model]")),
        },
        "sweep" => match key {
            "axis" => {
                cfg.sweep.axis = Some(parse_axis(value).map_err(|m| format!("key `axis`: {m}"))?)
            }
            "min" => cfg.sweep.min = Some(parse_f64(key, value)?),
            "max" => cfg.sweep.max = Some(parse_f64(key, value)?),
            "count" => cfg.sweep.count = Some(parse_usize(key, value)?),
            "spacing" => {
                cfg.sweep.spacing =
                    Some(parse_spacing(value).map_err(|m| format!("key `spacing`: {m}"))?)
            }
            other => return Err(format!("unknown key `{other}` in [sweep]")),
        },
        "phase" => match key {
            "u_over_gamma" => {
                let mut list = Vec::new();
                for part in value.split(',') {
                    list.push(parse_f64(key, part.trim())?);
                }
                cfg.phase.u_over_gamma = Some(list);
            }
            "t_lo" => cfg.phase.t_lo = Some(parse_f64(key, value)?),
            "t_hi" => cfg.phase.t_hi = Some(parse_f64(key, value)?),
            other => return Err(format!("unknown key `{other}` in [phase]")),
        },
        "constants" => match key {
            "d1" => cfg.constants.d1 = Some(parse_f64(key, value)?),
            "d2" => cfg.constants.d2 = Some(parse_f64(key, value)?),
            "c" => cfg.constants.c = Some(parse_f64(key, value)?),
            other => return Err(format!("unknown key `{other}` in [constants]")),
        },
        _ => unreachable!("section names are validated at the header"),
    }
    Ok(())
}

fn parse_f64(key: &str, value: &str) -> Result<f64, String> {
    value
        .parse()
        .map_err(|_| format!("key `{key}`: `{value}` is not a number"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize, String> {
    value
        .parse()
        .map_err(|_| format!("key `{key}`: `{value}` is not a non-negative integer"))
}

pub fn parse_topology(s: &str) -> Result<Topology, String> {
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "series" => Ok(Topology::Series),
        "side_coupled" | "sidecoupled" => Ok(Topology::SideCoupled),
        "parallel" => Ok(Topology::Parallel),
        _ => Err(format!(
            "`{s}` is not a topology (expected series, side_coupled, or parallel)"
        )),
    }
}

/// Axis names follow the parameter symbols. `t` and `T` differ only by
/// case, so those two are matched case-sensitively; everything else is
/// forgiving.
pub fn parse_axis(s: &str) -> Result<Axis, String> {
    if s == "t" {
        return Ok(Axis::Hopping);
    }
    if s == "T" {
        return Ok(Axis::Temperature);
    }
    match s.to_ascii_lowercase().replace('-', "_").as_str() {
        "t_prime" | "tprime" => Ok(Axis::DotLead),
        "u" => Ok(Axis::Repulsion),
        "temperature" => Ok(Axis::Temperature),
        "b" | "b_field" => Ok(Axis::Field),
        _ => Err(format!("`{s}` is not a sweep axis (t, t_prime, U, T, B)")),
    }
}

pub fn parse_spacing(s: &str) -> Result<Spacing, String> {
    match s.to_ascii_lowercase().as_str() {
        "linear" => Ok(Spacing::Linear),
        "log" => Ok(Spacing::Log),
        _ => Err(format!("`{s}` is not a spacing (linear or log)")),
    }
}

/// Model parameters as flags; each overrides the matching `[model]` key.
#[derive(Args, Debug, Default)]
pub struct ModelArgs {
    /// Geometry wiring the dots to the leads: series, side_coupled, or parallel.
    #[arg(long)]
    pub topology: Option<String>,
    /// Sites per lead.
    #[arg(long)]
    pub leads: Option<usize>,
    /// Interdot hopping t.
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<f64>,
    /// Dot-lead coupling t'.
    #[arg(long, allow_hyphen_values = true)]
    pub t_prime: Option<f64>,
    /// Hopping inside the leads (half bandwidth 2 t0).
    #[arg(long, allow_hyphen_values = true)]
    pub t0: Option<f64>,
    /// On-dot Coulomb repulsion U.
    #[arg(long)]
    pub u: Option<f64>,
    /// Dot level position; tracks -U/2 when omitted.
    #[arg(long, allow_hyphen_values = true)]
    pub eps_d: Option<f64>,
    /// Zeeman field on the dots.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<f64>,
    /// Ensemble temperature.
    #[arg(long)]
    pub temperature: Option<f64>,
}

/// Sweep grid as flags; each overrides the matching `[sweep]` key.
#[derive(Args, Debug, Default)]
pub struct SweepArgs {
    /// Varying axis: t, t_prime, U, T, or B.
    #[arg(long)]
    pub axis: Option<String>,
    /// First grid value.
    #[arg(long, allow_hyphen_values = true)]
    pub min: Option<f64>,
    /// Last grid value.
    #[arg(long, allow_hyphen_values = true)]
    pub max: Option<f64>,
    /// Number of grid points, at least 2.
    #[arg(long)]
    pub count: Option<usize>,
    /// Grid spacing: linear or log.
    #[arg(long)]
    pub spacing: Option<String>,
}

/// Phase-scan grid as flags; each overrides the matching `[phase]` key.
#[derive(Args, Debug, Default)]
pub struct PhaseGridArgs {
    /// Comma-separated U/Gamma values, one boundary column per entry.
    #[arg(long)]
    pub u_over_gamma: Option<String>,
    /// Lower edge of the interdot-hopping bracket.
    #[arg(long)]
    pub t_lo: Option<f64>,
    /// Upper edge of the interdot-hopping bracket.
    #[arg(long)]
    pub t_hi: Option<f64>,
}

/// Order-one constants of the analytic scale formulas; each overrides the
/// matching `[constants]` key.
#[derive(Args, Debug, Default)]
pub struct ConstantArgs {
    /// Prefactor of the two-stage screening scale.
    #[arg(long)]
    pub d1: Option<f64>,
    /// Exponent coefficient of the two-stage screening scale.
    #[arg(long, allow_hyphen_values = true)]
    pub d2: Option<f64>,
    /// Overall factor on the RKKY magnitude.
    #[arg(long)]
    pub c: Option<f64>,
}

/// Flags shared by every subcommand.
#[derive(Args, Debug, Default)]
pub struct CommonArgs {
    /// Config file of `key = value` lines under [model]/[sweep]/[phase]/[constants].
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Solver-engine knobs.
#[derive(Args, Debug, Default)]
pub struct EngineArgs {
    /// Worker threads for grid points; available parallelism when omitted.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Largest sector dimension the dense eigensolver accepts.
    #[arg(long)]
    pub dense_cap: Option<usize>,
    /// Site-count gate for both solve paths.
    #[arg(long)]
    pub max_sites: Option<usize>,
}

/// Fully merged model parameters. The dot level stays `None` unless
/// pinned explicitly, so it keeps tracking `-U/2` when a sweep varies U.
#[derive(Copy, Clone, Debug)]
pub struct ModelSettings {
    pub topology: Topology,
    pub leads: usize,
    pub t: f64,
    pub t_prime: f64,
    pub t0: f64,
    pub u: f64,
    pub eps_d: Option<f64>,
    pub b: f64,
    pub temperature: f64,
}

impl ModelSettings {
    pub fn spec(&self) -> ModelSpec {
        ModelSpec {
            topology: self.topology,
            t: self.t,
            u: self.u,
            t_prime: self.t_prime,
            t0: self.t0,
            lead_len: self.leads,
            eps_d: self.eps_d.unwrap_or(-0.5 * self.u),
            b_field: self.b,
            temperature: self.temperature,
        }
    }

    /// Spec with one axis replaced by a grid value.
    pub fn at(&self, axis: Axis, value: f64) -> ModelSpec {
        let mut s = *self;
        match axis {
            Axis::Hopping => s.t = value,
            Axis::DotLead => s.t_prime = value,
            Axis::Repulsion => s.u = value,
            Axis::Temperature => s.temperature = value,
            Axis::Field => s.b = value,
        }
        s.spec()
    }
}

pub fn merge_model(file: &ModelKeys, flags: &ModelArgs) -> Result<ModelSettings, Failure> {
    let topology = match &flags.topology {
        Some(s) => {
            parse_topology(s).map_err(|m| Failure::config(format!("key `topology`: {m}")))?
        }
        None => file.topology.unwrap_or(Topology::Series),
    };
    Ok(ModelSettings {
        topology,
        leads: flags.leads.or(file.leads).unwrap_or(2),
        t: flags.t.or(file.t).unwrap_or(0.1),
        t_prime: flags.t_prime.or(file.t_prime).unwrap_or_else(default_t_prime),
        t0: flags.t0.or(file.t0).unwrap_or(1.0),
        u: flags.u.or(file.u).unwrap_or(0.4),
        eps_d: flags.eps_d.or(file.eps_d),
        b: flags.b.or(file.b).unwrap_or(0.0),
        temperature: flags.temperature.or(file.temperature).unwrap_or(0.0),
    })
}

/// Fully merged sweep grid.
#[derive(Copy, Clone, Debug)]
pub struct SweepSettings {
    pub axis: Axis,
    pub min: f64,
    pub max: f64,
    pub count: usize,
    pub spacing: Spacing,
}

pub fn merge_sweep(file: &SweepKeys, flags: &SweepArgs) -> Result<SweepSettings, Failure> {
    let axis = match &flags.axis {
        Some(s) => parse_axis(s).map_err(|m| Failure::config(format!("key `axis`: {m}")))?,
        None => file
            .axis
            .ok_or_else(|| Failure::config("sweep needs key `axis` ([sweep] section or --axis)"))?,
    };
    let min = flags
        .min
        .or(file.min)
        .ok_or_else(|| Failure::config("sweep needs key `min` ([sweep] section or --min)"))?;
    let max = flags
        .max
        .or(file.max)
        .ok_or_else(|| Failure::config("sweep needs key `max` ([sweep] section or --max)"))?;
    let count = flags
        .count
        .or(file.count)
        .ok_or_else(|| Failure::config("sweep needs key `count` ([sweep] section or --count)"))?;
    let spacing = match &flags.spacing {
        Some(s) => parse_spacing(s).map_err(|m| Failure::config(format!("key `spacing`: {m}")))?,
        None => file.spacing.unwrap_or(Spacing::Linear),
    };
    if count < 2 {
        return Err(Failure::config(format!(
            "key `count`: {count} is below the minimum of 2"
        )));
    }
    if spacing == Spacing::Log && !(min > 0.0) {
        return Err(Failure::config(format!(
            "key `spacing`: log spacing requires min > 0, got min = {min}"
        )));
    }
    for (key, v) in [("min", min), ("max", max)] {
        if !v.is_finite() {
            return Err(Failure::config(format!("key `{key}`: {v} is not finite")));
        }
    }
    Ok(SweepSettings {
        axis,
        min,
        max,
        count,
        spacing,
    })
}

/// Fully merged phase-scan grid.
#[derive(Clone, Debug)]
pub struct PhaseSettings {
    pub u_over_gamma: Vec<f64>,
    pub t_lo: f64,
    pub t_hi: f64,
}

pub fn merge_phase(file: &PhaseKeys, flags: &PhaseGridArgs) -> Result<PhaseSettings, Failure> {
    let u_over_gamma = match &flags.u_over_gamma {
        Some(s) => {
            let mut list = Vec::new();
            for part in s.split(',') {
                list.push(parse_f64("u_over_gamma", part.trim()).map_err(Failure::config)?);
            }
            list
        }
        None => file.u_over_gamma.clone().ok_or_else(|| {
            Failure::config("phase needs key `u_over_gamma` ([phase] section or --u-over-gamma)")
        })?,
    };
    let t_lo = flags
        .t_lo
        .or(file.t_lo)
        .ok_or_else(|| Failure::config("phase needs key `t_lo` ([phase] section or --t-lo)"))?;
    let t_hi = flags
        .t_hi
        .or(file.t_hi)
        .ok_or_else(|| Failure::config("phase needs key `t_hi` ([phase] section or --t-hi)"))?;
    if u_over_gamma.is_empty() {
        return Err(Failure::config("key `u_over_gamma`: needs at least one value"));
    }
    for &r in &u_over_gamma {
        if !(r > 0.0) {
            return Err(Failure::config(format!(
                "key `u_over_gamma`: {r} must be > 0"
            )));
        }
    }
    if !(t_lo > 0.0) || !(t_hi > t_lo) {
        return Err(Failure::config(format!(
            "keys `t_lo`, `t_hi`: bracket ({t_lo}, {t_hi}) must satisfy 0 < t_lo < t_hi"
        )));
    }
    Ok(PhaseSettings {
        u_over_gamma,
        t_lo,
        t_hi,
    })
}

pub fn merge_constants(file: &ConstantKeys, flags: &ConstantArgs) -> Result<ScaleConstants, Failure> {
    let defaults = ScaleConstants::default();
    let k = ScaleConstants {
        d1: flags.d1.or(file.d1).unwrap_or(defaults.d1),
        d2: flags.d2.or(file.d2).unwrap_or(defaults.d2),
        c: flags.c.or(file.c).unwrap_or(defaults.c),
    };
    k.validate().map_err(|e| Failure::config(e.to_string()))?;
    Ok(k)
}

pub fn solve_options(engine: &EngineArgs) -> SolveOptions {
    let mut opts = SolveOptions::default();
    if let Some(cap) = engine.dense_cap {
        opts.dense_cap = cap;
    }
    if let Some(n) = engine.max_sites {
        opts.max_sites_thermal = n;
        opts.max_sites_ground = n;
    }
    opts
}

/// Evenly spaced grid between `min` and `max` inclusive, on a linear or
/// logarithmic scale.
pub fn grid_points(min: f64, max: f64, count: usize, spacing: Spacing) -> Vec<f64> {
    debug_assert!(count >= 2);
    (0..count)
        .map(|i| {
            let f = i as f64 / (count - 1) as f64;
            match spacing {
                Spacing::Linear => min + f * (max - min),
                Spacing::Log => (min.ln() + f * (max.ln() - min.ln())).exp(),
            }
        })
        .collect()
}

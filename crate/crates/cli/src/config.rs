//! INI-style run configuration.
//!
//! ```ini
//! preset = desk
//! seed = 7
//! out = results
//!
//! [buckley]
//! tol_alpha = 0.1
//!
//! [commutator-k]
//! k = 1, 2
//! extent = 2^18
//! ```
//!
//! Top-level keys: `preset`, `seed`, `out`. Each section names an
//! experiment; with no sections every registered experiment runs.

use std::path::{Path, PathBuf};

use ini::Ini;
use thiserror::Error;
use wnlab::experiments::{lookup, ExperimentConfig, Preset, REGISTRY};
use wnlab::LabError;

#[derive(Debug, Error)]
#[error("config error in `{field}`: {reason}")]
pub struct ConfigError {
    pub field: String,
    pub reason: String,
}

fn err(field: impl Into<String>, reason: impl Into<String>) -> ConfigError {
    ConfigError {
        field: field.into(),
        reason: reason.into(),
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Default, Clone)]
pub struct Overrides {
    pub preset: Option<String>,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    pub preset: Preset,
    pub out: PathBuf,
    pub experiments: Vec<ExperimentConfig>,
}

pub const DEFAULT_OUT: &str = "wnlab-out";

pub fn load(path: &Path, overrides: &Overrides) -> Result<RunPlan, ConfigError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| err("config", format!("{}: {e}", path.display())))?;
    parse(&text, overrides)
}

pub fn parse(text: &str, overrides: &Overrides) -> Result<RunPlan, ConfigError> {
    let ini = Ini::load_from_str(text).map_err(|e| err("config", e.to_string()))?;
    let mut preset = None;
    let mut seed = None;
    let mut out = None;
    let mut sections: Vec<(String, Vec<(String, String)>)> = Vec::new();
    for (section, props) in ini.iter() {
        match section {
            None => {
                for (k, v) in props.iter() {
                    match k {
                        "preset" => preset = Some(v.to_string()),
                        "seed" => seed = Some(parse_u64(k, v)?),
                        "out" => out = Some(PathBuf::from(v)),
                        _ => {
                            return Err(err(
                                k,
                                "unknown top-level key (expected preset, seed or out)",
                            ))
                        }
                    }
                }
            }
            Some(name) => {
                if lookup(name).is_none() {
                    return Err(err(
                        format!("[{name}]"),
                        "unknown experiment (see `wnlab list`)",
                    ));
                }
                let kv = props
                    .iter()
                    .map(|(k, v)| (k.to_string(), v.to_string()))
                    .collect();
                sections.push((name.to_string(), kv));
            }
        }
    }
    let preset_text = overrides.preset.clone().or(preset);
    let preset = match preset_text {
        Some(p) => p
            .parse::<Preset>()
            .map_err(|_| err("preset", format!("expected smoke, desk or full, got `{p}`")))?,
        None => Preset::default(),
    };
    if sections.is_empty() {
        sections = REGISTRY
            .iter()
            .map(|e| (e.name.to_string(), Vec::new()))
            .collect();
    }
    let mut experiments = Vec::with_capacity(sections.len());
    for (name, kv) in sections {
        let mut cfg = ExperimentConfig::new(&name, preset)
            .map_err(|e| err(format!("[{name}]"), e.to_string()))?;
        if let Some(s) = seed {
            cfg.seed = s;
        }
        for (k, v) in &kv {
            apply_key(&mut cfg, k, v).map_err(|e| err(format!("{name}.{}", e.field), e.reason))?;
        }
        if let Some(s) = overrides.seed {
            cfg.seed = s;
        }
        cfg.validate().map_err(|e| match e {
            LabError::InvalidParameter { field, reason } => err(format!("{name}.{field}"), reason),
            other => err(format!("[{name}]"), other.to_string()),
        })?;
        experiments.push(cfg);
    }
    Ok(RunPlan {
        preset,
        out: overrides
            .out
            .clone()
            .or(out)
            .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        experiments,
    })
}

fn apply_key(cfg: &mut ExperimentConfig, key: &str, value: &str) -> Result<(), ConfigError> {
    match key {
        "core_halfwidth" => cfg.grid.core_halfwidth = parse_f64(key, value)?,
        "extent" => cfg.grid.extent = parse_f64(key, value)?,
        "core_points" => cfg.grid.core_points = parse_u64(key, value)? as usize,
        "ratio" => cfg.grid.ratio = parse_f64(key, value)?,
        "alpha_ps" => cfg.alpha_ps = parse_list(key, value, parse_f64)?,
        "gamma_ps" => cfg.gamma_ps = parse_list(key, value, parse_f64)?,
        "k" => {
            cfg.ks = parse_list(key, value, |k, v| {
                u32::try_from(parse_u64(k, v)?).map_err(|_| err(k, format!("`{v}` is too large")))
            })?
        }
        "q" => cfg.qs = parse_list(key, value, parse_f64)?,
        "lambda" => cfg.lambdas = parse_list(key, value, parse_f64)?,
        "frac_alpha" => cfg.frac_alpha = parse_f64(key, value)?,
        "p0" => cfg.p0s = parse_list(key, value, parse_f64)?,
        "beta" => cfg.beta = parse_f64(key, value)?,
        "tol_alpha" => cfg.tol_alpha = parse_f64(key, value)?,
        "tol_gamma" => cfg.tol_gamma = parse_f64(key, value)?,
        "samples" => cfg.samples = parse_u64(key, value)? as usize,
        "seed" => cfg.seed = parse_u64(key, value)?,
        _ => return Err(err(key, "unknown key")),
    }
    Ok(())
}

/// Accepts plain floats and powers written `2^20`.
fn parse_f64(key: &str, value: &str) -> Result<f64, ConfigError> {
    let v = value.trim();
    let parsed = match v.split_once('^') {
        Some((b, e)) => match (b.trim().parse::<f64>(), e.trim().parse::<i32>()) {
            (Ok(b), Ok(e)) => Some(b.powi(e)),
            _ => None,
        },
        None => v.parse::<f64>().ok(),
    };
    match parsed {
        Some(x) if x.is_finite() => Ok(x),
        _ => Err(err(key, format!("`{v}` is not a finite number"))),
    }
}

fn parse_u64(key: &str, value: &str) -> Result<u64, ConfigError> {
    value.trim().parse().map_err(|_| {
        err(
            key,
            format!("`{}` is not a non-negative integer", value.trim()),
        )
    })
}

fn parse_list<T>(
    key: &str,
    value: &str,
    item: impl Fn(&str, &str) -> Result<T, ConfigError>,
) -> Result<Vec<T>, ConfigError> {
    let items: Vec<T> = value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| item(key, s))
        .collect::<Result<_, _>>()?;
    if items.is_empty() {
        return Err(err(key, "empty list"));
    }
    Ok(items)
}

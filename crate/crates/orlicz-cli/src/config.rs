//! Flag resolution against an optional flat `key=value` config file.
//!
//! Every value flag of every subcommand has a config key of the same name
//! (`fn`, `fnM`, `p`, `n_mc`, ...). An explicit flag wins over the file;
//! the seed additionally falls back to the `ORLICZ_SEED` environment
//! variable before its default.

use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use orlicz::{OrliczError, Result, Suite, TailFunction, WeightVector};

pub const DEFAULT_SEED: u64 = 7;

/// Parsed config file plus lookup helpers.
pub struct Resolver {
    values: HashMap<String, String>,
}

impl Resolver {
    pub fn new(config: Option<&Path>) -> Result<Self> {
        let mut values = HashMap::new();
        if let Some(path) = config {
            let text = fs::read_to_string(path).map_err(|source| OrliczError::Io {
                path: path.display().to_string(),
                source,
            })?;
            for (lineno, raw) in text.lines().enumerate() {
                let line = raw.trim();
                if line.is_empty() || line.starts_with('#') {
                    continue;
                }
                let (key, value) = line.split_once('=').ok_or_else(|| OrliczError::Parse {
                    offset: 0,
                    message: format!(
                        "{} line {}: expected key=value, found '{line}'",
                        path.display(),
                        lineno + 1
                    ),
                })?;
                values.insert(key.trim().to_string(), value.trim().to_string());
            }
        }
        Ok(Self { values })
    }

    /// Flag value if given, else the config entry under `key`.
    pub fn string(&self, flag: Option<String>, key: &str) -> Option<String> {
        flag.or_else(|| self.values.get(key).cloned())
    }

    pub fn require_string(&self, flag: Option<String>, key: &str) -> Result<String> {
        self.string(flag, key).ok_or_else(|| missing(key))
    }

    /// Numeric flag with config fallback; a malformed config entry is a
    /// config error, not silently ignored.
    pub fn number<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<Option<T>> {
        if flag.is_some() {
            return Ok(flag);
        }
        match self.values.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| OrliczError::Parse {
                offset: 0,
                message: format!("config key '{key}': cannot parse '{raw}' as a number"),
            }),
        }
    }

    pub fn require_number<T: FromStr>(&self, flag: Option<T>, key: &str) -> Result<T> {
        self.number(flag, key)?.ok_or_else(|| missing(key))
    }

    /// Seed resolution: flag, config, `ORLICZ_SEED`, then the default.
    pub fn seed(&self, flag: Option<u64>) -> Result<u64> {
        if let Some(seed) = self.number(flag, "seed")? {
            return Ok(seed);
        }
        match std::env::var("ORLICZ_SEED") {
            Ok(raw) => raw.parse().map_err(|_| OrliczError::Parse {
                offset: 0,
                message: format!("ORLICZ_SEED: cannot parse '{raw}' as an integer"),
            }),
            Err(_) => Ok(DEFAULT_SEED),
        }
    }
}

fn missing(key: &str) -> OrliczError {
    OrliczError::InvalidParameter(format!("missing --{key} (or config entry '{key}')"))
}

/// Comma-separated coordinates, e.g. `3,4` or `1,0,2.5e-1`.
pub fn parse_vector(text: &str) -> Result<WeightVector<f64>> {
    let mut entries = Vec::new();
    let mut offset = 0;
    for token in text.split(',') {
        entries.push(token.trim().parse::<f64>().map_err(|_| OrliczError::Parse {
            offset,
            message: format!("cannot parse coordinate '{token}' as a number"),
        })?);
        offset += token.len() + 1;
    }
    WeightVector::new(entries)
}

/// Suite specification: absent or `standard` for the fixed 8-vector suite
/// in dimension `n`, otherwise semicolon-separated inline vectors
/// (`1,0,0;0.5,0.5`), labeled `v1`, `v2`, ...
pub fn parse_suite(spec: Option<&str>, n: usize, seed: u64) -> Result<Suite> {
    match spec {
        None | Some("standard") => Suite::standard(n, seed),
        Some(inline) => {
            let mut labeled = Vec::new();
            for (i, part) in inline.split(';').enumerate() {
                let v = parse_vector(part)?;
                labeled.push((format!("v{}", i + 1), v.as_slice().to_vec()));
            }
            Suite::from_labeled(labeled)
        }
    }
}

/// Multiplier-law specification for convolution checks: `point:<float>`
/// (a deterministic factor) or `loggamma:p=<float>` (the reference power
/// law with tail `min(1, x^-p)`).
pub fn parse_tail_spec(spec: &str) -> Result<TailFunction<f64>> {
    let (head, rest) = spec.split_once(':').unwrap_or((spec, ""));
    match head {
        "point" => {
            let a = rest.parse::<f64>().map_err(|_| OrliczError::Parse {
                offset: head.len() + 1,
                message: format!("cannot parse point mass location '{rest}' as a number"),
            })?;
            TailFunction::point_mass(a)
        }
        "loggamma" => {
            let raw = rest.strip_prefix("p=").ok_or_else(|| OrliczError::Parse {
                offset: head.len() + 1,
                message: format!("expected 'p=<float>', found '{rest}'"),
            })?;
            let p = raw.parse::<f64>().map_err(|_| OrliczError::Parse {
                offset: head.len() + 3,
                message: format!("cannot parse exponent '{raw}' as a number"),
            })?;
            TailFunction::log_gamma(p)
        }
        other => Err(OrliczError::Parse {
            offset: 0,
            message: format!("unknown multiplier law '{other}'; expected point or loggamma"),
        }),
    }
}

//! Flat key-value experiment configuration files.
//!
//! The format is line-oriented: `[section]` headers, `key = value` pairs,
//! `#` comments. Every key is documented in `docs/CONFIG.md`. Parsing is
//! strict: unknown sections or keys are rejected so that typos cannot
//! silently change an experiment.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::bounds::PrecodingStrategy;
use crate::channel::{GainNormalization, LinkGains, RelayMode};
use crate::rational::Rational;

#[derive(Debug, Error, PartialEq)]
pub enum ConfigError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("unknown section [{0}]")]
    UnknownSection(String),
    #[error("unknown key '{key}' in section [{section}]")]
    UnknownKey { section: String, key: String },
    #[error("missing required key '{key}' in section [{section}]")]
    MissingKey { section: String, key: String },
    #[error("key '{key}': {msg}")]
    BadValue { key: String, msg: String },
}

/// Sections of raw `key = value` pairs.
#[derive(Clone, Debug, Default)]
pub struct RawConfig {
    sections: BTreeMap<String, BTreeMap<String, String>>,
}

const KNOWN: &[(&str, &[&str])] = &[
    ("experiment", &["name", "n", "n_iter", "seed", "snr", "min_word_errors", "max_frames"]),
    (
        "protocol",
        &[
            "beta",
            "alpha",
            "energies",
            "relay_mode",
            "relay_link_boost_db",
            "gains",
            "normalization",
        ],
    ),
    ("code", &["name"]),
    ("precoder", &["strategy", "s"]),
    ("plan", &["m"]),
];

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, ConfigError> {
        let mut sections: BTreeMap<String, BTreeMap<String, String>> = BTreeMap::new();
        let mut current: Option<String> = None;
        for (i, raw_line) in text.lines().enumerate() {
            let line = raw_line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(name) = line.strip_prefix('[') {
                let name = name
                    .strip_suffix(']')
                    .ok_or_else(|| ConfigError::Syntax { line: i + 1, msg: "unclosed section header".into() })?
                    .trim()
                    .to_string();
                if !KNOWN.iter().any(|(s, _)| *s == name) {
                    return Err(ConfigError::UnknownSection(name));
                }
                sections.entry(name.clone()).or_default();
                current = Some(name);
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: format!("expected 'key = value', got '{line}'"),
            })?;
            let section = current.clone().ok_or_else(|| ConfigError::Syntax {
                line: i + 1,
                msg: "key outside of any [section]".into(),
            })?;
            let key = key.trim().to_string();
            let keys = KNOWN.iter().find(|(s, _)| *s == section).unwrap().1;
            if !keys.contains(&key.as_str()) {
                return Err(ConfigError::UnknownKey { section, key });
            }
            sections.get_mut(&section).unwrap().insert(key, value.trim().to_string());
        }
        Ok(RawConfig { sections })
    }

    pub fn get(&self, section: &str, key: &str) -> Option<&str> {
        self.sections.get(section).and_then(|s| s.get(key)).map(String::as_str)
    }

    pub fn require(&self, section: &str, key: &str) -> Result<&str, ConfigError> {
        self.get(section, key).ok_or_else(|| ConfigError::MissingKey {
            section: section.to_string(),
            key: key.to_string(),
        })
    }
}

pub fn parse_u64(key: &str, v: &str) -> Result<u64, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue { key: key.into(), msg: format!("{e}") })
}

pub fn parse_usize(key: &str, v: &str) -> Result<usize, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue { key: key.into(), msg: format!("{e}") })
}

pub fn parse_u32(key: &str, v: &str) -> Result<u32, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue { key: key.into(), msg: format!("{e}") })
}

pub fn parse_f64(key: &str, v: &str) -> Result<f64, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue { key: key.into(), msg: format!("{e}") })
}

pub fn parse_f64_list(key: &str, v: &str) -> Result<Vec<f64>, ConfigError> {
    v.split(',').map(|t| parse_f64(key, t.trim())).collect()
}

pub fn parse_u32_list(key: &str, v: &str) -> Result<Vec<u32>, ConfigError> {
    v.split(',').map(|t| parse_u32(key, t.trim())).collect()
}

pub fn parse_rational(key: &str, v: &str) -> Result<Rational, ConfigError> {
    v.parse().map_err(|e| ConfigError::BadValue { key: key.into(), msg: format!("{e}") })
}

/// `lo:hi:step` inclusive grid, or a comma-separated list.
pub fn parse_snr_grid(v: &str) -> Result<Vec<f64>, ConfigError> {
    if v.contains(':') {
        let parts: Vec<&str> = v.split(':').collect();
        if parts.len() != 3 {
            return Err(ConfigError::BadValue { key: "snr".into(), msg: "expected lo:hi:step".into() });
        }
        let lo = parse_f64("snr", parts[0])?;
        let hi = parse_f64("snr", parts[1])?;
        let step = parse_f64("snr", parts[2])?;
        if step <= 0.0 || hi < lo {
            return Err(ConfigError::BadValue { key: "snr".into(), msg: "need step > 0 and hi >= lo".into() });
        }
        let mut grid = Vec::new();
        let mut x = lo;
        while x <= hi + 1e-9 {
            grid.push((x * 1e6).round() / 1e6);
            x += step;
        }
        Ok(grid)
    } else {
        parse_f64_list("snr", v)
    }
}

pub fn parse_relay_mode(v: &str) -> Result<RelayMode, ConfigError> {
    match v {
        "faded" => Ok(RelayMode::Faded),
        "ideal" => Ok(RelayMode::Ideal),
        other => Err(ConfigError::BadValue {
            key: "relay_mode".into(),
            msg: format!("expected 'faded' or 'ideal', got '{other}'"),
        }),
    }
}

pub fn parse_normalization(v: &str) -> Result<GainNormalization, ConfigError> {
    match v {
        "instantaneous" => Ok(GainNormalization::Instantaneous),
        "statistical" => Ok(GainNormalization::Statistical),
        other => Err(ConfigError::BadValue {
            key: "normalization".into(),
            msg: format!("expected 'instantaneous' or 'statistical', got '{other}'"),
        }),
    }
}

pub fn parse_strategy(v: &str) -> Result<PrecodingStrategy, ConfigError> {
    PrecodingStrategy::parse(v)
        .map_err(|e| ConfigError::BadValue { key: "strategy".into(), msg: format!("{e}") })
}

pub fn parse_gains(v: &str) -> Result<LinkGains, ConfigError> {
    let parts = parse_f64_list("gains", v)?;
    if parts.len() != 4 {
        return Err(ConfigError::BadValue {
            key: "gains".into(),
            msg: "expected four linear gains: sd,sr,rd,rr".into(),
        });
    }
    Ok(LinkGains { sd: parts[0], sr: parts[1], rd: parts[2], rr: parts[3] })
}

//! JSON potential files.
//!
//! ```json
//! { "kind": "trig-poly",
//!   "channels": { "c1": { "cos": [0.0, 0.0, 1.0] } } }
//! ```
//!
//! * `piecewise-constant`: `breakpoints` (starting at 0, increasing, below π) and
//!   matching `values`.
//! * `trig-poly`: `cos`/`sin` arrays; entry `k` multiplies `cos(2kz)` / `sin(2kz)`.
//! * `grid`: `samples` at `z = kπ/N`, linearly interpolated with periodic wrap.
//!
//! Absent channels are zero. Every channel value must be a real JSON number.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Channel, Potential};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PotentialKind {
    PiecewiseConstant,
    TrigPoly,
    Grid,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub breakpoints: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub values: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cos: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sin: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialFile {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub kind: PotentialKind,
    #[serde(default)]
    pub channels: BTreeMap<String, ChannelFile>,
}

#[derive(Debug, Error)]
pub enum PotentialParseError {
    #[error("cannot read {path}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed potential JSON at line {line}, column {column}: {message}")]
    Syntax {
        line: usize,
        column: usize,
        message: String,
    },
    #[error("field `{field}`: {message}")]
    Field { field: String, message: String },
}

impl PotentialParseError {
    fn field(field: impl Into<String>, message: impl Into<String>) -> Self {
        PotentialParseError::Field {
            field: field.into(),
            message: message.into(),
        }
    }
}

const CHANNEL_NAMES: [&str; 4] = ["c0", "c1", "c2", "c3"];

impl PotentialFile {
    pub fn from_json(text: &str) -> Result<Self, PotentialParseError> {
        serde_json::from_str(text).map_err(|e| PotentialParseError::Syntax {
            line: e.line(),
            column: e.column(),
            message: e.to_string(),
        })
    }

    pub fn read(path: &Path) -> Result<Self, PotentialParseError> {
        let text = std::fs::read_to_string(path).map_err(|source| PotentialParseError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("potential file serializes")
    }

    /// Builds the potential, checking that each channel carries exactly the
    /// payload its kind requires.
    pub fn to_potential(&self) -> Result<Potential, PotentialParseError> {
        for key in self.channels.keys() {
            if !CHANNEL_NAMES.contains(&key.as_str()) {
                return Err(PotentialParseError::field(
                    format!("channels.{key}"),
                    "unknown channel (expected c0, c1, c2 or c3)",
                ));
            }
        }
        let mut out: [Channel; 4] = std::array::from_fn(|_| Channel::zero());
        for (i, name) in CHANNEL_NAMES.iter().enumerate() {
            if let Some(ch) = self.channels.get(*name) {
                out[i] = self.channel(name, ch)?;
            }
        }
        Ok(Potential::from_channels(out))
    }

    fn channel(&self, name: &str, ch: &ChannelFile) -> Result<Channel, PotentialParseError> {
        let path = |f: &str| format!("channels.{name}.{f}");
        let reject = |present: bool, f: &str| {
            if present {
                Err(PotentialParseError::field(
                    path(f),
                    format!("not allowed for kind {:?}", self.kind),
                ))
            } else {
                Ok(())
            }
        };
        let require = |v: &Option<Vec<f64>>, f: &str| {
            v.clone()
                .ok_or_else(|| PotentialParseError::field(path(f), "missing"))
        };
        match self.kind {
            PotentialKind::PiecewiseConstant => {
                reject(ch.cos.is_some(), "cos")?;
                reject(ch.sin.is_some(), "sin")?;
                reject(ch.samples.is_some(), "samples")?;
                let b = require(&ch.breakpoints, "breakpoints")?;
                let v = require(&ch.values, "values")?;
                if b.len() != v.len() {
                    return Err(PotentialParseError::field(
                        path("values"),
                        format!("expected {} entries to match breakpoints, found {}", b.len(), v.len()),
                    ));
                }
                Channel::piecewise_constant(b, v)
                    .map_err(|m| PotentialParseError::field(path("breakpoints"), m))
            }
            PotentialKind::TrigPoly => {
                reject(ch.breakpoints.is_some(), "breakpoints")?;
                reject(ch.values.is_some(), "values")?;
                reject(ch.samples.is_some(), "samples")?;
                if ch.cos.is_none() && ch.sin.is_none() {
                    return Err(PotentialParseError::field(path("cos"), "need `cos` and/or `sin`"));
                }
                Channel::trig(ch.cos.clone().unwrap_or_default(), ch.sin.clone().unwrap_or_default())
                    .map_err(|m| PotentialParseError::field(path("cos"), m))
            }
            PotentialKind::Grid => {
                reject(ch.breakpoints.is_some(), "breakpoints")?;
                reject(ch.values.is_some(), "values")?;
                reject(ch.cos.is_some(), "cos")?;
                reject(ch.sin.is_some(), "sin")?;
                let s = require(&ch.samples, "samples")?;
                if s.iter().any(|x| !x.is_finite()) {
                    return Err(PotentialParseError::field(path("samples"), "non-finite sample"));
                }
                Channel::grid(&s).map_err(|m| PotentialParseError::field(path("samples"), m))
            }
        }
    }

    /// Grid file with `n` samples of the effective channels of `q`.
    pub fn grid_from(q: &Potential, n: usize, name: Option<String>) -> Self {
        let h = std::f64::consts::PI / n as f64;
        let rows: Vec<[f64; 4]> = (0..n).map(|k| q.coefficients(k as f64 * h)).collect();
        let channels = CHANNEL_NAMES
            .iter()
            .enumerate()
            .map(|(i, name)| {
                let samples = rows.iter().map(|r| r[i]).collect();
                (
                    name.to_string(),
                    ChannelFile {
                        samples: Some(samples),
                        ..Default::default()
                    },
                )
            })
            .collect();
        PotentialFile {
            name,
            kind: PotentialKind::Grid,
            channels,
        }
    }
}

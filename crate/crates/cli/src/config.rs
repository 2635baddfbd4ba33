use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::ValueEnum;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use eigenrate::mclab::Side;
use eigenrate::sdpic::Stages;
use eigenrate::EntryDistribution;

use crate::error::CliError;

/// Experiment kinds that can be described by an [`ExperimentConfig`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Rate,
    Phase,
    Mc,
    Zero,
    Sdpic,
    Covering,
    Hist,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            Command::Rate => "rate",
            Command::Phase => "phase",
            Command::Mc => "mc",
            Command::Zero => "zero",
            Command::Sdpic => "sdpic",
            Command::Covering => "covering",
            Command::Hist => "hist",
        };
        f.write_str(name)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Jsonl,
}

/// An α grid written `start:stop:step`, or a single value. The stop value
/// is included when it lies within `1e-9` of a grid point.
#[derive(Debug, Clone, PartialEq)]
pub struct AlphaGrid {
    spec: String,
    values: Vec<f64>,
}

const GRID_SLACK: f64 = 1e-9;
const MAX_GRID_POINTS: usize = 1_000_000;

impl AlphaGrid {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn spec(&self) -> &str {
        &self.spec
    }
}

impl FromStr for AlphaGrid {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let bad = |why: &str| CliError::Usage(format!("invalid alpha grid '{s}': {why}"));
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        let nums = parts
            .iter()
            .map(|p| p.parse::<f64>().map_err(|_| bad("not a number")))
            .collect::<Result<Vec<f64>, _>>()?;
        if nums.iter().any(|v| !v.is_finite()) {
            return Err(bad("values must be finite"));
        }
        let values = match nums.as_slice() {
            [a] => vec![*a],
            [start, stop, step] => {
                if !(*step > 0.0) {
                    return Err(bad("step must be positive"));
                }
                if stop < start {
                    return Err(bad("stop is below start"));
                }
                let count = ((stop - start) / step + GRID_SLACK).floor() as usize + 1;
                if count > MAX_GRID_POINTS {
                    return Err(bad("too many grid points"));
                }
                (0..count).map(|i| tidy(start + i as f64 * step)).collect()
            }
            _ => return Err(bad("expected start:stop:step or a single value")),
        };
        Ok(Self {
            spec: s.to_string(),
            values,
        })
    }
}

/// Round away the binary noise of `start + i·step` so `0.1 + 2·0.1` prints
/// as `0.3`.
fn tidy(v: f64) -> f64 {
    let r = (v * 1e12).round() / 1e12;
    if (r - v).abs() <= 1e-12 * v.abs().max(1.0) {
        r
    } else {
        v
    }
}

impl Serialize for AlphaGrid {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.spec)
    }
}

impl<'de> Deserialize<'de> for AlphaGrid {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Everything needed to reproduce one run. Echoed into every output file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dist: Option<EntryDistribution>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub k: Vec<usize>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub n: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha_grid: Option<AlphaGrid>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side: Option<Side>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub l: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub s: Option<Stages>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub weight: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub restarts: Option<usize>,
    /// `sdpic` only: emit the per-stage trace of one transmission.
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub trace: bool,
    pub seed: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    pub format: Format,
}

impl ExperimentConfig {
    pub fn new(command: Command, seed: u64, format: Format) -> Self {
        Self {
            command,
            dist: None,
            k: Vec::new(),
            n: Vec::new(),
            alpha_grid: None,
            side: None,
            l: None,
            s: None,
            weight: None,
            trials: None,
            bins: None,
            grid: None,
            radius: None,
            restarts: None,
            trace: false,
            seed,
            output: None,
            format,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("config serializes")
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Usage(format!("invalid config: {e}")))
    }

    pub fn dist(&self) -> Result<EntryDistribution, CliError> {
        self.dist
            .ok_or_else(|| CliError::Usage(format!("{} needs --dist", self.command)))
    }

    pub fn ks(&self) -> Result<&[usize], CliError> {
        if self.k.is_empty() {
            return Err(CliError::Usage(format!("{} needs --k", self.command)));
        }
        Ok(&self.k)
    }

    pub fn ns(&self) -> Result<&[usize], CliError> {
        if self.n.is_empty() {
            return Err(CliError::Usage(format!("{} needs --n", self.command)));
        }
        Ok(&self.n)
    }

    pub fn alphas(&self) -> Result<&[f64], CliError> {
        self.alpha_grid
            .as_ref()
            .map(AlphaGrid::values)
            .ok_or_else(|| {
                CliError::Usage(format!("{} needs --alpha or --alpha-grid", self.command))
            })
    }

    pub fn trials(&self) -> Result<u64, CliError> {
        self.trials
            .ok_or_else(|| CliError::Usage(format!("{} needs --trials", self.command)))
    }
}

/// Parses comma-separated counts and `a..b` ranges, e.g. `12..16,20`.
pub fn parse_counts(s: &str) -> Result<Vec<usize>, String> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let a: usize = a.trim().parse().map_err(|_| format!("bad range '{part}'"))?;
            let b: usize = b
                .trim()
                .trim_start_matches('=')
                .parse()
                .map_err(|_| format!("bad range '{part}'"))?;
            if b < a {
                return Err(format!("empty range '{part}'"));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| format!("bad count '{part}'"))?);
        }
    }
    if out.is_empty() {
        return Err("empty list".into());
    }
    Ok(out)
}

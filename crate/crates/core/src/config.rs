//! JSON run configuration. Every section is optional and falls back to the
//! 4-point, 10 GHz chip; unknown keys anywhere are rejected.

use std::collections::HashSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{domain, OfftError, Result};
use crate::network::{NetworkParams, OfftNetwork};
use crate::scaling::ScalingModel;
use crate::sensitivity::{LeakageMetric, SweepSpec};
use crate::thermal::HeaterSection;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub network: NetworkParams,
    pub sweeps: Vec<SweepSpec>,
    pub thermal: HeaterSection,
    pub crosstalk: CrosstalkSettings,
    pub scaling: ScalingModel,
    pub response: ResponseSettings,
    pub output: OutputSettings,
}

/// Frequency grid of the `response` command.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ResponseSettings {
    pub f_lo_hz: f64,
    /// Defaults to one comb period, `N f_s`.
    pub f_hi_hz: Option<f64>,
    pub points: usize,
    /// DFT bins to emit; all when absent.
    pub ports: Option<Vec<usize>>,
}

impl Default for ResponseSettings {
    fn default() -> Self {
        Self {
            f_lo_hz: 0.0,
            f_hi_hz: None,
            points: 4001,
            ports: None,
        }
    }
}

/// Leakage threshold used to report a heater tolerance for phase sweeps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CrosstalkSettings {
    pub threshold_db: f64,
    pub metric: LeakageMetric,
}

impl Default for CrosstalkSettings {
    fn default() -> Self {
        Self {
            threshold_db: -20.0,
            metric: LeakageMetric::Aggregate,
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputSettings {
    pub directory: PathBuf,
    pub format: OutputFormat,
}

impl Default for OutputSettings {
    fn default() -> Self {
        Self {
            directory: PathBuf::from("out"),
            format: OutputFormat::Csv,
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| OfftError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads and validates a config file. A missing file is an I/O error, a
    /// malformed one a config error.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text).map_err(|e| match e {
            OfftError::Config(msg) => OfftError::Config(format!("{}: {msg}", path.display())),
            other => other,
        })
    }

    /// Checks every section, including that the network builds.
    pub fn validate(&self) -> Result<()> {
        let net = OfftNetwork::build(&self.network)?;
        let mut names = HashSet::new();
        for s in &self.sweeps {
            if s.name.is_empty() {
                return Err(domain("every sweep needs a name"));
            }
            if !names.insert(s.name.as_str()) {
                return Err(domain(format!("duplicate sweep name '{}'", s.name)));
            }
            s.validate()?;
            net.cell(s.target.stage, s.target.cell)?;
        }
        self.thermal.validate()?;
        self.scaling.validate()?;
        if !(self.crosstalk.threshold_db.is_finite() && self.crosstalk.threshold_db < 0.0) {
            return Err(domain("crosstalk threshold must be a negative dB value"));
        }
        let r = &self.response;
        if r.points == 0 {
            return Err(domain("response needs at least one point"));
        }
        if let Some(hi) = r.f_hi_hz {
            if !(hi.is_finite() && r.f_lo_hz.is_finite() && hi >= r.f_lo_hz) {
                return Err(domain(format!(
                    "response range [{}, {hi}] is invalid",
                    r.f_lo_hz
                )));
            }
        }
        Ok(())
    }

    pub fn sweep(&self, name: &str) -> Result<&SweepSpec> {
        self.sweeps.iter().find(|s| s.name == name).ok_or_else(|| {
            let known: Vec<&str> = self.sweeps.iter().map(|s| s.name.as_str()).collect();
            domain(format!(
                "no sweep named '{name}'; available: [{}]",
                known.join(", ")
            ))
        })
    }
}

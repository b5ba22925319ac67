//! Run configuration shared by the flag parser and `run --config`.

use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Search,
    Dirichlet,
    Obstruction,
    Series,
    Dimension,
    Omega,
    DeltaT,
    ET,
    Ubiquity,
    Dichotomy,
    Boxdim,
    Eta,
    Certify,
    GammaDichotomy,
    PlotData,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Search => "search",
            Command::Dirichlet => "dirichlet",
            Command::Obstruction => "obstruction",
            Command::Series => "series",
            Command::Dimension => "dimension",
            Command::Omega => "omega",
            Command::DeltaT => "measure delta-t",
            Command::ET => "measure e-t",
            Command::Ubiquity => "measure ubiquity",
            Command::Dichotomy => "measure dichotomy",
            Command::Boxdim => "boxdim",
            Command::Eta => "manifold eta",
            Command::Certify => "manifold certify",
            Command::GammaDichotomy => "manifold gamma-dichotomy",
            Command::PlotData => "plot-data",
        }
    }

    pub fn is_stochastic(self) -> bool {
        matches!(
            self,
            Command::DeltaT
                | Command::ET
                | Command::Ubiquity
                | Command::Dichotomy
                | Command::Eta
                | Command::Certify
                | Command::GammaDichotomy
        )
    }

    fn required(self) -> &'static [&'static str] {
        match self {
            Command::Search => &["m", "n", "x", "q"],
            Command::Dirichlet => &["m", "n", "x", "schedule"],
            Command::Obstruction => &["m", "n", "x", "psi"],
            Command::Series | Command::Omega => &["m", "n", "psi", "f"],
            Command::Dimension => &["m", "n", "tau"],
            Command::DeltaT => &["m", "n", "psi", "schedule", "samples"],
            Command::ET => &["m", "n", "schedule", "samples"],
            Command::Ubiquity => &["m", "n", "schedule", "samples"],
            Command::Dichotomy | Command::GammaDichotomy => &["m", "n", "psi", "schedule", "q", "samples"],
            Command::Boxdim => &["m", "n", "tau", "schedule"],
            Command::Eta => &["m", "n"],
            Command::Certify => &["m", "n", "psi", "q"],
            Command::PlotData => &["inputs", "output"],
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Format {
    #[default]
    Json,
    Csv,
    Both,
}

/// Everything one invocation needs. Unused fields are ignored by the
/// subcommand; missing required ones are reported by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: Command,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Matrix entries, column-major.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub psi: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
    /// t values, N values or grid levels, depending on the command.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub schedule: Option<Vec<u64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub samples: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<u64>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    pub rank_one: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub inputs: Vec<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<PathBuf>,
    #[serde(default)]
    pub format: Format,
}

impl RunConfig {
    pub fn new(command: Command) -> Self {
        RunConfig {
            command,
            m: None,
            n: None,
            x: None,
            psi: None,
            f: None,
            tau: None,
            schedule: None,
            q: None,
            k: None,
            samples: None,
            seed: None,
            horizon: None,
            rank_one: false,
            inputs: vec![],
            output: None,
            format: Format::Json,
        }
    }

    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serialises")
    }

    fn has(&self, field: &str) -> bool {
        match field {
            "m" => self.m.is_some(),
            "n" => self.n.is_some(),
            "x" => self.x.is_some(),
            "psi" => self.psi.is_some(),
            "f" => self.f.is_some(),
            "tau" => self.tau.is_some(),
            "schedule" => self.schedule.as_ref().is_some_and(|s| !s.is_empty()),
            "q" => self.q.is_some(),
            "samples" => self.samples.is_some(),
            "inputs" => !self.inputs.is_empty(),
            "output" => self.output.is_some(),
            _ => unreachable!("unknown field {field}"),
        }
    }

    /// Shape checks done before dispatch; the library validates the rest.
    pub fn validate(&self) -> Result<(), CliError> {
        for field in self.command.required() {
            if !self.has(field) {
                return Err(CliError::Config(format!("{}: missing field `{field}`", self.command.name())));
            }
        }
        if self.command.is_stochastic() && self.seed.is_none() {
            return Err(CliError::Config(format!("{}: missing field `seed` (required for sampling)", self.command.name())));
        }
        if self.m == Some(0) {
            return Err(CliError::Config("field `m` must be positive".into()));
        }
        if self.n == Some(0) {
            return Err(CliError::Config("field `n` must be positive".into()));
        }
        if let (Some(x), Some(m), Some(n)) = (&self.x, self.m, self.n) {
            if x.len() != m * n {
                return Err(CliError::Config(format!("field `x` has {} entries, expected m*n = {}", x.len(), m * n)));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::Config("field `samples` must be positive".into()));
        }
        Ok(())
    }
}

/// Parses `a,b,c` or the inclusive range `a..b`.
pub fn parse_schedule(s: &str) -> Result<Vec<u64>, String> {
    let s = s.trim();
    if let Some((a, b)) = s.split_once("..") {
        let a: u64 = a.trim().parse().map_err(|_| format!("bad range start in '{s}'"))?;
        let b: u64 = b.trim_start_matches('=').trim().parse().map_err(|_| format!("bad range end in '{s}'"))?;
        if a > b {
            return Err(format!("empty range '{s}'"));
        }
        return Ok((a..=b).collect());
    }
    s.split(',').map(|v| v.trim().parse::<u64>().map_err(|_| format!("bad schedule value '{v}'"))).collect()
}

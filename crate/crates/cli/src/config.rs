use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use homology_lab::spectra::{DeltaPolicy, EstimatorParams, ProbeKind};
use serde::Serialize;
use serde_json::Value;

use crate::args::{EstimatorArgs, Mode};
use crate::{CliError, CliResult, ORACLE_SIZE_GATE};

/// Everything that determines a run's output. Embedded in every result, so a
/// result can be reproduced from its own JSON. The thread count is absent on
/// purpose: it never changes the answer.
#[derive(Clone, Debug, Serialize)]
pub struct RunConfig {
    pub subcommand: String,
    pub inputs: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub r: Option<usize>,
    pub mode: Mode,
    pub params: EstimatorParams,
    pub oracle: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub emit_plot_data: Option<String>,
    /// Subcommand-specific settings.
    #[serde(skip_serializing_if = "BTreeMap::is_empty")]
    pub options: BTreeMap<String, Value>,
}

impl RunConfig {
    pub fn new(subcommand: &str, seed: u64, no_oracle: bool) -> Self {
        RunConfig {
            subcommand: subcommand.into(),
            inputs: Vec::new(),
            r: None,
            mode: Mode::Exact,
            params: EstimatorParams {
                seed,
                ..EstimatorParams::default()
            },
            oracle: !no_oracle,
            output: None,
            emit_plot_data: None,
            options: BTreeMap::new(),
        }
    }

    pub fn input(mut self, p: &Path) -> Self {
        self.inputs.push(show(p));
        self
    }

    pub fn option(mut self, key: &str, value: impl Serialize) -> Self {
        self.options
            .insert(key.into(), serde_json::to_value(value).expect("option serializes"));
        self
    }

    /// Fills mode and estimator parameters. `size` is the number of
    /// simplices the oracle would have to handle; it picks the default step
    /// threshold and decides whether an exact answer is printed.
    pub(crate) fn estimator(mut self, est: &EstimatorArgs, size: usize) -> CliResult<Self> {
        self.mode = est.mode;
        self.oracle &= size <= ORACLE_SIZE_GATE;
        self.params.degree = est.degree;
        self.params.probes = est.probes;
        self.params.probe_kind = est
            .probe_kind
            .parse::<ProbeKind>()
            .map_err(|_| CliError::Usage(format!("unknown probe kind {:?}", est.probe_kind)))?;
        self.params.delta = match est.delta.as_deref() {
            None if self.oracle => DeltaPolicy::Oracle,
            None => DeltaPolicy::Normalization,
            Some("oracle") => DeltaPolicy::Oracle,
            Some("normalization") => DeltaPolicy::Normalization,
            Some(s) => match s.parse::<f64>() {
                Ok(d) if d > 0.0 && d < 1.0 => DeltaPolicy::Fixed(d),
                _ => {
                    return Err(CliError::Usage(format!(
                        "--delta must be a number in (0, 1), `oracle` or `normalization`, got {s:?}"
                    )))
                }
            },
        };
        Ok(self)
    }

    /// True when a stochastic run should also report the exact answer.
    pub fn wants_oracle(&self) -> bool {
        self.mode == Mode::Stochastic && self.oracle
    }
}

pub fn show(p: &Path) -> String {
    p.display().to_string()
}

pub fn show_opt(p: &Option<PathBuf>) -> Option<String> {
    p.as_deref().map(show)
}

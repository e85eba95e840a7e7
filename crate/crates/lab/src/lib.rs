//! Scenario configuration, runners, reports and plot scripts behind the
//! `conflab` command line.

pub mod config;
pub mod error;
pub mod plots;
pub mod report;
pub mod scenarios;

use std::path::PathBuf;

pub use config::{ScenarioConfig, ScenarioKind};
pub use error::{CliError, Result};
pub use report::{Check, ReportSummary};

/// Command-line overrides applied on top of the defaults and the config file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    /// Finest refinement level; level `k` has `(nodes − 1)·2ᵏ + 1` nodes per axis.
    pub level: Option<u32>,
    pub out: Option<PathBuf>,
    pub seed: Option<u64>,
    pub negative_control: bool,
}

impl RunOptions {
    pub fn resolve(&self, kind: ScenarioKind) -> Result<ScenarioConfig> {
        let mut cfg = match &self.config {
            Some(path) => ScenarioConfig::load(kind, path)?,
            None => ScenarioConfig::defaults(kind),
        };
        if let Some(level) = self.level {
            cfg.grid.finest_level = level;
        }
        if let Some(out) = &self.out {
            cfg.output.dir = out.clone();
        }
        if let Some(seed) = self.seed {
            cfg.scenario.seed = seed;
        }
        if self.negative_control {
            if kind != ScenarioKind::Thm11 {
                return Err(CliError::Config(format!("{kind} has no negative control")));
            }
            cfg.thm11.run_control = true;
        }
        cfg.validate()?;
        Ok(cfg)
    }
}

/// Runs the scenario and writes one gnuplot script per plot next to its CSV.
pub fn execute(cfg: &ScenarioConfig) -> Result<(ReportSummary, Vec<PathBuf>)> {
    let summary = scenarios::run(cfg)?;
    let scripts = plots::emit_plots(&summary, &cfg.output.dir)?;
    Ok((summary, scripts))
}

//! Run summaries and the files a run leaves behind.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use conflab::dn::sha256_hex;
use conflab::field::fmt17;
use serde::{Deserialize, Serialize};

use crate::config::{ScenarioConfig, ScenarioKind};
use crate::error::Result;
use crate::plots::PlotSpec;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "limit", rename_all = "snake_case")]
pub enum Bound {
    AtMost(f64),
    AtLeast(f64),
    Within(f64, f64),
    /// Boolean condition; `value` is informational.
    Holds,
}

/// JSON has no NaN: serde_json writes it as `null`, and this reads `null` back as NaN.
mod nan_as_null {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        v.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::NAN))
    }

    pub mod map {
        use std::collections::BTreeMap;

        use serde::{Deserialize, Deserializer, Serialize, Serializer};

        pub fn serialize<S: Serializer>(m: &BTreeMap<String, f64>, s: S) -> Result<S::Ok, S::Error> {
            m.serialize(s)
        }

        pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, f64>, D::Error> {
            let raw = BTreeMap::<String, Option<f64>>::deserialize(d)?;
            Ok(raw.into_iter().map(|(k, v)| (k, v.unwrap_or(f64::NAN))).collect())
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(with = "nan_as_null")]
    pub value: f64,
    pub bound: Bound,
    pub detail: String,
}

impl Check {
    fn new(name: &str, value: f64, bound: Bound, passed: bool) -> Self {
        Check {
            name: name.into(),
            passed,
            value,
            bound,
            detail: String::new(),
        }
    }

    pub fn at_most(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, Bound::AtMost(limit), value <= limit)
    }

    pub fn at_least(name: &str, value: f64, limit: f64) -> Self {
        Self::new(name, value, Bound::AtLeast(limit), value >= limit)
    }

    pub fn within(name: &str, value: f64, lo: f64, hi: f64) -> Self {
        Self::new(name, value, Bound::Within(lo, hi), value >= lo && value <= hi)
    }

    pub fn holds(name: &str, passed: bool, value: f64) -> Self {
        Self::new(name, value, Bound::Holds, passed)
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    pub fn line(&self) -> String {
        let bound = match self.bound {
            Bound::AtMost(l) => format!("≤ {l:e}"),
            Bound::AtLeast(l) => format!("≥ {l:e}"),
            Bound::Within(a, b) => format!("∈ [{a}, {b}]"),
            Bound::Holds => String::new(),
        };
        let verdict = if self.passed { "ok  " } else { "FAIL" };
        let mut s = format!("{verdict} {:<40} {:<24e} {bound}", self.name, self.value);
        if !self.detail.is_empty() {
            s.push_str("  ");
            s.push_str(&self.detail);
        }
        s.trim_end().to_string()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    /// SHA-256 of the resolved configuration as TOML.
    pub config_sha256: String,
    pub code_version: String,
    pub seed: u64,
    pub levels: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportSummary {
    pub scenario: String,
    pub kind: ScenarioKind,
    pub passed: bool,
    pub checks: Vec<Check>,
    #[serde(with = "nan_as_null::map")]
    pub headline: BTreeMap<String, f64>,
    pub outputs: Vec<String>,
    pub plots: Vec<PlotSpec>,
    pub provenance: Provenance,
}

impl ReportSummary {
    pub fn check(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// Accumulates checks, headline numbers and output files for one run.
pub struct Run {
    pub dir: PathBuf,
    kind: ScenarioKind,
    scenario: String,
    provenance: Provenance,
    checks: Vec<Check>,
    headline: BTreeMap<String, f64>,
    outputs: Vec<String>,
    plots: Vec<PlotSpec>,
}

impl Run {
    pub fn start(cfg: &ScenarioConfig) -> Result<Self> {
        fs::create_dir_all(&cfg.output.dir)?;
        let levels = cfg.grid.levels().map(|l| cfg.grid.nodes_at(l)).collect();
        Ok(Run {
            dir: cfg.output.dir.clone(),
            kind: cfg.scenario.kind,
            scenario: cfg.scenario.id.clone(),
            provenance: Provenance {
                config_sha256: sha256_hex(cfg.to_toml()?.as_bytes()),
                code_version: env!("CARGO_PKG_VERSION").into(),
                seed: cfg.scenario.seed,
                levels,
            },
            checks: Vec::new(),
            headline: BTreeMap::new(),
            outputs: Vec::new(),
            plots: Vec::new(),
        })
    }

    pub fn check(&mut self, c: Check) {
        self.checks.push(c);
    }

    pub fn headline(&mut self, key: impl Into<String>, value: f64) {
        self.headline.insert(key.into(), value);
    }

    pub fn plot(&mut self, p: PlotSpec) {
        self.plots.push(p);
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn write(&mut self, name: &str, bytes: &[u8]) -> Result<()> {
        fs::write(self.path(name), bytes)?;
        self.outputs.push(name.into());
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        self.write(name, text.as_bytes())
    }

    /// Numeric table, every value with 17 significant digits.
    pub fn write_table(&mut self, name: &str, header: &[&str], rows: &[Vec<f64>]) -> Result<()> {
        let text_rows: Vec<Vec<String>> = rows.iter().map(|r| r.iter().map(|&v| fmt17(v)).collect()).collect();
        self.write_text_table(name, header, &text_rows)
    }

    pub fn write_text_table(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> Result<()> {
        let mut out = header.join(",");
        out.push('\n');
        for r in rows {
            out.push_str(&r.join(","));
            out.push('\n');
        }
        self.write(name, out.as_bytes())
    }

    /// Writes `summary.json` and returns the summary.
    pub fn finish(mut self) -> Result<ReportSummary> {
        self.outputs.push("summary.json".into());
        let summary = ReportSummary {
            scenario: self.scenario,
            kind: self.kind,
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
            headline: self.headline,
            outputs: self.outputs,
            plots: self.plots,
            provenance: self.provenance,
        };
        let mut text = serde_json::to_string_pretty(&summary)?;
        text.push('\n');
        fs::write(self.dir.join("summary.json"), text)?;
        Ok(summary)
    }
}

pub fn read_summary(path: &Path) -> Result<ReportSummary> {
    Ok(serde_json::from_slice(&fs::read(path)?)?)
}

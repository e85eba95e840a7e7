//! Scenario configuration.
//!
//! A config file is TOML with one table per section. Every key is optional:
//! the file is merged over the defaults of its scenario kind and the result is
//! decoded strictly, so a misspelt key is an error rather than a silent no-op.

use std::fmt;
use std::path::{Path, PathBuf};

use conflab::conformal::bump::BumpProfile;
use conflab::conformal::plane_wave::PlaneWaveFactor;
use conflab::dn::{BoundaryPatch, DnConfig, FaceSpec, PatchSpec};
use conflab::rigidity::{Diffeomorphism, PathSpec};
use conflab::{Side, SpacetimeGrid, StaticBase};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScenarioKind {
    Thm11,
    Thm12,
    Identities,
    Rigidity,
    Certify,
    Convergence,
    Dnmap,
    Solve,
}

impl ScenarioKind {
    pub const ALL: [ScenarioKind; 8] = [
        ScenarioKind::Thm11,
        ScenarioKind::Thm12,
        ScenarioKind::Identities,
        ScenarioKind::Rigidity,
        ScenarioKind::Certify,
        ScenarioKind::Convergence,
        ScenarioKind::Dnmap,
        ScenarioKind::Solve,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ScenarioKind::Thm11 => "thm11",
            ScenarioKind::Thm12 => "thm12",
            ScenarioKind::Identities => "identities",
            ScenarioKind::Rigidity => "rigidity",
            ScenarioKind::Certify => "certify",
            ScenarioKind::Convergence => "convergence",
            ScenarioKind::Dnmap => "dnmap",
            ScenarioKind::Solve => "solve",
        }
    }
}

impl fmt::Display for ScenarioKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioMeta {
    pub kind: ScenarioKind,
    pub id: String,
    pub seed: u64,
}

/// Unit box `[0,1]ⁿ × [0,T]` with `nodes` per axis at level 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dim: usize,
    pub nodes: usize,
    pub t_final: f64,
    pub cfl: f64,
    /// Studies run levels `0..=finest_level`; single-grid scenarios run this level.
    pub finest_level: u32,
}

impl GridConfig {
    pub fn nodes_at(&self, level: u32) -> usize {
        SpacetimeGrid::nodes_at_level(self.nodes, level)
    }

    pub fn grid(&self, level: u32) -> Result<SpacetimeGrid> {
        Ok(SpacetimeGrid::unit(self.dim, self.nodes_at(level), self.t_final, self.cfl)?)
    }

    pub fn levels(&self) -> impl Iterator<Item = u32> {
        0..=self.finest_level
    }
}

/// Plane-wave factor `1 + A·ρ_w((x − x₀)·θ − (t − t₀))`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FactorConfig {
    pub theta: Vec<f64>,
    pub x0: Vec<f64>,
    pub t0: f64,
    pub amplitude: f64,
    pub width: f64,
}

impl FactorConfig {
    pub fn build(&self) -> Result<PlaneWaveFactor> {
        let profile = BumpProfile::new(self.amplitude, self.width, 0.0)?;
        Ok(PlaneWaveFactor::new(self.theta.clone(), self.x0.clone(), self.t0, profile)?)
    }

    pub fn with_amplitude(&self, amplitude: f64) -> Self {
        FactorConfig {
            amplitude,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DnSection {
    pub sources: String,
    pub receivers: String,
    /// Bumps per tangential axis, then in time.
    pub counts: Vec<usize>,
    pub stride: usize,
    pub memory_cap_mb: usize,
    /// Metric assembled by the `dnmap` scenario.
    pub metric: MetricChoice,
}

impl DnSection {
    pub fn dn_config(&self) -> DnConfig {
        DnConfig {
            stride: self.stride,
            memory_cap_bytes: self.memory_cap_mb << 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm11Section {
    /// Negative control: a slab that crosses the receiving patch.
    pub control: FactorConfig,
    pub run_control: bool,
    /// Grids of the transport-oracle ladder, starting from level 0 and halving `h`.
    pub transport_levels: usize,
    /// Extra amplitudes for a sweep at level 0 (empty to skip).
    pub amplitude_sweep: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Thm12Section {
    /// Patch carrying the Dirichlet data Ψ of the factor equation.
    pub psi_patch: String,
    pub psi_amplitude: f64,
    /// Requested λ values; the first is the headline run.
    pub lambdas: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IdentitiesSection {
    pub hyperbolicity_samples: usize,
    /// Counterexample metric checked for strict hyperbolicity besides the suite factor.
    pub counterexample: FactorConfig,
    pub counterexample_nodes: usize,
    pub counterexample_t_final: f64,
    /// Side of the square window centred on `x₀` for the refinement study of
    /// `q` on the counterexample factor. The window spans three time steps of
    /// the coarsest grid around `t₀`.
    pub q_window: f64,
    /// Coarsest node count of that study; each further level halves `h`.
    pub q_nodes: usize,
    pub q_levels: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RigiditySection {
    pub steps: usize,
    pub cancellation_samples: usize,
    pub paths: Vec<PathSpec>,
    pub pullback: Diffeomorphism,
    pub pullback_points: Vec<Vec<f64>>,
    pub pullback_steps: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CertifySection {
    pub amplitudes: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricChoice {
    Minkowski,
    /// `f^{p−2}η` with the plane-wave factor.
    Scaled,
    /// The static base `−dt² + a(x)dx²`.
    Base,
}

impl MetricChoice {
    pub fn name(self) -> &'static str {
        match self {
            MetricChoice::Minkowski => "minkowski",
            MetricChoice::Scaled => "scaled",
            MetricChoice::Base => "base",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolveSection {
    pub metric: MetricChoice,
    /// Index into the source basis of `dn.sources`.
    pub source: usize,
    pub snapshot: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub scenario: ScenarioMeta,
    pub grid: GridConfig,
    pub factor: FactorConfig,
    pub base: StaticBase,
    pub patches: Vec<PatchSpec>,
    pub dn: DnSection,
    pub thm11: Thm11Section,
    pub thm12: Thm12Section,
    pub identities: IdentitiesSection,
    pub rigidity: RigiditySection,
    pub certify: CertifySection,
    pub solve: SolveSection,
    pub output: OutputSection,
}

fn lateral(id: &str, axis: usize, side: Side, range: (f64, f64), time: (f64, f64)) -> PatchSpec {
    PatchSpec {
        id: id.into(),
        faces: vec![FaceSpec {
            axis,
            side,
            ranges: vec![range],
        }],
        time,
    }
}

/// Slab entering through `x¹ = 1` and reaching `x¹ = 0` only at `t ≈ 2.95`.
fn thm11_factor() -> FactorConfig {
    FactorConfig {
        theta: vec![-1.0, 0.0],
        x0: vec![0.5, 0.5],
        t0: 2.6,
        amplitude: 1.0,
        width: 0.15,
    }
}

impl ScenarioConfig {
    pub fn defaults(kind: ScenarioKind) -> Self {
        let desk = GridConfig {
            dim: 2,
            nodes: 65,
            t_final: 3.0,
            cfl: 0.5,
            finest_level: 1,
        };
        let mut cfg = ScenarioConfig {
            scenario: ScenarioMeta {
                kind,
                id: kind.name().into(),
                seed: 42,
            },
            grid: desk.clone(),
            factor: thm11_factor(),
            base: StaticBase::Flat,
            patches: vec![lateral("gamma", 1, Side::Lower, (0.25, 0.75), (0.2, 2.8))],
            dn: DnSection {
                sources: "gamma".into(),
                receivers: "gamma".into(),
                counts: vec![4, 2],
                stride: 2,
                memory_cap_mb: 2048,
                metric: MetricChoice::Scaled,
            },
            thm11: Thm11Section {
                control: FactorConfig {
                    theta: vec![1.0, 0.0],
                    t0: 1.5,
                    ..thm11_factor()
                },
                run_control: false,
                transport_levels: 3,
                amplitude_sweep: Vec::new(),
            },
            thm12: Thm12Section {
                psi_patch: "psi".into(),
                psi_amplitude: 1.0,
                lambdas: vec![0.2, 0.1, 0.05],
            },
            identities: IdentitiesSection {
                hyperbolicity_samples: 1000,
                counterexample: thm11_factor(),
                counterexample_nodes: 65,
                counterexample_t_final: 3.0,
                q_window: 0.375,
                q_nodes: 385,
                q_levels: 3,
            },
            rigidity: RigiditySection {
                steps: 1000,
                cancellation_samples: 200,
                paths: vec![
                    PathSpec::Bent {
                        start: vec![2.0, 0.0, 0.4],
                        end: vec![2.6, 0.5, 0.5],
                        bend: vec![0.1, 0.1, 0.05],
                    },
                    PathSpec::Line {
                        start: vec![1.0, 0.0, 0.5],
                        end: vec![2.9, 0.9, 0.2],
                    },
                ],
                pullback: Diffeomorphism::Sine {
                    epsilon: 0.05,
                    omega: 3.0,
                },
                pullback_points: vec![vec![2.6, 0.5, 0.5], vec![2.4, 0.3, 0.6], vec![2.75, 0.45, 0.52]],
                pullback_steps: vec![0.04, 0.02, 0.01],
            },
            certify: CertifySection {
                amplitudes: vec![0.5, 1.0, 2.0],
            },
            solve: SolveSection {
                metric: MetricChoice::Scaled,
                source: 0,
                snapshot: true,
            },
            output: OutputSection {
                dir: PathBuf::from("out").join(kind.name()),
            },
        };
        match kind {
            ScenarioKind::Thm11 => {}
            ScenarioKind::Thm12 => {
                cfg.base = StaticBase::Gaussian {
                    amplitude: 0.3,
                    center: vec![0.5, 0.5],
                    scale: 0.1,
                };
                cfg.patches = vec![
                    lateral("gamma1", 1, Side::Lower, (0.25, 0.75), (0.2, 2.8)),
                    lateral("gamma2", 1, Side::Upper, (0.25, 0.75), (0.2, 2.8)),
                    lateral("psi", 2, Side::Lower, (0.3, 0.7), (0.2, 1.4)),
                ];
                cfg.dn.sources = "gamma1".into();
                cfg.dn.receivers = "gamma2".into();
            }
            ScenarioKind::Identities => {
                // wide slab: the second-derivative identities reach their
                // asymptotic order from 65 nodes on
                cfg.grid.t_final = 0.25;
                cfg.factor = FactorConfig {
                    theta: vec![1.0, 0.0],
                    x0: vec![0.5, 0.5],
                    t0: 0.125,
                    amplitude: 1.0,
                    width: 2.0,
                };
            }
            ScenarioKind::Rigidity => {
                cfg.grid.nodes = 17;
                cfg.grid.finest_level = 0;
            }
            ScenarioKind::Certify | ScenarioKind::Dnmap | ScenarioKind::Solve => cfg.grid.finest_level = 0,
            ScenarioKind::Convergence => {
                cfg = ScenarioConfig {
                    grid: GridConfig {
                        nodes: 33,
                        t_final: 1.0,
                        finest_level: 2,
                        ..desk
                    },
                    patches: vec![lateral("gamma", 1, Side::Lower, (0.25, 0.75), (0.05, 0.95))],
                    ..cfg
                };
            }
        }
        cfg
    }

    /// Parses `text` over the defaults of `kind`. A `scenario.kind` in the
    /// file must agree with `kind`.
    pub fn from_toml(kind: ScenarioKind, text: &str) -> Result<Self> {
        let user: toml::Table = toml::from_str(text)?;
        if let Some(k) = user.get("scenario").and_then(|s| s.get("kind")) {
            let named = k.as_str().unwrap_or_default();
            if named != kind.name() {
                return Err(CliError::Config(format!(
                    "config is for scenario {named:?} but {kind} was requested"
                )));
            }
        }
        let mut merged = toml::Table::try_from(Self::defaults(kind)).map_err(|e| CliError::Config(e.to_string()))?;
        merge(&mut merged, user);
        let cfg: ScenarioConfig = merged.try_into()?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(kind: ScenarioKind, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
        Self::from_toml(kind, &text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| CliError::Config(e.to_string()))
    }

    /// Static checks that need no grid.
    pub fn validate(&self) -> Result<()> {
        let g = &self.grid;
        if g.dim < 2 || g.nodes < 3 {
            return Err(CliError::Config(format!("grid needs dim ≥ 2 and nodes ≥ 3, got {g:?}")));
        }
        if !(g.t_final > 0.0) || !(g.cfl > 0.0) {
            return Err(CliError::Config("grid.t_final and grid.cfl must be > 0".into()));
        }
        let mut factors = vec![("factor", &self.factor), ("identities.counterexample", &self.identities.counterexample)];
        if self.thm11.run_control {
            factors.push(("thm11.control", &self.thm11.control));
        }
        for (name, f) in factors {
            if f.theta.len() != g.dim || f.x0.len() != g.dim {
                return Err(CliError::Config(format!("{name}: θ and x₀ need {} components", g.dim)));
            }
            f.build().map_err(|e| CliError::Config(format!("{name}: {e}")))?;
        }
        let mut ids: Vec<&str> = self.patches.iter().map(|p| p.id.as_str()).collect();
        ids.sort_unstable();
        if ids.windows(2).any(|w| w[0] == w[1]) {
            return Err(CliError::Config(format!("duplicate patch ids in {ids:?}")));
        }
        let mut referenced = vec![self.dn.sources.as_str(), self.dn.receivers.as_str()];
        if self.scenario.kind == ScenarioKind::Thm12 {
            referenced.push(&self.thm12.psi_patch);
        }
        for id in referenced {
            self.patch_spec(id)?;
        }
        if self.dn.counts.len() != g.dim || self.dn.counts.contains(&0) {
            return Err(CliError::Config(format!(
                "dn.counts needs {} positive entries ({} tangential + time)",
                g.dim,
                g.dim - 1
            )));
        }
        if self.dn.stride == 0 {
            return Err(CliError::Config("dn.stride must be ≥ 1".into()));
        }
        let id = &self.identities;
        if !(id.q_window > 0.0) || id.q_nodes < 4 || id.q_levels < 2 {
            return Err(CliError::Config(
                "identities.q_window must be > 0 with q_nodes ≥ 4 and q_levels ≥ 2".into(),
            ));
        }
        if self.thm11.transport_levels < 3 {
            return Err(CliError::Config("thm11.transport_levels must be ≥ 3 for two refinements".into()));
        }
        if self.thm12.lambdas.is_empty() || self.thm12.lambdas.iter().any(|&l| !(l > 0.0)) {
            return Err(CliError::Config("thm12.lambdas must be non-empty and positive".into()));
        }
        Ok(())
    }

    pub fn patch_spec(&self, id: &str) -> Result<&PatchSpec> {
        self.patches
            .iter()
            .find(|p| p.id == id)
            .ok_or_else(|| CliError::Config(format!("no patch with id {id:?}")))
    }

    pub fn patch(&self, grid: &SpacetimeGrid, id: &str) -> Result<BoundaryPatch> {
        Ok(BoundaryPatch::from_spec(grid, self.patch_spec(id)?)?)
    }
}

/// Recursive table merge; `over` wins and arrays are replaced whole.
fn merge(base: &mut toml::Table, over: toml::Table) {
    for (key, value) in over {
        match (base.get_mut(&key), value) {
            (Some(toml::Value::Table(b)), toml::Value::Table(o)) => merge(b, o),
            (_, v) => {
                base.insert(key, v);
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_validate_and_round_trip() {
        for kind in ScenarioKind::ALL {
            let cfg = ScenarioConfig::defaults(kind);
            cfg.validate().unwrap();
            let back = ScenarioConfig::from_toml(kind, &cfg.to_toml().unwrap()).unwrap();
            assert_eq!(back, cfg);
        }
    }

    #[test]
    fn partial_file_overrides_defaults() {
        let cfg = ScenarioConfig::from_toml(ScenarioKind::Thm11, "[grid]\nnodes = 33\n[factor]\namplitude = 2.0\n").unwrap();
        assert_eq!(cfg.grid.nodes, 33);
        assert_eq!(cfg.grid.t_final, 3.0);
        assert_eq!(cfg.factor.amplitude, 2.0);
        assert_eq!(cfg.factor.width, 0.15);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        assert!(ScenarioConfig::from_toml(ScenarioKind::Thm11, "[grid]\nnode = 33\n").is_err());
        assert!(ScenarioConfig::from_toml(ScenarioKind::Thm11, "colour = 1\n").is_err());
        assert!(ScenarioConfig::from_toml(ScenarioKind::Thm11, "[factor]\ntheta = [1.0, 1.0]\n").is_err());
        assert!(ScenarioConfig::from_toml(ScenarioKind::Thm11, "[dn]\nsources = \"nowhere\"\n").is_err());
        assert!(ScenarioConfig::from_toml(ScenarioKind::Thm11, "[scenario]\nkind = \"thm12\"\n").is_err());
    }
}

//! Finite-difference laboratory for conformally scaled Lorentzian metrics
//! `c(t,x)·(−dt² + a(x) dx²)` on a box: wave solves, partial-data
//! Dirichlet-to-Neumann matrices, conformal-invariance identities, curvature,
//! and the jet-rigidity and Hessian non-isometry checks.
//!
//! The central construction is a plane-wave factor `f` with `□_η f = 0`. The
//! operator identity `□_{f^{p−2}η}(f⁻¹u) = f^{1−p}□_η u` maps η-waves to
//! `f^{p−2}η`-waves, so both metrics produce the same boundary data on any
//! patch the support of `f − 1` avoids, while `f^{p−2}η` is not flat.

pub mod conformal;
pub mod dn;
pub mod error;
pub mod field;
pub mod function;
pub mod geometry;
pub mod grid;
pub mod metric;
pub mod par;
pub mod rigidity;
pub mod solver;
pub mod stencil;

pub use error::{LabError, Result};
pub use field::{ScalarField, TensorField, TensorLayout};
pub use grid::{Face, Side, SpacetimeGrid};
pub use metric::{Factor, MetricSpec, StaticBase, TimeLevel};

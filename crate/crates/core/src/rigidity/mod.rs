//! Rigidity of conformal diffeomorphisms with identity boundary 1-jets, and
//! the Hessian certificate that a scaled Minkowski metric is not a pullback of
//! Minkowski space.

pub mod certificate;
pub mod jet;
pub mod pullback;

pub use certificate::{
    critical_r00, hessian_obstruction, nonisometry_certificate, CertificateReport, CriticalSample, Verdict,
};
pub use jet::{
    equilibrium_cancellation, geometry_at, integrate_jet_ode, jet_ode_rhs, rhs_terms, CancellationReport, JetState,
    PathSpec, RhsTerms, Trajectory,
};
pub use pullback::{christoffel_pullback_check, Diffeomorphism, PullbackReport};

//! Numerical verification toolkit for the reduced-energy functionals of
//! axisymmetric vacuum and Einstein/Maxwell black-hole data.
//!
//! The library evaluates the singular harmonic-map energies `M`, `E` and `I`
//! on axisymmetric grids, samples the extreme Kerr and extreme Kerr-Newman
//! maps in closed form, builds geodesic deformation families into the
//! hyperbolic half-plane ℍ² and the complex hyperbolic plane ℍ²_ℂ, and checks
//! the convexity, first-variation, cut-and-paste and mass/angular-momentum
//! gap inequalities at desk scale.
//!
//! Layout:
//! - [`targets`]  — geometry of the two target spaces (distances, geodesics,
//!   curvature, Kato inequality helpers);
//! - [`kerr`]     — closed-form extremal maps with analytic partials, axis
//!   limits and asymptotic-rate checks;
//! - [`grid`]     — logarithmic-spherical grids, integration regions,
//!   quadrature, finite differences and bump generators;
//! - [`energy`]   — the five energy functionals, the two energy/boundary
//!   identities and the ADM mass lower bound;
//! - [`variation`] — geodesic families, first/second variation, Euler-Lagrange
//!   residuals and the Sobolev gap checks;
//! - [`cutpaste`] — the three cutoff families and the cut-and-paste
//!   approximation operators with convergence studies;
//! - [`classes`]  — admissibility validators for the perturbation classes.

pub mod classes;
pub mod cutpaste;
pub mod energy;
pub mod grid;
pub mod kerr;
pub mod numerics;
pub mod targets;
pub mod variation;

pub use kerr::{KerrNewmanParams, KerrParams};
pub use targets::{Ch2Point, GeodesicCurve, H2Point, TargetPoint};

/// Errors produced across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Input outside an operation's mathematical domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// An iterative solver exhausted its budget without meeting tolerance.
    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    Convergence { iterations: usize, residual: f64 },
    /// A requested region is not covered by the active grid.
    #[error("coverage error: {0}")]
    Coverage(String),
    /// Invalid build/run configuration.
    #[error("configuration error: {0}")]
    Config(String),
    /// Input data unusable for the requested analysis.
    #[error("data error: {0}")]
    Data(String),
    /// Incompatible argument pairing.
    #[error("usage error: {0}")]
    Usage(String),
    /// A field violates its declared perturbation class.
    #[error("class error: {0}")]
    Class(String),
}

pub type Result<T> = std::result::Result<T, Error>;

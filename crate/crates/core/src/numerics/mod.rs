//! Scalar numerics used throughout the crate: adaptive Gauss–Kronrod
//! quadrature with mandatory breakpoints, Brent root bracketing, smallest
//! eigenpairs of symmetric-definite pencils, and an embedded Runge–Kutta
//! integrator.

mod eigen;
mod ode;
mod quad;
mod root;

pub use eigen::{smallest_generalized_eigenpair, SymTridiagPencil};
pub use ode::{integrate, OdeOptions};
pub use quad::{adaptive_quad, adaptive_quad_singular, gauss_legendre_7, QuadratureSpec};
pub use root::{bracketed_root, RootSpec};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NumericsError {
    #[error("quadrature did not converge: estimated error {error:e} after {subdivisions} subdivisions")]
    NonConvergence { error: f64, subdivisions: usize },
    #[error("no sign change on [{lo}, {hi}]: f(lo) = {f_lo:e}, f(hi) = {f_hi:e}")]
    NoSignChange {
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },
    #[error("root iteration did not converge within {0} iterations")]
    RootNonConvergence(usize),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("ODE integration failed at t = {t}: {reason}")]
    OdeFailure { t: f64, reason: String },
}

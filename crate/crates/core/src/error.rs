use thiserror::Error;

use crate::numerics::NumericsError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("p = {0} lies outside [-1, 0]")]
    OutOfDomain(f64),
    #[error("lambda = {lambda} is not admissible: lambda + Gamma({p}) = {value:e} <= 0")]
    NonAdmissibleLambda { lambda: f64, p: f64, value: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invalid wavelength {0}: must be positive and finite")]
    InvalidWavelength(f64),
    #[error("no bracket found: {0}")]
    BracketFailure(String),
    #[error("no solution: {0}")]
    NoSolution(String),
    #[error("Rayleigh quotient denominator vanishes")]
    ZeroDenominator,
    #[error("no mode-{k} solution: principal eigenvalue {mu} differs from {target}")]
    NoModeSolution { k: u32, mu: f64, target: f64 },
    #[error("eigenvalue solve failed: {0}")]
    EigenFailure(String),
    #[error(
        "stagnation at amplitude {amplitude}: min(h_p + 1) = {min_jacobian:e}, \
         critical amplitude about {critical_amplitude}"
    )]
    StagnationAtAmplitude {
        amplitude: f64,
        min_jacobian: f64,
        critical_amplitude: f64,
    },
    #[error(transparent)]
    Numerics(#[from] NumericsError),
}

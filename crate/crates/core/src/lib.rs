//! Local bifurcation of steady periodic water waves with fixed mean depth and
//! (possibly discontinuous) vorticity.
//!
//! The pipeline runs from a vorticity distribution `γ(p)` through the laminar
//! flow family, the principal eigenvalue `μ(λ)` of a weighted Sturm–Liouville
//! problem, and the bifurcation point `μ(λ*) = −1`, to a first-order
//! reconstruction of the bifurcating wave.

pub mod bifurcation;
pub mod error;
pub mod laminar;
pub mod numerics;
pub mod options;
pub mod reconstruct;
pub mod spectral;
pub mod vorticity;

pub use error::{Error, Result};
pub use options::SolverOptions;
pub use vorticity::{FlowParameters, GammaProfile, VorticityDistribution};
pub use bifurcation::{find_lambda_star, BifurcationOutcome, BifurcationPoint, CriteriaReport};
pub use spectral::{principal_eigen, shooting_mu, ModeSolution};
pub use reconstruct::{build_wave, weak_residual, WaveField};

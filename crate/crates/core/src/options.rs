use crate::numerics::{QuadratureSpec, RootSpec};

/// Discretization and tolerance knobs shared by the solvers.
#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Nodes of the coarse finite-element mesh; the fine mesh bisects every
    /// element of it.
    pub mesh_points: usize,
    pub quad_abs_tol: f64,
    /// Absolute tolerance for scalar root searches in `λ` and `p0`.
    pub root_tol: f64,
    /// Offsets `ε` tried, in order, for `λ = −Γ_min + ε` when bracketing.
    pub lambda_margin_schedule: Vec<f64>,
    /// A mode-`k` solution exists when `|μ + k²| <= mode_tol · k²`.
    pub mode_tol: f64,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            mesh_points: 2001,
            quad_abs_tol: 1e-12,
            root_tol: 1e-10,
            lambda_margin_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5, 1e-6, 1e-7, 1e-8],
            mode_tol: 1e-6,
        }
    }
}

impl SolverOptions {
    pub fn quadrature(&self) -> QuadratureSpec {
        QuadratureSpec::with_tolerances(self.quad_abs_tol, 1e-12)
    }

    pub fn root(&self) -> RootSpec {
        RootSpec::with_x_tol(self.root_tol)
    }
}

//! The weighted Sturm–Liouville problem
//!
//! ```text
//! (a³ M_p)_p = −μ d² a M   on (−1, 0),
//! a³ M_p = (g d³ / p0²) M  at p = 0,      M(−1) = 0,
//! ```
//!
//! with `a = √(Γ(p) + λ)`. The principal eigenvalue `μ(λ)` is the minimum of
//! the Rayleigh quotient
//!
//! ```text
//! F(λ, φ) = (−g d³ φ(0)² + p0² ∫ a³ φ_p²) / (p0² d² ∫ a φ²),
//! ```
//!
//! computed here with piecewise-linear finite elements and checked against an
//! independent shooting method based on the Prüfer angle.

use crate::error::{Error, Result};
use crate::numerics::{
    adaptive_quad, bracketed_root, gauss_legendre_7, integrate, OdeOptions, QuadratureSpec,
    RootSpec, SymTridiagPencil,
};
use crate::options::SolverOptions;
use crate::vorticity::{FlowParameters, GammaProfile};

/// An eigenpair of the Sturm–Liouville problem at fixed `λ`.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeSolution {
    pub lambda: f64,
    /// Wavenumber this solution represents (`μ = −k²`); zero for a bare
    /// principal eigenpair.
    pub k: u32,
    /// Eigenvalue, Richardson-extrapolated over two mesh levels.
    pub mu: f64,
    /// Discrete eigenvalue on the stored (fine) mesh; equals the Rayleigh
    /// quotient of the stored piecewise-linear `M`.
    pub mu_mesh: f64,
    pub nodes: Vec<f64>,
    /// `M` at the nodes, `M(−1) = 0` and `M(0) = 1` when `M(0) ≠ 0`.
    pub m: Vec<f64>,
    /// Recovered flux `a³ M_p` at the nodes.
    pub flux: Vec<f64>,
}

impl ModeSolution {
    /// Piecewise-linear interpolant of `M`.
    pub fn value_at(&self, p: f64) -> f64 {
        let n = self.nodes.len();
        let k = self.nodes.partition_point(|&x| x <= p).clamp(1, n - 1);
        let (x0, x1) = (self.nodes[k - 1], self.nodes[k]);
        let t = (p - x0) / (x1 - x0);
        self.m[k - 1] + t * (self.m[k] - self.m[k - 1])
    }

    /// Slope of the interpolant on each element.
    pub fn element_slopes(&self) -> Vec<f64> {
        self.nodes
            .windows(2)
            .zip(self.m.windows(2))
            .map(|(x, m)| (m[1] - m[0]) / (x[1] - x[0]))
            .collect()
    }

    /// `M_p` at the nodes, from the recovered flux.
    pub fn derivative_at_nodes(&self, profile: &GammaProfile) -> Result<Vec<f64>> {
        self.nodes
            .iter()
            .zip(&self.flux)
            .map(|(&p, &w)| Ok(w / profile.coefficient_a(self.lambda, p)?.powi(3)))
            .collect()
    }

    pub fn mesh_width(&self) -> f64 {
        self.nodes
            .windows(2)
            .map(|w| w[1] - w[0])
            .fold(0.0, f64::max)
    }

    /// Mismatch at each vorticity jump between the flux recovered downward
    /// from the surface condition and the flux recovered upward from the
    /// bed element, both from the discrete equations on each side.
    pub fn flux_jump_defects(&self, profile: &GammaProfile) -> Result<Vec<(f64, f64)>> {
        let upward = upward_flux(profile, self.lambda, self.mu_mesh, &self.nodes, &self.m);
        profile
            .jump_points()
            .iter()
            .map(|&p| {
                let j = self
                    .nodes
                    .iter()
                    .position(|&x| x == p)
                    .ok_or_else(|| Error::InvalidParameter(format!("jump {p} is not a mesh node")))?;
                Ok((p, (self.flux[j] - upward[j]).abs()))
            })
            .collect()
    }

    /// Sign changes of `M` at the interior nodes.
    pub fn interior_sign_changes(&self) -> usize {
        let inner = &self.m[1..];
        inner
            .windows(2)
            .filter(|w| w[0] * w[1] < 0.0)
            .count()
    }

    /// `F(λ, M)` of the cubic Hermite interpolant built from the nodal values
    /// and the recovered slopes `w / a³`. Much closer to `mu` than the
    /// piecewise-linear quotient `mu_mesh`.
    pub fn rayleigh_quotient(&self, profile: &GammaProfile, opts: &SolverOptions) -> Result<f64> {
        let slopes = self.derivative_at_nodes(profile)?;
        let n = self.nodes.len();
        let locate = |p: f64| {
            let k = self.nodes.partition_point(|&x| x <= p).clamp(1, n - 1);
            let h = self.nodes[k] - self.nodes[k - 1];
            (k, h, (p - self.nodes[k - 1]) / h)
        };
        let value = |p: f64| {
            let (k, h, t) = locate(p);
            let (t2, t3) = (t * t, t * t * t);
            (2.0 * t3 - 3.0 * t2 + 1.0) * self.m[k - 1]
                + (t3 - 2.0 * t2 + t) * h * slopes[k - 1]
                + (3.0 * t2 - 2.0 * t3) * self.m[k]
                + (t3 - t2) * h * slopes[k]
        };
        let slope = |p: f64| {
            let (k, h, t) = locate(p);
            let t2 = t * t;
            6.0 * (t2 - t) * (self.m[k - 1] - self.m[k]) / h
                + (3.0 * t2 - 4.0 * t + 1.0) * slopes[k - 1]
                + (3.0 * t2 - 2.0 * t) * slopes[k]
        };
        let inner = self.nodes[1..n - 1].to_vec();
        rayleigh_quotient(profile, self.lambda, value, slope, &inner, opts)
    }
}

/// `F(λ, φ)` for a trial function with `φ(−1) = 0`; `breakpoints` lists
/// interior points where `φ_p` may jump.
pub fn rayleigh_quotient<P, D>(
    profile: &GammaProfile,
    lambda: f64,
    phi: P,
    phi_p: D,
    breakpoints: &[f64],
    opts: &SolverOptions,
) -> Result<f64>
where
    P: Fn(f64) -> f64,
    D: Fn(f64) -> f64,
{
    profile.check_admissible(lambda)?;
    if phi(-1.0).abs() > 1e-12 {
        return Err(Error::InvalidParameter("trial function must vanish at p = -1".into()));
    }
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let mut cuts: Vec<f64> = breakpoints
        .iter()
        .chain(profile.critical_points().iter())
        .copied()
        .filter(|&x| x > -1.0 && x < 0.0)
        .collect();
    cuts.sort_by(|a, b| a.partial_cmp(b).unwrap());
    cuts.dedup();
    let spec = QuadratureSpec {
        max_subdivisions: cuts.len() + 4000,
        ..opts.quadrature().with_breakpoints(cuts)
    };
    let a = |p: f64| (lambda + profile.primitive_unchecked(p)).sqrt();
    let stiffness = adaptive_quad(|p| a(p).powi(3) * phi_p(p).powi(2), -1.0, 0.0, &spec)?;
    let mass = adaptive_quad(|p| a(p) * phi(p).powi(2), -1.0, 0.0, &spec)?;
    if mass <= 1e-300 {
        return Err(Error::ZeroDenominator);
    }
    let surface = phi(0.0);
    Ok((-g * d.powi(3) * surface * surface + p0 * p0 * stiffness) / (p0 * p0 * d * d * mass))
}

/// Mesh on `[−1, 0]` containing every jump and `p1` as nodes, graded toward
/// `p1` when `a(λ, p1)` is small compared with its maximum.
pub(crate) fn build_mesh(profile: &GammaProfile, lambda: f64, points: usize) -> Vec<f64> {
    let mut anchors = vec![-1.0];
    anchors.extend(profile.critical_points());
    anchors.push(0.0);
    let elements = points.saturating_sub(1).max(anchors.len() - 1);

    // the coefficient varies on a scale ~ (λ + Γ_min)/(λ + Γ_max) near p1;
    // graded elements x = t^q put the first node inside that layer
    let p1 = profile.p1();
    let a2_min = lambda + profile.gamma_min();
    let a2_max = (0..=64)
        .map(|i| lambda + profile.primitive_unchecked(-1.0 + i as f64 / 64.0))
        .fold(a2_min, f64::max);
    let ratio = a2_min / a2_max;
    let power = if ratio < 0.1 {
        ((100.0 / ratio).ln() / (elements as f64).ln()).clamp(1.0, 3.0)
    } else {
        1.0
    };
    let graded = power > 1.0;

    let lengths: Vec<f64> = anchors.windows(2).map(|w| w[1] - w[0]).collect();
    let mut counts: Vec<usize> = lengths
        .iter()
        .map(|l| ((elements as f64 * l).floor() as usize).max(2))
        .collect();
    let mut remainders: Vec<(usize, f64)> = lengths
        .iter()
        .enumerate()
        .map(|(i, l)| (i, elements as f64 * l - (elements as f64 * l).floor()))
        .collect();
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap().then(a.0.cmp(&b.0)));
    let assigned: usize = counts.iter().sum();
    for &(i, _) in remainders.iter().take(elements.saturating_sub(assigned)) {
        counts[i] += 1;
    }

    let mut nodes = vec![-1.0];
    for (w, &n) in anchors.windows(2).zip(&counts) {
        let (lo, hi) = (w[0], w[1]);
        for i in 1..=n {
            let t = i as f64 / n as f64;
            let x = if graded && lo == p1 {
                lo + (hi - lo) * t.powf(power)
            } else if graded && hi == p1 {
                hi - (hi - lo) * (1.0 - t).powf(power)
            } else {
                lo + (hi - lo) * t
            };
            nodes.push(if i == n { hi } else { x });
        }
    }
    nodes
}

fn refine(nodes: &[f64]) -> Vec<f64> {
    let mut fine = Vec::with_capacity(2 * nodes.len() - 1);
    for w in nodes.windows(2) {
        fine.push(w[0]);
        fine.push(0.5 * (w[0] + w[1]));
    }
    fine.push(*nodes.last().unwrap());
    fine
}

struct MeshSolve {
    mu: f64,
    m: Vec<f64>,
}

fn solve_on_mesh(profile: &GammaProfile, lambda: f64, nodes: &[f64]) -> Result<MeshSolve> {
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let n = nodes.len() - 1;
    let a = |p: f64| (lambda + profile.primitive_unchecked(p)).sqrt();
    let mut a_diag = vec![0.0; n];
    let mut a_off = vec![0.0; n.saturating_sub(1)];
    let mut b_diag = vec![0.0; n];
    let mut b_off = vec![0.0; n.saturating_sub(1)];
    let p02 = p0 * p0;
    for e in 0..n {
        let (x0, x1) = (nodes[e], nodes[e + 1]);
        let h = x1 - x0;
        let k = p02 * gauss_legendre_7(|p| a(p).powi(3), x0, x1) / (h * h);
        let m00 = p02 * d * d * gauss_legendre_7(|p| a(p) * ((x1 - p) / h).powi(2), x0, x1);
        let m01 = p02 * d * d * gauss_legendre_7(|p| a(p) * (x1 - p) * (p - x0) / (h * h), x0, x1);
        let m11 = p02 * d * d * gauss_legendre_7(|p| a(p) * ((p - x0) / h).powi(2), x0, x1);
        // unknown j corresponds to node j + 1; node 0 carries the Dirichlet condition
        if e > 0 {
            a_diag[e - 1] += k;
            b_diag[e - 1] += m00;
            a_off[e - 1] -= k;
            b_off[e - 1] += m01;
        }
        a_diag[e] += k;
        b_diag[e] += m11;
    }
    a_diag[n - 1] -= g * d.powi(3);
    let pencil = SymTridiagPencil::new(a_diag, a_off, b_diag, b_off)?;
    let (mu, v) = pencil
        .smallest_eigenpair()
        .map_err(|e| Error::EigenFailure(e.to_string()))?;
    let mut m = Vec::with_capacity(n + 1);
    m.push(0.0);
    m.extend(v);
    Ok(MeshSolve { mu, m })
}

pub(crate) fn recover_flux(profile: &GammaProfile, lambda: f64, mu: f64, nodes: &[f64], m: &[f64]) -> Vec<f64> {
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let n = nodes.len();
    let mut flux = vec![0.0; n];
    flux[n - 1] = g * d.powi(3) * m[n - 1] / (p0 * p0);
    for e in (0..n - 1).rev() {
        let integral = element_mass_integral(profile, lambda, nodes[e], nodes[e + 1], m[e], m[e + 1]);
        flux[e] = flux[e + 1] + mu * d * d * integral;
    }
    flux
}

fn element_mass_integral(profile: &GammaProfile, lambda: f64, x0: f64, x1: f64, m0: f64, m1: f64) -> f64 {
    let h = x1 - x0;
    gauss_legendre_7(
        |p| {
            let a = (lambda + profile.primitive_unchecked(p)).sqrt();
            a * (m0 * (x1 - p) + m1 * (p - x0)) / h
        },
        x0,
        x1,
    )
}

fn upward_flux(profile: &GammaProfile, lambda: f64, mu: f64, nodes: &[f64], m: &[f64]) -> Vec<f64> {
    let d2 = profile.flow().d.powi(2);
    let a = |p: f64| (lambda + profile.primitive_unchecked(p)).sqrt();
    let (x0, x1) = (nodes[0], nodes[1]);
    let h = x1 - x0;
    let k = gauss_legendre_7(|p| a(p).powi(3), x0, x1) / (h * h);
    let m01 = gauss_legendre_7(|p| a(p) * (x1 - p) * (p - x0) / (h * h), x0, x1);
    let m00 = gauss_legendre_7(|p| a(p) * ((x1 - p) / h).powi(2), x0, x1);
    // bed-element equilibrium with test function φ0 gives −w(−1)
    let mut flux = Vec::with_capacity(nodes.len());
    flux.push(k * (m[1] - m[0]) + mu * d2 * (m00 * m[0] + m01 * m[1]));
    for e in 0..nodes.len() - 1 {
        let integral = element_mass_integral(profile, lambda, nodes[e], nodes[e + 1], m[e], m[e + 1]);
        flux.push(flux[e] - mu * d2 * integral);
    }
    flux
}

/// Principal eigenpair `(μ(λ), M)` by piecewise-linear finite elements on
/// two nested meshes, with `μ` Richardson-extrapolated.
pub fn principal_eigen(
    profile: &GammaProfile,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<ModeSolution> {
    profile.check_admissible(lambda)?;
    let coarse = build_mesh(profile, lambda, opts.mesh_points.max(3));
    let fine = refine(&coarse);
    let c = solve_on_mesh(profile, lambda, &coarse)?;
    let f = solve_on_mesh(profile, lambda, &fine)?;
    let mu = (4.0 * f.mu - c.mu) / 3.0;
    let flux = recover_flux(profile, lambda, f.mu, &fine, &f.m);
    Ok(ModeSolution {
        lambda,
        k: 0,
        mu,
        mu_mesh: f.mu,
        nodes: fine,
        m: f.m,
        flux,
    })
}

/// Solution of the mode-`k` problem `(a³M_p)_p = k² d² a M` at this `λ`,
/// which exists exactly when the principal eigenvalue equals `−k²`.
pub fn mode_k_solution(
    profile: &GammaProfile,
    lambda: f64,
    k: u32,
    opts: &SolverOptions,
) -> Result<ModeSolution> {
    let target = -f64::from(k * k);
    if k == 0 {
        // a³M_p constant with M(−1) = 0 and the Robin condition force M ≡ 0
        return Err(Error::NoModeSolution { k, mu: f64::NAN, target });
    }
    let mut sol = principal_eigen(profile, lambda, opts)?;
    if (sol.mu - target).abs() <= opts.mode_tol * target.abs() {
        sol.k = k;
        Ok(sol)
    } else {
        Err(Error::NoModeSolution { k, mu: sol.mu, target })
    }
}

/// Prüfer angle `θ = atan2(M, a³M_p)` at `p = 0` for the initial-value
/// problem `M(−1) = 0`, `a³M_p(−1) = 1`.
fn prufer_angle(profile: &GammaProfile, lambda: f64, mu: f64) -> Result<f64> {
    let FlowParameters { d, .. } = *profile.flow();
    let d2 = d * d;
    let a = |p: f64| (lambda + profile.primitive_unchecked(p)).sqrt();
    let mut edges = vec![-1.0];
    edges.extend(profile.critical_points());
    edges.push(0.0);
    // λ + Γ loses digits near the admissibility floor; asking for more
    // accuracy than that only drives the step size to zero
    let a2_min = lambda + profile.gamma_min();
    let noise = lambda.abs().max(1.0) * f64::EPSILON / a2_min;
    let ode = OdeOptions {
        rtol: (1e3 * noise).clamp(1e-12, 1e-6),
        atol: 1e-14,
        h_max: 0.05,
        ..OdeOptions::default()
    };
    let mut state = [0.0, 1.0];
    let mut theta = 0.0;
    for w in edges.windows(2) {
        state = integrate(
            |p, y: &[f64; 2]| {
                let ap = a(p);
                [y[1] / (ap * ap * ap), -mu * d2 * ap * y[0]]
            },
            w[0],
            w[1],
            state,
            &ode,
            |old, new| {
                let cross = old[1] * new[0] - old[0] * new[1];
                let dot = old[1] * new[1] + old[0] * new[0];
                let step = cross.atan2(dot);
                if step.abs() > 1.0 {
                    return false;
                }
                theta += step;
                let norm = new[0].hypot(new[1]);
                new[0] /= norm;
                new[1] /= norm;
                true
            },
        )?;
    }
    Ok(theta)
}

/// Eigenvalue number `index` (0 = principal) by shooting: the Prüfer angle at
/// the surface increases strictly with `μ`, and eigenvalue `index` is where
/// it equals `arccot(g d³/p0²) + index·π`.
pub fn shooting_eigenvalue(profile: &GammaProfile, lambda: f64, index: u32) -> Result<f64> {
    profile.check_admissible(lambda)?;
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let robin = g * d.powi(3) / (p0 * p0);
    let target = (1.0 / robin).atan() + f64::from(index) * std::f64::consts::PI;

    let mut lo = -1.0;
    while prufer_angle(profile, lambda, lo)? >= target {
        lo *= 2.0;
        if lo < -1e12 {
            return Err(Error::BracketFailure("shooting: eigenvalue below -1e12".into()));
        }
    }
    let mut hi = 1.0;
    while prufer_angle(profile, lambda, hi)? <= target {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::BracketFailure("shooting: eigenvalue above 1e12".into()));
        }
    }
    let mut failure = None;
    let spec = RootSpec {
        x_tol: 1e-12,
        f_tol: 0.0,
        max_iter: 200,
    };
    let root = bracketed_root(
        |mu| match prufer_angle(profile, lambda, mu) {
            Ok(t) => t - target,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        &spec,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?)
}

/// Principal eigenvalue by shooting, independent of the finite elements.
pub fn shooting_mu(profile: &GammaProfile, lambda: f64) -> Result<f64> {
    shooting_eigenvalue(profile, lambda, 0)
}

/// Sampled `μ(λ)` with the indices `i` where `μ_i < 0`, `μ_{i+1} < 0` and
/// `μ_{i+1} <= μ_i − 1e−10` (monotonicity violations).
#[derive(Debug, Clone, PartialEq)]
pub struct MuCurve {
    pub points: Vec<(f64, f64)>,
    pub violations: Vec<usize>,
}

pub fn mu_curve(profile: &GammaProfile, lambda_grid: &[f64], opts: &SolverOptions) -> Result<MuCurve> {
    let points = lambda_grid
        .iter()
        .map(|&l| Ok((l, principal_eigen(profile, l, opts)?.mu)))
        .collect::<Result<Vec<_>>>()?;
    let violations = points
        .windows(2)
        .enumerate()
        .filter(|(_, w)| {
            w[1].0 > w[0].0 && w[0].1 < 0.0 && w[1].1 < 0.0 && w[1].1 <= w[0].1 - 1e-10
        })
        .map(|(i, _)| i)
        .collect();
    Ok(MuCurve { points, violations })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::laminar::lambda_of_min_head;
    use crate::vorticity::VorticityDistribution;

    fn tanh1() -> f64 {
        1f64.tanh()
    }

    fn irrotational(p0: f64) -> GammaProfile {
        GammaProfile::new(
            VorticityDistribution::Constant { gamma: 0.0 },
            FlowParameters::new(1.0, 1.0, p0).unwrap(),
        )
        .unwrap()
    }

    fn one_jump() -> GammaProfile {
        GammaProfile::new(
            VorticityDistribution::PiecewiseConstant {
                breakpoints: vec![-0.4],
                values: vec![-1.5, 0.8],
            },
            FlowParameters::new(1.1, 0.9, -0.8).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn quotient_examples() {
        let o = SolverOptions::default();
        let prof = irrotational(-1.0);
        let f = rayleigh_quotient(&prof, 1.0, |p| p + 1.0, |_| 1.0, &[], &o).unwrap();
        assert!(f.abs() < 1e-14);
        let prof = irrotational(-tanh1().sqrt());
        let f = rayleigh_quotient(&prof, 1.0, |p| p + 1.0, |_| 1.0, &[], &o).unwrap();
        assert!((f - 3.0 * (tanh1() - 1.0) / tanh1()).abs() < 1e-13);
        let s1 = 1f64.sinh();
        let f = rayleigh_quotient(
            &prof,
            1.0,
            |p| (p + 1.0).sinh() / s1,
            |p| (p + 1.0).cosh() / s1,
            &[],
            &o,
        )
        .unwrap();
        assert!((f + 1.0).abs() < 1e-8);
        assert_eq!(
            rayleigh_quotient(&prof, 1.0, |_| 0.0, |_| 0.0, &[], &o).unwrap_err(),
            Error::ZeroDenominator
        );
        assert!(rayleigh_quotient(&prof, 1.0, |_| 1.0, |_| 0.0, &[], &o).is_err());
    }

    #[test]
    fn irrotational_principal_pair() {
        let o = SolverOptions::default();
        let prof = irrotational(-tanh1().sqrt());
        let sol = principal_eigen(&prof, 1.0, &o).unwrap();
        assert!((sol.mu + 1.0).abs() < 1e-6, "{}", sol.mu);
        let exact = 0.5f64.sinh() / 1f64.sinh();
        assert!((sol.value_at(-0.5) - exact).abs() < 1e-5);
        assert_eq!(sol.m[0], 0.0);
        assert_eq!(*sol.m.last().unwrap(), 1.0);
        assert_eq!(sol.interior_sign_changes(), 0);
        let q = sol.rayleigh_quotient(&prof, &o).unwrap();
        assert!((q - sol.mu_mesh).abs() <= 1e-8 * sol.mu_mesh.abs());

        let l0 = lambda_of_min_head(&prof, &o).unwrap();
        assert!(principal_eigen(&prof, l0, &o).unwrap().mu.abs() < 1e-6);

        let sol = principal_eigen(&irrotational(-1.0), 1.0, &o).unwrap();
        assert!(sol.mu.abs() < 1e-6);
        assert!((sol.value_at(-0.5) - 0.5).abs() < 1e-6);
    }

    #[test]
    fn shooting_matches_closed_forms() {
        let prof = irrotational(-tanh1().sqrt());
        assert!((shooting_mu(&prof, 1.0).unwrap() + 1.0).abs() < 1e-8);
        // λ = 4: μ > 0, M = sin(β(p+1)) with λ^{3/2} β cot β = g d³/p0², μ = λβ²/d²
        let robin = 1.0 / tanh1();
        let h = |b: f64| 8.0 * b / b.tan() - robin;
        let (mut lo, mut hi) = (1e-6, std::f64::consts::FRAC_PI_2);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let mu_exact = 4.0 * lo * lo;
        assert!((shooting_mu(&prof, 4.0).unwrap() - mu_exact).abs() < 1e-8);
    }

    #[test]
    fn finite_elements_agree_with_shooting_across_a_jump() {
        let o = SolverOptions::default();
        let prof = one_jump();
        for &offset in &[0.3, 1.0, 3.0] {
            let lambda = -prof.gamma_min() + offset;
            let fem = principal_eigen(&prof, lambda, &o).unwrap();
            let shot = shooting_mu(&prof, lambda).unwrap();
            assert!((fem.mu - shot).abs() < 1e-6, "λ={lambda}: {} vs {shot}", fem.mu);
            for (_, defect) in fem.flux_jump_defects(&prof).unwrap() {
                assert!(defect <= 10.0 * fem.mesh_width(), "{defect} {}", fem.mesh_width());
            }
        }
    }

    #[test]
    fn recovered_flux_matches_robin_condition() {
        let o = SolverOptions::default();
        let prof = one_jump();
        let sol = principal_eigen(&prof, 2.0, &o).unwrap();
        let FlowParameters { d, g, p0, .. } = *prof.flow();
        let last = sol.flux.len() - 1;
        assert!((sol.flux[last] - g * d.powi(3) / (p0 * p0)).abs() < 1e-14);
        // flux vs finite-difference a³ M_p away from the ends
        let slopes = sol.element_slopes();
        let j = sol.nodes.len() / 3;
        let a3 = prof.coefficient_a(2.0, sol.nodes[j]).unwrap().powi(3);
        let fd = a3 * 0.5 * (slopes[j - 1] + slopes[j]);
        assert!((fd - sol.flux[j]).abs() < 10.0 * sol.mesh_width(), "{fd} {}", sol.flux[j]);
    }

    #[test]
    fn mode_k_examples() {
        let o = SolverOptions::default();
        let prof = irrotational(-tanh1().sqrt());
        let sol = mode_k_solution(&prof, 1.0, 1, &o).unwrap();
        assert_eq!(sol.k, 1);
        assert!(matches!(
            mode_k_solution(&prof, 1.0, 2, &o),
            Err(Error::NoModeSolution { k: 2, .. })
        ));
        assert!(matches!(
            mode_k_solution(&prof, 1.0, 0, &o),
            Err(Error::NoModeSolution { k: 0, .. })
        ));
    }

    #[test]
    fn mu_curve_examples() {
        let o = SolverOptions::default();
        let prof = irrotational(-tanh1().sqrt());
        let curve = mu_curve(&prof, &[0.25, 0.5, 1.0], &o).unwrap();
        assert!(curve.violations.is_empty());
        assert!(curve.points.windows(2).all(|w| w[1].1 > w[0].1));
        assert!((curve.points[2].1 + 1.0).abs() < 1e-6);
        assert!(mu_curve(&prof, &[], &o).unwrap().points.is_empty());
    }

    #[test]
    fn mesh_contains_anchor_points() {
        let prof = GammaProfile::new(
            VorticityDistribution::PiecewiseConstant {
                breakpoints: vec![-0.7, -0.5, -0.2],
                values: vec![2.0, 1.0, -1.0, -2.0],
            },
            FlowParameters::new(1.0, 1.0, -1.0).unwrap(),
        )
        .unwrap();
        let mesh = build_mesh(&prof, -prof.gamma_min() + 1e-4, 201);
        for anchor in [-1.0, -0.7, -0.5, -0.2, 0.0, prof.p1()] {
            assert!(mesh.contains(&anchor), "{anchor}");
        }
        assert!(mesh.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(refine(&mesh).len(), 2 * mesh.len() - 1);
    }
}

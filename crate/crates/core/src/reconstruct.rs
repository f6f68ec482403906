//! First-order bifurcating wave `h = H(p; λ*) + s M(p) cos q` on a
//! `(q, p)` grid, its physical coordinates and velocities, and the defect
//! it leaves in the height-function equations.

use std::f64::consts::PI;

use crate::bifurcation::BifurcationPoint;
use crate::error::{Error, Result};
use crate::laminar::integrate_power;
use crate::numerics::gauss_legendre_7;
use crate::options::SolverOptions;
use crate::spectral::recover_flux;
use crate::vorticity::{FlowParameters, GammaProfile};

/// Fields of the reconstructed wave. Two-dimensional arrays are stored by
/// `p`-row: the value at `(q_nodes[i], p_nodes[j])` sits at `j * n_q + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveField {
    pub s: f64,
    pub lambda: f64,
    pub flow: FlowParameters,
    /// `q_i = −π + 2πi/n_q`; `q = π` is identified with `q = −π`.
    pub q_nodes: Vec<f64>,
    pub p_nodes: Vec<f64>,
    pub h: Vec<f64>,
    pub h_q: Vec<f64>,
    pub h_p: Vec<f64>,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub u_rel: Vec<f64>,
    pub v: Vec<f64>,
    /// `u = u_rel + c` when the wave speed is known.
    pub u_abs: Option<Vec<f64>>,
    pub psi: Vec<f64>,
    /// `η(q_i) = d h(q_i, 0)`.
    pub eta: Vec<f64>,
    laminar: Vec<f64>,
    a: Vec<f64>,
    m: Vec<f64>,
    m_p: Vec<f64>,
    gamma_primitive: Vec<f64>,
}

impl WaveField {
    pub fn n_q(&self) -> usize {
        self.q_nodes.len()
    }

    pub fn n_p(&self) -> usize {
        self.p_nodes.len()
    }

    pub fn index(&self, i: usize, j: usize) -> usize {
        j * self.n_q() + i
    }

    /// Laminar height `H` at the `p` nodes.
    pub fn laminar_height(&self) -> &[f64] {
        &self.laminar
    }

    /// Mode shape `M` and `M_p` at the `p` nodes.
    pub fn mode(&self) -> (&[f64], &[f64]) {
        (&self.m, &self.m_p)
    }

    /// Fill `x = q` and `y = d (h + p)`.
    pub fn physical_map(&mut self) {
        let d = self.flow.d;
        let n_q = self.n_q();
        for (j, &p) in self.p_nodes.iter().enumerate() {
            for (i, &q) in self.q_nodes.iter().enumerate() {
                let k = j * n_q + i;
                self.x[k] = q;
                self.y[k] = d * (self.h[k] + p);
            }
        }
    }

    /// Fill `u − c = p0 / (d (1 + h_p))` and `v = p0 h_q / (1 + h_p)`.
    pub fn velocity_field(&mut self) -> Result<()> {
        let min = self.nonstagnation_check();
        if !(min > 0.0) {
            return Err(self.stagnation_error(min));
        }
        let FlowParameters { d, p0, c, .. } = self.flow;
        for k in 0..self.h.len() {
            let jac = 1.0 + self.h_p[k];
            self.u_rel[k] = p0 / (d * jac);
            self.v[k] = p0 * self.h_q[k] / jac;
        }
        self.u_abs = c.map(|c| self.u_rel.iter().map(|u| u + c).collect());
        Ok(())
    }

    /// `min (1 + h_p)` over the grid; positive when no stagnation occurs.
    pub fn nonstagnation_check(&self) -> f64 {
        self.h_p.iter().map(|hp| 1.0 + hp).fold(f64::INFINITY, f64::min)
    }

    /// Largest amplitude keeping `1 + h_p = 1/a + s M_p cos q` positive for
    /// all `q` at the grid nodes.
    pub fn critical_amplitude(&self) -> f64 {
        self.a
            .iter()
            .zip(&self.m_p)
            .map(|(a, mp)| 1.0 / (a * mp.abs()))
            .fold(f64::INFINITY, f64::min)
    }

    fn stagnation_error(&self, min_jacobian: f64) -> Error {
        Error::StagnationAtAmplitude {
            amplitude: self.s,
            min_jacobian,
            critical_amplitude: self.critical_amplitude(),
        }
    }

    /// Surface samples `(x_i, η_i)` and their mean over one period.
    pub fn surface_profile(&self) -> (Vec<(f64, f64)>, f64) {
        let samples: Vec<(f64, f64)> = self
            .q_nodes
            .iter()
            .copied()
            .zip(self.eta.iter().copied())
            .collect();
        // trapezoidal rule on a periodic grid
        let mean = self.eta.iter().sum::<f64>() / self.eta.len() as f64;
        (samples, mean)
    }
}

/// `q_i = π (2i − n)/n`, so that `q_{n−i} = −q_i` holds exactly.
fn q_node(i: usize, n: usize) -> f64 {
    PI * (2 * i as i64 - n as i64) as f64 / n as f64
}

/// `h = H(p; λ*) + s M(p) cos q` with `M_p` taken from the flux
/// `a³ M_p` recovered with `μ = −1`.
pub fn build_wave(
    point: &BifurcationPoint,
    profile: &GammaProfile,
    s: f64,
    n_q: usize,
    opts: &SolverOptions,
) -> Result<WaveField> {
    if n_q < 16 {
        return Err(Error::InvalidParameter(format!("n_q = {n_q} must be at least 16")));
    }
    if !s.is_finite() {
        return Err(Error::InvalidParameter(format!("amplitude {s} must be finite")));
    }
    let mode = &point.mode;
    let lambda = mode.lambda;
    let flow = *profile.flow();
    let nodes = mode.nodes.clone();
    let n_p = nodes.len();

    let a: Vec<f64> = nodes
        .iter()
        .map(|&p| profile.coefficient_a(lambda, p))
        .collect::<Result<_>>()?;
    let mut laminar = vec![0.0; n_p];
    let mut integral = 0.0;
    for j in 1..n_p {
        integral += integrate_power(profile, lambda, nodes[j - 1], nodes[j], -0.5, opts)?;
        laminar[j] = integral - (nodes[j] + 1.0);
    }
    let flux = recover_flux(profile, lambda, -1.0, &nodes, &mode.m);
    let m_p: Vec<f64> = flux.iter().zip(&a).map(|(w, a)| w / a.powi(3)).collect();
    let gamma_primitive: Vec<f64> = nodes
        .iter()
        .map(|&p| profile.primitive(p))
        .collect::<Result<_>>()?;

    let q_nodes: Vec<f64> = (0..n_q).map(|i| q_node(i, n_q)).collect();
    let (cos, sin): (Vec<f64>, Vec<f64>) = q_nodes.iter().map(|q| (q.cos(), q.sin())).unzip();
    let size = n_p * n_q;
    let (mut h, mut h_q, mut h_p) = (vec![0.0; size], vec![0.0; size], vec![0.0; size]);
    let mut psi = vec![0.0; size];
    for j in 0..n_p {
        let hp_lam = 1.0 / a[j] - 1.0;
        for i in 0..n_q {
            let k = j * n_q + i;
            h[k] = laminar[j] + s * mode.m[j] * cos[i];
            h_q[k] = -s * mode.m[j] * sin[i];
            h_p[k] = hp_lam + s * m_p[j] * cos[i];
            psi[k] = flow.p0 * nodes[j];
        }
    }
    let eta = (0..n_q).map(|i| flow.d * h[(n_p - 1) * n_q + i]).collect();

    let mut field = WaveField {
        s,
        lambda,
        flow,
        q_nodes,
        p_nodes: nodes,
        h,
        h_q,
        h_p,
        x: vec![0.0; size],
        y: vec![0.0; size],
        u_rel: vec![0.0; size],
        v: vec![0.0; size],
        u_abs: None,
        psi,
        eta,
        laminar,
        a,
        m: mode.m.clone(),
        m_p,
        gamma_primitive,
    };
    field.physical_map();
    field.velocity_field()?;
    Ok(field)
}

/// Discrete L² norms of the defect in the interior equation and the surface
/// condition.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakResidual {
    pub interior_norm: f64,
    pub boundary_norm: f64,
}

/// Residual of the height-function equations in flux form.
///
/// The interior equation is `∂_q F₁ + ∂_p F₂ = 0` with
/// `F₁ = h_q/(1 + h_p)` and `F₂ = −(1 + d²h_q²)/(2d²(1 + h_p)²) + Γ/(2d²)`.
/// Each cell `[q_i, q_{i+1}] × [p_j, p_{j+1}]` contributes its net outward
/// flux divided by its area; `F₁` is integrated in `p` with the element's
/// linear `M`, `F₂` in `q` with nodal values. The surface condition is
/// `−(1 + d²h_q²)/(2d²(1 + h_p)²) − g d (h + 1)/p0² + Q/(2p0²) = 0` at `p = 0`.
pub fn weak_residual(field: &WaveField, profile: &GammaProfile, q_head: f64) -> Result<WeakResidual> {
    let FlowParameters { d, g, p0, .. } = field.flow;
    let (n_q, n_p) = (field.n_q(), field.n_p());
    let s = field.s;
    let lambda = field.lambda;
    let d2 = d * d;
    let dq = 2.0 * PI / n_q as f64;
    let q_at = |i: usize| q_node(i, n_q);

    // F₁ integrated over element e at q_i
    let vertical = |i: usize, e: usize| -> f64 {
        let (x0, x1) = (field.p_nodes[e], field.p_nodes[e + 1]);
        let (m0, m1) = (field.m[e], field.m[e + 1]);
        let slope = (m1 - m0) / (x1 - x0);
        let (cq, sq) = (q_at(i).cos(), q_at(i).sin());
        gauss_legendre_7(
            |p| {
                let a = (lambda + profile.primitive_unchecked(p)).sqrt();
                let m = m0 + slope * (p - x0);
                -s * m * sq / (1.0 / a + s * slope * cq)
            },
            x0,
            x1,
        )
    };
    // F₂ integrated over [q_i, q_i + Δq] at node j
    let horizontal = |i: usize, j: usize| -> f64 {
        let inv_a = 1.0 / field.a[j];
        let (m, mp, gamma) = (field.m[j], field.m_p[j], field.gamma_primitive[j]);
        gauss_legendre_7(
            |q| {
                let hq = -s * m * q.sin();
                let jac = inv_a + s * mp * q.cos();
                -(1.0 + d2 * hq * hq) / (2.0 * d2 * jac * jac) + gamma / (2.0 * d2)
            },
            q_at(i),
            q_at(i + 1),
        )
    };

    let mut interior = 0.0;
    let mut below: Vec<f64> = (0..n_q).map(|i| horizontal(i, 0)).collect();
    for e in 0..n_p - 1 {
        let above: Vec<f64> = (0..n_q).map(|i| horizontal(i, e + 1)).collect();
        let sides: Vec<f64> = (0..n_q).map(|i| vertical(i, e)).collect();
        let area = dq * (field.p_nodes[e + 1] - field.p_nodes[e]);
        for i in 0..n_q {
            let net = sides[(i + 1) % n_q] - sides[i] + above[i] - below[i];
            interior += (net / area).powi(2) * area;
        }
        below = above;
    }

    let top = n_p - 1;
    let mut boundary = 0.0;
    for i in 0..n_q {
        let k = top * n_q + i;
        let jac = 1.0 + field.h_p[k];
        let hq = field.h_q[k];
        let r = -(1.0 + d2 * hq * hq) / (2.0 * d2 * jac * jac) - g * d * (field.h[k] + 1.0) / (p0 * p0)
            + q_head / (2.0 * p0 * p0);
        boundary += r * r * dq;
    }
    Ok(WeakResidual {
        interior_norm: interior.sqrt(),
        boundary_norm: boundary.sqrt(),
    })
}

/// Least-squares slope of `log y` against `log x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    (sxx > 0.0).then(|| sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bifurcation::find_lambda_star;
    use crate::vorticity::VorticityDistribution;

    fn point_at(prof: &GammaProfile, lambda: f64) -> BifurcationPoint {
        let o = SolverOptions::default();
        let mut mode = crate::spectral::principal_eigen(prof, lambda, &o).unwrap();
        mode.k = 1;
        BifurcationPoint {
            lambda_star: lambda,
            lambda0: crate::laminar::lambda_of_min_head(prof, &o).unwrap(),
            q_star: crate::laminar::hydraulic_head(prof, lambda, &o).unwrap(),
            mu_residual: (mode.mu + 1.0).abs(),
            mode,
            bracket: (lambda, lambda),
        }
    }

    /// Irrotational flow with `c² = g tanh d`, evaluated at `λ* = 1` exactly.
    fn pinned() -> (GammaProfile, BifurcationPoint) {
        let prof = GammaProfile::new(
            VorticityDistribution::Constant { gamma: 0.0 },
            FlowParameters::new(1.0, 1.0, -1f64.tanh().sqrt()).unwrap(),
        )
        .unwrap();
        let pt = point_at(&prof, 1.0);
        (prof, pt)
    }

    #[test]
    fn pinned_wave_examples() {
        let o = SolverOptions::default();
        let (prof, pt) = pinned();
        let f = build_wave(&pt, &prof, 0.05, 64, &o).unwrap();
        let top = f.n_p() - 1;
        assert!((f.h[f.index(32, top)] - 0.05).abs() < 1e-12);
        assert!((f.h[f.index(0, top)] + 0.05).abs() < 1e-12);
        assert!((f.eta[32] - 0.05).abs() < 1e-12);
        for i in 0..f.n_q() {
            assert_eq!(f.h[f.index(i, 0)], 0.0);
            assert_eq!(f.y[f.index(i, 0)], -1.0);
            assert_eq!(f.h[f.index(i, 7)], f.h[f.index((f.n_q() - i) % f.n_q(), 7)]);
        }
        let (_, mean) = f.surface_profile();
        assert!(mean.abs() < 1e-12);
        // v at q = π/2 on the surface
        let k = f.index(48, top);
        assert!((f.v[k] - 0.872694 * 0.05).abs() < 1e-6);
        for k in 0..f.h.len() {
            assert!((f.v[k] - f.u_rel[k] * f.flow.d * f.h_q[k]).abs() < 1e-15);
        }
        let coth = 1f64.cosh() / 1f64.sinh();
        assert!((f.nonstagnation_check() - (1.0 - 0.05 * coth)).abs() < 1e-6);
        assert!((f.critical_amplitude() - 1f64.tanh()).abs() < 1e-6);
    }

    #[test]
    fn laminar_fields() {
        let o = SolverOptions::default();
        let (prof, pt) = pinned();
        let f = build_wave(&pt, &prof, 0.0, 16, &o).unwrap();
        assert!((f.nonstagnation_check() - 1.0).abs() < 1e-6);
        assert!(f.u_rel.iter().all(|u| (u - prof.flow().p0).abs() < 1e-6));
        assert!(f.v.iter().all(|&v| v == 0.0));
        let r = weak_residual(&f, &prof, pt.q_star).unwrap();
        assert!(r.interior_norm < 1e-8 && r.boundary_norm < 1e-8, "{r:?}");

        let lin = GammaProfile::new(
            VorticityDistribution::Constant { gamma: -1.0 },
            FlowParameters::new(1.0, 1.0, -1.0).unwrap(),
        )
        .unwrap();
        let lpt = point_at(&lin, 3.0);
        let f = build_wave(&lpt, &lin, 0.0, 16, &o).unwrap();
        assert!((f.nonstagnation_check() - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        let (_, mean) = f.surface_profile();
        assert!((mean + 0.267949).abs() < 1e-6);
        let top = f.n_p() - 1;
        assert!((f.flow.d * f.u_rel[f.index(3, top)] / f.flow.p0 - 3f64.sqrt()).abs() < 1e-12);
        let r = weak_residual(&f, &lin, lpt.q_star).unwrap();
        assert!(r.interior_norm < 1e-8 && r.boundary_norm < 1e-8, "{r:?}");
    }

    #[test]
    fn solved_point_matches_pinned_point() {
        let o = SolverOptions::default();
        let (prof, pinned) = pinned();
        let pt = find_lambda_star(&prof, &o).unwrap().point().cloned().unwrap();
        let f = build_wave(&pt, &prof, 0.05, 32, &o).unwrap();
        let g = build_wave(&pinned, &prof, 0.05, 32, &o).unwrap();
        assert!(f.h.iter().zip(&g.h).all(|(a, b)| (a - b).abs() < 1e-6));
        // the amplitude-dependent part of the mean surface height vanishes
        let (_, mean) = f.surface_profile();
        assert!((mean - f.flow.d * f.laminar_height()[f.n_p() - 1]).abs() < 1e-12);
    }

    #[test]
    fn residual_is_second_order() {
        let o = SolverOptions::default();
        let (prof, pt) = pinned();
        let pts: Vec<(f64, f64)> = [0.005, 0.01, 0.02, 0.04]
            .iter()
            .map(|&s| {
                let f = build_wave(&pt, &prof, s, 64, &o).unwrap();
                (s, weak_residual(&f, &prof, pt.q_star).unwrap().interior_norm)
            })
            .collect();
        let slope = log_log_slope(&pts).unwrap();
        assert!((1.8..=2.2).contains(&slope), "{slope} {pts:?}");
    }

    #[test]
    fn stagnation_is_reported() {
        let o = SolverOptions::default();
        let (prof, pt) = pinned();
        match build_wave(&pt, &prof, 0.8, 32, &o) {
            Err(Error::StagnationAtAmplitude { critical_amplitude, .. }) => {
                assert!((critical_amplitude - 1f64.tanh()).abs() < 1e-6)
            }
            other => panic!("{other:?}"),
        }
        assert!(build_wave(&pt, &prof, 0.1, 8, &o).is_err());
    }

    #[test]
    fn slope_fit() {
        let pts = [(1.0, 3.0), (2.0, 12.0), (4.0, 48.0)];
        assert!((log_log_slope(&pts).unwrap() - 2.0).abs() < 1e-12);
        assert_eq!(log_log_slope(&pts[..1]), None);
    }
}

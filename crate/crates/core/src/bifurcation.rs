//! The bifurcation point `μ(λ*) = −1`, the closed-form bifurcation criteria,
//! the transversality integral and the onset sweep along the depth-normalized
//! laminar family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::laminar::{calibrate_mass_flux, hydraulic_head, lambda_of_min_head, MassFluxCalibration};
use crate::numerics::{bracketed_root, gauss_legendre_7};
use crate::options::SolverOptions;
use crate::spectral::{principal_eigen, ModeSolution};
use crate::vorticity::{FlowParameters, GammaProfile, VorticityDistribution};

#[derive(Debug, Clone, PartialEq)]
pub struct BifurcationPoint {
    pub lambda_star: f64,
    pub lambda0: f64,
    pub q_star: f64,
    /// Mode-1 solution at `λ*`, normalized by `M(0) = 1`.
    pub mode: ModeSolution,
    pub bracket: (f64, f64),
    pub mu_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BifurcationOutcome {
    Bifurcation(BifurcationPoint),
    /// `μ` stayed above `−1` down to the smallest admissible margin.
    NoBifurcation {
        lambda0: f64,
        inf_mu: f64,
        lambda_at_inf: f64,
    },
}

impl BifurcationOutcome {
    pub fn point(&self) -> Option<&BifurcationPoint> {
        match self {
            Self::Bifurcation(p) => Some(p),
            Self::NoBifurcation { .. } => None,
        }
    }
}

fn mu_at(profile: &GammaProfile, lambda: f64, opts: &SolverOptions) -> Result<f64> {
    Ok(principal_eigen(profile, lambda, opts)?.mu)
}

/// Locate `λ*` in `(−Γ_min, λ₀)`.
///
/// `μ(λ₀) = 0` and `μ` increases strictly where it is negative, so once some
/// `λ_lo = −Γ_min + ε` from the margin schedule has `μ(λ_lo) < −1` the root
/// of `μ + 1` in `(λ_lo, λ₀)` is unique.
pub fn find_lambda_star(profile: &GammaProfile, opts: &SolverOptions) -> Result<BifurcationOutcome> {
    let floor = -profile.gamma_min();
    let lambda0 = lambda_of_min_head(profile, opts)?;

    let mut lo = None;
    let (mut inf_mu, mut lambda_at_inf) = (f64::INFINITY, f64::NAN);
    for &eps in &opts.lambda_margin_schedule {
        let lambda = floor + eps;
        if lambda >= lambda0 || lambda <= 0.0 {
            continue;
        }
        let mu = mu_at(profile, lambda, opts)?;
        if mu < inf_mu {
            inf_mu = mu;
            lambda_at_inf = lambda;
        }
        if mu < -1.0 {
            lo = Some(lambda);
            break;
        }
    }
    let Some(lo) = lo else {
        return Ok(BifurcationOutcome::NoBifurcation {
            lambda0,
            inf_mu,
            lambda_at_inf,
        });
    };

    let mut hi = lambda0;
    let mut mu_hi = mu_at(profile, hi, opts)?;
    while mu_hi <= -1.0 {
        // only reachable if λ₀ is inaccurate; μ > −1 for large λ
        hi = floor + 2.0 * (hi - floor);
        if hi > 1e12 {
            return Err(Error::BracketFailure("mu stays below -1 for large lambda".into()));
        }
        mu_hi = mu_at(profile, hi, opts)?;
    }

    let mut failure = None;
    let root = bracketed_root(
        |l| match mu_at(profile, l, opts) {
            Ok(mu) => mu + 1.0,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo,
        hi,
        &opts.root(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    let lambda_star = root?;
    let mut mode = principal_eigen(profile, lambda_star, opts)?;
    mode.k = 1;
    Ok(BifurcationOutcome::Bifurcation(BifurcationPoint {
        lambda_star,
        lambda0,
        q_star: hydraulic_head(profile, lambda_star, opts)?,
        mu_residual: (mode.mu + 1.0).abs(),
        mode,
        bracket: (lo, hi),
    }))
}

/// Whether `μ(λ* − δ) < −1 < μ(λ* + δ)` with `δ = 1e−3 (λ₀ − λ*)`.
pub fn root_is_isolated(
    profile: &GammaProfile,
    point: &BifurcationPoint,
    opts: &SolverOptions,
) -> Result<bool> {
    let delta = 1e-3 * (point.lambda0 - point.lambda_star);
    let below = mu_at(profile, point.lambda_star - delta, opts)?;
    let above = mu_at(profile, point.lambda_star + delta, opts)?;
    Ok(below < -1.0 && above > -1.0)
}

/// `T = −(π/2) ∫ a⁻¹ M² − (3π/d²) ∫ a M_p²` for `φ* = M(p) cos q`; strictly
/// negative for any nonzero `M`.
pub fn transversality_integral(mode: &ModeSolution, profile: &GammaProfile) -> Result<f64> {
    profile.check_admissible(mode.lambda)?;
    let d = profile.flow().d;
    let a = |p: f64| profile.coefficient_a(mode.lambda, p).unwrap_or(f64::NAN);
    let (mut mass, mut stiffness) = (0.0, 0.0);
    for (x, m) in mode.nodes.windows(2).zip(mode.m.windows(2)) {
        let h = x[1] - x[0];
        let slope = (m[1] - m[0]) / h;
        let value = |p: f64| m[0] + slope * (p - x[0]);
        mass += gauss_legendre_7(|p| value(p).powi(2) / a(p), x[0], x[1]);
        stiffness += slope * slope * gauss_legendre_7(a, x[0], x[1]);
    }
    let pi = std::f64::consts::PI;
    Ok(-0.5 * pi * mass - 3.0 * pi * stiffness / (d * d))
}

/// Outcome of one closed-form criterion; `margin > 0` exactly when it holds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Criterion {
    pub holds: bool,
    pub margin: f64,
}

impl Criterion {
    fn from_margin(margin: f64) -> Self {
        Self {
            holds: margin > 0.0,
            margin,
        }
    }
}

/// Right-hand side of the general sufficient condition `g > RHS`.
pub fn general_sufficient_rhs(theta: f64, alpha: f64, p0: f64, p1: f64, d: f64) -> f64 {
    if theta == 0.0 {
        return 0.0;
    }
    let p1 = p1.abs();
    theta.powf(1.5) * p0 * p0 * p1.powf(1.5 * alpha - 1.0) / (6.0 * alpha * d.powi(3))
        + theta.sqrt() * p0 * p0 * p1.powf(0.5 * alpha + 1.0) / ((2.0 + 0.5 * alpha) * d)
}

/// Left-hand side of the bounded-vorticity condition `LHS < g`.
pub fn continuous_sufficient_lhs(gamma_inf: f64, p0: f64, p1: f64) -> f64 {
    let (p0, p1) = (p0.abs(), p1.abs());
    let s2 = std::f64::consts::SQRT_2;
    s2 / 3.0 * gamma_inf.powf(1.5) * p0.sqrt() * p1.sqrt()
        + 2.0 * s2 / 5.0 * gamma_inf.sqrt() * p0.powf(1.5) * p1.powf(1.5)
}

/// The Hölder-seminorm sufficient condition with exponent `alpha`.
pub fn check_general_sufficient(profile: &GammaProfile, alpha: f64) -> Result<Criterion> {
    if !(alpha > 0.0 && alpha <= 1.0) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in (0, 1]")));
    }
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let theta = profile.holder_seminorm(alpha)?;
    Ok(Criterion::from_margin(
        g - general_sufficient_rhs(theta, alpha, p0, profile.p1(), d),
    ))
}

/// The sufficient condition in terms of `γ∞ = sup|γ|`.
pub fn check_continuous_sufficient(profile: &GammaProfile) -> Criterion {
    let FlowParameters { g, p0, .. } = *profile.flow();
    let gamma_inf = profile.source().sup_norm();
    Criterion::from_margin(g - continuous_sufficient_lhs(gamma_inf, p0, profile.p1()))
}

/// `γ²d² < (g + γ²d) tanh d`; necessary and sufficient for constant `γ < 0`,
/// always true for `γ >= 0`.
pub fn check_constant_vorticity(gamma: f64, d: f64, g: f64) -> Criterion {
    let g2 = gamma * gamma;
    Criterion::from_margin((g + g2 * d) * d.tanh() - g2 * d * d)
}

/// `γ² 𝔡 (𝔡 − tanh 𝔡) < g tanh 𝔡` for a surface layer of depth `𝔡`.
pub fn check_surface_layer(gamma: f64, depth: f64, g: f64) -> Criterion {
    let t = depth.tanh();
    Criterion::from_margin(g * t - gamma * gamma * depth * (depth - t))
}

/// Bed-layer criterion `|γ| < RHS`, or `Undefined` when a radicand of the
/// formula is not positive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum BedLayer {
    Defined { holds: bool, margin: f64, rhs: f64 },
    Undefined { numerator_radicand: f64, denominator_radicand: f64 },
}

impl BedLayer {
    pub fn holds(&self) -> bool {
        matches!(self, Self::Defined { holds: true, .. })
    }
}

pub fn check_bed_layer(gamma: f64, d: f64, depth: f64, g: f64) -> BedLayer {
    let rest = d - depth;
    let numerator_radicand = g * (d.sinh() * rest - depth.sinh() * rest.sinh());
    let denominator_radicand = rest * d.cosh() - gamma * gamma * depth.cosh() * rest.sinh();
    if !(numerator_radicand > 0.0 && denominator_radicand > 0.0 && rest > 0.0) {
        return BedLayer::Undefined {
            numerator_radicand,
            denominator_radicand,
        };
    }
    let rhs = numerator_radicand.sqrt() / (rest * denominator_radicand.sqrt());
    let margin = rhs - gamma.abs();
    BedLayer::Defined {
        holds: margin > 0.0,
        margin,
        rhs,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaInputs {
    pub alpha: f64,
    pub theta: f64,
    pub p1: f64,
    pub gamma_inf: f64,
    pub depth_frak: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriteriaReport {
    pub general_sufficient: Criterion,
    pub continuous_sufficient: Criterion,
    pub constant_vorticity: Option<Criterion>,
    pub surface_layer: Option<Criterion>,
    pub bed_layer: Option<BedLayer>,
    pub inputs: CriteriaInputs,
}

/// Every criterion that applies to this profile. The layer criteria need a
/// layer depth `𝔡` and use `γ` at the surface and at the bed respectively.
pub fn criteria_report(
    profile: &GammaProfile,
    alpha: f64,
    depth_frak: Option<f64>,
) -> Result<CriteriaReport> {
    let FlowParameters { d, g, .. } = *profile.flow();
    let source = profile.source();
    let constant_vorticity = match source {
        VorticityDistribution::Constant { gamma } => Some(check_constant_vorticity(*gamma, d, g)),
        _ => None,
    };
    let (surface_layer, bed_layer) = match depth_frak {
        Some(depth) => {
            if !(depth > 0.0 && depth <= d) {
                return Err(Error::InvalidParameter(format!(
                    "depth_frak = {depth} must lie in (0, d]"
                )));
            }
            (
                Some(check_surface_layer(source.gamma_eval(0.0)?, depth, g)),
                Some(check_bed_layer(source.gamma_eval(-1.0)?, d, depth, g)),
            )
        }
        None => (None, None),
    };
    Ok(CriteriaReport {
        general_sufficient: check_general_sufficient(profile, alpha)?,
        continuous_sufficient: check_continuous_sufficient(profile),
        constant_vorticity,
        surface_layer,
        bed_layer,
        inputs: CriteriaInputs {
            alpha,
            theta: profile.holder_seminorm(alpha)?,
            p1: profile.p1(),
            gamma_inf: source.sup_norm(),
            depth_frak,
        },
    })
}

/// One point of the depth-normalized laminar family.
#[derive(Debug, Clone, PartialEq)]
pub struct OnsetPoint {
    pub lambda: f64,
    pub p0: Option<f64>,
    pub mu: Option<f64>,
    pub error: Option<String>,
}

/// `μ(λ)` along the family with `p0 = p0(λ)` chosen so that `H(0; λ) = 0`.
/// Points without a calibrated mass flux or with a failed solve carry the
/// reason in `error`.
pub fn onset_curve(
    dist: &VorticityDistribution,
    d: f64,
    g: f64,
    lambda_grid: &[f64],
    opts: &SolverOptions,
) -> Vec<OnsetPoint> {
    lambda_grid
        .iter()
        .map(|&lambda| {
            let attempt = || -> Result<(f64, f64)> {
                let p0 = match calibrate_mass_flux(dist, d, g, lambda, opts)? {
                    MassFluxCalibration::Unique(p0) => p0,
                    MassFluxCalibration::AnyMassFlux => {
                        return Err(Error::NoSolution(
                            "every mass flux satisfies the normalization".into(),
                        ))
                    }
                };
                let profile = GammaProfile::new(dist.clone(), FlowParameters::new(d, g, p0)?)?;
                Ok((p0, mu_at(&profile, lambda, opts)?))
            };
            match attempt() {
                Ok((p0, mu)) => OnsetPoint {
                    lambda,
                    p0: Some(p0),
                    mu: Some(mu),
                    error: None,
                },
                Err(e) => OnsetPoint {
                    lambda,
                    p0: None,
                    mu: None,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect()
}

/// Consecutive pairs of successful onset points across which `μ + 1` changes
/// sign, as `(λ_left, λ_right)`.
pub fn onset_crossings(curve: &[OnsetPoint]) -> Vec<(f64, f64)> {
    let ok: Vec<(f64, f64)> = curve
        .iter()
        .filter_map(|pt| pt.mu.map(|mu| (pt.lambda, mu + 1.0)))
        .collect();
    ok.windows(2)
        .filter(|w| w[0].1 * w[1].1 <= 0.0 && (w[0].1 != 0.0 || w[1].1 != 0.0))
        .map(|w| (w[0].0, w[1].0))
        .collect()
}

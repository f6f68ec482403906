//! Laminar (q-independent) flows: the height `H(p; λ)`, the hydraulic head
//! `Q(λ)`, its minimizer `λ₀`, the surface-speed relation, the optional
//! mass-flux calibration enforcing `H(0; λ) = 0`, and the scaling to unit
//! wavenumber.

use crate::error::{Error, Result};
use crate::numerics::{adaptive_quad_singular, bracketed_root, RootSpec};
use crate::options::SolverOptions;
use crate::vorticity::{FlowParameters, GammaProfile, VorticityDistribution};

/// `∫_lo^hi (λ + scale·Γ(s))^power ds` for an admissible `λ`, splitting at
/// jumps and treating `p1` as a square-root endpoint.
pub(crate) fn integrate_power(
    profile: &GammaProfile,
    lambda: f64,
    lo: f64,
    hi: f64,
    power: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    integrate_scaled_power(profile, lambda, 1.0, lo, hi, power, opts)
}

fn integrate_scaled_power(
    profile: &GammaProfile,
    lambda: f64,
    scale: f64,
    lo: f64,
    hi: f64,
    power: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    if lo == hi {
        return Ok(0.0);
    }
    let breakpoints: Vec<f64> = profile
        .jump_points()
        .iter()
        .copied()
        .filter(|&b| b > lo && b < hi && b != profile.p1())
        .collect();
    let p1 = profile.p1();
    let singular: Vec<f64> = if p1 >= lo && p1 <= hi { vec![p1] } else { vec![] };
    let spec = opts.quadrature().with_breakpoints(breakpoints);
    let value = adaptive_quad_singular(
        |s| (lambda + scale * profile.primitive_unchecked(s)).powf(power),
        lo,
        hi,
        &singular,
        &spec,
    )?;
    Ok(value)
}

/// A laminar solution at fixed `λ`.
#[derive(Debug, Clone)]
pub struct LaminarFlow<'a> {
    profile: &'a GammaProfile,
    lambda: f64,
    head: f64,
}

impl<'a> LaminarFlow<'a> {
    pub fn new(profile: &'a GammaProfile, lambda: f64, opts: &SolverOptions) -> Result<Self> {
        let head = hydraulic_head(profile, lambda, opts)?;
        Ok(Self {
            profile,
            lambda,
            head,
        })
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn head(&self) -> f64 {
        self.head
    }

    pub fn height(&self, p: f64, opts: &SolverOptions) -> Result<f64> {
        laminar_height(self.profile, self.lambda, p, opts)
    }

    /// `H_p = 1/a − 1`.
    pub fn height_p(&self, p: f64) -> Result<f64> {
        Ok(1.0 / self.profile.coefficient_a(self.lambda, p)? - 1.0)
    }
}

/// `H(p; λ) = ∫_{-1}^p (λ + Γ(s))^{-1/2} ds − (p + 1)`.
pub fn laminar_height(
    profile: &GammaProfile,
    lambda: f64,
    p: f64,
    opts: &SolverOptions,
) -> Result<f64> {
    if !(-1.0..=0.0).contains(&p) {
        return Err(Error::OutOfDomain(p));
    }
    profile.check_admissible(lambda)?;
    Ok(integrate_power(profile, lambda, -1.0, p, -0.5, opts)? - (p + 1.0))
}

/// `Q(λ) = 2gd ∫_{-1}^0 (λ + Γ)^{-1/2} ds + p0² λ / d²`.
pub fn hydraulic_head(profile: &GammaProfile, lambda: f64, opts: &SolverOptions) -> Result<f64> {
    profile.check_admissible(lambda)?;
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let integral = integrate_power(profile, lambda, -1.0, 0.0, -0.5, opts)?;
    Ok(2.0 * g * d * integral + p0 * p0 * lambda / (d * d))
}

/// The unique minimizer `λ₀` of `Q`, where `∫ (λ₀ + Γ)^{-3/2} = p0² / (g d³)`.
pub fn lambda_of_min_head(profile: &GammaProfile, opts: &SolverOptions) -> Result<f64> {
    let FlowParameters { d, g, p0, .. } = *profile.flow();
    let target = p0 * p0 / (g * d * d * d);
    let floor = -profile.gamma_min();
    let excess = |lambda: f64| -> Result<f64> {
        Ok(integrate_power(profile, lambda, -1.0, 0.0, -1.5, opts)? - target)
    };

    let mut lo = None;
    for &eps in &opts.lambda_margin_schedule {
        if excess(floor + eps)? > 0.0 {
            lo = Some(floor + eps);
            break;
        }
    }
    let lo = lo.ok_or_else(|| {
        Error::BracketFailure(format!(
            "head derivative does not change sign above lambda = {floor}"
        ))
    })?;
    let mut offset = 1.0;
    while excess(floor + offset)? >= 0.0 {
        offset *= 2.0;
        if offset > 1e12 {
            return Err(Error::BracketFailure(
                "head minimizer exceeds lambda = 1e12".into(),
            ));
        }
    }
    let hi = floor + offset;
    let mut failure = None;
    let root = bracketed_root(
        |lambda| match excess(lambda) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                f64::NAN
            }
        },
        lo.min(hi),
        hi.max(lo),
        &opts.root(),
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(root?)
}

/// Flat-surface speed data of a laminar flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSpeed {
    /// `√λ = d (u − c) / p0`.
    pub sqrt_lambda: f64,
    /// `(u − c)` at the surface, `p0 √λ / d`.
    pub relative: f64,
    /// `u` at the surface when the wave speed is known.
    pub absolute: Option<f64>,
}

pub fn surface_relative_speed(lambda: f64, flow: &FlowParameters) -> Result<SurfaceSpeed> {
    if !(lambda > 0.0) {
        return Err(Error::NonAdmissibleLambda {
            lambda,
            p: 0.0,
            value: lambda,
        });
    }
    let sqrt_lambda = lambda.sqrt();
    let relative = flow.p0 * sqrt_lambda / flow.d;
    Ok(SurfaceSpeed {
        sqrt_lambda,
        relative,
        absolute: flow.c.map(|c| relative + c),
    })
}

/// Outcome of choosing `p0` so that the laminar flow has `H(0; λ) = 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MassFluxCalibration {
    Unique(f64),
    /// `Γ` does not depend on `p0` and the constraint already holds.
    AnyMassFlux,
}

/// Find `p0 < 0` with `∫_{-1}^0 (λ + Γ(s; p0))^{-1/2} ds = 1`.
///
/// Writing `x = −1/p0`, `Γ(s; p0) = x·J(s)` with `J` the primitive for
/// `p0 = −1`; the admissible `x` are scanned upward and the first sign change
/// is polished with Brent's method.
pub fn calibrate_mass_flux(
    dist: &VorticityDistribution,
    d: f64,
    g: f64,
    lambda: f64,
    opts: &SolverOptions,
) -> Result<MassFluxCalibration> {
    let base = GammaProfile::new(dist.clone(), FlowParameters::new(d, g, -1.0)?)?;
    if dist.sup_norm() == 0.0 {
        return if (lambda - 1.0).abs() <= 1e-12 {
            Ok(MassFluxCalibration::AnyMassFlux)
        } else {
            Err(Error::NoSolution(format!(
                "irrotational flow has H(0) = 0 only at lambda = 1, not {lambda}"
            )))
        };
    }
    if !(lambda > 0.0) {
        return Err(Error::NoSolution(format!(
            "lambda = {lambda} is not admissible for any mass flux"
        )));
    }
    let j_min = base.gamma_min();
    let phi = |x: f64| -> Result<f64> {
        Ok(integrate_scaled_power(&base, lambda, x, -1.0, 0.0, -0.5, opts)? - 1.0)
    };

    let x_lo = 1e-8;
    let x_edge = if j_min < 0.0 { lambda / -j_min } else { f64::INFINITY };
    let x_hi = if x_edge.is_finite() { x_edge * (1.0 - 1e-3) } else { 1e8 };
    let mut grid: Vec<f64> = if x_hi > x_lo {
        let n = 400;
        (0..=n)
            .map(|i| x_lo * (x_hi / x_lo).powf(i as f64 / n as f64))
            .collect()
    } else {
        Vec::new()
    };
    if x_edge.is_finite() {
        grid.extend((4..=13).map(|k| x_edge * (1.0 - 10f64.powi(-k))));
        grid.retain(|&x| x > 0.0 && x < x_edge);
    }

    let spec = RootSpec {
        x_tol: 1e-15 * x_hi.min(1e8),
        f_tol: 1e-13,
        max_iter: 300,
    };
    let mut prev: Option<(f64, f64)> = None;
    for &x in &grid {
        let value = phi(x)?;
        if value == 0.0 {
            return Ok(MassFluxCalibration::Unique(-1.0 / x));
        }
        if let Some((x_prev, v_prev)) = prev {
            if v_prev * value < 0.0 {
                let mut failure = None;
                let root = bracketed_root(
                    |x| match phi(x) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.get_or_insert(e);
                            f64::NAN
                        }
                    },
                    x_prev,
                    x,
                    &spec,
                );
                if let Some(e) = failure {
                    return Err(e);
                }
                return Ok(MassFluxCalibration::Unique(-1.0 / root?));
            }
        }
        prev = Some((x, value));
    }
    Err(Error::NoSolution(format!(
        "no mass flux gives H(0) = 0 at lambda = {lambda}"
    )))
}

/// Physical parameters for a wave of wavelength `L`, before scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct RawParameters {
    pub wavelength: f64,
    pub d: f64,
    pub g: f64,
    pub p0: f64,
    pub c: Option<f64>,
    pub vorticity: VorticityDistribution,
}

/// Rescale lengths by `κ = 2π/L` so the wave is `2π`-periodic: depths and
/// the mass flux are multiplied by `κ`, gravity and vorticity divided by it.
pub fn scale_to_unit_wavenumber(
    raw: &RawParameters,
) -> Result<(FlowParameters, VorticityDistribution)> {
    if !(raw.wavelength > 0.0 && raw.wavelength.is_finite()) {
        return Err(Error::InvalidWavelength(raw.wavelength));
    }
    let kappa = 2.0 * std::f64::consts::PI / raw.wavelength;
    let mut flow = FlowParameters::new(raw.d * kappa, raw.g / kappa, raw.p0 * kappa)?;
    if let Some(c) = raw.c {
        flow = flow.with_wave_speed(c)?;
    }
    Ok((flow, raw.vorticity.scaled(1.0 / kappa)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn profile(gamma: f64, p0: f64) -> GammaProfile {
        GammaProfile::new(
            VorticityDistribution::Constant { gamma },
            FlowParameters::new(1.0, 1.0, p0).unwrap(),
        )
        .unwrap()
    }

    fn opts() -> SolverOptions {
        SolverOptions::default()
    }

    #[test]
    fn height_examples() {
        let irrot = profile(0.0, -1.0);
        assert!((laminar_height(&irrot, 4.0, 0.0, &opts()).unwrap() + 0.5).abs() < 1e-13);
        for &p in &[-1.0, -0.6, 0.0] {
            assert!(laminar_height(&irrot, 1.0, p, &opts()).unwrap().abs() < 1e-13);
        }
        // Γ = 2p, H(0) = √3 − 1 − 1
        let lin = profile(-1.0, -1.0);
        let h0 = laminar_height(&lin, 3.0, 0.0, &opts()).unwrap();
        assert!((h0 - (3f64.sqrt() - 2.0)).abs() < 1e-12);
        assert!((h0 + 0.267949).abs() < 1e-6);
        assert_eq!(laminar_height(&lin, 3.0, -1.0, &opts()).unwrap(), 0.0);
        assert!(matches!(
            laminar_height(&lin, 1.5, -0.5, &opts()),
            Err(Error::NonAdmissibleLambda { .. })
        ));
    }

    #[test]
    fn head_examples() {
        let irrot = profile(0.0, -1.0);
        assert!((hydraulic_head(&irrot, 1.0, &opts()).unwrap() - 3.0).abs() < 1e-12);
        assert!((hydraulic_head(&irrot, 4.0, &opts()).unwrap() - 5.0).abs() < 1e-12);
        let lin = profile(-1.0, -1.0);
        let q = hydraulic_head(&lin, 3.0, &opts()).unwrap();
        assert!((q - (2.0 * (3f64.sqrt() - 1.0) + 3.0)).abs() < 1e-12);
        assert!((q - 4.464102).abs() < 1e-6);
    }

    #[test]
    fn head_minimizer_examples() {
        let l0 = lambda_of_min_head(&profile(0.0, -1.0), &opts()).unwrap();
        assert!((l0 - 1.0).abs() < 1e-9);
        let p0 = -(1f64.tanh().sqrt());
        let l0 = lambda_of_min_head(&profile(0.0, p0), &opts()).unwrap();
        assert!((l0 - 1f64.tanh().powf(-2.0 / 3.0)).abs() < 1e-9);
        assert!((l0 - 1.19909).abs() < 1e-5);
        let l0 = lambda_of_min_head(&profile(-1.0, -1.0), &opts()).unwrap();
        let resid = 1.0 / (l0 - 2.0).sqrt() - 1.0 / l0.sqrt() - 1.0;
        assert!(resid.abs() < 1e-8, "{l0} {resid}");
        assert!((l0 - 2.3673).abs() < 1e-3);
    }

    #[test]
    fn head_is_minimal_at_lambda0() {
        let prof = GammaProfile::new(
            VorticityDistribution::PiecewiseConstant {
                breakpoints: vec![-0.6, -0.3],
                values: vec![1.5, -2.0, 0.5],
            },
            FlowParameters::new(1.2, 0.9, -0.8).unwrap(),
        )
        .unwrap();
        let l0 = lambda_of_min_head(&prof, &opts()).unwrap();
        let dl = 1e-4;
        let q = |l| hydraulic_head(&prof, l, &opts()).unwrap();
        let deriv = (q(l0 + dl) - q(l0 - dl)) / (2.0 * dl);
        assert!(deriv.abs() <= 1e-6 * q(l0));
        // convexity on a sampled admissible grid
        let floor = -prof.gamma_min();
        let grid: Vec<f64> = (1..40).map(|i| floor + 0.05 * i as f64).collect();
        for w in grid.windows(3) {
            assert!(q(w[0]) - 2.0 * q(w[1]) + q(w[2]) >= -1e-8);
        }
        for i in 0..=50 {
            let p = -1.0 + i as f64 / 50.0;
            let flow = LaminarFlow::new(&prof, floor + 0.3, &opts()).unwrap();
            assert!(flow.height_p(p).unwrap() + 1.0 > 0.0);
        }
    }

    #[test]
    fn surface_speed_examples() {
        let s = surface_relative_speed(1.0, &FlowParameters::new(1.0, 1.0, -1.0).unwrap()).unwrap();
        assert_eq!((s.sqrt_lambda, s.relative), (1.0, -1.0));
        let s = surface_relative_speed(4.0, &FlowParameters::new(2.0, 1.0, -1.0).unwrap()).unwrap();
        assert_eq!((s.sqrt_lambda, s.relative), (2.0, -1.0));
        let flow = FlowParameters::new(1.0, 1.0, -0.872694)
            .unwrap()
            .with_wave_speed(2.0)
            .unwrap();
        let s = surface_relative_speed(1.0, &flow).unwrap();
        assert!((s.relative + 0.872694).abs() < 1e-15);
        assert!((s.absolute.unwrap() - (2.0 - 0.872694)).abs() < 1e-15);
        assert!(surface_relative_speed(0.0, &flow).is_err());
        // 1/(H_p(0) + 1) = a(λ, 0) = √λ
        let prof = profile(-1.3, -0.7);
        let flow = LaminarFlow::new(&prof, 5.0, &opts()).unwrap();
        assert!((1.0 / (flow.height_p(0.0).unwrap() + 1.0) - 5f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn calibration_examples() {
        let zero = VorticityDistribution::Constant { gamma: 0.0 };
        assert_eq!(
            calibrate_mass_flux(&zero, 1.0, 1.0, 1.0, &opts()).unwrap(),
            MassFluxCalibration::AnyMassFlux
        );
        assert!(matches!(
            calibrate_mass_flux(&zero, 1.0, 1.0, 4.0, &opts()),
            Err(Error::NoSolution(_))
        ));
        let neg = VorticityDistribution::Constant { gamma: -1.0 };
        let MassFluxCalibration::Unique(p0) = calibrate_mass_flux(&neg, 1.0, 1.0, 3.0, &opts()).unwrap()
        else {
            panic!("expected a unique mass flux");
        };
        // closed form: (1/x)(√3 − √(3 − 2x)) = 1 with x = −1/p0
        let x = -1.0 / p0;
        let resid = (3f64.sqrt() - (3.0 - 2.0 * x).sqrt()) / x - 1.0;
        assert!(resid.abs() <= 1e-10, "{p0} {resid}");
        let prof = GammaProfile::new(neg, FlowParameters::new(1.0, 1.0, p0).unwrap()).unwrap();
        assert!(laminar_height(&prof, 3.0, 0.0, &opts()).unwrap().abs() < 1e-10);
    }

    #[test]
    fn calibration_matches_linear_shear_family() {
        // constant γ < 0: U0 = −t with t > |γ| d, p0 = −d (t − |γ| d / 2), λ = t²/(t − |γ| d / 2)²
        let (gamma, d, t) = (-0.8f64, 1.3f64, 2.1f64);
        let p0_exact = -d * (t - gamma.abs() * d / 2.0);
        let lambda = t * t / (t - gamma.abs() * d / 2.0).powi(2);
        let dist = VorticityDistribution::Constant { gamma };
        let MassFluxCalibration::Unique(p0) = calibrate_mass_flux(&dist, d, 1.0, lambda, &opts()).unwrap()
        else {
            panic!("expected a unique mass flux");
        };
        assert!((p0 - p0_exact).abs() < 1e-9, "{p0} vs {p0_exact}");
    }

    #[test]
    fn scaling_examples() {
        let raw = RawParameters {
            wavelength: 2.0 * std::f64::consts::PI,
            d: 1.5,
            g: 9.81,
            p0: -2.0,
            c: None,
            vorticity: VorticityDistribution::Constant { gamma: -1.0 },
        };
        let (flow, dist) = scale_to_unit_wavenumber(&raw).unwrap();
        assert!((flow.d - 1.5).abs() < 1e-15 && (flow.g - 9.81).abs() < 1e-15);
        assert_eq!(dist, VorticityDistribution::Constant { gamma: -1.0 });
        let raw = RawParameters {
            wavelength: std::f64::consts::PI,
            d: 1.0,
            ..raw
        };
        let (flow, dist) = scale_to_unit_wavenumber(&raw).unwrap();
        assert!((flow.d - 2.0).abs() < 1e-15);
        assert!((flow.g - 4.905).abs() < 1e-15);
        assert!((flow.p0 + 4.0).abs() < 1e-15);
        assert_eq!(dist, VorticityDistribution::Constant { gamma: -0.5 });
        let bad = RawParameters {
            wavelength: 0.0,
            ..raw
        };
        assert_eq!(
            scale_to_unit_wavenumber(&bad).unwrap_err(),
            Error::InvalidWavelength(0.0)
        );
    }
}

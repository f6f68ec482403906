//! Closed-form reference values checked through the public API.

use rotwave::bifurcation::{
    check_bed_layer, check_constant_vorticity, check_continuous_sufficient,
    check_general_sufficient, check_surface_layer, transversality_integral, BedLayer,
};
use rotwave::laminar::{hydraulic_head, lambda_of_min_head, laminar_height, surface_relative_speed};
use rotwave::spectral::{mode_k_solution, rayleigh_quotient, shooting_mu};
use rotwave::{
    build_wave, find_lambda_star, principal_eigen, BifurcationOutcome, Error, FlowParameters,
    GammaProfile, SolverOptions, VorticityDistribution,
};

fn tanh1() -> f64 {
    1f64.tanh()
}

fn constant(gamma: f64, d: f64, g: f64, p0: f64) -> GammaProfile {
    GammaProfile::new(
        VorticityDistribution::Constant { gamma },
        FlowParameters::new(d, g, p0).unwrap(),
    )
    .unwrap()
}

fn pinned() -> GammaProfile {
    constant(0.0, 1.0, 1.0, -tanh1().sqrt())
}

fn close(a: f64, b: f64, tol: f64) {
    assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol:e})");
}

#[test]
fn laminar_closed_forms() {
    let o = SolverOptions::default();
    // γ ≡ −1 with d = 1, p0 = −1 gives Γ(p) = 2p
    let prof = constant(-1.0, 1.0, 1.0, -1.0);
    close(laminar_height(&prof, 3.0, 0.0, &o).unwrap(), 3f64.sqrt() - 2.0, 1e-10);
    close(hydraulic_head(&prof, 3.0, &o).unwrap(), 2.0 * (3f64.sqrt() - 1.0) + 3.0, 1e-10);
    close(lambda_of_min_head(&prof, &o).unwrap(), 2.3673, 1e-3);
    close(lambda_of_min_head(&pinned(), &o).unwrap(), tanh1().powf(-2.0 / 3.0), 1e-8);
    let speed = surface_relative_speed(1.0, pinned().flow()).unwrap();
    close(speed.relative, -tanh1().sqrt(), 1e-15);
}

#[test]
fn irrotational_eigenpair() {
    let o = SolverOptions::default();
    let prof = pinned();
    let sol = principal_eigen(&prof, 1.0, &o).unwrap();
    close(sol.mu, -1.0, 1e-6);
    close(sol.value_at(-0.5), 0.5f64.sinh() / 1f64.sinh(), 1e-5);
    close(shooting_mu(&prof, 1.0).unwrap(), -1.0, 1e-8);

    let exact = |p: f64| (p + 1.0).sinh() / 1f64.sinh();
    let exact_p = |p: f64| (p + 1.0).cosh() / 1f64.sinh();
    close(rayleigh_quotient(&prof, 1.0, exact, exact_p, &[], &o).unwrap(), -1.0, 1e-8);
    let linear = rayleigh_quotient(&prof, 1.0, |p| p + 1.0, |_| 1.0, &[], &o).unwrap();
    close(linear, 3.0 * (tanh1() - 1.0) / tanh1(), 1e-10);

    // p0² = 1: φ = p + 1 attains the infimum 0
    let flat = constant(0.0, 1.0, 1.0, -1.0);
    close(principal_eigen(&flat, 1.0, &o).unwrap().mu, 0.0, 1e-6);
}

#[test]
fn mode_k_existence() {
    let o = SolverOptions::default();
    let prof = pinned();
    assert_eq!(mode_k_solution(&prof, 1.0, 1, &o).unwrap().k, 1);
    assert!(matches!(
        mode_k_solution(&prof, 1.0, 2, &o),
        Err(Error::NoModeSolution { k: 2, .. })
    ));
}

#[test]
fn pinned_bifurcation_point() {
    let o = SolverOptions::default();
    let prof = pinned();
    let pt = match find_lambda_star(&prof, &o).unwrap() {
        BifurcationOutcome::Bifurcation(p) => p,
        other => panic!("{other:?}"),
    };
    close(pt.lambda_star, 1.0, 1e-6);
    close(pt.lambda0, 1.19909, 1e-5);
    close(pt.q_star, 2.0 + tanh1(), 1e-8);
    let s1 = 1f64.sinh();
    let sinh2 = 2f64.sinh();
    let m2 = (sinh2 / 4.0 - 0.5) / (s1 * s1);
    let mp2 = (sinh2 / 4.0 + 0.5) / (s1 * s1);
    let t = -std::f64::consts::FRAC_PI_2 * m2 - 3.0 * std::f64::consts::PI * mp2;
    close(transversality_integral(&pt.mode, &prof).unwrap(), t, 1e-3);
}

#[test]
fn nonnegative_vorticity_bifurcates() {
    let o = SolverOptions::default();
    let prof = constant(0.5, 1.0, 1.0, -1.0);
    let pt = find_lambda_star(&prof, &o).unwrap();
    let pt = pt.point().expect("bifurcation");
    close(shooting_mu(&prof, pt.lambda_star).unwrap(), -1.0, 1e-6);
}

#[test]
fn criteria_reference_values() {
    let gamma_minus_one = |g| constant(-1.0, 1.0, g, -1.0);
    let c = check_general_sufficient(&gamma_minus_one(1.0), 1.0).unwrap();
    assert!(!c.holds);
    close(c.margin, -0.037090, 1e-6);
    let c = check_general_sufficient(&gamma_minus_one(2.0), 1.0).unwrap();
    assert!(c.holds);
    close(c.margin, 0.962910, 1e-6);
    let c = check_continuous_sufficient(&gamma_minus_one(1.0));
    close(c.margin, -0.037090, 1e-6);
    let c = check_continuous_sufficient(&gamma_minus_one(1.1));
    assert!(c.holds);
    close(c.margin, 0.062910, 1e-6);

    close(check_constant_vorticity(-1.0, 1.0, 1.0).margin, 0.523188, 1e-6);
    assert!(!check_constant_vorticity(-2.0, 1.0, 1.0).holds);
    close(check_surface_layer(-1.0, 0.5, 1.0).margin, 0.443176, 1e-6);
    close(check_surface_layer(-10.0, 2.0, 1.0).margin, -206.230, 1e-3);

    match check_bed_layer(-0.5, 1.0, 0.5, 1.0) {
        BedLayer::Defined { holds, margin, rhs } => {
            assert!(holds);
            close(rhs, 1.42266, 1e-5);
            close(margin, 0.92266, 1e-5);
        }
        other => panic!("{other:?}"),
    }
    assert!(matches!(
        check_bed_layer(-3.0, 1.0, 0.5, 1.0),
        BedLayer::Undefined { .. }
    ));
}

#[test]
fn first_order_wave_reference_values() {
    let o = SolverOptions::default();
    let prof = pinned();
    let pt = find_lambda_star(&prof, &o).unwrap();
    let pt = pt.point().unwrap();
    let field = build_wave(pt, &prof, 0.05, 64, &o).unwrap();
    let (surface, _) = field.surface_profile();
    let mid = surface.len() / 2;
    close(surface[mid].0, 0.0, 1e-12);
    close(surface[mid].1, 0.05, 1e-8);
    close(surface[0].1, -0.05, 1e-8);
    close(field.critical_amplitude(), tanh1(), 1e-6);
    close(field.nonstagnation_check(), 1.0 - 0.05 / tanh1(), 1e-6);
}

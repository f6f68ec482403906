use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootSpec {
    /// Absolute tolerance on the root location.
    pub x_tol: f64,
    /// Residual tolerance; iteration stops once `|f(x)| <= f_tol`.
    pub f_tol: f64,
    pub max_iter: usize,
}

impl Default for RootSpec {
    fn default() -> Self {
        Self {
            x_tol: 1e-12,
            f_tol: 0.0,
            max_iter: 200,
        }
    }
}

impl RootSpec {
    pub fn with_x_tol(x_tol: f64) -> Self {
        Self {
            x_tol,
            ..Self::default()
        }
    }
}

/// Brent's method on a sign-changing bracket `[lo, hi]`.
///
/// Inverse quadratic / secant steps are only accepted when they stay inside
/// the current bracket and shrink it fast enough; otherwise the step falls
/// back to bisection, so the bracket is never lost.
pub fn bracketed_root<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    spec: &RootSpec,
) -> Result<f64, NumericsError> {
    if !(spec.x_tol > 0.0) || spec.max_iter == 0 {
        return Err(NumericsError::InvalidInput(
            "root spec needs x_tol > 0 and max_iter >= 1".into(),
        ));
    }
    let (mut a, mut b) = (lo, hi);
    let mut fa = f(a);
    let mut fb = f(b);
    if fa.is_nan() || fb.is_nan() || fa * fb > 0.0 {
        return Err(NumericsError::NoSignChange {
            lo,
            hi,
            f_lo: fa,
            f_hi: fb,
        });
    }
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }

    let mut c = a;
    let mut fc = fa;
    let mut d = b - a;
    let mut e = d;
    for _ in 0..spec.max_iter {
        if fb * fc > 0.0 {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
        if fc.abs() < fb.abs() {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        let tol = 2.0 * f64::EPSILON * b.abs() + 0.5 * spec.x_tol;
        let m = 0.5 * (c - b);
        if m.abs() <= tol || fb == 0.0 || fb.abs() <= spec.f_tol {
            return Ok(b);
        }
        if e.abs() >= tol && fa.abs() > fb.abs() {
            let s = fb / fa;
            let (mut p, mut q);
            if a == c {
                p = 2.0 * m * s;
                q = 1.0 - s;
            } else {
                let qa = fa / fc;
                let r = fb / fc;
                p = s * (2.0 * m * qa * (qa - r) - (b - a) * (r - 1.0));
                q = (qa - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if p > 0.0 {
                q = -q;
            } else {
                p = -p;
            }
            if 2.0 * p < (3.0 * m * q - (tol * q).abs()).min((e * q).abs()) {
                e = d;
                d = p / q;
            } else {
                d = m;
                e = d;
            }
        } else {
            d = m;
            e = d;
        }
        a = b;
        fa = fb;
        b += if d.abs() > tol { d } else { tol.copysign(m) };
        fb = f(b);
        if fb.is_nan() {
            return Err(NumericsError::InvalidInput(format!(
                "function returned NaN at {b}"
            )));
        }
    }
    Err(NumericsError::RootNonConvergence(spec.max_iter))
}

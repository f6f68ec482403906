use super::NumericsError;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeOptions {
    pub rtol: f64,
    pub atol: f64,
    pub h_max: f64,
    pub max_steps: usize,
}

impl Default for OdeOptions {
    fn default() -> Self {
        Self {
            rtol: 1e-11,
            atol: 1e-13,
            h_max: f64::INFINITY,
            max_steps: 1_000_000,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
const B5: [f64; 7] = [
    35.0 / 384.0,
    0.0,
    500.0 / 1113.0,
    125.0 / 192.0,
    -2187.0 / 6784.0,
    11.0 / 84.0,
    0.0,
];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Adaptive Dormand–Prince integration of `y' = f(t, y)` from `t0` to `t1`.
///
/// After every step that passes the error test, `on_step(y_old, y_new)` is
/// called; it may rescale `y_new` in place, or return `false` to reject the
/// step, which is then retried with half the step size.
pub fn integrate<const N: usize, F, S>(
    mut f: F,
    t0: f64,
    t1: f64,
    y0: [f64; N],
    opts: &OdeOptions,
    mut on_step: S,
) -> Result<[f64; N], NumericsError>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
    S: FnMut(&[f64; N], &mut [f64; N]) -> bool,
{
    let span = t1 - t0;
    if span == 0.0 {
        return Ok(y0);
    }
    let dir = span.signum();
    let mut t = t0;
    let mut y = y0;
    let mut h = (span.abs() * 1e-3).min(opts.h_max);
    let mut k = [[0.0; N]; 7];
    k[0] = f(t, &y);

    for _ in 0..opts.max_steps {
        let remaining = (t1 - t) * dir;
        if remaining <= 1e-14 * span.abs() {
            return Ok(y);
        }
        h = h.min(remaining).min(opts.h_max);
        for s in 1..7 {
            let mut ys = y;
            for (j, kj) in k.iter().enumerate().take(s) {
                let a = A[s][j];
                if a != 0.0 {
                    for i in 0..N {
                        ys[i] += dir * h * a * kj[i];
                    }
                }
            }
            k[s] = f(t + dir * h * C[s], &ys);
        }
        let mut y_new = y;
        let mut err = 0.0f64;
        for i in 0..N {
            let mut hi5 = 0.0;
            let mut hi4 = 0.0;
            for s in 0..7 {
                hi5 += B5[s] * k[s][i];
                hi4 += B4[s] * k[s][i];
            }
            y_new[i] = y[i] + dir * h * hi5;
            let sc = opts.atol + opts.rtol * y[i].abs().max(y_new[i].abs());
            err = err.max((h * (hi5 - hi4)).abs() / sc);
        }
        if !err.is_finite() {
            h *= 0.25;
            if h < 1e-15 * span.abs() {
                return Err(NumericsError::OdeFailure {
                    t,
                    reason: "non-finite derivative".into(),
                });
            }
            continue;
        }
        if err <= 1.0 {
            if !on_step(&y, &mut y_new) {
                h *= 0.5;
                if h < 1e-15 * span.abs() {
                    return Err(NumericsError::OdeFailure {
                        t,
                        reason: "step repeatedly rejected by callback".into(),
                    });
                }
                continue;
            }
            t += dir * h;
            y = y_new;
            k[0] = f(t, &y);
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if h < 1e-15 * span.abs() {
                return Err(NumericsError::OdeFailure {
                    t,
                    reason: "step size underflow".into(),
                });
            }
        }
    }
    Err(NumericsError::OdeFailure {
        t,
        reason: format!("exceeded {} steps", opts.max_steps),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn harmonic_oscillator() {
        let y = integrate(
            |_, y: &[f64; 2]| [y[1], -y[0]],
            0.0,
            1.0,
            [0.0, 1.0],
            &OdeOptions::default(),
            |_, _| true,
        )
        .unwrap();
        assert!((y[0] - 1f64.sin()).abs() < 1e-10);
        assert!((y[1] - 1f64.cos()).abs() < 1e-10);
    }

    #[test]
    fn backward_exponential() {
        let y = integrate(
            |_, y: &[f64; 1]| [y[0]],
            1.0,
            0.0,
            [1f64.exp()],
            &OdeOptions::default(),
            |_, _| true,
        )
        .unwrap();
        assert!((y[0] - 1.0).abs() < 1e-10);
    }

    #[test]
    fn rescaling_callback_preserves_direction() {
        // y' = y grows like e^t; renormalizing each step leaves y[0]/y[1] intact
        let y = integrate(
            |_, y: &[f64; 2]| [y[0], 2.0 * y[1]],
            0.0,
            3.0,
            [1.0, 1.0],
            &OdeOptions::default(),
            |_, y| {
                let n = y[0].hypot(y[1]);
                y[0] /= n;
                y[1] /= n;
                true
            },
        )
        .unwrap();
        assert!((y[1] / y[0] - 3f64.exp()).abs() < 1e-8);
    }
}

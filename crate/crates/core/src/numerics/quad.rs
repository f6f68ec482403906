use super::NumericsError;

// 15-point Kronrod abscissae on [0, 1], descending; odd indices are the
// embedded 7-point Gauss nodes.
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_225,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_18,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_83,
];

// Gauss weights for XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureSpec {
    pub abs_tol: f64,
    pub rel_tol: f64,
    /// Interior points where the integrand may be non-smooth. No panel is
    /// ever allowed to straddle one of them.
    pub breakpoints: Vec<f64>,
    pub max_subdivisions: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            breakpoints: Vec::new(),
            max_subdivisions: 4000,
        }
    }
}

impl QuadratureSpec {
    pub fn with_tolerances(abs_tol: f64, rel_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    pub fn with_breakpoints(mut self, breakpoints: Vec<f64>) -> Self {
        self.breakpoints = breakpoints;
        self
    }
}

/// Seven-point Gauss–Legendre rule mapped to `[a, b]`.
pub fn gauss_legendre_7<F: FnMut(f64) -> f64>(mut f: F, a: f64, b: f64) -> f64 {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut sum = WG[3] * f(center);
    for j in 0..3 {
        let dx = half * XGK[2 * j + 1];
        sum += WG[j] * (f(center - dx) + f(center + dx));
    }
    sum * half
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(center - dx) + f(center + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Globally adaptive Gauss–Kronrod (7/15) quadrature over `[a, b]`.
///
/// The initial partition is `a`, the declared breakpoints and `b`; the panel
/// with the largest error estimate is bisected until the summed estimate
/// drops below `max(abs_tol, rel_tol * |I|)`.
pub fn adaptive_quad<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(NumericsError::InvalidInput(format!(
            "integration interval [{a}, {b}] is empty or non-finite"
        )));
    }
    if !(spec.abs_tol > 0.0) {
        return Err(NumericsError::InvalidInput("abs_tol must be positive".into()));
    }
    let mut edges = Vec::with_capacity(spec.breakpoints.len() + 2);
    edges.push(a);
    for &bp in &spec.breakpoints {
        if !(bp > a && bp < b) {
            return Err(NumericsError::InvalidInput(format!(
                "breakpoint {bp} is not interior to [{a}, {b}]"
            )));
        }
        if bp <= *edges.last().unwrap() {
            return Err(NumericsError::InvalidInput(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        edges.push(bp);
    }
    edges.push(b);

    let mut panels: Vec<Panel> = edges.windows(2).map(|w| gk15(&mut f, w[0], w[1])).collect();
    let limit = spec.max_subdivisions.max(panels.len());
    let mut subdivisions = 0usize;
    loop {
        let total: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        let target = spec.abs_tol.max(spec.rel_tol * total.abs());
        if error <= target {
            return Ok(total);
        }
        if subdivisions >= limit {
            return Err(NumericsError::NonConvergence { error, subdivisions });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, p)| {
                if p.error > acc.1 {
                    (i, p.error)
                } else {
                    acc
                }
            });
        let panel = panels.swap_remove(worst);
        let mid = 0.5 * (panel.a + panel.b);
        if !(mid > panel.a && mid < panel.b) {
            // Panel at round-off width; its error cannot be reduced further.
            return Err(NumericsError::NonConvergence { error, subdivisions });
        }
        panels.push(gk15(&mut f, panel.a, mid));
        panels.push(gk15(&mut f, mid, panel.b));
        subdivisions += 1;
    }
}

/// Like [`adaptive_quad`], but the integrand may carry an inverse
/// square-root type endpoint singularity at each point of `singular`.
///
/// On every panel adjacent to a singular point `c` the variable is changed to
/// `s = c ± t²`, which turns `(s − c)^{−1/2}` behaviour into a smooth
/// integrand. Singular points also act as breakpoints.
pub fn adaptive_quad_singular<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    singular: &[f64],
    spec: &QuadratureSpec,
) -> Result<f64, NumericsError> {
    if !(a < b) {
        return Err(NumericsError::InvalidInput(format!(
            "integration interval [{a}, {b}] is empty"
        )));
    }
    let mut edges: Vec<f64> = std::iter::once(a)
        .chain(spec.breakpoints.iter().copied())
        .chain(singular.iter().copied().filter(|&s| s > a && s < b))
        .chain(std::iter::once(b))
        .collect();
    edges.sort_by(|x, y| x.partial_cmp(y).unwrap());
    edges.dedup();
    let is_singular = |x: f64| singular.contains(&x);

    let mut total = 0.0;
    for w in edges.windows(2) {
        let (lo, hi) = (w[0], w[1]);
        let panel_spec = QuadratureSpec {
            abs_tol: spec.abs_tol / (edges.len() - 1) as f64,
            rel_tol: spec.rel_tol,
            breakpoints: Vec::new(),
            max_subdivisions: spec.max_subdivisions,
        };
        let (left, right) = (is_singular(lo), is_singular(hi));
        total += match (left, right) {
            (false, false) => adaptive_quad(&mut f, lo, hi, &panel_spec)?,
            (true, false) => {
                let width = (hi - lo).sqrt();
                adaptive_quad(|t| 2.0 * t * f(lo + t * t), 0.0, width, &panel_spec)?
            }
            (false, true) => {
                let width = (hi - lo).sqrt();
                adaptive_quad(|t| 2.0 * t * f(hi - t * t), 0.0, width, &panel_spec)?
            }
            (true, true) => {
                let mid = 0.5 * (lo + hi);
                let width = (mid - lo).sqrt();
                adaptive_quad(|t| 2.0 * t * f(lo + t * t), 0.0, width, &panel_spec)?
                    + adaptive_quad(|t| 2.0 * t * f(hi - t * t), 0.0, width, &panel_spec)?
            }
        };
    }
    Ok(total)
}

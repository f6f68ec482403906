//! Vorticity distributions `γ(p)` on `[-1, 0]` and the derived profile data:
//! the primitive `Γ(p) = (2d²/p0) ∫₀^p γ(s) ds`, its minimum `Γ_min` with the
//! last minimizer `p1`, the Hölder seminorm of `Γ` at `p1`, and the
//! coefficient `a(λ, p) = √(Γ(p) + λ)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Scaled physical constants of the flow (unit wavenumber, period `2π`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowParameters {
    /// Mean depth.
    pub d: f64,
    /// Gravitational acceleration.
    pub g: f64,
    /// Relative mass flux, negative.
    pub p0: f64,
    /// Wave speed; only used to turn `u − c` into `u`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

impl FlowParameters {
    pub fn new(d: f64, g: f64, p0: f64) -> Result<Self> {
        let flow = Self { d, g, p0, c: None };
        flow.validate()?;
        Ok(flow)
    }

    pub fn with_wave_speed(mut self, c: f64) -> Result<Self> {
        self.c = Some(c);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.d > 0.0 && self.d.is_finite()) {
            return Err(Error::InvalidParameter(format!("d = {} must be positive", self.d)));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err(Error::InvalidParameter(format!("g = {} must be positive", self.g)));
        }
        if !(self.p0 < 0.0 && self.p0.is_finite()) {
            return Err(Error::InvalidParameter(format!("p0 = {} must be negative", self.p0)));
        }
        if let Some(c) = self.c {
            if !(c > 0.0 && c.is_finite()) {
                return Err(Error::InvalidParameter(format!("c = {c} must be positive")));
            }
        }
        Ok(())
    }
}

/// The vorticity as a function of the normalized stream function `p`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VorticityDistribution {
    Constant {
        gamma: f64,
    },
    /// `values[i]` holds on `[b_{i}, b_{i+1})` with `b_0 = -1` and the last
    /// interval closed at `0`; at a breakpoint the right value is taken.
    PiecewiseConstant {
        breakpoints: Vec<f64>,
        values: Vec<f64>,
    },
    /// Piecewise-linear interpolation of samples; nodes run from -1 to 0.
    Tabulated {
        nodes: Vec<f64>,
        values: Vec<f64>,
    },
}

impl VorticityDistribution {
    pub fn validate(&self) -> Result<()> {
        let finite = |v: &[f64], what: &str| {
            if v.iter().all(|x| x.is_finite()) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be finite")))
            }
        };
        let increasing = |v: &[f64], what: &str| {
            if v.windows(2).all(|w| w[0] < w[1]) {
                Ok(())
            } else {
                Err(Error::InvalidParameter(format!("{what} must be strictly increasing")))
            }
        };
        match self {
            Self::Constant { gamma } => finite(&[*gamma], "gamma"),
            Self::PiecewiseConstant { breakpoints, values } => {
                if values.len() != breakpoints.len() + 1 {
                    return Err(Error::InvalidParameter(format!(
                        "piecewise_constant needs breakpoints + 1 values, got {} breakpoints and {} values",
                        breakpoints.len(),
                        values.len()
                    )));
                }
                finite(breakpoints, "breakpoints")?;
                finite(values, "values")?;
                increasing(breakpoints, "breakpoints")?;
                if breakpoints.iter().any(|&b| !(b > -1.0 && b < 0.0)) {
                    return Err(Error::InvalidParameter(
                        "breakpoints must lie strictly inside (-1, 0)".into(),
                    ));
                }
                Ok(())
            }
            Self::Tabulated { nodes, values } => {
                if nodes.len() < 2 || nodes.len() != values.len() {
                    return Err(Error::InvalidParameter(format!(
                        "tabulated needs at least two nodes and one value per node, got {} nodes and {} values",
                        nodes.len(),
                        values.len()
                    )));
                }
                finite(nodes, "nodes")?;
                finite(values, "values")?;
                increasing(nodes, "nodes")?;
                if nodes[0] != -1.0 || *nodes.last().unwrap() != 0.0 {
                    return Err(Error::InvalidParameter(
                        "tabulated nodes must start at -1 and end at 0".into(),
                    ));
                }
                Ok(())
            }
        }
    }

    /// `γ(p)`, right-continuous at jumps.
    pub fn gamma_eval(&self, p: f64) -> Result<f64> {
        check_domain(p)?;
        Ok(match self {
            Self::Constant { gamma } => *gamma,
            Self::PiecewiseConstant { breakpoints, values } => {
                values[breakpoints.partition_point(|&b| b <= p)]
            }
            Self::Tabulated { nodes, values } => {
                let k = nodes.partition_point(|&x| x <= p).clamp(1, nodes.len() - 1);
                let t = (p - nodes[k - 1]) / (nodes[k] - nodes[k - 1]);
                values[k - 1] + t * (values[k] - values[k - 1])
            }
        })
    }

    /// `sup |γ|` over `[-1, 0]`.
    pub fn sup_norm(&self) -> f64 {
        match self {
            Self::Constant { gamma } => gamma.abs(),
            Self::PiecewiseConstant { values, .. } | Self::Tabulated { values, .. } => {
                values.iter().fold(0.0, |m, v| m.max(v.abs()))
            }
        }
    }

    /// Points in `(-1, 0)` where `γ` is discontinuous.
    pub fn jump_points(&self) -> Vec<f64> {
        match self {
            Self::PiecewiseConstant { breakpoints, values } => breakpoints
                .iter()
                .enumerate()
                .filter(|(i, _)| values[*i] != values[i + 1])
                .map(|(_, &b)| b)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Multiply every vorticity value by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        match self {
            Self::Constant { gamma } => Self::Constant {
                gamma: gamma * factor,
            },
            Self::PiecewiseConstant { breakpoints, values } => Self::PiecewiseConstant {
                breakpoints: breakpoints.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
            Self::Tabulated { nodes, values } => Self::Tabulated {
                nodes: nodes.clone(),
                values: values.iter().map(|v| v * factor).collect(),
            },
        }
    }

    /// Pieces on which `γ` is linear, as `(p_start, p_end, γ_start, γ_end)`.
    fn segments(&self) -> Vec<(f64, f64, f64, f64)> {
        match self {
            Self::Constant { gamma } => vec![(-1.0, 0.0, *gamma, *gamma)],
            Self::PiecewiseConstant { breakpoints, values } => {
                let edges: Vec<f64> = std::iter::once(-1.0)
                    .chain(breakpoints.iter().copied())
                    .chain(std::iter::once(0.0))
                    .collect();
                edges
                    .windows(2)
                    .zip(values)
                    .map(|(w, &v)| (w[0], w[1], v, v))
                    .collect()
            }
            Self::Tabulated { nodes, values } => nodes
                .windows(2)
                .zip(values.windows(2))
                .map(|(x, v)| (x[0], x[1], v[0], v[1]))
                .collect(),
        }
    }
}

fn check_domain(p: f64) -> Result<()> {
    if (-1.0..=0.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::OutOfDomain(p))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
struct Segment {
    start: f64,
    end: f64,
    gamma_start: f64,
    gamma_end: f64,
    /// `∫₀^start γ`.
    integral_at_start: f64,
}

impl Segment {
    fn gamma(&self, p: f64) -> f64 {
        let t = (p - self.start) / (self.end - self.start);
        self.gamma_start + t * (self.gamma_end - self.gamma_start)
    }

    fn integral_from_zero(&self, p: f64) -> f64 {
        let x = p - self.start;
        let slope = (self.gamma_end - self.gamma_start) / (self.end - self.start);
        self.integral_at_start + self.gamma_start * x + 0.5 * slope * x * x
    }
}

/// `Γ` and its derived quantities for a fixed distribution and flow.
/// Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaProfile {
    source: VorticityDistribution,
    flow: FlowParameters,
    segments: Vec<Segment>,
    gamma_min: f64,
    p1: f64,
    jump_points: Vec<f64>,
    holder_alpha: f64,
    holder_theta: f64,
}

impl GammaProfile {
    pub fn new(source: VorticityDistribution, flow: FlowParameters) -> Result<Self> {
        source.validate()?;
        flow.validate()?;
        let pieces = source.segments();
        let mut segments = Vec::with_capacity(pieces.len());
        let mut integral_at_end = 0.0;
        for &(start, end, gamma_start, gamma_end) in pieces.iter().rev() {
            let integral_at_start = integral_at_end - 0.5 * (gamma_start + gamma_end) * (end - start);
            segments.push(Segment {
                start,
                end,
                gamma_start,
                gamma_end,
                integral_at_start,
            });
            integral_at_end = integral_at_start;
        }
        segments.reverse();
        let jump_points = source.jump_points();
        let mut profile = Self {
            source,
            flow,
            segments,
            gamma_min: 0.0,
            p1: 0.0,
            jump_points,
            holder_alpha: 1.0,
            holder_theta: 0.0,
        };
        let (gamma_min, p1) = profile.locate_minimum();
        profile.gamma_min = gamma_min;
        profile.p1 = p1;
        profile.holder_theta = profile.holder_seminorm(1.0)?;
        Ok(profile)
    }

    /// Recompute the stored Hölder data for exponent `alpha`.
    pub fn with_holder_alpha(mut self, alpha: f64) -> Result<Self> {
        self.holder_theta = self.holder_seminorm(alpha)?;
        self.holder_alpha = alpha;
        Ok(self)
    }

    pub fn source(&self) -> &VorticityDistribution {
        &self.source
    }

    pub fn flow(&self) -> &FlowParameters {
        &self.flow
    }

    pub fn gamma_min(&self) -> f64 {
        self.gamma_min
    }

    /// Largest point where `Γ` attains its minimum.
    pub fn p1(&self) -> f64 {
        self.p1
    }

    pub fn jump_points(&self) -> &[f64] {
        &self.jump_points
    }

    pub fn holder_alpha(&self) -> f64 {
        self.holder_alpha
    }

    pub fn holder_theta(&self) -> f64 {
        self.holder_theta
    }

    /// `(Γ_min, p1)`.
    pub fn minimum(&self) -> (f64, f64) {
        (self.gamma_min, self.p1)
    }

    /// Points where `Γ` is not smooth or may degenerate: vorticity jumps and
    /// `p1` when it is interior.
    pub fn critical_points(&self) -> Vec<f64> {
        let mut pts = self.jump_points.clone();
        if self.p1 > -1.0 && self.p1 < 0.0 {
            pts.push(self.p1);
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts.dedup();
        pts
    }

    fn scale(&self) -> f64 {
        2.0 * self.flow.d * self.flow.d / self.flow.p0
    }

    fn segment_at(&self, p: f64) -> &Segment {
        let k = self.segments.partition_point(|s| s.start <= p);
        &self.segments[k.saturating_sub(1)]
    }

    /// `γ(p)`, right-continuous.
    pub fn gamma(&self, p: f64) -> Result<f64> {
        check_domain(p)?;
        Ok(self.segment_at(p).gamma(p))
    }

    /// `Γ(p)`.
    pub fn primitive(&self, p: f64) -> Result<f64> {
        check_domain(p)?;
        Ok(self.primitive_unchecked(p))
    }

    pub(crate) fn primitive_unchecked(&self, p: f64) -> f64 {
        if p == 0.0 {
            return 0.0;
        }
        self.scale() * self.segment_at(p).integral_from_zero(p)
    }

    /// `a(λ, p) = √(Γ(p) + λ)`.
    pub fn coefficient_a(&self, lambda: f64, p: f64) -> Result<f64> {
        check_domain(p)?;
        let value = self.primitive_unchecked(p) + lambda;
        if value > 0.0 {
            Ok(value.sqrt())
        } else {
            Err(Error::NonAdmissibleLambda { lambda, p, value })
        }
    }

    /// Errors unless `λ + Γ > 0` on all of `[-1, 0]`.
    pub fn check_admissible(&self, lambda: f64) -> Result<()> {
        let value = lambda + self.gamma_min;
        if value > 0.0 && lambda.is_finite() {
            Ok(())
        } else {
            Err(Error::NonAdmissibleLambda {
                lambda,
                p: self.p1,
                value,
            })
        }
    }

    /// Candidate extremum locations of `Γ`: segment ends and zeros of `γ`.
    fn structural_points(&self) -> Vec<f64> {
        let mut pts = vec![-1.0];
        for s in &self.segments {
            if s.gamma_start * s.gamma_end < 0.0 {
                let t = s.gamma_start / (s.gamma_start - s.gamma_end);
                pts.push(s.start + t * (s.end - s.start));
            }
            pts.push(s.end);
        }
        pts
    }

    fn locate_minimum(&self) -> (f64, f64) {
        let pts = self.structural_points();
        let values: Vec<f64> = pts.iter().map(|&p| self.primitive_unchecked(p)).collect();
        let gamma_min = values.iter().copied().fold(f64::INFINITY, f64::min);
        let spread = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        let tie = 1e-14 * (1.0 + spread);
        let p1 = pts
            .iter()
            .zip(&values)
            .filter(|(_, &v)| v <= gamma_min + tie)
            .map(|(&p, _)| p)
            .fold(f64::NEG_INFINITY, f64::max);
        (gamma_min, p1)
    }

    /// `θ = sup_{p ≠ p1} |Γ(p) − Γ(p1)| / |p − p1|^α`.
    ///
    /// Exact for piecewise-linear `Γ` with `α = 1` (the ratio is monotone on
    /// each linear piece); otherwise a dense-grid supremum refined by
    /// golden-section search around every sampled local maximum.
    pub fn holder_seminorm(&self, alpha: f64) -> Result<f64> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "Hölder exponent {alpha} must lie in (0, 1]"
            )));
        }
        let p1 = self.p1;
        let base = self.primitive_unchecked(p1);
        let ratio = |p: f64| {
            let dist = (p - p1).abs();
            if dist == 0.0 {
                0.0
            } else {
                (self.primitive_unchecked(p) - base).abs() / dist.powf(alpha)
            }
        };

        let mut theta = self
            .structural_points()
            .into_iter()
            .filter(|&p| p != p1)
            .map(ratio)
            .fold(0.0f64, f64::max);
        if alpha == 1.0 {
            // one-sided limits at p1 are the one-sided slopes of Γ
            let scale = self.scale().abs();
            if p1 < 0.0 {
                theta = theta.max(scale * self.segment_at(p1).gamma(p1).abs());
            }
            if p1 > -1.0 {
                let k = self.segments.partition_point(|s| s.start < p1);
                theta = theta.max(scale * self.segments[k - 1].gamma(p1).abs());
            }
            if self.segments.iter().all(|s| s.gamma_start == s.gamma_end) {
                return Ok(theta);
            }
        }

        let n = 4096;
        let grid: Vec<f64> = (0..=n).map(|i| -1.0 + i as f64 / n as f64).collect();
        let samples: Vec<f64> = grid.iter().map(|&p| ratio(p)).collect();
        for i in 0..=n {
            let left = if i > 0 { samples[i - 1] } else { f64::NEG_INFINITY };
            let right = if i < n { samples[i + 1] } else { f64::NEG_INFINITY };
            if samples[i] > left && samples[i] >= right {
                let lo = grid[i.saturating_sub(1)];
                let hi = grid[(i + 1).min(n)];
                theta = theta.max(golden_max(&ratio, lo, hi));
            }
            theta = theta.max(samples[i]);
        }
        Ok(theta)
    }
}

fn golden_max<F: Fn(f64) -> f64>(f: &F, mut lo: f64, mut hi: f64) -> f64 {
    let r = 0.5 * (5f64.sqrt() - 1.0);
    let mut x1 = hi - r * (hi - lo);
    let mut x2 = lo + r * (hi - lo);
    let (mut f1, mut f2) = (f(x1), f(x2));
    let mut best = f(lo).max(f(hi)).max(f1).max(f2);
    while hi - lo > 1e-13 {
        if f1 < f2 {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + r * (hi - lo);
            f2 = f(x2);
        } else {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - r * (hi - lo);
            f1 = f(x1);
        }
        best = best.max(f1).max(f2);
    }
    best
}

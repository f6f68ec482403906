use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use rotwave::{FlowParameters, GammaProfile, SolverOptions, VorticityDistribution};

use crate::error::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowConfig {
    pub d: f64,
    pub g: f64,
    pub p0: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct NumericsConfig {
    pub mesh_points: usize,
    pub quad_abs_tol: f64,
    pub root_tol: f64,
    pub lambda_margin_schedule: Vec<f64>,
    pub mode_tol: f64,
    /// Samples of `μ(λ)` written to `mu_curve.csv`.
    pub mu_curve_points: usize,
}

impl Default for NumericsConfig {
    fn default() -> Self {
        let o = SolverOptions::default();
        Self {
            mesh_points: o.mesh_points,
            quad_abs_tol: o.quad_abs_tol,
            root_tol: o.root_tol,
            lambda_margin_schedule: o.lambda_margin_schedule,
            mode_tol: o.mode_tol,
            mu_curve_points: 41,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ReconstructConfig {
    pub amplitude: f64,
    pub n_q: usize,
    /// Only every `p_stride`-th streamline is written to `field.csv`; the
    /// surface and bed rows are always written.
    pub p_stride: usize,
}

impl Default for ReconstructConfig {
    fn default() -> Self {
        Self {
            amplitude: 0.05,
            n_q: 256,
            p_stride: 16,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CriteriaConfig {
    pub alpha: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub depth_frak: Option<f64>,
}

impl Default for CriteriaConfig {
    fn default() -> Self {
        Self {
            alpha: 1.0,
            depth_frak: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputsConfig {
    /// Used when `--out` is not given.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub directory: Option<PathBuf>,
    pub formats: Vec<String>,
}

impl Default for OutputsConfig {
    fn default() -> Self {
        Self {
            directory: None,
            formats: vec!["json".into(), "csv".into()],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub flow: FlowConfig,
    pub vorticity: VorticityDistribution,
    #[serde(default)]
    pub numerics: NumericsConfig,
    #[serde(default)]
    pub reconstruct: ReconstructConfig,
    #[serde(default)]
    pub criteria: CriteriaConfig,
    #[serde(default)]
    pub outputs: OutputsConfig,
}

fn pointer(path: &serde_path_to_error::Path) -> String {
    use serde_path_to_error::Segment;
    let mut out = String::new();
    for seg in path.iter() {
        out.push('/');
        match seg {
            Segment::Seq { index } => out.push_str(&index.to_string()),
            Segment::Map { key } => out.push_str(&key.replace('~', "~0").replace('/', "~1")),
            Segment::Enum { variant } => out.push_str(variant),
            Segment::Unknown => out.push('?'),
        }
    }
    out
}

fn require(ok: bool, at: &str, message: impl Into<String>) -> Result<(), CliError> {
    if ok {
        Ok(())
    } else {
        Err(CliError::Config {
            pointer: at.into(),
            message: message.into(),
        })
    }
}

/// Strict parse: unknown keys are rejected and every error carries the JSON
/// pointer of the offending field.
pub fn parse_config(text: &[u8]) -> Result<RunConfig, CliError> {
    let de = &mut serde_json::Deserializer::from_slice(text);
    let config: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
        let at = if e.inner().is_syntax() || e.inner().is_eof() {
            String::new()
        } else {
            pointer(e.path())
        };
        CliError::Config {
            pointer: at,
            message: e.inner().to_string(),
        }
    })?;
    config.validate()?;
    Ok(config)
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), CliError> {
        let f = &self.flow;
        require(f.d > 0.0 && f.d.is_finite(), "/flow/d", "must be positive")?;
        require(f.g > 0.0 && f.g.is_finite(), "/flow/g", "must be positive")?;
        require(f.p0 < 0.0 && f.p0.is_finite(), "/flow/p0", "must be negative")?;
        if let Some(c) = f.c {
            require(c > 0.0 && c.is_finite(), "/flow/c", "must be positive")?;
        }
        if let VorticityDistribution::PiecewiseConstant { breakpoints, values } = &self.vorticity {
            require(
                values.len() == breakpoints.len() + 1,
                "/vorticity/values",
                format!(
                    "values length must be breakpoints + 1 ({} breakpoints, {} values)",
                    breakpoints.len(),
                    values.len()
                ),
            )?;
        }
        if let VorticityDistribution::Tabulated { nodes, values } = &self.vorticity {
            require(
                values.len() == nodes.len(),
                "/vorticity/values",
                "values length must match nodes",
            )?;
        }
        self.vorticity.validate().map_err(|e| CliError::Config {
            pointer: "/vorticity".into(),
            message: e.to_string(),
        })?;

        let n = &self.numerics;
        require(
            n.mesh_points >= 201 && n.mesh_points % 2 == 1,
            "/numerics/mesh_points",
            "must be odd and at least 201",
        )?;
        require(n.quad_abs_tol > 0.0, "/numerics/quad_abs_tol", "must be positive")?;
        require(n.root_tol > 0.0, "/numerics/root_tol", "must be positive")?;
        require(n.mode_tol > 0.0, "/numerics/mode_tol", "must be positive")?;
        require(
            !n.lambda_margin_schedule.is_empty()
                && n.lambda_margin_schedule.iter().all(|&e| e > 0.0),
            "/numerics/lambda_margin_schedule",
            "must be a non-empty list of positive margins",
        )?;

        let r = &self.reconstruct;
        require(
            r.amplitude >= 0.0 && r.amplitude.is_finite(),
            "/reconstruct/amplitude",
            "must be non-negative",
        )?;
        require(r.n_q >= 16, "/reconstruct/n_q", "must be at least 16")?;
        require(r.p_stride >= 1, "/reconstruct/p_stride", "must be at least 1")?;

        let c = &self.criteria;
        require(
            c.alpha > 0.0 && c.alpha <= 1.0,
            "/criteria/alpha",
            "must lie in (0, 1]",
        )?;
        if let Some(depth) = c.depth_frak {
            require(
                depth > 0.0 && depth <= f.d,
                "/criteria/depth_frak",
                "must lie in (0, d]",
            )?;
        }
        for (i, fmt) in self.outputs.formats.iter().enumerate() {
            require(
                fmt == "json" || fmt == "csv",
                &format!("/outputs/formats/{i}"),
                format!("unknown format {fmt:?}"),
            )?;
        }
        Ok(())
    }

    pub fn solver_options(&self) -> SolverOptions {
        let n = &self.numerics;
        SolverOptions {
            mesh_points: n.mesh_points,
            quad_abs_tol: n.quad_abs_tol,
            root_tol: n.root_tol,
            lambda_margin_schedule: n.lambda_margin_schedule.clone(),
            mode_tol: n.mode_tol,
        }
    }

    pub fn flow_parameters(&self) -> Result<FlowParameters, CliError> {
        let mut flow = FlowParameters::new(self.flow.d, self.flow.g, self.flow.p0)
            .map_err(|e| CliError::config("/flow", e))?;
        if let Some(c) = self.flow.c {
            flow = flow.with_wave_speed(c).map_err(|e| CliError::config("/flow/c", e))?;
        }
        Ok(flow)
    }

    pub fn profile(&self) -> Result<GammaProfile, CliError> {
        let profile = GammaProfile::new(self.vorticity.clone(), self.flow_parameters()?)
            .map_err(|e| CliError::config("/vorticity", e))?;
        profile
            .with_holder_alpha(self.criteria.alpha)
            .map_err(|e| CliError::config("/criteria/alpha", e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_config_gets_defaults() {
        let c = parse_config(
            br#"{"flow":{"d":1,"g":1,"p0":-0.872694},"vorticity":{"kind":"constant","gamma":0}}"#,
        )
        .unwrap();
        assert_eq!(c.numerics.mesh_points, 2001);
        assert_eq!(c.numerics.quad_abs_tol, 1e-12);
        assert_eq!(c.numerics.root_tol, 1e-10);
        assert_eq!(c.reconstruct.n_q, 256);
        assert_eq!(c.criteria.alpha, 1.0);
    }

    fn pointer_of(text: &str) -> String {
        match parse_config(text.as_bytes()) {
            Err(CliError::Config { pointer, .. }) => pointer,
            other => panic!("expected a config error, got {other:?}"),
        }
    }

    #[test]
    fn errors_carry_pointers() {
        assert_eq!(
            pointer_of(r#"{"flow":{"d":1,"g":1,"p0":1},"vorticity":{"kind":"constant","gamma":0}}"#),
            "/flow/p0"
        );
        assert_eq!(
            pointer_of(
                r#"{"flow":{"d":1,"g":1,"p0":-1},"vorticity":{"kind":"piecewise_constant","breakpoints":[-0.5,-0.2],"values":[1,2]}}"#
            ),
            "/vorticity/values"
        );
        assert_eq!(
            pointer_of(r#"{"flow":{"d":1,"g":1,"p0":-1,"q":2},"vorticity":{"kind":"constant","gamma":0}}"#),
            "/flow/q"
        );
        assert_eq!(
            pointer_of(
                r#"{"flow":{"d":1,"g":1,"p0":-1},"vorticity":{"kind":"constant","gamma":0},"numerics":{"mesh_points":2000}}"#
            ),
            "/numerics/mesh_points"
        );
        assert!(parse_config(b"{not json").is_err());
    }
}

use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use rotwave::bifurcation::{
    criteria_report, transversality_integral, BedLayer, BifurcationOutcome, Criterion,
    CriteriaReport,
};
use rotwave::reconstruct::{build_wave, log_log_slope, weak_residual};
use rotwave::spectral::{mu_curve, principal_eigen};
use rotwave::{find_lambda_star, VorticityDistribution};

use crate::config::RunConfig;
use crate::error::{exit, CliError};
use crate::output::{fmt_float, text_cell, to_json, write_atomic, Csv};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Bifurcation,
    NoBifurcation,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolverInfo {
    pub name: &'static str,
    pub version: &'static str,
}

const SOLVER: SolverInfo = SolverInfo {
    name: "rotwave",
    version: env!("CARGO_PKG_VERSION"),
};

#[derive(Debug, Clone, Serialize)]
pub struct Provenance {
    pub config: RunConfig,
    pub solver: SolverInfo,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_star: Option<f64>,
    pub lambda0: f64,
    #[serde(rename = "Q_star", skip_serializing_if = "Option::is_none")]
    pub q_star: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mu_residual: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub transversality: Option<f64>,
    /// Smallest sampled `μ` when no bifurcation was found.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub inf_mu: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda_at_inf: Option<f64>,
    /// Grid indices where `μ < 0` failed to increase.
    pub mu_curve_violations: Vec<usize>,
    pub criteria: CriteriaReport,
    pub provenance: Provenance,
}

impl Report {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Bifurcation => exit::SUCCESS,
            Status::NoBifurcation => exit::NO_BIFURCATION,
        }
    }
}

pub struct Analysis {
    pub report: Report,
    pub mu_curve: Vec<(f64, f64)>,
}

/// `λ` samples from just above the admissibility floor to `2λ₀ + Γ_min`.
fn mu_curve_grid(floor: f64, lambda0: f64, points: usize) -> Vec<f64> {
    let span = 2.0 * (lambda0 - floor);
    (1..=points)
        .map(|i| floor + span * i as f64 / points as f64)
        .collect()
}

pub fn analyze(config: &RunConfig) -> Result<Analysis, CliError> {
    let opts = config.solver_options();
    let profile = config.profile()?;
    let criteria = criteria_report(&profile, config.criteria.alpha, config.criteria.depth_frak)?;
    let outcome = find_lambda_star(&profile, &opts)?;
    let lambda0 = match &outcome {
        BifurcationOutcome::Bifurcation(p) => p.lambda0,
        BifurcationOutcome::NoBifurcation { lambda0, .. } => *lambda0,
    };
    let grid = mu_curve_grid(-profile.gamma_min(), lambda0, config.numerics.mu_curve_points);
    let curve = mu_curve(&profile, &grid, &opts)?;
    let provenance = Provenance {
        config: config.clone(),
        solver: SOLVER,
    };
    let report = match outcome {
        BifurcationOutcome::Bifurcation(point) => Report {
            status: Status::Bifurcation,
            lambda_star: Some(point.lambda_star),
            lambda0,
            q_star: Some(point.q_star),
            mu_residual: Some(point.mu_residual),
            transversality: Some(transversality_integral(&point.mode, &profile)?),
            inf_mu: None,
            lambda_at_inf: None,
            mu_curve_violations: curve.violations,
            criteria,
            provenance,
        },
        BifurcationOutcome::NoBifurcation {
            inf_mu,
            lambda_at_inf,
            ..
        } => Report {
            status: Status::NoBifurcation,
            lambda_star: None,
            lambda0,
            q_star: None,
            mu_residual: None,
            transversality: None,
            inf_mu: Some(inf_mu),
            lambda_at_inf: Some(lambda_at_inf),
            mu_curve_violations: curve.violations,
            criteria,
            provenance,
        },
    };
    Ok(Analysis {
        report,
        mu_curve: curve.points,
    })
}

fn wants(config: &RunConfig, format: &str) -> bool {
    config.outputs.formats.iter().any(|f| f == format)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir.display(), e))
}

pub fn run_analyze(config: &RunConfig, out: &Path) -> Result<i32, CliError> {
    let analysis = analyze(config)?;
    ensure_dir(out)?;
    if wants(config, "json") {
        write_atomic(&out.join("report.json"), &to_json(&analysis.report))?;
    }
    if wants(config, "csv") {
        let mut csv = Csv::new(&["lambda", "mu"]);
        for (l, mu) in &analysis.mu_curve {
            csv.floats(&[*l, *mu]);
        }
        write_atomic(&out.join("mu_curve.csv"), csv.as_bytes())?;
    }
    Ok(analysis.report.exit_code())
}

#[derive(Debug, Clone, Serialize)]
pub struct ResidualRun {
    pub amplitude: f64,
    pub interior_norm: f64,
    pub boundary_norm: f64,
    pub min_jacobian: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct Residuals {
    pub lambda_star: f64,
    #[serde(rename = "Q_star")]
    pub q_star: f64,
    pub runs: Vec<ResidualRun>,
    /// Least-squares log-log slopes against the amplitude (two or more
    /// positive amplitudes).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub interior_slope: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub boundary_slope: Option<f64>,
}

/// Fields and surface for the first amplitude; residuals for all of them.
pub fn run_reconstruct(config: &RunConfig, amplitudes: &[f64], out: &Path) -> Result<i32, CliError> {
    let amplitudes: Vec<f64> = if amplitudes.is_empty() {
        vec![config.reconstruct.amplitude]
    } else {
        amplitudes.to_vec()
    };
    for (i, &s) in amplitudes.iter().enumerate() {
        if !(s >= 0.0 && s.is_finite()) {
            return Err(CliError::config(
                &format!("--amplitude[{i}]"),
                format!("amplitude {s} must be non-negative"),
            ));
        }
    }
    let opts = config.solver_options();
    let profile = config.profile()?;
    let point = match find_lambda_star(&profile, &opts)? {
        BifurcationOutcome::Bifurcation(p) => p,
        BifurcationOutcome::NoBifurcation { .. } => return Ok(exit::NO_BIFURCATION),
    };
    let n_q = config.reconstruct.n_q;

    let mut runs = Vec::with_capacity(amplitudes.len());
    let mut field_csv = None;
    let mut surface_csv = None;
    for (idx, &s) in amplitudes.iter().enumerate() {
        let field = build_wave(&point, &profile, s, n_q, &opts)?;
        let residual = weak_residual(&field, &profile, point.q_star)?;
        runs.push(ResidualRun {
            amplitude: s,
            interior_norm: residual.interior_norm,
            boundary_norm: residual.boundary_norm,
            min_jacobian: field.nonstagnation_check(),
        });
        if idx == 0 {
            let stride = config.reconstruct.p_stride;
            let top = field.n_p() - 1;
            let mut csv = Csv::new(&["q", "p", "x", "y", "h", "u_rel", "v", "psi"]);
            for j in (0..field.n_p()).filter(|&j| j % stride == 0 || j == top) {
                for i in 0..field.n_q() {
                    let k = field.index(i, j);
                    csv.floats(&[
                        field.q_nodes[i],
                        field.p_nodes[j],
                        field.x[k],
                        field.y[k],
                        field.h[k],
                        field.u_rel[k],
                        field.v[k],
                        field.psi[k],
                    ]);
                }
            }
            field_csv = Some(csv);
            let mut csv = Csv::new(&["x", "eta"]);
            for (x, eta) in field.surface_profile().0 {
                csv.floats(&[x, eta]);
            }
            surface_csv = Some(csv);
        }
    }
    let fit = |pick: fn(&ResidualRun) -> f64| {
        let pts: Vec<(f64, f64)> = runs.iter().map(|r| (r.amplitude, pick(r))).collect();
        log_log_slope(&pts)
    };
    let residuals = Residuals {
        lambda_star: point.lambda_star,
        q_star: point.q_star,
        interior_slope: fit(|r| r.interior_norm),
        boundary_slope: fit(|r| r.boundary_norm),
        runs,
    };

    ensure_dir(out)?;
    if wants(config, "csv") {
        if let Some(csv) = field_csv {
            write_atomic(&out.join("field.csv"), csv.as_bytes())?;
        }
        if let Some(csv) = surface_csv {
            write_atomic(&out.join("surface.csv"), csv.as_bytes())?;
        }
    }
    if wants(config, "json") {
        write_atomic(&out.join("residuals.json"), &to_json(&residuals))?;
    }
    Ok(exit::SUCCESS)
}

/// Parameters that `sweep` can vary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepName {
    Gamma,
    D,
    G,
    DepthFrak,
    P0,
    Lambda,
}

impl SweepName {
    fn as_str(self) -> &'static str {
        match self {
            Self::Gamma => "gamma",
            Self::D => "d",
            Self::G => "g",
            Self::DepthFrak => "depth_frak",
            Self::P0 => "p0",
            Self::Lambda => "lambda",
        }
    }
}

/// `name:lo:hi:n`, `n` evenly spaced values from `lo` to `hi`.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepParam {
    pub name: SweepName,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

impl FromStr for SweepParam {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let parts: Vec<&str> = s.split(':').collect();
        let [name, lo, hi, n] = parts[..] else {
            return Err(format!("expected name:lo:hi:n, got {s:?}"));
        };
        let name = match name {
            "gamma" => SweepName::Gamma,
            "d" => SweepName::D,
            "g" => SweepName::G,
            "depth_frak" => SweepName::DepthFrak,
            "p0" => SweepName::P0,
            "lambda" => SweepName::Lambda,
            other => return Err(format!("unknown sweep parameter {other:?}")),
        };
        let num = |t: &str| t.parse::<f64>().map_err(|e| format!("{t:?}: {e}"));
        let (lo, hi) = (num(lo)?, num(hi)?);
        let n = n.parse::<usize>().map_err(|e| format!("{n:?}: {e}"))?;
        if !(lo.is_finite() && hi.is_finite()) {
            return Err("sweep bounds must be finite".into());
        }
        Ok(Self { name, lo, hi, n })
    }
}

impl SweepParam {
    pub fn values(&self) -> Vec<f64> {
        match self.n {
            0 => Vec::new(),
            1 => vec![self.lo],
            n => (0..n)
                .map(|i| self.lo + (self.hi - self.lo) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

/// Cartesian product in lexicographic order (first parameter slowest).
fn grid(params: &[SweepParam]) -> Vec<Vec<f64>> {
    params.iter().fold(vec![Vec::new()], |acc, p| {
        let values = p.values();
        acc.iter()
            .flat_map(|prefix| {
                values.iter().map(move |&v| {
                    let mut row = prefix.clone();
                    row.push(v);
                    row
                })
            })
            .collect()
    })
}

fn criterion_cells(c: Option<Criterion>) -> [String; 2] {
    match c {
        Some(c) => [c.holds.to_string(), fmt_float(c.margin)],
        None => [String::new(), String::new()],
    }
}

fn bed_cells(b: Option<BedLayer>) -> [String; 2] {
    match b {
        Some(BedLayer::Defined { holds, margin, .. }) => [holds.to_string(), fmt_float(margin)],
        Some(BedLayer::Undefined { .. }) => ["undefined".into(), String::new()],
        None => [String::new(), String::new()],
    }
}

const CRITERIA_COLUMNS: [&str; 10] = [
    "general_sufficient",
    "general_margin",
    "continuous_sufficient",
    "continuous_margin",
    "constant_vorticity",
    "constant_margin",
    "surface_layer",
    "surface_margin",
    "bed_layer",
    "bed_margin",
];

const FULL_COLUMNS: [&str; 4] = ["status", "lambda_star", "lambda0", "mu"];

fn apply(config: &RunConfig, names: &[SweepName], values: &[f64]) -> (RunConfig, Option<f64>) {
    let mut c = config.clone();
    let mut lambda = None;
    for (name, &v) in names.iter().zip(values) {
        match name {
            SweepName::Gamma => c.vorticity = VorticityDistribution::Constant { gamma: v },
            SweepName::D => c.flow.d = v,
            SweepName::G => c.flow.g = v,
            SweepName::DepthFrak => c.criteria.depth_frak = Some(v),
            SweepName::P0 => c.flow.p0 = v,
            SweepName::Lambda => lambda = Some(v),
        }
    }
    (c, lambda)
}

fn criteria_row(config: &RunConfig) -> Result<Vec<String>, CliError> {
    let profile = config.profile()?;
    let r = criteria_report(&profile, config.criteria.alpha, config.criteria.depth_frak)?;
    Ok([
        criterion_cells(Some(r.general_sufficient)),
        criterion_cells(Some(r.continuous_sufficient)),
        criterion_cells(r.constant_vorticity),
        criterion_cells(r.surface_layer),
        bed_cells(r.bed_layer),
    ]
    .concat())
}

fn full_row(config: &RunConfig, lambda: Option<f64>) -> Result<Vec<String>, CliError> {
    let opts = config.solver_options();
    let profile = config.profile()?;
    if let Some(lambda) = lambda {
        let mu = principal_eigen(&profile, lambda, &opts)?.mu;
        return Ok(vec!["evaluated".into(), String::new(), String::new(), fmt_float(mu)]);
    }
    Ok(match find_lambda_star(&profile, &opts)? {
        BifurcationOutcome::Bifurcation(p) => vec![
            "bifurcation".into(),
            fmt_float(p.lambda_star),
            fmt_float(p.lambda0),
            fmt_float(p.mode.mu),
        ],
        BifurcationOutcome::NoBifurcation { lambda0, inf_mu, .. } => vec![
            "no_bifurcation".into(),
            String::new(),
            fmt_float(lambda0),
            fmt_float(inf_mu),
        ],
    })
}

pub struct SweepTable {
    pub csv: Csv,
    pub succeeded: usize,
    pub rows: usize,
}

pub fn sweep(config: &RunConfig, params: &[SweepParam], criteria_only: bool) -> Result<SweepTable, CliError> {
    if params.iter().any(|p| p.name == SweepName::Gamma)
        && !matches!(config.vorticity, VorticityDistribution::Constant { .. })
    {
        return Err(CliError::config("/vorticity", "a gamma sweep needs constant vorticity"));
    }
    if criteria_only && params.iter().any(|p| p.name == SweepName::Lambda) {
        return Err(CliError::config("--param", "lambda cannot be swept with --criteria-only"));
    }
    let names: Vec<SweepName> = params.iter().map(|p| p.name).collect();
    let mut header: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
    let width = if criteria_only {
        header.extend(CRITERIA_COLUMNS);
        CRITERIA_COLUMNS.len()
    } else {
        header.extend(FULL_COLUMNS);
        FULL_COLUMNS.len()
    };
    header.push("error");

    let points = grid(params);
    let results: Vec<Result<Vec<String>, CliError>> = points
        .par_iter()
        .map(|values| {
            let (c, lambda) = apply(config, &names, values);
            c.validate()?;
            if criteria_only {
                criteria_row(&c)
            } else {
                full_row(&c, lambda)
            }
        })
        .collect();

    let mut csv = Csv::new(&header);
    let mut succeeded = 0;
    for (values, result) in points.iter().zip(results) {
        let mut cells: Vec<String> = values.iter().map(|&v| fmt_float(v)).collect();
        match result {
            Ok(row) => {
                succeeded += 1;
                cells.extend(row);
                cells.push(String::new());
            }
            Err(e) => {
                cells.extend(std::iter::repeat_n(String::new(), width));
                cells.push(text_cell(&e.to_string()));
            }
        }
        csv.row(&cells);
    }
    Ok(SweepTable {
        csv,
        succeeded,
        rows: points.len(),
    })
}

pub fn run_sweep(
    config: &RunConfig,
    params: &[SweepParam],
    criteria_only: bool,
    out: &Path,
) -> Result<i32, CliError> {
    let table = sweep(config, params, criteria_only)?;
    ensure_dir(out)?;
    write_atomic(&out.join("sweep.csv"), table.csv.as_bytes())?;
    Ok(if table.rows == 0 || table.succeeded > 0 {
        exit::SUCCESS
    } else {
        exit::NUMERICAL
    })
}

pub fn run_criteria(config: &RunConfig) -> Result<Vec<u8>, CliError> {
    let profile = config.profile()?;
    let report = criteria_report(&profile, config.criteria.alpha, config.criteria.depth_frak)?;
    Ok(to_json(&report))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sweep_params_parse() {
        let p: SweepParam = "gamma:-2:-1.5:6".parse().unwrap();
        assert_eq!(p.name, SweepName::Gamma);
        let v = p.values();
        assert_eq!(v.len(), 6);
        assert_eq!(v[0], -2.0);
        assert_eq!(v[5], -1.5);
        assert!("gamma:-2:-1".parse::<SweepParam>().is_err());
        assert!("omega:0:1:2".parse::<SweepParam>().is_err());
        assert!("d:0:1:x".parse::<SweepParam>().is_err());
        let empty: SweepParam = "d:0:1:0".parse().unwrap();
        assert!(empty.values().is_empty());
    }

    #[test]
    fn grid_is_lexicographic() {
        let a: SweepParam = "d:1:2:2".parse().unwrap();
        let b: SweepParam = "g:3:5:3".parse().unwrap();
        let g = grid(&[a, b]);
        assert_eq!(
            g,
            vec![
                vec![1.0, 3.0],
                vec![1.0, 4.0],
                vec![1.0, 5.0],
                vec![2.0, 3.0],
                vec![2.0, 4.0],
                vec![2.0, 5.0]
            ]
        );
        assert_eq!(grid(&[]), vec![Vec::<f64>::new()]);
    }

    #[test]
    fn mu_grid_spans_floor_to_twice_lambda0() {
        let g = mu_curve_grid(-2.0, 1.0, 3);
        assert_eq!(g, vec![0.0, 2.0, 4.0]);
    }
}

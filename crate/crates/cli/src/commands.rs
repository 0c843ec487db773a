use std::io::Write;
use std::path::Path;

use facet_volumes::cone::{
    bipolar_vertices, cone_membership, is_centred_cube, is_centred_regular_octahedron, polar_vertices,
    same_point_set, Membership, PolarChart,
};
use facet_volumes::latitude::latitude_check as run_latitude;
use facet_volumes::linalg::Point;
use facet_volumes::minkowski::{reconstruct as run_reconstruct, PolytopeRecord, ReconstructOptions};
use facet_volumes::normals::{solve_normals_with_report, NormalSystemRecord, SolveOptions};
use facet_volumes::simplex::{
    classify_squared, derived_rng, facet_volume_vector, squared_volume_vector, SimplexRealization, SHAPE_TOL,
};
use facet_volumes::{ConeVerdict, Error, UnitNormalSystem};
use serde::Serialize;

use crate::args::{ClassifyArgs, VertexArgs};
use crate::input::{parse_vertices, read_json, read_source};
use crate::roundtrip::{roundtrip as run_roundtrip, RoundtripOptions, Status};
use crate::sample::{sample_records, write_csv, write_json};
use crate::{core_exit_code, CliError, Format, RunConfig, EXIT_OK, EXIT_REJECTED};

const LATITUDE_TOL: f64 = 1e-12;

fn emit_json<T: Serialize>(cfg: &RunConfig, value: &T) -> Result<(), CliError> {
    let mut out = cfg.output()?;
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    out.flush()?;
    Ok(())
}

fn emit_line(cfg: &RunConfig, line: &str) -> Result<(), CliError> {
    let mut out = cfg.output()?;
    writeln!(out, "{line}")?;
    out.flush()?;
    Ok(())
}

/// `true` for JSON output; CSV is not available for single results.
fn wants_json(cfg: &RunConfig) -> Result<bool, CliError> {
    match cfg.format {
        Some(Format::Csv) => Err(CliError::Usage(format!("{} has no CSV output", cfg.command))),
        Some(Format::Json) => Ok(true),
        None => Ok(false),
    }
}

fn json_only(cfg: &RunConfig) -> Result<(), CliError> {
    wants_json(cfg).map(|_| ())
}

fn solve_options(cfg: &RunConfig) -> SolveOptions {
    SolveOptions {
        residual_tol: cfg.tol_residual,
        distinct_tol: cfg.tol_distinct,
        cone_tol: cfg.tol_cone,
        ..SolveOptions::default()
    }
}

fn reconstruct_options(cfg: &RunConfig) -> ReconstructOptions {
    ReconstructOptions {
        area_tol: cfg.tol_area,
        system: solve_options(cfg),
        ..ReconstructOptions::default()
    }
}

fn load_vertices(a: &VertexArgs) -> Result<Vec<Point>, CliError> {
    let text = match (&a.vertices, &a.input) {
        (Some(inline), _) => inline.clone(),
        (None, Some(path)) => read_source(path)?,
        (None, None) => return Err(CliError::Usage("give a vertex file or --vertices".into())),
    };
    parse_vertices(&text)
}

fn join(values: &[f64]) -> String {
    values.iter().map(|v| v.to_string()).collect::<Vec<_>>().join(" ")
}

/// Resolves `d` for a weight vector of length `n`, defaulting to simplices.
fn dimension_for(cfg: &RunConfig, n: usize) -> Result<usize, CliError> {
    if let Some(expected) = cfg.n {
        if expected != n {
            return Err(CliError::Usage(format!("--n {expected} but {n} entries given")));
        }
    }
    let d = cfg.d.unwrap_or(n.saturating_sub(1));
    if d < 2 {
        return Err(CliError::Usage(format!("dimension must be at least 2, got {d}")));
    }
    Ok(d)
}

#[derive(Serialize)]
struct VolumesOutput {
    values: Vec<f64>,
    class: String,
    verdict: String,
    cone: ConeVerdict,
}

pub fn volumes(cfg: &RunConfig, a: &VertexArgs) -> Result<u8, CliError> {
    let json = wants_json(cfg)?;
    let simplex = SimplexRealization::new(load_vertices(a)?)?;
    let f = facet_volume_vector(&simplex)?;
    let class = classify_squared(&squared_volume_vector(&f), SHAPE_TOL);
    let verdict = cone_membership(f.values(), cfg.tol_cone)?;
    if json {
        emit_json(
            cfg,
            &VolumesOutput {
                values: f.values().to_vec(),
                class: class.to_string(),
                verdict: verdict.to_string(),
                cone: verdict,
            },
        )?;
    } else {
        emit_line(cfg, &format!("{} | {class} | {verdict}", join(f.values())))?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ClassifyOutput {
    class: String,
    squared: Vec<f64>,
    normalized_squared: Vec<f64>,
    polar: Membership,
    agree: bool,
}

pub fn classify(cfg: &RunConfig, a: &ClassifyArgs) -> Result<u8, CliError> {
    let json = wants_json(cfg)?;
    let values = match &a.alpha {
        Some(alpha) => alpha.clone(),
        None => {
            let simplex = SimplexRealization::new(load_vertices(&a.vertices)?)?;
            facet_volume_vector(&simplex)?.into_values()
        }
    };
    if values.len() < 3 || values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidInput("facet volumes must be at least 3 positive numbers".into()).into());
    }
    let squared: Vec<f64> = values.iter().map(|v| v * v).collect();
    let total: f64 = squared.iter().sum();
    let report = PolarChart::new(squared.len())?.acute_region_check(&squared, cfg.tol_cone)?;
    let class = classify_squared(&squared, SHAPE_TOL);
    if json {
        emit_json(
            cfg,
            &ClassifyOutput {
                class: class.to_string(),
                normalized_squared: squared.iter().map(|s| s / total).collect(),
                squared,
                polar: report.polar,
                agree: report.agree,
            },
        )?;
    } else {
        emit_line(cfg, &class.to_string())?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct MembershipOutput {
    alpha: Vec<f64>,
    verdict: String,
    cone: ConeVerdict,
    #[serde(skip_serializing_if = "Option::is_none")]
    polar: Option<Membership>,
    #[serde(skip_serializing_if = "Option::is_none")]
    agree: Option<bool>,
}

pub fn membership(cfg: &RunConfig, alpha: &[f64]) -> Result<u8, CliError> {
    let json = wants_json(cfg)?;
    let verdict = cone_membership(alpha, cfg.tol_cone)?;
    let total: f64 = alpha.iter().sum();
    let polar = if total > 0.0 && total.is_finite() {
        Some(PolarChart::new(alpha.len())?.corollary_equivalence(alpha, cfg.tol_cone)?)
    } else {
        None
    };
    if json {
        emit_json(
            cfg,
            &MembershipOutput {
                alpha: alpha.to_vec(),
                verdict: verdict.to_string(),
                cone: verdict,
                polar: polar.map(|p| p.polar),
                agree: polar.map(|p| p.agree),
            },
        )?;
    } else {
        let tail = match polar {
            Some(p) => format!(" | polar {:?} | agree {}", p.polar, p.agree),
            None => String::new(),
        };
        emit_line(cfg, &format!("{verdict}{tail}"))?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct NormalsOutput {
    #[serde(flatten)]
    record: NormalSystemRecord,
    seed: u64,
    restarts: usize,
    fallback_endpoint: bool,
}

pub fn solve_normals(cfg: &RunConfig, alpha: &[f64]) -> Result<u8, CliError> {
    json_only(cfg)?;
    let d = dimension_for(cfg, alpha.len())?;
    let (sys, info) = solve_normals_with_report(alpha, d, &mut derived_rng(cfg.seed, 0), &solve_options(cfg))?;
    emit_json(
        cfg,
        &NormalsOutput {
            record: NormalSystemRecord::from(&sys),
            seed: cfg.seed,
            restarts: info.restarts,
            fallback_endpoint: info.fallback_endpoint,
        },
    )?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct ReconstructOutput {
    #[serde(flatten)]
    polytope: PolytopeRecord,
    iterations: usize,
    max_relative_error: f64,
    balance_residual: f64,
}

pub fn reconstruct(cfg: &RunConfig, input: &Path) -> Result<u8, CliError> {
    json_only(cfg)?;
    let record: NormalSystemRecord = read_json(input)?;
    let sys = UnitNormalSystem::try_from(record)?;
    let r = run_reconstruct(&sys, &reconstruct_options(cfg))?;
    emit_json(
        cfg,
        &ReconstructOutput {
            polytope: PolytopeRecord::from(&r.geometry),
            iterations: r.iterations,
            max_relative_error: r.max_relative_error(&sys.weights),
            balance_residual: r.geometry.balance_residual(),
        },
    )?;
    Ok(EXIT_OK)
}

pub fn roundtrip(cfg: &RunConfig, alpha: &[f64]) -> Result<u8, CliError> {
    json_only(cfg)?;
    let d = dimension_for(cfg, alpha.len())?;
    let opts = RoundtripOptions {
        cone_tol: cfg.tol_cone,
        solve: solve_options(cfg),
        reconstruct: reconstruct_options(cfg),
    };
    let report = run_roundtrip(alpha, d, cfg.seed, &opts);
    emit_json(cfg, &report)?;
    Ok(match (&report.status, &report.source) {
        (Status::Ok, _) => EXIT_OK,
        (Status::Rejected, _) => EXIT_REJECTED,
        (Status::Failed, Some(e)) => core_exit_code(e),
        (Status::Failed, None) => crate::EXIT_CONVERGENCE,
    })
}

pub fn sample(cfg: &RunConfig) -> Result<u8, CliError> {
    let d = cfg.d.unwrap_or(3);
    if d < 2 {
        return Err(CliError::Usage(format!("dimension must be at least 2, got {d}")));
    }
    let count = cfg.count.unwrap_or(1000);
    let records = sample_records(d, count, cfg.seed)?;
    let mut out = cfg.output()?;
    match cfg.format.unwrap_or(Format::Csv) {
        Format::Csv => write_csv(&mut out, d, &records)?,
        Format::Json => write_json(&mut out, &records)?,
    }
    out.flush()?;
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct Body {
    chart_vertices: Vec<Point>,
    ambient_vertices: Vec<Point>,
}

#[derive(Serialize)]
struct PolarAudit {
    p_vertex_count: usize,
    p_star_vertex_count: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    is_cube: Option<bool>,
    #[serde(skip_serializing_if = "Option::is_none")]
    polar_is_regular_octahedron: Option<bool>,
    bipolar_matches: bool,
}

#[derive(Serialize)]
struct PolarOutput {
    n: usize,
    /// Orthonormal basis of the zero-sum hyperplane used for chart coordinates.
    chart_basis: Vec<Point>,
    p: Body,
    p_star: Body,
    /// Halfspaces `<y, a_i> <= 1` of the polar, in chart coordinates.
    p_star_normals: Vec<Point>,
    audit: PolarAudit,
}

pub fn polar(cfg: &RunConfig) -> Result<u8, CliError> {
    json_only(cfg)?;
    let n = cfg.n.unwrap_or(4);
    let chart = PolarChart::new(n)?;
    let p = &chart.p;
    let star = polar_vertices(&chart.p_star)?;
    let scale = p.body.diameter();
    let bipolar = bipolar_vertices(&p.body)?;
    let lift = |vs: &[Point]| vs.iter().map(|y| p.chart.to_ambient(y)).collect::<Vec<_>>();
    let audit = PolarAudit {
        p_vertex_count: p.body.len(),
        p_star_vertex_count: star.len(),
        is_cube: (n == 4).then(|| is_centred_cube(&p.body.vertices, 1e-10)),
        polar_is_regular_octahedron: (n == 4).then(|| is_centred_regular_octahedron(&star.vertices, 1e-10)),
        bipolar_matches: same_point_set(&bipolar.vertices, &p.body.vertices, 1e-9 * scale),
    };
    emit_json(
        cfg,
        &PolarOutput {
            n,
            chart_basis: p.chart.basis.clone(),
            p: Body {
                ambient_vertices: p.ambient_vertices(),
                chart_vertices: p.body.vertices.clone(),
            },
            p_star: Body {
                ambient_vertices: lift(&star.vertices),
                chart_vertices: star.vertices.clone(),
            },
            p_star_normals: chart.p_star.normals.clone(),
            audit,
        },
    )?;
    Ok(EXIT_OK)
}

pub fn latitude_check(cfg: &RunConfig, circles: usize) -> Result<u8, CliError> {
    json_only(cfg)?;
    let points = cfg.count.unwrap_or(100);
    if points < 2 || circles == 0 {
        return Err(CliError::Usage("need at least one circle and two points per circle".into()));
    }
    let report = run_latitude(circles, points, &mut derived_rng(cfg.seed, 0));
    emit_json(cfg, &report)?;
    if let Some(i) = report.first_violation(LATITUDE_TOL) {
        let c = &report.circles[i];
        return Err(CliError::CheckFailed(format!(
            "circle {i} (sigma {}) has spread {:e} and identity error {:e}",
            c.sigma, c.spread, c.max_identity_error
        )));
    }
    Ok(EXIT_OK)
}

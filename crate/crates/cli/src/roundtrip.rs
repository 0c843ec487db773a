use facet_volumes::cone::cone_membership;
use facet_volumes::minkowski::{max_relative_error, reconstruct, ReconstructOptions};
use facet_volumes::normals::{solve_normals_with_report, SolveOptions};
use facet_volumes::polytope::facet_volume_vector_of_polytope;
use facet_volumes::simplex::derived_rng;
use facet_volumes::{ConeVerdict, Error};
use serde::Serialize;

#[derive(Debug, Clone, Copy)]
pub struct RoundtripOptions {
    pub cone_tol: f64,
    pub solve: SolveOptions,
    pub reconstruct: ReconstructOptions,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Rejected,
    Failed,
}

#[derive(Debug, Clone, Serialize)]
pub struct MembershipStage {
    pub verdict: String,
    pub cone: ConeVerdict,
}

#[derive(Debug, Clone, Serialize)]
pub struct NormalsStage {
    pub residual: f64,
    pub relative_residual: f64,
    pub min_pairwise_distance: f64,
    pub rank: usize,
    pub restarts: usize,
    pub fallback_endpoint: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ReconstructStage {
    pub iterations: usize,
    pub max_relative_error: f64,
    pub balance_residual: f64,
    pub volume: f64,
    pub recursive_volume: f64,
    pub vertex_count: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct FacetStage {
    pub values: Vec<f64>,
    pub max_relative_error: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct RoundtripReport {
    pub alpha: Vec<f64>,
    pub d: usize,
    pub seed: u64,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub failed_stage: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub membership: Option<MembershipStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub solve_normals: Option<NormalsStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reconstruct: Option<ReconstructStage>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub facet_volumes: Option<FacetStage>,
    #[serde(skip)]
    pub source: Option<Error>,
}

impl RoundtripReport {
    fn fail(mut self, stage: &'static str, err: Error) -> Self {
        self.status = match err {
            Error::ConeViolation(_) => Status::Rejected,
            _ => Status::Failed,
        };
        self.failed_stage = Some(stage);
        self.error = Some(err.to_string());
        self.source = Some(err);
        self
    }
}

/// Runs membership, normal solving, reconstruction and facet-volume
/// extraction, recording each stage. Inputs off the open cone stop at the
/// first stage with status `Rejected`.
pub fn roundtrip(alpha: &[f64], d: usize, seed: u64, opts: &RoundtripOptions) -> RoundtripReport {
    let mut report = RoundtripReport {
        alpha: alpha.to_vec(),
        d,
        seed,
        status: Status::Ok,
        failed_stage: None,
        error: None,
        membership: None,
        solve_normals: None,
        reconstruct: None,
        facet_volumes: None,
        source: None,
    };
    let verdict = match cone_membership(alpha, opts.cone_tol) {
        Ok(v) => v,
        Err(e) => return report.fail("membership", e),
    };
    report.membership = Some(MembershipStage {
        verdict: verdict.to_string(),
        cone: verdict,
    });
    if !verdict.is_inside() {
        return report.fail("membership", Error::ConeViolation(verdict));
    }

    let solve = SolveOptions {
        cone_tol: opts.cone_tol,
        ..opts.solve
    };
    let (sys, info) = match solve_normals_with_report(alpha, d, &mut derived_rng(seed, 0), &solve) {
        Ok(s) => s,
        Err(e) => return report.fail("solve_normals", e),
    };
    let total: f64 = alpha.iter().sum();
    report.solve_normals = Some(NormalsStage {
        residual: sys.residual(),
        relative_residual: sys.residual() / total,
        min_pairwise_distance: sys.min_pairwise_distance(),
        rank: sys.rank(solve.rank_tol),
        restarts: info.restarts,
        fallback_endpoint: info.fallback_endpoint,
    });

    let rec_opts = ReconstructOptions {
        system: solve,
        ..opts.reconstruct
    };
    let rec = match reconstruct(&sys, &rec_opts) {
        Ok(r) => r,
        Err(e) => return report.fail("reconstruct", e),
    };
    let g = &rec.geometry;
    report.reconstruct = Some(ReconstructStage {
        iterations: rec.iterations,
        max_relative_error: rec.max_relative_error(alpha),
        balance_residual: g.balance_residual(),
        volume: g.volume,
        recursive_volume: g.recursive_volume,
        vertex_count: g.vertices.len(),
    });

    let hpoly = match rec.support.to_hpolytope() {
        Ok(h) => h,
        Err(e) => return report.fail("facet_volumes", e),
    };
    let f = match facet_volume_vector_of_polytope(&hpoly) {
        Ok(f) => f,
        Err(e) => return report.fail("facet_volumes", e),
    };
    let err = max_relative_error(f.values(), alpha);
    report.facet_volumes = Some(FacetStage {
        values: f.values().to_vec(),
        max_relative_error: err,
    });
    if !(err <= rec_opts.area_tol) {
        let rel: Vec<f64> = f.values().iter().zip(alpha).map(|(a, w)| (a - w).abs() / w).collect();
        return report.fail(
            "facet_volumes",
            Error::NoConvergence {
                iterations: rec.iterations,
                max_rel_error: err,
                rel_errors: rel,
            },
        );
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opts() -> RoundtripOptions {
        RoundtripOptions {
            cone_tol: facet_volumes::cone::CONE_TOL,
            solve: SolveOptions::default(),
            reconstruct: ReconstructOptions::default(),
        }
    }

    #[test]
    fn right_triangle() {
        let r = roundtrip(&[5.0, 3.0, 4.0], 2, 0, &opts());
        assert_eq!(r.status, Status::Ok);
        assert!(r.facet_volumes.unwrap().max_relative_error <= 1e-7);
    }

    #[test]
    fn boundary_is_rejected() {
        let r = roundtrip(&[1.0, 1.0, 2.0], 2, 0, &opts());
        assert_eq!(r.status, Status::Rejected);
        assert_eq!(r.failed_stage, Some("membership"));
        assert_eq!(r.membership.unwrap().verdict, "Boundary(3)");
    }

    #[test]
    fn five_equal_facets_in_3d() {
        let r = roundtrip(&[1.0; 5], 3, 0, &opts());
        assert_eq!(r.status, Status::Ok, "{:?}", r.error);
        let rec = r.reconstruct.unwrap();
        assert!(rec.vertex_count > 4);
        assert!(r.facet_volumes.unwrap().max_relative_error <= 1e-8);
    }
}

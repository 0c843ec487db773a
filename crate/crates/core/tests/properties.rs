use facet_volumes::cone::{cone_membership, ConeVerdict, CONE_TOL};
use facet_volumes::linalg::{dot, gram_volume, numeric_rank, Point, RANK_TOL};
use facet_volumes::minkowski::{reconstruct, ReconstructOptions};
use facet_volumes::normals::{solve_normals, SolveOptions};
use facet_volumes::polytope::{facet_volume_vector_of_polytope, polytope_geometry, HPolytope};
use facet_volumes::simplex::{
    classify, derived_rng, facet_volume_vector, FacetVolumeVector, SimplexRealization,
};
use facet_volumes::Error;
use nalgebra::DMatrix;
use proptest::prelude::*;

fn simplex_strategy(d: usize) -> impl Strategy<Value = Vec<Point>> {
    prop::collection::vec(prop::collection::vec(-2.0f64..2.0, d), d + 1)
        .prop_filter("non-degenerate", |v| SimplexRealization::new(v.clone()).is_ok())
}

fn orthogonal(d: usize, seed: Vec<f64>) -> DMatrix<f64> {
    let m = DMatrix::from_vec(d, d, seed);
    m.qr().q()
}

fn apply(q: &DMatrix<f64>, shift: &[f64], v: &[f64]) -> Point {
    let x = q * nalgebra::DVector::from_column_slice(v);
    x.iter().zip(shift).map(|(a, b)| a + b).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn gram_volume_invariances(
        v in simplex_strategy(3),
        seed in prop::collection::vec(-1.0f64..1.0, 9),
        shift in prop::collection::vec(-3.0f64..3.0, 3),
        c in 0.1f64..10.0,
        perm in Just(vec![2usize, 0, 3, 1]),
    ) {
        prop_assume!(DMatrix::from_vec(3, 3, seed.clone()).determinant().abs() > 1e-3);
        let base = gram_volume(&v).unwrap();
        let permuted: Vec<Point> = perm.iter().map(|&i| v[i].clone()).collect();
        prop_assert!((gram_volume(&permuted).unwrap() - base).abs() <= 1e-10 * base.max(1.0));
        let q = orthogonal(3, seed);
        let moved: Vec<Point> = v.iter().map(|p| apply(&q, &shift, p)).collect();
        prop_assert!((gram_volume(&moved).unwrap() - base).abs() <= 1e-10 * base.max(1.0));
        let scaled: Vec<Point> = v.iter().map(|p| p.iter().map(|x| c * x).collect()).collect();
        let want = base * c.powi(3);
        prop_assert!((gram_volume(&scaled).unwrap() - want).abs() <= 1e-10 * want.max(1.0));
    }

    #[test]
    fn rank_of_gram_matrix(
        a in prop::collection::vec(-1.0f64..1.0, 12),
        b in prop::collection::vec(-1.0f64..1.0, 8),
        r in 1usize..=4,
    ) {
        // A = L R with L 6 x r and R r x 4 has rank min(r, ...) generically
        let left = DMatrix::from_fn(6, r, |i, j| a[(i * 2 + j) % 12] + (i * j) as f64 * 0.1);
        let right = DMatrix::from_fn(r, 4, |i, j| b[(i * 4 + j) % 8] + if i == j { 1.0 } else { 0.0 });
        let m = left * right;
        let gram = m.transpose() * &m;
        prop_assert_eq!(numeric_rank(&m, RANK_TOL), numeric_rank(&gram, 1e-12));
    }

    #[test]
    fn facet_volumes_equivariance(
        v in simplex_strategy(3),
        seed in prop::collection::vec(-1.0f64..1.0, 9),
        c in 0.2f64..5.0,
    ) {
        prop_assume!(DMatrix::from_vec(3, 3, seed.clone()).determinant().abs() > 1e-3);
        let f = facet_volume_vector(&SimplexRealization::new(v.clone()).unwrap()).unwrap();
        let perm = [3usize, 1, 0, 2];
        let permuted: Vec<Point> = perm.iter().map(|&i| v[i].clone()).collect();
        let fp = facet_volume_vector(&SimplexRealization::new(permuted).unwrap()).unwrap();
        for (k, &i) in perm.iter().enumerate() {
            prop_assert!((fp.values()[k] - f.values()[i]).abs() <= 1e-10 * f.values()[i].max(1.0));
        }
        let q = orthogonal(3, seed);
        let moved: Vec<Point> = v.iter().map(|p| apply(&q, &[0.5, -1.0, 2.0], p)).collect();
        let fm = facet_volume_vector(&SimplexRealization::new(moved).unwrap()).unwrap();
        let scaled: Vec<Point> = v.iter().map(|p| p.iter().map(|x| c * x).collect()).collect();
        let fs = facet_volume_vector(&SimplexRealization::new(scaled).unwrap()).unwrap();
        for i in 0..4 {
            prop_assert!((fm.values()[i] - f.values()[i]).abs() <= 1e-10 * f.values()[i].max(1.0));
            let want = f.values()[i] * c * c;
            prop_assert!((fs.values()[i] - want).abs() <= 1e-10 * want.max(1.0));
        }
        // sufficiency for simplices
        let verdict = cone_membership(f.values(), CONE_TOL).unwrap();
        let inside = matches!(verdict, ConeVerdict::Inside { margin } if margin > 0.0);
        prop_assert!(inside);
        prop_assert_eq!(classify(&f, 1e-9), classify(&fs, 1e-9));
    }

    #[test]
    fn cone_symmetry_and_homogeneity(
        alpha in prop::collection::vec(0.01f64..1.0, 3..8),
        c in 0.01f64..100.0,
        rot in 0usize..8,
    ) {
        let verdict = cone_membership(&alpha, CONE_TOL).unwrap();
        let mut rotated = alpha.clone();
        let k = rot % alpha.len();
        rotated.rotate_left(k);
        let vr = cone_membership(&rotated, CONE_TOL).unwrap();
        prop_assert_eq!(verdict.membership(), vr.membership());
        let scaled: Vec<f64> = alpha.iter().map(|a| a * c).collect();
        let vs = cone_membership(&scaled, CONE_TOL).unwrap();
        prop_assert_eq!(verdict.membership(), vs.membership());
        if let (ConeVerdict::Inside { margin: m1 }, ConeVerdict::Inside { margin: m2 }) = (verdict, vs) {
            prop_assert!((m1 - m2).abs() <= 1e-12);
        }
    }

    #[test]
    fn random_support_vectors_balance(
        jitter in prop::collection::vec(-0.15f64..0.15, 18),
        h in prop::collection::vec(0.6f64..1.4, 6),
        shift in prop::collection::vec(-0.5f64..0.5, 3),
    ) {
        // perturbed cube normals, random offsets around a shifted origin
        let mut normals = Vec::new();
        for k in 0..3 {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; 3];
                e[k] = s;
                normals.push(e);
            }
        }
        for (i, u) in normals.iter_mut().enumerate() {
            for k in 0..3 {
                u[k] += jitter[3 * i + k];
            }
        }
        let offsets: Vec<f64> = normals
            .iter()
            .zip(&h)
            .map(|(u, hi)| hi * facet_volumes::linalg::norm(u) + dot(u, &shift))
            .collect();
        let poly = HPolytope::new(normals, offsets).unwrap();
        let g = polytope_geometry(&poly).unwrap();
        prop_assert!(g.balance_residual() <= 1e-9);
        let identity: f64 = g.h.iter().zip(&g.facet_areas).map(|(a, b)| a * b).sum();
        prop_assert!((3.0 * g.volume - identity).abs() <= 1e-9 * identity.abs());
        prop_assert!((g.volume - g.recursive_volume).abs() <= 1e-8 * g.volume);
        prop_assert!(g.max_facet_offset() <= 1e-9 * g.scale());
        match facet_volume_vector_of_polytope(&poly) {
            Ok(f) => {
                let v = cone_membership(f.values(), CONE_TOL).unwrap();
                let inside = matches!(v, ConeVerdict::Inside { margin } if margin > 0.0);
                prop_assert!(inside);
            }
            Err(Error::RedundantHalfspace(_)) => {}
            Err(e) => prop_assert!(false, "unexpected {e}"),
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solve_then_reconstruct(
        raw in prop::collection::vec(0.05f64..1.0, 5),
        seed in 0u64..1000,
    ) {
        let total: f64 = raw.iter().sum();
        prop_assume!(raw.iter().all(|a| 2.0 * a < total * (1.0 - 1e-3)));
        let sys = solve_normals(&raw, 3, &mut derived_rng(seed, 0), &SolveOptions::default()).unwrap();
        prop_assert!(sys.residual() <= 1e-11 * total);
        let r = reconstruct(&sys, &ReconstructOptions::default()).unwrap();
        prop_assert!(r.max_relative_error(&raw) <= 1e-8);
        prop_assert!(r.geometry.balance_residual() <= 1e-9);
        let f = FacetVolumeVector::new(3, r.geometry.facet_areas.clone()).unwrap();
        prop_assert!(cone_membership(f.values(), CONE_TOL).unwrap().is_inside());
    }
}

mod common;

use supersurf::algebra::{qf, ScalarAlgebra};
use supersurf::crosscheck::Pipeline;
use supersurf::dsl::{elaborate_exact, SurfaceSpec};
use supersurf::geometry::{check_identities, Probes};
use supersurf::random::{metric, rng, MetricShape};
use supersurf::{ExactScalar, GeometryError, IdentityKind, Metric, Parity, Status, SuperSurface};

use common::{bodies, brioschi, classical, fixture};

fn shape(odd: u8, order: u32, graded_symmetric: bool, degree: usize) -> MetricShape {
    MetricShape {
        odd,
        order,
        graded_symmetric,
        degree,
    }
}

#[test]
fn classical_limit_matches_textbook_riemannian_geometry() {
    let mut r = rng(11);
    let mut curved = 0;
    for _ in 0..4 {
        let m = metric(&mut r, shape(0, 1, true, 2)).unwrap();
        let oracle = classical(&bodies(&m));
        let pipe = Pipeline::run(m);
        for i in 0..2 {
            for j in 0..2 {
                assert_eq!(pipe.metric.inv(i, j).body(), oracle.inv[i][j]);
                assert_eq!(pipe.ricci.get(&[i, j]).body(), oracle.ricci[i][j]);
                for k in 0..2 {
                    assert_eq!(pipe.christoffel.lower.get(&[i, j, k]).body(), oracle.lower[i][j][k]);
                    assert_eq!(pipe.christoffel.upper.get(&[i, j, k]).body(), oracle.upper[i][j][k]);
                    for l in 0..2 {
                        assert_eq!(pipe.curvature.get(&[i, j, k, l]).body(), oracle.riemann[i][j][k][l]);
                    }
                }
            }
        }
        assert_eq!(pipe.scalar.body(), oracle.scalar);
        let g = bodies(&pipe.metric);
        assert_eq!(oracle.scalar, brioschi(&g[0][0], &g[0][1], &g[1][1]).scale(&qf(2, 1)));
        curved += usize::from(!oracle.scalar.is_zero());
    }
    assert!(curved > 0, "every sampled metric was flat");
}

#[test]
fn identities_hold_on_small_random_metrics() {
    let mut r = rng(5);
    for (odd, sym) in [(0, true), (2, true), (1, false)] {
        let m = metric(&mut r, shape(odd, 1, sym, 1)).unwrap();
        let probes = Probes::standard(m.surface());
        for c in check_identities(&m, &probes, &[]) {
            assert_ne!(c.status, Status::Fail, "{} failed for P = {odd}", c.kind);
            let (_, needs_sym) = c.kind.hypotheses();
            if sym || !needs_sym {
                assert_eq!(c.status, Status::Pass, "{} for P = {odd}", c.kind);
            }
        }
    }
}

#[test]
fn odd_count_of_odd_coordinates_has_no_symmetric_metric() {
    let err = metric(&mut rng(1), shape(1, 2, true, 1)).unwrap_err();
    assert!(matches!(err, GeometryError::NotInvertible(_)), "{err}");
}

#[test]
fn flat_metric_has_no_curvature() {
    let spec = SurfaceSpec::parse(&fixture("flat.surf")).unwrap();
    let pipe = Pipeline::run(elaborate_exact(&spec, 0).unwrap());
    assert!(pipe.christoffel.upper.entries().all(|(_, v)| v.is_zero()));
    assert!(pipe.curvature.entries().all(|(_, v)| v.is_zero()));
    assert!(pipe.scalar.is_zero());
}

#[test]
fn metric_parity_law_is_enforced() {
    let s = SuperSurface::new(1, 1);
    let xi = ExactScalar::generator(1, 1);
    let one = ExactScalar::one(1);
    let zero = ExactScalar::zero(1);
    let bad = vec![
        vec![one.clone(), zero.clone(), one.clone()],
        vec![zero.clone(), one.clone(), zero.clone()],
        vec![zero.clone(), zero.clone(), one.clone()],
    ];
    let err = Metric::new(s, Parity::Even, bad).unwrap_err();
    assert!(matches!(err, GeometryError::Parity { row: 1, col: 3, .. }), "{err}");
    let good = vec![
        vec![one.clone(), zero.clone(), xi.clone()],
        vec![zero.clone(), one.clone(), zero.clone()],
        vec![xi, zero, one],
    ];
    let m = Metric::new(s, Parity::Even, good).unwrap();
    assert!(!m.is_graded_symmetric());
    assert!(m.right_inverse_residual().iter().flatten().all(|v| v.is_zero()));
}

#[test]
fn symmetric_hypotheses_are_reported_not_applicable() {
    let m = metric(&mut rng(3), shape(1, 1, false, 1)).unwrap();
    let probes = Probes::standard(m.surface());
    let checks = check_identities(&m, &probes, &[IdentityKind::Torsion, IdentityKind::FirstBianchi]);
    for c in checks {
        assert_eq!(c.status, Status::NotApplicable);
        assert!(c.reason.unwrap().contains("graded-symmetric"));
    }
}

use std::f64::consts::PI;

use isoperilab::families::random_hull;
use isoperilab::functionals::{deficit, lambda_h};
use isoperilab::geometry::{dist_point_to_polygon, hausdorff_polygons};
use isoperilab::verification::triangle_holds;
use isoperilab::{ConvexPolygon, Point2};
use proptest::prelude::*;

fn cloud() -> impl Strategy<Value = Vec<Point2>> {
    prop::collection::vec((-5.0..5.0f64, -5.0..5.0f64).prop_map(|(x, y)| Point2::new(x, y)), 3..40)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hull_is_idempotent(pts in cloud()) {
        if let Ok(p) = ConvexPolygon::from_points(&pts) {
            let q = ConvexPolygon::from_points(p.vertices()).unwrap();
            prop_assert_eq!(p.vertices(), q.vertices());
            for &x in &pts {
                prop_assert!(p.dist_point(x) <= 1e-9);
            }
        }
    }

    #[test]
    fn isoperimetric_inequality(pts in cloud()) {
        if let Ok(p) = ConvexPolygon::from_points(&pts) {
            prop_assert!(p.perimeter() * p.perimeter() >= 4.0 * PI * p.area() * (1.0 - 1e-12));
            prop_assert!(deficit(&p) >= -1e-12);
        }
    }

    #[test]
    fn distance_is_1_lipschitz(pts in cloud(), ax in -8.0..8.0f64, ay in -8.0..8.0f64, bx in -8.0..8.0f64, by in -8.0..8.0f64) {
        if let Ok(p) = ConvexPolygon::from_points(&pts) {
            let (a, b) = (Point2::new(ax, ay), Point2::new(bx, by));
            let da = dist_point_to_polygon(a, &p);
            let db = dist_point_to_polygon(b, &p);
            prop_assert!((da - db).abs() <= a.dist(b) + 1e-12);
        }
    }

    #[test]
    fn lambda_center_is_optimal_along_lines(seed in 0u64..10_000, m in 4usize..20, angle in 0.0..PI) {
        let p = random_hull(seed, m).unwrap();
        let (v, c) = lambda_h(&p).unwrap();
        let r = (p.area() / PI).sqrt();
        let dir = Point2::from_angle(angle);
        for t in [-0.1, -1e-3, 1e-3, 0.1] {
            let z = c + dir * t;
            let w = isoperilab::functionals::hausdorff_to_disk(&p, &isoperilab::Disk::new(z, r).unwrap()) / r;
            prop_assert!(w >= v - 1e-8);
        }
    }

    #[test]
    fn triangle_property_on_pairs(s1 in 0u64..10_000, s2 in 0u64..10_000, m1 in 3usize..16, m2 in 3usize..16) {
        let p = random_hull(s1, m1).unwrap();
        let q = random_hull(s2, m2).unwrap();
        let (l1, _) = lambda_h(&p).unwrap();
        let (l2, _) = lambda_h(&q).unwrap();
        prop_assert!(triangle_holds(l1, l2, hausdorff_polygons(&p, &q)));
    }
}

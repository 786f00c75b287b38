//! Deficit, Hausdorff deviation from disks, Fraenkel asymmetry and the
//! shape functional `F = D / λ_H²`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::{ConvexPolygon, Disk, Tolerances};
use crate::point::Point2;
use crate::search::{golden_min, nested_golden_min, pattern_search};

/// Threshold on `λ_H` below which a shape counts as a ball and `F` is undefined.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BallExclusionPolicy {
    pub eps_ball: f64,
}

impl Default for BallExclusionPolicy {
    fn default() -> Self {
        Self { eps_ball: 1e-4 }
    }
}

/// Radius of the disk with the same area as `p`.
pub fn equivalent_radius(p: &ConvexPolygon) -> f64 {
    (p.area() / PI).sqrt()
}

/// Isoperimetric deficit `(P − 2πr) / 2πr` with `πr² = |P|`.
pub fn deficit(p: &ConvexPolygon) -> f64 {
    let ball_perimeter = 2.0 * PI * equivalent_radius(p);
    (p.perimeter() - ball_perimeter) / ball_perimeter
}

/// `max_{y ∈ P} dist(y, B)`. `|y − z|` is convex, so the maximum is at a vertex.
pub fn max_polygon_to_disk(p: &ConvexPolygon, b: &Disk) -> f64 {
    p.vertices()
        .iter()
        .map(|v| (v.dist(b.center) - b.radius).max(0.0))
        .fold(0.0, f64::max)
}

/// `max_{x ∈ B} dist(x, P)`, exact.
///
/// The supremum of the convex function `dist(·, P)` over the disk is attained
/// on the circle. The exterior of `P` splits into edge slabs, where the
/// distance is the edge offset, and vertex wedges, where it is the distance
/// to the vertex. On each piece of the circle the maximum is either at the
/// piece's interior critical point (circle point along the edge normal, or
/// antipode of the vertex) or where the circle crosses a slab/wedge boundary
/// ray; all of these are enumerated.
pub fn max_disk_to_polygon(p: &ConvexPolygon, b: &Disk) -> f64 {
    let z = b.center;
    let r = b.radius;
    let n = p.len();
    let v = p.vertices();
    let dirs: Vec<Point2> = (0..n).map(|i| (v[(i + 1) % n] - v[i]).normalized()).collect();

    let mut best: f64 = 0.0;
    let mut contained = true;
    for i in 0..n {
        let a = v[i];
        let t = dirs[i];
        let nrm = t.perp_cw();
        let len = v[(i + 1) % n].dist(a);
        if nrm.dot(z - a) + r > 0.0 {
            contained = false;
        }
        // Edge slab critical point.
        let x = z + nrm * r;
        let along = t.dot(x - a);
        let off = nrm.dot(x - a);
        if off > 0.0 && (0.0..=len).contains(&along) {
            best = best.max(off);
        }
        // Circle crossings of the two normal rays at this vertex.
        let prev_n = dirs[(i + n - 1) % n].perp_cw();
        for ray in [prev_n, nrm] {
            let w = a - z;
            let bb = ray.dot(w);
            let disc = bb * bb - (w.norm_sq() - r * r);
            if disc >= 0.0 {
                let s = disc.sqrt();
                for root in [-bb - s, -bb + s] {
                    if root > 0.0 {
                        best = best.max(root);
                    }
                }
            }
        }
        // Vertex wedge antipode: valid when z lies in the normal cone at a.
        let d = z - a;
        if d.dot(dirs[(i + n - 1) % n]) >= 0.0 && d.dot(t) <= 0.0 {
            best = best.max(d.norm() + r);
        }
    }
    if !contained && best <= 0.0 {
        // Candidate bookkeeping degenerated; fall back to sampling.
        return sampled_disk_to_polygon(p, b, 4096);
    }
    best
}

/// Dense-sampling estimate of `max_{x ∈ B} dist(x, P)` with golden-section
/// refinement around the best sample.
pub fn sampled_disk_to_polygon(p: &ConvexPolygon, b: &Disk, samples: usize) -> f64 {
    let at = |theta: f64| p.dist_point(b.center + Point2::from_angle(theta) * b.radius);
    let h = 2.0 * PI / samples as f64;
    let (k, mut best) = (0..samples)
        .map(|k| (k, at(k as f64 * h)))
        .fold((0, f64::NEG_INFINITY), |acc, x| if x.1 > acc.1 { x } else { acc });
    let c = k as f64 * h;
    if let Ok((_, v)) = golden_min(|t| -at(t), c - h, c + h, 1e-12) {
        best = best.max(-v);
    }
    best
}

/// Symmetric Hausdorff distance between `P` and the disk `B`.
pub fn hausdorff_to_disk(p: &ConvexPolygon, b: &Disk) -> f64 {
    max_polygon_to_disk(p, b).max(max_disk_to_polygon(p, b))
}

/// Deviation from the spherical shape `λ_H = min_z d_H(P, B_r(z)) / r` with the
/// optimal center. The objective is convex in `z`, so the nested golden-section
/// search reaches the global minimum.
pub fn lambda_h(p: &ConvexPolygon) -> Result<(f64, Point2)> {
    lambda_h_with(p, &Tolerances::DEFAULT)
}

pub fn lambda_h_with(p: &ConvexPolygon, tol: &Tolerances) -> Result<(f64, Point2)> {
    let r = equivalent_radius(p);
    let objective = |z: Point2| hausdorff_to_disk(p, &Disk { center: z, radius: r }) / r;
    let (lo, hi) = p.bounding_box();
    let pad = Point2::new(0.5 * r, 0.5 * r);
    let (mut lo, mut hi) = (lo - pad, hi + pad);
    // The optimum lies in the bounding box in practice; widen if the search
    // ends on the box edge.
    for _ in 0..4 {
        let (z, v) = nested_golden_min(objective, lo, hi, tol.opt * r)?;
        let margin = 4.0 * tol.opt * r;
        let on_edge = z.x - lo.x < margin || hi.x - z.x < margin || z.y - lo.y < margin || hi.y - z.y < margin;
        if !on_edge {
            return Ok((v, z));
        }
        let w = hi - lo;
        lo = lo - w;
        hi = hi + w;
    }
    Err(crate::error::Error::NoConvergence(
        "lambda_h center search kept hitting the search box".into(),
    ))
}

/// Exact area of `P ∩ B` by Green's theorem: each edge contributes the signed
/// area swept from the disk center, as a triangle where the edge is inside the
/// disk and as a circular sector where it is outside.
pub fn disk_polygon_intersection_area(p: &ConvexPolygon, b: &Disk) -> f64 {
    let r = b.radius;
    let r2 = r * r;
    let sector = |u: Point2, w: Point2| 0.5 * r2 * u.cross(w).atan2(u.dot(w));
    let mut total = 0.0;
    for (a, c) in p.edges() {
        let a = a - b.center;
        let c = c - b.center;
        let d = c - a;
        let qa = d.norm_sq();
        let qb = 2.0 * a.dot(d);
        let qc = a.norm_sq() - r2;
        let disc = qb * qb - 4.0 * qa * qc;
        if disc <= 0.0 {
            total += sector(a, c);
            continue;
        }
        let s = disc.sqrt();
        let t1 = (-qb - s) / (2.0 * qa);
        let t2 = (-qb + s) / (2.0 * qa);
        if t2 <= 0.0 || t1 >= 1.0 {
            total += sector(a, c);
            continue;
        }
        let p1 = if t1 > 0.0 { a + d * t1 } else { a };
        let p2 = if t2 < 1.0 { a + d * t2 } else { c };
        total += sector(a, p1) + 0.5 * p1.cross(p2) + sector(p2, c);
    }
    total.max(0.0)
}

/// Normalized symmetric difference `|P Δ B_r(x)| / r²` for a given center.
pub fn symmetric_difference_ratio(p: &ConvexPolygon, center: Point2) -> f64 {
    let r = equivalent_radius(p);
    let inter = disk_polygon_intersection_area(p, &Disk { center, radius: r });
    (p.area() + PI * r * r - 2.0 * inter) / (r * r)
}

/// Fraenkel asymmetry estimate with its center.
///
/// Multi-start pattern search from the centroid and from the `λ_H` center.
/// No convexity is assumed, so the value is the best minimum found: an upper
/// bound on the true asymmetry.
pub fn fraenkel(p: &ConvexPolygon) -> Result<(f64, Point2)> {
    let hint = lambda_h(p)?.1;
    fraenkel_from(p, &[p.centroid(), hint], &Tolerances::DEFAULT)
}

pub fn fraenkel_from(p: &ConvexPolygon, starts: &[Point2], tol: &Tolerances) -> Result<(f64, Point2)> {
    let r = equivalent_radius(p);
    let mut best = (f64::INFINITY, p.centroid());
    for &s in starts {
        let (c, v) = pattern_search(|x| symmetric_difference_ratio(p, x), s, 0.25 * r, 10.0 * tol.opt * r, 200_000)?;
        if v < best.0 {
            best = (v, c);
        }
    }
    Ok(best)
}

/// Per-shape bundle of all functionals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FunctionalReport {
    pub area: f64,
    pub perimeter: f64,
    pub diameter: f64,
    pub equivalent_radius: f64,
    pub deficit: f64,
    pub lambda_h: f64,
    pub lambda_h_center: Point2,
    pub fraenkel: Option<f64>,
    #[serde(rename = "F")]
    pub shape_functional: Option<f64>,
    pub ball: bool,
}

impl FunctionalReport {
    /// `F`, or `None` for shapes flagged as balls.
    pub fn f(&self) -> Option<f64> {
        self.shape_functional
    }
}

/// Full report without the (more expensive) Fraenkel asymmetry.
pub fn shape_functional(p: &ConvexPolygon) -> Result<FunctionalReport> {
    shape_functional_with(p, &BallExclusionPolicy::default(), &Tolerances::DEFAULT, false)
}

/// Full report including the Fraenkel asymmetry.
pub fn shape_report(p: &ConvexPolygon) -> Result<FunctionalReport> {
    shape_functional_with(p, &BallExclusionPolicy::default(), &Tolerances::DEFAULT, true)
}

pub fn shape_functional_with(
    p: &ConvexPolygon,
    policy: &BallExclusionPolicy,
    tol: &Tolerances,
    with_fraenkel: bool,
) -> Result<FunctionalReport> {
    let d = deficit(p);
    let (lh, center) = lambda_h_with(p, tol)?;
    let fr = if with_fraenkel {
        Some(fraenkel_from(p, &[p.centroid(), center], tol)?.0)
    } else {
        None
    };
    let ball = lh <= policy.eps_ball;
    Ok(FunctionalReport {
        area: p.area(),
        perimeter: p.perimeter(),
        diameter: p.diameter(),
        equivalent_radius: equivalent_radius(p),
        deficit: d,
        lambda_h: lh,
        lambda_h_center: center,
        fraenkel: fr,
        shape_functional: if ball { None } else { Some(d / (lh * lh)) },
        ball,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{rectangle, regular_ngon};

    fn centered_square_area_pi() -> ConvexPolygon {
        let h = PI.sqrt() / 2.0;
        ConvexPolygon::from_points(&[
            Point2::new(-h, -h),
            Point2::new(h, -h),
            Point2::new(h, h),
            Point2::new(-h, h),
        ])
        .unwrap()
    }

    #[test]
    fn deficit_examples() {
        assert!(deficit(&regular_ngon(512).unwrap()) < 1e-4);
        // closed form (4(l + L) − 2π) / 2π
        let closed = |l: f64| (4.0 * (l + PI / (4.0 * l)) - 2.0 * PI) / (2.0 * PI);
        assert!((deficit(&rectangle(0.5).unwrap()) - closed(0.5)).abs() < 1e-14);
        assert!((deficit(&rectangle(0.5).unwrap()) - 1.0 / PI).abs() < 1e-14);
        assert!((deficit(&rectangle(0.3).unwrap()) - 0.857_652_598_376_941_1).abs() < 1e-12);
    }

    #[test]
    fn polygon_to_disk_examples() {
        let sq = centered_square_area_pi();
        assert!((max_polygon_to_disk(&sq, &Disk::unit()) - (2f64.sqrt() * PI.sqrt() / 2.0 - 1.0)).abs() < 1e-14);
        let big = Disk::new(Point2::default(), 5.0).unwrap();
        assert_eq!(max_polygon_to_disk(&sq, &big), 0.0);
        let rect = rectangle(0.5).unwrap();
        let big_l = PI / 2.0;
        assert!((max_polygon_to_disk(&rect, &Disk::unit()) - ((big_l * big_l + 0.25f64).sqrt() - 1.0)).abs() < 1e-14);
    }

    #[test]
    fn disk_to_polygon_examples() {
        let rect = rectangle(0.5).unwrap();
        assert!((max_disk_to_polygon(&rect, &Disk::unit()) - 0.5).abs() < 1e-14);
        let small = Disk::new(Point2::new(0.2, 0.1), 0.3).unwrap();
        assert_eq!(max_disk_to_polygon(&rect, &small), 0.0);
        // far away disk: farthest circle point is the antipode of the nearest vertex
        let far = Disk::new(Point2::new(10.0, 10.0), 1.0).unwrap();
        let corner = Point2::new(PI / 2.0, 0.5);
        assert!((max_disk_to_polygon(&rect, &far) - (far.center.dist(corner) + 1.0)).abs() < 1e-12);
    }

    #[test]
    fn disk_centered_on_vertex() {
        let rect = rectangle(0.5).unwrap();
        let v = rect.vertices()[0];
        let b = Disk::new(v, 0.25).unwrap();
        let exact = max_disk_to_polygon(&rect, &b);
        let sampled = sampled_disk_to_polygon(&rect, &b, 20_000);
        assert!((exact - 0.25).abs() < 1e-14);
        assert!((exact - sampled).abs() < 1e-9);
    }

    #[test]
    fn hausdorff_rectangles() {
        let r5 = rectangle(0.5).unwrap();
        assert!((hausdorff_to_disk(&r5, &Disk::unit()) - 0.648_454_154_737_807_5).abs() < 1e-12);
        let r7 = rectangle(0.7).unwrap();
        assert!((hausdorff_to_disk(&r7, &Disk::unit()) - 0.322_451_553_889_157_25).abs() < 1e-12);
    }

    #[test]
    fn hausdorff_triangle_concentric() {
        let tri = regular_ngon(3).unwrap();
        let rho = tri.vertices().iter().map(|v| v.norm()).fold(0.0, f64::max);
        let expected = (rho - 1.0).max(1.0 - rho / 2.0);
        assert!((hausdorff_to_disk(&tri, &Disk::unit()) - expected).abs() < 1e-12);
    }

    #[test]
    fn lambda_h_rectangles_at_center() {
        let (v, c) = lambda_h(&rectangle(0.5).unwrap()).unwrap();
        assert!((v - 0.648_454_154_737_807_5).abs() < 1e-9, "{v}");
        assert!(c.norm() < 1e-8);
        let (v, _) = lambda_h(&rectangle(0.3).unwrap()).unwrap();
        assert!((v - 1.635_126_552_027_614_4).abs() < 1e-9, "{v}");
    }

    #[test]
    fn lambda_h_near_ball() {
        let p = regular_ngon(256).unwrap();
        let (v, c) = lambda_h(&p).unwrap();
        assert!(v < 1e-3);
        assert!(c.norm() < 1e-6);
    }

    #[test]
    fn intersection_area_trivial_cases() {
        let sq = centered_square_area_pi();
        let big = Disk::new(Point2::default(), 10.0).unwrap();
        assert!((disk_polygon_intersection_area(&sq, &big) - PI).abs() < 1e-12);
        let far = Disk::new(Point2::new(10.0, 0.0), 1.0).unwrap();
        assert!(disk_polygon_intersection_area(&sq, &far).abs() < 1e-12);
        // small disk strictly inside
        let inside = Disk::new(Point2::new(0.1, -0.2), 0.3).unwrap();
        assert!((disk_polygon_intersection_area(&sq, &inside) - PI * 0.09).abs() < 1e-12);
    }

    #[test]
    fn intersection_area_square_closed_form() {
        // four circular segments of the unit disk cut off at distance a = √π/2
        let a = PI.sqrt() / 2.0;
        let segment = a.acos() - a * (1.0 - a * a).sqrt();
        let expected = PI - 4.0 * segment;
        let got = disk_polygon_intersection_area(&centered_square_area_pi(), &Disk::unit());
        assert!((got - expected).abs() < 1e-12, "{got} vs {expected}");
    }

    #[test]
    fn fraenkel_square() {
        let a = PI.sqrt() / 2.0;
        let segment = a.acos() - a * (1.0 - a * a).sqrt();
        // |E Δ B| = |E| + |B| − 2|E ∩ B| = 8 segments at r = 1
        let expected = 8.0 * segment;
        let (v, c) = fraenkel(&centered_square_area_pi()).unwrap();
        assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
        assert!(c.norm() < 1e-6);
    }

    #[test]
    fn fraenkel_bounds() {
        let p = regular_ngon(256).unwrap();
        assert!(fraenkel(&p).unwrap().0 < 5e-3);
        let r = rectangle(0.3).unwrap();
        let (v, _) = fraenkel(&r).unwrap();
        assert!(v <= 2.0 * r.area() / (equivalent_radius(&r).powi(2)));
        assert!(v > 0.0);
    }

    #[test]
    fn shape_functional_examples() {
        let rep = shape_functional(&rectangle(0.5).unwrap()).unwrap();
        assert!(!rep.ball);
        assert!((rep.f().unwrap() - 0.756_992_493_451_971_6).abs() < 1e-8);
        let rep = shape_functional(&rectangle(0.7).unwrap()).unwrap();
        assert!((rep.f().unwrap() - 1.538_057_685_592_182_6).abs() < 1e-8);
        let rep = shape_functional(&regular_ngon(2048).unwrap()).unwrap();
        assert!(rep.ball);
        assert!(rep.f().is_none());
    }

    #[test]
    fn report_json_flags_ball() {
        let rep = shape_functional(&regular_ngon(2048).unwrap()).unwrap();
        let v = serde_json::to_value(&rep).unwrap();
        assert!(v["F"].is_null());
        assert_eq!(v["ball"], true);
        assert!(v["lambda_h_center"].is_array());
    }
}

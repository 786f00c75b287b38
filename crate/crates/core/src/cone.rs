//! Spherical-sector containment and the interior cone condition.
//!
//! For a boundary point `x` with slack `s_i` to the line of edge `i`, a sector
//! with axis angle `φ`, radius `R` and half-aperture `α` stays inside that
//! edge's half-plane iff the arc `[φ − α, φ + α]` avoids the open set of
//! directions `u` with `⟨u, n_i⟩ > s_i / R`. That set is an arc of half-width
//! `acos(s_i / R)` around the outward normal, so the admissible axes are the
//! complement of a union of arcs of half-width `α + acos(s_i / R)`.

use std::f64::consts::{FRAC_PI_2, PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ConvexPolygon, Tolerances};
use crate::point::Point2;

/// Default aperture of the cone condition.
pub const DEFAULT_APERTURE: f64 = FRAC_PI_2;
/// Default number of sample intervals per edge.
pub const DEFAULT_EDGE_SAMPLES: usize = 64;
/// Bisection steps used for the margin of a boundary point.
const MARGIN_STEPS: usize = 30;

/// Circular sector with vertex `vertex`, unit axis `axis`, radius and aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sector {
    pub vertex: Point2,
    pub axis: Point2,
    pub radius: f64,
    pub aperture: f64,
}

impl Sector {
    pub fn new(vertex: Point2, axis: Point2, radius: f64, aperture: f64) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(Error::BadParameter(format!("sector radius must be positive, got {radius}")));
        }
        if !(aperture > 0.0 && aperture <= PI) {
            return Err(Error::BadParameter(format!("aperture must lie in (0, π], got {aperture}")));
        }
        let n = axis.norm();
        if !(n > 0.0) || !n.is_finite() {
            return Err(Error::BadParameter("sector axis must be a nonzero vector".into()));
        }
        Ok(Self {
            vertex,
            axis: axis * (1.0 / n),
            radius,
            aperture,
        })
    }

    /// Quarter-disk sector (aperture π/2) with the axis at angle `phi`.
    pub fn quarter(vertex: Point2, phi: f64, radius: f64) -> Result<Self> {
        Self::new(vertex, Point2::from_angle(phi), radius, DEFAULT_APERTURE)
    }
}

/// Class parameters: cone radius `R` (relative to the area-π scale) and aperture.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClassSpec {
    pub radius: f64,
    pub aperture: f64,
    /// Membership also requires area π.
    pub normalized: bool,
    pub edge_samples: usize,
}

impl ClassSpec {
    pub fn new(radius: f64) -> Self {
        Self {
            radius,
            aperture: DEFAULT_APERTURE,
            normalized: true,
            edge_samples: DEFAULT_EDGE_SAMPLES,
        }
    }

    /// Cone radius actually required for `p`: `R · |P|^{1/2} · π^{−1/2}`.
    pub fn effective_radius(&self, p: &ConvexPolygon) -> f64 {
        self.radius * (p.area() / PI).sqrt()
    }
}

/// Closed arc of admissible axis angles, `start ∈ [0, 2π)`, `end ≥ start`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AngleInterval {
    pub start: f64,
    pub end: f64,
}

impl AngleInterval {
    pub fn width(&self) -> f64 {
        self.end - self.start
    }

    pub fn midpoint(&self) -> f64 {
        0.5 * (self.start + self.end)
    }

    /// Whether angle `phi` (any representative) lies in the arc, with slack `eps`.
    pub fn contains(&self, phi: f64, eps: f64) -> bool {
        let mut p = phi.rem_euclid(TAU);
        if p < self.start - eps {
            p += TAU;
        }
        p >= self.start - eps && p <= self.end + eps
    }
}

/// One boundary point inspected by [`cone_condition`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckedPoint {
    pub point: Point2,
    pub margin: f64,
    /// An admissible axis, when one exists.
    pub direction: Option<Point2>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConeReport {
    pub satisfied: bool,
    pub effective_radius: f64,
    pub worst_boundary_point: Point2,
    pub worst_margin: f64,
    pub checked_points: Vec<CheckedPoint>,
    /// Admissible axis arcs at each vertex, in vertex order.
    pub vertex_intervals: Vec<Vec<AngleInterval>>,
}

/// Largest value of `⟨u, n⟩` over unit `u` in the arc `[phi − half, phi + half]`,
/// with `psi` the angle of `n`.
#[inline]
fn arc_support(phi: f64, half: f64, psi: f64) -> f64 {
    let d = (phi - psi).rem_euclid(TAU);
    let d = d.min(TAU - d);
    if d <= half {
        1.0
    } else {
        (d - half).cos()
    }
}

/// Outward unit normals and offsets `c_i` with `P = {y : ⟨n_i, y⟩ ≤ c_i}`.
fn half_planes(p: &ConvexPolygon) -> Vec<(Point2, f64, f64)> {
    p.edges()
        .map(|(a, b)| {
            let n = (b - a).normalized().perp_cw();
            (n, n.dot(a), n.angle())
        })
        .collect()
}

/// `min_i (c_i − max_{y ∈ S} ⟨n_i, y⟩)`: nonnegative iff `S ⊆ P`.
pub fn sector_margin(s: &Sector, p: &ConvexPolygon) -> f64 {
    let phi = s.axis.angle();
    half_planes(p)
        .iter()
        .map(|&(n, c, psi)| {
            let base = n.dot(s.vertex);
            let arc = base + s.radius * arc_support(phi, 0.5 * s.aperture, psi);
            c - base.max(arc)
        })
        .fold(f64::INFINITY, f64::min)
}

/// Exact closed containment test `S ⊆ P` with slack `ε_geom`.
pub fn sector_in_polygon(s: &Sector, p: &ConvexPolygon) -> bool {
    sector_margin(s, p) >= -Tolerances::DEFAULT.geom
}

/// Complement on the circle of the union of open arcs `(c − w, c + w)`.
fn free_arcs(arcs: &[(f64, f64)]) -> Vec<AngleInterval> {
    if arcs.is_empty() {
        return vec![AngleInterval { start: 0.0, end: TAU }];
    }
    if arcs.iter().any(|&(_, w)| w >= PI) {
        return Vec::new();
    }
    // Unroll over three periods; gaps starting in the middle one are kept.
    let mut segs: Vec<(f64, f64)> = Vec::with_capacity(3 * arcs.len());
    for &(c, w) in arcs {
        let a = (c - w).rem_euclid(TAU);
        for k in 0..3 {
            let off = k as f64 * TAU;
            segs.push((a + off, a + off + 2.0 * w));
        }
    }
    segs.sort_by(|x, y| x.0.total_cmp(&y.0));
    let mut merged: Vec<(f64, f64)> = Vec::with_capacity(segs.len());
    for (a, b) in segs {
        match merged.last_mut() {
            Some(last) if a < last.1 => last.1 = last.1.max(b),
            _ => merged.push((a, b)),
        }
    }
    // Gaps between consecutive merged blocks, kept once per period.
    let mut gaps = Vec::new();
    for w in merged.windows(2) {
        let (g0, g1) = (w[0].1, w[1].0);
        if g0 >= TAU && g0 < 2.0 * TAU {
            gaps.push(AngleInterval {
                start: g0 - TAU,
                end: g1 - TAU,
            });
        }
    }
    gaps.sort_by(|x, y| x.start.total_cmp(&y.start));
    gaps
}

/// Context for repeated queries against one polygon.
struct ConeProbe<'a> {
    poly: &'a ConvexPolygon,
    planes: Vec<(Point2, f64, f64)>,
    radius: f64,
    half: f64,
    eps: f64,
}

impl<'a> ConeProbe<'a> {
    fn new(poly: &'a ConvexPolygon, radius: f64, aperture: f64, eps: f64) -> Self {
        Self {
            poly,
            planes: half_planes(poly),
            radius,
            half: 0.5 * aperture,
            eps,
        }
    }

    /// Admissible axis arcs when each edge clearance must be at least `level`.
    fn arcs_at_level(&self, x: Point2, level: f64) -> Vec<AngleInterval> {
        let mut arcs = Vec::new();
        for &(n, c, psi) in &self.planes {
            let k = (c - n.dot(x) - level) / self.radius;
            if k >= 1.0 {
                continue;
            }
            if k <= -1.0 {
                return Vec::new();
            }
            arcs.push((psi, self.half + k.acos()));
        }
        free_arcs(&arcs)
    }

    fn sector(&self, x: Point2, phi: f64) -> Sector {
        Sector {
            vertex: x,
            axis: Point2::from_angle(phi),
            radius: self.radius,
            aperture: 2.0 * self.half,
        }
    }

    /// Admissible arcs at `x`, each certified by the direct sector test at its midpoint.
    fn feasible(&self, x: Point2) -> Vec<AngleInterval> {
        self.arcs_at_level(x, -self.eps)
            .into_iter()
            .filter(|iv| sector_margin(&self.sector(x, iv.midpoint()), self.poly) >= -self.eps)
            .collect()
    }

    /// Lower bound on `sup_φ min_i (clearance)` at `x`, by bisection on the level.
    fn margin(&self, x: Point2, steps: usize) -> f64 {
        let (mut lo, mut hi) = (-self.radius - self.eps, self.radius);
        if self.arcs_at_level(x, lo).is_empty() {
            return lo;
        }
        for _ in 0..steps {
            let mid = 0.5 * (lo + hi);
            if self.arcs_at_level(x, mid).is_empty() {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        lo
    }

    fn check(&self, x: Point2) -> CheckedPoint {
        let feasible = self.feasible(x);
        let direction = feasible.first().map(|iv| Point2::from_angle(iv.midpoint()));
        let mut margin = self.margin(x, MARGIN_STEPS);
        if direction.is_some() {
            margin = margin.max(-self.eps);
        } else {
            margin = margin.min(-self.eps - f64::EPSILON);
        }
        CheckedPoint { point: x, margin, direction }
    }
}

/// Walks the boundary: every vertex, then each edge by midpoint subdivision
/// down to `1/edge_samples` of its length. `margin` is 1-Lipschitz in the
/// boundary point, so a segment whose endpoint margins satisfy
/// `m_a + m_b − |b − a| ≥ −2ε` is certified and not subdivided further.
/// Stops at the first failing point when `stop_early`.
fn walk_boundary(probe: &ConeProbe<'_>, samples: usize, stop_early: bool, out: &mut Vec<CheckedPoint>) -> bool {
    let poly = probe.poly;
    let n = poly.len();
    let mut at_vertex = Vec::with_capacity(n);
    for i in 0..n {
        let c = probe.check(poly.vertex(i));
        out.push(c);
        if c.direction.is_none() && stop_early {
            return false;
        }
        at_vertex.push(c);
    }
    let min_dt = 1.0 / samples.max(1) as f64;
    let mut ok = at_vertex.iter().all(|c| c.direction.is_some());
    for i in 0..n {
        let len = poly.vertex(i).dist(poly.vertex(i + 1));
        let mut stack = vec![(0.0, 1.0, at_vertex[i], at_vertex[(i + 1) % n])];
        while let Some((ta, tb, ca, cb)) = stack.pop() {
            let span = (tb - ta) * len;
            if ca.margin + cb.margin - span >= -2.0 * probe.eps || tb - ta <= min_dt * (1.0 + 1e-12) {
                continue;
            }
            let tm = 0.5 * (ta + tb);
            let cm = probe.check(poly.edge_point(i, tm));
            out.push(cm);
            if cm.direction.is_none() {
                ok = false;
                if stop_early {
                    return false;
                }
            }
            stack.push((tm, tb, cm, cb));
            stack.push((ta, tm, ca, cm));
        }
    }
    ok
}

/// Admissible axis arcs for a sector of radius `radius` at boundary point `x`.
pub fn feasible_directions(p: &ConvexPolygon, x: Point2, radius: f64) -> Result<Vec<AngleInterval>> {
    feasible_directions_with(p, x, radius, DEFAULT_APERTURE, &Tolerances::DEFAULT)
}

pub fn feasible_directions_with(
    p: &ConvexPolygon,
    x: Point2,
    radius: f64,
    aperture: f64,
    tol: &Tolerances,
) -> Result<Vec<AngleInterval>> {
    require_boundary(p, x, tol)?;
    if !(radius > 0.0) {
        return Err(Error::BadParameter(format!("sector radius must be positive, got {radius}")));
    }
    Ok(ConeProbe::new(p, radius, aperture, tol.geom).feasible(x))
}

fn require_boundary(p: &ConvexPolygon, x: Point2, tol: &Tolerances) -> Result<()> {
    let distance = if p.contains_point_with(x, tol) {
        p.dist_to_boundary(x)
    } else {
        p.dist_point(x)
    };
    if distance > tol.geom {
        return Err(Error::NotOnBoundary { x: x.x, y: x.y, distance });
    }
    Ok(())
}

/// Scan-based admissible arcs: test `samples` equally spaced axes with the
/// direct sector test and refine each feasibility switch by bisection to
/// `1e-6` rad.
pub fn scan_feasible_directions(p: &ConvexPolygon, x: Point2, radius: f64, samples: usize) -> Result<Vec<AngleInterval>> {
    let tol = Tolerances::DEFAULT;
    require_boundary(p, x, &tol)?;
    let ok = |phi: f64| {
        sector_margin(
            &Sector {
                vertex: x,
                axis: Point2::from_angle(phi),
                radius,
                aperture: DEFAULT_APERTURE,
            },
            p,
        ) >= -tol.geom
    };
    let h = TAU / samples as f64;
    let flags: Vec<bool> = (0..samples).map(|k| ok(k as f64 * h)).collect();
    if flags.iter().all(|&f| f) {
        return Ok(vec![AngleInterval { start: 0.0, end: TAU }]);
    }
    // Refine the switch between sample k (value `from`) and k + 1.
    let refine = |k: usize| {
        let (mut a, mut b) = (k as f64 * h, (k + 1) as f64 * h);
        let fa = ok(a);
        while b - a > 1e-6 {
            let m = 0.5 * (a + b);
            if ok(m) == fa {
                a = m;
            } else {
                b = m;
            }
        }
        if fa {
            a
        } else {
            b
        }
    };
    let first_bad = flags.iter().position(|&f| !f).unwrap_or(0);
    let mut out = Vec::new();
    let mut start = None;
    for j in 1..=samples {
        let k = (first_bad + j) % samples;
        let prev = (k + samples - 1) % samples;
        match (flags[prev], flags[k]) {
            (false, true) => start = Some(refine(prev)),
            (true, false) => {
                if let Some(s) = start.take() {
                    let e = refine(prev);
                    let s = s.rem_euclid(TAU);
                    let mut e = e.rem_euclid(TAU);
                    if e < s {
                        e += TAU;
                    }
                    out.push(AngleInterval { start: s, end: e });
                }
            }
            _ => {}
        }
    }
    out.sort_by(|a, b| a.start.total_cmp(&b.start));
    Ok(out)
}

/// Interior cone condition with radius `spec.effective_radius(p)` over the boundary.
pub fn cone_condition(p: &ConvexPolygon, spec: &ClassSpec) -> ConeReport {
    cone_condition_with(p, spec, &Tolerances::DEFAULT)
}

pub fn cone_condition_with(p: &ConvexPolygon, spec: &ClassSpec, tol: &Tolerances) -> ConeReport {
    let radius = spec.effective_radius(p);
    let probe = ConeProbe::new(p, radius, spec.aperture, tol.geom);
    let mut checked = Vec::new();
    walk_boundary(&probe, spec.edge_samples, false, &mut checked);
    let worst = checked
        .iter()
        .copied()
        .reduce(|a, b| if b.margin < a.margin { b } else { a })
        .expect("polygon has vertices");
    let vertex_intervals = p.vertices().iter().map(|&v| probe.feasible(v)).collect();
    ConeReport {
        satisfied: worst.margin >= -tol.geom,
        effective_radius: radius,
        worst_boundary_point: worst.point,
        worst_margin: worst.margin,
        checked_points: checked,
        vertex_intervals,
    }
}

/// Cone condition alone, stopping at the first failing boundary point.
pub fn satisfies_cone_condition(p: &ConvexPolygon, spec: &ClassSpec, tol: &Tolerances) -> bool {
    let probe = ConeProbe::new(p, spec.effective_radius(p), spec.aperture, tol.geom);
    let mut scratch = Vec::new();
    walk_boundary(&probe, spec.edge_samples, true, &mut scratch)
}

/// Membership in the class of area-π convex bodies with cone radius `radius`.
pub fn class_membership(p: &ConvexPolygon, radius: f64) -> bool {
    class_membership_with(p, &ClassSpec::new(radius), &Tolerances::DEFAULT)
}

pub fn class_membership_with(p: &ConvexPolygon, spec: &ClassSpec, tol: &Tolerances) -> bool {
    if spec.normalized && (p.area() - PI).abs() > tol.area {
        return false;
    }
    satisfies_cone_condition(p, spec, tol)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{rectangle, regular_ngon};

    fn rect_corner() -> (ConvexPolygon, Point2) {
        let r = rectangle(0.5).unwrap();
        (r, Point2::new(PI / 2.0, 0.5))
    }

    #[test]
    fn free_arcs_basic() {
        assert_eq!(free_arcs(&[]), vec![AngleInterval { start: 0.0, end: TAU }]);
        let g = free_arcs(&[(0.0, 1.0)]);
        assert_eq!(g.len(), 1);
        assert!((g[0].start - 1.0).abs() < 1e-15 && (g[0].end - (TAU - 1.0)).abs() < 1e-12);
        let g = free_arcs(&[(0.0, 1.0), (PI, 1.0)]);
        assert_eq!(g.len(), 2);
        assert!(free_arcs(&[(0.0, 2.0), (PI, 1.2)]).is_empty());
        assert!(free_arcs(&[(0.0, PI)]).is_empty());
        // gap straddling angle 0
        let g = free_arcs(&[(PI, 2.5)]);
        assert_eq!(g.len(), 1);
        assert!(g[0].contains(0.0, 0.0));
        assert!((g[0].width() - (TAU - 5.0)).abs() < 1e-12);
    }

    #[test]
    fn quarter_disk_fits_rectangle_corner() {
        let (r, corner) = rect_corner();
        let s = Sector::quarter(corner, 1.25 * PI, 1.0).unwrap();
        assert!(sector_in_polygon(&s, &r));
        let tilted = Sector::quarter(corner, 1.25 * PI + 1e-3, 1.0).unwrap();
        assert!(!sector_in_polygon(&tilted, &r));
    }

    #[test]
    fn long_sector_never_fits_corner() {
        let (r, corner) = rect_corner();
        for k in 0..3600 {
            let s = Sector::quarter(corner, k as f64 * TAU / 3600.0, 1.8).unwrap();
            assert!(!sector_in_polygon(&s, &r));
        }
    }

    #[test]
    fn sector_inside_huge_polygon() {
        let big = regular_ngon(8).unwrap().scaled(100.0).unwrap();
        let s = Sector::quarter(Point2::new(1.0, 2.0), 0.3, 5.0).unwrap();
        assert!(sector_in_polygon(&s, &big));
    }

    #[test]
    fn sector_validation() {
        assert!(Sector::new(Point2::default(), Point2::new(0.0, 0.0), 1.0, 1.0).is_err());
        assert!(Sector::new(Point2::default(), Point2::new(1.0, 0.0), -1.0, 1.0).is_err());
        assert!(Sector::new(Point2::default(), Point2::new(1.0, 0.0), 1.0, 4.0).is_err());
        let s = Sector::new(Point2::default(), Point2::new(3.0, 4.0), 1.0, 1.0).unwrap();
        assert!((s.axis.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn feasible_directions_examples() {
        let (r, corner) = rect_corner();
        let at_corner = feasible_directions(&r, corner, 1.0).unwrap();
        assert!(at_corner.iter().any(|iv| iv.contains(1.25 * PI, 1e-12)));
        assert!(feasible_directions(&r, corner, 3.0).unwrap().is_empty());

        let mid_long = Point2::new(0.0, 0.5);
        let arcs = feasible_directions(&r, mid_long, 1.0).unwrap();
        assert!(arcs.iter().any(|iv| iv.contains(-FRAC_PI_2, 0.0)));

        assert!(matches!(
            feasible_directions(&r, Point2::new(0.0, 0.0), 0.1),
            Err(Error::NotOnBoundary { .. })
        ));
    }

    #[test]
    fn short_side_midpoint_limits_rectangles() {
        // At the middle of a side of length 2l the quarter disk needs chord √2·R ≤ 2l.
        let r = rectangle(0.5).unwrap();
        let mid_short = Point2::new(PI / 2.0, 0.0);
        assert!(feasible_directions(&r, mid_short, 1.0).unwrap().is_empty());
        assert!(!feasible_directions(&r, mid_short, 0.5 * 2f64.sqrt() * (1.0 - 1e-6))
            .unwrap()
            .is_empty());
        assert!(feasible_directions(&r, mid_short, 0.5 * 2f64.sqrt() * (1.0 + 1e-6))
            .unwrap()
            .is_empty());
    }

    #[test]
    fn analytic_arcs_match_scan() {
        let r = rectangle(0.4).unwrap();
        let pts = [
            Point2::new(PI / 1.6, 0.4),
            Point2::new(0.3, -0.4),
            Point2::new(PI / 1.6, 0.1),
            Point2::new(-PI / 1.6, -0.35),
        ];
        for x in pts {
            for rad in [0.2, 0.5, 0.6] {
                let exact = feasible_directions(&r, x, rad).unwrap();
                let scan = scan_feasible_directions(&r, x, rad, 3600).unwrap();
                assert_eq!(exact.len(), scan.len(), "{x:?} R={rad}: {exact:?} vs {scan:?}");
                for (a, b) in exact.iter().zip(&scan) {
                    assert!((a.start - b.start).abs() < 2e-6, "{a:?} vs {b:?}");
                    assert!((a.end - b.end).abs() < 2e-6, "{a:?} vs {b:?}");
                }
            }
        }
    }

    #[test]
    fn cone_condition_examples() {
        let r = rectangle(0.5).unwrap();
        let rep = cone_condition(&r, &ClassSpec::new(1.8));
        assert!(!rep.satisfied);
        assert!(rep.worst_margin < 0.0);
        let ngon = regular_ngon(64).unwrap();
        let rep = cone_condition(&ngon, &ClassSpec::new(0.5));
        assert!(rep.satisfied);
        assert!(rep.worst_margin >= -1e-9);
        assert_eq!(rep.vertex_intervals.len(), 64);
        assert!(rep.vertex_intervals.iter().all(|v| !v.is_empty()));
    }

    #[test]
    fn rectangle_threshold_is_sqrt2_l() {
        for l in [0.2, 0.35, 0.5, 0.7] {
            let r = rectangle(l).unwrap();
            let crit = 2f64.sqrt() * l;
            assert!(class_membership(&r, crit * 0.999), "l = {l}");
            assert!(!class_membership(&r, crit * 1.001), "l = {l}");
            assert!(!class_membership(&r, 2.0 * l * 1.5), "l = {l}");
        }
    }

    #[test]
    fn membership_needs_area_pi() {
        let r = rectangle(0.5).unwrap();
        assert!(class_membership(&r, 0.5));
        assert!(!class_membership(&r.scaled(2.0).unwrap(), 0.5));
        assert!(!class_membership(&rectangle(0.1).unwrap(), 1.0));
    }

    #[test]
    fn acute_triangle_never_member() {
        let t = regular_ngon(3).unwrap();
        assert!(!class_membership(&t, 1e-3));
    }

    #[test]
    fn report_and_membership_agree() {
        for seed in 0..20u64 {
            let p = crate::families::random_hull(seed, 9).unwrap();
            for rad in [0.1, 0.3] {
                let rep = cone_condition(&p, &ClassSpec::new(rad));
                assert_eq!(rep.satisfied, class_membership(&p, rad), "seed {seed}");
                assert_eq!(rep.satisfied, rep.worst_margin >= -1e-9);
            }
        }
    }
}

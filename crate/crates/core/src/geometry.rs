//! Planar convex-polygon kernel.
//!
//! A [`ConvexPolygon`] is the computable stand-in for a convex body. Vertices
//! are stored counter-clockwise starting at the lexicographically smallest
//! point, with duplicates and collinear points removed. All containment
//! predicates use closed-set semantics with slack `Tolerances::geom`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::Point2;

/// Numerical slacks shared by the kernel, the functionals and the searches.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Geometric predicate slack.
    pub geom: f64,
    /// Optimizer convergence (center step).
    pub opt: f64,
    /// Area-normalization slack.
    pub area: f64,
}

impl Tolerances {
    pub const DEFAULT: Tolerances = Tolerances {
        geom: 1e-9,
        opt: 1e-10,
        area: 1e-8,
    };

    pub fn new(geom: f64, opt: f64, area: f64) -> Result<Self> {
        if !(geom > 0.0 && opt > 0.0 && area > 0.0) {
            return Err(Error::BadParameter("tolerances must be positive".into()));
        }
        if geom > area {
            return Err(Error::BadParameter("geometric slack must not exceed area slack".into()));
        }
        Ok(Self { geom, opt, area })
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Self::DEFAULT
    }
}

/// Closed disk `B_r(z)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: Point2,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: Point2, radius: f64) -> Result<Self> {
        if !(radius > 0.0) || !radius.is_finite() || !center.is_finite() {
            return Err(Error::BadParameter(format!("disk radius must be positive, got {radius}")));
        }
        Ok(Self { center, radius })
    }

    /// Unit disk at the origin (the reference ball at area π).
    pub fn unit() -> Self {
        Self {
            center: Point2::new(0.0, 0.0),
            radius: 1.0,
        }
    }
}

/// Strictly convex polygon with counter-clockwise vertices.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolygonJson", into = "PolygonJson")]
pub struct ConvexPolygon {
    vertices: Vec<Point2>,
}

/// Wire form of a polygon: `{"vertices": [[x, y], ...]}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PolygonJson {
    pub vertices: Vec<Point2>,
}

impl TryFrom<PolygonJson> for ConvexPolygon {
    type Error = Error;

    fn try_from(value: PolygonJson) -> Result<Self> {
        ConvexPolygon::from_points(&value.vertices)
    }
}

impl From<ConvexPolygon> for PolygonJson {
    fn from(p: ConvexPolygon) -> Self {
        PolygonJson { vertices: p.vertices }
    }
}

#[inline]
fn orient(a: Point2, b: Point2, c: Point2) -> f64 {
    robust::orient2d(
        robust::Coord { x: a.x, y: a.y },
        robust::Coord { x: b.x, y: b.y },
        robust::Coord { x: c.x, y: c.y },
    )
}

/// Distance from `p` to the infinite line through `a` and `b`.
fn dist_to_line(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len = d.norm();
    if len == 0.0 {
        return p.dist(a);
    }
    (d.cross(p - a) / len).abs()
}

/// Distance from `p` to the closed segment `[a, b]`.
pub fn dist_point_to_segment(p: Point2, a: Point2, b: Point2) -> f64 {
    let d = b - a;
    let len_sq = d.norm_sq();
    if len_sq == 0.0 {
        return p.dist(a);
    }
    let t = ((p - a).dot(d) / len_sq).clamp(0.0, 1.0);
    p.dist(a + d * t)
}

/// Andrew's monotone chain on exact orientation signs; collinear points dropped.
fn monotone_chain(mut pts: Vec<Point2>) -> Vec<Point2> {
    pts.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.y.total_cmp(&b.y)));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut hull: Vec<Point2> = Vec::with_capacity(2 * pts.len());
    for &p in &pts {
        while hull.len() >= 2 && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    let lower_len = hull.len() + 1;
    for &p in pts.iter().rev().skip(1) {
        while hull.len() >= lower_len && orient(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

/// Removes vertices closer than `eps` to a neighbour or to the chord of their neighbours.
fn prune_near_degenerate(mut v: Vec<Point2>, eps: f64) -> Vec<Point2> {
    loop {
        let n = v.len();
        if n < 3 {
            return v;
        }
        let drop = (0..n).find(|&i| {
            let prev = v[(i + n - 1) % n];
            let next = v[(i + 1) % n];
            v[i].dist(next) < eps || dist_to_line(v[i], prev, next) < eps
        });
        match drop {
            Some(i) => {
                v.remove(i);
            }
            None => return v,
        }
    }
}

fn signed_area(v: &[Point2]) -> f64 {
    let n = v.len();
    let mut s = 0.0;
    for i in 0..n {
        s += v[i].cross(v[(i + 1) % n]);
    }
    0.5 * s
}

/// Rotates `v` so that it starts at the lexicographically smallest vertex.
fn canonical_start(mut v: Vec<Point2>) -> Vec<Point2> {
    if let Some(k) = (0..v.len()).min_by(|&a, &b| v[a].x.total_cmp(&v[b].x).then(v[a].y.total_cmp(&v[b].y))) {
        v.rotate_left(k);
    }
    v
}

/// Convex hull of `points` as a polygon. Free-function form of [`ConvexPolygon::from_points`].
pub fn make_polygon(points: &[Point2]) -> Result<ConvexPolygon> {
    ConvexPolygon::from_points(points)
}

impl ConvexPolygon {
    /// Convex hull of `points`, CCW, with collinear and near-duplicate points removed.
    pub fn from_points(points: &[Point2]) -> Result<Self> {
        Self::from_points_with(points, &Tolerances::DEFAULT)
    }

    pub fn from_points_with(points: &[Point2], tol: &Tolerances) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::DegenerateInput(format!("need at least 3 points, got {}", points.len())));
        }
        if points.iter().any(|p| !p.is_finite()) {
            return Err(Error::DegenerateInput("non-finite coordinate".into()));
        }
        let hull = prune_near_degenerate(monotone_chain(points.to_vec()), tol.geom);
        if hull.len() < 3 {
            return Err(Error::DegenerateInput(format!("hull has {} vertices", hull.len())));
        }
        let hull = canonical_start(hull);
        if !(signed_area(&hull) > 0.0) {
            return Err(Error::DegenerateInput("hull has zero area".into()));
        }
        Ok(Self { vertices: hull })
    }

    /// Builds from vertices already known to be strictly convex and CCW
    /// (images of a valid polygon under a similarity).
    fn from_valid(vertices: Vec<Point2>) -> Self {
        Self { vertices }
    }

    pub fn vertices(&self) -> &[Point2] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    #[inline]
    pub fn vertex(&self, i: usize) -> Point2 {
        self.vertices[i % self.vertices.len()]
    }

    /// Edges `(v_i, v_{i+1})` in CCW order.
    pub fn edges(&self) -> impl Iterator<Item = (Point2, Point2)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    pub fn area(&self) -> f64 {
        signed_area(&self.vertices)
    }

    pub fn perimeter(&self) -> f64 {
        self.edges().map(|(a, b)| a.dist(b)).sum()
    }

    /// Maximum vertex-pair distance by rotating calipers.
    pub fn diameter(&self) -> f64 {
        let v = &self.vertices;
        let n = v.len();
        let tri = |a: Point2, b: Point2, c: Point2| (b - a).cross(c - a).abs();
        let mut best: f64 = 0.0;
        let mut j = 1;
        for i in 0..n {
            let ni = (i + 1) % n;
            // Advance j while it moves away from edge (i, ni).
            let mut guard = 0;
            while guard < n && tri(v[i], v[ni], v[(j + 1) % n]) > tri(v[i], v[ni], v[j]) {
                j = (j + 1) % n;
                guard += 1;
            }
            best = best.max(v[i].dist(v[j])).max(v[ni].dist(v[j]));
        }
        best
    }

    /// Area centroid.
    pub fn centroid(&self) -> Point2 {
        let a = self.area();
        let mut c = Point2::default();
        for (p, q) in self.edges() {
            let w = p.cross(q);
            c += (p + q) * w;
        }
        c * (1.0 / (6.0 * a))
    }

    /// Axis-aligned bounding box as `(min, max)` corners.
    pub fn bounding_box(&self) -> (Point2, Point2) {
        let mut lo = Point2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Point2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for p in &self.vertices {
            lo.x = lo.x.min(p.x);
            lo.y = lo.y.min(p.y);
            hi.x = hi.x.max(p.x);
            hi.y = hi.y.max(p.y);
        }
        (lo, hi)
    }

    /// Homothety with ratio `s > 0` about `center`.
    pub fn scaled_about(&self, center: Point2, s: f64) -> Result<Self> {
        if !(s > 0.0) || !s.is_finite() {
            return Err(Error::BadParameter(format!("scale factor must be positive, got {s}")));
        }
        Ok(Self::from_valid(
            self.vertices.iter().map(|&p| center + (p - center) * s).collect(),
        ))
    }

    /// Homothety with ratio `s > 0` about the origin.
    pub fn scaled(&self, s: f64) -> Result<Self> {
        self.scaled_about(Point2::default(), s)
    }

    pub fn translated(&self, d: Point2) -> Self {
        Self::from_valid(self.vertices.iter().map(|&p| p + d).collect())
    }

    /// Homothety about the centroid making the area equal to π.
    pub fn normalize_area(&self) -> Self {
        let s = (PI / self.area()).sqrt();
        let c = self.centroid();
        Self::from_valid(self.vertices.iter().map(|&p| c + (p - c) * s).collect())
    }

    /// Signed distance of `x` to the line of edge `i`, positive outside.
    #[inline]
    pub fn edge_offset(&self, i: usize, x: Point2) -> f64 {
        let a = self.vertex(i);
        let b = self.vertex(i + 1);
        let t = (b - a).normalized();
        t.perp_cw().dot(x - a)
    }

    /// Closed containment with slack `tol.geom`.
    pub fn contains_point_with(&self, x: Point2, tol: &Tolerances) -> bool {
        (0..self.len()).all(|i| self.edge_offset(i, x) <= tol.geom)
    }

    pub fn contains_point(&self, x: Point2) -> bool {
        self.contains_point_with(x, &Tolerances::DEFAULT)
    }

    /// Euclidean distance from `x` to the closed polygon (0 inside).
    pub fn dist_point(&self, x: Point2) -> f64 {
        if (0..self.len()).all(|i| self.edge_offset(i, x) <= 0.0) {
            return 0.0;
        }
        self.edges()
            .map(|(a, b)| dist_point_to_segment(x, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Distance from `x` to the boundary curve of the polygon.
    pub fn dist_to_boundary(&self, x: Point2) -> f64 {
        self.edges()
            .map(|(a, b)| dist_point_to_segment(x, a, b))
            .fold(f64::INFINITY, f64::min)
    }

    /// Point of the boundary at arclength-free parameter `t ∈ [0, 1]` along edge `i`.
    pub fn edge_point(&self, i: usize, t: f64) -> Point2 {
        let a = self.vertex(i);
        let b = self.vertex(i + 1);
        a + (b - a) * t
    }
}

/// Distance from `x` to `p` (0 when inside).
pub fn dist_point_to_polygon(x: Point2, p: &ConvexPolygon) -> f64 {
    p.dist_point(x)
}

/// Hausdorff distance between two convex polygons.
///
/// `dist(·, Q)` is convex, so its maximum over `P` sits at a vertex of `P`;
/// the two one-sided vertex maxima are therefore exact.
pub fn hausdorff_polygons(p: &ConvexPolygon, q: &ConvexPolygon) -> f64 {
    let pq = p.vertices().iter().map(|&v| q.dist_point(v)).fold(0.0, f64::max);
    let qp = q.vertices().iter().map(|&v| p.dist_point(v)).fold(0.0, f64::max);
    pq.max(qp)
}

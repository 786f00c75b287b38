//! Simulated-annealing search over the cone class for low values of
//! `F = D / λ_H²`.
//!
//! States are vertex clouds; the shape is the area-normalized convex hull of
//! the cloud. Proposals that leave the class or collapse to a ball are
//! rejected, so every accepted state is a member.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::class_membership;
use crate::error::{Error, Result};
use crate::families::{a_of_l, perturbed_disk, rectangle, rectangle_l_max};
use crate::functionals::shape_functional;
use crate::geometry::ConvexPolygon;
use crate::point::Point2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SearchSpace {
    /// Free vertex cloud with convex-hull projection.
    Free,
    /// One parameter: rectangles with half short side `l ∈ [R/2, √π/2)`.
    Rectangle,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OptConfig {
    pub radius: f64,
    pub n_vertices: usize,
    pub seed: u64,
    pub iterations: usize,
    pub t0: f64,
    pub gamma: f64,
    /// Move scale as a fraction of √π.
    pub sigma: f64,
    pub restarts: usize,
    pub space: SearchSpace,
}

impl Default for OptConfig {
    fn default() -> Self {
        Self {
            radius: 0.6,
            n_vertices: 12,
            seed: 1,
            iterations: 5000,
            t0: 0.5,
            gamma: 0.999,
            sigma: 0.05,
            restarts: 4,
            space: SearchSpace::Free,
        }
    }
}

impl OptConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(Error::BadParameter(m.into()));
        if !(self.radius > 0.0) {
            return bad("radius must be positive");
        }
        if !(self.t0 > 0.0) {
            return bad("initial temperature must be positive");
        }
        if !(self.gamma > 0.0 && self.gamma < 1.0) {
            return bad("temperature decay must lie in (0, 1)");
        }
        if !(self.sigma > 0.0) {
            return bad("move scale must be positive");
        }
        if self.iterations < 1 {
            return bad("iterations must be at least 1");
        }
        if self.restarts < 1 {
            return bad("restarts must be at least 1");
        }
        if self.space == SearchSpace::Free && self.n_vertices < 4 {
            return bad("free search needs at least 4 vertices");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub iteration: usize,
    /// Best-ever `F` after this iteration.
    #[serde(rename = "F")]
    pub f: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Comparisons {
    /// `a(R/2)`, when `R/2` lies in the rectangle family's domain.
    pub rectangle_best: Option<f64>,
    pub achieved: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptResult {
    pub best_shape: ConvexPolygon,
    #[serde(rename = "best_F")]
    pub best_f: f64,
    /// Half short side of the best rectangle (rectangle search only).
    pub best_l: Option<f64>,
    pub feasible: bool,
    pub restart: usize,
    pub accepted: usize,
    pub comparisons: Comparisons,
    pub trace: Vec<TracePoint>,
}

/// `F` of a member shape, or `None` when the shape is outside the class or a ball.
fn admissible_f(p: &ConvexPolygon, radius: f64) -> Option<f64> {
    if !class_membership(p, radius) {
        return None;
    }
    shape_functional(p).ok()?.f()
}

/// Smallest `l ∈ [R/2, √π/2)` whose rectangle is a member, by bisection
/// (membership of rectangles is monotone in `l`).
pub fn thinnest_member_rectangle(radius: f64) -> Option<f64> {
    let lo0 = 0.5 * radius;
    let top = rectangle_l_max() * (1.0 - 1e-9);
    if lo0 >= top {
        return None;
    }
    let member = |l: f64| rectangle(l).map(|r| class_membership(&r, radius)).unwrap_or(false);
    if member(lo0) {
        return Some(lo0);
    }
    if !member(top) {
        return None;
    }
    let (mut lo, mut hi) = (lo0, top);
    while hi - lo > 1e-12 {
        let m = 0.5 * (lo + hi);
        if member(m) {
            hi = m;
        } else {
            lo = m;
        }
    }
    Some(hi)
}

/// Rectangle corners plus evenly spread points on its edges.
fn rectangle_cloud(l: f64, n: usize) -> Result<Vec<Point2>> {
    let r = rectangle(l)?;
    let v = r.vertices().to_vec();
    let mut cloud = v.clone();
    let extra = n.saturating_sub(4);
    for k in 0..extra {
        let e = k % 4;
        let slot = k / 4 + 1;
        let per_edge = extra.div_ceil(4) + 1;
        cloud.push(r.edge_point(e, slot as f64 / per_edge as f64));
    }
    Ok(cloud)
}

fn normalize_cloud(cloud: &[Point2]) -> Option<(ConvexPolygon, Vec<Point2>)> {
    let hull = ConvexPolygon::from_points(cloud).ok()?;
    let c = hull.centroid();
    let s = (PI / hull.area()).sqrt();
    let moved: Vec<Point2> = cloud.iter().map(|&p| c + (p - c) * s).collect();
    Some((hull.normalize_area(), moved))
}

/// Affine map `p ↦ c + S(p − c)` where `S` scales by `factor` along unit `dir`.
fn stretch(cloud: &mut [Point2], c: Point2, dir: Point2, factor: f64) {
    for p in cloud.iter_mut() {
        let d = *p - c;
        let along = d.dot(dir);
        *p = c + d + dir * (along * (factor - 1.0));
    }
}

/// Direction of the hull edge that realizes the minimal width of `cloud`.
fn long_axis(cloud: &[Point2]) -> Option<(Point2, Point2)> {
    let hull = ConvexPolygon::from_points(cloud).ok()?;
    let v = hull.vertices();
    let mut best = (f64::INFINITY, Point2::new(1.0, 0.0));
    for (a, b) in hull.edges() {
        let t = (b - a).normalized();
        let n = t.perp_cw();
        let w = v.iter().map(|&q| (a - q).dot(n)).fold(0.0, f64::max);
        if w < best.0 {
            best = (w, t);
        }
    }
    Some((hull.centroid(), best.1))
}

/// Restores area π by stretching along the long axis, which keeps the width
/// across it; then applies the exact homothety normalization.
fn normalize_along_axis(cloud: &[Point2], axis: Point2) -> Option<(ConvexPolygon, Vec<Point2>)> {
    let hull = ConvexPolygon::from_points(cloud).ok()?;
    let mut moved = cloud.to_vec();
    stretch(&mut moved, hull.centroid(), axis, PI / hull.area());
    normalize_cloud(&moved)
}

struct Chain {
    best_shape: ConvexPolygon,
    best_f: f64,
    best_l: Option<f64>,
    accepted: usize,
    trace: Vec<TracePoint>,
}

fn chain_rng(seed: u64, restart: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(restart as u64);
    rng
}

/// Feasible starting cloud for restart `k`: the thinnest member rectangle for
/// `k = 0`, seeded perturbed disks afterwards.
fn seed_cloud(cfg: &OptConfig, k: usize, rng: &mut ChaCha8Rng) -> Result<(Vec<Point2>, ConvexPolygon, f64)> {
    let from_rect = || -> Option<(Vec<Point2>, ConvexPolygon, f64)> {
        let l = thinnest_member_rectangle(cfg.radius)?;
        let cloud = rectangle_cloud(l, cfg.n_vertices).ok()?;
        let (poly, cloud) = normalize_cloud(&cloud)?;
        let f = admissible_f(&poly, cfg.radius)?;
        Some((cloud, poly, f))
    };
    if k > 0 {
        for _ in 0..100 {
            let amp = rng.random_range(0.02..0.2);
            let Ok(p) = perturbed_disk(cfg.n_vertices, amp, rng.random()) else {
                continue;
            };
            if let Some(f) = admissible_f(&p, cfg.radius) {
                return Ok((p.vertices().to_vec(), p, f));
            }
        }
    }
    from_rect().ok_or(Error::NoFeasibleSeed { radius: cfg.radius })
}

fn run_free_chain(cfg: &OptConfig, k: usize) -> Result<Chain> {
    let mut rng = chain_rng(cfg.seed, k);
    let (mut cloud, mut shape, mut f) = seed_cloud(cfg, k, &mut rng)?;
    let mut best = (shape.clone(), f);
    let mut best_cloud = cloud.clone();
    let mut trace = vec![TracePoint { iteration: 0, f }];
    let mut accepted = 0;
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut temp = cfg.t0;
    let polish = cfg.iterations - cfg.iterations / 5;
    for it in 1..cfg.iterations {
        temp *= cfg.gamma;
        if it == polish {
            cloud = best_cloud.clone();
            shape = best.0.clone();
            f = best.1;
        }
        let step = cfg.sigma * PI.sqrt() * temp;
        let mut cand = cloud.clone();
        let kind: f64 = rng.random();
        let gauss = |rng: &mut ChaCha8Rng| Point2::new(unit.sample(rng), unit.sample(rng));
        let proposal = if kind < 0.1 {
            for p in cand.iter_mut() {
                *p += gauss(&mut rng) * (0.3 * step);
            }
            normalize_cloud(&cand)
        } else if kind < 0.2 {
            let dir = Point2::from_angle(rng.random::<f64>() * PI);
            let c = shape.centroid();
            stretch(&mut cand, c, dir, (unit.sample(&mut rng) * step).exp());
            normalize_cloud(&cand)
        } else {
            let j = rng.random_range(0..cand.len());
            cand[j] += gauss(&mut rng) * step;
            if kind < 0.6 {
                normalize_cloud(&cand)
            } else {
                long_axis(&cloud).and_then(|(_, axis)| normalize_along_axis(&cand, axis))
            }
        };
        if let Some((poly, moved)) = proposal {
            if let Some(fc) = admissible_f(&poly, cfg.radius) {
                let u: f64 = rng.random();
                if fc <= f || u < (-(fc - f) / temp).exp() {
                    cloud = moved;
                    shape = poly;
                    f = fc;
                    accepted += 1;
                    if f < best.1 {
                        best = (shape.clone(), f);
                        best_cloud = cloud.clone();
                    }
                }
            }
        }
        trace.push(TracePoint { iteration: it, f: best.1 });
    }
    Ok(Chain {
        best_shape: best.0,
        best_f: best.1,
        best_l: None,
        accepted,
        trace,
    })
}

fn run_rectangle_chain(cfg: &OptConfig, k: usize) -> Result<Chain> {
    let mut rng = chain_rng(cfg.seed, k);
    let lo = 0.5 * cfg.radius;
    let hi = rectangle_l_max();
    if lo >= hi {
        return Err(Error::NoFeasibleSeed { radius: cfg.radius });
    }
    let eval = |l: f64| -> Option<(ConvexPolygon, f64)> {
        if !(l >= lo && l < hi) {
            return None;
        }
        let r = rectangle(l).ok()?;
        let f = admissible_f(&r, cfg.radius)?;
        Some((r, f))
    };
    // Start from the first member on an upward scan from R/2.
    let mut start = None;
    for j in 0..64 {
        let l = lo + (hi - lo) * j as f64 / 64.0;
        if let Some(v) = eval(l) {
            start = Some((l, v));
            break;
        }
    }
    let (mut l, (mut shape, mut f)) = start.ok_or(Error::NoFeasibleSeed { radius: cfg.radius })?;
    let mut best = (shape.clone(), f, l);
    let mut trace = vec![TracePoint { iteration: 0, f }];
    let mut accepted = 0;
    let unit = Normal::new(0.0, 1.0).expect("unit normal");
    let mut temp = cfg.t0;
    for it in 1..cfg.iterations {
        temp *= cfg.gamma;
        let cand = l + unit.sample(&mut rng) * cfg.sigma * PI.sqrt() * temp;
        if let Some((r, fc)) = eval(cand) {
            let u: f64 = rng.random();
            if fc <= f || u < (-(fc - f) / temp).exp() {
                l = cand;
                shape = r;
                f = fc;
                accepted += 1;
                if f < best.1 {
                    best = (shape.clone(), f, l);
                }
            }
        }
        trace.push(TracePoint { iteration: it, f: best.1 });
    }
    Ok(Chain {
        best_shape: best.0,
        best_f: best.1,
        best_l: Some(best.2),
        accepted,
        trace,
    })
}

/// Runs `restarts` independent chains and keeps the lowest best-ever `F`
/// (earliest restart on ties).
pub fn minimize_functional(cfg: &OptConfig) -> Result<OptResult> {
    cfg.validate()?;
    let chains: Vec<Result<Chain>> = (0..cfg.restarts)
        .into_par_iter()
        .map(|k| match cfg.space {
            SearchSpace::Free => run_free_chain(cfg, k),
            SearchSpace::Rectangle => run_rectangle_chain(cfg, k),
        })
        .collect();
    let mut best: Option<(usize, Chain)> = None;
    for (k, c) in chains.into_iter().enumerate() {
        let c = c?;
        if best.as_ref().is_none_or(|(_, b)| c.best_f < b.best_f) {
            best = Some((k, c));
        }
    }
    let (restart, chain) = best.expect("at least one restart");
    Ok(OptResult {
        feasible: class_membership(&chain.best_shape, cfg.radius),
        comparisons: Comparisons {
            rectangle_best: a_of_l(0.5 * cfg.radius).ok(),
            achieved: chain.best_f,
        },
        best_shape: chain.best_shape,
        best_f: chain.best_f,
        best_l: chain.best_l,
        restart,
        accepted: chain.accepted,
        trace: chain.trace,
    })
}

/// One row of the rectangle scan.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectRow {
    pub l: f64,
    pub a: f64,
    #[serde(rename = "pipeline_F")]
    pub pipeline_f: f64,
    pub abs_diff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RectScan {
    pub rows: Vec<RectRow>,
    /// `None` for single-point grids.
    pub monotone: Option<bool>,
}

/// Closed form against the pipeline on a grid (sorted ascending, duplicates removed).
pub fn rect_scan(grid: &[f64]) -> Result<RectScan> {
    let mut ls = grid.to_vec();
    ls.sort_by(f64::total_cmp);
    ls.dedup();
    let rows: Vec<RectRow> = ls
        .par_iter()
        .map(|&l| {
            let a = a_of_l(l)?;
            let f = shape_functional(&rectangle(l)?)?
                .f()
                .ok_or_else(|| Error::BadParameter(format!("rectangle l = {l} flagged as ball")))?;
            Ok(RectRow {
                l,
                a,
                pipeline_f: f,
                abs_diff: (a - f).abs(),
            })
        })
        .collect::<Result<_>>()?;
    let monotone = (rows.len() > 1).then(|| rows.windows(2).all(|w| w[1].a > w[0].a));
    Ok(RectScan { rows, monotone })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick(space: SearchSpace, iterations: usize) -> OptConfig {
        OptConfig {
            iterations,
            restarts: 2,
            n_vertices: 8,
            space,
            ..OptConfig::default()
        }
    }

    #[test]
    fn config_validation() {
        let mut c = OptConfig::default();
        assert!(c.validate().is_ok());
        c.gamma = 1.0;
        assert!(c.validate().is_err());
        c = OptConfig { iterations: 0, ..OptConfig::default() };
        assert!(c.validate().is_err());
        c = OptConfig { t0: -1.0, ..OptConfig::default() };
        assert!(minimize_functional(&c).is_err());
    }

    #[test]
    fn thinnest_rectangle_for_r06() {
        let l = thinnest_member_rectangle(0.6).unwrap();
        assert!((l - 0.6 / 2f64.sqrt()).abs() < 1e-6, "{l}");
        assert!((thinnest_member_rectangle(0.1).unwrap() - 0.1 / 2f64.sqrt()).abs() < 1e-6);
        assert_eq!(thinnest_member_rectangle(3.0), None);
    }

    #[test]
    fn single_iteration_returns_seed() {
        let r = minimize_functional(&OptConfig { restarts: 1, ..quick(SearchSpace::Free, 1) }).unwrap();
        assert_eq!(r.trace.len(), 1);
        let l = thinnest_member_rectangle(0.6).unwrap();
        let seed_f = shape_functional(&rectangle(l).unwrap()).unwrap().f().unwrap();
        assert!((r.best_f - seed_f).abs() < 1e-9);
        assert!(r.feasible);
    }

    #[test]
    fn best_trace_is_monotone_and_result_revalidates() {
        let r = minimize_functional(&quick(SearchSpace::Free, 300)).unwrap();
        assert!(r.trace.windows(2).all(|w| w[1].f <= w[0].f));
        assert!(r.feasible);
        assert!((r.best_shape.area() - PI).abs() < 1e-8);
        let again = shape_functional(&r.best_shape).unwrap().f().unwrap();
        assert!((again - r.best_f).abs() < 1e-9);
    }

    #[test]
    fn reproducible() {
        let a = minimize_functional(&quick(SearchSpace::Free, 150)).unwrap();
        let b = minimize_functional(&quick(SearchSpace::Free, 150)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn rectangle_search_stays_in_class() {
        let r = minimize_functional(&quick(SearchSpace::Rectangle, 400)).unwrap();
        let l = r.best_l.unwrap();
        assert!(l >= 0.6 / 2f64.sqrt() - 1e-9);
        assert!(r.feasible);
    }

    #[test]
    fn no_feasible_seed_for_huge_radius() {
        let c = OptConfig { radius: 5.0, ..quick(SearchSpace::Free, 10) };
        assert!(matches!(minimize_functional(&c), Err(Error::NoFeasibleSeed { .. })));
        let c = OptConfig { radius: 5.0, ..quick(SearchSpace::Rectangle, 10) };
        assert!(matches!(minimize_functional(&c), Err(Error::NoFeasibleSeed { .. })));
    }

    #[test]
    fn rect_scan_examples() {
        let s = rect_scan(&[0.7, 0.3, 0.5]).unwrap();
        let ls: Vec<f64> = s.rows.iter().map(|r| r.l).collect();
        assert_eq!(ls, vec![0.3, 0.5, 0.7]);
        assert_eq!(s.monotone, Some(true));
        assert!(s.rows.iter().all(|r| r.abs_diff <= 1e-6));
        let one = rect_scan(&[0.4]).unwrap();
        assert_eq!(one.rows.len(), 1);
        assert_eq!(one.monotone, None);
        assert!(matches!(rect_scan(&[0.3, 1.2]), Err(Error::BadParameter(_))));
    }
}

//! Parametric shape generators and the closed-form rectangle functional.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::cone::class_membership;
use crate::error::{Error, Result};
use crate::geometry::ConvexPolygon;
use crate::point::Point2;

/// Rejections allowed before [`random_convex_body`] gives up.
pub const MAX_REJECTIONS: usize = 10_000;

/// Upper end (exclusive) of the rectangle family: at `l = √π/2` the rectangle is a square.
pub fn rectangle_l_max() -> f64 {
    PI.sqrt() / 2.0
}

/// Half-sides of the area-π rectangle `[−L, L] × [−l, l]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RectangleParams {
    pub l: f64,
    #[serde(rename = "L")]
    pub long: f64,
}

impl RectangleParams {
    pub fn new(l: f64) -> Result<Self> {
        if !(l > 0.0 && l < rectangle_l_max()) {
            return Err(Error::BadParameter(format!(
                "rectangle half short side must lie in (0, √π/2), got {l}"
            )));
        }
        Ok(Self { l, long: PI / (4.0 * l) })
    }
}

/// Axis-aligned rectangle `[−L, L] × [−l, l]` with `L = π / 4l` (area π).
pub fn rectangle(l: f64) -> Result<ConvexPolygon> {
    let RectangleParams { l, long } = RectangleParams::new(l)?;
    ConvexPolygon::from_points(&[
        Point2::new(-long, -l),
        Point2::new(long, -l),
        Point2::new(long, l),
        Point2::new(-long, l),
    ])
}

/// Closed-form shape functional of the rectangle family,
/// `a(l) = [2(π/4l + l) − π] / [π · max²{1 − l, √(π²/16l² + l²) − 1}]`.
pub fn a_of_l(l: f64) -> Result<f64> {
    let RectangleParams { l, long } = RectangleParams::new(l)?;
    let corner = (long * long + l * l).sqrt() - 1.0;
    let denom = (1.0 - l).max(corner);
    Ok((2.0 * (long + l) - PI) / (PI * denom * denom))
}

/// Regular `n`-gon of area π centred at the origin with a vertex on the +x axis.
pub fn regular_ngon(n: usize) -> Result<ConvexPolygon> {
    if n < 3 {
        return Err(Error::BadParameter(format!("regular polygon needs n >= 3, got {n}")));
    }
    let step = 2.0 * PI / n as f64;
    let rho = (2.0 * PI / (n as f64 * step.sin())).sqrt();
    let pts: Vec<Point2> = (0..n).map(|k| Point2::from_angle(step * k as f64) * rho).collect();
    ConvexPolygon::from_points(&pts)
}

/// Circumradius of the area-π regular `n`-gon.
pub fn ngon_circumradius(n: usize) -> f64 {
    let step = 2.0 * PI / n as f64;
    (2.0 * PI / (n as f64 * step.sin())).sqrt()
}

fn uniform_in_disk(rng: &mut ChaCha8Rng) -> Point2 {
    let rad = rng.random::<f64>().sqrt();
    let theta = rng.random::<f64>() * 2.0 * PI;
    Point2::from_angle(theta) * rad
}

/// Area-normalized hull of `m` uniform points in the unit disk (no class filter).
pub fn random_hull(seed: u64, m: usize) -> Result<ConvexPolygon> {
    if m < 3 {
        return Err(Error::BadParameter(format!("need m >= 3 points, got {m}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let pts: Vec<Point2> = (0..m).map(|_| uniform_in_disk(&mut rng)).collect();
        if let Ok(p) = ConvexPolygon::from_points(&pts) {
            return Ok(p.normalize_area());
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_REJECTIONS })
}

/// Seeded random member of the class with cone parameter `radius`: hulls of
/// `m` uniform points in a disk, area-normalized, redrawn until they pass
/// [`class_membership`].
pub fn random_convex_body(seed: u64, m: usize, radius: f64) -> Result<ConvexPolygon> {
    if m < 3 {
        return Err(Error::BadParameter(format!("need m >= 3 points, got {m}")));
    }
    if !(radius > 0.0) {
        return Err(Error::BadParameter(format!("class radius must be positive, got {radius}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_REJECTIONS {
        let pts: Vec<Point2> = (0..m).map(|_| uniform_in_disk(&mut rng)).collect();
        let Ok(p) = ConvexPolygon::from_points(&pts) else {
            continue;
        };
        let p = p.normalize_area();
        if class_membership(&p, radius) {
            return Ok(p);
        }
    }
    Err(Error::GenerationFailed { attempts: MAX_REJECTIONS })
}

/// Regular `n`-gon with radial noise `ρ(1 + a_i)`, `a_i ~ U[−amplitude, amplitude]`,
/// re-hulled and normalized to area π.
pub fn perturbed_disk(n: usize, amplitude: f64, seed: u64) -> Result<ConvexPolygon> {
    if n < 3 {
        return Err(Error::BadParameter(format!("perturbed disk needs n >= 3, got {n}")));
    }
    if !(amplitude >= 0.0 && amplitude < 1.0) {
        return Err(Error::BadParameter(format!("amplitude must lie in [0, 1), got {amplitude}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = ngon_circumradius(n);
    let step = 2.0 * PI / n as f64;
    let pts: Vec<Point2> = (0..n)
        .map(|k| {
            let a = if amplitude > 0.0 {
                rng.random_range(-amplitude..=amplitude)
            } else {
                0.0
            };
            Point2::from_angle(step * k as f64) * (rho * (1.0 + a))
        })
        .collect();
    Ok(ConvexPolygon::from_points(&pts)?.normalize_area())
}

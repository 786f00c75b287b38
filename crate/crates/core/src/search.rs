//! Derivative-free minimizers used by the center searches.

use crate::error::{Error, Result};
use crate::point::Point2;

const INV_PHI: f64 = 0.618_033_988_749_894_9;
const MAX_GOLDEN_STEPS: usize = 400;

/// Golden-section search for the minimum of a unimodal `f` on `[lo, hi]`.
///
/// Returns `(argmin, min)`. Stops when the bracket is narrower than `tol`.
pub fn golden_min<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0) || !(hi >= lo) {
        return Err(Error::NoConvergence(format!("invalid bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut steps = 0;
    while hi - lo > tol {
        if steps == MAX_GOLDEN_STEPS {
            return Err(Error::NoConvergence(format!("bracket width {:e} after {steps} steps", hi - lo)));
        }
        steps += 1;
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    Ok(if f1 <= f2 { (x1, f1) } else { (x2, f2) })
}

/// Minimum of a jointly convex `f(x, y)` over the box `[lo, hi]`.
///
/// Partial minimization preserves convexity, so `g(x) = min_y f(x, y)` is
/// convex and an outer golden-section search over `x` with an inner one over
/// `y` reaches the global minimum.
pub fn nested_golden_min<F: FnMut(Point2) -> f64>(mut f: F, lo: Point2, hi: Point2, tol: f64) -> Result<(Point2, f64)> {
    let mut inner_err = None;
    let mut inner = |x: f64, f: &mut F| match golden_min(|y| f(Point2::new(x, y)), lo.y, hi.y, tol) {
        Ok(r) => r,
        Err(e) => {
            inner_err = Some(e);
            (lo.y, f64::INFINITY)
        }
    };
    let (x, _) = golden_min(|x| inner(x, &mut f).1, lo.x, hi.x, tol)?;
    let (y, v) = inner(x, &mut f);
    if let Some(e) = inner_err {
        return Err(e);
    }
    Ok((Point2::new(x, y), v))
}

/// Compass/pattern search with eight directions and step halving.
///
/// Returns the best point and value once the step drops below `tol`.
pub fn pattern_search<F: FnMut(Point2) -> f64>(
    mut f: F,
    start: Point2,
    initial_step: f64,
    tol: f64,
    max_evals: usize,
) -> Result<(Point2, f64)> {
    const DIRS: [(f64, f64); 8] = [
        (1.0, 0.0),
        (0.0, 1.0),
        (-1.0, 0.0),
        (0.0, -1.0),
        (std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        (-std::f64::consts::FRAC_1_SQRT_2, std::f64::consts::FRAC_1_SQRT_2),
        (-std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
        (std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2),
    ];
    let mut x = start;
    let mut fx = f(x);
    let mut step = initial_step;
    let mut evals = 1;
    while step >= tol {
        let mut moved = false;
        for &(dx, dy) in &DIRS {
            let cand = x + Point2::new(dx, dy) * step;
            let fc = f(cand);
            evals += 1;
            if fc < fx {
                x = cand;
                fx = fc;
                moved = true;
                break;
            }
        }
        if !moved {
            step *= 0.5;
        }
        if evals >= max_evals {
            return Err(Error::NoConvergence(format!(
                "pattern search step {step:e} after {evals} evaluations"
            )));
        }
    }
    Ok((x, fx))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_min() {
        let (x, v) = golden_min(|x| (x - 0.3).powi(2) + 1.0, -2.0, 2.0, 1e-10).unwrap();
        assert!((x - 0.3).abs() < 1e-7);
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_handles_kinks() {
        let (x, _) = golden_min(|x| (x + 0.7).abs(), -2.0, 2.0, 1e-11).unwrap();
        assert!((x + 0.7).abs() < 1e-10);
    }

    #[test]
    fn golden_rejects_bad_tolerance() {
        assert!(golden_min(|x| x, 0.0, 1.0, 0.0).is_err());
    }

    #[test]
    fn nested_golden_on_rotated_ridge() {
        // max of two planes meeting along a ridge not aligned with the axes:
        // the classic case where axis-aligned compass search stalls.
        let f = |p: Point2| {
            let u = p.x - 0.2 + 2.0 * (p.y + 0.1);
            let w = 3.0 * (p.x - 0.2) - (p.y + 0.1);
            u.abs().max(w.abs())
        };
        let (p, v) = nested_golden_min(f, Point2::new(-1.0, -1.0), Point2::new(1.0, 1.0), 1e-11).unwrap();
        assert!(v < 1e-9, "value {v}");
        assert!((p.x - 0.2).abs() < 1e-9 && (p.y + 0.1).abs() < 1e-9);
    }

    #[test]
    fn pattern_search_on_smooth_bowl() {
        let f = |p: Point2| (p.x - 1.0).powi(2) + 3.0 * (p.y + 0.5).powi(2) + 0.5 * p.x * p.y;
        let (p, _) = pattern_search(f, Point2::new(0.0, 0.0), 0.5, 1e-10, 100_000).unwrap();
        // grad = 0: 2(x-1) + 0.5y = 0, 6(y+0.5) + 0.5x = 0
        let det = 2.0 * 6.0 - 0.25;
        let x = (2.0 * 6.0 - 0.5 * (-3.0)) / det;
        let y = (2.0 * (-3.0) - 0.5 * 2.0) / det;
        assert!((p.x - x).abs() < 1e-8 && (p.y - y).abs() < 1e-8, "{p:?} vs ({x}, {y})");
    }

    #[test]
    fn pattern_search_eval_cap() {
        let r = pattern_search(|p| p.x, Point2::new(0.0, 0.0), 1.0, 1e-10, 50);
        assert!(matches!(r, Err(Error::NoConvergence(_))));
    }
}

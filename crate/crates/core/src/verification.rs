//! Corpus-scale checks of the hard inequalities and empirical estimates of
//! the non-constructive constants.

use std::f64::consts::{PI, SQRT_2};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cone::class_membership;
use crate::error::{Error, Result};
use crate::families::{perturbed_disk, random_hull, rectangle, rectangle_l_max};
use crate::functionals::{deficit, fraenkel_from, lambda_h, BallExclusionPolicy};
use crate::geometry::{hausdorff_polygons, ConvexPolygon, Tolerances};

/// Slack for inequalities that must hold exactly (accumulated optimizer error).
pub const HARD_TOL: f64 = 1e-8;
/// Default deficit cutoff for the small-deficit cohort.
pub const DEFAULT_DELTA: f64 = 0.1;

/// Diameter bound for members of the class, `2R − 2R̄ + π/(2R̄)` with the
/// largest disk inscribable in the quarter sector, `R̄ = (√2 − 1)R`.
pub fn h_r(radius: f64) -> f64 {
    let inner = (SQRT_2 - 1.0) * radius;
    2.0 * radius - 2.0 * inner + PI / (2.0 * inner)
}

/// `λ_H(P1) ≤ d_H(P1, P2) + λ_H(P2)` for two area-π bodies.
pub fn verify_triangle(p1: &ConvexPolygon, p2: &ConvexPolygon) -> Result<bool> {
    let (l1, _) = lambda_h(p1)?;
    let (l2, _) = lambda_h(p2)?;
    Ok(triangle_holds(l1, l2, hausdorff_polygons(p1, p2)))
}

#[inline]
pub fn triangle_holds(lambda_1: f64, lambda_2: f64, hausdorff_12: f64) -> bool {
    lambda_1 <= hausdorff_12 + lambda_2 + HARD_TOL
}

/// `λ_H(P) ≤ diam(P)` and, for class members with cone radius `radius`,
/// `diam(P) ≤ H_R`.
pub fn verify_diam_bound(p: &ConvexPolygon, radius: f64) -> Result<bool> {
    let (lh, _) = lambda_h(p)?;
    let diam = p.diameter();
    let r = (p.area() / PI).sqrt();
    let mut ok = lh <= diam / r + 1e-9;
    if class_membership(p, radius) {
        ok &= diam <= h_r(radius);
    }
    Ok(ok)
}

/// `D` and `λ_H` agree for `P` and `sP`.
pub fn scale_invariance_check(p: &ConvexPolygon, s: f64) -> Result<bool> {
    let q = p.scaled_about(p.centroid(), s)?;
    let (l1, _) = lambda_h(p)?;
    let (l2, _) = lambda_h(&q)?;
    Ok((deficit(p) - deficit(&q)).abs() <= 1e-9 && (l1 - l2).abs() <= 1e-6)
}

/// One corpus row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BodyRecord {
    pub id: usize,
    #[serde(rename = "D")]
    pub deficit: f64,
    pub lambda_h: f64,
    pub fraenkel: Option<f64>,
    #[serde(rename = "F")]
    pub shape_functional: Option<f64>,
    pub in_class: bool,
    /// `λ_H / √D`.
    pub ratio: f64,
    pub diameter: f64,
    pub hard_violations: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundReport {
    pub corpus_size: usize,
    /// Bodies with `D < delta`.
    pub cohort_size: usize,
    /// Largest `λ_H / √D` over the cohort.
    pub max_ratio: f64,
    pub delta_used: f64,
    pub violations: usize,
    pub triangle_pairs: usize,
    #[serde(rename = "H_R")]
    pub h_r: f64,
    pub class_radius: f64,
    #[serde(rename = "min_F_observed")]
    pub min_f_observed: Option<f64>,
}

/// Settings for [`evaluate_corpus`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusOptions {
    pub delta: f64,
    pub class_radius: f64,
    pub with_fraenkel: bool,
    /// Random pairs for the triangle check; 0 disables.
    pub triangle_pairs: usize,
    pub pair_seed: u64,
}

impl Default for CorpusOptions {
    fn default() -> Self {
        Self {
            delta: DEFAULT_DELTA,
            class_radius: 0.3,
            with_fraenkel: false,
            triangle_pairs: 0,
            pair_seed: 0,
        }
    }
}

struct Evaluated {
    record: BodyRecord,
}

fn evaluate_body(id: usize, p: &ConvexPolygon, opts: &CorpusOptions) -> Result<Evaluated> {
    let tol = Tolerances::DEFAULT;
    let d = deficit(p);
    let (lh, center) = lambda_h(p)?;
    let r = (p.area() / PI).sqrt();
    let diam = p.diameter();
    let in_class = class_membership(p, opts.class_radius);
    let mut hard = 0;
    if d < -HARD_TOL {
        hard += 1;
    }
    if lh > diam / r + HARD_TOL {
        hard += 1;
    }
    // isodiametric: diam ≥ 2r
    if diam < 2.0 * r - HARD_TOL {
        hard += 1;
    }
    if in_class && diam > h_r(opts.class_radius) {
        hard += 1;
    }
    let fr = if opts.with_fraenkel {
        Some(fraenkel_from(p, &[p.centroid(), center], &tol)?.0)
    } else {
        None
    };
    let ball = lh <= BallExclusionPolicy::default().eps_ball;
    Ok(Evaluated {
        record: BodyRecord {
            id,
            deficit: d,
            lambda_h: lh,
            fraenkel: fr,
            shape_functional: if ball { None } else { Some(d / (lh * lh)) },
            in_class,
            ratio: if d > 0.0 { lh / d.sqrt() } else { f64::INFINITY },
            diameter: diam,
            hard_violations: hard,
        },
    })
}

/// Evaluates every body (in parallel), checks the hard inequalities, runs the
/// triangle check on seeded random pairs and reduces in corpus order.
pub fn evaluate_corpus(corpus: &[ConvexPolygon], opts: &CorpusOptions) -> Result<(BoundReport, Vec<BodyRecord>)> {
    let evaluated: Vec<Evaluated> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, p)| evaluate_body(i, p, opts))
        .collect::<Result<_>>()?;
    let records: Vec<BodyRecord> = evaluated.into_iter().map(|e| e.record).collect();

    let mut violations: usize = records.iter().map(|r| r.hard_violations).sum();
    if opts.triangle_pairs > 0 && corpus.len() >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(opts.pair_seed);
        let pairs: Vec<(usize, usize)> = (0..opts.triangle_pairs)
            .map(|_| {
                let a = rng.random_range(0..corpus.len());
                let mut b = rng.random_range(0..corpus.len() - 1);
                if b >= a {
                    b += 1;
                }
                (a, b)
            })
            .collect();
        violations += pairs
            .par_iter()
            .filter(|&&(a, b)| {
                let dh = hausdorff_polygons(&corpus[a], &corpus[b]);
                !triangle_holds(records[a].lambda_h, records[b].lambda_h, dh)
            })
            .count();
    }

    let cohort: Vec<&BodyRecord> = records.iter().filter(|r| r.deficit < opts.delta).collect();
    let max_ratio = cohort.iter().map(|r| r.ratio).fold(f64::NEG_INFINITY, f64::max);
    let min_f = records
        .iter()
        .filter(|r| r.in_class)
        .filter_map(|r| r.shape_functional)
        .fold(None, |acc: Option<f64>, f| Some(acc.map_or(f, |a| a.min(f))));
    let report = BoundReport {
        corpus_size: corpus.len(),
        cohort_size: cohort.len(),
        max_ratio: if cohort.is_empty() { f64::NAN } else { max_ratio },
        delta_used: opts.delta,
        violations,
        triangle_pairs: if corpus.len() >= 2 { opts.triangle_pairs } else { 0 },
        h_r: h_r(opts.class_radius),
        class_radius: opts.class_radius,
        min_f_observed: min_f,
    };
    Ok((report, records))
}

/// Empirical constant `max λ_H/√D` over the bodies with `D < delta`.
pub fn estimate_bound_constant(corpus: &[ConvexPolygon], delta: f64, class_radius: f64) -> Result<BoundReport> {
    let opts = CorpusOptions {
        delta,
        class_radius,
        ..CorpusOptions::default()
    };
    let (report, _) = evaluate_corpus(corpus, &opts)?;
    if report.cohort_size == 0 {
        return Err(Error::EmptyCohort { delta });
    }
    Ok(report)
}

/// Perturbed disks with `n` vertices and amplitudes `U[0, max_amplitude]`,
/// generator seeds `first_seed..first_seed + count`.
pub fn perturbed_disk_corpus(count: usize, first_seed: u64, n: usize, max_amplitude: f64) -> Result<Vec<ConvexPolygon>> {
    (0..count as u64)
        .into_par_iter()
        .map(|k| {
            let seed = first_seed + k;
            let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
            let amp = rng.random_range(0.0..=max_amplitude);
            perturbed_disk(n, amp, seed)
        })
        .collect()
}

/// Mixed corpus keyed by seed: perturbed disks, rectangles and random hulls
/// in rotation.
pub fn mixed_body(seed: u64) -> Result<ConvexPolygon> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x2545_f491_4f6c_dd1d));
    match seed % 3 {
        0 => perturbed_disk(96, rng.random_range(0.0..=0.05), seed),
        1 => rectangle(rng.random_range(0.05..rectangle_l_max() - 1e-3)),
        _ => random_hull(seed, rng.random_range(4..=20)),
    }
}

pub fn mixed_corpus(seeds: std::ops::RangeInclusive<u64>) -> Result<Vec<ConvexPolygon>> {
    seeds.collect::<Vec<_>>().into_par_iter().map(mixed_body).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{a_of_l, regular_ngon};

    #[test]
    fn h_r_formula() {
        let rad: f64 = 0.6;
        let expected = 2.0 * rad * (2.0 - SQRT_2) + PI / (2.0 * (SQRT_2 - 1.0) * rad);
        assert!((h_r(rad) - expected).abs() < 1e-12);
    }

    #[test]
    fn triangle_examples() {
        let a = rectangle(0.5).unwrap();
        assert!(verify_triangle(&a, &a).unwrap());
        let b = rectangle(0.55).unwrap();
        assert!(verify_triangle(&a, &b).unwrap());
        assert!(verify_triangle(&b, &a).unwrap());
    }

    #[test]
    fn diam_bound_examples() {
        let r = rectangle(0.5).unwrap();
        assert!(verify_diam_bound(&r, 0.5).unwrap());
        assert!(verify_diam_bound(&regular_ngon(64).unwrap(), 0.5).unwrap());
    }

    #[test]
    fn scale_invariance_examples() {
        let r = rectangle(0.5).unwrap();
        assert!(scale_invariance_check(&r, 1.0).unwrap());
        assert!(scale_invariance_check(&r, 2.0).unwrap());
        let p = random_hull(11, 9).unwrap();
        assert!(scale_invariance_check(&p, 0.1).unwrap());
        assert!(scale_invariance_check(&r, 0.0).is_err());
    }

    #[test]
    fn empty_cohort() {
        let corpus = vec![rectangle(0.5).unwrap()];
        assert!(matches!(
            estimate_bound_constant(&corpus, 0.0, 0.3),
            Err(Error::EmptyCohort { .. })
        ));
        // every rectangle has D ≥ D(square) ≈ 0.128
        assert!(estimate_bound_constant(&corpus, DEFAULT_DELTA, 0.3).is_err());
    }

    #[test]
    fn rectangle_cohort_ratio_matches_closed_form() {
        let ls: Vec<f64> = (0..=8).map(|k| 0.4 + 0.05 * k as f64).collect();
        let corpus: Vec<_> = ls.iter().map(|&l| rectangle(l).unwrap()).collect();
        let rep = estimate_bound_constant(&corpus, 10.0, 0.3).unwrap();
        // λ_H/√D = 1/√F and a(l) is increasing, so the max sits at l = 0.4
        let expected = 1.0 / a_of_l(0.4).unwrap().sqrt();
        assert!((rep.max_ratio - expected).abs() < 1e-8, "{} vs {expected}", rep.max_ratio);
        assert_eq!(rep.violations, 0);
    }

    #[test]
    fn small_mixed_corpus_has_no_violations() {
        let corpus = mixed_corpus(1..=30).unwrap();
        let opts = CorpusOptions {
            triangle_pairs: 100,
            ..CorpusOptions::default()
        };
        let (rep, rows) = evaluate_corpus(&corpus, &opts).unwrap();
        assert_eq!(rep.violations, 0);
        assert_eq!(rows.len(), 30);
        assert!(rows.iter().all(|r| r.deficit >= 0.0));
    }

    #[test]
    fn corpora_are_deterministic() {
        assert_eq!(mixed_corpus(1..=9).unwrap(), mixed_corpus(1..=9).unwrap());
        assert_eq!(
            perturbed_disk_corpus(5, 3, 32, 0.05).unwrap(),
            perturbed_disk_corpus(5, 3, 32, 0.05).unwrap()
        );
    }
}

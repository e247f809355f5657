//! Global extremum finding on a periodic field by deterministic multistart
//! local optimization.
//!
//! Starts sit on a uniform grid, jittered from a seed; each descent runs
//! BFGS with backtracking on the exact gradient, then a Newton polish on the
//! exact Hessian. Converged points are kept only when their value lies
//! within a band of the global extreme (saddles fall outside the band),
//! deduplicated under the periodic metric, and snapped to small rationals
//! where possible. Results are identical for any thread count: candidates
//! are produced per start index and sorted canonically before merging.

use std::f64::consts::TAU;
use std::fmt;

use nalgebra::{Matrix3, Point3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::formula::{Axis, Expr, PeriodicField};
use crate::lattice::{periodic_distance, PeriodicPointSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ExtremumKind {
    Minimum,
    Maximum,
}

impl fmt::Display for ExtremumKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExtremumKind::Minimum => "minimum",
            ExtremumKind::Maximum => "maximum",
        })
    }
}

/// A reduced fraction p/q of the period, in [0, 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Fraction {
    pub num: u32,
    pub den: u32,
}

impl Fraction {
    pub fn new(num: u32, den: u32) -> Fraction {
        assert!(den > 0);
        let num = num % den;
        let g = gcd(num.max(1), den);
        Fraction {
            num: num / g,
            den: den / g,
        }
    }

    pub fn value(&self) -> f64 {
        self.num as f64 / self.den as f64
    }
}

impl fmt::Display for Fraction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a.max(1)
    } else {
        gcd(b, a % b)
    }
}

/// One deduplicated extremum.
#[derive(Clone, Debug)]
pub struct ExtremalPoint {
    /// Position in [0, period)³, in the field's frame.
    pub position: Point3<f64>,
    pub value: f64,
    pub kind: ExtremumKind,
    /// Exact rational coordinates (fractions of the period), when a small
    /// denominator reproduces the position, gradient and value.
    pub snapped: Option<[Fraction; 3]>,
}

impl ExtremalPoint {
    /// The position implied by the snapped fractions, or the raw one.
    pub fn best_position(&self, period: f64) -> Point3<f64> {
        match &self.snapped {
            Some(f) => Point3::new(
                f[0].value() * period,
                f[1].value() * period,
                f[2].value() * period,
            ),
            None => self.position,
        }
    }
}

/// All extrema of a field in one period.
#[derive(Clone, Debug)]
pub struct ExtremalSet {
    pub field: PeriodicField,
    pub minima: Vec<ExtremalPoint>,
    pub maxima: Vec<ExtremalPoint>,
    /// (global minimum value, global maximum value).
    pub range: (f64, f64),
}

impl ExtremalSet {
    /// The extrema of one or both kinds as a periodic point set (snapped
    /// coordinates preferred), labelled `min#i` / `max#i`.
    pub fn point_set(&self, which: Option<ExtremumKind>) -> PeriodicPointSet {
        let period = self.field.period();
        let mut pts = Vec::new();
        let mut labels = Vec::new();
        let mut push = |list: &Vec<ExtremalPoint>, tag: &str| {
            for (i, p) in list.iter().enumerate() {
                pts.push(p.best_position(period));
                labels.push(format!("{tag}#{i}"));
            }
        };
        match which {
            Some(ExtremumKind::Minimum) => push(&self.minima, "min"),
            Some(ExtremumKind::Maximum) => push(&self.maxima, "max"),
            None => {
                push(&self.minima, "min");
                push(&self.maxima, "max");
            }
        }
        PeriodicPointSet::with_labels(pts, period, Some(labels))
            .expect("extrema are distinct by deduplication")
    }
}

/// Per-kind results that never fail wholesale: a degenerate minimum locus
/// does not hide valid maxima.
#[derive(Clone, Debug)]
pub struct ExtremaOutcome {
    pub field: PeriodicField,
    pub minima: Result<Vec<ExtremalPoint>, ExtremaError>,
    pub maxima: Result<Vec<ExtremalPoint>, ExtremaError>,
    pub range: (f64, f64),
}

impl ExtremaOutcome {
    pub fn of_kind(&self, kind: ExtremumKind) -> &Result<Vec<ExtremalPoint>, ExtremaError> {
        match kind {
            ExtremumKind::Minimum => &self.minima,
            ExtremumKind::Maximum => &self.maxima,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ExtremaError {
    /// The extremal locus of this kind is not a finite point set (for
    /// instance a whole iso-shell attains the minimum).
    #[error("degenerate {kind} locus: {points} candidate points, nearest spacing {spacing:.3e}")]
    DegenerateLocus {
        kind: ExtremumKind,
        points: usize,
        spacing: f64,
    },
}

/// Tuning for the multistart search. Defaults match the CLI defaults.
#[derive(Clone, Copy, Debug)]
pub struct ExtremaConfig {
    /// Starts per axis; the grid has `starts_grid³` jittered points.
    pub starts_grid: usize,
    pub seed: u64,
    /// Gradient norm bound for a reported extremum, in the field frame.
    pub grad_tol: f64,
    /// Same-kind points closer than this fraction of the period are merged.
    pub dedup_radius_rel: f64,
    /// Coordinate snap tolerance, fraction of the period.
    pub snap_tol_rel: f64,
    /// Largest denominator tried by the rational snap.
    pub snap_denominator_max: u32,
    /// Value band around the global extreme, as a fraction of the range
    /// width. Local extremum levels inside the band count as extremal
    /// (the Octo field has maxima at 13.7 and 13.3 over a range of width
    /// 20, and both generate cells); levels reported separately in the
    /// reference tables all sit beyond 4% of the width.
    pub value_tol_rel: f64,
    /// More deduplicated same-kind points than this is degenerate.
    pub max_points: usize,
    /// Deduplicated spacing below this fraction of the period is degenerate.
    pub degenerate_spacing_rel: f64,
}

impl Default for ExtremaConfig {
    fn default() -> Self {
        ExtremaConfig {
            starts_grid: 10,
            seed: 2024,
            grad_tol: 1e-8,
            dedup_radius_rel: 1.0 / 64.0,
            snap_tol_rel: 1e-4,
            snap_denominator_max: 48,
            value_tol_rel: 0.03,
            max_points: 200,
            degenerate_spacing_rel: 1.0 / 256.0,
        }
    }
}

// ---------------------------------------------------------------------------
// descent machinery (works in the natural 2π frame)
// ---------------------------------------------------------------------------

struct Objective {
    f: Expr,
    grad: [Expr; 3],
    hess: [[Expr; 3]; 3],
    sign: f64,
}

impl Objective {
    fn new(expr: &Expr, sign: f64) -> Objective {
        let g = |a: Axis| expr.derivative(a);
        let grad = [g(Axis::X), g(Axis::Y), g(Axis::Z)];
        let h = |i: usize, a: Axis| grad[i].derivative(a);
        let hess = [
            [h(0, Axis::X), h(0, Axis::Y), h(0, Axis::Z)],
            [h(1, Axis::X), h(1, Axis::Y), h(1, Axis::Z)],
            [h(2, Axis::X), h(2, Axis::Y), h(2, Axis::Z)],
        ];
        Objective {
            f: expr.clone(),
            grad,
            hess,
            sign,
        }
    }

    fn value(&self, p: &Point3<f64>) -> f64 {
        self.f.eval(p).map_or(f64::INFINITY, |v| self.sign * v)
    }

    fn gradient(&self, p: &Point3<f64>) -> Option<Vector3<f64>> {
        let mut g = Vector3::zeros();
        for i in 0..3 {
            g[i] = self.sign * self.grad[i].eval(p).ok()?;
        }
        g.iter().all(|v| v.is_finite()).then_some(g)
    }

    fn hessian(&self, p: &Point3<f64>) -> Option<Matrix3<f64>> {
        let mut h = Matrix3::zeros();
        for i in 0..3 {
            for j in 0..3 {
                h[(i, j)] = self.sign * self.hess[i][j].eval(p).ok()?;
            }
        }
        Some(h)
    }
}

const MAX_BFGS_ITERS: usize = 200;
const MAX_NEWTON_ITERS: usize = 25;
const MAX_STEP: f64 = 1.0;

/// One local descent; returns a stationary point (natural frame, unwrapped)
/// and its objective value, or None when convergence failed.
fn descend(obj: &Objective, start: Point3<f64>) -> Option<(Point3<f64>, f64)> {
    let mut p = start;
    let mut fv = obj.value(&p);
    if !fv.is_finite() {
        return None;
    }
    let mut g = obj.gradient(&p)?;
    let mut h_inv = Matrix3::identity();
    for _ in 0..MAX_BFGS_ITERS {
        if g.norm() < 1e-7 {
            break;
        }
        let mut dir = -(h_inv * g);
        if dir.dot(&g) > -1e-14 * dir.norm() * g.norm() {
            h_inv = Matrix3::identity();
            dir = -g;
        }
        if dir.norm() > MAX_STEP {
            dir *= MAX_STEP / dir.norm();
        }
        let slope = g.dot(&dir);
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..40 {
            let q = p + dir * t;
            let fq = obj.value(&q);
            if fq <= fv + 1e-4 * t * slope {
                accepted = Some((q, fq));
                break;
            }
            t *= 0.5;
        }
        let (q, fq) = accepted?;
        let gq = obj.gradient(&q)?;
        let s = q - p;
        let y = gq - g;
        let sy = s.dot(&y);
        if sy > 1e-12 * s.norm() * y.norm() {
            let rho = 1.0 / sy;
            let i = Matrix3::identity();
            let left = i - (s * y.transpose()) * rho;
            let right = i - (y * s.transpose()) * rho;
            h_inv = left * h_inv * right + (s * s.transpose()) * rho;
        }
        p = q;
        fv = fq;
        g = gq;
    }
    // Newton polish: quadratic convergence on the exact Hessian
    for _ in 0..MAX_NEWTON_ITERS {
        let gn = g.norm();
        if gn < 1e-13 {
            break;
        }
        let hess = obj.hessian(&p)?;
        let step = hess.lu().solve(&(-g)).unwrap_or(-g * 1e-3);
        let mut t = 1.0;
        let mut improved = false;
        for _ in 0..6 {
            let q = p + step * t;
            if let Some(gq) = obj.gradient(&q) {
                if gq.norm() < gn {
                    p = q;
                    g = gq;
                    improved = true;
                    break;
                }
            }
            t *= 0.5;
        }
        if !improved {
            break;
        }
    }
    fv = obj.value(&p);
    (g.norm() < 1e-9 && fv.is_finite()).then_some((p, fv))
}

struct RawRun {
    /// Converged stationary lows of ±f, canonically sorted:
    /// (wrapped natural position, f value).
    found: Vec<(Point3<f64>, f64)>,
    /// Global extreme value of f reached by this run.
    extreme: f64,
    sign: f64,
}

fn raw_run(field: &PeriodicField, kind: ExtremumKind, cfg: &ExtremaConfig) -> RawRun {
    let sign = match kind {
        ExtremumKind::Minimum => 1.0,
        ExtremumKind::Maximum => -1.0,
    };
    let obj = Objective::new(field.expr(), sign);
    let g = cfg.starts_grid;
    assert!(g * g * g >= 64, "need at least 64 starts");
    let cell = TAU / g as f64;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let starts: Vec<Point3<f64>> = (0..g * g * g)
        .map(|idx| {
            let (i, j, k) = (idx / (g * g), (idx / g) % g, idx % g);
            let mut jitter = || rng.random_range(-0.25..0.25) * cell;
            Point3::new(
                (i as f64 + 0.5) * cell + jitter(),
                (j as f64 + 0.5) * cell + jitter(),
                (k as f64 + 0.5) * cell + jitter(),
            )
        })
        .collect();

    let mut found: Vec<(Point3<f64>, f64)> = starts
        .par_iter()
        .filter_map(|s| descend(&obj, *s))
        .map(|(p, fv)| {
            (
                Point3::new(
                    p.x.rem_euclid(TAU),
                    p.y.rem_euclid(TAU),
                    p.z.rem_euclid(TAU),
                ),
                fv * sign, // back to f values
            )
        })
        .collect();

    // canonical order: objective value first, then coordinates
    found.sort_by(|a, b| {
        (a.1 * sign)
            .total_cmp(&(b.1 * sign))
            .then(a.0.x.total_cmp(&b.0.x))
            .then(a.0.y.total_cmp(&b.0.y))
            .then(a.0.z.total_cmp(&b.0.z))
    });
    let extreme = found.first().map_or(f64::NAN, |c| c.1);
    RawRun {
        found,
        extreme,
        sign,
    }
}

/// Greedy merge at `radius`; the input is sorted best value first, so each
/// cluster is represented by its best member.
fn merge_points(points: &[(Point3<f64>, f64)], radius: f64) -> Vec<(Point3<f64>, f64)> {
    let mut reps: Vec<(Point3<f64>, f64)> = Vec::new();
    for (p, v) in points {
        if !reps
            .iter()
            .any(|(q, _)| periodic_distance(p, q, TAU) < radius)
        {
            reps.push((*p, *v));
        }
    }
    reps
}

/// Numerical twins (re-convergences of the same extremum from different
/// starts) agree far better than this; genuinely distinct points on a
/// degenerate locus do not.
const TWIN_RADIUS_REL: f64 = 1e-5;

// ---------------------------------------------------------------------------
// public operations
// ---------------------------------------------------------------------------

/// Find minima and maxima per kind; a degenerate kind reports its error
/// without hiding the other kind.
pub fn analyze_extrema(field: &PeriodicField, cfg: &ExtremaConfig) -> ExtremaOutcome {
    let min_run = raw_run(field, ExtremumKind::Minimum, cfg);
    let max_run = raw_run(field, ExtremumKind::Maximum, cfg);
    let range = (min_run.extreme, max_run.extreme);
    let width = {
        let w = range.1 - range.0;
        if w.is_finite() && w > 0.0 {
            w
        } else {
            range.0.abs().max(range.1.abs()).max(1.0)
        }
    };

    let finalize = |run: &RawRun, kind: ExtremumKind| -> Result<Vec<ExtremalPoint>, ExtremaError> {
        let period = field.period();
        let scale = period / TAU;
        let value_tol = cfg.value_tol_rel * width;
        let banded: Vec<(Point3<f64>, f64)> = run
            .found
            .iter()
            .filter(|(_, v)| run.sign * (v - run.extreme) <= value_tol)
            .cloned()
            .collect();
        // merge numerical twins only, then judge degeneracy on what is left
        let distinct = merge_points(&banded, TWIN_RADIUS_REL * TAU);
        let spacing = min_spacing(&distinct, TAU);
        if distinct.len() > cfg.max_points || spacing < cfg.degenerate_spacing_rel * TAU {
            return Err(ExtremaError::DegenerateLocus {
                kind,
                points: distinct.len(),
                spacing: spacing * scale,
            });
        }
        let mut clusters = merge_points(&distinct, cfg.dedup_radius_rel * TAU);
        clusters.sort_by(|a, b| {
            a.0.x
                .total_cmp(&b.0.x)
                .then(a.0.y.total_cmp(&b.0.y))
                .then(a.0.z.total_cmp(&b.0.z))
        });
        Ok(clusters
            .into_iter()
            .map(|(p, v)| {
                let point = ExtremalPoint {
                    position: Point3::new(p.x * scale, p.y * scale, p.z * scale),
                    value: v,
                    kind,
                    snapped: None,
                };
                snap_rational(&point, field, cfg)
            })
            .collect())
    };

    ExtremaOutcome {
        field: field.clone(),
        minima: finalize(&min_run, ExtremumKind::Minimum),
        maxima: finalize(&max_run, ExtremumKind::Maximum),
        range,
    }
}

/// Find all extrema; fails with [`ExtremaError::DegenerateLocus`] when
/// either kind is not a finite point set.
pub fn find_extrema(field: &PeriodicField, cfg: &ExtremaConfig) -> Result<ExtremalSet, ExtremaError> {
    let outcome = analyze_extrema(field, cfg);
    Ok(ExtremalSet {
        field: field.clone(),
        minima: outcome.minima?,
        maxima: outcome.maxima?,
        range: outcome.range,
    })
}

/// Global minimum and maximum values over one period. Degenerate loci do
/// not matter here; only the values are reported.
pub fn range_of(field: &PeriodicField, cfg: &ExtremaConfig) -> (f64, f64) {
    let min_run = raw_run(field, ExtremumKind::Minimum, cfg);
    let max_run = raw_run(field, ExtremumKind::Maximum, cfg);
    (min_run.extreme, max_run.extreme)
}

fn min_spacing(clusters: &[(Point3<f64>, f64)], period: f64) -> f64 {
    let mut best = f64::INFINITY;
    for (i, (p, _)) in clusters.iter().enumerate() {
        for (q, _) in &clusters[i + 1..] {
            best = best.min(periodic_distance(p, q, period));
        }
    }
    best
}

/// Populate `snapped` when each coordinate is within tolerance of a fraction
/// p/q (q ≤ `cfg.snap_denominator_max`) of the period, the gradient at the
/// snapped point stays below `grad_tol`, and the value shift is below 1e-9.
pub fn snap_rational(
    point: &ExtremalPoint,
    field: &PeriodicField,
    cfg: &ExtremaConfig,
) -> ExtremalPoint {
    let period = field.period();
    let mut fracs = [Fraction::new(0, 1); 3];
    for (c, frac) in fracs.iter_mut().enumerate() {
        let target = point.position[c] / period; // in [0, 1)
        let mut hit = None;
        for den in 1..=cfg.snap_denominator_max {
            let num = (target * den as f64).round();
            if (num / den as f64 - target).abs() <= cfg.snap_tol_rel {
                hit = Some(Fraction::new(num as u32 % den, den));
                break;
            }
        }
        match hit {
            Some(f) => *frac = f,
            None => {
                return ExtremalPoint {
                    snapped: None,
                    ..point.clone()
                }
            }
        }
    }
    let q = Point3::new(
        fracs[0].value() * period,
        fracs[1].value() * period,
        fracs[2].value() * period,
    );
    let grad_ok = field.gradient(&q).is_ok_and(|g| g.norm() < cfg.grad_tol);
    let value_ok = field
        .evaluate(&q)
        .is_ok_and(|v| (v - point.value).abs() < 1e-9);
    ExtremalPoint {
        snapped: (grad_ok && value_ok).then_some(fracs),
        ..point.clone()
    }
}

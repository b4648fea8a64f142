//! Planar configurations, bearings, signed angles, ratios of distance and
//! similarity transforms.

use std::f64::consts::{PI, TAU};

use nalgebra::{DVector, Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Triple, TripleIndexSet};

pub type Point = Vector2<f64>;

/// Counter-clockwise rotation matrix.
pub fn rot(theta: f64) -> Matrix2<f64> {
    let (s, c) = theta.sin_cos();
    Matrix2::new(c, -s, s, c)
}

/// `R(pi/2) v`.
pub fn perp(v: &Point) -> Point {
    Vector2::new(-v.y, v.x)
}

pub fn cross(a: &Point, b: &Point) -> f64 {
    a.x * b.y - a.y * b.x
}

/// Wraps an angle into `[0, 2pi)`.
pub fn wrap_2pi(a: f64) -> f64 {
    let w = a.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_pi(a: f64) -> f64 {
    let w = wrap_2pi(a);
    if w > PI {
        w - TAU
    } else {
        w
    }
}

/// Positions of `n` planar points.
#[derive(Clone, Debug, PartialEq)]
pub struct Configuration {
    pub points: Vec<Point>,
}

impl Configuration {
    pub fn new(points: Vec<Point>) -> Configuration {
        Configuration { points }
    }

    pub fn from_xy(xy: &[(f64, f64)]) -> Configuration {
        Configuration::new(xy.iter().map(|&(x, y)| Vector2::new(x, y)).collect())
    }

    /// Reads `[x1, y1, x2, y2, ...]`.
    pub fn from_stacked(p: &DVector<f64>) -> Configuration {
        Configuration::new((0..p.len() / 2).map(|i| Vector2::new(p[2 * i], p[2 * i + 1])).collect())
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn stacked(&self) -> DVector<f64> {
        DVector::from_iterator(2 * self.len(), self.points.iter().flat_map(|p| [p.x, p.y]))
    }

    /// Largest pairwise coordinate extent, used to scale tolerances.
    pub fn scale(&self) -> f64 {
        let (mut lo, mut hi) = (Vector2::repeat(f64::INFINITY), Vector2::repeat(f64::NEG_INFINITY));
        for p in &self.points {
            lo = lo.inf(p);
            hi = hi.sup(p);
        }
        (hi - lo).amax().max(f64::MIN_POSITIVE)
    }

    /// First pair of vertices closer than `tol`, if any.
    pub fn collocated_pair(&self, tol: f64) -> Option<(usize, usize)> {
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                if (self.points[i] - self.points[j]).norm() <= tol {
                    return Some((i, j));
                }
            }
        }
        None
    }
}

fn leg(p: &Configuration, from: usize, to: usize) -> Result<Point> {
    let v = p.points[to] - p.points[from];
    if v.norm() == 0.0 {
        return Err(Error::Collocated(from + 1, to + 1));
    }
    Ok(v)
}

/// Unit bearing from `from` toward `to`.
pub fn bearing(p: &Configuration, from: usize, to: usize) -> Result<Point> {
    Ok(leg(p, from, to)?.normalize())
}

/// Angle in `[0, 2pi)` rotating the bearing toward `j` onto the bearing toward `k`.
pub fn signed_angle(p: &Configuration, t: Triple) -> Result<f64> {
    let a = leg(p, t.apex, t.j)?;
    let b = leg(p, t.apex, t.k)?;
    Ok(wrap_2pi(cross(&a, &b).atan2(a.dot(&b))))
}

/// `|p_k - p_i| / |p_j - p_i|`.
pub fn ratio_of_distance(p: &Configuration, t: Triple) -> Result<f64> {
    let a = leg(p, t.apex, t.j)?;
    let b = leg(p, t.apex, t.k)?;
    Ok(b.norm() / a.norm())
}

/// Stacked SA values (in `ta` order) followed by RoD values (in `td` order).
pub fn rigidity_function(p: &Configuration, ta: &TripleIndexSet, td: &TripleIndexSet) -> Result<DVector<f64>> {
    let mut out = Vec::with_capacity(ta.len() + td.len());
    for &t in &ta.triples {
        out.push(signed_angle(p, t)?);
    }
    for &t in &td.triples {
        out.push(ratio_of_distance(p, t)?);
    }
    Ok(DVector::from_vec(out))
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub triple: Triple,
    pub value: f64,
}

/// Signed angles and ratios of distance keyed by their triples.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct MeasurementSet {
    pub sa: Vec<Measurement>,
    pub rod: Vec<Measurement>,
}

pub fn synthesize_measurements(p: &Configuration, ta: &TripleIndexSet, td: &TripleIndexSet) -> Result<MeasurementSet> {
    let sa = ta
        .triples
        .iter()
        .map(|&t| signed_angle(p, t).map(|value| Measurement { triple: t, value }))
        .collect::<Result<_>>()?;
    let rod = td
        .triples
        .iter()
        .map(|&t| ratio_of_distance(p, t).map(|value| Measurement { triple: t, value }))
        .collect::<Result<_>>()?;
    Ok(MeasurementSet { sa, rod })
}

/// `q = xi + c R(theta) p` with `c > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimilarityTransform {
    pub c: f64,
    pub theta: f64,
    pub xi: [f64; 2],
}

impl SimilarityTransform {
    pub fn identity() -> SimilarityTransform {
        SimilarityTransform { c: 1.0, theta: 0.0, xi: [0.0, 0.0] }
    }

    pub fn apply_point(&self, p: &Point) -> Point {
        Vector2::new(self.xi[0], self.xi[1]) + self.c * (rot(self.theta) * p)
    }

    pub fn apply(&self, p: &Configuration) -> Configuration {
        Configuration::new(p.points.iter().map(|x| self.apply_point(x)).collect())
    }
}

/// Least-squares similarity (positive scale, proper rotation) mapping `p` onto `q`.
/// Returns the transform and the RMS misalignment.
pub fn fit_similarity(p: &Configuration, q: &Configuration) -> Result<(SimilarityTransform, f64)> {
    let n = p.len();
    if n < 2 || q.len() != n {
        return Err(Error::InvalidInput(format!(
            "fit_similarity needs two configurations of equal size >= 2 (got {} and {})",
            n,
            q.len()
        )));
    }
    let pc = p.points.iter().sum::<Point>() / n as f64;
    let qc = q.points.iter().sum::<Point>() / n as f64;
    // complex least squares: q - qc = a (p - pc), a = c e^{i theta}
    let (mut re, mut im, mut norm) = (0.0, 0.0, 0.0);
    for (x, y) in p.points.iter().zip(&q.points) {
        let (u, v) = (x - pc, y - qc);
        re += u.dot(&v);
        im += cross(&u, &v);
        norm += u.norm_squared();
    }
    if norm == 0.0 {
        return Err(Error::Collocated(1, 2));
    }
    let (ar, ai) = (re / norm, im / norm);
    let c = ar.hypot(ai);
    let theta = wrap_2pi(ai.atan2(ar));
    let a = Matrix2::new(ar, -ai, ai, ar);
    let shift = qc - a * pc;
    let t = SimilarityTransform { c, theta, xi: [shift.x, shift.y] };
    let sq: f64 = p
        .points
        .iter()
        .zip(&q.points)
        .map(|(x, y)| (y - (shift + a * x)).norm_squared())
        .sum();
    Ok((t, (sq / n as f64).sqrt()))
}

/// Default RMS tolerance for declaring `q` a similar copy of `p`.
pub const SIMILARITY_TOL: f64 = 1e-8;

pub fn is_similar(p: &Configuration, q: &Configuration, tol: f64) -> Result<bool> {
    Ok(fit_similarity(p, q)?.1 < tol)
}

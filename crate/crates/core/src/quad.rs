//! Global rigidity of four-cycle frameworks, decided case by case from the
//! attribute pattern around the cycle.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::geometry::{cross, Point};

/// Absolute tolerance on the (length-normalized) condition expressions.
pub const QUAD_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum QuadCase {
    /// Three A-vertices.
    ThreeA,
    /// A single A-vertex.
    OneA,
    /// Two adjacent A-vertices.
    AdjacentPair,
    /// Two opposite A-vertices.
    OppositePair,
}

impl QuadCase {
    pub fn number(self) -> u8 {
        match self {
            QuadCase::ThreeA => 1,
            QuadCase::OneA => 2,
            QuadCase::AdjacentPair => 3,
            QuadCase::OppositePair => 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QuadVerdict {
    pub case: QuadCase,
    pub globally_rigid: bool,
    /// Distance of the deciding expression from its threshold, normalized by
    /// the longest edge; verdicts with `margin <= QUAD_TOL` are flagged as boundary.
    pub margin: f64,
    pub boundary: bool,
    /// Input vertex ids (0-based) listed in canonical order 1, 2, 3, 4.
    pub canonical: [usize; 4],
}

/// Cyclic vertex order of a 4-cycle, starting at vertex 0.
pub fn cycle_order(fw: &Framework) -> Result<[usize; 4]> {
    let g = &fw.graph;
    if g.n() != 4 || g.m() != 4 || (0..4).any(|v| g.degree(v) != 2) || !g.is_connected() {
        return Err(Error::NotQuadrilateral(format!("got n = {}, m = {}", g.n(), g.m())));
    }
    let mut order = [0usize; 4];
    order[1] = g.neighbors(0)[0];
    for k in 2..4 {
        let prev = order[k - 2];
        let cur = order[k - 1];
        order[k] = *g.neighbors(cur).iter().find(|&&w| w != prev).unwrap();
    }
    Ok(order)
}

fn rotated(order: &[usize; 4], start: usize) -> [usize; 4] {
    [order[start], order[(start + 1) % 4], order[(start + 2) % 4], order[(start + 3) % 4]]
}

/// |sin| of the angle at `a` spanned by `b` and `c`.
fn abs_sine(a: &Point, b: &Point, c: &Point) -> f64 {
    let (u, v) = (b - a, c - a);
    let den = u.norm() * v.norm();
    if den == 0.0 {
        0.0
    } else {
        cross(&u, &v).abs() / den
    }
}

fn angle_of(v: Point) -> f64 {
    v.y.atan2(v.x)
}

pub fn quad_global_rigidity(fw: &Framework) -> Result<QuadVerdict> {
    let order = cycle_order(fw)?;
    let is_a: Vec<bool> = order.iter().map(|&v| fw.attrs.is_a(v)).collect();
    let count = is_a.iter().filter(|&&a| a).count();
    if count == 0 || count == 4 {
        return Err(Error::Precondition("quadrilateral criteria need both A and D vertices".into()));
    }
    let pos = |c: &[usize; 4]| -> [Point; 4] { c.map(|v| fw.config.points[v]) };
    let dist = |p: &[Point; 4], i: usize, j: usize| (p[j - 1] - p[i - 1]).norm();

    let (case, canonical) = match count {
        3 => (QuadCase::ThreeA, rotated(&order, ((0..4).find(|&k| !is_a[k]).unwrap() + 1) % 4)),
        1 => (QuadCase::OneA, rotated(&order, (0..4).find(|&k| is_a[k]).unwrap())),
        _ => {
            let adj = (0..4).find(|&k| is_a[k] && is_a[(k + 1) % 4]);
            match adj {
                Some(k) => (QuadCase::AdjacentPair, rotated(&order, k)),
                None => (QuadCase::OppositePair, rotated(&order, (0..4).find(|&k| is_a[k]).unwrap())),
            }
        }
    };
    let p = pos(&canonical);
    let len = (1..=4).map(|i| dist(&p, i, i % 4 + 1)).fold(0.0, f64::max);

    let (rigid, margin) = match case {
        QuadCase::ThreeA => {
            let s = abs_sine(&p[0], &p[1], &p[2]);
            (s > QUAD_TOL, s)
        }
        QuadCase::OneA => {
            let collinear = abs_sine(&p[2], &p[1], &p[3]);
            let symmetric = (dist(&p, 1, 4) - dist(&p, 3, 4)).abs().max((dist(&p, 1, 2) - dist(&p, 3, 2)).abs()) / len;
            let margin = collinear.min(symmetric);
            (margin <= QUAD_TOL, margin)
        }
        QuadCase::AdjacentPair => {
            let t12 = angle_of(p[1] - p[0]);
            let t34 = angle_of(p[3] - p[2]);
            let value = (dist(&p, 1, 2) + 2.0 * dist(&p, 3, 4) * (t34 - t12).cos()) / len;
            (value <= 0.0, value.abs())
        }
        QuadCase::OppositePair => {
            let product = (dist(&p, 2, 3) - dist(&p, 1, 2)) * (dist(&p, 3, 4) - dist(&p, 1, 4)) / (len * len);
            let q4 = opposite_pair_discriminant(&p) / len.powi(4);
            if product <= 0.0 {
                (true, product.abs())
            } else {
                (q4.abs() <= QUAD_TOL, product.min(q4.abs()))
            }
        }
    };
    Ok(QuadVerdict { case, globally_rigid: rigid, margin, boundary: margin <= QUAD_TOL, canonical })
}

/// The double-root expression of the opposite-pair case, on canonical positions.
pub fn opposite_pair_discriminant(p: &[Point; 4]) -> f64 {
    let d = |i: usize, j: usize| (p[j - 1] - p[i - 1]).norm();
    let (d12, d23, d34, d14) = (d(1, 2), d(2, 3), d(3, 4), d(1, 4));
    let th124 = angle_of(p[3] - p[0]) - angle_of(p[1] - p[0]);
    let th324 = angle_of(p[3] - p[2]) - angle_of(p[1] - p[2]);
    d12 * d12 * d34 * d34 + d14 * d14 * d23 * d23
        - d14 * d14 * d12 * d12 * th124.sin().powi(2)
        - d34 * d34 * d23 * d23 * th324.sin().powi(2)
        - 2.0 * d12 * d23 * d34 * d14 * th324.cos() * th124.cos()
}

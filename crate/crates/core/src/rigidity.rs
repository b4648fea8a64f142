//! Rigidity matrix assembly, rank and null-space tests, and duality.

use nalgebra::{DMatrix, DVector, Vector2};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::geometry::{perp, Configuration, Point};
use crate::graph::{Graph, Triple, TripleIndexSet, TripleMode};
use crate::linalg::{full_svd, numerical_rank};

/// Jacobian of the rigidity function together with its edge-space factors.
#[derive(Clone, Debug)]
pub struct RigidityMatrix {
    /// `|T| x 2n`, SA rows first.
    pub r: DMatrix<f64>,
    pub sa: TripleIndexSet,
    pub rod: TripleIndexSet,
    /// SA rows acting on stacked edge displacements (`|T_A| x 2m`).
    pub r_bar_a: DMatrix<f64>,
    /// RoD rows acting on stacked edge displacements (`|T_D| x 2m`).
    pub r_bar_d: DMatrix<f64>,
    /// `H kron I2` (`2m x 2n`).
    pub h_bar: DMatrix<f64>,
}

impl RigidityMatrix {
    /// `[R_bar_A; R_bar_D] * H_bar`.
    pub fn factored_product(&self) -> DMatrix<f64> {
        let mut stacked = DMatrix::zeros(self.r_bar_a.nrows() + self.r_bar_d.nrows(), self.h_bar.nrows());
        stacked.rows_mut(0, self.r_bar_a.nrows()).copy_from(&self.r_bar_a);
        stacked.rows_mut(self.r_bar_a.nrows(), self.r_bar_d.nrows()).copy_from(&self.r_bar_d);
        stacked * &self.h_bar
    }
}

struct Legs {
    bj: Point,
    bk: Point,
    dj: f64,
    dk: f64,
}

fn legs(p: &Configuration, t: Triple) -> Result<Legs> {
    let ej = p.points[t.j] - p.points[t.apex];
    let ek = p.points[t.k] - p.points[t.apex];
    let (dj, dk) = (ej.norm(), ek.norm());
    if dj == 0.0 {
        return Err(Error::Collocated(t.apex + 1, t.j + 1));
    }
    if dk == 0.0 {
        return Err(Error::Collocated(t.apex + 1, t.k + 1));
    }
    Ok(Legs { bj: ej / dj, bk: ek / dk, dj, dk })
}

/// Gradients of one SA entry with respect to the leg vectors `p_j - p_i` and `p_k - p_i`.
fn sa_leg_gradients(l: &Legs) -> (Point, Point) {
    (-perp(&l.bj) / l.dj, perp(&l.bk) / l.dk)
}

/// Gradients of one RoD entry with respect to the two leg vectors.
fn rod_leg_gradients(l: &Legs) -> (Point, Point) {
    let kappa = l.dk / l.dj;
    (-kappa * l.bj / l.dj, kappa * l.bk / l.dk)
}

fn put(m: &mut DMatrix<f64>, row: usize, col_block: usize, v: &Vector2<f64>, sign: f64) {
    m[(row, 2 * col_block)] += sign * v.x;
    m[(row, 2 * col_block + 1)] += sign * v.y;
}

/// Rigidity matrix of `(graph, config)` for explicit triple sets.
pub fn rigidity_matrix_for(
    graph: &Graph,
    config: &Configuration,
    sa: &TripleIndexSet,
    rod: &TripleIndexSet,
) -> Result<RigidityMatrix> {
    let (n, m) = (graph.n(), graph.m());
    let rows = sa.len() + rod.len();
    let mut r = DMatrix::zeros(rows, 2 * n);
    let mut r_bar_a = DMatrix::zeros(sa.len(), 2 * m);
    let mut r_bar_d = DMatrix::zeros(rod.len(), 2 * m);

    let all = sa.triples.iter().map(|t| (t, true)).chain(rod.triples.iter().map(|t| (t, false)));
    for (row, (&t, is_sa)) in all.enumerate() {
        let l = legs(config, t)?;
        let (gj, gk) = if is_sa { sa_leg_gradients(&l) } else { rod_leg_gradients(&l) };
        // vertex form: leg_j = p_j - p_i, leg_k = p_k - p_i
        put(&mut r, row, t.j, &gj, 1.0);
        put(&mut r, row, t.k, &gk, 1.0);
        put(&mut r, row, t.apex, &(gj + gk), -1.0);
        // edge form: leg = s * (p_head - p_tail) with s = +1 when the apex is the tail
        let ej = graph.edge_index(t.apex, t.j).ok_or_else(|| missing(t))?;
        let ek = graph.edge_index(t.apex, t.k).ok_or_else(|| missing(t))?;
        let (sj, sk) = (graph.orientation_from(ej, t.apex), graph.orientation_from(ek, t.apex));
        let (bar, brow) = if is_sa { (&mut r_bar_a, row) } else { (&mut r_bar_d, row - sa.len()) };
        put(bar, brow, ej, &gj, sj);
        put(bar, brow, ek, &gk, sk);
    }

    let mut h_bar = DMatrix::zeros(2 * m, 2 * n);
    for (e, &(tail, head)) in graph.edges().iter().enumerate() {
        for c in 0..2 {
            h_bar[(2 * e + c, 2 * tail + c)] = -1.0;
            h_bar[(2 * e + c, 2 * head + c)] = 1.0;
        }
    }
    Ok(RigidityMatrix { r, sa: sa.clone(), rod: rod.clone(), r_bar_a, r_bar_d, h_bar })
}

fn missing(t: Triple) -> Error {
    Error::InvalidInput(format!("triple ({}, {}, {}) uses an edge not in the graph", t.apex + 1, t.j + 1, t.k + 1))
}

pub fn assemble_rigidity_matrix(fw: &Framework, mode: TripleMode) -> Result<RigidityMatrix> {
    let (sa, rod) = fw.triples(mode);
    rigidity_matrix_for(&fw.graph, &fw.config, &sa, &rod)
}

/// The four infinitesimal motions every rigidity matrix annihilates:
/// the two translations, the rotation `(I kron R(pi/2)) p` and the scaling `p`.
pub fn trivial_motions(p: &Configuration) -> [DVector<f64>; 4] {
    let n = p.len();
    let tx = DVector::from_fn(2 * n, |i, _| if i % 2 == 0 { 1.0 } else { 0.0 });
    let ty = DVector::from_fn(2 * n, |i, _| if i % 2 == 1 { 1.0 } else { 0.0 });
    let rotation = DVector::from_iterator(2 * n, p.points.iter().flat_map(|q| [-q.y, q.x]));
    [tx, ty, rotation, p.stacked()]
}

/// Largest `|R v| / (|R| |v|)` over the four trivial motions (Frobenius norm of `R`).
pub fn trivial_motion_residual(r: &DMatrix<f64>, p: &Configuration) -> f64 {
    let rn = r.norm();
    if rn == 0.0 {
        return 0.0;
    }
    trivial_motions(p)
        .iter()
        .map(|v| (r * v).norm() / (rn * v.norm()))
        .fold(0.0, f64::max)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RigidityVerdict {
    InfinitesimallyRigid,
    Flexible,
}

#[derive(Clone, Debug, Serialize)]
pub struct RankReport {
    pub rank: usize,
    pub required: usize,
    pub verdict: RigidityVerdict,
    pub sigma: Vec<f64>,
    pub rtol: f64,
    /// Largest relative residual of the trivial motions under `R`.
    pub trivial_motion_residual: f64,
    #[serde(skip)]
    pub null_space: DMatrix<f64>,
}

pub fn infinitesimal_rigidity_test(fw: &Framework, rtol: f64) -> Result<RankReport> {
    if fw.n() < 3 {
        return Err(Error::InvalidInput(format!("rigidity test needs n >= 3, got {}", fw.n())));
    }
    let rm = assemble_rigidity_matrix(fw, TripleMode::Full)?;
    Ok(rank_report(&rm.r, &fw.config, rtol))
}

pub fn rank_report(r: &DMatrix<f64>, p: &Configuration, rtol: f64) -> RankReport {
    let svd = full_svd(r, rtol);
    let required = 2 * p.len() - 4;
    let verdict = if svd.rank == required {
        RigidityVerdict::InfinitesimallyRigid
    } else {
        RigidityVerdict::Flexible
    };
    RankReport {
        rank: svd.rank,
        required,
        verdict,
        sigma: svd.sigma.clone(),
        rtol,
        trivial_motion_residual: trivial_motion_residual(r, p),
        null_space: svd.null_space(),
    }
}

/// Rank of the full-mode rigidity matrix.
pub fn rigidity_rank(fw: &Framework, rtol: f64) -> Result<usize> {
    Ok(numerical_rank(&assemble_rigidity_matrix(fw, TripleMode::Full)?.r, rtol).0)
}

pub fn is_infinitesimally_rigid(fw: &Framework, rtol: f64) -> Result<bool> {
    Ok(rigidity_rank(fw, rtol)? == 2 * fw.n() - 4)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct DualityReport {
    pub rank: usize,
    pub rank_swapped: usize,
    pub equal: bool,
}

/// Compares ranks before and after exchanging `A` and `D`.
pub fn duality_check(fw: &Framework, rtol: f64) -> Result<DualityReport> {
    let rank = rigidity_rank(fw, rtol)?;
    let rank_swapped = rigidity_rank(&fw.swapped(), rtol)?;
    Ok(DualityReport { rank, rank_swapped, equal: rank == rank_swapped })
}

/// Minimum edge count of an infinitesimally rigid framework on `n` vertices.
pub fn min_edges_for_rigidity(n: usize) -> usize {
    (3 * n).saturating_sub(4).div_ceil(2)
}


//! Sensor network localization from signed angles and ratios of distance.
//!
//! Positions are recovered through the edge form of the problem: first the
//! bearings `b_e` and lengths `d_e` of every edge of the anchor-augmented graph,
//! then positions by telescoping along a spanning tree from an anchor.
//! Measurements are propagated over the SA and RoD triple index graphs; each
//! component either gets pinned by an anchor edge or contributes free
//! parameters, and the remaining unknowns are found by one of three solvers.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::geometry::{
    rot, signed_angle, synthesize_measurements, wrap_pi, Configuration, Measurement, MeasurementSet, Point,
};
use crate::graph::{
    augment_anchor_clique, default_tree, enumerate_triples, triple_index_graph_components, Attr, Bipartition,
    CycleBasis, EdgeComponents, Graph, PathMatrix, SpanningTree, Triple, TripleIndexSet, TripleMode,
};
use crate::linalg::{full_svd, lstsq, DEFAULT_RTOL};
use crate::lm::{levenberg_marquardt, LmOptions};
use crate::oracle::start_seed;

/// Mismatch tolerance when measurements are composed around index-graph cycles.
pub const CONSISTENCY_TOL: f64 = 1e-8;
/// Anchor reproduction error above which recovery reports gauge drift.
pub const GAUGE_DRIFT_TOL: f64 = 1e-6;
/// Rounds after which a single converged start ends the multi-start search.
pub const CONFIRM_ROUNDS: usize = 10;
/// Lower bound used by the distance positivity penalty.
pub const POSITIVITY_EPS: f64 = 1e-6;

/// Known bearing (tail to head) and length of an anchor-anchor edge.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AnchorEdge {
    pub edge: usize,
    pub bearing: Point,
    pub distance: f64,
}

/// A localization instance on the anchor-augmented graph.
#[derive(Clone, Debug)]
pub struct SensorNetwork {
    pub graph: Graph,
    pub attrs: Bipartition,
    /// Ground-truth positions; only anchor entries are read by the solvers.
    pub truth: Configuration,
    /// Sorted, 0-based.
    pub anchors: Vec<usize>,
    /// Number of anchor-anchor edges appended to the input graph.
    pub added_edges: usize,
    pub sa: TripleIndexSet,
    pub rod: TripleIndexSet,
    pub measurements: MeasurementSet,
    pub anchor_edges: Vec<AnchorEdge>,
    pub cycles: CycleBasis,
    pub warnings: Vec<String>,
}

/// Builds a network with measurements synthesized exactly from `fw.config`.
pub fn build_network(fw: &Framework, anchors: &[usize]) -> Result<SensorNetwork> {
    build_network_inner(fw, anchors, None)
}

/// Builds a network from externally supplied measurements, which must cover
/// every triple of the augmented graph.
pub fn build_network_with_measurements(fw: &Framework, anchors: &[usize], ms: &MeasurementSet) -> Result<SensorNetwork> {
    build_network_inner(fw, anchors, Some(ms))
}

fn build_network_inner(fw: &Framework, anchors: &[usize], given: Option<&MeasurementSet>) -> Result<SensorNetwork> {
    let mut sorted = anchors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if let Some(&v) = sorted.iter().find(|&&v| v >= fw.n()) {
        return Err(Error::InvalidInput(format!("anchor {} does not exist", v + 1)));
    }
    let graph = augment_anchor_clique(&fw.graph, &sorted)?;
    let cycles = CycleBasis::from_tree(&graph, default_tree(&graph)?);
    let (sa, rod) = enumerate_triples(&graph, &fw.attrs, TripleMode::Full);
    let measurements = match given {
        None => synthesize_measurements(&fw.config, &sa, &rod)?,
        Some(ms) => align_measurements(ms, &sa, &rod)?,
    };
    let mut anchor_edges = Vec::new();
    for (a, &u) in sorted.iter().enumerate() {
        for &v in &sorted[a + 1..] {
            let e = graph.edge_index(u, v).expect("anchor clique edge");
            let diff = fw.config.points[graph.head(e)] - fw.config.points[graph.tail(e)];
            anchor_edges.push(AnchorEdge { edge: e, bearing: diff.normalize(), distance: diff.norm() });
        }
    }
    anchor_edges.sort_by_key(|a| a.edge);
    let mut warnings = Vec::new();
    let has_a = sorted.iter().any(|&v| fw.attrs.is_a(v));
    let has_d = sorted.iter().any(|&v| fw.attrs.is_d(v));
    if !(has_a && has_d) {
        warnings.push("anchors carry a single attribute class; localizability then relies on global rigidity alone".into());
    }
    Ok(SensorNetwork {
        added_edges: graph.m() - fw.m(),
        graph,
        attrs: fw.attrs.clone(),
        truth: fw.config.clone(),
        anchors: sorted,
        sa,
        rod,
        measurements,
        anchor_edges,
        cycles,
        warnings,
    })
}

fn align_measurements(ms: &MeasurementSet, sa: &TripleIndexSet, rod: &TripleIndexSet) -> Result<MeasurementSet> {
    let pick = |list: &[Measurement], want: &TripleIndexSet, what: &str| -> Result<Vec<Measurement>> {
        want.triples
            .iter()
            .map(|t| {
                list.iter().find(|m| m.triple == *t).copied().ok_or_else(|| {
                    Error::InvalidInput(format!("missing {what} measurement for triple ({}, {}, {})", t.apex + 1, t.j + 1, t.k + 1))
                })
            })
            .collect()
    };
    Ok(MeasurementSet { sa: pick(&ms.sa, sa, "SA")?, rod: pick(&ms.rod, rod, "RoD")? })
}

impl SensorNetwork {
    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn m(&self) -> usize {
        self.graph.m()
    }

    pub fn free_vertices(&self) -> Vec<usize> {
        (0..self.n()).filter(|v| self.anchors.binary_search(v).is_err()).collect()
    }

    /// The augmented framework at the ground-truth positions.
    pub fn framework(&self) -> Framework {
        Framework { graph: self.graph.clone(), attrs: self.attrs.clone(), config: self.truth.clone() }
    }

    /// Ground-truth edge lengths and bearings, for evaluation only.
    pub fn true_edges(&self) -> (Vec<f64>, Vec<Point>) {
        self.graph
            .edges()
            .iter()
            .map(|&(t, h)| {
                let v = self.truth.points[h] - self.truth.points[t];
                (v.norm(), v.normalize())
            })
            .unzip()
    }

    fn edge_of(&self, a: usize, b: usize) -> usize {
        self.graph.edge_index(a, b).expect("triple edge")
    }

    /// `(e_ij, e_ik, rotation)` with `b_{e_ik} = R(rotation) b_{e_ij}` for an SA triple.
    fn sa_link(&self, t: Triple, theta: f64) -> (usize, usize, f64) {
        let (ej, ek) = (self.edge_of(t.apex, t.j), self.edge_of(t.apex, t.k));
        let flip = self.graph.orientation_from(ej, t.apex) != self.graph.orientation_from(ek, t.apex);
        (ej, ek, theta + if flip { std::f64::consts::PI } else { 0.0 })
    }
}

/// Affine bearing parameterization `b = b0 + B w` over the SA index-graph components.
#[derive(Clone, Debug)]
pub struct BearingParam {
    pub components: EdgeComponents,
    /// `b_e = R(phase_e) r_c` for the reference vector `r_c` of the component of `e`.
    pub phase: Vec<f64>,
    pub reference: Vec<Option<Point>>,
    /// Components left unresolved by the anchors, each owning two parameters.
    pub free: Vec<usize>,
}

/// Affine distance parameterization `d = d0 + D y` over the RoD index-graph components.
#[derive(Clone, Debug)]
pub struct DistanceParam {
    pub components: EdgeComponents,
    /// `d_e = exp(log_scale_e) s_c` for the reference length `s_c`.
    pub log_scale: Vec<f64>,
    pub reference: Vec<Option<f64>>,
    pub free: Vec<usize>,
}

impl BearingParam {
    pub fn dim(&self) -> usize {
        2 * self.free.len()
    }

    pub fn is_resolved(&self) -> bool {
        self.free.is_empty()
    }

    /// `b0`: resolved components at their values, free ones at zero.
    pub fn base(&self) -> DVector<f64> {
        let mut b = DVector::zeros(2 * self.phase.len());
        for (e, &phi) in self.phase.iter().enumerate() {
            if let Some(r) = self.reference[self.components.label[e]] {
                let v = rot(phi) * r;
                b[2 * e] = v.x;
                b[2 * e + 1] = v.y;
            }
        }
        b
    }

    /// `B` (`2m x dim`).
    pub fn basis(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(2 * self.phase.len(), self.dim());
        for (slot, &c) in self.free.iter().enumerate() {
            for e in self.components.members(c) {
                m.view_mut((2 * e, 2 * slot), (2, 2)).copy_from(&rot(self.phase[e]));
            }
        }
        m
    }

    pub fn eval(&self, w: &DVector<f64>) -> DVector<f64> {
        self.base() + self.basis() * w
    }

    /// Full bearing vector when every component is resolved.
    pub fn bearings(&self) -> Option<Vec<Point>> {
        self.is_resolved().then(|| unstack(&self.base()))
    }

    /// Parameters reproducing the bearings `b`, assuming they respect the propagated rotations.
    pub fn coordinates_of(&self, b: &[Point]) -> DVector<f64> {
        let mut w = DVector::zeros(self.dim());
        for (slot, &c) in self.free.iter().enumerate() {
            let e = self.components.members(c)[0];
            let r = rot(-self.phase[e]) * b[e];
            w[2 * slot] = r.x;
            w[2 * slot + 1] = r.y;
        }
        w
    }
}

impl DistanceParam {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    pub fn is_resolved(&self) -> bool {
        self.free.is_empty()
    }

    pub fn base(&self) -> DVector<f64> {
        DVector::from_iterator(
            self.log_scale.len(),
            self.log_scale
                .iter()
                .enumerate()
                .map(|(e, &l)| self.reference[self.components.label[e]].map_or(0.0, |s| l.exp() * s)),
        )
    }

    pub fn basis(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.log_scale.len(), self.dim());
        for (slot, &c) in self.free.iter().enumerate() {
            for e in self.components.members(c) {
                m[(e, slot)] = self.log_scale[e].exp();
            }
        }
        m
    }

    pub fn eval(&self, y: &DVector<f64>) -> DVector<f64> {
        self.base() + self.basis() * y
    }

    pub fn distances(&self) -> Option<Vec<f64>> {
        self.is_resolved().then(|| self.base().iter().copied().collect())
    }

    pub fn coordinates_of(&self, d: &[f64]) -> DVector<f64> {
        DVector::from_iterator(
            self.dim(),
            self.free.iter().map(|&c| {
                let e = self.components.members(c)[0];
                d[e] / self.log_scale[e].exp()
            }),
        )
    }
}

/// Breadth-first composition of per-triple offsets: returns `offset_e` with
/// `offset_k - offset_j = delta` on every link, zero at each component root.
/// `mismatch(found, expected)` measures inconsistency around index-graph cycles.
fn compose_offsets(
    m: usize,
    links: &[(usize, usize, f64)],
    mismatch: impl Fn(f64, f64) -> f64,
) -> std::result::Result<Vec<f64>, (usize, f64)> {
    let mut adj: Vec<Vec<(usize, f64, usize)>> = vec![Vec::new(); m];
    for (t, &(a, b, delta)) in links.iter().enumerate() {
        adj[a].push((b, delta, t));
        adj[b].push((a, -delta, t));
    }
    let mut offset: Vec<Option<f64>> = vec![None; m];
    for root in 0..m {
        if offset[root].is_some() {
            continue;
        }
        offset[root] = Some(0.0);
        let mut queue = std::collections::VecDeque::from([root]);
        while let Some(u) = queue.pop_front() {
            let ou = offset[u].unwrap();
            for &(v, delta, t) in &adj[u] {
                match offset[v] {
                    None => {
                        offset[v] = Some(ou + delta);
                        queue.push_back(v);
                    }
                    Some(ov) => {
                        let err = mismatch(ov - ou, delta);
                        if err > CONSISTENCY_TOL {
                            return Err((t, err));
                        }
                    }
                }
            }
        }
    }
    Ok(offset.into_iter().map(Option::unwrap).collect())
}

/// Propagates bearings through the SA index graph and pins components
/// containing anchor edges.
pub fn propagate_bearings(net: &SensorNetwork) -> Result<BearingParam> {
    let links: Vec<(usize, usize, f64)> =
        net.measurements.sa.iter().map(|ms| net.sa_link(ms.triple, ms.value)).collect();
    let phase = compose_offsets(net.m(), &links, |found, want| wrap_pi(found - want).abs()).map_err(|(t, err)| {
        let tr = net.measurements.sa[t].triple;
        Error::InfeasibleSa(format!(
            "rotation mismatch {err:.3e} closing through triple ({}, {}, {})",
            tr.apex + 1,
            tr.j + 1,
            tr.k + 1
        ))
    })?;
    let components = triple_index_graph_components(&net.sa, &net.graph);
    let mut reference: Vec<Option<Point>> = vec![None; components.count];
    for a in &net.anchor_edges {
        let c = components.label[a.edge];
        let r = rot(-phase[a.edge]) * a.bearing;
        match reference[c] {
            None => reference[c] = Some(r),
            Some(prev) if (prev - r).norm() > CONSISTENCY_TOL => {
                return Err(Error::InfeasibleSa(format!(
                    "anchor bearings disagree with measured angles (mismatch {:.3e})",
                    (prev - r).norm()
                )))
            }
            _ => {}
        }
    }
    let free = (0..components.count).filter(|&c| reference[c].is_none()).collect();
    Ok(BearingParam { components, phase, reference, free })
}

/// Propagates length ratios through the RoD index graph and pins components
/// containing anchor edges.
pub fn propagate_distances(net: &SensorNetwork) -> Result<DistanceParam> {
    let mut links = Vec::with_capacity(net.measurements.rod.len());
    for ms in &net.measurements.rod {
        let t = ms.triple;
        if !(ms.value.is_finite() && ms.value > 0.0) {
            return Err(Error::InfeasibleRod(format!(
                "non-positive ratio {} at triple ({}, {}, {})",
                ms.value,
                t.apex + 1,
                t.j + 1,
                t.k + 1
            )));
        }
        links.push((net.edge_of(t.apex, t.j), net.edge_of(t.apex, t.k), ms.value.ln()));
    }
    let log_scale = compose_offsets(net.m(), &links, |found, want| (found - want).abs()).map_err(|(t, err)| {
        let tr = net.measurements.rod[t].triple;
        Error::InfeasibleRod(format!(
            "ratio mismatch {err:.3e} closing through triple ({}, {}, {})",
            tr.apex + 1,
            tr.j + 1,
            tr.k + 1
        ))
    })?;
    let components = triple_index_graph_components(&net.rod, &net.graph);
    let mut reference: Vec<Option<f64>> = vec![None; components.count];
    for a in &net.anchor_edges {
        let c = components.label[a.edge];
        let s = a.distance / log_scale[a.edge].exp();
        match reference[c] {
            None => reference[c] = Some(s),
            Some(prev) if (prev - s).abs() > CONSISTENCY_TOL * prev.abs() => {
                return Err(Error::InfeasibleRod(format!(
                    "anchor distances disagree with measured ratios (relative mismatch {:.3e})",
                    (prev - s).abs() / prev.abs()
                )))
            }
            _ => {}
        }
    }
    let free = (0..components.count).filter(|&c| reference[c].is_none()).collect();
    Ok(DistanceParam { components, log_scale, reference, free })
}

fn unstack(v: &DVector<f64>) -> Vec<Point> {
    (0..v.len() / 2).map(|e| Point::new(v[2 * e], v[2 * e + 1])).collect()
}

fn stack(b: &[Point]) -> DVector<f64> {
    DVector::from_iterator(2 * b.len(), b.iter().flat_map(|p| [p.x, p.y]))
}

/// `C_b`: column `e` is `C(:, e) kron b_e`, so that `C_b d` sums signed edge
/// displacements around each fundamental cycle.
pub fn cycle_bearing_matrix(cycles: &CycleBasis, b: &[Point]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * cycles.len(), b.len());
    for (c, row) in cycles.rows.iter().enumerate() {
        for (e, &s) in row.iter().enumerate() {
            if s != 0 {
                out[(2 * c, e)] = s as f64 * b[e].x;
                out[(2 * c + 1, e)] = s as f64 * b[e].y;
            }
        }
    }
    out
}

/// `C_{B,1}(d) = (C with columns scaled by d) kron I2`, acting on stacked bearings.
pub fn cycle_distance_matrix(cycles: &CycleBasis, d: &[f64]) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(2 * cycles.len(), 2 * d.len());
    for (c, row) in cycles.rows.iter().enumerate() {
        for (e, &s) in row.iter().enumerate() {
            if s != 0 {
                out[(2 * c, 2 * e)] = s as f64 * d[e];
                out[(2 * c + 1, 2 * e + 1)] = s as f64 * d[e];
            }
        }
    }
    out
}

/// A linear system with its SVD-derived rank, least-squares solution and null space.
#[derive(Clone, Debug)]
pub struct LinearSystem {
    pub matrix: DMatrix<f64>,
    pub rhs: DVector<f64>,
    pub rank: usize,
    pub sigma: Vec<f64>,
    /// Minimum-norm least-squares solution.
    pub solution: DVector<f64>,
    /// Orthonormal null-space basis (columns).
    pub null_space: DMatrix<f64>,
}

impl LinearSystem {
    fn solve(matrix: DMatrix<f64>, rhs: DVector<f64>, rtol: f64) -> LinearSystem {
        let svd = full_svd(&matrix, rtol);
        let solution = svd.pinv_solve(&rhs);
        LinearSystem { rank: svd.rank, sigma: svd.sigma.clone(), null_space: svd.null_space(), solution, matrix, rhs }
    }

    pub fn rows(&self) -> usize {
        self.matrix.nrows()
    }

    pub fn null_dim(&self) -> usize {
        self.null_space.ncols()
    }

    pub fn residual(&self, x: &DVector<f64>) -> f64 {
        (&self.matrix * x - &self.rhs).norm()
    }
}

/// `C_D d = y` for given bearings: cycle rows, RoD rows `d_ik - kappa d_ij = 0`,
/// then one row `d_e = d*` per anchor pair.
pub fn c_d_system(net: &SensorNetwork, b: &[Point], rtol: f64) -> LinearSystem {
    let m = net.m();
    let cb = cycle_bearing_matrix(&net.cycles, b);
    let rows = cb.nrows() + net.measurements.rod.len() + net.anchor_edges.len();
    let mut a = DMatrix::zeros(rows, m);
    let mut y = DVector::zeros(rows);
    a.rows_mut(0, cb.nrows()).copy_from(&cb);
    let mut r = cb.nrows();
    for ms in &net.measurements.rod {
        let t = ms.triple;
        a[(r, net.edge_of(t.apex, t.j))] = -ms.value;
        a[(r, net.edge_of(t.apex, t.k))] = 1.0;
        r += 1;
    }
    for ae in &net.anchor_edges {
        a[(r, ae.edge)] = 1.0;
        y[r] = ae.distance;
        r += 1;
    }
    LinearSystem::solve(a, y, rtol)
}

/// `C_D` from propagated bearings; requires every SA component to be resolved.
pub fn assemble_c_d(net: &SensorNetwork, bearings: &BearingParam, rtol: f64) -> Result<LinearSystem> {
    let b = bearings.bearings().ok_or(Error::BearingsUnresolved)?;
    Ok(c_d_system(net, &b, rtol))
}

/// `C_B b = z` for given distances: cycle rows `C_{B,1}`, SA rows
/// `b_{e_ik} - R(theta) b_{e_ij} = 0`, then `b_e = b*` per anchor pair.
pub fn c_b_system(net: &SensorNetwork, d: &[f64], rtol: f64) -> LinearSystem {
    let m = net.m();
    let c1 = cycle_distance_matrix(&net.cycles, d);
    let rows = c1.nrows() + 2 * net.measurements.sa.len() + 2 * net.anchor_edges.len();
    let mut a = DMatrix::zeros(rows, 2 * m);
    let mut z = DVector::zeros(rows);
    a.rows_mut(0, c1.nrows()).copy_from(&c1);
    let mut r = c1.nrows();
    for ms in &net.measurements.sa {
        let (ej, ek, alpha) = net.sa_link(ms.triple, ms.value);
        a.view_mut((r, 2 * ek), (2, 2)).copy_from(&DMatrix::identity(2, 2));
        a.view_mut((r, 2 * ej), (2, 2)).copy_from(&(-rot(alpha)));
        r += 2;
    }
    for ae in &net.anchor_edges {
        a[(r, 2 * ae.edge)] = 1.0;
        a[(r + 1, 2 * ae.edge + 1)] = 1.0;
        z[r] = ae.bearing.x;
        z[r + 1] = ae.bearing.y;
        r += 2;
    }
    LinearSystem::solve(a, z, rtol)
}

/// `C_B` from propagated distances; requires every RoD component to be resolved.
pub fn assemble_c_b(net: &SensorNetwork, distances: &DistanceParam, rtol: f64) -> Result<LinearSystem> {
    let d = distances.distances().ok_or(Error::DistancesUnresolved)?;
    Ok(c_b_system(net, &d, rtol))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    /// Bearings by propagation, distances by the linear `C_D` system.
    Sa,
    /// Distances by propagation, bearings by the `C_B` system plus unit-norm constraints.
    Rod,
    /// Joint nonlinear solve over both parameterizations.
    General,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MethodChoice {
    Auto,
    Fixed(Method),
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::Sa => "sa",
            Method::Rod => "rod",
            Method::General => "general",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MethodChoice {
    type Err = Error;

    fn from_str(s: &str) -> Result<MethodChoice> {
        Ok(match s.to_ascii_lowercase().as_str() {
            "auto" => MethodChoice::Auto,
            "sa" => MethodChoice::Fixed(Method::Sa),
            "rod" => MethodChoice::Fixed(Method::Rod),
            "general" => MethodChoice::Fixed(Method::General),
            _ => return Err(Error::InvalidInput(format!("unknown method '{s}' (auto, sa, rod, general)"))),
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Verdict {
    Localizable,
    Unlocalizable,
    HeuristicUnique,
    HeuristicAmbiguous,
}

impl Verdict {
    pub fn name(self) -> &'static str {
        match self {
            Verdict::Localizable => "localizable",
            Verdict::Unlocalizable => "unlocalizable",
            Verdict::HeuristicUnique => "heuristic-unique",
            Verdict::HeuristicAmbiguous => "heuristic-ambiguous",
        }
    }

    /// Whether the solution is accepted as the unique one.
    pub fn is_unique(self) -> bool {
        matches!(self, Verdict::Localizable | Verdict::HeuristicUnique)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Multi-start solver settings.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct SolverConfig {
    pub seed: u64,
    /// Starts per round; rounds repeat until some start converges.
    pub starts: usize,
    /// Rounds continue until this many starts converge (or `max_starts`).
    pub min_converged: usize,
    /// Upper bound on the total number of starts.
    pub max_starts: usize,
    pub rtol: f64,
    /// A start converges when its squared residual norm drops below this value.
    pub accept_tol: f64,
    /// Converged parameter vectors closer than this (relative) share a cluster.
    pub cluster_tol: f64,
    /// Half-width of the Latin-hypercube box for null-space coefficients.
    pub box_half_width: f64,
    pub max_iter: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig {
            seed: 0,
            starts: 20,
            min_converged: 5,
            max_starts: 1000,
            rtol: DEFAULT_RTOL,
            accept_tol: 1e-16,
            cluster_tol: 1e-6,
            box_half_width: 2.0,
            max_iter: 500,
        }
    }
}

/// Ranks, component counts and parameter dimensions backing a verdict.
#[derive(Clone, Debug, Default, Serialize)]
pub struct Evidence {
    pub c_a: usize,
    pub c_d: usize,
    /// Free bearing parameters, `2 (c_A - 1)` with two anchors.
    pub dim_bearing: usize,
    /// Free distance parameters, `c_D - 1` with two anchors.
    pub dim_distance: usize,
    pub rank_cd: Option<usize>,
    pub rows_cd: Option<usize>,
    pub rank_cb: Option<usize>,
    pub rows_cb: Option<usize>,
    pub null_cb: Option<usize>,
    /// Unknowns of the nonlinear stage (0 for purely linear solves).
    pub variables: usize,
    /// Null dimension of the cycle equations when they are affine in the joint
    /// parameters (no edge with both bearing and length unknown).
    pub lifted_null: Option<usize>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SolveMeta {
    pub method: Method,
    pub verdict: Verdict,
    pub evidence: Evidence,
    pub iterations: usize,
    pub starts: usize,
    pub converged: usize,
    pub clusters: usize,
    /// Squared residual norm of the nonlinear stage at the returned solution.
    pub cost: f64,
    /// Some solved distance is not positive.
    pub infeasible: bool,
}

#[derive(Clone, Debug)]
pub struct EdgeSolution {
    pub d: Vec<f64>,
    pub b: Vec<Point>,
    /// `| |b_e| - 1 |` per edge.
    pub unit_residual: Vec<f64>,
    /// `|C_b d|` over the cycle basis.
    pub cycle_residual: f64,
    pub meta: SolveMeta,
}

impl EdgeSolution {
    fn new(net: &SensorNetwork, d: Vec<f64>, b: Vec<Point>, meta: SolveMeta) -> EdgeSolution {
        let unit_residual = b.iter().map(|v| (v.norm() - 1.0).abs()).collect();
        let cycle_residual = (cycle_bearing_matrix(&net.cycles, &b) * DVector::from_column_slice(&d)).norm();
        let mut meta = meta;
        meta.infeasible = d.iter().any(|&x| x <= 0.0);
        EdgeSolution { d, b, unit_residual, cycle_residual, meta }
    }
}

fn base_evidence(bp: &BearingParam, dp: &DistanceParam) -> Evidence {
    Evidence {
        c_a: bp.components.count,
        c_d: dp.components.count,
        dim_bearing: bp.dim(),
        dim_distance: dp.dim(),
        ..Evidence::default()
    }
}

/// Bearings by propagation, distances from `C_D d = y`. Localizable iff `rank(C_D) = m`.
pub fn solve_sa_connected(net: &SensorNetwork, cfg: &SolverConfig) -> Result<EdgeSolution> {
    let bp = propagate_bearings(net)?;
    let dp = propagate_distances(net)?;
    let b = bp.bearings().ok_or_else(|| {
        Error::MethodPrecondition(format!(
            "SA index graph over the augmented graph is not connected to the anchors (c_A = {}, {} unresolved)",
            bp.components.count,
            bp.free.len()
        ))
    })?;
    let sys = c_d_system(net, &b, cfg.rtol);
    let mut ev = base_evidence(&bp, &dp);
    ev.rank_cd = Some(sys.rank);
    ev.rows_cd = Some(sys.rows());
    let verdict = if sys.rank == net.m() { Verdict::Localizable } else { Verdict::Unlocalizable };
    let d: Vec<f64> = sys.solution.iter().copied().collect();
    let cost = sys.residual(&sys.solution).powi(2);
    let meta = SolveMeta {
        method: Method::Sa,
        verdict,
        evidence: ev,
        iterations: 0,
        starts: 0,
        converged: 1,
        clusters: 1,
        cost,
        infeasible: false,
    };
    Ok(EdgeSolution::new(net, d, b, meta))
}

/// Latin-hypercube sample of `starts` points in `[-half, half]^dim`.
fn latin_hypercube(starts: usize, dim: usize, half: f64, rng: &mut impl Rng) -> Vec<DVector<f64>> {
    let mut pts = vec![DVector::zeros(dim); starts];
    for k in 0..dim {
        let mut strata: Vec<usize> = (0..starts).collect();
        strata.shuffle(rng);
        for (s, p) in pts.iter_mut().enumerate() {
            let u: f64 = rng.gen();
            p[k] = -half + 2.0 * half * (strata[s] as f64 + u) / starts as f64;
        }
    }
    pts
}

struct Run {
    x: DVector<f64>,
    cost: f64,
    iterations: usize,
}

/// Runs rounds of `cfg.starts` starts in parallel until `cfg.min_converged`
/// of them converge (or at least one has after `CONFIRM_ROUNDS` rounds), or
/// `cfg.max_starts` is reached. `run(index, round_sample)`
/// receives the global start index and its Latin-hypercube point (empty when
/// `dim` is zero). Results are ordered by start index, independent of threads.
fn multi_start(cfg: &SolverConfig, dim: usize, run: impl Fn(usize, DVector<f64>) -> Run + Sync) -> Vec<Run> {
    let per_round = cfg.starts.max(1);
    let mut runs: Vec<Run> = Vec::new();
    let mut round = 0u64;
    while runs.len() < cfg.max_starts.max(per_round) {
        let mut rng = ChaCha8Rng::seed_from_u64(start_seed(cfg.seed, round));
        let samples = latin_hypercube(per_round, dim, cfg.box_half_width, &mut rng);
        let offset = runs.len();
        let batch: Vec<Run> = samples.into_par_iter().enumerate().map(|(i, v)| run(offset + i, v)).collect();
        runs.extend(batch);
        let converged = runs.iter().filter(|r| r.cost < cfg.accept_tol).count();
        if converged >= cfg.min_converged.max(1) || (converged > 0 && runs.len() >= CONFIRM_ROUNDS * per_round) {
            break;
        }
        round += 1;
    }
    runs
}

/// Groups converged runs; returns (best run index, number of clusters, converged count).
fn cluster_runs(runs: &[Run], cfg: &SolverConfig, scale: impl Fn(&DVector<f64>) -> DVector<f64>) -> Option<(usize, usize, usize)> {
    let ok: Vec<usize> = (0..runs.len()).filter(|&i| runs[i].cost < cfg.accept_tol).collect();
    if ok.is_empty() {
        return None;
    }
    let mut reps: Vec<DVector<f64>> = Vec::new();
    for &i in &ok {
        let v = scale(&runs[i].x);
        let tol = cfg.cluster_tol * v.norm().max(1.0);
        if !reps.iter().any(|r| (r - &v).norm() < tol) {
            reps.push(v);
        }
    }
    let best = *ok.iter().min_by(|&&a, &&b| runs[a].cost.total_cmp(&runs[b].cost)).unwrap();
    Some((best, reps.len(), ok.len()))
}

/// Unit-norm residuals `|b_e|^2 - 1` of `b0 + N w` and their Jacobian.
pub fn h_residual(b0: &DVector<f64>, null: &DMatrix<f64>, w: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let b = b0 + null * w;
    let m = b.len() / 2;
    let mut r = DVector::zeros(m);
    let mut j = DMatrix::zeros(m, w.len());
    for e in 0..m {
        let (x, y) = (b[2 * e], b[2 * e + 1]);
        r[e] = x * x + y * y - 1.0;
        for k in 0..w.len() {
            j[(e, k)] = 2.0 * (x * null[(2 * e, k)] + y * null[(2 * e + 1, k)]);
        }
    }
    (r, j)
}

/// `H(w)`: sum of squared unit-norm residuals.
pub fn h_objective(b0: &DVector<f64>, null: &DMatrix<f64>, w: &DVector<f64>) -> f64 {
    h_residual(b0, null, w).0.norm_squared()
}

/// Distances by propagation, bearings from `C_B b = z`; a nontrivial null space
/// is resolved by the unit-norm constraints from multiple starts.
pub fn solve_rod_connected(net: &SensorNetwork, cfg: &SolverConfig) -> Result<EdgeSolution> {
    let bp = propagate_bearings(net)?;
    let dp = propagate_distances(net)?;
    let d = dp.distances().ok_or_else(|| {
        Error::MethodPrecondition(format!(
            "RoD index graph over the augmented graph is not connected to the anchors (c_D = {}, {} unresolved)",
            dp.components.count,
            dp.free.len()
        ))
    })?;
    let sys = c_b_system(net, &d, cfg.rtol);
    let mut ev = base_evidence(&bp, &dp);
    ev.rank_cb = Some(sys.rank);
    ev.rows_cb = Some(sys.rows());
    ev.null_cb = Some(sys.null_dim());
    ev.variables = sys.null_dim();
    let b0 = sys.solution.clone();
    let null = sys.null_space.clone();
    if null.ncols() == 0 {
        let cost = h_objective(&b0, &null, &DVector::zeros(0));
        let meta = SolveMeta {
            method: Method::Rod,
            verdict: Verdict::Localizable,
            evidence: ev,
            iterations: 0,
            starts: 0,
            converged: 1,
            clusters: 1,
            cost,
            infeasible: false,
        };
        return Ok(EdgeSolution::new(net, d, unstack(&b0), meta));
    }
    let opts = LmOptions { max_iter: cfg.max_iter, cost_tol: cfg.accept_tol * 1e-6, ..LmOptions::default() };
    let runs = multi_start(cfg, null.ncols(), |_, w0| {
        let res = levenberg_marquardt(w0, |w| h_residual(&b0, &null, w), &opts);
        Run { x: res.x, cost: res.cost, iterations: res.iterations }
    });
    let (best, clusters, converged) = cluster_runs(&runs, cfg, |w| w.clone()).ok_or_else(|| {
        let c = runs.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
        Error::SolverFailed(format!("no start reached H < {:.0e} (best {c:.3e})", cfg.accept_tol))
    })?;
    let b = unstack(&(&b0 + &null * &runs[best].x));
    let meta = SolveMeta {
        method: Method::Rod,
        verdict: if clusters == 1 { Verdict::HeuristicUnique } else { Verdict::HeuristicAmbiguous },
        evidence: ev,
        iterations: runs[best].iterations,
        starts: runs.len(),
        converged,
        clusters,
        cost: runs[best].cost,
        infeasible: false,
    };
    Ok(EdgeSolution::new(net, d, b, meta))
}

/// The joint problem in `(w, y)`: bearings `b(w) = b0 + B w`, distances
/// `d(y) = d0 + D y`, residuals `[C_{B,1}(d) b; |b_e|^2 - 1; max(0, eps - d_e)]`.
pub struct GeneralProblem<'a> {
    pub net: &'a SensorNetwork,
    pub bearings: BearingParam,
    pub distances: DistanceParam,
    b0: DVector<f64>,
    bb: DMatrix<f64>,
    d0: DVector<f64>,
    dd: DMatrix<f64>,
}

impl<'a> GeneralProblem<'a> {
    pub fn new(net: &'a SensorNetwork) -> Result<GeneralProblem<'a>> {
        let bearings = propagate_bearings(net)?;
        let distances = propagate_distances(net)?;
        Ok(GeneralProblem {
            b0: bearings.base(),
            bb: bearings.basis(),
            d0: distances.base(),
            dd: distances.basis(),
            net,
            bearings,
            distances,
        })
    }

    pub fn nw(&self) -> usize {
        self.bb.ncols()
    }

    pub fn ny(&self) -> usize {
        self.dd.ncols()
    }

    /// Total unknowns, `2 c_A + c_D - 3` with two anchors.
    pub fn variables(&self) -> usize {
        self.nw() + self.ny()
    }

    fn split(&self, x: &DVector<f64>) -> (DVector<f64>, DVector<f64>) {
        (x.rows(0, self.nw()).into_owned(), x.rows(self.nw(), self.ny()).into_owned())
    }

    pub fn edges_at(&self, x: &DVector<f64>) -> (Vec<f64>, Vec<Point>) {
        let (w, y) = self.split(x);
        let b = &self.b0 + &self.bb * w;
        let d = &self.d0 + &self.dd * y;
        (d.iter().copied().collect(), unstack(&b))
    }

    /// Parameters of the ground-truth edge vectors.
    pub fn truth_coordinates(&self) -> DVector<f64> {
        let (d, b) = self.net.true_edges();
        let w = self.bearings.coordinates_of(&b);
        let y = self.distances.coordinates_of(&d);
        DVector::from_iterator(self.variables(), w.iter().chain(y.iter()).copied())
    }

    pub fn residual(&self, x: &DVector<f64>) -> (DVector<f64>, DMatrix<f64>) {
        let (w, y) = self.split(x);
        let m = self.net.m();
        let b = &self.b0 + &self.bb * w;
        let d = &self.d0 + &self.dd * y;
        let bp = unstack(&b);
        let cb = cycle_bearing_matrix(&self.net.cycles, &bp);
        let c1 = cycle_distance_matrix(&self.net.cycles, d.as_slice());
        let q = cb.nrows();
        let (nw, ny) = (self.nw(), self.ny());
        let mut r = DVector::zeros(q + 2 * m);
        let mut j = DMatrix::zeros(q + 2 * m, nw + ny);
        r.rows_mut(0, q).copy_from(&(&cb * &d));
        j.view_mut((0, 0), (q, nw)).copy_from(&(&c1 * &self.bb));
        j.view_mut((0, nw), (q, ny)).copy_from(&(&cb * &self.dd));
        for e in 0..m {
            let (bx, by) = (b[2 * e], b[2 * e + 1]);
            r[q + e] = bx * bx + by * by - 1.0;
            for k in 0..nw {
                j[(q + e, k)] = 2.0 * (bx * self.bb[(2 * e, k)] + by * self.bb[(2 * e + 1, k)]);
            }
            let gap = POSITIVITY_EPS - d[e];
            if gap > 0.0 {
                r[q + m + e] = gap;
                for k in 0..ny {
                    j[(q + m + e, nw + k)] = -self.dd[(e, k)];
                }
            }
        }
        (r, j)
    }

    /// `G(w, y)`: squared norm of the residual.
    pub fn objective(&self, x: &DVector<f64>) -> f64 {
        self.residual(x).0.norm_squared()
    }

    /// Edges whose bearing and length are both unknown; the cycle residual is
    /// bilinear in `(w, y)` exactly on these.
    pub fn bilinear_edges(&self) -> Vec<usize> {
        (0..self.net.m())
            .filter(|&e| {
                self.bearings.reference[self.bearings.components.label[e]].is_none()
                    && self.distances.reference[self.distances.components.label[e]].is_none()
            })
            .collect()
    }

    /// Without bilinear edges the cycle residual is `A x + c` with
    /// `A = [C_{B,1}(d0) B, C_b(b0) D]` and `c = C_b(b0) d0`; returns the
    /// least-squares solution and null space of `A x = -c`.
    pub fn linear_lift(&self, rtol: f64) -> Option<LinearSystem> {
        if !self.bilinear_edges().is_empty() {
            return None;
        }
        let b0 = unstack(&self.b0);
        let cb = cycle_bearing_matrix(&self.net.cycles, &b0);
        let c1 = cycle_distance_matrix(&self.net.cycles, self.d0.as_slice());
        let (q, nw, ny) = (cb.nrows(), self.nw(), self.ny());
        let mut a = DMatrix::zeros(q, nw + ny);
        a.view_mut((0, 0), (q, nw)).copy_from(&(&c1 * &self.bb));
        a.view_mut((0, nw), (q, ny)).copy_from(&(&cb * &self.dd));
        let c = &cb * &self.d0;
        Some(LinearSystem::solve(a, -c, rtol))
    }

    /// Random unit reference bearings, then distances by linear least squares on the cycle rows.
    fn initial_point(&self, rng: &mut impl Rng) -> DVector<f64> {
        let nw = self.nw();
        let mut w = DVector::zeros(nw);
        for s in 0..nw / 2 {
            let a: f64 = rng.gen_range(0.0..std::f64::consts::TAU);
            w[2 * s] = a.cos();
            w[2 * s + 1] = a.sin();
        }
        let b = unstack(&(&self.b0 + &self.bb * &w));
        let cb = cycle_bearing_matrix(&self.net.cycles, &b);
        let y = if self.ny() > 0 { lstsq(&(&cb * &self.dd), &(-(&cb * &self.d0)), DEFAULT_RTOL) } else { DVector::zeros(0) };
        DVector::from_iterator(self.variables(), w.iter().chain(y.iter()).copied())
    }
}

/// Unit-norm rows `|b_e|^2 - 1` and positivity rows `max(0, eps - d_e)` of
/// `b = b0 + B v`, `d = d0 + D v`, with their Jacobian in `v`.
fn reduced_residual(
    b0: &DVector<f64>,
    bv: &DMatrix<f64>,
    d0: &DVector<f64>,
    dv: &DMatrix<f64>,
    v: &DVector<f64>,
) -> (DVector<f64>, DMatrix<f64>) {
    let (ru, ju) = h_residual(b0, bv, v);
    let m = d0.len();
    let d = d0 + dv * v;
    let mut r = DVector::zeros(2 * m);
    let mut j = DMatrix::zeros(2 * m, v.len());
    r.rows_mut(0, m).copy_from(&ru);
    j.rows_mut(0, m).copy_from(&ju);
    for e in 0..m {
        let gap = POSITIVITY_EPS - d[e];
        if gap > 0.0 {
            r[m + e] = gap;
            for k in 0..v.len() {
                j[(m + e, k)] = -dv[(e, k)];
            }
        }
    }
    (r, j)
}

/// Joint multi-start solve over the bearing and distance parameterizations.
/// When the cycle equations are affine in the parameters, the search runs on
/// their null space (the unit-norm constraints being the only nonlinearity)
/// and each zero is then polished on the full residual.
pub fn solve_disconnected(net: &SensorNetwork, cfg: &SolverConfig) -> Result<EdgeSolution> {
    let prob = GeneralProblem::new(net)?;
    let mut ev = base_evidence(&prob.bearings, &prob.distances);
    ev.variables = prob.variables();
    let opts = LmOptions { max_iter: cfg.max_iter, cost_tol: cfg.accept_tol * 1e-6, ..LmOptions::default() };
    let lift = prob.linear_lift(cfg.rtol);
    ev.lifted_null = lift.as_ref().map(|l| l.null_dim());
    let positive = |x: &DVector<f64>| prob.edges_at(x).0.iter().all(|&v| v > 0.0);
    let polish = |x0: DVector<f64>| -> Run {
        let res = levenberg_marquardt(x0, |x| prob.residual(x), &opts);
        // zeros with a non-positive distance violate the positivity constraint
        let cost = if positive(&res.x) { res.cost } else { f64::INFINITY };
        Run { x: res.x, cost, iterations: res.iterations }
    };
    let runs: Vec<Run> = match &lift {
        Some(l) if l.null_dim() == 0 => vec![polish(l.solution.clone())],
        Some(l) => {
            // the cycle rows vanish identically on x0 + N v, leaving the
            // unit-norm and positivity rows as an explicit quadratic model in v
            let (x0, null) = (&l.solution, &l.null_space);
            let nw = prob.nw();
            let bv: DMatrix<f64> = &prob.bb * null.rows(0, nw);
            let bv0 = &prob.b0 + &prob.bb * x0.rows(0, nw);
            let dv: DMatrix<f64> = &prob.dd * null.rows(nw, prob.ny());
            let dv0 = &prob.d0 + &prob.dd * x0.rows(nw, prob.ny());
            let reduced = |v: &DVector<f64>| reduced_residual(&bv0, &bv, &dv0, &dv, v);
            multi_start(cfg, null.ncols(), |_, v0| {
                let res = levenberg_marquardt(v0, reduced, &opts);
                let x = x0 + null * &res.x;
                let full = prob.objective(&x);
                if res.cost < cfg.accept_tol && full >= cfg.accept_tol {
                    let mut run = polish(x);
                    run.iterations += res.iterations;
                    run
                } else {
                    let cost = if positive(&x) { full } else { f64::INFINITY };
                    Run { x, cost, iterations: res.iterations }
                }
            })
        }
        None if prob.variables() == 0 => vec![polish(DVector::zeros(0))],
        None => multi_start(cfg, 0, |s, _| {
            let mut rng = ChaCha8Rng::seed_from_u64(start_seed(cfg.seed, s as u64));
            polish(prob.initial_point(&mut rng))
        }),
    };
    let (best, clusters, converged) = cluster_runs(&runs, cfg, |x| x.clone()).ok_or_else(|| {
        let c = runs.iter().map(|r| r.cost).fold(f64::INFINITY, f64::min);
        Error::SolverFailed(format!(
            "no start reached G < {:.0e} with positive distances over {} variables (best {c:.3e})",
            cfg.accept_tol,
            prob.variables()
        ))
    })?;
    let (d, b) = prob.edges_at(&runs[best].x);
    let determined = prob.variables() == 0 || ev.lifted_null == Some(0);
    let verdict = match (determined, clusters) {
        (true, _) => Verdict::Localizable,
        (false, 1) => Verdict::HeuristicUnique,
        _ => Verdict::HeuristicAmbiguous,
    };
    let meta = SolveMeta {
        method: Method::General,
        verdict,
        evidence: ev,
        iterations: runs[best].iterations,
        starts: runs.len(),
        converged,
        clusters,
        cost: runs[best].cost,
        infeasible: false,
    };
    Ok(EdgeSolution::new(net, d, b, meta))
}

/// Positions from edge vectors, telescoped along the default spanning tree
/// from the lowest-index anchor.
#[derive(Clone, Debug)]
pub struct Recovered {
    pub positions: Configuration,
    /// `|x_a - p_a|` per anchor, in anchor order.
    pub anchor_residual: Vec<f64>,
    pub warnings: Vec<String>,
}

pub fn recover_positions(net: &SensorNetwork, d: &[f64], b: &[Point]) -> Result<Recovered> {
    recover_positions_with_tree(net, d, b, &net.cycles.tree)
}

pub fn recover_positions_with_tree(net: &SensorNetwork, d: &[f64], b: &[Point], tree: &SpanningTree) -> Result<Recovered> {
    if d.len() != net.m() || b.len() != net.m() {
        return Err(Error::InvalidInput(format!("edge vectors must have length m = {}", net.m())));
    }
    let base = net.anchors[0];
    let pm = PathMatrix::from_tree(&net.graph, tree, base);
    let xl = net.truth.points[base];
    let points: Vec<Point> = pm
        .rows
        .iter()
        .map(|row| {
            row.iter()
                .enumerate()
                .filter(|&(_, &s)| s != 0)
                .fold(xl, |acc, (e, &s)| acc + s as f64 * d[e] * b[e])
        })
        .collect();
    let anchor_residual: Vec<f64> = net.anchors.iter().map(|&a| (points[a] - net.truth.points[a]).norm()).collect();
    let mut warnings = Vec::new();
    let worst = anchor_residual.iter().copied().fold(0.0, f64::max);
    if worst > GAUGE_DRIFT_TOL {
        warnings.push(format!("gauge drift: anchor reproduced with error {worst:.3e}"));
    }
    Ok(Recovered { positions: Configuration::new(points), anchor_residual, warnings })
}

/// Full localization outcome.
#[derive(Clone, Debug)]
pub struct Localization {
    pub solution: EdgeSolution,
    pub recovered: Recovered,
    /// Mean squared position error against the ground truth.
    pub mse: f64,
}

impl Localization {
    pub fn verdict(&self) -> Verdict {
        self.solution.meta.verdict
    }

    pub fn method(&self) -> Method {
        self.solution.meta.method
    }
}

/// Mean over vertices of the squared position error.
pub fn mse(est: &Configuration, truth: &Configuration) -> f64 {
    let n = truth.len().max(1);
    est.points.iter().zip(&truth.points).map(|(a, b)| (a - b).norm_squared()).sum::<f64>() / n as f64
}

/// Method chosen by the automatic dispatch: SA path when every bearing is
/// pinned, else RoD path when every distance is pinned, else the joint solve.
pub fn auto_method(net: &SensorNetwork) -> Result<Method> {
    Ok(if propagate_bearings(net)?.is_resolved() {
        Method::Sa
    } else if propagate_distances(net)?.is_resolved() {
        Method::Rod
    } else {
        Method::General
    })
}

pub fn solve(net: &SensorNetwork, method: Method, cfg: &SolverConfig) -> Result<EdgeSolution> {
    match method {
        Method::Sa => solve_sa_connected(net, cfg),
        Method::Rod => solve_rod_connected(net, cfg),
        Method::General => solve_disconnected(net, cfg),
    }
}

pub fn localize(net: &SensorNetwork, choice: MethodChoice, cfg: &SolverConfig) -> Result<Localization> {
    let method = match choice {
        MethodChoice::Auto => auto_method(net)?,
        MethodChoice::Fixed(m) => m,
    };
    let solution = solve(net, method, cfg)?;
    let recovered = recover_positions(net, &solution.d, &solution.b)?;
    let mse = mse(&recovered.positions, &net.truth);
    Ok(Localization { solution, recovered, mse })
}

/// Localizability verdict with its evidence. Rank tests decide when the SA
/// path applies or the `C_B` null space is trivial; otherwise the multi-start
/// solvers provide a heuristic answer.
pub fn localizability_check(net: &SensorNetwork, cfg: &SolverConfig) -> Result<SolveMeta> {
    let method = auto_method(net)?;
    Ok(solve(net, method, cfg)?.meta)
}

/// Largest constraint violations of positions `x`: SA (wrapped, radians),
/// RoD (relative) and anchor positions.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ProblemResiduals {
    pub sa: f64,
    pub rod: f64,
    pub anchors: f64,
}

pub fn problem_residuals(net: &SensorNetwork, x: &Configuration) -> Result<ProblemResiduals> {
    let mut sa: f64 = 0.0;
    for ms in &net.measurements.sa {
        sa = sa.max(wrap_pi(signed_angle(x, ms.triple)? - ms.value).abs());
    }
    let mut rod: f64 = 0.0;
    for ms in &net.measurements.rod {
        let v = crate::geometry::ratio_of_distance(x, ms.triple)?;
        rod = rod.max((v - ms.value).abs() / ms.value);
    }
    let anchors = net.anchors.iter().map(|&a| (x.points[a] - net.truth.points[a]).norm()).fold(0.0, f64::max);
    Ok(ProblemResiduals { sa, rod, anchors })
}

/// Ranks of `C_D` and `C_B` evaluated at the ground-truth edge vectors.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TruthRanks {
    pub m: usize,
    pub rank_cd: usize,
    pub rows_cd: usize,
    pub rank_cb: usize,
    pub rows_cb: usize,
    pub null_cb: usize,
}

pub fn truth_ranks(net: &SensorNetwork, rtol: f64) -> TruthRanks {
    let (d, b) = net.true_edges();
    let cd = c_d_system(net, &b, rtol);
    let cb = c_b_system(net, &d, rtol);
    TruthRanks {
        m: net.m(),
        rank_cd: cd.rank,
        rows_cd: cd.rows(),
        rank_cb: cb.rank,
        rows_cb: cb.rows(),
        null_cb: cb.null_dim(),
    }
}

/// Attribute counts of the anchors, `(in A, in D)`.
pub fn anchor_attribute_counts(net: &SensorNetwork) -> (usize, usize) {
    let a = net.anchors.iter().filter(|&&v| net.attrs.attr(v) == Attr::A).count();
    (a, net.anchors.len() - a)
}

/// Stacked bearings helper for callers comparing against `C_B` solutions.
pub fn stacked_bearings(b: &[Point]) -> DVector<f64> {
    stack(b)
}

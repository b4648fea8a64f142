//! Undirected graphs with a fixed edge order and orientation, the signed
//! matrices derived from them, and the triple index sets over which signed
//! angles and ratios of distance are measured.
//!
//! Vertices are 0-based indices internally. File formats and the CLI use
//! 1-based ids; [`Graph::from_one_based`] converts. Every edge `(i, j)` is
//! stored with `i < j` and oriented tail `i` to head `j`.

use std::collections::{HashMap, VecDeque};

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Sensing attribute of a vertex: signed angles (`A`) or ratios of distance (`D`).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Attr {
    A,
    D,
}

impl Attr {
    pub fn flipped(self) -> Attr {
        match self {
            Attr::A => Attr::D,
            Attr::D => Attr::A,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    index: HashMap<(usize, usize), usize>,
    adj: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph from 0-based vertex pairs. Pairs are normalized to
    /// `(min, max)`; the given order becomes the canonical edge index.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut g = Graph {
            n,
            edges: Vec::with_capacity(edges.len()),
            index: HashMap::with_capacity(edges.len()),
            adj: vec![Vec::new(); n],
        };
        for &(a, b) in edges {
            g.push_edge(a, b)?;
        }
        Ok(g)
    }

    /// Builds a graph from 1-based vertex pairs.
    pub fn from_one_based(n: usize, edges: &[(usize, usize)]) -> Result<Graph> {
        let mut zero = Vec::with_capacity(edges.len());
        for &(a, b) in edges {
            if a == 0 || b == 0 {
                return Err(Error::InvalidGraph("vertex id 0 in 1-based edge list".into()));
            }
            zero.push((a - 1, b - 1));
        }
        Graph::new(n, &zero)
    }

    /// Appends an edge and returns its index.
    pub fn push_edge(&mut self, a: usize, b: usize) -> Result<usize> {
        if a == b {
            return Err(Error::InvalidGraph(format!("self-loop at vertex {}", a + 1)));
        }
        if a >= self.n || b >= self.n {
            return Err(Error::InvalidGraph(format!(
                "edge ({}, {}) references a vertex beyond n = {}",
                a + 1,
                b + 1,
                self.n
            )));
        }
        let key = (a.min(b), a.max(b));
        if self.index.contains_key(&key) {
            return Err(Error::InvalidGraph(format!("duplicate edge ({}, {})", key.0 + 1, key.1 + 1)));
        }
        let e = self.edges.len();
        self.edges.push(key);
        self.index.insert(key, e);
        insert_sorted(&mut self.adj[key.0], key.1);
        insert_sorted(&mut self.adj[key.1], key.0);
        Ok(e)
    }

    /// Adds an isolated vertex and returns its index.
    pub fn push_vertex(&mut self) -> usize {
        self.adj.push(Vec::new());
        self.n += 1;
        self.n - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn edge(&self, e: usize) -> (usize, usize) {
        self.edges[e]
    }

    /// Index of the edge joining `a` and `b`, in either order.
    pub fn edge_index(&self, a: usize, b: usize) -> Option<usize> {
        self.index.get(&(a.min(b), a.max(b))).copied()
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn tail(&self, e: usize) -> usize {
        self.edges[e].0
    }

    pub fn head(&self, e: usize) -> usize {
        self.edges[e].1
    }

    /// +1 if `v` is the tail of edge `e`, -1 if it is the head.
    pub fn orientation_from(&self, e: usize, v: usize) -> f64 {
        if self.edges[e].0 == v {
            1.0
        } else {
            -1.0
        }
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut queue = VecDeque::from([0]);
        seen[0] = true;
        let mut count = 1;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    queue.push_back(w);
                }
            }
        }
        count == self.n
    }

    /// Signed incidence matrix (m x n): -1 at the tail, +1 at the head.
    pub fn incidence_matrix(&self) -> DMatrix<f64> {
        let mut h = DMatrix::zeros(self.m(), self.n);
        for (e, &(t, hd)) in self.edges.iter().enumerate() {
            h[(e, t)] = -1.0;
            h[(e, hd)] = 1.0;
        }
        h
    }

    /// The same graph with an edge removed; later edges shift down by one.
    pub fn without_edge(&self, e: usize) -> Graph {
        let rest: Vec<_> = self
            .edges
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != e)
            .map(|(_, &p)| p)
            .collect();
        Graph::new(self.n, &rest).expect("subset of a valid edge list is valid")
    }
}

fn insert_sorted(list: &mut Vec<usize>, v: usize) {
    let pos = list.partition_point(|&x| x < v);
    list.insert(pos, v);
}

/// Edge code of the triple index graph: `(min - 1) * n + max` on 1-based ids.
pub fn edge_code(a: usize, b: usize, n: usize) -> usize {
    let (lo, hi) = (a.min(b), a.max(b));
    lo * n + hi + 1
}

/// Per-vertex attribute labels.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Bipartition(pub Vec<Attr>);

impl Bipartition {
    pub fn new(attrs: Vec<Attr>) -> Bipartition {
        Bipartition(attrs)
    }

    /// Marks the listed 0-based vertices as `A`, everything else as `D`.
    pub fn from_a_set(n: usize, a_vertices: &[usize]) -> Bipartition {
        let mut attrs = vec![Attr::D; n];
        for &v in a_vertices {
            attrs[v] = Attr::A;
        }
        Bipartition(attrs)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn attr(&self, v: usize) -> Attr {
        self.0[v]
    }

    pub fn is_a(&self, v: usize) -> bool {
        self.0[v] == Attr::A
    }

    pub fn is_d(&self, v: usize) -> bool {
        self.0[v] == Attr::D
    }

    pub fn count_a(&self) -> usize {
        self.0.iter().filter(|&&a| a == Attr::A).count()
    }

    pub fn a_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_a(v)).collect()
    }

    pub fn d_vertices(&self) -> Vec<usize> {
        (0..self.len()).filter(|&v| self.is_d(v)).collect()
    }

    /// Exchanges the roles of `A` and `D`.
    pub fn swapped(&self) -> Bipartition {
        Bipartition(self.0.iter().map(|a| a.flipped()).collect())
    }

    /// Both parts nonempty.
    pub fn is_nontrivial(&self) -> bool {
        let a = self.count_a();
        a > 0 && a < self.len()
    }
}

/// Rooted spanning tree: every non-root vertex records its parent and the tree edge to it.
#[derive(Clone, Debug)]
pub struct SpanningTree {
    pub root: usize,
    parent: Vec<Option<(usize, usize)>>,
    in_tree: Vec<bool>,
    depth: Vec<usize>,
}

impl SpanningTree {
    /// Breadth-first tree, neighbors visited in ascending order.
    pub fn bfs(g: &Graph, root: usize) -> Result<SpanningTree> {
        let mut parent = vec![None; g.n()];
        let mut depth = vec![0; g.n()];
        let mut seen = vec![false; g.n()];
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in g.neighbors(v) {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = Some((v, g.edge_index(v, w).unwrap()));
                    depth[w] = depth[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        SpanningTree::finish(g, root, parent, depth, &seen)
    }

    /// Depth-first tree, neighbors visited in descending order so that it
    /// differs from the BFS tree on most graphs with cycles.
    pub fn dfs(g: &Graph, root: usize) -> Result<SpanningTree> {
        let mut parent = vec![None; g.n()];
        let mut depth = vec![0; g.n()];
        let mut seen = vec![false; g.n()];
        let mut stack = vec![(root, None::<(usize, usize)>)];
        while let Some((v, from)) = stack.pop() {
            if seen[v] {
                continue;
            }
            seen[v] = true;
            if let Some((p, e)) = from {
                parent[v] = Some((p, e));
                depth[v] = depth[p] + 1;
            }
            for &w in g.neighbors(v) {
                if !seen[w] {
                    stack.push((w, Some((v, g.edge_index(v, w).unwrap()))));
                }
            }
        }
        SpanningTree::finish(g, root, parent, depth, &seen)
    }

    fn finish(
        g: &Graph,
        root: usize,
        parent: Vec<Option<(usize, usize)>>,
        depth: Vec<usize>,
        seen: &[bool],
    ) -> Result<SpanningTree> {
        if seen.iter().any(|&s| !s) {
            return Err(Error::NotConnected);
        }
        let mut in_tree = vec![false; g.m()];
        for &(_, e) in parent.iter().flatten() {
            in_tree[e] = true;
        }
        Ok(SpanningTree { root, parent, in_tree, depth })
    }

    pub fn is_tree_edge(&self, e: usize) -> bool {
        self.in_tree[e]
    }

    pub fn parent(&self, v: usize) -> Option<(usize, usize)> {
        self.parent[v]
    }

    /// Signed edge indicator of the tree path from the root to `v`:
    /// +1 where the path runs tail to head, -1 where it runs head to tail.
    pub fn root_path(&self, g: &Graph, v: usize) -> Vec<i8> {
        let mut row = vec![0i8; g.m()];
        let mut x = v;
        while let Some((p, e)) = self.parent[x] {
            // step p -> x along the path from the root
            row[e] = if g.tail(e) == p { 1 } else { -1 };
            x = p;
        }
        row
    }

    /// Signed fundamental cycle of the non-tree edge `e`: traverse `e`
    /// tail to head, then return through the tree.
    fn fundamental_cycle(&self, g: &Graph, e: usize) -> Vec<i8> {
        let (u, v) = g.edge(e);
        let mut row = vec![0i8; g.m()];
        row[e] = 1;
        let (mut a, mut b) = (v, u);
        // climb from v (start of the return walk) and from u (its end)
        let mut tail_part = Vec::new();
        while self.depth[a] > self.depth[b] {
            let (p, t) = self.parent[a].unwrap();
            row[t] = if g.tail(t) == a { 1 } else { -1 };
            a = p;
        }
        while self.depth[b] > self.depth[a] {
            let (p, t) = self.parent[b].unwrap();
            tail_part.push((p, t));
            b = p;
        }
        while a != b {
            let (pa, ta) = self.parent[a].unwrap();
            row[ta] = if g.tail(ta) == a { 1 } else { -1 };
            a = pa;
            let (pb, tb) = self.parent[b].unwrap();
            tail_part.push((pb, tb));
            b = pb;
        }
        // descend from the common ancestor to u
        for (p, t) in tail_part {
            row[t] = if g.tail(t) == p { 1 } else { -1 };
        }
        row
    }
}

/// Spanning tree used by default: BFS from the lowest-index vertex.
pub fn default_tree(g: &Graph) -> Result<SpanningTree> {
    if g.n() == 0 {
        return Err(Error::InvalidGraph("empty graph".into()));
    }
    SpanningTree::bfs(g, 0)
}

/// Fundamental cycle basis: one signed row per non-tree edge, in edge order.
#[derive(Clone, Debug)]
pub struct CycleBasis {
    pub rows: Vec<Vec<i8>>,
    pub tree: SpanningTree,
}

impl CycleBasis {
    pub fn from_tree(g: &Graph, tree: SpanningTree) -> CycleBasis {
        let rows = (0..g.m())
            .filter(|&e| !tree.is_tree_edge(e))
            .map(|e| tree.fundamental_cycle(g, e))
            .collect();
        CycleBasis { rows, tree }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn matrix(&self, m: usize) -> DMatrix<f64> {
        DMatrix::from_fn(self.rows.len(), m, |r, c| self.rows[r][c] as f64)
    }
}

pub fn fundamental_cycle_basis(g: &Graph) -> Result<CycleBasis> {
    Ok(CycleBasis::from_tree(g, default_tree(g)?))
}

/// Signed path matrix with base vertex `base`: row `i` marks the tree path
/// from `base` to `i`, so that `x_i = x_base + sum_e P[i,e] (x_head(e) - x_tail(e))`.
#[derive(Clone, Debug)]
pub struct PathMatrix {
    pub base: usize,
    pub rows: Vec<Vec<i8>>,
}

impl PathMatrix {
    pub fn from_tree(g: &Graph, tree: &SpanningTree, base: usize) -> PathMatrix {
        let from_root: Vec<Vec<i8>> = (0..g.n()).map(|v| tree.root_path(g, v)).collect();
        let rows = (0..g.n())
            .map(|i| {
                from_root[i]
                    .iter()
                    .zip(&from_root[base])
                    .map(|(&a, &b)| a - b)
                    .collect()
            })
            .collect();
        PathMatrix { base, rows }
    }

    pub fn matrix(&self) -> DMatrix<f64> {
        let m = self.rows.first().map_or(0, |r| r.len());
        DMatrix::from_fn(self.rows.len(), m, |r, c| self.rows[r][c] as f64)
    }
}

pub fn path_matrix(g: &Graph, base: usize) -> Result<PathMatrix> {
    if base >= g.n() {
        return Err(Error::InvalidInput(format!("base vertex {} does not exist", base + 1)));
    }
    Ok(PathMatrix::from_tree(g, &default_tree(g)?, base))
}

/// Measurement triple: apex `i` with incident edges `(i, j)` and `(i, k)`, `j < k`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Triple {
    pub apex: usize,
    pub j: usize,
    pub k: usize,
}

impl Triple {
    pub fn new(apex: usize, j: usize, k: usize) -> Triple {
        Triple { apex, j, k }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum TripleKind {
    Sa,
    Rod,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TripleMode {
    /// Every pair of incident edges at each apex.
    Full,
    /// Star at the smallest neighbor: `deg - 1` triples per apex.
    Reduced,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TripleIndexSet {
    pub kind: TripleKind,
    pub triples: Vec<Triple>,
}

impl TripleIndexSet {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }
}

fn apex_triples(g: &Graph, u: usize, mode: TripleMode, out: &mut Vec<Triple>) {
    let nb = g.neighbors(u);
    if nb.len() < 2 {
        return;
    }
    match mode {
        TripleMode::Full => {
            for (a, &j) in nb.iter().enumerate() {
                for &k in &nb[a + 1..] {
                    out.push(Triple::new(u, j, k));
                }
            }
        }
        TripleMode::Reduced => {
            for &k in &nb[1..] {
                out.push(Triple::new(u, nb[0], k));
            }
        }
    }
}

/// SA triples (apex in A) and RoD triples (apex in D), ordered by apex then `(j, k)`.
pub fn enumerate_triples(g: &Graph, attrs: &Bipartition, mode: TripleMode) -> (TripleIndexSet, TripleIndexSet) {
    let mut sa = Vec::new();
    let mut rod = Vec::new();
    for u in 0..g.n() {
        match attrs.attr(u) {
            Attr::A => apex_triples(g, u, mode, &mut sa),
            Attr::D => apex_triples(g, u, mode, &mut rod),
        }
    }
    (
        TripleIndexSet { kind: TripleKind::Sa, triples: sa },
        TripleIndexSet { kind: TripleKind::Rod, triples: rod },
    )
}

/// Connected components of a triple index graph over all edges of `g`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EdgeComponents {
    /// Component label per edge, numbered by first appearance in edge order.
    pub label: Vec<usize>,
    pub count: usize,
}

impl EdgeComponents {
    pub fn members(&self, c: usize) -> Vec<usize> {
        (0..self.label.len()).filter(|&e| self.label[e] == c).collect()
    }
}

pub fn triple_index_graph_components(t: &TripleIndexSet, g: &Graph) -> EdgeComponents {
    let mut uf = UnionFind::new(g.m());
    for tr in &t.triples {
        let a = g.edge_index(tr.apex, tr.j).expect("triple edge missing from graph");
        let b = g.edge_index(tr.apex, tr.k).expect("triple edge missing from graph");
        uf.union(a, b);
    }
    let mut relabel = HashMap::new();
    let mut label = Vec::with_capacity(g.m());
    for e in 0..g.m() {
        let r = uf.find(e);
        let next = relabel.len();
        label.push(*relabel.entry(r).or_insert(next));
    }
    EdgeComponents { label, count: relabel.len() }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.parent[r] != r {
            r = self.parent[r];
        }
        let mut y = x;
        while self.parent[y] != r {
            let next = self.parent[y];
            self.parent[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Adds every missing anchor-anchor edge, appended after the existing edges.
pub fn augment_anchor_clique(g: &Graph, anchors: &[usize]) -> Result<Graph> {
    let mut sorted = anchors.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.len() < 2 {
        return Err(Error::TooFewAnchors(sorted.len()));
    }
    let mut out = g.clone();
    for (a, &u) in sorted.iter().enumerate() {
        for &v in &sorted[a + 1..] {
            if out.edge_index(u, v).is_none() {
                out.push_edge(u, v)?;
            }
        }
    }
    Ok(out)
}

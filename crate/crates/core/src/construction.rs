//! Generation of globally rigid frameworks by typed vertex additions, and
//! merging of two frameworks.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::framework::Framework;
use crate::geometry::{cross, Configuration, Point};
use crate::graph::{Attr, Bipartition, Graph};
use crate::linalg::DEFAULT_RTOL;
use crate::rigidity::is_infinitesimally_rigid;

/// Relative tolerance on collinearity and collocation of placed vertices.
pub const PLACEMENT_TOL: f64 = 1e-6;
pub const MAX_PLACEMENT_ATTEMPTS: usize = 100;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AdditionKind {
    /// New A-vertex joined to `i, j`, at least one of them a D-vertex.
    A1,
    /// New D-vertex joined to `i, j`, at least one of them an A-vertex.
    D1,
    /// New A-vertex joined to two A-vertices, the three non-collinear.
    A2,
    /// New D-vertex joined to three non-collinear D-vertices.
    D2,
    /// Two new vertices on a path `j - n+1 - n+2 - i`, exactly three A-vertices among the four.
    TwoVertex,
    /// Two new A-vertices on a path between two A-vertices. Not a valid rigid
    /// extension; used to build deliberately unlocalizable quadrilateralizations.
    TwoVertexAllA,
}

/// One addition: kind, 0-based attachment vertices and, for two-vertex
/// additions, the attributes of the new vertices `n+1, n+2`.
#[derive(Clone, Debug, PartialEq)]
pub struct AdditionStep {
    pub kind: AdditionKind,
    pub attach: Vec<usize>,
    pub new_attrs: [Attr; 2],
}

impl AdditionStep {
    pub fn one(kind: AdditionKind, attach: &[usize]) -> AdditionStep {
        AdditionStep { kind, attach: attach.to_vec(), new_attrs: [Attr::A, Attr::A] }
    }

    pub fn two(i: usize, j: usize, new_attrs: [Attr; 2]) -> AdditionStep {
        AdditionStep { kind: AdditionKind::TwoVertex, attach: vec![i, j], new_attrs }
    }
}

/// Log record of one construction step, with 1-based vertex ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstructionEntry {
    pub kind: String,
    pub attachments: Vec<usize>,
    pub new_vertices: Vec<usize>,
    pub attrs: Vec<Attr>,
    pub placed: Vec<[f64; 2]>,
}

/// Axis-aligned box in which new vertices are sampled uniformly.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PlacementBox {
    pub lo: [f64; 2],
    pub hi: [f64; 2],
}

impl Default for PlacementBox {
    fn default() -> Self {
        PlacementBox { lo: [0.0, 0.0], hi: [1.0, 1.0] }
    }
}

impl PlacementBox {
    fn sample(&self, rng: &mut impl Rng) -> Point {
        Point::new(rng.gen_range(self.lo[0]..self.hi[0]), rng.gen_range(self.lo[1]..self.hi[1]))
    }

    fn size(&self) -> f64 {
        (self.hi[0] - self.lo[0]).max(self.hi[1] - self.lo[1])
    }
}

/// Incrementally grows a framework; every step is validated and logged.
#[derive(Clone, Debug)]
pub struct Builder {
    pub graph: Graph,
    pub attrs: Vec<Attr>,
    pub points: Vec<Point>,
    pub log: Vec<ConstructionEntry>,
    pub bbox: PlacementBox,
}

fn precondition(msg: impl Into<String>) -> Error {
    Error::Precondition(msg.into())
}

impl Builder {
    pub fn empty(bbox: PlacementBox) -> Builder {
        Builder { graph: Graph::new(0, &[]).unwrap(), attrs: Vec::new(), points: Vec::new(), log: Vec::new(), bbox }
    }

    /// Two vertices joined by one edge, placed at random.
    pub fn seed_edge(attrs: [Attr; 2], bbox: PlacementBox, rng: &mut impl Rng) -> Result<Builder> {
        let mut b = Builder::empty(bbox);
        let p0 = bbox.sample(rng);
        let p1 = b.sample_away_from(&[p0], rng)?;
        b.add_vertex(attrs[0], p0);
        b.add_vertex(attrs[1], p1);
        b.graph.push_edge(0, 1)?;
        b.log.push(ConstructionEntry {
            kind: "seed".into(),
            attachments: vec![],
            new_vertices: vec![1, 2],
            attrs: attrs.to_vec(),
            placed: vec![[p0.x, p0.y], [p1.x, p1.y]],
        });
        Ok(b)
    }

    /// A four-cycle `1-2-3-4-1` placed at random with non-collinear consecutive triples.
    pub fn seed_quad(attrs: [Attr; 4], bbox: PlacementBox, rng: &mut impl Rng) -> Result<Builder> {
        let tol = PLACEMENT_TOL * bbox.size() * bbox.size();
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p: Vec<Point> = (0..4).map(|_| bbox.sample(rng)).collect();
            let ok = (0..4).all(|k| cross(&(p[(k + 1) % 4] - p[k]), &(p[(k + 2) % 4] - p[k])).abs() > tol);
            if !ok {
                continue;
            }
            let mut b = Builder::empty(bbox);
            for (a, q) in attrs.iter().zip(&p) {
                b.add_vertex(*a, *q);
            }
            for (u, v) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
                b.graph.push_edge(u, v)?;
            }
            b.log.push(ConstructionEntry {
                kind: "seed-quad".into(),
                attachments: vec![],
                new_vertices: vec![1, 2, 3, 4],
                attrs: attrs.to_vec(),
                placed: p.iter().map(|q| [q.x, q.y]).collect(),
            });
            return Ok(b);
        }
        Err(Error::Placement(MAX_PLACEMENT_ATTEMPTS, "seed quadrilateral".into()))
    }

    pub fn from_framework(fw: &Framework, bbox: PlacementBox) -> Builder {
        Builder {
            graph: fw.graph.clone(),
            attrs: fw.attrs.0.clone(),
            points: fw.config.points.clone(),
            log: Vec::new(),
            bbox,
        }
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn is_a(&self, v: usize) -> bool {
        self.attrs[v] == Attr::A
    }

    pub fn vertices_with(&self, a: Attr) -> Vec<usize> {
        (0..self.n()).filter(|&v| self.attrs[v] == a).collect()
    }

    pub fn framework(&self) -> Result<Framework> {
        Framework::new(self.graph.clone(), Bipartition::new(self.attrs.clone()), Configuration::new(self.points.clone()))
    }

    fn add_vertex(&mut self, a: Attr, p: Point) -> usize {
        let v = self.graph.push_vertex();
        self.attrs.push(a);
        self.points.push(p);
        v
    }

    fn far_from_all(&self, p: &Point, extra: &[Point]) -> bool {
        let tol = PLACEMENT_TOL * self.bbox.size();
        self.points.iter().chain(extra).all(|q| (q - p).norm() > tol)
    }

    fn sample_away_from(&self, extra: &[Point], rng: &mut impl Rng) -> Result<Point> {
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = self.bbox.sample(rng);
            if self.far_from_all(&p, extra) {
                return Ok(p);
            }
        }
        Err(Error::Placement(MAX_PLACEMENT_ATTEMPTS, "collocation".into()))
    }

    fn non_collinear(&self, a: &Point, b: &Point, c: &Point) -> bool {
        let s = self.bbox.size();
        cross(&(b - a), &(c - a)).abs() > PLACEMENT_TOL * s * s
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n() {
            return Err(precondition(format!("attachment vertex {} does not exist", v + 1)));
        }
        Ok(())
    }

    /// Applies one addition, sampling new positions until every tolerance holds.
    pub fn apply(&mut self, step: &AdditionStep, rng: &mut impl Rng) -> Result<()> {
        for &v in &step.attach {
            self.check_vertex(v)?;
        }
        let distinct = |xs: &[usize]| xs.iter().enumerate().all(|(k, a)| !xs[k + 1..].contains(a));
        if !distinct(&step.attach) {
            return Err(precondition("attachment vertices must be distinct"));
        }
        match step.kind {
            AdditionKind::A1 | AdditionKind::D1 | AdditionKind::A2 => self.apply_one_two_edges(step, rng),
            AdditionKind::D2 => self.apply_d2(step, rng),
            AdditionKind::TwoVertex | AdditionKind::TwoVertexAllA => self.apply_two_vertex(step, rng),
        }
    }

    fn apply_one_two_edges(&mut self, step: &AdditionStep, rng: &mut impl Rng) -> Result<()> {
        let [i, j] = step.attach[..] else {
            return Err(precondition("a 1-vertex addition of this type needs exactly two attachments"));
        };
        let (new_attr, name) = match step.kind {
            AdditionKind::A1 => {
                if self.is_a(i) && self.is_a(j) {
                    return Err(precondition("A1 requires i in V_D or j in V_D"));
                }
                (Attr::A, "A1")
            }
            AdditionKind::D1 => {
                if !self.is_a(i) && !self.is_a(j) {
                    return Err(precondition("D1 requires i in V_A or j in V_A"));
                }
                (Attr::D, "D1")
            }
            _ => {
                if !(self.is_a(i) && self.is_a(j)) {
                    return Err(precondition("A2 requires i and j in V_A"));
                }
                (Attr::A, "A2")
            }
        };
        let (pi, pj) = (self.points[i], self.points[j]);
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = self.bbox.sample(rng);
            if self.far_from_all(&p, &[]) && self.non_collinear(&p, &pi, &pj) {
                let v = self.add_vertex(new_attr, p);
                self.graph.push_edge(i, v)?;
                self.graph.push_edge(j, v)?;
                self.log_step(name, &[i, j], &[v]);
                return Ok(());
            }
        }
        Err(Error::Placement(MAX_PLACEMENT_ATTEMPTS, format!("{name} non-collinearity")))
    }

    fn apply_d2(&mut self, step: &AdditionStep, rng: &mut impl Rng) -> Result<()> {
        let [i, j, k] = step.attach[..] else {
            return Err(precondition("D2 needs three attachments (i, j and a third D-vertex k)"));
        };
        if self.vertices_with(Attr::D).len() < 3 {
            return Err(precondition("D2 requires at least three D-vertices"));
        }
        if [i, j, k].iter().any(|&v| self.is_a(v)) {
            return Err(precondition("D2 requires i, j, k in V_D"));
        }
        let (pi, pj, pk) = (self.points[i], self.points[j], self.points[k]);
        if !self.non_collinear(&pi, &pj, &pk) {
            return Err(precondition("D2 requires p_i, p_j, p_k non-collinear"));
        }
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p = self.bbox.sample(rng);
            if self.far_from_all(&p, &[])
                && self.non_collinear(&p, &pi, &pj)
                && self.non_collinear(&p, &pi, &pk)
                && self.non_collinear(&p, &pj, &pk)
            {
                let v = self.add_vertex(Attr::D, p);
                for u in [i, j, k] {
                    self.graph.push_edge(u, v)?;
                }
                self.log_step("D2", &[i, j, k], &[v]);
                return Ok(());
            }
        }
        Err(Error::Placement(MAX_PLACEMENT_ATTEMPTS, "D2 non-collinearity".into()))
    }

    fn apply_two_vertex(&mut self, step: &AdditionStep, rng: &mut impl Rng) -> Result<()> {
        let [i, j] = step.attach[..] else {
            return Err(precondition("a 2-vertex addition needs two attachments"));
        };
        let quad_attrs = [self.attrs[i], self.attrs[j], step.new_attrs[0], step.new_attrs[1]];
        let count_a = quad_attrs.iter().filter(|&&a| a == Attr::A).count();
        let name = match step.kind {
            AdditionKind::TwoVertex => {
                if count_a != 3 {
                    return Err(precondition(format!(
                        "2-vertex addition needs exactly three A-vertices among i, j, n+1, n+2 (got {count_a})"
                    )));
                }
                "2V"
            }
            _ => {
                if count_a != 4 {
                    return Err(precondition("all-A 2-vertex addition needs four A-vertices"));
                }
                "2V-allA"
            }
        };
        for _ in 0..MAX_PLACEMENT_ATTEMPTS {
            let p1 = self.bbox.sample(rng);
            let p2 = self.bbox.sample(rng);
            if !self.far_from_all(&p1, &[]) || !self.far_from_all(&p2, &[p1]) {
                continue;
            }
            let quad = [self.points[i], self.points[j], p1, p2];
            let a_pts: Vec<Point> = (0..4).filter(|&k| quad_attrs[k] == Attr::A).map(|k| quad[k]).collect();
            let generic = (0..a_pts.len()).all(|s| {
                let others: Vec<&Point> = a_pts.iter().enumerate().filter(|&(t, _)| t != s).map(|(_, q)| q).collect();
                others.len() < 3 || self.non_collinear(others[0], others[1], others[2])
            }) && self.non_collinear(&quad[1], &p1, &p2)
                && self.non_collinear(&quad[0], &p1, &p2);
            if !generic {
                continue;
            }
            let u = self.add_vertex(step.new_attrs[0], p1);
            let v = self.add_vertex(step.new_attrs[1], p2);
            self.graph.push_edge(j, u)?;
            self.graph.push_edge(u, v)?;
            self.graph.push_edge(v, i)?;
            self.log_step(name, &[i, j], &[u, v]);
            return Ok(());
        }
        Err(Error::Placement(MAX_PLACEMENT_ATTEMPTS, "2-vertex non-collinearity".into()))
    }

    fn log_step(&mut self, kind: &str, attach: &[usize], new: &[usize]) {
        self.log.push(ConstructionEntry {
            kind: kind.into(),
            attachments: attach.iter().map(|v| v + 1).collect(),
            new_vertices: new.iter().map(|v| v + 1).collect(),
            attrs: new.iter().map(|&v| self.attrs[v]).collect(),
            placed: new.iter().map(|&v| [self.points[v].x, self.points[v].y]).collect(),
        });
    }
}

/// Applies a single addition to a framework.
pub fn apply_vertex_addition(fw: &Framework, step: &AdditionStep, rng: &mut impl Rng) -> Result<Framework> {
    let mut b = Builder::from_framework(fw, PlacementBox::default());
    b.apply(step, rng)?;
    b.framework()
}

/// Applies a 2-vertex addition with attachments `(i, j)` and new attributes `attrs`.
pub fn apply_two_vertex_addition(fw: &Framework, i: usize, j: usize, attrs: [Attr; 2], rng: &mut impl Rng) -> Result<Framework> {
    apply_vertex_addition(fw, &AdditionStep::two(i, j, attrs), rng)
}

/// Named generation recipes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Recipe {
    /// 2-vertex additions along edges; SA connected, quadrilateralized.
    Quad2v,
    /// `Quad2v` with two all-A quadrilaterals: SA connected but unlocalizable.
    Quad2vDeficient,
    /// Alternating D1 / A1 bilateration from an edge.
    BilatD1A1,
    /// Alternating A1 / D2 additions from a quadrilateral.
    MixD2A1,
    /// Alternating 2-vertex and D1 additions.
    Type2D1,
    /// Minimal edge count: 2-vertex additions plus one 1-vertex addition for odd `n`.
    Minimal,
    /// Uniformly random choice among every feasible addition type.
    Random,
}

impl Recipe {
    pub const ALL: [Recipe; 7] = [
        Recipe::Quad2v,
        Recipe::Quad2vDeficient,
        Recipe::BilatD1A1,
        Recipe::MixD2A1,
        Recipe::Type2D1,
        Recipe::Minimal,
        Recipe::Random,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Recipe::Quad2v => "quad2v",
            Recipe::Quad2vDeficient => "quad2v-deficient",
            Recipe::BilatD1A1 => "bilat-D1A1",
            Recipe::MixD2A1 => "mix-D2A1",
            Recipe::Type2D1 => "type2D1",
            Recipe::Minimal => "minimal",
            Recipe::Random => "random",
        }
    }

    /// Whether outputs are expected to be globally rigid.
    pub fn is_rigid(self) -> bool {
        self != Recipe::Quad2vDeficient
    }

    /// Smallest supported `n`.
    pub fn min_n(self) -> usize {
        match self {
            Recipe::Quad2vDeficient => 16,
            Recipe::BilatD1A1 | Recipe::Type2D1 | Recipe::Random => 3,
            _ => 4,
        }
    }
}

impl fmt::Display for Recipe {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Recipe {
    type Err = Error;

    fn from_str(s: &str) -> Result<Recipe> {
        Recipe::ALL
            .into_iter()
            .find(|r| r.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidInput(format!("unknown recipe '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub recipe: Recipe,
    pub framework: Framework,
    pub log: Vec<ConstructionEntry>,
}

/// Generates a framework with `n` vertices from a recipe. Vertices 1 and 2
/// always carry different attributes and share an edge, so `{1, 2}` is a
/// mixed anchor pair. Vertex 1 is a D-vertex except in `mix-D2A1`, whose seed
/// quadrilateral has the single A-vertex 1.
pub fn generate_ordering(recipe: Recipe, n: usize, seed: u64) -> Result<Generated> {
    if n < recipe.min_n() {
        return Err(Error::InvalidInput(format!("recipe {recipe} needs n >= {}, got {n}", recipe.min_n())));
    }
    let parity_ok = match recipe {
        Recipe::Quad2v | Recipe::Quad2vDeficient => n % 2 == 0,
        _ => true,
    };
    if !parity_ok {
        return Err(Error::InvalidInput(format!("recipe {recipe} produces even n only, got {n}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bbox = PlacementBox::default();
    let mut b = match recipe {
        Recipe::MixD2A1 => Builder::seed_quad([Attr::A, Attr::D, Attr::D, Attr::D], bbox, &mut rng)?,
        _ => Builder::seed_edge([Attr::D, Attr::A], bbox, &mut rng)?,
    };
    let mut step = 0usize;
    let mut run = |b: &mut Builder, s: AdditionStep, rng: &mut ChaCha8Rng| -> Result<()> {
        step += 1;
        b.apply(&s, rng).map_err(|e| Error::Step { step, source: Box::new(e) })
    };
    match recipe {
        Recipe::Quad2v | Recipe::Quad2vDeficient => {
            let additions = (n - 2) / 2;
            let degenerate: Vec<usize> = if recipe == Recipe::Quad2vDeficient {
                vec![additions / 3, 2 * additions / 3]
            } else {
                vec![]
            };
            for k in 0..additions {
                let s = if degenerate.contains(&k) { all_a_quad_step(&b, &mut rng)? } else { quad_step(&b, &mut rng) };
                run(&mut b, s, &mut rng)?;
            }
        }
        Recipe::BilatD1A1 => {
            while b.n() < n {
                // 1-based id of the new vertex is b.n() + 1: odd ids are D, even ids are A
                let s = if (b.n() + 1) % 2 == 1 {
                    let i = *b.vertices_with(Attr::A).choose(&mut rng).unwrap();
                    let j = *b.vertices_with(Attr::D).choose(&mut rng).unwrap();
                    AdditionStep::one(AdditionKind::D1, &[i, j])
                } else {
                    let ds = b.vertices_with(Attr::D);
                    let pair: Vec<usize> = ds.choose_multiple(&mut rng, 2).copied().collect();
                    AdditionStep::one(AdditionKind::A1, &pair)
                };
                run(&mut b, s, &mut rng)?;
            }
        }
        Recipe::MixD2A1 => {
            let mut last_d = 3usize;
            let mut next_is_a1 = true;
            while b.n() < n {
                let s = if next_is_a1 {
                    let a = *b.vertices_with(Attr::A).choose(&mut rng).unwrap();
                    AdditionStep::one(AdditionKind::A1, &[a, last_d])
                } else {
                    d2_step(&b, &mut rng)?
                };
                run(&mut b, s.clone(), &mut rng)?;
                if s.kind == AdditionKind::D2 {
                    last_d = b.n() - 1;
                }
                next_is_a1 = !next_is_a1;
            }
        }
        Recipe::Type2D1 => {
            while b.n() < n {
                if n - b.n() >= 2 {
                    let a = *b.vertices_with(Attr::A).choose(&mut rng).unwrap();
                    let d = *b.vertices_with(Attr::D).choose(&mut rng).unwrap();
                    let s = if rng.gen_bool(0.5) { (d, a) } else { (a, d) };
                    run(&mut b, AdditionStep::two(s.0, s.1, [Attr::A, Attr::A]), &mut rng)?;
                }
                if b.n() < n {
                    let a = *b.vertices_with(Attr::A).choose(&mut rng).unwrap();
                    let d = *b.vertices_with(Attr::D).choose(&mut rng).unwrap();
                    run(&mut b, AdditionStep::one(AdditionKind::D1, &[a, d]), &mut rng)?;
                }
            }
        }
        Recipe::Minimal => {
            while n - b.n() >= 2 {
                let s = random_two_vertex_step(&b, &mut rng);
                run(&mut b, s, &mut rng)?;
            }
            if b.n() < n {
                let a = *b.vertices_with(Attr::A).choose(&mut rng).unwrap();
                let d = *b.vertices_with(Attr::D).choose(&mut rng).unwrap();
                run(&mut b, AdditionStep::one(AdditionKind::D1, &[a, d]), &mut rng)?;
            }
        }
        Recipe::Random => {
            while b.n() < n {
                let s = random_step(&b, n - b.n(), &mut rng)?;
                run(&mut b, s, &mut rng)?;
            }
        }
    }
    Ok(Generated { recipe, framework: b.framework()?, log: b.log })
}

/// 2-vertex addition along an existing edge so that the new quadrilateral
/// contains that edge: either both new vertices in A on an A-D edge, or one new
/// A and one new D on an A-A edge.
fn quad_step(b: &Builder, rng: &mut impl Rng) -> AdditionStep {
    let edges = b.graph.edges();
    let &(u, v) = edges.choose(rng).unwrap();
    let (i, j) = if rng.gen_bool(0.5) { (u, v) } else { (v, u) };
    let attrs = match (b.is_a(u), b.is_a(v)) {
        (true, true) => {
            if rng.gen_bool(0.5) {
                [Attr::A, Attr::D]
            } else {
                [Attr::D, Attr::A]
            }
        }
        (false, false) => return quad_step(b, rng),
        _ => [Attr::A, Attr::A],
    };
    // keep the SA index graph connected: no new D-vertex next to the D endpoint
    AdditionStep::two(i, j, attrs)
}

fn all_a_quad_step(b: &Builder, rng: &mut impl Rng) -> Result<AdditionStep> {
    let aa: Vec<(usize, usize)> = b.graph.edges().iter().copied().filter(|&(u, v)| b.is_a(u) && b.is_a(v)).collect();
    let &(i, j) = aa
        .choose(rng)
        .ok_or_else(|| Error::InvalidInput("no A-A edge available for an all-A quadrilateral".into()))?;
    Ok(AdditionStep { kind: AdditionKind::TwoVertexAllA, attach: vec![i, j], new_attrs: [Attr::A, Attr::A] })
}

fn d2_step(b: &Builder, rng: &mut impl Rng) -> Result<AdditionStep> {
    let ds = b.vertices_with(Attr::D);
    if ds.len() < 3 {
        return Err(precondition("D2 requires at least three D-vertices"));
    }
    for _ in 0..MAX_PLACEMENT_ATTEMPTS {
        let t: Vec<usize> = ds.choose_multiple(rng, 3).copied().collect();
        if b.non_collinear(&b.points[t[0]], &b.points[t[1]], &b.points[t[2]]) {
            return Ok(AdditionStep::one(AdditionKind::D2, &t));
        }
    }
    Err(precondition("no non-collinear D-triple available for D2"))
}

/// Random valid 2-vertex addition on an arbitrary vertex pair with at least one A-vertex.
fn random_two_vertex_step(b: &Builder, rng: &mut impl Rng) -> AdditionStep {
    loop {
        let i = rng.gen_range(0..b.n());
        let j = rng.gen_range(0..b.n());
        if i == j {
            continue;
        }
        match (b.is_a(i), b.is_a(j)) {
            (false, false) => continue,
            (true, true) => {
                let attrs = if rng.gen_bool(0.5) { [Attr::A, Attr::D] } else { [Attr::D, Attr::A] };
                return AdditionStep::two(i, j, attrs);
            }
            _ => return AdditionStep::two(i, j, [Attr::A, Attr::A]),
        }
    }
}

fn random_step(b: &Builder, remaining: usize, rng: &mut impl Rng) -> Result<AdditionStep> {
    let a = b.vertices_with(Attr::A);
    let d = b.vertices_with(Attr::D);
    let mut kinds = vec![AdditionKind::A1, AdditionKind::D1];
    if a.len() >= 2 {
        kinds.push(AdditionKind::A2);
    }
    if d.len() >= 3 {
        kinds.push(AdditionKind::D2);
    }
    if remaining >= 2 {
        kinds.push(AdditionKind::TwoVertex);
    }
    let kind = *kinds.choose(rng).unwrap();
    let pair_with = |rng: &mut dyn rand::RngCore, must: &[usize]| -> [usize; 2] {
        let x = *must.choose(rng).unwrap();
        loop {
            let y = rng.gen_range(0..b.n());
            if y != x {
                return [x, y];
            }
        }
    };
    Ok(match kind {
        AdditionKind::A1 => AdditionStep::one(kind, &pair_with(rng, &d)),
        AdditionKind::D1 => AdditionStep::one(kind, &pair_with(rng, &a)),
        AdditionKind::A2 => {
            for _ in 0..MAX_PLACEMENT_ATTEMPTS {
                let t: Vec<usize> = a.choose_multiple(rng, 2).copied().collect();
                if (b.points[t[0]] - b.points[t[1]]).norm() > 0.0 {
                    return Ok(AdditionStep::one(kind, &t));
                }
            }
            return Err(precondition("no A pair for A2"));
        }
        AdditionKind::D2 => d2_step(b, rng)?,
        _ => random_two_vertex_step(b, rng),
    })
}

/// Edge-count closed form of recipe outputs, where one exists.
pub fn expected_edge_count(recipe: Recipe, n: usize) -> Option<usize> {
    match recipe {
        Recipe::Quad2v | Recipe::Quad2vDeficient => Some(1 + 3 * (n - 2) / 2),
        Recipe::BilatD1A1 => Some(2 * n - 3),
        Recipe::MixD2A1 => {
            let added = n - 4;
            let a1 = added.div_ceil(2);
            Some(4 + 2 * a1 + 3 * (added - a1))
        }
        Recipe::Type2D1 => {
            // pairs of (2-vertex, D1) add 3 vertices and 5 edges each
            let (full, rest) = ((n - 2) / 3, (n - 2) % 3);
            Some(1 + 5 * full + if rest == 2 { 3 } else { rest * 2 })
        }
        Recipe::Minimal => Some(if n % 2 == 0 { (3 * n - 4) / 2 } else { (3 * n - 3) / 2 }),
        Recipe::Random => None,
    }
}

/// Minimal globally rigid framework on `n >= 4` vertices.
pub fn generate_minimal_rigid(n: usize, seed: u64) -> Result<Framework> {
    Ok(generate_ordering(Recipe::Minimal, n, seed)?.framework)
}

fn require_rigid(fw: &Framework, which: &str) -> Result<()> {
    if fw.n() < 3 || !is_infinitesimally_rigid(fw, DEFAULT_RTOL)? {
        return Err(precondition(format!("{which} framework does not pass the rank test at 2n-4")));
    }
    Ok(())
}

fn disjoint_union(fw1: &Framework, fw2: &Framework) -> Result<Builder> {
    let n1 = fw1.n();
    let mut b = Builder::from_framework(fw1, PlacementBox::default());
    for v in 0..fw2.n() {
        b.add_vertex(fw2.attrs.attr(v), fw2.config.points[v]);
    }
    for &(u, v) in fw2.graph.edges() {
        b.graph.push_edge(u + n1, v + n1)?;
    }
    Ok(b)
}

/// Joins two frameworks by the edges `(m, k)` and `(i, j)`, where `i, m` are
/// vertices of `fw1` and `j, k` of `fw2` (0-based in each). Exactly three of the
/// four must be A-vertices, non-collinear. With `three_edges`, all four must be
/// A-vertices and the extra edge `(i, k)` is added.
pub fn merge_add_edges(
    fw1: &Framework,
    fw2: &Framework,
    (i, m): (usize, usize),
    (j, k): (usize, usize),
    three_edges: bool,
) -> Result<Framework> {
    require_rigid(fw1, "first")?;
    require_rigid(fw2, "second")?;
    if i >= fw1.n() || m >= fw1.n() || j >= fw2.n() || k >= fw2.n() || i == m || j == k {
        return Err(precondition("merge vertices out of range or repeated"));
    }
    let quad = [(fw1.attrs.attr(i), fw1.config.points[i]), (fw1.attrs.attr(m), fw1.config.points[m]),
        (fw2.attrs.attr(j), fw2.config.points[j]), (fw2.attrs.attr(k), fw2.config.points[k])];
    let a_pts: Vec<Point> = quad.iter().filter(|(a, _)| *a == Attr::A).map(|(_, p)| *p).collect();
    let want = if three_edges { 4 } else { 3 };
    if a_pts.len() != want {
        return Err(precondition(format!(
            "merging by {} edges needs exactly {want} A-vertices among i, m, j, k (got {})",
            if three_edges { "three" } else { "two" },
            a_pts.len()
        )));
    }
    let b = disjoint_union(fw1, fw2)?;
    let scale = Configuration::new(b.points.clone()).scale();
    let tol = PLACEMENT_TOL * scale * scale;
    for s in 0..a_pts.len() {
        let o: Vec<&Point> = a_pts.iter().enumerate().filter(|&(t, _)| t != s).map(|(_, p)| p).collect();
        if o.len() == 3 && cross(&(o[1] - o[0]), &(o[2] - o[0])).abs() <= tol {
            return Err(precondition("the A-vertices among i, m, j, k are collinear"));
        }
    }
    let mut b = b;
    let n1 = fw1.n();
    b.graph.push_edge(m, k + n1)?;
    b.graph.push_edge(i, j + n1)?;
    if three_edges {
        b.graph.push_edge(i, k + n1)?;
    }
    b.framework()
}

/// Result of a contraction: the merged framework and, for every vertex of
/// `fw2`, its index in the merged framework.
#[derive(Clone, Debug)]
pub struct Contracted {
    pub framework: Framework,
    pub map2: Vec<usize>,
}

/// Identifies vertex `j` of `fw2` with `i` of `fw1` and `k` of `fw2` with `m` of
/// `fw1`. Paired vertices must share position (within 1e-9) and attribute.
pub fn merge_contract(fw1: &Framework, fw2: &Framework, (i, j): (usize, usize), (m, k): (usize, usize)) -> Result<Contracted> {
    require_rigid(fw1, "first")?;
    require_rigid(fw2, "second")?;
    if i >= fw1.n() || m >= fw1.n() || j >= fw2.n() || k >= fw2.n() || i == m || j == k {
        return Err(precondition("contraction vertices out of range or repeated"));
    }
    for (a, b) in [(i, j), (m, k)] {
        if fw1.attrs.attr(a) != fw2.attrs.attr(b) {
            return Err(precondition(format!("contracted pair ({}, {}) has different attributes", a + 1, b + 1)));
        }
        if (fw1.config.points[a] - fw2.config.points[b]).norm() > 1e-9 {
            return Err(precondition(format!("contracted pair ({}, {}) has different positions", a + 1, b + 1)));
        }
    }
    let mut b = Builder::from_framework(fw1, PlacementBox::default());
    let mut map2 = vec![usize::MAX; fw2.n()];
    map2[j] = i;
    map2[k] = m;
    for v in 0..fw2.n() {
        if v != j && v != k {
            map2[v] = b.add_vertex(fw2.attrs.attr(v), fw2.config.points[v]);
        }
    }
    for &(u, v) in fw2.graph.edges() {
        let (a, c) = (map2[u], map2[v]);
        if b.graph.edge_index(a, c).is_none() {
            b.graph.push_edge(a, c)?;
        }
    }
    Ok(Contracted { framework: b.framework()?, map2 })
}

//! Helpers shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use sarod::geometry::{rigidity_function, wrap_pi};
use sarod::graph::TripleMode;
use sarod::{Attr, Bipartition, Configuration, Framework, Graph};

/// Random connected graph on `n` vertices: a random spanning tree plus each
/// remaining pair with probability `extra`.
pub fn random_connected_graph(rng: &mut impl Rng, n: usize, extra: f64) -> Graph {
    let mut edges = Vec::new();
    for v in 1..n {
        edges.push((rng.gen_range(0..v), v));
    }
    for a in 0..n {
        for b in a + 1..n {
            if !edges.contains(&(a, b)) && rng.gen_bool(extra) {
                edges.push((a, b));
            }
        }
    }
    Graph::new(n, &edges).unwrap()
}

pub fn random_points(rng: &mut impl Rng, n: usize) -> Configuration {
    Configuration::from_xy(&(0..n).map(|_| (rng.gen::<f64>(), rng.gen::<f64>())).collect::<Vec<_>>())
}

/// Random framework with a random bipartition in which both parts are non-empty.
pub fn random_framework(seed: u64, n: usize) -> Framework {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_connected_graph(&mut rng, n, 0.35);
    let mut attrs: Vec<Attr> = (0..n).map(|_| if rng.gen_bool(0.5) { Attr::A } else { Attr::D }).collect();
    attrs[0] = Attr::A;
    attrs[n - 1] = Attr::D;
    Framework::new(g, Bipartition::new(attrs), random_points(&mut rng, n)).unwrap()
}

/// Central finite-difference Jacobian of the rigidity function; SA differences
/// are wrapped into `(-pi, pi]` so that branch jumps do not leak in.
pub fn fd_jacobian(fw: &Framework, h: f64) -> DMatrix<f64> {
    let (sa, rod) = fw.triples(TripleMode::Full);
    let p0 = fw.config.stacked();
    let rows = sa.len() + rod.len();
    let mut jac = DMatrix::zeros(rows, p0.len());
    for c in 0..p0.len() {
        let mut plus = p0.clone();
        let mut minus = p0.clone();
        plus[c] += h;
        minus[c] -= h;
        let fp = rigidity_function(&Configuration::from_stacked(&plus), &sa, &rod).unwrap();
        let fm = rigidity_function(&Configuration::from_stacked(&minus), &sa, &rod).unwrap();
        for r in 0..rows {
            let diff = if r < sa.len() { wrap_pi(fp[r] - fm[r]) } else { fp[r] - fm[r] };
            jac[(r, c)] = diff / (2.0 * h);
        }
    }
    jac
}

pub fn framework_from(n: usize, edges_one_based: &[(usize, usize)], a_one_based: &[usize], xy: &[(f64, f64)]) -> Framework {
    let g = Graph::from_one_based(n, edges_one_based).unwrap();
    let a: Vec<usize> = a_one_based.iter().map(|v| v - 1).collect();
    Framework::new(g, Bipartition::from_a_set(n, &a), Configuration::from_xy(xy)).unwrap()
}

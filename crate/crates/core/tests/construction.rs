mod common;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use common::framework_from;
use sarod::construction::{
    apply_two_vertex_addition, apply_vertex_addition, expected_edge_count, generate_minimal_rigid, generate_ordering,
    merge_add_edges, merge_contract, AdditionKind, AdditionStep, Recipe,
};
use sarod::geometry::SimilarityTransform;
use sarod::graph::{augment_anchor_clique, triple_index_graph_components, TripleMode};
use sarod::quad::{quad_global_rigidity, QuadCase};
use sarod::rigidity::{is_infinitesimally_rigid, rigidity_rank};
use sarod::{Attr, Error, Framework};

const RTOL: f64 = 1e-8;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Triangle with `A = {1}`, the smallest rigid seed for additions.
fn triangle() -> Framework {
    framework_from(3, &[(1, 2), (2, 3), (1, 3)], &[1], &[(0.0, 0.0), (1.0, 0.1), (0.4, 0.9)])
}

fn component_counts(fw: &Framework, anchors: &[usize]) -> (usize, usize) {
    let g = augment_anchor_clique(&fw.graph, anchors).unwrap();
    let (sa, rod) = sarod::graph::enumerate_triples(&g, &fw.attrs, TripleMode::Full);
    (triple_index_graph_components(&sa, &g).count, triple_index_graph_components(&rod, &g).count)
}

#[test]
fn a1_requires_a_d_attachment() {
    let fw = framework_from(3, &[(1, 2), (2, 3), (1, 3)], &[1, 2], &[(0.0, 0.0), (1.0, 0.1), (0.4, 0.9)]);
    let err = apply_vertex_addition(&fw, &AdditionStep::one(AdditionKind::A1, &[0, 1]), &mut rng(0)).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)), "{err}");
    assert!(apply_vertex_addition(&fw, &AdditionStep::one(AdditionKind::A1, &[0, 2]), &mut rng(0)).is_ok());
}

#[test]
fn d2_requires_three_d_vertices() {
    let err = apply_vertex_addition(&triangle(), &AdditionStep::one(AdditionKind::D2, &[1, 2, 0]), &mut rng(0)).unwrap_err();
    assert!(matches!(err, Error::Precondition(_)));
}

#[test]
fn legal_additions_keep_the_rank() {
    let steps = [
        AdditionStep::one(AdditionKind::A1, &[0, 1]),
        AdditionStep::one(AdditionKind::D1, &[0, 2]),
        AdditionStep::one(AdditionKind::A2, &[0, 3]),
    ];
    let mut fw = triangle();
    for (k, s) in steps.iter().enumerate() {
        fw = apply_vertex_addition(&fw, s, &mut rng(k as u64)).unwrap();
        assert!(is_infinitesimally_rigid(&fw, RTOL).unwrap(), "after step {k}");
    }
    // three D-vertices now exist: 2, 3 and 5
    fw = apply_vertex_addition(&fw, &AdditionStep::one(AdditionKind::D2, &[1, 2, 4]), &mut rng(9)).unwrap();
    assert_eq!(fw.attrs.attr(fw.n() - 1), Attr::D);
    assert!(is_infinitesimally_rigid(&fw, RTOL).unwrap());
}

#[test]
fn two_vertex_addition_adds_a_rigid_quadrilateral() {
    let fw = triangle();
    let out = apply_two_vertex_addition(&fw, 0, 1, [Attr::A, Attr::A], &mut rng(4)).unwrap();
    assert_eq!((out.n(), out.m()), (fw.n() + 2, fw.m() + 3));
    assert!(is_infinitesimally_rigid(&out, RTOL).unwrap());
    // the new 4-cycle is i - j - n+1 - n+2 - i
    let quad = framework_from(
        4,
        &[(1, 2), (2, 3), (3, 4), (1, 4)],
        &(1..=4).filter(|&k| out.attrs.is_a([0, 1, 3, 4][k - 1])).collect::<Vec<_>>(),
        &[0, 1, 3, 4].map(|v| (out.config.points[v].x, out.config.points[v].y)),
    );
    let v = quad_global_rigidity(&quad).unwrap();
    assert_eq!((v.case, v.globally_rigid), (QuadCase::ThreeA, true));
    // two D-vertices among four is not a valid pattern
    assert!(apply_two_vertex_addition(&fw, 1, 2, [Attr::A, Attr::A], &mut rng(4)).is_err());
}

#[test]
fn example_sizes() {
    let cases = [
        (Recipe::Quad2v, 70, 103),
        (Recipe::BilatD1A1, 70, 137),
        (Recipe::MixD2A1, 70, 169),
        (Recipe::Type2D1, 70, 114),
        (Recipe::Minimal, 6, 7),
        (Recipe::Minimal, 7, 9),
        (Recipe::BilatD1A1, 5, 7),
    ];
    for (recipe, n, m) in cases {
        let g = generate_ordering(recipe, n, 42).unwrap();
        assert_eq!((g.framework.n(), g.framework.m()), (n, m), "{recipe}");
        assert_eq!(expected_edge_count(recipe, n), Some(m));
    }
}

#[test]
fn example_connectivity_signatures() {
    let quad = generate_ordering(Recipe::Quad2v, 70, 42).unwrap().framework;
    assert_eq!(component_counts(&quad, &[0, 1]).0, 1);
    let bilat = generate_ordering(Recipe::BilatD1A1, 70, 42).unwrap().framework;
    assert_eq!(component_counts(&bilat, &[0, 1]).1, 1);
    let t = generate_ordering(Recipe::Type2D1, 70, 42).unwrap().framework;
    assert_eq!(component_counts(&t, &[0, 1]), (23, 47));
}

#[test]
fn generation_is_reproducible_and_logged() {
    let a = generate_ordering(Recipe::Random, 15, 9).unwrap();
    let b = generate_ordering(Recipe::Random, 15, 9).unwrap();
    assert_eq!(a.framework.config, b.framework.config);
    assert_eq!(a.framework.graph, b.framework.graph);
    assert_eq!(a.log, b.log);
    assert_eq!(a.log[0].kind, "seed");
    let placed: usize = a.log.iter().map(|e| e.placed.len()).sum();
    assert_eq!(placed, 15);
}

#[test]
fn invalid_recipes_and_sizes() {
    assert!("nope".parse::<Recipe>().is_err());
    assert_eq!("QUAD2V".parse::<Recipe>().unwrap(), Recipe::Quad2v);
    assert!(generate_ordering(Recipe::Quad2v, 7, 0).is_err());
    assert!(generate_ordering(Recipe::Minimal, 3, 0).is_err());
    assert!(generate_minimal_rigid(3, 0).is_err());
}

#[test]
fn minimal_frameworks_lose_rigidity_without_any_edge() {
    for n in [6, 7] {
        let fw = generate_minimal_rigid(n, 1).unwrap();
        assert!(is_infinitesimally_rigid(&fw, RTOL).unwrap());
        for e in 0..fw.m() {
            let cut = Framework::new(fw.graph.without_edge(e), fw.attrs.clone(), fw.config.clone()).unwrap();
            assert!(rigidity_rank(&cut, RTOL).unwrap() < 2 * n - 4, "n = {n}, edge {e}");
        }
    }
}

/// Finds `(i, m)` in `fw1` and `(j, k)` in `fw2` whose A-count is `want`.
fn pick_merge_vertices(fw1: &Framework, fw2: &Framework, want: usize) -> ((usize, usize), (usize, usize)) {
    for i in 0..fw1.n() {
        for m in 0..fw1.n() {
            for j in 0..fw2.n() {
                for k in 0..fw2.n() {
                    if i == m || j == k {
                        continue;
                    }
                    let a = [fw1.attrs.is_a(i), fw1.attrs.is_a(m), fw2.attrs.is_a(j), fw2.attrs.is_a(k)];
                    if a.iter().filter(|&&x| x).count() == want {
                        return ((i, m), (j, k));
                    }
                }
            }
        }
    }
    panic!("no vertex choice with {want} A-vertices");
}

/// Moves `fw2` well away from `fw1` so that merged positions stay distinct.
fn shifted(fw: &Framework, dx: f64) -> Framework {
    let t = SimilarityTransform { c: 1.0, theta: 0.3, xi: [dx, 0.2] };
    Framework::new(fw.graph.clone(), fw.attrs.clone(), t.apply(&fw.config)).unwrap()
}

#[test]
fn merging_by_two_edges() {
    let fw1 = generate_ordering(Recipe::Minimal, 6, 3).unwrap().framework;
    let fw2 = shifted(&generate_ordering(Recipe::Minimal, 6, 4).unwrap().framework, 1.5);
    let (im, jk) = pick_merge_vertices(&fw1, &fw2, 3);
    let merged = merge_add_edges(&fw1, &fw2, im, jk, false).unwrap();
    assert_eq!((merged.n(), merged.m()), (12, fw1.m() + fw2.m() + 2));
    assert_eq!(rigidity_rank(&merged, RTOL).unwrap(), 2 * 12 - 4);
    // two A-vertices is not enough
    let (im, jk) = pick_merge_vertices(&fw1, &fw2, 2);
    assert!(merge_add_edges(&fw1, &fw2, im, jk, false).is_err());
}

#[test]
fn merging_by_three_edges_needs_four_a_vertices() {
    let fw1 = generate_ordering(Recipe::BilatD1A1, 7, 5).unwrap().framework;
    let fw2 = shifted(&generate_ordering(Recipe::BilatD1A1, 7, 6).unwrap().framework, 1.5);
    let (im, jk) = pick_merge_vertices(&fw1, &fw2, 4);
    assert!(merge_add_edges(&fw1, &fw2, im, jk, false).is_err());
    let merged = merge_add_edges(&fw1, &fw2, im, jk, true).unwrap();
    assert_eq!(merged.m(), fw1.m() + fw2.m() + 3);
    assert_eq!(rigidity_rank(&merged, RTOL).unwrap(), 2 * 14 - 4);
}

#[test]
fn merging_rejects_flexible_inputs() {
    let flex = framework_from(4, &[(1, 2), (2, 3), (3, 4), (1, 4)], &[], &[(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0)]);
    let fw = generate_ordering(Recipe::Minimal, 6, 3).unwrap().framework;
    assert!(merge_add_edges(&flex, &fw, (0, 1), (0, 1), false).is_err());
    assert!(merge_contract(&fw, &flex, (0, 1), (2, 3)).is_err());
}

#[test]
fn contraction_merges_shared_vertices() {
    let fw1 = generate_ordering(Recipe::Minimal, 8, 7).unwrap().framework;
    let base = generate_ordering(Recipe::Minimal, 8, 8).unwrap().framework;
    // pick a pair in each with matching attributes, then move fw2 so the pairs coincide
    let (i, m) = (0, 1);
    let (j, k) = (0..base.n())
        .flat_map(|j| (0..base.n()).map(move |k| (j, k)))
        .find(|&(j, k)| j != k && base.attrs.attr(j) == fw1.attrs.attr(i) && base.attrs.attr(k) == fw1.attrs.attr(m))
        .unwrap();
    let (p, q) = (base.config.points[j], base.config.points[k]);
    let (pi, pm) = (fw1.config.points[i], fw1.config.points[m]);
    let c = (pm - pi).norm() / (q - p).norm();
    let theta = (pm - pi).y.atan2((pm - pi).x) - (q - p).y.atan2((q - p).x);
    let mut t = SimilarityTransform { c, theta, xi: [0.0, 0.0] };
    let moved = t.apply_point(&p);
    t.xi = [pi.x - moved.x, pi.y - moved.y];
    let fw2 = Framework::new(base.graph.clone(), base.attrs.clone(), t.apply(&base.config)).unwrap();
    let out = merge_contract(&fw1, &fw2, (i, j), (m, k)).unwrap();
    assert_eq!(out.framework.n(), 8 + 8 - 2);
    assert_eq!((out.map2[j], out.map2[k]), (i, m));
    assert_eq!(rigidity_rank(&out.framework, RTOL).unwrap(), 2 * out.framework.n() - 4);

    // swapping the pairs breaks either the attribute or the position match
    assert!(merge_contract(&fw1, &fw2, (i, k), (m, j)).is_err());
}

#[test]
fn contraction_rejects_attribute_mismatch() {
    let fw1 = generate_ordering(Recipe::Minimal, 6, 7).unwrap().framework;
    let mut flipped = fw1.clone();
    flipped.attrs = fw1.attrs.swapped();
    assert!(matches!(merge_contract(&fw1, &flipped, (0, 0), (1, 1)), Err(Error::Precondition(_))));
}

use nalgebra::DMatrix;
use sarod::graph::{
    augment_anchor_clique, edge_code, enumerate_triples, fundamental_cycle_basis, path_matrix,
    triple_index_graph_components, SpanningTree, Triple, TripleMode,
};
use sarod::linalg::numerical_rank;
use sarod::{Bipartition, Error, Graph};

fn triangle() -> Graph {
    Graph::from_one_based(3, &[(1, 2), (2, 3), (1, 3)]).unwrap()
}

fn k4() -> Graph {
    Graph::from_one_based(4, &[(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]).unwrap()
}

/// The six-vertex graph whose SA index graph splits into five components
/// when `A = {1, 3, 6}`.
fn six_vertex_example() -> (Graph, Bipartition) {
    let g = Graph::from_one_based(6, &[(1, 2), (1, 4), (2, 3), (2, 5), (2, 6), (3, 4), (4, 5), (5, 6)]).unwrap();
    (g, Bipartition::from_a_set(6, &[0, 2, 5]))
}

#[test]
fn incidence_of_single_edge() {
    let g = Graph::from_one_based(2, &[(1, 2)]).unwrap();
    assert_eq!(g.incidence_matrix(), DMatrix::from_row_slice(1, 2, &[-1.0, 1.0]));
}

#[test]
fn incidence_rows_sum_to_zero_and_rank_is_n_minus_one() {
    for g in [triangle(), k4()] {
        let h = g.incidence_matrix();
        for r in 0..h.nrows() {
            assert_eq!(h.row(r).sum(), 0.0);
        }
        assert_eq!(numerical_rank(&h, 1e-8).0, g.n() - 1);
    }
}

#[test]
fn rejects_loops_and_duplicates() {
    assert!(matches!(Graph::new(3, &[(1, 1)]), Err(Error::InvalidGraph(_))));
    assert!(matches!(Graph::new(3, &[(0, 1), (1, 0)]), Err(Error::InvalidGraph(_))));
    assert!(Graph::new(2, &[(0, 2)]).is_err());
}

#[test]
fn edges_are_normalized_and_order_preserved() {
    let g = Graph::new(3, &[(2, 1), (0, 2)]).unwrap();
    assert_eq!(g.edges(), &[(1, 2), (0, 2)]);
    assert_eq!(g.tail(0), 1);
    assert_eq!(g.head(0), 2);
}

#[test]
fn cycle_basis_of_tree_is_empty() {
    let g = Graph::from_one_based(4, &[(1, 2), (2, 3), (2, 4)]).unwrap();
    assert!(fundamental_cycle_basis(&g).unwrap().is_empty());
}

#[test]
fn cycle_basis_of_triangle_uses_every_edge() {
    let c = fundamental_cycle_basis(&triangle()).unwrap();
    assert_eq!(c.len(), 1);
    assert!(c.rows[0].iter().all(|&x| x == 1 || x == -1));
}

#[test]
fn cycle_basis_annihilates_incidence() {
    let g = Graph::from_one_based(4, &[(1, 2), (2, 3), (3, 4), (1, 4), (1, 3)]).unwrap();
    let c = fundamental_cycle_basis(&g).unwrap();
    assert_eq!(c.len(), 2);
    let prod = c.matrix(g.m()) * g.incidence_matrix();
    assert!(prod.iter().all(|&x| x == 0.0));
}

#[test]
fn cycle_basis_requires_connectivity() {
    let g = Graph::from_one_based(4, &[(1, 2), (3, 4)]).unwrap();
    let err = fundamental_cycle_basis(&g).unwrap_err();
    assert_eq!(err.to_string(), "graph not connected");
    assert!(path_matrix(&g, 0).is_err());
}

#[test]
fn path_matrix_on_chain() {
    let g = Graph::from_one_based(3, &[(1, 2), (2, 3)]).unwrap();
    let p = path_matrix(&g, 0).unwrap();
    assert_eq!(p.rows[0], vec![0, 0]);
    assert_eq!(p.rows[1], vec![1, 0]);
    assert_eq!(p.rows[2], vec![1, 1]);
    // from the far end every step runs against the orientation
    let p3 = path_matrix(&g, 2).unwrap();
    assert_eq!(p3.rows[0], vec![-1, -1]);
    assert_eq!(p3.rows[2], vec![0, 0]);
}

#[test]
fn path_matrix_rows_differ_by_cycle_combinations_across_trees() {
    let g = k4();
    let c = fundamental_cycle_basis(&g).unwrap().matrix(g.m());
    let bfs = sarod::graph::PathMatrix::from_tree(&g, &SpanningTree::bfs(&g, 0).unwrap(), 1).matrix();
    let dfs = sarod::graph::PathMatrix::from_tree(&g, &SpanningTree::dfs(&g, 0).unwrap(), 1).matrix();
    assert_ne!(bfs, dfs);
    let rank_c = numerical_rank(&c, 1e-8).0;
    for i in 0..g.n() {
        let diff = bfs.row(i) - dfs.row(i);
        let stacked = DMatrix::from_fn(c.nrows() + 1, g.m(), |r, e| if r < c.nrows() { c[(r, e)] } else { diff[e] });
        assert_eq!(numerical_rank(&stacked, 1e-8).0, rank_c, "row {i}");
    }
}

#[test]
fn full_and_reduced_triples_at_one_apex() {
    // apex 1 with neighbors {2, 5, 7}
    let g = Graph::from_one_based(7, &[(1, 2), (1, 5), (1, 7)]).unwrap();
    let attrs = Bipartition::from_a_set(7, &[0]);
    let (sa, rod) = enumerate_triples(&g, &attrs, TripleMode::Full);
    assert_eq!(sa.triples, vec![Triple::new(0, 1, 4), Triple::new(0, 1, 6), Triple::new(0, 4, 6)]);
    assert!(rod.is_empty(), "degree-one vertices contribute nothing");
    let (sa, _) = enumerate_triples(&g, &attrs, TripleMode::Reduced);
    assert_eq!(sa.triples, vec![Triple::new(0, 1, 4), Triple::new(0, 1, 6)]);
}

#[test]
fn edge_codes_match_labels() {
    assert_eq!(edge_code(0, 1, 6), 2);
    assert_eq!(edge_code(3, 0, 6), 4);
    assert_eq!(edge_code(4, 5, 6), 30);
    assert_eq!(edge_code(1, 2, 6), 9);
}

#[test]
fn six_vertex_example_component_counts() {
    let (g, attrs) = six_vertex_example();
    let (sa, rod) = enumerate_triples(&g, &attrs, TripleMode::Full);
    assert_eq!(triple_index_graph_components(&sa, &g).count, 5);
    assert_eq!(triple_index_graph_components(&rod, &g).count, 1);
}

#[test]
fn empty_triple_set_leaves_every_edge_isolated() {
    let g = Graph::from_one_based(4, &[(1, 2), (3, 4), (2, 3)]).unwrap();
    let attrs = Bipartition::from_a_set(4, &[]);
    let (sa, _) = enumerate_triples(&g, &attrs, TripleMode::Full);
    assert_eq!(triple_index_graph_components(&sa, &g).count, g.m());
}

#[test]
fn star_apex_joins_all_its_edges() {
    let g = Graph::from_one_based(5, &[(1, 2), (1, 3), (1, 4), (1, 5)]).unwrap();
    let (sa, _) = enumerate_triples(&g, &Bipartition::from_a_set(5, &[0]), TripleMode::Full);
    assert_eq!(triple_index_graph_components(&sa, &g).count, 1);
}

#[test]
fn anchor_clique() {
    let g = triangle();
    assert_eq!(augment_anchor_clique(&g, &[0, 1]).unwrap(), g);
    let sparse = Graph::from_one_based(4, &[(1, 4), (2, 4), (3, 4)]).unwrap();
    let aug = augment_anchor_clique(&sparse, &[0, 1, 2]).unwrap();
    assert_eq!(aug.m(), 6);
    assert_eq!(&aug.edges()[..3], sparse.edges());
    assert!(matches!(augment_anchor_clique(&g, &[1]), Err(Error::TooFewAnchors(1))));
    assert!(augment_anchor_clique(&g, &[1, 1]).is_err());
}

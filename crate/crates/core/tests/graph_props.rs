use icbound::graph::{parse_edge_list, render_edge_list};
use icbound::{Edge, HazardMatrix, InfluencerSet, ProbGraph};
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = ProbGraph> {
    (2usize..12).prop_flat_map(|n| {
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j))).collect();
        let m = pairs.len();
        (Just(n), proptest::sample::subsequence(pairs, 0..=m.min(30)), proptest::collection::vec(0.0f64..0.99, 30))
            .prop_map(|(n, pairs, ps)| {
                ProbGraph::new(n, pairs.into_iter().zip(ps).map(|((s, d), p)| Edge::new(s, d, p))).unwrap()
            })
    })
}

fn set_strategy(n: usize) -> impl Strategy<Value = InfluencerSet> {
    proptest::collection::btree_set(0..n, 1..=n).prop_map(move |s| InfluencerSet::new(s, n).unwrap())
}

proptest! {
    #[test]
    fn indexes_enumerate_edges(g in graph_strategy()) {
        let mut seen_out = vec![0usize; g.edge_count()];
        let mut seen_in = vec![0usize; g.edge_count()];
        for v in 0..g.node_count() {
            for id in g.out_edges(v) {
                prop_assert_eq!(g.edge(id).src, v);
                seen_out[id] += 1;
            }
            for &id in g.in_edges(v) {
                prop_assert_eq!(g.edge(id).dst, v);
                seen_in[id] += 1;
            }
        }
        prop_assert!(seen_out.iter().chain(&seen_in).all(|&c| c == 1));
    }

    #[test]
    fn hazard_recovers_probabilities(g in graph_strategy()) {
        let h = HazardMatrix::from_prob(&g);
        prop_assert!(h.matrix().nnz() <= g.edge_count());
        for e in g.edges() {
            let hij = h.get(e.src, e.dst);
            prop_assert!(hij > 0.0);
            prop_assert!((1.0 - (-hij).exp() - e.p).abs() <= 1e-12);
        }
    }

    #[test]
    fn masking_zeroes_columns_and_shrinks(
        (g, a) in graph_strategy().prop_flat_map(|g| { let n = g.node_count(); (Just(g), set_strategy(n)) })
    ) {
        let h = HazardMatrix::from_prob(&g);
        let m = h.mask_columns(&a).unwrap();
        for (i, j, v) in m.matrix().entries() {
            prop_assert!(!a.contains(j));
            prop_assert!(v <= h.get(i, j));
        }
        for &j in a.members() {
            let col: f64 = (0..g.node_count()).map(|i| m.get(i, j)).sum();
            prop_assert_eq!(col, 0.0);
        }
        prop_assert!(m.mask_columns(&a).is_err());
    }

    #[test]
    fn edge_list_round_trip(g in graph_strategy()) {
        let back = parse_edge_list(&render_edge_list(&g)).unwrap();
        prop_assert_eq!(back.node_count(), g.node_count());
        prop_assert_eq!(back.edges(), g.edges());
    }
}

#[test]
fn construction_errors_name_the_edge() {
    let cases = [
        (2, vec![Edge::new(0, 1, 1.0)], "probability 1 not allowed"),
        (3, vec![Edge::new(0, 0, 0.3)], "self-loop"),
        (3, vec![Edge::new(0, 1, 0.3), Edge::new(0, 1, 0.2)], "duplicate"),
        (3, vec![Edge::new(0, 5, 0.3)], "out of range"),
        (3, vec![Edge::new(0, 1, -0.1)], "outside"),
    ];
    for (n, edges, needle) in cases {
        let msg = ProbGraph::new(n, edges).unwrap_err().to_string();
        assert!(msg.contains(needle), "{msg}");
    }
    assert!(ProbGraph::new(0, []).is_err());
}

#[test]
fn file_round_trip() {
    let g = ProbGraph::undirected(4, [(0, 1, 0.1), (1, 2, 1.0 / 3.0), (2, 3, 0.7)]).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.txt");
    icbound::graph::write_edge_list(&g, &path).unwrap();
    let back = icbound::graph::read_edge_list(&path).unwrap();
    assert_eq!(back.edges(), g.edges());
}

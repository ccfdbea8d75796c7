use proptest::prelude::*;

use orikit::exact::{chi2_exact, chio_coloring, chio_exact, ExactConfig};
use orikit::graph::oriented_subdivision;
use orikit::greedy::greedy_homomorphism_to_tournament;
use orikit::targets::{qr_tournament, random_full, random_tournament};
use orikit::verify::{
    check_2dipath_coloring, check_comprehensive, check_full, check_homomorphism,
    check_oriented_coloring, check_proper, recheck_comprehensive, recheck_full,
};
use orikit::{
    degeneracy_ordering, orientation_vector, two_dipath_conflict_graph, ColoringAssignment,
    ColoringKind, OrientedGraph, SignVector, SimpleGraph,
};

/// Oriented graphs on up to `max_n` vertices: each pair is absent, forward
/// or backward.
fn oriented_graph(max_n: usize) -> impl Strategy<Value = OrientedGraph> {
    (1..=max_n).prop_flat_map(|n| {
        let pairs = n * (n - 1) / 2;
        proptest::collection::vec(0u8..3, pairs).prop_map(move |choice| {
            let mut arcs = Vec::new();
            let mut it = choice.into_iter();
            for i in 0..n {
                for j in i + 1..n {
                    match it.next().unwrap() {
                        1 => arcs.push((i, j)),
                        2 => arcs.push((j, i)),
                        _ => {}
                    }
                }
            }
            OrientedGraph::from_arcs(n, arcs).unwrap()
        })
    })
}

fn with_coloring(
    max_n: usize,
    colors: u32,
) -> impl Strategy<Value = (OrientedGraph, ColoringAssignment)> {
    oriented_graph(max_n).prop_flat_map(move |g| {
        let n = g.n();
        (Just(g), proptest::collection::vec(1..=colors, n))
            .prop_map(|(g, c)| (g, ColoringAssignment::new(c, ColoringKind::Oriented)))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn edge_list_round_trip(g in oriented_graph(12)) {
        let text = g.to_edge_list();
        let back = OrientedGraph::parse(&text).unwrap();
        prop_assert_eq!(&back, &g);
        prop_assert_eq!(back.to_edge_list(), text);
    }

    #[test]
    fn degeneracy_ordering_is_valid(g in oriented_graph(12)) {
        let ord = degeneracy_ordering(&g);
        let pos = ord.positions();
        prop_assert!(ord.d <= g.max_degree());
        let back: Vec<usize> = (0..g.n())
            .map(|v| g.neighbors(v).iter().filter(|&&u| pos[u] < pos[v]).count())
            .collect();
        prop_assert!(back.iter().all(|&b| b <= ord.d));
        // Removing a vertex never raises the degeneracy.
        if g.n() > 1 {
            let keep: Vec<(usize, usize)> = g.arcs().iter()
                .filter(|&&(u, v)| u != 0 && v != 0)
                .map(|&(u, v)| (u - 1, v - 1))
                .collect();
            let h = OrientedGraph::from_arcs(g.n() - 1, keep).unwrap();
            prop_assert!(degeneracy_ordering(&h).d <= ord.d);
        }
    }

    #[test]
    fn conflict_graph_contains_underlying(g in oriented_graph(10)) {
        let c = two_dipath_conflict_graph(&g);
        prop_assert!(g.arcs().iter().all(|&(u, v)| c.has_edge(u, v)));
    }

    #[test]
    fn checks_are_nested((g, c) in with_coloring(8, 4)) {
        let oriented = check_oriented_coloring(&g, &c).unwrap().passed();
        let dipath = check_2dipath_coloring(&g, &c).unwrap().passed();
        let proper = check_proper(&g, &c).unwrap().passed();
        prop_assert!(!oriented || dipath);
        prop_assert!(!dipath || proper);
        // A 2-dipath colouring is exactly a proper colouring of the conflict graph.
        let conflict = two_dipath_conflict_graph(&g);
        let conflict_proper = conflict.edges().iter().all(|&(u, v)| c.get(u) != c.get(v));
        prop_assert_eq!(dipath, conflict_proper);
    }

    #[test]
    fn failure_witnesses_name_real_violations((g, c) in with_coloring(8, 3)) {
        let cert = check_oriented_coloring(&g, &c).unwrap();
        if let Some(w) = cert.witness {
            match w.tag.as_str() {
                "monochromatic_arc" => {
                    prop_assert!(g.has_arc(w.vertices[0], w.vertices[1]));
                    prop_assert_eq!(c.get(w.vertices[0]), c.get(w.vertices[1]));
                }
                "opposing_arcs" => {
                    let (u, v, x, y) = (w.vertices[0], w.vertices[1], w.vertices[2], w.vertices[3]);
                    prop_assert!(g.has_arc(u, v) && g.has_arc(x, y));
                    prop_assert!(c.get(u) == c.get(y) && c.get(v) == c.get(x));
                }
                other => prop_assert!(false, "unexpected tag {}", other),
            }
        }
    }

    #[test]
    fn orientation_vector_length(g in oriented_graph(8), v in 0usize..8) {
        prop_assume!(v < g.n());
        let set: Vec<usize> = g.neighbors(v);
        let sv = orientation_vector(&g, &set, v).unwrap();
        prop_assert_eq!(sv.len(), set.len());
        prop_assert_eq!(SignVector::from_index(sv.index(), sv.len()), sv);
    }

    #[test]
    fn subdivision_shape(edges in proptest::collection::btree_set((0usize..6, 0usize..6), 0..12)) {
        let edges: Vec<(usize, usize)> = edges.into_iter().filter(|(a, b)| a < b).collect();
        let g = SimpleGraph::from_edges(6, edges.clone()).unwrap();
        let h = oriented_subdivision(&g);
        prop_assert_eq!(h.n(), 6 + g.edges().len());
        for (i, &(u, v)) in g.edges().iter().enumerate() {
            let x = 6 + i;
            prop_assert_eq!(h.in_neighbors(x), &[u][..]);
            prop_assert_eq!(h.out_neighbors(x), &[v][..]);
        }
        prop_assert!(h.arcs().iter().all(|&(u, v)| (u < 6) != (v < 6)));
    }

    #[test]
    fn homomorphism_pulls_back_to_oriented_coloring(g in oriented_graph(9), seed in any::<u64>()) {
        let t = random_tournament(24, seed);
        if let Ok(out) = greedy_homomorphism_to_tournament(&g, &t) {
            prop_assert!(check_homomorphism(&g, t.graph(), &out.map).unwrap().passed());
            prop_assert!(check_oriented_coloring(&g, &out.map.pullback()).unwrap().passed());
        }
    }

    #[test]
    fn tournament_checks_are_worker_independent(seed in any::<u64>(), k in 1usize..=3, t in 1usize..=3) {
        let tour = random_tournament(14, seed);
        let a = check_comprehensive(tour.graph(), k, t, 1).unwrap();
        let b = check_comprehensive(tour.graph(), k, t, 3).unwrap();
        prop_assert_eq!(&a, &b);
        if let Some(w) = &a.witness {
            prop_assert!(recheck_comprehensive(tour.graph(), t, w));
        }
    }

    #[test]
    fn full_checks_are_worker_independent(seed in any::<u64>(), parts in 2usize..=3, t in 1usize..=2) {
        let kp = random_full(parts, 6, seed).unwrap();
        let a = check_full(&kp, t, 1).unwrap();
        let b = check_full(&kp, t, 2).unwrap();
        prop_assert_eq!(&a, &b);
        if let Some(w) = &a.witness {
            prop_assert!(recheck_full(&kp, w));
        }
    }

    #[test]
    fn downgrade_holds_on_certified_tournaments(seed in any::<u64>(), k in 2usize..=3) {
        let tour = random_tournament(30, seed);
        for t in 1..=3 {
            if check_comprehensive(tour.graph(), k, t, 1).unwrap().passed() {
                prop_assert!(check_comprehensive(tour.graph(), k - 1, 2 * t, 1).unwrap().passed());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(60))]

    #[test]
    fn oracle_sandwich(g in oriented_graph(7)) {
        let cfg = ExactConfig::default();
        let chi2 = chi2_exact(&g, &cfg).unwrap();
        let chio = chio_exact(&g, &cfg).unwrap();
        prop_assert!(chi2 <= chio);
        prop_assert!(chio as u64 <= (1u64 << chi2) - 1);
        let c = chio_coloring(&g, &cfg).unwrap();
        prop_assert!(check_oriented_coloring(&g, &c).unwrap().passed());
    }
}

#[test]
fn greedy_steps_respect_the_counting_bound() {
    // Paley tournament on 7 vertices: (2,1)-comprehensive, so each step with
    // back set A of size <= 2 sees at least 2^(2-|A|) - forbidden choices.
    let t = qr_tournament(7).unwrap();
    assert!(check_comprehensive(t.graph(), 2, 1, 1).unwrap().passed());
    for n in 2..=8 {
        let g = OrientedGraph::directed_path(n);
        let out = greedy_homomorphism_to_tournament(&g, &t).unwrap();
        for s in &out.trace {
            let floor = (1i64 << (2 - s.back)) - s.forbidden as i64;
            assert!(s.eligible as i64 >= floor, "{s:?}");
        }
    }
}

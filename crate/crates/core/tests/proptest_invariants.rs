//! Structural invariants over randomly generated graphs and sequences.

use proptest::collection::vec;
use proptest::prelude::*;

use dissemnet_core::dissemination::InfluenceState;
use dissemnet_core::graphs::{GraphSequence, LabeledDigraph};
use dissemnet_core::io::{
    graph_from_json, graph_to_json, sequence_from_jsonl, sequence_to_jsonl,
};
use dissemnet_core::nodeset::NodeId;

/// A valid digraph on 1..=n from an arbitrary pair soup: dedup, drop loops.
fn arb_graph(max_n: u32) -> impl Strategy<Value = LabeledDigraph> {
    (1..=max_n, any::<bool>()).prop_flat_map(move |(n, undirected)| {
        vec((1..=n, 1..=n), 0..=(n as usize * 2)).prop_map(move |pairs| {
            let mut seen = std::collections::BTreeSet::new();
            let edges: Vec<(u32, u32)> = pairs
                .into_iter()
                .filter(|&(u, v)| u != v)
                .filter(|&(u, v)| {
                    if undirected {
                        seen.insert((u.min(v), u.max(v)))
                    } else {
                        seen.insert((u, v))
                    }
                })
                .collect();
            LabeledDigraph::new(n, &edges, undirected).expect("filtered edges are valid")
        })
    })
}

proptest! {
    #[test]
    fn graph_json_round_trips(g in arb_graph(9)) {
        let back = graph_from_json(&graph_to_json(&g)).unwrap();
        prop_assert_eq!(back, g);
    }

    #[test]
    fn sequence_jsonl_round_trips(graphs in vec(arb_graph(5), 1..6)) {
        // Force a common n by rebuilding every graph on the largest one.
        let n = graphs.iter().map(|g| g.n()).max().unwrap();
        let rounds: Vec<LabeledDigraph> = graphs
            .iter()
            .map(|g| {
                let edges: Vec<(u32, u32)> = if g.is_undirected() {
                    g.undirected_edges().iter().map(|&(u, v)| (u.get(), v.get())).collect()
                } else {
                    g.edges().iter().map(|&(u, v)| (u.get(), v.get())).collect()
                };
                LabeledDigraph::new(n, &edges, g.is_undirected()).unwrap()
            })
            .collect();
        let seq = GraphSequence::new(n, rounds, None).unwrap();
        let back = sequence_from_jsonl(&sequence_to_jsonl(&seq)).unwrap();
        prop_assert_eq!(back, seq);
    }

    #[test]
    fn reversal_is_involutive(g in arb_graph(9)) {
        prop_assert_eq!(g.reverse().reverse(), g);
    }

    #[test]
    fn step_is_monotone_and_dual(g in arb_graph(8)) {
        let state = InfluenceState::initial(g.n()).unwrap();
        let next = state.step(&g).unwrap();
        for i in 0..g.n() as usize {
            let p = NodeId::from_index(i);
            prop_assert!(state.influence_set(p).is_subset(next.influence_set(p)));
            prop_assert!(next.influence_set(p).contains(p));
        }
        // Duality: q ∈ S_p  ⟺  p ∈ K_q, checked pointwise.
        for i in 0..g.n() as usize {
            for j in 0..g.n() as usize {
                let (p, q) = (NodeId::from_index(i), NodeId::from_index(j));
                prop_assert_eq!(
                    next.influence_set(p).contains(q),
                    next.knowledge_set(q).contains(p)
                );
            }
        }
    }
}

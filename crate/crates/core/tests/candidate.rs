mod common;

use std::collections::BTreeSet;

use common::*;
use lgs::candidate::*;
use lgs::graph::{tensor_product, Edge, HostGraph, NodeId};
use lgs::guest::Guest;
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

#[test]
fn triangle_witness_passes_all_conditions() {
    let (guest, host) = triangle_instance();
    let report = check_all(&guest, &host, &triangle_witness()).unwrap();
    assert!(report.passed(), "{report}");
}

#[test]
fn removing_any_single_element_breaks_the_witness() {
    let (guest, host) = triangle_instance();
    let w = triangle_witness();
    for p in &w.nodes {
        let mut c = w.clone();
        c.nodes.remove(p);
        assert!(!is_lgs(&guest, &host, &c), "without {p:?}");
    }
    // dropping the head pair together with its edge leaves a shorter chain,
    // which is itself an LGS
    let mut c = w.clone();
    c.remove_node(&pair("u", "x"));
    assert!(is_lgs(&guest, &host, &c));
    // dropping the must pair breaks LGS1 at m
    let mut c = w.clone();
    c.remove_node(&pair("m", "y"));
    let report = check_all(&guest, &host, &c).unwrap();
    assert!(report
        .result(Condition::Lgs1)
        .violations
        .contains(&Violation::MissingMust {
            node: NodeId::from("m")
        }));
    for e in &w.edges {
        let mut c = w.clone();
        c.edges.remove(e);
        assert!(!is_lgs(&guest, &host, &c), "without {e:?}");
    }
}

#[test]
fn empty_candidate_fails_only_the_must_condition() {
    let (guest, host) = triangle_instance();
    let report = check_all(&guest, &host, &CandidateSubgraph::default()).unwrap();
    assert_eq!(report.failed_conditions(), vec![Condition::Lgs1]);
}

#[test]
fn non_unique_match_is_reported() {
    let graph = HostGraph::from_triples([], ["p"]);
    let guest = Guest::full_choice(
        graph,
        BTreeSet::new(),
        [NodeId::from("p")].into(),
        BTreeSet::new(),
    )
    .unwrap();
    let host = HostGraph::from_triples([], ["x", "y"]);
    let cand = CandidateSubgraph::new([pair("p", "x"), pair("p", "y")].into(), BTreeSet::new());
    let report = check_all(&guest, &host, &cand).unwrap();
    assert_eq!(report.failed_conditions(), vec![Condition::Lgs2]);
}

#[test]
fn shared_exclusive_host_is_reported() {
    let graph = HostGraph::from_triples([], ["p", "q"]);
    let guest = Guest::full_choice(
        graph,
        BTreeSet::new(),
        BTreeSet::new(),
        [NodeId::from("p")].into(),
    )
    .unwrap();
    let host = HostGraph::from_triples([], ["x"]);
    let cand = CandidateSubgraph::new([pair("p", "x"), pair("q", "x")].into(), BTreeSet::new());
    let report = check_all(&guest, &host, &cand).unwrap();
    assert_eq!(report.failed_conditions(), vec![Condition::Lgs3]);
    // two non-exclusive nodes may share a host node
    let guest = Guest::full_choice(
        guest.graph().clone(),
        BTreeSet::new(),
        BTreeSet::new(),
        BTreeSet::new(),
    )
    .unwrap();
    assert!(is_lgs(&guest, &host, &cand));
}

#[test]
fn pair_without_realised_choice_is_reported() {
    let (guest, host) = triangle_instance();
    let mut c = triangle_witness();
    c.nodes.insert(pair("u", "y"));
    let report = check_all(&guest, &host, &c).unwrap();
    assert!(report.failed_conditions().contains(&Condition::Lgs4));
    assert_eq!(
        report.result(Condition::Lgs4).violations,
        vec![Violation::NoRealisedChoice {
            pair: pair("u", "y")
        }]
    );
}

#[test]
fn edge_outside_realised_choice_is_unjustified() {
    let graph = HostGraph::from_triples([("p", "a", "q"), ("p", "b", "r")], []);
    let guest =
        Guest::full_choice(graph, BTreeSet::new(), BTreeSet::new(), BTreeSet::new()).unwrap();
    let host = HostGraph::from_triples([("x", "a", "y")], []);
    let edge = Edge::new(pair("p", "x"), "a", pair("q", "y"));
    let cand = CandidateSubgraph::new(
        [pair("p", "x"), pair("q", "y")].into(),
        [edge.clone()].into(),
    );
    let violations = check_lgs4(&guest, &host, &cand).violations;
    assert!(violations.contains(&Violation::UnjustifiedEdge { edge }));
    assert!(violations.contains(&Violation::NoRealisedChoice {
        pair: pair("p", "x")
    }));
}

#[test]
fn disconnected_pair_is_reported() {
    let graph = HostGraph::from_triples([("u", "a", "u"), ("u", "a", "m")], []);
    let guest = lgs::algebra::linear_choice(graph, [NodeId::from("m")].into()).unwrap();
    let host = HostGraph::from_triples([("x", "a", "x")], ["y"]);
    let cand = CandidateSubgraph::new(
        [pair("u", "x"), pair("m", "y")].into(),
        [Edge::new(pair("u", "x"), "a", pair("u", "x"))].into(),
    );
    let report = check_all(&guest, &host, &cand).unwrap();
    assert_eq!(report.failed_conditions(), vec![Condition::Lgs5]);
    assert_eq!(
        report.result(Condition::Lgs5).violations,
        vec![Violation::Disconnected {
            pair: pair("u", "x"),
            must: NodeId::from("m"),
        }]
    );
}

#[test]
fn structural_errors_are_distinct_from_violations() {
    let (guest, host) = triangle_instance();
    let mut c = triangle_witness();
    c.nodes.insert(pair("zz", "x"));
    assert!(matches!(
        check_all(&guest, &host, &c),
        Err(StructuralError::UnknownGuestNode(_))
    ));
    let mut c = triangle_witness();
    c.edges
        .insert(Edge::new(pair("u", "x"), "b", pair("u", "z")));
    assert!(matches!(
        check_all(&guest, &host, &c),
        Err(StructuralError::NoGuestEdge(_))
    ));
    let mut c = triangle_witness();
    c.edges
        .insert(Edge::new(pair("u", "x"), "a", pair("m", "q")));
    assert!(matches!(
        check_all(&guest, &host, &c),
        Err(StructuralError::DanglingEdge(_))
    ));
}

/// Random subgraph of `G × H`, biased towards keeping most of it.
fn random_candidate(rng: &mut StdRng, guest: &Guest, host: &HostGraph) -> CandidateSubgraph {
    let product = tensor_product(guest.graph(), host);
    let keep = rng.gen_range(0.3..1.0);
    let nodes: BTreeSet<_> = product
        .nodes()
        .iter()
        .filter(|_| rng.gen_bool(keep))
        .cloned()
        .collect();
    let edges = product
        .edges()
        .iter()
        .filter(|e| nodes.contains(&e.source) && nodes.contains(&e.target) && rng.gen_bool(keep))
        .cloned()
        .collect();
    CandidateSubgraph::new(nodes, edges)
}

/// Drops offending pairs and edges until LGS4 holds.
fn close_under_lgs4(
    guest: &Guest,
    host: &HostGraph,
    mut cand: CandidateSubgraph,
) -> CandidateSubgraph {
    loop {
        let violations = check_lgs4(guest, host, &cand).violations;
        if violations.is_empty() {
            return cand;
        }
        for v in violations {
            match v {
                Violation::NoRealisedChoice { pair } => cand.remove_node(&pair),
                Violation::UnjustifiedEdge { edge } => {
                    cand.edges.remove(&edge);
                }
                _ => unreachable!(),
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn full_choice_makes_connectivity_redundant(seed in any::<u64>()) {
        let mut rng = StdRng::seed_from_u64(seed);
        let (ng, nh) = (rng.gen_range(1..=4), rng.gen_range(1..=4));
        let guest = random_full_choice_guest(&mut rng, ng, 0.2);
        let host = random_graph(&mut rng, "h", nh, 2, 0.3);
        let cand = close_under_lgs4(&guest, &host, random_candidate(&mut rng, &guest, &host));
        prop_assert!(check_lgs4(&guest, &host, &cand).passed());
        prop_assert!(check_lgs5(&guest, &host, &cand).passed());
    }
}

//! Seeded random instances shared by the integration tests.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use lgs::algebra::linear_choice;
use lgs::encode::DecoratedGraph;
use lgs::graph::{Edge, HostGraph, Label, NodeId};
use lgs::guest::{ChoiceFamily, ChoiceSet, Guest};
use lgs::regex::RegexAst;
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::Rng;

pub const LABELS: [&str; 2] = ["a", "b"];

pub fn node(prefix: &str, i: usize) -> NodeId {
    NodeId::new(format!("{prefix}{i}"))
}

/// Graph on `prefix0..prefix{n-1}`; each possible labelled edge is present
/// with probability `density`.
pub fn random_graph(
    rng: &mut StdRng,
    prefix: &str,
    n: usize,
    labels: usize,
    density: f64,
) -> HostGraph {
    let nodes: BTreeSet<NodeId> = (0..n).map(|i| node(prefix, i)).collect();
    let mut edges = BTreeSet::new();
    for s in 0..n {
        for t in 0..n {
            for a in &LABELS[..labels] {
                if rng.gen_bool(density) {
                    edges.insert(Edge::new(node(prefix, s), *a, node(prefix, t)));
                }
            }
        }
    }
    let alphabet: BTreeSet<Label> = LABELS[..labels].iter().map(|a| Label::from(*a)).collect();
    HostGraph::new(alphabet, nodes, edges).unwrap()
}

/// Graph with exactly `m` distinct random edges (or as many as fit).
pub fn random_graph_with_edges(
    rng: &mut StdRng,
    prefix: &str,
    n: usize,
    m: usize,
    labels: usize,
) -> HostGraph {
    let mut all = Vec::new();
    for s in 0..n {
        for t in 0..n {
            for a in &LABELS[..labels] {
                all.push(Edge::new(node(prefix, s), *a, node(prefix, t)));
            }
        }
    }
    all.shuffle(rng);
    all.truncate(m);
    let alphabet: BTreeSet<Label> = LABELS[..labels].iter().map(|a| Label::from(*a)).collect();
    HostGraph::new(
        alphabet,
        (0..n).map(|i| node(prefix, i)).collect(),
        all.into_iter().collect(),
    )
    .unwrap()
}

fn random_subset(rng: &mut StdRng, nodes: &BTreeSet<NodeId>, p: f64) -> BTreeSet<NodeId> {
    nodes.iter().filter(|_| rng.gen_bool(p)).cloned().collect()
}

/// A random choice family covering `out`.
pub fn random_family(rng: &mut StdRng, out: &[Edge<NodeId>]) -> ChoiceFamily {
    let mut family = ChoiceFamily::new();
    if out.is_empty() {
        if rng.gen_bool(0.8) {
            family.insert(ChoiceSet::new());
        }
        return family;
    }
    for _ in 0..rng.gen_range(1..=3) {
        let gamma: ChoiceSet = out.iter().filter(|_| rng.gen_bool(0.5)).cloned().collect();
        if !gamma.is_empty() {
            family.insert(gamma);
        }
    }
    let covered: BTreeSet<&Edge<NodeId>> = family.iter().flatten().collect();
    let rest: ChoiceSet = out
        .iter()
        .filter(|e| !covered.contains(e))
        .cloned()
        .collect();
    if !rest.is_empty() {
        family.insert(rest);
    }
    if rng.gen_bool(0.15) {
        family.insert(ChoiceSet::new());
    }
    family
}

/// Fully random guest. `decorated` enables unique/exclusive sets.
pub fn random_guest(rng: &mut StdRng, n: usize, density: f64, decorated: bool) -> Guest {
    let graph = random_graph(rng, "g", n, 2, density);
    let must = random_subset(rng, graph.nodes(), 0.5);
    let (unique, exclusive) = if decorated {
        (
            random_subset(rng, graph.nodes(), 0.4),
            random_subset(rng, graph.nodes(), 0.3),
        )
    } else {
        (BTreeSet::new(), BTreeSet::new())
    };
    let choice: BTreeMap<NodeId, ChoiceFamily> = graph
        .nodes()
        .iter()
        .map(|v| {
            let out: Vec<Edge<NodeId>> = graph.out_edges(v).cloned().collect();
            (v.clone(), random_family(rng, &out))
        })
        .collect();
    Guest::new(graph, must, unique, exclusive, choice).unwrap()
}

/// Guest with `Choice = λx.{out(x)}` (sinks get `{∅}`).
pub fn random_full_choice_guest(rng: &mut StdRng, n: usize, density: f64) -> Guest {
    let graph = random_graph(rng, "g", n, 2, density);
    let must = random_subset(rng, graph.nodes(), 0.5);
    Guest::full_choice(graph, must, BTreeSet::new(), BTreeSet::new()).unwrap()
}

/// Guest with linear choice and a random must set.
pub fn random_linear_guest(rng: &mut StdRng, n: usize, density: f64) -> Guest {
    let graph = random_graph(rng, "g", n, 2, density);
    let must = random_subset(rng, graph.nodes(), 0.5);
    linear_choice(graph, must).unwrap()
}

pub fn random_regex(rng: &mut StdRng, depth: u32, labels: usize) -> RegexAst {
    let leaf = |rng: &mut StdRng| {
        if rng.gen_bool(0.08) {
            RegexAst::EmptyLang
        } else {
            RegexAst::lit(*LABELS[..labels].choose(rng).unwrap())
        }
    };
    if depth == 0 || rng.gen_bool(0.3) {
        return leaf(rng);
    }
    match rng.gen_range(0..3) {
        0 => random_regex(rng, depth - 1, labels).concat(random_regex(rng, depth - 1, labels)),
        1 => random_regex(rng, depth - 1, labels).union(random_regex(rng, depth - 1, labels)),
        _ => random_regex(rng, depth - 1, labels).plus(),
    }
}

/// Decorated query on `q0..q{n-1}` with nonempty languages of depth ≤ `depth`.
pub fn random_decorated(rng: &mut StdRng, n: usize, density: f64, depth: u32) -> DecoratedGraph {
    let nodes: BTreeSet<NodeId> = (0..n).map(|i| node("q", i)).collect();
    let mut edges = BTreeMap::new();
    for s in 0..n {
        for t in 0..n {
            if rng.gen_bool(density) {
                let r = loop {
                    let r = random_regex(rng, depth, 2);
                    if !r.is_empty_language() {
                        break r;
                    }
                };
                edges.insert((node("q", s), node("q", t)), r);
            }
        }
    }
    let alphabet = LABELS.iter().map(|a| Label::from(*a)).collect();
    DecoratedGraph::new(alphabet, nodes, edges).unwrap()
}

/// Guest and host used throughout: the guest `u -a-> u`, `u -a-> m`,
/// `m -b-> v` with linear choice and `m` must; the host is the triangle
/// `x -a-> z -a-> y -b-> x`.
pub fn triangle_instance() -> (Guest, HostGraph) {
    let graph = HostGraph::from_triples([("u", "a", "u"), ("u", "a", "m"), ("m", "b", "v")], []);
    let guest = linear_choice(graph, [NodeId::from("m")].into()).unwrap();
    let host = HostGraph::from_triples([("x", "a", "z"), ("z", "a", "y"), ("y", "b", "x")], []);
    (guest, host)
}

pub fn pair(g: &str, h: &str) -> (NodeId, NodeId) {
    (NodeId::from(g), NodeId::from(h))
}

/// The four-pair chain `(u,x) -a-> (u,z) -a-> (m,y) -b-> (v,x)`.
pub fn triangle_witness() -> lgs::candidate::CandidateSubgraph {
    let nodes = [
        pair("u", "x"),
        pair("u", "z"),
        pair("m", "y"),
        pair("v", "x"),
    ];
    let edges = [
        Edge::new(pair("u", "x"), "a", pair("u", "z")),
        Edge::new(pair("u", "z"), "a", pair("m", "y")),
        Edge::new(pair("m", "y"), "b", pair("v", "x")),
    ];
    lgs::candidate::CandidateSubgraph::new(nodes.into(), edges.into())
}

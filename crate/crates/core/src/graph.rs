//! Labelled directed graphs, paths, tensor products and reachability.
//!
//! A [`Graph`] is a finite alphabet, a finite node set and a *set* of labelled
//! edges `(source, label, target)`. Parallel edges are allowed only when their
//! labels differ. Hosts and guest skeletons use [`HostGraph`] (string node
//! identifiers); the tensor product of two graphs is a graph over node pairs.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque node identifier. Names are semantic: the guest algebra merges
/// operands by name.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(String);

impl NodeId {
    pub fn new(name: impl Into<String>) -> Self {
        NodeId(name.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for NodeId {
    fn from(s: &str) -> Self {
        NodeId(s.to_owned())
    }
}

impl From<String> for NodeId {
    fn from(s: String) -> Self {
        NodeId(s)
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// An edge label (a symbol of the alphabet).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Label(String);

impl Label {
    pub fn new(symbol: impl Into<String>) -> Self {
        Label(symbol.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl From<&str> for Label {
    fn from(s: &str) -> Self {
        Label(s.to_owned())
    }
}

impl From<String> for Label {
    fn from(s: String) -> Self {
        Label(s)
    }
}

impl From<char> for Label {
    fn from(c: char) -> Self {
        Label(c.to_string())
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

/// A node of a tensor product: `(left node, right node)`.
pub type PairNode = (NodeId, NodeId);

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge<N> {
    pub source: N,
    pub label: Label,
    pub target: N,
}

impl<N> Edge<N> {
    pub fn new(source: N, label: impl Into<Label>, target: N) -> Self {
        Edge {
            source,
            label: label.into(),
            target,
        }
    }
}

impl<N: fmt::Display> fmt::Display for Edge<N> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.source, self.label, self.target)
    }
}

/// Pretty wrapper for pair nodes in diagnostics.
pub struct Pair<'a>(pub &'a PairNode);

impl fmt::Display for Pair<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{})", self.0 .0, self.0 .1)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GraphError {
    #[error("edge {edge} has endpoint `{node}` that is not a node of the graph")]
    DanglingEdge { edge: String, node: String },
    #[error("edge {edge} carries label `{label}` outside the alphabet")]
    LabelOutsideAlphabet { edge: String, label: String },
    #[error("path must contain at least one edge")]
    EmptyPath,
    #[error("path edges {index} and {next} do not chain")]
    BrokenPath { index: usize, next: usize },
}

/// A finite labelled directed graph `(Σ, V, E)` with `E ⊆ V × Σ × V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<N: Ord> {
    alphabet: BTreeSet<Label>,
    nodes: BTreeSet<N>,
    edges: BTreeSet<Edge<N>>,
}

/// Hosts, queries and guest skeletons.
pub type HostGraph = Graph<NodeId>;

impl<N: Ord> Default for Graph<N> {
    fn default() -> Self {
        Graph {
            alphabet: BTreeSet::new(),
            nodes: BTreeSet::new(),
            edges: BTreeSet::new(),
        }
    }
}

impl<N: Ord + Clone + fmt::Debug> Graph<N> {
    pub fn new(
        alphabet: BTreeSet<Label>,
        nodes: BTreeSet<N>,
        edges: BTreeSet<Edge<N>>,
    ) -> Result<Self, GraphError> {
        for e in &edges {
            for end in [&e.source, &e.target] {
                if !nodes.contains(end) {
                    return Err(GraphError::DanglingEdge {
                        edge: format!("{e:?}"),
                        node: format!("{end:?}"),
                    });
                }
            }
            if !alphabet.contains(&e.label) {
                return Err(GraphError::LabelOutsideAlphabet {
                    edge: format!("{e:?}"),
                    label: e.label.to_string(),
                });
            }
        }
        Ok(Graph {
            alphabet,
            nodes,
            edges,
        })
    }

    pub(crate) fn from_parts_unchecked(
        alphabet: BTreeSet<Label>,
        nodes: BTreeSet<N>,
        edges: BTreeSet<Edge<N>>,
    ) -> Self {
        Graph {
            alphabet,
            nodes,
            edges,
        }
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn nodes(&self) -> &BTreeSet<N> {
        &self.nodes
    }

    pub fn edges(&self) -> &BTreeSet<Edge<N>> {
        &self.edges
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn out_edges<'a>(&'a self, v: &'a N) -> impl Iterator<Item = &'a Edge<N>> + 'a {
        self.edges.iter().filter(move |e| &e.source == v)
    }

    pub fn in_edges<'a>(&'a self, v: &'a N) -> impl Iterator<Item = &'a Edge<N>> + 'a {
        self.edges.iter().filter(move |e| &e.target == v)
    }

    /// Nodes with no outgoing edge.
    pub fn is_sink(&self, v: &N) -> bool {
        self.out_edges(v).next().is_none()
    }

    /// Adds symbols to the alphabet.
    pub fn with_alphabet<L: Into<Label>>(mut self, labels: impl IntoIterator<Item = L>) -> Self {
        self.alphabet.extend(labels.into_iter().map(Into::into));
        self
    }
}

impl HostGraph {
    /// Builds a graph from `(source, label, target)` triples plus extra
    /// isolated nodes; the alphabet is the set of labels used.
    pub fn from_triples<'a>(
        triples: impl IntoIterator<Item = (&'a str, &'a str, &'a str)>,
        isolated: impl IntoIterator<Item = &'a str>,
    ) -> Self {
        let mut g = HostGraph::default();
        for (s, l, t) in triples {
            g.alphabet.insert(Label::from(l));
            g.nodes.insert(NodeId::from(s));
            g.nodes.insert(NodeId::from(t));
            g.edges
                .insert(Edge::new(NodeId::from(s), l, NodeId::from(t)));
        }
        g.nodes.extend(isolated.into_iter().map(NodeId::from));
        g
    }
}

/// A non-empty chain of edges `(e₀, …, eₙ)` with `t(eᵢ₋₁) = s(eᵢ)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path<N> {
    edges: Vec<Edge<N>>,
}

impl<N: PartialEq + Clone> Path<N> {
    pub fn new(edges: Vec<Edge<N>>) -> Result<Self, GraphError> {
        if edges.is_empty() {
            return Err(GraphError::EmptyPath);
        }
        for (i, w) in edges.windows(2).enumerate() {
            if w[0].target != w[1].source {
                return Err(GraphError::BrokenPath {
                    index: i,
                    next: i + 1,
                });
            }
        }
        Ok(Path { edges })
    }

    pub fn edges(&self) -> &[Edge<N>] {
        &self.edges
    }

    pub fn source(&self) -> &N {
        &self.edges[0].source
    }

    pub fn target(&self) -> &N {
        &self.edges[self.edges.len() - 1].target
    }

    pub fn word(&self) -> Vec<Label> {
        self.edges.iter().map(|e| e.label.clone()).collect()
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

/// The tensor product `M₁ × M₂`: alphabet `Σ₁ ∩ Σ₂`, nodes `V₁ × V₂` and one
/// edge per label-matched pair of edges.
pub fn tensor_product<A, B>(g1: &Graph<A>, g2: &Graph<B>) -> Graph<(A, B)>
where
    A: Ord + Clone,
    B: Ord + Clone,
{
    let alphabet: BTreeSet<Label> = g1.alphabet.intersection(&g2.alphabet).cloned().collect();
    let nodes = g1
        .nodes
        .iter()
        .flat_map(|u| g2.nodes.iter().map(move |v| (u.clone(), v.clone())))
        .collect();

    let mut by_label: BTreeMap<&Label, Vec<&Edge<B>>> = BTreeMap::new();
    for e in &g2.edges {
        by_label.entry(&e.label).or_default().push(e);
    }
    let mut edges = BTreeSet::new();
    for e1 in &g1.edges {
        for e2 in by_label.get(&e1.label).into_iter().flatten() {
            edges.insert(Edge {
                source: (e1.source.clone(), e2.source.clone()),
                label: e1.label.clone(),
                target: (e1.target.clone(), e2.target.clone()),
            });
        }
    }
    Graph {
        alphabet,
        nodes,
        edges,
    }
}

/// All pairs `(u, v)` joined by a path of length ≥ 1, computed with
/// Warshall's transitive closure. A node reaches itself only through a cycle.
pub fn reachability<N: Ord + Clone>(g: &Graph<N>) -> BTreeSet<(N, N)> {
    let nodes: Vec<&N> = g.nodes.iter().collect();
    let index: BTreeMap<&N, usize> = nodes.iter().enumerate().map(|(i, n)| (*n, i)).collect();
    let n = nodes.len();
    let mut reach = vec![vec![false; n]; n];
    for e in &g.edges {
        reach[index[&e.source]][index[&e.target]] = true;
    }
    for k in 0..n {
        let via = reach[k].clone();
        for row in reach.iter_mut().filter(|row| row[k]) {
            for (r, v) in row.iter_mut().zip(&via) {
                *r |= *v;
            }
        }
    }
    let mut out = BTreeSet::new();
    for (i, row) in reach.iter().enumerate() {
        for (j, &r) in row.iter().enumerate() {
            if r {
                out.insert((nodes[i].clone(), nodes[j].clone()));
            }
        }
    }
    out
}

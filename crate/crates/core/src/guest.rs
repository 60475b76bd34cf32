//! Guests: query graphs decorated with must/unique/exclusive sets and a
//! choice function.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use thiserror::Error;

use crate::graph::{Edge, GraphError, HostGraph, Label, NodeId};

/// A set of out-edges of one node that a match may realise together.
pub type ChoiceSet = BTreeSet<Edge<NodeId>>;
/// All admissible choice sets of one node.
pub type ChoiceFamily = BTreeSet<ChoiceSet>;

/// Node decorations of a unary guest.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Flags {
    /// ∃: the node must be matched.
    pub must: bool,
    /// 𝟙: the node is matched by at most one host node.
    pub unique: bool,
    /// ✕: host nodes matched to this node match nothing else.
    pub exclusive: bool,
    /// ∅ ∈ choice: the node may be matched without outgoing obligations.
    pub nil: bool,
}

impl Flags {
    pub const NONE: Flags = Flags {
        must: false,
        unique: false,
        exclusive: false,
        nil: false,
    };

    pub fn must() -> Self {
        Flags {
            must: true,
            ..Flags::NONE
        }
    }

    pub fn nil() -> Self {
        Flags {
            nil: true,
            ..Flags::NONE
        }
    }

    pub fn union(self, other: Flags) -> Flags {
        Flags {
            must: self.must || other.must,
            unique: self.unique || other.unique,
            exclusive: self.exclusive || other.exclusive,
            nil: self.nil || other.nil,
        }
    }

    pub fn is_empty(&self) -> bool {
        *self == Flags::NONE
    }

    /// Flag keywords in canonical order.
    pub fn keywords(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if self.must {
            out.push("must");
        }
        if self.unique {
            out.push("uniq");
        }
        if self.exclusive {
            out.push("excl");
        }
        if self.nil {
            out.push("nil");
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GuestError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("{set} set mentions unknown node `{node}`")]
    UnknownDecoratedNode { set: &'static str, node: NodeId },
    #[error("choice is given for unknown node `{node}`")]
    UnknownChoiceNode { node: NodeId },
    #[error("choice set of `{node}` contains {edge}, which is not one of its out-edges")]
    ForeignChoiceEdge { node: NodeId, edge: String },
    #[error("out-edge {edge} of `{node}` belongs to no choice set")]
    UncoveredEdge { node: NodeId, edge: String },
}

/// A guest `(Σ, V, E, Must, Unique, Exclusive, Choice)`.
///
/// Equality is structural over all seven components, with the choice
/// function compared as a set of sets per node.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct Guest {
    graph: HostGraph,
    must: BTreeSet<NodeId>,
    unique: BTreeSet<NodeId>,
    exclusive: BTreeSet<NodeId>,
    choice: BTreeMap<NodeId, ChoiceFamily>,
}

/// Graph, must, unique, exclusive and choice, in that order.
pub(crate) type GuestParts = (
    HostGraph,
    BTreeSet<NodeId>,
    BTreeSet<NodeId>,
    BTreeSet<NodeId>,
    BTreeMap<NodeId, ChoiceFamily>,
);

impl Guest {
    /// Validates the guest invariants. Nodes missing from `choice` get the
    /// empty family.
    pub fn new(
        graph: HostGraph,
        must: BTreeSet<NodeId>,
        unique: BTreeSet<NodeId>,
        exclusive: BTreeSet<NodeId>,
        mut choice: BTreeMap<NodeId, ChoiceFamily>,
    ) -> Result<Self, GuestError> {
        for (set, nodes) in [
            ("must", &must),
            ("unique", &unique),
            ("exclusive", &exclusive),
        ] {
            if let Some(node) = nodes.iter().find(|n| !graph.nodes().contains(*n)) {
                return Err(GuestError::UnknownDecoratedNode {
                    set,
                    node: node.clone(),
                });
            }
        }
        if let Some(node) = choice.keys().find(|n| !graph.nodes().contains(*n)) {
            return Err(GuestError::UnknownChoiceNode { node: node.clone() });
        }
        for v in graph.nodes() {
            let family = choice.entry(v.clone()).or_default();
            let out: BTreeSet<&Edge<NodeId>> = graph.out_edges(v).collect();
            let covered: BTreeSet<&Edge<NodeId>> = family.iter().flatten().collect();
            if let Some(e) = covered.difference(&out).next() {
                return Err(GuestError::ForeignChoiceEdge {
                    node: v.clone(),
                    edge: e.to_string(),
                });
            }
            if let Some(e) = out.difference(&covered).next() {
                return Err(GuestError::UncoveredEdge {
                    node: v.clone(),
                    edge: e.to_string(),
                });
            }
        }
        Ok(Guest {
            graph,
            must,
            unique,
            exclusive,
            choice,
        })
    }

    pub(crate) fn from_parts_unchecked(
        graph: HostGraph,
        must: BTreeSet<NodeId>,
        unique: BTreeSet<NodeId>,
        exclusive: BTreeSet<NodeId>,
        choice: BTreeMap<NodeId, ChoiceFamily>,
    ) -> Self {
        debug_assert!(graph.nodes().iter().all(|v| choice.contains_key(v)));
        Guest {
            graph,
            must,
            unique,
            exclusive,
            choice,
        }
    }

    /// The guest with no nodes.
    pub fn empty() -> Self {
        Guest::default()
    }

    /// Guest over `graph` with `Choice = λx.{out(x)}` for non-sinks and `{∅}`
    /// for sinks.
    pub fn full_choice(
        graph: HostGraph,
        must: BTreeSet<NodeId>,
        unique: BTreeSet<NodeId>,
        exclusive: BTreeSet<NodeId>,
    ) -> Result<Self, GuestError> {
        let choice = graph
            .nodes()
            .iter()
            .map(|v| {
                let out: ChoiceSet = graph.out_edges(v).cloned().collect();
                (v.clone(), BTreeSet::from([out]))
            })
            .collect();
        Guest::new(graph, must, unique, exclusive, choice)
    }

    pub fn graph(&self) -> &HostGraph {
        &self.graph
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        self.graph.alphabet()
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        self.graph.nodes()
    }

    pub fn edges(&self) -> &BTreeSet<Edge<NodeId>> {
        self.graph.edges()
    }

    pub fn must(&self) -> &BTreeSet<NodeId> {
        &self.must
    }

    pub fn unique(&self) -> &BTreeSet<NodeId> {
        &self.unique
    }

    pub fn exclusive(&self) -> &BTreeSet<NodeId> {
        &self.exclusive
    }

    pub fn choice_map(&self) -> &BTreeMap<NodeId, ChoiceFamily> {
        &self.choice
    }

    /// `Choice(v)`; the empty family for unknown nodes.
    pub fn choice(&self, v: &NodeId) -> &ChoiceFamily {
        static EMPTY: ChoiceFamily = BTreeSet::new();
        self.choice.get(v).unwrap_or(&EMPTY)
    }

    pub fn flags(&self, v: &NodeId) -> Flags {
        Flags {
            must: self.must.contains(v),
            unique: self.unique.contains(v),
            exclusive: self.exclusive.contains(v),
            nil: self.choice(v).contains(&ChoiceSet::new()),
        }
    }

    /// True when every choice family is exactly `{out(v)}`.
    pub fn has_full_choice(&self) -> bool {
        self.nodes().iter().all(|v| {
            let out: ChoiceSet = self.graph.out_edges(v).cloned().collect();
            self.choice(v).len() == 1 && self.choice(v).contains(&out)
        })
    }

    pub(crate) fn into_parts(self) -> GuestParts {
        (
            self.graph,
            self.must,
            self.unique,
            self.exclusive,
            self.choice,
        )
    }
}

impl fmt::Display for Guest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for v in self.nodes() {
            let flags = self.flags(v).keywords().join(",");
            write!(f, "{v}{{{flags}}} choice:")?;
            for gamma in self.choice(v) {
                let edges: Vec<String> = gamma.iter().map(ToString::to_string).collect();
                write!(f, " {{{}}}", edges.join(", "))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> NodeId {
        NodeId::from(s)
    }

    #[test]
    fn missing_choice_defaults_to_empty_family() {
        let g = HostGraph::from_triples([], ["p"]);
        let guest = Guest::new(
            g,
            [n("p")].into(),
            BTreeSet::new(),
            BTreeSet::new(),
            BTreeMap::new(),
        )
        .unwrap();
        assert!(guest.choice(&n("p")).is_empty());
        assert!(guest.flags(&n("p")).must);
    }

    #[test]
    fn uncovered_out_edge_is_rejected() {
        let g = HostGraph::from_triples([("p", "a", "q")], []);
        let err = Guest::new(
            g,
            BTreeSet::new(),
            BTreeSet::new(),
            BTreeSet::new(),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert!(matches!(err, GuestError::UncoveredEdge { .. }));
    }

    #[test]
    fn foreign_choice_edge_is_rejected() {
        let g = HostGraph::from_triples([("p", "a", "q")], []);
        let e = Edge::new(n("p"), "a", n("q"));
        let family = BTreeSet::from([BTreeSet::from([e])]);
        let choice = BTreeMap::from([(n("p"), family.clone()), (n("q"), family)]);
        let err =
            Guest::new(g, BTreeSet::new(), BTreeSet::new(), BTreeSet::new(), choice).unwrap_err();
        assert!(matches!(err, GuestError::ForeignChoiceEdge { .. }));
    }

    #[test]
    fn decorations_must_name_nodes() {
        let g = HostGraph::from_triples([], ["p"]);
        let err = Guest::new(
            g,
            BTreeSet::new(),
            [n("z")].into(),
            BTreeSet::new(),
            BTreeMap::new(),
        )
        .unwrap_err();
        assert_eq!(
            err,
            GuestError::UnknownDecoratedNode {
                set: "unique",
                node: n("z")
            }
        );
    }

    #[test]
    fn full_choice_corks_sinks() {
        let g = HostGraph::from_triples([("u", "a", "u"), ("u", "b", "v")], []);
        let guest =
            Guest::full_choice(g, BTreeSet::new(), BTreeSet::new(), BTreeSet::new()).unwrap();
        assert!(guest.has_full_choice());
        assert!(guest.flags(&n("v")).nil);
        assert_eq!(guest.choice(&n("u")).iter().next().unwrap().len(), 2);
    }
}

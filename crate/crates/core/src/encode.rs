//! Translations of classical matching problems into guests: subgraph
//! isomorphism (SGI), graph simulation (GS), regular-language path matching
//! (RLPM) and subgraph isomorphism with regular languages (RL-SGI).

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::algebra::{
    add, eval, mul, rename, rename_merge, unary, AlgebraError, GuestExpr, UnaryTerm,
};
use crate::graph::{Edge, HostGraph, Label, NodeId};
use crate::guest::{Flags, Guest};
use crate::nfa::{nfa_to_guest, normalize_nfa, regex_to_nfa};
use crate::regex::RegexAst;

/// Separator reserved for internal automaton states (`e<idx>#<k>`).
pub const RESERVED: char = '#';

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EncodeError {
    #[error("the expression `{0}` denotes the empty language")]
    EmptyLanguage(String),
    #[error("edge ({from}, {to}) mentions an unknown node")]
    DanglingEdge { from: NodeId, to: NodeId },
    #[error("symbol `{symbol}` on edge ({from}, {to}) is not in the alphabet")]
    SymbolOutsideAlphabet {
        from: NodeId,
        to: NodeId,
        symbol: Label,
    },
    #[error("node name `{0}` contains the reserved character `#`")]
    ReservedName(NodeId),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// A graph whose edges carry nonempty ε-free regular languages. At most one
/// edge per ordered node pair.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct DecoratedGraph {
    alphabet: BTreeSet<Label>,
    nodes: BTreeSet<NodeId>,
    edges: BTreeMap<(NodeId, NodeId), RegexAst>,
}

impl DecoratedGraph {
    pub fn new(
        alphabet: BTreeSet<Label>,
        nodes: BTreeSet<NodeId>,
        edges: BTreeMap<(NodeId, NodeId), RegexAst>,
    ) -> Result<Self, EncodeError> {
        if let Some(v) = nodes.iter().find(|v| v.as_str().contains(RESERVED)) {
            return Err(EncodeError::ReservedName(v.clone()));
        }
        for ((s, t), r) in &edges {
            if !nodes.contains(s) || !nodes.contains(t) {
                return Err(EncodeError::DanglingEdge {
                    from: s.clone(),
                    to: t.clone(),
                });
            }
            if let Some(a) = r.symbols().into_iter().find(|a| !alphabet.contains(a)) {
                return Err(EncodeError::SymbolOutsideAlphabet {
                    from: s.clone(),
                    to: t.clone(),
                    symbol: a,
                });
            }
            if r.is_empty_language() {
                return Err(EncodeError::EmptyLanguage(r.to_string()));
            }
        }
        Ok(DecoratedGraph {
            alphabet,
            nodes,
            edges,
        })
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn nodes(&self) -> &BTreeSet<NodeId> {
        &self.nodes
    }

    /// Edges in index order.
    pub fn edges(&self) -> &BTreeMap<(NodeId, NodeId), RegexAst> {
        &self.edges
    }
}

/// Arrow for a query edge. The target is marked `nil` so that its factor in
/// a `⊗` is the neutral `{∅}`; self-loops stay plain so they contribute no
/// `∅` option.
fn edge_arrow(e: &Edge<NodeId>) -> GuestExpr {
    let target_flags = if e.source == e.target {
        Flags::NONE
    } else {
        Flags::nil()
    };
    GuestExpr::arrow(
        UnaryTerm::plain(e.source.clone()),
        e.label.clone(),
        UnaryTerm::new(e.target.clone(), target_flags),
    )
}

/// `⊕_v v_{flags ∪ nil-if-sink} ⊕ ⊗_e (s(e) -σ(e)-> t(e))`.
fn structural_expr(q: &HostGraph, flags: Flags) -> GuestExpr {
    let unaries = q.nodes().iter().map(|v| {
        let f = if q.is_sink(v) {
            flags.union(Flags::nil())
        } else {
            flags
        };
        GuestExpr::unary(v.clone(), f)
    });
    let arrows = GuestExpr::product(q.edges().iter().map(edge_arrow));
    let mut terms: Vec<GuestExpr> = unaries.collect();
    if !q.edges().is_empty() {
        terms.push(arrows);
    }
    GuestExpr::sum(terms)
}

fn with_alphabet(g: Guest, alphabet: &BTreeSet<Label>) -> Guest {
    let (graph, must, unique, exclusive, choice) = g.into_parts();
    let graph = graph.with_alphabet(alphabet.iter().cloned());
    Guest::from_parts_unchecked(graph, must, unique, exclusive, choice)
}

/// Subgraph isomorphism query as a guest: every node `∃𝟙✕`, full choice,
/// sinks corked.
pub fn encode_sgi_expr(q: &HostGraph) -> GuestExpr {
    structural_expr(
        q,
        Flags {
            must: true,
            unique: true,
            exclusive: true,
            nil: false,
        },
    )
}

pub fn encode_sgi(q: &HostGraph) -> Guest {
    let g = eval(&encode_sgi_expr(q)).expect("no renaming in the term");
    with_alphabet(g, q.alphabet())
}

/// Graph simulation query as a guest: every node `∃`, full choice, sinks
/// corked.
pub fn encode_gs_expr(q: &HostGraph) -> GuestExpr {
    structural_expr(q, Flags::must())
}

pub fn encode_gs(q: &HostGraph) -> Guest {
    let g = eval(&encode_gs_expr(q)).expect("no renaming in the term");
    with_alphabet(g, q.alphabet())
}

/// The RLPM guest together with its initial and final state.
fn rlpm_with_prefix(r: &RegexAst, prefix: &str) -> Result<(Guest, NodeId, NodeId), EncodeError> {
    let norm = normalize_nfa(&regex_to_nfa(r))
        .map_err(|_| EncodeError::EmptyLanguage(r.to_string()))?
        .with_prefix(prefix);
    Ok((
        nfa_to_guest(&norm),
        norm.initial().clone(),
        norm.final_state().clone(),
    ))
}

/// Regular path query as a guest, via the normalized Glushkov automaton.
/// States are named `q0` (initial) … `q<n-1>` (final).
pub fn encode_rlpm(r: &RegexAst) -> Result<Guest, EncodeError> {
    rlpm_with_prefix(r, "q").map(|(g, _, _)| g)
}

/// `⊕_v v_{∃𝟙✕} ⊕ ⊗_e G_e[q_e/s(e)][f_e/t(e)]`, where `G_e` is the RLPM
/// guest of edge `e` with states named `e<idx>#<k>`. For a self-loop the
/// final state is merged into the (already renamed) initial one.
pub fn encode_rlsgi(q: &DecoratedGraph) -> Result<Guest, EncodeError> {
    let mut product = Guest::empty();
    for (idx, ((s, t), r)) in q.edges.iter().enumerate() {
        let (g, initial, fin) = rlpm_with_prefix(r, &format!("e{idx}{RESERVED}"))?;
        let g = rename(&g, &initial, s)?;
        let g = if s == t {
            rename_merge(&g, &fin, t)?
        } else {
            rename(&g, &fin, t)?
        };
        product = mul(&product, &g);
    }
    let flags = Flags {
        must: true,
        unique: true,
        exclusive: true,
        nil: false,
    };
    let guest = q
        .nodes
        .iter()
        .fold(Guest::empty(), |acc, v| add(&acc, &unary(v, flags)));
    Ok(with_alphabet(add(&guest, &product), &q.alphabet))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guest::ChoiceSet;
    use crate::regex::parse_regex;
    use proptest::prelude::*;

    fn n(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn all(q: &HostGraph) -> BTreeSet<NodeId> {
        q.nodes().clone()
    }

    fn four_node_query() -> HostGraph {
        HostGraph::from_triples(
            [
                ("a", "b", "b"),
                ("c", "b", "b"),
                ("c", "a", "a"),
                ("a", "a", "d"),
                ("d", "a", "c"),
            ],
            [],
        )
    }

    #[test]
    fn sgi_four_node_query() {
        let q = four_node_query();
        let g = encode_sgi(&q);
        assert_eq!(g.graph(), &q);
        assert_eq!(g.must(), &all(&q));
        assert_eq!(g.unique(), &all(&q));
        assert_eq!(g.exclusive(), &all(&q));
        assert!(g.has_full_choice());
        assert_eq!(g.choice(&n("b")), &BTreeSet::from([ChoiceSet::new()]));
        assert_eq!(g.choice(&n("a")).iter().next().unwrap().len(), 2);
        assert_eq!(g.choice(&n("c")).iter().next().unwrap().len(), 2);
    }

    #[test]
    fn sgi_single_node() {
        let q = HostGraph::from_triples([], ["v"]);
        let flags = Flags {
            must: true,
            unique: true,
            exclusive: true,
            nil: true,
        };
        assert_eq!(encode_sgi(&q), unary(&n("v"), flags));
    }

    #[test]
    fn gs_loop_and_exit() {
        let q = HostGraph::from_triples([("u", "a", "u"), ("u", "b", "v")], []);
        let g = encode_gs(&q);
        assert_eq!(g.must(), &all(&q));
        assert!(g.unique().is_empty() && g.exclusive().is_empty());
        let out: ChoiceSet = q.edges().clone();
        assert_eq!(g.choice(&n("u")), &BTreeSet::from([out]));
        assert_eq!(g.choice(&n("v")), &BTreeSet::from([ChoiceSet::new()]));
    }

    #[test]
    fn rlpm_rejects_empty_language() {
        let r = RegexAst::lit('a').concat(RegexAst::EmptyLang);
        assert!(matches!(
            encode_rlpm(&r),
            Err(EncodeError::EmptyLanguage(_))
        ));
    }

    #[test]
    fn rlpm_ab_plus_shape() {
        let g = encode_rlpm(&parse_regex("(ab)+").unwrap()).unwrap();
        assert_eq!(g.nodes().len(), 4);
        assert_eq!(g.edges().len(), 4);
        assert_eq!(g.must(), &BTreeSet::from([n("q0"), n("q3")]));
        assert!(g.flags(&n("q3")).nil);
    }

    fn decorated(edges: &[(&str, &str, &str)], nodes: &[&str]) -> DecoratedGraph {
        let edges: BTreeMap<(NodeId, NodeId), RegexAst> = edges
            .iter()
            .map(|(s, r, t)| ((n(s), n(t)), parse_regex(r).unwrap()))
            .collect();
        let alphabet = edges.values().flat_map(RegexAst::symbols).collect();
        DecoratedGraph::new(alphabet, nodes.iter().map(|v| n(v)).collect(), edges).unwrap()
    }

    #[test]
    fn rlsgi_single_edge() {
        let q = decorated(&[("u", "a", "v")], &["u", "v"]);
        let g = encode_rlsgi(&q).unwrap();
        assert_eq!(g.nodes(), &BTreeSet::from([n("u"), n("v")]));
        assert_eq!(g.edges(), &BTreeSet::from([Edge::new(n("u"), "a", n("v"))]));
        for v in ["u", "v"] {
            let f = g.flags(&n(v));
            assert!(f.must && f.unique && f.exclusive);
        }
        assert!(g.flags(&n("v")).nil);
        assert!(!g.flags(&n("u")).nil);
    }

    #[test]
    fn rlsgi_three_node_query() {
        let q = decorated(
            &[
                ("v", "bb", "u"),
                ("v", "(a|b)c+", "w"),
                ("u", "b", "w"),
                ("u", "a+", "u"),
            ],
            &["u", "v", "w"],
        );
        let g = encode_rlsgi(&q).unwrap();
        let internal: Vec<&NodeId> = g
            .nodes()
            .iter()
            .filter(|v| v.as_str().contains('#'))
            .collect();
        assert!(internal
            .iter()
            .all(|v| !g.flags(v).must && !g.flags(v).unique));
        // v: {a→i or b→i} × {b→i'}
        let cv = g.choice(&n("v"));
        assert_eq!(cv.len(), 2);
        assert!(cv.iter().all(|gamma| gamma.len() == 2));
        assert_eq!(g.choice(&n("w")), &BTreeSet::from([ChoiceSet::new()]));
        // the merged self-loop automaton contributes ∅ to u's family
        assert!(g.choice(&n("u")).iter().any(|gamma| gamma.len() == 1));
    }

    #[test]
    fn rlsgi_rejects_reserved_names() {
        let err =
            DecoratedGraph::new(BTreeSet::new(), [n("x#1")].into(), BTreeMap::new()).unwrap_err();
        assert_eq!(err, EncodeError::ReservedName(n("x#1")));
    }

    fn arb_query() -> impl Strategy<Value = HostGraph> {
        proptest::collection::vec((0u8..4, prop_oneof![Just("a"), Just("b")], 0u8..4), 0..8)
            .prop_map(|triples| {
                let names: Vec<(String, &str, String)> = triples
                    .into_iter()
                    .map(|(s, a, t)| (format!("v{s}"), a, format!("v{t}")))
                    .collect();
                HostGraph::from_triples(
                    names.iter().map(|(s, a, t)| (s.as_str(), *a, t.as_str())),
                    ["v0"],
                )
            })
    }

    proptest! {
        #[test]
        fn sgi_is_structure_preserving(q in arb_query()) {
            let g = encode_sgi(&q);
            let expected = Guest::full_choice(q.clone(), all(&q), all(&q), all(&q)).unwrap();
            prop_assert_eq!(g, expected);
        }

        #[test]
        fn gs_is_structure_preserving(q in arb_query()) {
            let g = encode_gs(&q);
            let none = BTreeSet::new();
            let expected = Guest::full_choice(q.clone(), all(&q), none.clone(), none).unwrap();
            prop_assert_eq!(g, expected);
        }
    }
}

//! Compositional construction of guests.
//!
//! Elementary guests are the empty guest, unary guests `p_A` and arrows
//! `P -a-> Q`. Guests combine with `⊕` ([`add`]) and `⊗` ([`mul`]), which
//! differ only in how the choice families of shared nodes are merged: `⊕`
//! takes their union, `⊗` takes pairwise unions of their members.
//! [`normal_form`] recovers a sum of products of elementary terms from any
//! guest.

use std::collections::{BTreeMap, BTreeSet};

use thiserror::Error;

use crate::graph::{Edge, HostGraph, Label, NodeId};
use crate::guest::{ChoiceFamily, ChoiceSet, Flags, Guest, GuestError};

/// A decorated node mention `p{flags}`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct UnaryTerm {
    pub name: NodeId,
    pub flags: Flags,
}

impl UnaryTerm {
    pub fn new(name: impl Into<NodeId>, flags: Flags) -> Self {
        UnaryTerm {
            name: name.into(),
            flags,
        }
    }

    pub fn plain(name: impl Into<NodeId>) -> Self {
        UnaryTerm::new(name, Flags::NONE)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum GuestExpr {
    Empty,
    Unary(UnaryTerm),
    Arrow {
        src: UnaryTerm,
        label: Label,
        dst: UnaryTerm,
    },
    Add(Box<GuestExpr>, Box<GuestExpr>),
    Mul(Box<GuestExpr>, Box<GuestExpr>),
    /// `inner[from/to]`: rename `from` as the fresh name `to`.
    Rename {
        inner: Box<GuestExpr>,
        from: NodeId,
        to: NodeId,
    },
}

impl GuestExpr {
    pub fn unary(name: impl Into<NodeId>, flags: Flags) -> Self {
        GuestExpr::Unary(UnaryTerm::new(name, flags))
    }

    pub fn arrow(src: UnaryTerm, label: impl Into<Label>, dst: UnaryTerm) -> Self {
        GuestExpr::Arrow {
            src,
            label: label.into(),
            dst,
        }
    }

    pub fn rename(self, from: impl Into<NodeId>, to: impl Into<NodeId>) -> Self {
        GuestExpr::Rename {
            inner: Box::new(self),
            from: from.into(),
            to: to.into(),
        }
    }

    /// Left-nested `⊕` of the terms; `Empty` when there are none.
    pub fn sum(terms: impl IntoIterator<Item = GuestExpr>) -> Self {
        terms
            .into_iter()
            .reduce(|a, b| a + b)
            .unwrap_or(GuestExpr::Empty)
    }

    /// Left-nested `⊗` of the terms; `Empty` when there are none.
    pub fn product(terms: impl IntoIterator<Item = GuestExpr>) -> Self {
        terms
            .into_iter()
            .reduce(|a, b| a * b)
            .unwrap_or(GuestExpr::Empty)
    }

    pub fn is_elementary(&self) -> bool {
        matches!(
            self,
            GuestExpr::Empty | GuestExpr::Unary(_) | GuestExpr::Arrow { .. }
        )
    }

    /// Whether the term has the shape `⊕ᵢ ⊗ⱼ elementary`.
    pub fn is_normal_form(&self) -> bool {
        fn product_of_elementary(e: &GuestExpr) -> bool {
            match e {
                GuestExpr::Mul(l, r) => product_of_elementary(l) && product_of_elementary(r),
                other => other.is_elementary(),
            }
        }
        match self {
            GuestExpr::Add(l, r) => l.is_normal_form() && r.is_normal_form(),
            other => product_of_elementary(other),
        }
    }
}

impl std::ops::Add for GuestExpr {
    type Output = GuestExpr;

    fn add(self, rhs: GuestExpr) -> GuestExpr {
        GuestExpr::Add(Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for GuestExpr {
    type Output = GuestExpr;

    fn mul(self, rhs: GuestExpr) -> GuestExpr {
        GuestExpr::Mul(Box::new(self), Box::new(rhs))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    #[error("cannot rename `{0}`: no such node")]
    UnknownNode(NodeId),
    #[error("cannot rename onto `{0}`: the name is already taken")]
    NameCollision(NodeId),
    #[error(transparent)]
    Guest(#[from] GuestError),
}

fn decorated(flags: Flags, name: &NodeId) -> [BTreeSet<NodeId>; 3] {
    let pick = |on: bool| {
        if on {
            BTreeSet::from([name.clone()])
        } else {
            BTreeSet::new()
        }
    };
    [pick(flags.must), pick(flags.unique), pick(flags.exclusive)]
}

fn nil_family(flags: Flags) -> ChoiceFamily {
    if flags.nil {
        BTreeSet::from([ChoiceSet::new()])
    } else {
        ChoiceFamily::new()
    }
}

/// The unary guest `p_A`: one node, no edges; `Choice(p) = {∅}` iff `nil`.
pub fn unary(name: &NodeId, flags: Flags) -> Guest {
    let [must, unique, exclusive] = decorated(flags, name);
    let graph = HostGraph::from_parts_unchecked(
        BTreeSet::new(),
        BTreeSet::from([name.clone()]),
        BTreeSet::new(),
    );
    let choice = BTreeMap::from([(name.clone(), nil_family(flags))]);
    Guest::from_parts_unchecked(graph, must, unique, exclusive, choice)
}

/// The arrow `P -label-> Q` between two unary guests.
pub fn arrow(p: &UnaryTerm, label: &Label, q: &UnaryTerm) -> Guest {
    let edge = Edge::new(p.name.clone(), label.clone(), q.name.clone());
    let single: ChoiceFamily = BTreeSet::from([BTreeSet::from([edge.clone()])]);
    let mut choice = BTreeMap::new();
    if p.name == q.name {
        let mut family = nil_family(p.flags);
        family.extend(single);
        family.extend(nil_family(q.flags));
        choice.insert(p.name.clone(), family);
    } else {
        let mut family = nil_family(p.flags);
        family.extend(single);
        choice.insert(p.name.clone(), family);
        choice.insert(q.name.clone(), nil_family(q.flags));
    }
    let [pm, pu, px] = decorated(p.flags, &p.name);
    let [qm, qu, qx] = decorated(q.flags, &q.name);
    let graph = HostGraph::from_parts_unchecked(
        BTreeSet::from([label.clone()]),
        BTreeSet::from([p.name.clone(), q.name.clone()]),
        BTreeSet::from([edge]),
    );
    Guest::from_parts_unchecked(graph, &pm | &qm, &pu | &qu, &px | &qx, choice)
}

fn combine(
    g1: &Guest,
    g2: &Guest,
    merge_shared: impl Fn(&ChoiceFamily, &ChoiceFamily) -> ChoiceFamily,
) -> Guest {
    let alphabet = g1.alphabet() | g2.alphabet();
    let nodes = g1.nodes() | g2.nodes();
    let edges = g1.edges() | g2.edges();
    let mut choice = BTreeMap::new();
    for v in &nodes {
        let family = match (g1.nodes().contains(v), g2.nodes().contains(v)) {
            (true, true) => merge_shared(g1.choice(v), g2.choice(v)),
            (true, false) => g1.choice(v).clone(),
            _ => g2.choice(v).clone(),
        };
        choice.insert(v.clone(), family);
    }
    Guest::from_parts_unchecked(
        HostGraph::from_parts_unchecked(alphabet, nodes, edges),
        g1.must() | g2.must(),
        g1.unique() | g2.unique(),
        g1.exclusive() | g2.exclusive(),
        choice,
    )
}

/// `G₁ ⊕ G₂`: componentwise union; shared nodes get `Choice₁(x) ∪ Choice₂(x)`.
pub fn add(g1: &Guest, g2: &Guest) -> Guest {
    combine(g1, g2, |c1, c2| c1 | c2)
}

/// `G₁ ⊗ G₂`: componentwise union; shared nodes get
/// `{γ₁ ∪ γ₂ | γ₁ ∈ Choice₁(x), γ₂ ∈ Choice₂(x)}`.
pub fn mul(g1: &Guest, g2: &Guest) -> Guest {
    combine(g1, g2, |c1, c2| {
        c1.iter()
            .flat_map(|a| c2.iter().map(move |b| a | b))
            .collect()
    })
}

fn subst_node(v: &NodeId, p: &NodeId, q: &NodeId) -> NodeId {
    if v == p {
        q.clone()
    } else {
        v.clone()
    }
}

fn subst_edge(e: &Edge<NodeId>, p: &NodeId, q: &NodeId) -> Edge<NodeId> {
    Edge::new(
        subst_node(&e.source, p, q),
        e.label.clone(),
        subst_node(&e.target, p, q),
    )
}

fn subst_family(family: &ChoiceFamily, p: &NodeId, q: &NodeId) -> ChoiceFamily {
    family
        .iter()
        .map(|gamma| gamma.iter().map(|e| subst_edge(e, p, q)).collect())
        .collect()
}

fn subst_set(set: &BTreeSet<NodeId>, p: &NodeId, q: &NodeId) -> BTreeSet<NodeId> {
    set.iter().map(|v| subst_node(v, p, q)).collect()
}

/// Renames `p` into `q` everywhere. When `q` already exists the two nodes
/// are merged: decorations are unioned and the choice families combined
/// with the `⊕` rule.
fn rename_unchecked(g: &Guest, p: &NodeId, q: &NodeId) -> Guest {
    let graph = g.graph();
    let nodes = subst_set(graph.nodes(), p, q);
    let edges = graph.edges().iter().map(|e| subst_edge(e, p, q)).collect();
    let mut choice: BTreeMap<NodeId, ChoiceFamily> = BTreeMap::new();
    for (v, family) in g.choice_map() {
        choice
            .entry(subst_node(v, p, q))
            .or_default()
            .extend(subst_family(family, p, q));
    }
    Guest::from_parts_unchecked(
        HostGraph::from_parts_unchecked(graph.alphabet().clone(), nodes, edges),
        subst_set(g.must(), p, q),
        subst_set(g.unique(), p, q),
        subst_set(g.exclusive(), p, q),
        choice,
    )
}

/// `G[p/q]`: renames the node `p` as the fresh name `q`.
pub fn rename(g: &Guest, p: &NodeId, q: &NodeId) -> Result<Guest, AlgebraError> {
    if !g.nodes().contains(p) {
        return Err(AlgebraError::UnknownNode(p.clone()));
    }
    if p != q && g.nodes().contains(q) {
        return Err(AlgebraError::NameCollision(q.clone()));
    }
    Ok(rename_unchecked(g, p, q))
}

/// Like [`rename`], but an existing `q` is merged with `p` instead of being
/// rejected. Used by the RL-SGI encoder for self-loop query edges.
pub fn rename_merge(g: &Guest, p: &NodeId, q: &NodeId) -> Result<Guest, AlgebraError> {
    if !g.nodes().contains(p) {
        return Err(AlgebraError::UnknownNode(p.clone()));
    }
    Ok(rename_unchecked(g, p, q))
}

/// Evaluates a term to the guest it denotes.
pub fn eval(expr: &GuestExpr) -> Result<Guest, AlgebraError> {
    Ok(match expr {
        GuestExpr::Empty => Guest::empty(),
        GuestExpr::Unary(u) => unary(&u.name, u.flags),
        GuestExpr::Arrow { src, label, dst } => arrow(src, label, dst),
        GuestExpr::Add(l, r) => add(&eval(l)?, &eval(r)?),
        GuestExpr::Mul(l, r) => mul(&eval(l)?, &eval(r)?),
        GuestExpr::Rename { inner, from, to } => rename(&eval(inner)?, from, to)?,
    })
}

/// The normal form
/// `⊕_v v_{flags(v)} ⊕ ⊕_{v, γ ∈ Choice(v)} ⊗_{e ∈ γ} (s(e) -σ(e)-> t(e))`.
///
/// Alphabet symbols that label no edge are not represented in the term.
pub fn normal_form(g: &Guest) -> GuestExpr {
    let unaries = g
        .nodes()
        .iter()
        .map(|v| GuestExpr::unary(v.clone(), g.flags(v)));
    let products = g.nodes().iter().flat_map(|v| {
        g.choice(v)
            .iter()
            .filter(|gamma| !gamma.is_empty())
            .map(|gamma| {
                GuestExpr::product(gamma.iter().map(|e| {
                    GuestExpr::arrow(
                        UnaryTerm::plain(e.source.clone()),
                        e.label.clone(),
                        UnaryTerm::plain(e.target.clone()),
                    )
                }))
            })
    });
    GuestExpr::sum(unaries.chain(products))
}

/// Guest over `graph` with the linear choice function
/// `λx.{{e} | e ∈ out(x)} ∪ {∅ | out(x) = ∅}`.
pub fn linear_choice(graph: HostGraph, must: BTreeSet<NodeId>) -> Result<Guest, GuestError> {
    let choice = graph
        .nodes()
        .iter()
        .map(|v| {
            let mut family: ChoiceFamily = graph
                .out_edges(v)
                .map(|e| BTreeSet::from([e.clone()]))
                .collect();
            if family.is_empty() {
                family.insert(ChoiceSet::new());
            }
            (v.clone(), family)
        })
        .collect();
    Guest::new(graph, must, BTreeSet::new(), BTreeSet::new(), choice)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(s: &str) -> NodeId {
        NodeId::from(s)
    }

    fn e(s: &str, l: &str, t: &str) -> Edge<NodeId> {
        Edge::new(n(s), l, n(t))
    }

    fn fam(sets: &[&[Edge<NodeId>]]) -> ChoiceFamily {
        sets.iter().map(|s| s.iter().cloned().collect()).collect()
    }

    fn flags(must: bool, nil: bool) -> Flags {
        Flags {
            must,
            nil,
            ..Flags::NONE
        }
    }

    #[test]
    fn unary_must_nil() {
        let g = unary(&n("p"), flags(true, true));
        assert_eq!(g.must(), &BTreeSet::from([n("p")]));
        assert_eq!(g.choice(&n("p")), &fam(&[&[]]));
        assert!(g.edges().is_empty() && g.alphabet().is_empty());
    }

    #[test]
    fn unary_plain_has_empty_family() {
        let g = unary(&n("p"), Flags::NONE);
        assert!(g.choice(&n("p")).is_empty());
        assert!(g.must().is_empty() && g.unique().is_empty() && g.exclusive().is_empty());
    }

    #[test]
    fn arrow_self_loop() {
        let g = arrow(&UnaryTerm::plain("p"), &"a".into(), &UnaryTerm::plain("p"));
        assert_eq!(g.nodes().len(), 1);
        assert_eq!(g.choice(&n("p")), &fam(&[&[e("p", "a", "p")]]));
    }

    #[test]
    fn arrow_distinct_ends() {
        let g = arrow(
            &UnaryTerm::new("p", Flags::must()),
            &"b".into(),
            &UnaryTerm::plain("q"),
        );
        assert_eq!(g.must(), &BTreeSet::from([n("p")]));
        assert_eq!(g.choice(&n("p")), &fam(&[&[e("p", "b", "q")]]));
        assert!(g.choice(&n("q")).is_empty());
    }

    #[test]
    fn arrow_with_nil_operands() {
        let g = arrow(
            &UnaryTerm::new("p", Flags::nil()),
            &"a".into(),
            &UnaryTerm::new("q", Flags::nil()),
        );
        assert_eq!(g.choice(&n("p")), &fam(&[&[], &[e("p", "a", "q")]]));
        assert_eq!(g.choice(&n("q")), &fam(&[&[]]));
        // ⋃ choice(v) = out(v)
        Guest::new(
            g.graph().clone(),
            g.must().clone(),
            g.unique().clone(),
            g.exclusive().clone(),
            g.choice_map().clone(),
        )
        .unwrap();
    }

    #[test]
    fn add_with_shared_source_collects_singletons() {
        let g = add(
            &arrow(&UnaryTerm::plain("p"), &"a".into(), &UnaryTerm::plain("q")),
            &arrow(&UnaryTerm::plain("p"), &"b".into(), &UnaryTerm::plain("r")),
        );
        assert_eq!(
            g.choice(&n("p")),
            &fam(&[&[e("p", "a", "q")], &[e("p", "b", "r")]])
        );
    }

    #[test]
    fn guest_from_product_of_arrows() {
        let loop_a = arrow(
            &UnaryTerm::new("p", Flags::must()),
            &"a".into(),
            &UnaryTerm::plain("p"),
        );
        let b = arrow(&UnaryTerm::plain("p"), &"b".into(), &UnaryTerm::plain("q"));
        let g = add(&unary(&n("q"), flags(true, true)), &mul(&loop_a, &b));
        assert_eq!(
            g.choice(&n("p")),
            &fam(&[&[e("p", "a", "p"), e("p", "b", "q")]])
        );
        assert_eq!(g.choice(&n("q")), &fam(&[&[]]));
        assert_eq!(g.must(), &BTreeSet::from([n("p"), n("q")]));
    }

    #[test]
    fn empty_is_identity() {
        let g = arrow(&UnaryTerm::plain("p"), &"a".into(), &UnaryTerm::plain("q"));
        assert_eq!(add(&g, &Guest::empty()), g);
        assert_eq!(mul(&g, &Guest::empty()), g);
    }

    #[test]
    fn rename_substitutes_endpoints() {
        let g = arrow(&UnaryTerm::plain("a"), &"x".into(), &UnaryTerm::plain("b"));
        let r = rename(&g, &n("a"), &n("c")).unwrap();
        assert_eq!(r.edges(), &BTreeSet::from([e("c", "x", "b")]));
        assert_eq!(r.choice(&n("c")), &fam(&[&[e("c", "x", "b")]]));

        let looped = arrow(
            &UnaryTerm::new("p", Flags::must()),
            &"a".into(),
            &UnaryTerm::plain("p"),
        );
        let r = rename(&looped, &n("p"), &n("z")).unwrap();
        assert_eq!(r.edges(), &BTreeSet::from([e("z", "a", "z")]));
        assert_eq!(r.must(), &BTreeSet::from([n("z")]));
    }

    #[test]
    fn rename_errors() {
        let g = arrow(&UnaryTerm::plain("a"), &"x".into(), &UnaryTerm::plain("b"));
        assert_eq!(
            rename(&g, &n("z"), &n("c")),
            Err(AlgebraError::UnknownNode(n("z")))
        );
        assert_eq!(
            rename(&g, &n("a"), &n("b")),
            Err(AlgebraError::NameCollision(n("b")))
        );
    }

    #[test]
    fn merge_rename_unions_choice_families() {
        let g = add(
            &unary(&n("f"), flags(true, true)),
            &arrow(
                &UnaryTerm::new("q", Flags::must()),
                &"a".into(),
                &UnaryTerm::plain("f"),
            ),
        );
        let merged = rename_merge(&g, &n("f"), &n("q")).unwrap();
        assert_eq!(merged.nodes(), &BTreeSet::from([n("q")]));
        assert_eq!(merged.choice(&n("q")), &fam(&[&[], &[e("q", "a", "q")]]));
    }

    #[test]
    fn normal_form_of_product_guest() {
        let loop_a = arrow(
            &UnaryTerm::new("p", Flags::must()),
            &"a".into(),
            &UnaryTerm::plain("p"),
        );
        let b = arrow(&UnaryTerm::plain("p"), &"b".into(), &UnaryTerm::plain("q"));
        let g = add(&unary(&n("q"), flags(true, true)), &mul(&loop_a, &b));
        let nf = normal_form(&g);
        assert!(nf.is_normal_form());
        assert_eq!(eval(&nf).unwrap(), g);
    }

    #[test]
    fn normal_form_of_empty_guest() {
        assert_eq!(normal_form(&Guest::empty()), GuestExpr::Empty);
    }

    #[test]
    fn linear_choice_has_singletons_and_corks() {
        let graph =
            HostGraph::from_triples([("u", "a", "u"), ("u", "a", "m"), ("m", "b", "v")], []);
        let g = linear_choice(graph, BTreeSet::from([n("m")])).unwrap();
        assert_eq!(g.choice(&n("v")), &fam(&[&[]]));
        assert_eq!(g.choice(&n("u")).len(), 2);
        assert!(g
            .choice_map()
            .values()
            .flatten()
            .all(|gamma| gamma.len() <= 1));
    }
}

//! ε-free nondeterministic automata: Glushkov construction from
//! [`RegexAst`], normalization to a single initial and a single final state,
//! and translation into a guest.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::algebra::{eval, GuestExpr, UnaryTerm};
use crate::graph::{Label, NodeId};
use crate::guest::{Flags, Guest};
use crate::regex::RegexAst;

pub type Transitions = BTreeMap<(NodeId, Label), BTreeSet<NodeId>>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NfaError {
    #[error("state `{0}` is used but not declared")]
    UnknownState(NodeId),
    #[error("symbol `{0}` is not in the automaton's alphabet")]
    UnknownSymbol(Label),
    #[error("the automaton accepts the empty word")]
    AcceptsEmptyWord,
    #[error("the automaton accepts no word")]
    EmptyLanguage,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Nfa {
    alphabet: BTreeSet<Label>,
    states: BTreeSet<NodeId>,
    transitions: Transitions,
    initial: NodeId,
    finals: BTreeSet<NodeId>,
    /// `transitions` keyed state-first, so lookups need no owned keys.
    delta: BTreeMap<NodeId, BTreeMap<Label, BTreeSet<NodeId>>>,
}

impl Nfa {
    /// Transition symbols are added to the alphabet.
    pub fn new(
        alphabet: BTreeSet<Label>,
        states: BTreeSet<NodeId>,
        transitions: Transitions,
        initial: NodeId,
        finals: BTreeSet<NodeId>,
    ) -> Result<Self, NfaError> {
        let mut alphabet = alphabet;
        let used = std::iter::once(&initial).chain(&finals).chain(
            transitions
                .iter()
                .flat_map(|((q, _), ts)| std::iter::once(q).chain(ts)),
        );
        for q in used {
            if !states.contains(q) {
                return Err(NfaError::UnknownState(q.clone()));
            }
        }
        alphabet.extend(transitions.keys().map(|(_, a)| a.clone()));
        let transitions = transitions
            .into_iter()
            .filter(|(_, ts)| !ts.is_empty())
            .collect();
        Ok(Nfa::assemble(
            alphabet,
            states,
            transitions,
            initial,
            finals,
        ))
    }

    fn assemble(
        alphabet: BTreeSet<Label>,
        states: BTreeSet<NodeId>,
        transitions: Transitions,
        initial: NodeId,
        finals: BTreeSet<NodeId>,
    ) -> Self {
        let mut delta: BTreeMap<NodeId, BTreeMap<Label, BTreeSet<NodeId>>> = BTreeMap::new();
        for ((q, a), ts) in &transitions {
            delta
                .entry(q.clone())
                .or_default()
                .insert(a.clone(), ts.clone());
        }
        Nfa {
            alphabet,
            states,
            transitions,
            initial,
            finals,
            delta,
        }
    }

    pub fn alphabet(&self) -> &BTreeSet<Label> {
        &self.alphabet
    }

    pub fn states(&self) -> &BTreeSet<NodeId> {
        &self.states
    }

    pub fn transitions(&self) -> &Transitions {
        &self.transitions
    }

    pub fn initial(&self) -> &NodeId {
        &self.initial
    }

    pub fn finals(&self) -> &BTreeSet<NodeId> {
        &self.finals
    }

    /// `Δ(q, a)`.
    pub fn step(&self, q: &NodeId, a: &Label) -> impl Iterator<Item = &NodeId> {
        self.delta
            .get(q)
            .and_then(|out| out.get(a))
            .into_iter()
            .flatten()
    }

    /// All transitions as `(q, a, q′)` triples.
    pub fn triples(&self) -> impl Iterator<Item = (&NodeId, &Label, &NodeId)> {
        self.transitions
            .iter()
            .flat_map(|((q, a), ts)| ts.iter().map(move |t| (q, a, t)))
    }

    pub fn transition_count(&self) -> usize {
        self.transitions.values().map(BTreeSet::len).sum()
    }

    /// States reachable from `initial` in zero or more steps.
    fn forward_reachable(&self) -> BTreeSet<NodeId> {
        let mut seen = BTreeSet::from([self.initial.clone()]);
        let mut queue = VecDeque::from([self.initial.clone()]);
        while let Some(q) = queue.pop_front() {
            for (_, _, t) in self.triples().filter(|(s, _, _)| **s == q) {
                if seen.insert(t.clone()) {
                    queue.push_back(t.clone());
                }
            }
        }
        seen
    }

    /// States from which some final state is reachable in zero or more steps.
    fn backward_reachable(&self) -> BTreeSet<NodeId> {
        let mut seen = self.finals.clone();
        let mut changed = true;
        while changed {
            changed = false;
            for (q, _, t) in self.triples() {
                if seen.contains(t) && !seen.contains(q) {
                    seen.insert(q.clone());
                    changed = true;
                }
            }
        }
        seen
    }

    pub fn accepts_empty_word(&self) -> bool {
        self.finals.contains(&self.initial)
    }

    pub fn is_empty_language(&self) -> bool {
        self.forward_reachable().is_disjoint(&self.finals)
    }
}

/// Glushkov (position) automaton: state `q0` plus one state `q<i>` per
/// symbol occurrence. ε-free by construction.
pub fn regex_to_nfa(r: &RegexAst) -> Nfa {
    #[derive(Default)]
    struct Info {
        first: BTreeSet<usize>,
        last: BTreeSet<usize>,
    }

    fn walk(
        r: &RegexAst,
        symbols: &mut Vec<Label>,
        follow: &mut BTreeMap<usize, BTreeSet<usize>>,
    ) -> Info {
        match r {
            RegexAst::EmptyLang => Info::default(),
            RegexAst::Lit(a) => {
                symbols.push(a.clone());
                let p = symbols.len();
                Info {
                    first: BTreeSet::from([p]),
                    last: BTreeSet::from([p]),
                }
            }
            RegexAst::Concat(l, r) => {
                let l = walk(l, symbols, follow);
                let r = walk(r, symbols, follow);
                for p in &l.last {
                    follow.entry(*p).or_default().extend(&r.first);
                }
                Info {
                    first: l.first,
                    last: r.last,
                }
            }
            RegexAst::Union(l, r) => {
                let l = walk(l, symbols, follow);
                let r = walk(r, symbols, follow);
                Info {
                    first: &l.first | &r.first,
                    last: &l.last | &r.last,
                }
            }
            RegexAst::Plus(inner) => {
                let i = walk(inner, symbols, follow);
                for p in &i.last {
                    follow.entry(*p).or_default().extend(&i.first);
                }
                i
            }
        }
    }

    let r = r.simplify();
    let mut symbols = Vec::new();
    let mut follow = BTreeMap::new();
    let info = walk(&r, &mut symbols, &mut follow);

    let state = |p: usize| NodeId::new(format!("q{p}"));
    let mut transitions = Transitions::new();
    for &p in &info.first {
        transitions
            .entry((state(0), symbols[p - 1].clone()))
            .or_default()
            .insert(state(p));
    }
    for (&p, targets) in &follow {
        for &t in targets {
            transitions
                .entry((state(p), symbols[t - 1].clone()))
                .or_default()
                .insert(state(t));
        }
    }
    Nfa::assemble(
        symbols.iter().cloned().collect(),
        (0..=symbols.len()).map(state).collect(),
        transitions,
        state(0),
        info.last.iter().map(|&p| state(p)).collect(),
    )
}

/// Subset simulation.
pub fn nfa_accepts(n: &Nfa, word: &[Label]) -> Result<bool, NfaError> {
    if let Some(a) = word.iter().find(|a| !n.alphabet.contains(*a)) {
        return Err(NfaError::UnknownSymbol(a.clone()));
    }
    let mut current = vec![&n.initial];
    for a in word {
        current = current.iter().flat_map(|q| n.step(q, a)).collect();
        current.sort_unstable();
        current.dedup();
        if current.is_empty() {
            return Ok(false);
        }
    }
    Ok(current.iter().any(|q| n.finals.contains(*q)))
}

/// An automaton with one initial state without incoming transitions and one
/// final state without outgoing transitions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NormalizedNfa {
    nfa: Nfa,
}

impl NormalizedNfa {
    fn new(nfa: Nfa) -> Self {
        assert_eq!(
            nfa.finals.len(),
            1,
            "normalized automaton has one final state"
        );
        let f = nfa.finals.iter().next().unwrap();
        assert!(
            nfa.triples().all(|(q, _, t)| t != &nfa.initial && q != f),
            "normalized automaton has no transition into its initial state or out of its final state"
        );
        NormalizedNfa { nfa }
    }

    pub fn nfa(&self) -> &Nfa {
        &self.nfa
    }

    pub fn initial(&self) -> &NodeId {
        &self.nfa.initial
    }

    pub fn final_state(&self) -> &NodeId {
        self.nfa.finals.iter().next().expect("one final state")
    }

    /// Renames every state `{old_prefix}{k}` to `{prefix}{k}`, keeping the
    /// numbering.
    pub fn with_prefix(&self, prefix: &str) -> NormalizedNfa {
        let order: Vec<&NodeId> = self.numbering();
        let map: BTreeMap<&NodeId, NodeId> = order
            .iter()
            .enumerate()
            .map(|(k, q)| (*q, NodeId::new(format!("{prefix}{k}"))))
            .collect();
        NormalizedNfa::new(relabel(&self.nfa, |q| map[q].clone()))
    }

    /// States in numbering order: initial first, final last, the rest in
    /// breadth-first discovery order.
    fn numbering(&self) -> Vec<&NodeId> {
        let f = self.final_state();
        let mut order = vec![self.initial()];
        let mut seen: BTreeSet<&NodeId> = BTreeSet::from([self.initial(), f]);
        let mut at = 0;
        while at < order.len() {
            let q = order[at];
            at += 1;
            for (_, _, t) in self.nfa.triples().filter(|(s, _, _)| *s == q) {
                if seen.insert(t) {
                    order.push(t);
                }
            }
        }
        let mut rest: Vec<&NodeId> = self
            .nfa
            .states
            .iter()
            .filter(|q| !seen.contains(q))
            .collect();
        order.append(&mut rest);
        if f != self.initial() {
            order.push(f);
        }
        order
    }
}

fn relabel(n: &Nfa, rename: impl Fn(&NodeId) -> NodeId) -> Nfa {
    let mut transitions = Transitions::new();
    for (q, a, t) in n.triples() {
        transitions
            .entry((rename(q), a.clone()))
            .or_default()
            .insert(rename(t));
    }
    Nfa::assemble(
        n.alphabet.clone(),
        n.states.iter().map(&rename).collect(),
        transitions,
        rename(&n.initial),
        n.finals.iter().map(&rename).collect(),
    )
}

/// Adds a fresh initial state `q₀′` and a fresh final state `f` with
/// `Δ′(q₀′, a) = Δ′(q₀, a)` and `Δ′(q, a) = Δ(q, a) ∪ {f | F ∩ Δ(q, a) ≠ ∅}`,
/// trims states that are unreachable or cannot reach `f`, and renumbers the
/// rest as `q0` (initial) … `q<n-1>` (final).
pub fn normalize_nfa(n: &Nfa) -> Result<NormalizedNfa, NfaError> {
    if n.accepts_empty_word() {
        return Err(NfaError::AcceptsEmptyWord);
    }
    if n.is_empty_language() {
        return Err(NfaError::EmptyLanguage);
    }
    let start = NodeId::new("\u{0}start");
    let fin = NodeId::new("\u{0}final");

    let mut transitions = Transitions::new();
    for ((q, a), targets) in &n.transitions {
        let mut out = targets.clone();
        if !targets.is_disjoint(&n.finals) {
            out.insert(fin.clone());
        }
        if q == &n.initial {
            transitions.insert((start.clone(), a.clone()), out.clone());
        }
        transitions.insert((q.clone(), a.clone()), out);
    }
    let mut states = n.states.clone();
    states.insert(start.clone());
    states.insert(fin.clone());
    let raw = Nfa::assemble(
        n.alphabet.clone(),
        states,
        transitions,
        start,
        BTreeSet::from([fin]),
    );

    let useful = &raw.forward_reachable() & &raw.backward_reachable();
    let transitions = raw
        .transitions
        .iter()
        .filter(|((q, _), _)| useful.contains(q))
        .map(|(k, ts)| (k.clone(), ts & &useful))
        .filter(|(_, ts)| !ts.is_empty())
        .collect();
    let trimmed = Nfa::assemble(raw.alphabet, useful, transitions, raw.initial, raw.finals);
    Ok(NormalizedNfa::new(trimmed).with_prefix("q"))
}

/// The term `q₀{must} ⊕ f{must,nil} ⊕ ⊕_{q′ ∈ Δ(q,a)} (q -a-> q′)`.
pub fn nfa_to_guest_expr(n: &NormalizedNfa) -> GuestExpr {
    let start = GuestExpr::unary(n.initial().clone(), Flags::must());
    let fin = GuestExpr::unary(n.final_state().clone(), Flags::must().union(Flags::nil()));
    let arrows = n.nfa().triples().map(|(q, a, t)| {
        GuestExpr::arrow(
            UnaryTerm::plain(q.clone()),
            a.clone(),
            UnaryTerm::plain(t.clone()),
        )
    });
    GuestExpr::sum([start, fin].into_iter().chain(arrows))
}

/// Guest whose nodes are the states and whose edges are the transitions;
/// every choice set is a single transition, except `∅` at the final state.
pub fn nfa_to_guest(n: &NormalizedNfa) -> Guest {
    eval(&nfa_to_guest_expr(n)).expect("the term contains no renaming")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::guest::ChoiceSet;
    use crate::regex::parse_regex;
    use proptest::prelude::*;

    fn word(s: &str) -> Vec<Label> {
        s.chars().map(Label::from).collect()
    }

    fn nfa(text: &str) -> Nfa {
        regex_to_nfa(&parse_regex(text).unwrap())
    }

    #[test]
    fn empty_language_nfa_accepts_nothing() {
        let n = regex_to_nfa(&RegexAst::EmptyLang);
        assert!(n.is_empty_language());
        assert_eq!(n.states().len(), 1);
        assert_eq!(normalize_nfa(&n), Err(NfaError::EmptyLanguage));
    }

    #[test]
    fn ab_plus_membership() {
        let n = nfa("(ab)+");
        for (w, expected) in [
            ("ab", true),
            ("abab", true),
            ("", false),
            ("a", false),
            ("aba", false),
        ] {
            assert_eq!(nfa_accepts(&n, &word(w)).unwrap(), expected, "{w:?}");
        }
        let norm = normalize_nfa(&n).unwrap();
        for (w, expected) in [("ab", true), ("abab", true), ("", false), ("aba", false)] {
            assert_eq!(
                nfa_accepts(norm.nfa(), &word(w)).unwrap(),
                expected,
                "{w:?}"
            );
        }
    }

    #[test]
    fn unknown_symbol_is_an_error() {
        assert_eq!(
            nfa_accepts(&nfa("a"), &word("ab")),
            Err(NfaError::UnknownSymbol(Label::from('b')))
        );
    }

    #[test]
    fn ab_plus_normalizes_to_four_states() {
        let norm = normalize_nfa(&nfa("(ab)+")).unwrap();
        let n = norm.nfa();
        assert_eq!(n.states().len(), 4);
        assert_eq!(n.transition_count(), 4);
        assert_eq!(norm.initial(), &NodeId::from("q0"));
        assert_eq!(norm.final_state(), &NodeId::from("q3"));
        let got: Vec<(String, String, String)> = n
            .triples()
            .map(|(q, a, t)| (q.to_string(), a.to_string(), t.to_string()))
            .collect();
        let expected = [
            ("q0", "a", "q1"),
            ("q1", "b", "q2"),
            ("q1", "b", "q3"),
            ("q2", "a", "q1"),
        ];
        assert_eq!(
            got,
            expected
                .iter()
                .map(|(q, a, t)| (q.to_string(), a.to_string(), t.to_string()))
                .collect::<Vec<_>>()
        );
    }

    #[test]
    fn normalization_rejects_empty_word() {
        let q = NodeId::from("q");
        let n = Nfa::new(
            BTreeSet::new(),
            BTreeSet::from([q.clone()]),
            Transitions::new(),
            q.clone(),
            BTreeSet::from([q]),
        )
        .unwrap();
        assert_eq!(normalize_nfa(&n), Err(NfaError::AcceptsEmptyWord));
    }

    #[test]
    fn nfa_new_rejects_undeclared_states() {
        let err = Nfa::new(
            BTreeSet::new(),
            BTreeSet::from([NodeId::from("a")]),
            Transitions::new(),
            NodeId::from("a"),
            BTreeSet::from([NodeId::from("z")]),
        )
        .unwrap_err();
        assert_eq!(err, NfaError::UnknownState(NodeId::from("z")));
    }

    #[test]
    fn renormalizing_keeps_shape() {
        let once = normalize_nfa(&nfa("(a|b)c+")).unwrap();
        let twice = normalize_nfa(once.nfa()).unwrap();
        assert_eq!(once.nfa().states().len(), twice.nfa().states().len());
        assert_eq!(
            once.nfa().transition_count(),
            twice.nfa().transition_count()
        );
    }

    #[test]
    fn with_prefix_renames_consistently() {
        let norm = normalize_nfa(&nfa("(ab)+")).unwrap().with_prefix("e0#");
        assert_eq!(norm.initial(), &NodeId::from("e0#0"));
        assert_eq!(norm.final_state(), &NodeId::from("e0#3"));
        assert!(nfa_accepts(norm.nfa(), &word("abab")).unwrap());
    }

    #[test]
    fn single_transition_guest() {
        let g = nfa_to_guest(&normalize_nfa(&nfa("a")).unwrap());
        let (q0, f) = (NodeId::from("q0"), NodeId::from("q1"));
        assert_eq!(g.nodes(), &BTreeSet::from([q0.clone(), f.clone()]));
        assert_eq!(g.must(), &BTreeSet::from([q0.clone(), f.clone()]));
        assert!(g.unique().is_empty() && g.exclusive().is_empty());
        assert_eq!(g.choice(&f), &BTreeSet::from([ChoiceSet::new()]));
        assert_eq!(g.choice(&q0).len(), 1);
    }

    #[test]
    fn ab_plus_guest_has_linear_choice() {
        let norm = normalize_nfa(&nfa("(ab)+")).unwrap();
        let g = nfa_to_guest(&norm);
        assert_eq!(g.edges().len(), norm.nfa().transition_count());
        assert_eq!(g.must().len(), 2);
        for v in g.nodes() {
            if v == norm.final_state() {
                assert_eq!(g.choice(v), &BTreeSet::from([ChoiceSet::new()]));
            } else {
                assert!(g.choice(v).iter().all(|gamma| gamma.len() == 1));
            }
        }
        // q1 has two b-successors, so two alternative choice sets
        assert_eq!(g.choice(&NodeId::from("q1")).len(), 2);
    }

    fn all_words(max: usize) -> Vec<Vec<Label>> {
        let mut out = vec![vec![]];
        let mut layer = vec![vec![]];
        for _ in 0..max {
            layer = layer
                .iter()
                .flat_map(|w: &Vec<Label>| {
                    ['a', 'b'].map(|c| {
                        let mut w = w.clone();
                        w.push(Label::from(c));
                        w
                    })
                })
                .collect();
            out.extend(layer.iter().cloned());
        }
        out
    }

    fn arb_nfa() -> impl Strategy<Value = Nfa> {
        let triples = proptest::collection::vec(
            (0usize..4, prop_oneof![Just('a'), Just('b')], 0usize..4),
            0..10,
        );
        (triples, proptest::collection::btree_set(0usize..4, 0..3)).prop_map(|(ts, finals)| {
            let s = |i: usize| NodeId::new(format!("s{i}"));
            let mut transitions = Transitions::new();
            for (q, a, t) in ts {
                transitions
                    .entry((s(q), Label::from(a)))
                    .or_default()
                    .insert(s(t));
            }
            Nfa::new(
                ['a', 'b'].map(Label::from).into(),
                (0..4).map(s).collect(),
                transitions,
                s(0),
                finals.into_iter().map(s).collect(),
            )
            .unwrap()
        })
    }

    proptest! {
        #[test]
        fn normalization_preserves_language(n in arb_nfa()) {
            match normalize_nfa(&n) {
                Ok(norm) => {
                    let m = norm.nfa();
                    prop_assert!(m.triples().all(|(_, _, t)| t != norm.initial()));
                    prop_assert!(m.triples().all(|(q, _, _)| q != norm.final_state()));
                    prop_assert_eq!(m.finals().len(), 1);
                    for w in all_words(6) {
                        prop_assert_eq!(
                            nfa_accepts(&n, &w).unwrap(),
                            nfa_accepts(m, &w).unwrap(),
                            "word {:?}", w
                        );
                    }
                }
                Err(NfaError::AcceptsEmptyWord) => prop_assert!(n.finals().contains(n.initial())),
                Err(NfaError::EmptyLanguage) => {
                    for w in all_words(6) {
                        prop_assert!(!nfa_accepts(&n, &w).unwrap());
                    }
                }
                Err(e) => prop_assert!(false, "unexpected {}", e),
            }
        }

        #[test]
        fn glushkov_agrees_with_membership_oracle(r in crate::regex::tests::arb_regex(3)) {
            let n = regex_to_nfa(&r);
            let norm = normalize_nfa(&n).ok();
            for w in all_words(6) {
                let expected = crate::regex::tests::member(&r, &w);
                let known = w.iter().all(|a| n.alphabet().contains(a));
                let got = known && nfa_accepts(&n, &w).unwrap();
                prop_assert_eq!(got, expected, "{} on {:?}", r, w);
                if let Some(norm) = &norm {
                    let got = known && nfa_accepts(norm.nfa(), &w).unwrap();
                    prop_assert_eq!(got, expected, "normalized {} on {:?}", r, w);
                }
            }
            prop_assert_eq!(norm.is_none(), r.is_empty_language());
        }

        #[test]
        fn guest_edge_count_matches_transitions(r in crate::regex::tests::arb_regex(3)) {
            if let Ok(norm) = normalize_nfa(&regex_to_nfa(&r)) {
                let g = nfa_to_guest(&norm);
                prop_assert_eq!(g.edges().len(), norm.nfa().transition_count());
                prop_assert_eq!(g.nodes().len(), norm.nfa().states().len());
            }
        }
    }
}

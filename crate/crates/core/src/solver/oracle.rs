//! Direct implementations of the four classical matching problems, used as
//! independent oracles for the encoders. None of them goes through guests
//! or loose graph simulations.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use thiserror::Error;

use crate::encode::DecoratedGraph;
use crate::graph::{HostGraph, Label, NodeId};
use crate::nfa::regex_to_nfa;
use crate::regex::RegexAst;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{what} has {size} nodes, above the oracle cap of {cap}")]
    CapExceeded {
        what: &'static str,
        size: usize,
        cap: usize,
    },
}

/// Size limits for the exhaustive oracles.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct OracleCaps {
    pub query_nodes: usize,
    pub host_nodes: usize,
}

impl Default for OracleCaps {
    fn default() -> Self {
        OracleCaps {
            query_nodes: 8,
            host_nodes: 64,
        }
    }
}

impl OracleCaps {
    fn check(&self, query: Option<usize>, host: usize) -> Result<(), OracleError> {
        if let Some(size) = query.filter(|&n| n > self.query_nodes) {
            return Err(OracleError::CapExceeded {
                what: "query",
                size,
                cap: self.query_nodes,
            });
        }
        if host > self.host_nodes {
            return Err(OracleError::CapExceeded {
                what: "host",
                size: host,
                cap: self.host_nodes,
            });
        }
        Ok(())
    }
}

/// Membership of a word in the language of `r`, by structural recursion.
pub fn regex_member(r: &RegexAst, w: &[Label]) -> bool {
    match r {
        RegexAst::EmptyLang => false,
        RegexAst::Lit(a) => w.len() == 1 && &w[0] == a,
        RegexAst::Union(a, b) => regex_member(a, w) || regex_member(b, w),
        RegexAst::Concat(a, b) => {
            (0..=w.len()).any(|i| regex_member(a, &w[..i]) && regex_member(b, &w[i..]))
        }
        RegexAst::Plus(a) => {
            regex_member(a, w)
                || (1..w.len()).any(|i| regex_member(a, &w[..i]) && regex_member(r, &w[i..]))
        }
    }
}

/// Whether an injection `φ : V_Q → V_H` maps every query edge onto a host
/// edge with the same label. Plain backtracking over query nodes.
pub fn sgi_oracle(q: &HostGraph, h: &HostGraph, caps: &OracleCaps) -> Result<bool, OracleError> {
    caps.check(Some(q.nodes().len()), h.nodes().len())?;
    let qn: Vec<&NodeId> = q.nodes().iter().collect();
    let hn: Vec<&NodeId> = h.nodes().iter().collect();
    let q_rank: BTreeMap<&NodeId, usize> = qn.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let h_rank: BTreeMap<&NodeId, usize> = hn.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let q_edges: Vec<(usize, &Label, usize)> = q
        .edges()
        .iter()
        .map(|e| (q_rank[&e.source], &e.label, q_rank[&e.target]))
        .collect();
    let h_edges: BTreeSet<(usize, &Label, usize)> = h
        .edges()
        .iter()
        .map(|e| (h_rank[&e.source], &e.label, h_rank[&e.target]))
        .collect();

    fn extend(
        phi: &mut Vec<usize>,
        used: &mut Vec<bool>,
        nq: usize,
        q_edges: &[(usize, &Label, usize)],
        h_edges: &BTreeSet<(usize, &Label, usize)>,
    ) -> bool {
        let k = phi.len();
        if k == nq {
            return true;
        }
        for v in 0..used.len() {
            if used[v] {
                continue;
            }
            phi.push(v);
            let consistent = q_edges.iter().all(|&(s, a, t)| {
                s > k || t > k || (s != k && t != k) || h_edges.contains(&(phi[s], a, phi[t]))
            });
            if consistent {
                used[v] = true;
                if extend(phi, used, nq, q_edges, h_edges) {
                    return true;
                }
                used[v] = false;
            }
            phi.pop();
        }
        false
    }

    Ok(extend(
        &mut Vec::new(),
        &mut vec![false; hn.len()],
        qn.len(),
        &q_edges,
        &h_edges,
    ))
}

/// The largest relation `R ⊆ V_Q × V_H` such that every out-edge of `u` is
/// matched, for `(u, v) ∈ R`, by an equally labelled out-edge of `v` whose
/// targets are again related. Computed by refinement from `V_Q × V_H`.
pub fn max_simulation(q: &HostGraph, h: &HostGraph) -> BTreeSet<(NodeId, NodeId)> {
    let mut rel: BTreeSet<(NodeId, NodeId)> = q
        .nodes()
        .iter()
        .flat_map(|u| h.nodes().iter().map(move |v| (u.clone(), v.clone())))
        .collect();
    loop {
        let keep: BTreeSet<(NodeId, NodeId)> = rel
            .iter()
            .filter(|(u, v)| {
                q.out_edges(u).all(|e| {
                    h.out_edges(v).any(|f| {
                        f.label == e.label && rel.contains(&(e.target.clone(), f.target.clone()))
                    })
                })
            })
            .cloned()
            .collect();
        if keep.len() == rel.len() {
            return rel;
        }
        rel = keep;
    }
}

/// The maximal graph simulation, if it relates every query node.
pub fn gs_oracle(
    q: &HostGraph,
    h: &HostGraph,
    caps: &OracleCaps,
) -> Result<Option<BTreeSet<(NodeId, NodeId)>>, OracleError> {
    caps.check(None, h.nodes().len())?;
    let rel = max_simulation(q, h);
    let covered: BTreeSet<&NodeId> = rel.iter().map(|(u, _)| u).collect();
    Ok((covered.len() == q.nodes().len()).then_some(rel))
}

/// Whether some nonempty host path spells a word of `L(r)`: breadth-first
/// search over host nodes × automaton states.
pub fn rlpm_oracle(r: &RegexAst, h: &HostGraph, caps: &OracleCaps) -> Result<bool, OracleError> {
    caps.check(None, h.nodes().len())?;
    let nfa = regex_to_nfa(r);
    let mut seen: BTreeSet<(&NodeId, &NodeId)> = BTreeSet::new();
    let mut queue: VecDeque<(&NodeId, &NodeId)> =
        h.nodes().iter().map(|v| (v, nfa.initial())).collect();
    while let Some((v, s)) = queue.pop_front() {
        for e in h.out_edges(v) {
            for t in nfa.step(s, &e.label) {
                if nfa.finals().contains(t) {
                    return Ok(true);
                }
                if seen.insert((&e.target, t)) {
                    queue.push_back((&e.target, t));
                }
            }
        }
    }
    Ok(false)
}

type Relation = BTreeSet<(usize, usize)>;

/// Pairs of host nodes joined by a walk spelling a word of `L(r)` whose
/// inner vertices all avoid `blocked`.
fn language_relation(
    r: &RegexAst,
    by_label: &BTreeMap<&Label, Relation>,
    blocked: &[bool],
) -> Relation {
    let compose = |a: &Relation, b: &Relation| -> Relation {
        let mut out = Relation::new();
        for &(x, y) in a {
            if blocked[y] {
                continue;
            }
            for &(_, z) in b.range((y, 0)..=(y, usize::MAX)) {
                out.insert((x, z));
            }
        }
        out
    };
    match r {
        RegexAst::EmptyLang => Relation::new(),
        RegexAst::Lit(a) => by_label.get(a).cloned().unwrap_or_default(),
        RegexAst::Union(a, b) => {
            &language_relation(a, by_label, blocked) | &language_relation(b, by_label, blocked)
        }
        RegexAst::Concat(a, b) => compose(
            &language_relation(a, by_label, blocked),
            &language_relation(b, by_label, blocked),
        ),
        RegexAst::Plus(a) => {
            let base = language_relation(a, by_label, blocked);
            let mut closure = base.clone();
            loop {
                let next = &closure | &compose(&closure, &base);
                if next.len() == closure.len() {
                    return closure;
                }
                closure = next;
            }
        }
    }
}

/// Whether an injection `φ : V_Q → V_H` exists such that every query edge
/// `(s, t)` is matched by a walk from `φ(s)` to `φ(t)` spelling a word of
/// its language, with no inner vertex in `φ(V_Q)`.
pub fn rlsgi_oracle(
    q: &DecoratedGraph,
    h: &HostGraph,
    caps: &OracleCaps,
) -> Result<bool, OracleError> {
    caps.check(Some(q.nodes().len()), h.nodes().len())?;
    let hn: Vec<&NodeId> = h.nodes().iter().collect();
    let h_rank: BTreeMap<&NodeId, usize> = hn.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut by_label: BTreeMap<&Label, Relation> = BTreeMap::new();
    for e in h.edges() {
        by_label
            .entry(&e.label)
            .or_default()
            .insert((h_rank[&e.source], h_rank[&e.target]));
    }
    let qn: Vec<&NodeId> = q.nodes().iter().collect();
    let q_rank: BTreeMap<&NodeId, usize> = qn.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let edges: Vec<(usize, usize, &RegexAst)> = q
        .edges()
        .iter()
        .map(|((s, t), r)| (q_rank[s], q_rank[t], r))
        .collect();

    fn injections(
        n: usize,
        k: usize,
        current: &mut Vec<usize>,
        visit: &mut dyn FnMut(&[usize]) -> bool,
    ) -> bool {
        if current.len() == k {
            return visit(current);
        }
        for v in 0..n {
            if current.contains(&v) {
                continue;
            }
            current.push(v);
            if injections(n, k, current, visit) {
                return true;
            }
            current.pop();
        }
        false
    }

    let mut check = |phi: &[usize]| {
        let mut blocked = vec![false; hn.len()];
        for &v in phi {
            blocked[v] = true;
        }
        edges
            .iter()
            .all(|&(s, t, r)| language_relation(r, &by_label, &blocked).contains(&(phi[s], phi[t])))
    };
    Ok(injections(hn.len(), qn.len(), &mut Vec::new(), &mut check))
}

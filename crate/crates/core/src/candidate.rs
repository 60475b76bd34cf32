//! Candidate subgraphs of a guest × host product and the polynomial checker
//! for the five loose-graph-simulation conditions.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use thiserror::Error;

use crate::graph::{reachability, Edge, Graph, HostGraph, NodeId, Pair, PairNode};
use crate::guest::Guest;

/// A subgraph `(V^{G→H}, E^{G→H})` of `G × H`. Once it passes
/// [`check_all`] it is a loose graph simulation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CandidateSubgraph {
    pub nodes: BTreeSet<PairNode>,
    pub edges: BTreeSet<Edge<PairNode>>,
}

impl CandidateSubgraph {
    pub fn new(nodes: BTreeSet<PairNode>, edges: BTreeSet<Edge<PairNode>>) -> Self {
        CandidateSubgraph { nodes, edges }
    }

    pub fn from_product(product: &Graph<PairNode>) -> Self {
        CandidateSubgraph {
            nodes: product.nodes().clone(),
            edges: product.edges().clone(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty() && self.edges.is_empty()
    }

    pub fn size(&self) -> usize {
        self.nodes.len() + self.edges.len()
    }

    /// `self ⊆ other` on both nodes and edges.
    pub fn is_subgraph_of(&self, other: &CandidateSubgraph) -> bool {
        self.nodes.is_subset(&other.nodes) && self.edges.is_subset(&other.edges)
    }

    /// Host nodes paired with guest node `u`.
    pub fn partners<'a>(&'a self, u: &'a NodeId) -> impl Iterator<Item = &'a NodeId> + 'a {
        self.nodes
            .iter()
            .filter(move |(g, _)| g == u)
            .map(|(_, h)| h)
    }

    pub fn union(&self, other: &CandidateSubgraph) -> CandidateSubgraph {
        CandidateSubgraph {
            nodes: self.nodes.union(&other.nodes).cloned().collect(),
            edges: self.edges.union(&other.edges).cloned().collect(),
        }
    }

    /// Removes a pair node together with its incident edges.
    pub fn remove_node(&mut self, pair: &PairNode) {
        self.nodes.remove(pair);
        self.edges
            .retain(|e| &e.source != pair && &e.target != pair);
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Condition {
    Lgs1,
    Lgs2,
    Lgs3,
    Lgs4,
    Lgs5,
}

impl Condition {
    pub const ALL: [Condition; 5] = [
        Condition::Lgs1,
        Condition::Lgs2,
        Condition::Lgs3,
        Condition::Lgs4,
        Condition::Lgs5,
    ];
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let n = match self {
            Condition::Lgs1 => 1,
            Condition::Lgs2 => 2,
            Condition::Lgs3 => 3,
            Condition::Lgs4 => 4,
            Condition::Lgs5 => 5,
        };
        write!(f, "LGS{n}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A must node has no partner.
    MissingMust { node: NodeId },
    /// A unique node has several partners.
    NonUnique { node: NodeId, hosts: Vec<NodeId> },
    /// A host node is shared by an exclusive node and another guest node.
    SharedExclusive { host: NodeId, guests: Vec<NodeId> },
    /// No choice set is fully realised at the pair.
    NoRealisedChoice { pair: PairNode },
    /// The edge belongs to no fully realised choice set.
    UnjustifiedEdge { edge: Edge<PairNode> },
    /// A must node reachable in the guest is unreachable from the pair.
    Disconnected { pair: PairNode, must: NodeId },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingMust { node } => write!(f, "must node `{node}` is unmatched"),
            Violation::NonUnique { node, hosts } => write!(
                f,
                "unique node `{node}` is matched by {}",
                join(hosts.iter())
            ),
            Violation::SharedExclusive { host, guests } => write!(
                f,
                "host node `{host}` is shared by exclusive assignment {}",
                join(guests.iter())
            ),
            Violation::NoRealisedChoice { pair } => {
                write!(f, "no choice set is realised at {}", Pair(pair))
            }
            Violation::UnjustifiedEdge { edge } => write!(
                f,
                "edge {} -{}-> {} is justified by no realised choice set",
                Pair(&edge.source),
                edge.label,
                Pair(&edge.target)
            ),
            Violation::Disconnected { pair, must } => {
                write!(f, "must node `{must}` is unreachable from {}", Pair(pair))
            }
        }
    }
}

fn join<'a>(items: impl Iterator<Item = &'a NodeId>) -> String {
    items.map(NodeId::as_str).collect::<Vec<_>>().join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConditionResult {
    pub condition: Condition,
    pub violations: Vec<Violation>,
}

impl ConditionResult {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Per-condition outcome of [`check_all`]; lists every violation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VerificationReport {
    pub results: Vec<ConditionResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.results.iter().all(ConditionResult::passed)
    }

    pub fn result(&self, condition: Condition) -> &ConditionResult {
        self.results
            .iter()
            .find(|r| r.condition == condition)
            .expect("report covers every condition")
    }

    pub fn failed_conditions(&self) -> Vec<Condition> {
        self.results
            .iter()
            .filter(|r| !r.passed())
            .map(|r| r.condition)
            .collect()
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.results {
            let status = if r.passed() { "pass" } else { "FAIL" };
            writeln!(f, "{}: {status}", r.condition)?;
            for v in &r.violations {
                writeln!(f, "  - {v}")?;
            }
        }
        Ok(())
    }
}

/// The candidate is not a subgraph of `G × H`.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StructuralError {
    #[error("pair {0} mentions a node outside the guest")]
    UnknownGuestNode(String),
    #[error("pair {0} mentions a node outside the host")]
    UnknownHostNode(String),
    #[error("edge endpoint {0} is not a pair node of the candidate")]
    DanglingEdge(String),
    #[error("edge {0} does not project to a guest edge")]
    NoGuestEdge(String),
    #[error("edge {0} does not project to a host edge")]
    NoHostEdge(String),
}

/// Checks the [`CandidateSubgraph`] invariants against a guest and host.
pub fn validate_candidate(
    guest: &Guest,
    host: &HostGraph,
    cand: &CandidateSubgraph,
) -> Result<(), StructuralError> {
    for p in &cand.nodes {
        if !guest.nodes().contains(&p.0) {
            return Err(StructuralError::UnknownGuestNode(Pair(p).to_string()));
        }
        if !host.nodes().contains(&p.1) {
            return Err(StructuralError::UnknownHostNode(Pair(p).to_string()));
        }
    }
    for e in &cand.edges {
        for end in [&e.source, &e.target] {
            if !cand.nodes.contains(end) {
                return Err(StructuralError::DanglingEdge(Pair(end).to_string()));
            }
        }
        let shown = || format!("{} -{}-> {}", Pair(&e.source), e.label, Pair(&e.target));
        // Membership in both edge sets also puts the label in Σ_G ∩ Σ_H.
        if !guest.edges().contains(&Edge::new(
            e.source.0.clone(),
            e.label.clone(),
            e.target.0.clone(),
        )) {
            return Err(StructuralError::NoGuestEdge(shown()));
        }
        if !host.edges().contains(&Edge::new(
            e.source.1.clone(),
            e.label.clone(),
            e.target.1.clone(),
        )) {
            return Err(StructuralError::NoHostEdge(shown()));
        }
    }
    Ok(())
}

pub fn check_lgs1(guest: &Guest, _host: &HostGraph, cand: &CandidateSubgraph) -> ConditionResult {
    let matched: BTreeSet<&NodeId> = cand.nodes.iter().map(|(g, _)| g).collect();
    let violations = guest
        .must()
        .iter()
        .filter(|m| !matched.contains(m))
        .map(|m| Violation::MissingMust { node: m.clone() })
        .collect();
    ConditionResult {
        condition: Condition::Lgs1,
        violations,
    }
}

pub fn check_lgs2(guest: &Guest, _host: &HostGraph, cand: &CandidateSubgraph) -> ConditionResult {
    let violations = guest
        .unique()
        .iter()
        .filter_map(|u| {
            let hosts: Vec<NodeId> = cand.partners(u).cloned().collect();
            (hosts.len() > 1).then(|| Violation::NonUnique {
                node: u.clone(),
                hosts,
            })
        })
        .collect();
    ConditionResult {
        condition: Condition::Lgs2,
        violations,
    }
}

pub fn check_lgs3(guest: &Guest, _host: &HostGraph, cand: &CandidateSubgraph) -> ConditionResult {
    let mut by_host: BTreeMap<&NodeId, Vec<NodeId>> = BTreeMap::new();
    for (g, h) in &cand.nodes {
        by_host.entry(h).or_default().push(g.clone());
    }
    let violations = by_host
        .into_iter()
        .filter(|(_, guests)| {
            guests.len() > 1 && guests.iter().any(|g| guest.exclusive().contains(g))
        })
        .map(|(host, guests)| Violation::SharedExclusive {
            host: host.clone(),
            guests,
        })
        .collect();
    ConditionResult {
        condition: Condition::Lgs3,
        violations,
    }
}

pub fn check_lgs4(guest: &Guest, _host: &HostGraph, cand: &CandidateSubgraph) -> ConditionResult {
    let mut out: BTreeMap<&PairNode, Vec<&Edge<PairNode>>> = BTreeMap::new();
    for e in &cand.edges {
        out.entry(&e.source).or_default().push(e);
    }
    let mut violations = Vec::new();
    for pair in &cand.nodes {
        let u = &pair.0;
        let pair_out = out.get(pair).map(Vec::as_slice).unwrap_or(&[]);
        let realised: BTreeSet<Edge<NodeId>> = pair_out
            .iter()
            .map(|e| Edge::new(u.clone(), e.label.clone(), e.target.0.clone()))
            .collect();
        let family = guest.choice(u);
        if !family.iter().any(|gamma| gamma.is_subset(&realised)) {
            violations.push(Violation::NoRealisedChoice { pair: pair.clone() });
        }
        for e in pair_out {
            let projected = Edge::new(u.clone(), e.label.clone(), e.target.0.clone());
            let justified = family
                .iter()
                .any(|gamma| gamma.contains(&projected) && gamma.is_subset(&realised));
            if !justified {
                violations.push(Violation::UnjustifiedEdge { edge: (*e).clone() });
            }
        }
    }
    ConditionResult {
        condition: Condition::Lgs4,
        violations,
    }
}

pub fn check_lgs5(guest: &Guest, _host: &HostGraph, cand: &CandidateSubgraph) -> ConditionResult {
    let mut violations = Vec::new();
    if guest.must().is_empty() {
        return ConditionResult {
            condition: Condition::Lgs5,
            violations,
        };
    }
    let guest_reach = reachability(guest.graph());
    let mut succ: BTreeMap<&PairNode, Vec<&PairNode>> = BTreeMap::new();
    for e in &cand.edges {
        succ.entry(&e.source).or_default().push(&e.target);
    }
    for pair in &cand.nodes {
        let required: Vec<&NodeId> = guest
            .must()
            .iter()
            .filter(|m| guest_reach.contains(&(pair.0.clone(), (*m).clone())))
            .collect();
        if required.is_empty() {
            continue;
        }
        // guest components of pairs reachable by a path of length ≥ 1
        let mut seen: BTreeSet<&PairNode> = BTreeSet::new();
        let mut queue: VecDeque<&PairNode> =
            succ.get(pair).into_iter().flatten().copied().collect();
        while let Some(p) = queue.pop_front() {
            if seen.insert(p) {
                queue.extend(succ.get(p).into_iter().flatten().copied());
            }
        }
        let reached: BTreeSet<&NodeId> = seen.iter().map(|(g, _)| g).collect();
        for m in required {
            if !reached.contains(m) {
                violations.push(Violation::Disconnected {
                    pair: pair.clone(),
                    must: m.clone(),
                });
            }
        }
    }
    ConditionResult {
        condition: Condition::Lgs5,
        violations,
    }
}

/// Runs all five checks after validating the candidate's structure.
pub fn check_all(
    guest: &Guest,
    host: &HostGraph,
    cand: &CandidateSubgraph,
) -> Result<VerificationReport, StructuralError> {
    validate_candidate(guest, host, cand)?;
    Ok(VerificationReport {
        results: vec![
            check_lgs1(guest, host, cand),
            check_lgs2(guest, host, cand),
            check_lgs3(guest, host, cand),
            check_lgs4(guest, host, cand),
            check_lgs5(guest, host, cand),
        ],
    })
}

/// `check_all` collapsed to a boolean; structural errors count as failure.
pub fn is_lgs(guest: &Guest, host: &HostGraph, cand: &CandidateSubgraph) -> bool {
    check_all(guest, host, cand).is_ok_and(|r| r.passed())
}

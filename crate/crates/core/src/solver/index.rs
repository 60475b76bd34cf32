//! Integer-indexed view of `G × H` used by the pruning engine.
//!
//! Pair `(u, h)` is numbered `u · |V_H| + h`, where `u` and `h` are the ranks
//! of the node names, so numeric order on pairs is lexicographic order on
//! names.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use crate::candidate::CandidateSubgraph;
use crate::graph::{reachability, Edge, HostGraph, NodeId, PairNode};
use crate::guest::Guest;

#[derive(Clone, Copy, Debug)]
pub(crate) struct ProductEdge {
    pub src: usize,
    pub tgt: usize,
    pub guest_edge: usize,
}

pub(crate) struct Index<'a> {
    pub guest_nodes: Vec<&'a NodeId>,
    pub host_nodes: Vec<&'a NodeId>,
    pub guest_edges: Vec<&'a Edge<NodeId>>,
    /// Per guest node: its choice sets as guest-edge indices.
    pub choice: Vec<Vec<Vec<usize>>>,
    pub nil: Vec<bool>,
    /// Per guest edge: indices (into `choice[source]`) of the sets containing it.
    pub containing: Vec<Vec<usize>>,
    pub edges: Vec<ProductEdge>,
    pub out: Vec<Vec<usize>>,
    pub inc: Vec<Vec<usize>>,
    pub must: Vec<usize>,
    /// Per guest node: must nodes reachable from it by a path of length ≥ 1.
    pub must_reach: Vec<Vec<usize>>,
    pub unique: Vec<usize>,
    pub exclusive: Vec<bool>,
}

/// Alive flags over pairs and product edges.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct State {
    pub pairs: Vec<bool>,
    pub edges: Vec<bool>,
}

impl<'a> Index<'a> {
    pub fn new(guest: &'a Guest, host: &'a HostGraph) -> Self {
        let guest_nodes: Vec<&NodeId> = guest.nodes().iter().collect();
        let host_nodes: Vec<&NodeId> = host.nodes().iter().collect();
        let g_rank: BTreeMap<&NodeId, usize> = guest_nodes
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let h_rank: BTreeMap<&NodeId, usize> = host_nodes
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let guest_edges: Vec<&Edge<NodeId>> = guest.edges().iter().collect();
        let host_edges: Vec<&Edge<NodeId>> = host.edges().iter().collect();
        let ge_rank: BTreeMap<&Edge<NodeId>, usize> = guest_edges
            .iter()
            .enumerate()
            .map(|(i, e)| (*e, i))
            .collect();

        let mut choice = Vec::with_capacity(guest_nodes.len());
        let mut nil = Vec::with_capacity(guest_nodes.len());
        let mut containing = vec![Vec::new(); guest_edges.len()];
        for v in &guest_nodes {
            let family: Vec<Vec<usize>> = guest
                .choice(v)
                .iter()
                .filter(|gamma| !gamma.is_empty())
                .map(|gamma| gamma.iter().map(|e| ge_rank[e]).collect())
                .collect();
            for (ci, gamma) in family.iter().enumerate() {
                for &ge in gamma {
                    containing[ge].push(ci);
                }
            }
            nil.push(guest.flags(v).nil);
            choice.push(family);
        }

        let nh = host_nodes.len();
        let mut by_label: BTreeMap<_, Vec<usize>> = BTreeMap::new();
        for (i, e) in host_edges.iter().enumerate() {
            by_label.entry(&e.label).or_default().push(i);
        }
        let npairs = guest_nodes.len() * nh;
        let mut edges = Vec::new();
        let mut out = vec![Vec::new(); npairs];
        let mut inc = vec![Vec::new(); npairs];
        for (gi, ge) in guest_edges.iter().enumerate() {
            let (gs, gt) = (g_rank[&ge.source], g_rank[&ge.target]);
            for &hi in by_label.get(&ge.label).into_iter().flatten() {
                let he = host_edges[hi];
                let src = gs * nh + h_rank[&he.source];
                let tgt = gt * nh + h_rank[&he.target];
                out[src].push(edges.len());
                inc[tgt].push(edges.len());
                edges.push(ProductEdge {
                    src,
                    tgt,
                    guest_edge: gi,
                });
            }
        }

        let must: Vec<usize> = guest.must().iter().map(|m| g_rank[m]).collect();
        let reach = reachability(guest.graph());
        let must_reach = guest_nodes
            .iter()
            .map(|u| {
                must.iter()
                    .copied()
                    .filter(|&m| reach.contains(&((*u).clone(), guest_nodes[m].clone())))
                    .collect()
            })
            .collect();
        let unique = guest.unique().iter().map(|u| g_rank[u]).collect();
        let exclusive = guest_nodes
            .iter()
            .map(|u| guest.exclusive().contains(*u))
            .collect();

        Index {
            guest_nodes,
            host_nodes,
            guest_edges,
            choice,
            nil,
            containing,
            edges,
            out,
            inc,
            must,
            must_reach,
            unique,
            exclusive,
        }
    }

    pub fn nh(&self) -> usize {
        self.host_nodes.len()
    }

    pub fn npairs(&self) -> usize {
        self.guest_nodes.len() * self.nh()
    }

    pub fn split(&self, p: usize) -> (usize, usize) {
        (p / self.nh(), p % self.nh())
    }

    pub fn full(&self) -> State {
        State {
            pairs: vec![true; self.npairs()],
            edges: vec![true; self.edges.len()],
        }
    }

    fn pair_node(&self, p: usize) -> PairNode {
        let (u, h) = self.split(p);
        (self.guest_nodes[u].clone(), self.host_nodes[h].clone())
    }

    pub fn to_candidate(&self, st: &State) -> CandidateSubgraph {
        let nodes = (0..self.npairs())
            .filter(|&p| st.pairs[p])
            .map(|p| self.pair_node(p))
            .collect();
        let edges = self
            .edges
            .iter()
            .zip(&st.edges)
            .filter(|(_, alive)| **alive)
            .map(|(pe, _)| {
                Edge::new(
                    self.pair_node(pe.src),
                    self.guest_edges[pe.guest_edge].label.clone(),
                    self.pair_node(pe.tgt),
                )
            })
            .collect();
        CandidateSubgraph::new(nodes, edges)
    }

    /// The part of `cand` lying inside `G × H`; anything else is dropped.
    pub fn state_of(&self, cand: &CandidateSubgraph) -> State {
        let g_rank: HashMap<&NodeId, usize> = self
            .guest_nodes
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let h_rank: HashMap<&NodeId, usize> = self
            .host_nodes
            .iter()
            .enumerate()
            .map(|(i, v)| (*v, i))
            .collect();
        let rank = |(g, h): &PairNode| Some(g_rank.get(g)? * self.nh() + h_rank.get(h)?);
        let mut st = State {
            pairs: vec![false; self.npairs()],
            edges: vec![false; self.edges.len()],
        };
        for p in cand.nodes.iter().filter_map(rank) {
            st.pairs[p] = true;
        }
        let wanted: BTreeSet<(usize, &str, usize)> = cand
            .edges
            .iter()
            .filter_map(|e| Some((rank(&e.source)?, e.label.as_str(), rank(&e.target)?)))
            .collect();
        for (i, pe) in self.edges.iter().enumerate() {
            let label = self.guest_edges[pe.guest_edge].label.as_str();
            st.edges[i] = wanted.contains(&(pe.src, label, pe.tgt));
        }
        st
    }
}

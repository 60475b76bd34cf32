//! Deciding and witnessing LGS existence.
//!
//! * [`prune`] computes the greatest subgraph of a start candidate that is
//!   closed under the edge and node removal rules. No LGS contained in the
//!   start is ever removed.
//! * [`greatest_lgs`] returns the union of all LGSs when the guest has no
//!   unique and no exclusive nodes, in polynomial time.
//! * [`solve_emptiness`] is a complete branch-and-prune search for the
//!   general (NP-complete) case.
//! * [`brute_force_lgs`] and the [`oracle`] functions exist for testing.

mod index;
pub mod oracle;
mod prune;

use std::env;

use rayon::prelude::*;
use thiserror::Error;

use crate::candidate::{check_all, check_lgs1, check_lgs2, check_lgs3, CandidateSubgraph};
use crate::graph::{tensor_product, HostGraph, NodeId};
use crate::guest::Guest;

use index::{Index, State};

pub const DEFAULT_BRUTE_FORCE_CAP: usize = 14;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolverError {
    #[error(
        "greatest LGS requires empty unique and exclusive sets \
         (unique: {unique:?}, exclusive: {exclusive:?}); use the general solver"
    )]
    NotPolynomialFragment {
        unique: Vec<NodeId>,
        exclusive: Vec<NodeId>,
    },
    #[error("instance has {size} product nodes and edges, above the cap of {cap}")]
    CapExceeded { size: usize, cap: usize },
}

/// Parallelism for [`solve_emptiness_with`].
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SolverOptions {
    /// `None`: rayon's default pool. `Some(0)`: sequential. `Some(n)`: a
    /// dedicated pool of `n` threads.
    pub threads: Option<usize>,
}

impl SolverOptions {
    pub fn sequential() -> Self {
        SolverOptions { threads: Some(0) }
    }

    /// Reads `LGS_THREADS`; unset or unparsable means the default pool.
    pub fn from_env() -> Self {
        SolverOptions {
            threads: env::var("LGS_THREADS")
                .ok()
                .and_then(|v| v.trim().parse().ok()),
        }
    }
}

/// Greatest fixed point of the removal rules below `start`. Parts of `start`
/// outside `G × H` are ignored.
pub fn prune(guest: &Guest, host: &HostGraph, start: &CandidateSubgraph) -> CandidateSubgraph {
    let ix = Index::new(guest, host);
    let st = ix.state_of(start);
    ix.to_candidate(&prune::prune(&ix, st))
}

/// [`prune`] started from the whole product.
pub fn prune_product(guest: &Guest, host: &HostGraph) -> CandidateSubgraph {
    let ix = Index::new(guest, host);
    ix.to_candidate(&prune::prune(&ix, ix.full()))
}

fn musts_matched(ix: &Index, st: &State) -> bool {
    let nh = ix.nh();
    ix.must
        .iter()
        .all(|&m| (m * nh..(m + 1) * nh).any(|p| st.pairs[p]))
}

/// The union of all LGSs, or `None` when there is none. Requires
/// `Unique = Exclusive = ∅`.
pub fn greatest_lgs(
    guest: &Guest,
    host: &HostGraph,
) -> Result<Option<CandidateSubgraph>, SolverError> {
    if !guest.unique().is_empty() || !guest.exclusive().is_empty() {
        return Err(SolverError::NotPolynomialFragment {
            unique: guest.unique().iter().cloned().collect(),
            exclusive: guest.exclusive().iter().cloned().collect(),
        });
    }
    let ix = Index::new(guest, host);
    let st = prune::prune(&ix, ix.full());
    Ok(musts_matched(&ix, &st).then(|| ix.to_candidate(&st)))
}

/// Branches resolving the first cheapest unique/exclusive conflict, or
/// `None` if the state has none.
fn branches(ix: &Index, st: &State) -> Option<Vec<State>> {
    let nh = ix.nh();
    let mut best: Option<Vec<State>> = None;
    let mut consider = |options: Vec<State>| {
        if best.as_ref().is_none_or(|b| options.len() < b.len()) {
            best = Some(options);
        }
    };
    for &u in &ix.unique {
        let partners: Vec<usize> = (u * nh..(u + 1) * nh).filter(|&p| st.pairs[p]).collect();
        if partners.len() > 1 {
            consider(
                partners
                    .iter()
                    .map(|&keep| {
                        let mut b = st.clone();
                        for &p in partners.iter().filter(|&&p| p != keep) {
                            b.pairs[p] = false;
                        }
                        b
                    })
                    .collect(),
            );
        }
    }
    for h in 0..nh {
        let users: Vec<usize> = (0..ix.guest_nodes.len())
            .filter(|&u| st.pairs[u * nh + h])
            .collect();
        if users.len() < 2 {
            continue;
        }
        if let Some(&x) = users.iter().find(|&&u| ix.exclusive[u]) {
            let mut drop = st.clone();
            drop.pairs[x * nh + h] = false;
            let mut keep = st.clone();
            for &u in users.iter().filter(|&&u| u != x) {
                keep.pairs[u * nh + h] = false;
            }
            consider(vec![drop, keep]);
        }
    }
    best
}

fn search(ix: &Index, st: State, parallel: bool) -> Option<State> {
    let st = prune::prune(ix, st);
    if !musts_matched(ix, &st) {
        return None;
    }
    match branches(ix, &st) {
        None => Some(st),
        Some(options) if parallel => options
            .into_par_iter()
            .find_map_first(|b| search(ix, b, parallel)),
        Some(options) => options.into_iter().find_map(|b| search(ix, b, parallel)),
    }
}

/// Some LGS of `guest` in `host`, or `None` if there is none. Parallelism is
/// taken from `LGS_THREADS`.
pub fn solve_emptiness(guest: &Guest, host: &HostGraph) -> Option<CandidateSubgraph> {
    solve_emptiness_with(guest, host, &SolverOptions::from_env())
}

/// Deterministic regardless of `opts`: branches are explored in a fixed
/// order and the first successful one wins.
pub fn solve_emptiness_with(
    guest: &Guest,
    host: &HostGraph,
    opts: &SolverOptions,
) -> Option<CandidateSubgraph> {
    let ix = Index::new(guest, host);
    let found = match opts.threads {
        Some(0) => search(&ix, ix.full(), false),
        None => search(&ix, ix.full(), true),
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n).build() {
            Ok(pool) => pool.install(|| search(&ix, ix.full(), true)),
            Err(_) => search(&ix, ix.full(), false),
        },
    };
    found.map(|st| ix.to_candidate(&st))
}

/// Every LGS, by testing each (node set, edge set) pair of `G × H` with
/// [`check_all`]. Node sets failing LGS1–LGS3, which do not depend on
/// edges, are skipped before their edge subsets are enumerated.
pub fn brute_force_lgs(
    guest: &Guest,
    host: &HostGraph,
    cap: usize,
) -> Result<Vec<CandidateSubgraph>, SolverError> {
    let product = tensor_product(guest.graph(), host);
    let size = product.nodes().len() + product.edges().len();
    if size > cap {
        return Err(SolverError::CapExceeded { size, cap });
    }
    let nodes: Vec<_> = product.nodes().iter().cloned().collect();
    let mut found = Vec::new();
    for mask in 0u64..(1u64 << nodes.len()) {
        let chosen: std::collections::BTreeSet<_> = nodes
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, p)| p.clone())
            .collect();
        let bare = CandidateSubgraph::new(chosen, Default::default());
        if !(check_lgs1(guest, host, &bare).passed()
            && check_lgs2(guest, host, &bare).passed()
            && check_lgs3(guest, host, &bare).passed())
        {
            continue;
        }
        let induced: Vec<_> = product
            .edges()
            .iter()
            .filter(|e| bare.nodes.contains(&e.source) && bare.nodes.contains(&e.target))
            .cloned()
            .collect();
        for emask in 0u64..(1u64 << induced.len()) {
            let edges = induced
                .iter()
                .enumerate()
                .filter(|(i, _)| emask >> i & 1 == 1)
                .map(|(_, e)| e.clone())
                .collect();
            let cand = CandidateSubgraph::new(bare.nodes.clone(), edges);
            if check_all(guest, host, &cand).is_ok_and(|r| r.passed()) {
                found.push(cand);
            }
        }
    }
    Ok(found)
}

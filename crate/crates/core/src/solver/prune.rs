use std::collections::{BTreeSet, VecDeque};

use super::index::{Index, State};

struct Pruner<'i, 'a> {
    ix: &'i Index<'a>,
    st: State,
    /// Live product edges leaving `(source(ge), h)` through guest edge `ge`,
    /// at `ge · |V_H| + h`.
    count: Vec<u32>,
    queue: BTreeSet<usize>,
}

impl Pruner<'_, '_> {
    fn kill_edge(&mut self, e: usize) {
        if !self.st.edges[e] {
            return;
        }
        self.st.edges[e] = false;
        let pe = self.ix.edges[e];
        let slot = pe.guest_edge * self.ix.nh() + self.ix.split(pe.src).1;
        self.count[slot] -= 1;
        if self.count[slot] == 0 {
            self.queue.insert(pe.src);
        }
    }

    fn kill_pair(&mut self, p: usize) {
        self.st.pairs[p] = false;
        for i in 0..self.ix.out[p].len() {
            self.kill_edge(self.ix.out[p][i]);
        }
        for i in 0..self.ix.inc[p].len() {
            self.kill_edge(self.ix.inc[p][i]);
        }
    }

    /// Edge rule and choice half of the node rule at one pair.
    fn settle(&mut self, p: usize) {
        if !self.st.pairs[p] {
            return;
        }
        let (u, h) = self.ix.split(p);
        let nh = self.ix.nh();
        let realised: Vec<bool> = self.ix.choice[u]
            .iter()
            .map(|gamma| gamma.iter().all(|&ge| self.count[ge * nh + h] > 0))
            .collect();
        if !self.ix.nil[u] && !realised.iter().any(|r| *r) {
            self.kill_pair(p);
            return;
        }
        for i in 0..self.ix.out[p].len() {
            let e = self.ix.out[p][i];
            if !self.st.edges[e] {
                continue;
            }
            let ge = self.ix.edges[e].guest_edge;
            if !self.ix.containing[ge].iter().any(|&ci| realised[ci]) {
                self.kill_edge(e);
            }
        }
    }

    /// Pairs from which some `(m, ·)` is reachable by a path of length ≥ 1.
    fn reaching(&self, m: usize) -> Vec<bool> {
        let nh = self.ix.nh();
        let mut seen = vec![false; self.ix.npairs()];
        let mut queue: VecDeque<usize> = (m * nh..(m + 1) * nh)
            .filter(|&p| self.st.pairs[p])
            .collect();
        while let Some(p) = queue.pop_front() {
            for &e in &self.ix.inc[p] {
                if self.st.edges[e] {
                    let src = self.ix.edges[e].src;
                    if !seen[src] {
                        seen[src] = true;
                        queue.push_back(src);
                    }
                }
            }
        }
        seen
    }

    /// Reachability half of the node rule; returns whether anything changed.
    fn connectivity_pass(&mut self) -> bool {
        let mut reach: Vec<Option<Vec<bool>>> = vec![None; self.ix.guest_nodes.len()];
        for &m in &self.ix.must {
            reach[m] = Some(self.reaching(m));
        }
        let mut doomed = Vec::new();
        for p in 0..self.ix.npairs() {
            if !self.st.pairs[p] {
                continue;
            }
            let u = self.ix.split(p).0;
            let ok = self.ix.must_reach[u]
                .iter()
                .all(|&m| reach[m].as_ref().is_some_and(|r| r[p]));
            if !ok {
                doomed.push(p);
            }
        }
        for &p in &doomed {
            self.kill_pair(p);
        }
        !doomed.is_empty()
    }
}

/// Greatest fixed point, below `start`, of the edge and node removal rules.
pub(crate) fn prune(ix: &Index, start: State) -> State {
    let mut st = start;
    for (e, pe) in ix.edges.iter().enumerate() {
        if st.edges[e] && !(st.pairs[pe.src] && st.pairs[pe.tgt]) {
            st.edges[e] = false;
        }
    }
    let nh = ix.nh();
    let mut count = vec![0u32; ix.guest_edges.len() * nh];
    for (e, pe) in ix.edges.iter().enumerate() {
        if st.edges[e] {
            count[pe.guest_edge * nh + ix.split(pe.src).1] += 1;
        }
    }
    let queue = (0..ix.npairs()).filter(|&p| st.pairs[p]).collect();
    let mut pruner = Pruner {
        ix,
        st,
        count,
        queue,
    };
    loop {
        while let Some(p) = pruner.queue.pop_first() {
            pruner.settle(p);
        }
        if !pruner.connectivity_pass() {
            break;
        }
    }
    pruner.st
}

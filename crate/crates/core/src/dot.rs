//! Graphviz rendering of hosts, guests and witnesses.
//!
//! Guest nodes are annotated with `∃` (must), `𝟙` (unique) and `✕`
//! (exclusive). A node whose choice family contains `∅` gets a corked edge:
//! a short tee-headed stub into an invisible point. Choice sets are listed as
//! comments above the node's edges.

use std::fmt::Write;

use crate::candidate::CandidateSubgraph;
use crate::graph::{Edge, HostGraph, Pair};
use crate::guest::Guest;

/// Anything [`export_dot`] can render.
#[derive(Clone, Copy, Debug)]
pub enum DotSource<'a> {
    Host(&'a HostGraph),
    Guest(&'a Guest),
    Witness(&'a CandidateSubgraph),
}

fn quote(s: &str) -> String {
    let mut out = String::with_capacity(s.len() + 2);
    out.push('"');
    for c in s.chars() {
        if c == '"' || c == '\\' {
            out.push('\\');
        }
        out.push(c);
    }
    out.push('"');
    out
}

fn edge_line(out: &mut String, src: &str, label: &str, dst: &str) {
    let _ = writeln!(
        out,
        "  {} -> {} [label={}];",
        quote(src),
        quote(dst),
        quote(label)
    );
}

pub fn export_dot(source: DotSource<'_>) -> String {
    match source {
        DotSource::Host(h) => host_dot(h),
        DotSource::Guest(g) => guest_dot(g),
        DotSource::Witness(w) => witness_dot(w),
    }
}

pub fn host_dot(h: &HostGraph) -> String {
    let mut out = String::from("digraph host {\n");
    for v in h.nodes() {
        let _ = writeln!(out, "  {};", quote(v.as_str()));
    }
    for e in h.edges() {
        edge_line(
            &mut out,
            e.source.as_str(),
            e.label.as_str(),
            e.target.as_str(),
        );
    }
    out.push_str("}\n");
    out
}

pub fn guest_dot(g: &Guest) -> String {
    let mut out = String::from("digraph guest {\n");
    for v in g.nodes() {
        let flags = g.flags(v);
        let marks: String = [
            (flags.must, " ∃"),
            (flags.unique, " 𝟙"),
            (flags.exclusive, " ✕"),
        ]
        .iter()
        .filter(|(on, _)| *on)
        .map(|(_, m)| *m)
        .collect();
        let _ = writeln!(
            out,
            "  {} [label={}];",
            quote(v.as_str()),
            quote(&format!("{v}{marks}"))
        );
    }
    for v in g.nodes() {
        let family = g.choice(v);
        let sets: Vec<String> = family
            .iter()
            .filter(|gamma| !gamma.is_empty())
            .map(|gamma| {
                let edges: Vec<String> = gamma.iter().map(Edge::to_string).collect();
                format!("{{{}}}", edges.join(", "))
            })
            .collect();
        if !sets.is_empty() {
            let _ = writeln!(out, "  // choice {v}: {}", sets.join(" "));
        }
        for e in g.graph().out_edges(v) {
            edge_line(
                &mut out,
                e.source.as_str(),
                e.label.as_str(),
                e.target.as_str(),
            );
        }
        if flags_nil(g, v) {
            let cork = quote(&format!("{v}/cork"));
            let _ = writeln!(out, "  {cork} [shape=point, style=invis];");
            let _ = writeln!(
                out,
                "  {} -> {cork} [arrowhead=tee, comment=\"corked\"];",
                quote(v.as_str())
            );
        }
    }
    out.push_str("}\n");
    out
}

fn flags_nil(g: &Guest, v: &crate::graph::NodeId) -> bool {
    g.choice(v).iter().any(|gamma| gamma.is_empty())
}

pub fn witness_dot(w: &CandidateSubgraph) -> String {
    let mut out = String::from("digraph witness {\n");
    for p in &w.nodes {
        let _ = writeln!(out, "  {};", quote(&Pair(p).to_string()));
    }
    for e in &w.edges {
        edge_line(
            &mut out,
            &Pair(&e.source).to_string(),
            e.label.as_str(),
            &Pair(&e.target).to_string(),
        );
    }
    out.push_str("}\n");
    out
}

//! JSON file formats.
//!
//! Every file is an object carrying `"format": "lgs/1"` and a `"kind"`:
//!
//! | kind              | payload                                                         |
//! |-------------------|-----------------------------------------------------------------|
//! | `host`            | `alphabet`, `nodes`, `edges: [[src, label, dst]]`               |
//! | `guest`           | host fields plus `must`, `unique`, `exclusive` and `choice`     |
//! | `guest-expr`      | `expr`: a guest expression in the [`crate::dsl`] syntax         |
//! | `decorated-graph` | `alphabet`, `nodes`, `edges: [[src, regex, dst]]`               |
//! | `witness`         | `pair_nodes: [[g, h]]`, `pair_edges: [[[g, h], label, [g, h]]]` |
//!
//! `choice` maps a node to a list of choice sets, each a list of indices
//! into the file's `edges` array; nodes left out have an empty family.
//! `alphabet` may be omitted, in which case it is the set of edge labels.
//!
//! Writers emit sorted keys and sorted sets, so equal values serialise to
//! identical bytes.

use std::collections::{BTreeMap, BTreeSet};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::algebra::{eval, AlgebraError, GuestExpr};
use crate::candidate::CandidateSubgraph;
use crate::dsl::{parse_guest_dsl, DslError};
use crate::encode::{DecoratedGraph, EncodeError};
use crate::graph::{Edge, GraphError, HostGraph, Label, NodeId, PairNode};
use crate::guest::{ChoiceFamily, Guest, GuestError};
use crate::regex::{parse_regex, RegexError};

pub const FORMAT: &str = "lgs/1";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Host,
    Guest,
    GuestExpr,
    DecoratedGraph,
    Witness,
}

impl std::fmt::Display for Kind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Kind::Host => "host",
            Kind::Guest => "guest",
            Kind::GuestExpr => "guest-expr",
            Kind::DecoratedGraph => "decorated-graph",
            Kind::Witness => "witness",
        })
    }
}

#[derive(Debug, Error)]
pub enum IoError {
    #[error("not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("at `{path}`: {message}")]
    Schema { path: String, message: String },
    #[error("unsupported format `{0}`, expected `{FORMAT}`")]
    Format(String),
    #[error("expected a {expected} file, found kind `{found}`")]
    WrongKind { expected: &'static str, found: Kind },
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Guest(#[from] GuestError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Encode(#[from] EncodeError),
    #[error("at `expr`: {0}")]
    Dsl(#[from] DslError),
    #[error("at `{path}`: {source}")]
    Regex { path: String, source: RegexError },
}

fn schema(path: impl Into<String>, message: impl Into<String>) -> IoError {
    IoError::Schema {
        path: path.into(),
        message: message.into(),
    }
}

/// Any file this module understands.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Document {
    Host(HostGraph),
    Guest(Guest),
    GuestExpr(GuestExpr),
    DecoratedGraph(DecoratedGraph),
    Witness(CandidateSubgraph),
}

impl Document {
    pub fn kind(&self) -> Kind {
        match self {
            Document::Host(_) => Kind::Host,
            Document::Guest(_) => Kind::Guest,
            Document::GuestExpr(_) => Kind::GuestExpr,
            Document::DecoratedGraph(_) => Kind::DecoratedGraph,
            Document::Witness(_) => Kind::Witness,
        }
    }
}

#[derive(Deserialize)]
struct Header {
    format: Value,
    kind: Value,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHost {
    format: String,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Vec<String>>,
    nodes: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String, String)>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGuest {
    format: String,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Vec<String>>,
    nodes: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String, String)>,
    #[serde(default)]
    must: Vec<String>,
    #[serde(default)]
    unique: Vec<String>,
    #[serde(default)]
    exclusive: Vec<String>,
    #[serde(default)]
    choice: BTreeMap<String, Vec<Vec<usize>>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGuestExpr {
    format: String,
    kind: Kind,
    expr: String,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDecorated {
    format: String,
    kind: Kind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    alphabet: Option<Vec<String>>,
    nodes: Vec<String>,
    #[serde(default)]
    edges: Vec<(String, String, String)>,
}

type RawPair = (String, String);

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawWitness {
    format: String,
    kind: Kind,
    #[serde(default)]
    pair_nodes: Vec<RawPair>,
    #[serde(default)]
    pair_edges: Vec<(RawPair, String, RawPair)>,
}

fn payload<T: DeserializeOwned>(value: Value) -> Result<T, IoError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let path = e.path().to_string();
        schema(path, e.into_inner().to_string())
    })
}

fn name(path: impl FnOnce() -> String, s: &str) -> Result<NodeId, IoError> {
    if s.is_empty() {
        return Err(schema(path(), "node names must be nonempty"));
    }
    Ok(NodeId::new(s))
}

fn label(path: impl FnOnce() -> String, s: &str) -> Result<Label, IoError> {
    if s.is_empty() {
        return Err(schema(path(), "labels must be nonempty"));
    }
    Ok(Label::new(s))
}

fn node_set(field: &str, names: &[String]) -> Result<BTreeSet<NodeId>, IoError> {
    names
        .iter()
        .enumerate()
        .map(|(i, s)| name(|| format!("{field}[{i}]"), s))
        .collect()
}

/// Edges in file order, plus the alphabet (given or inferred).
fn edge_list(
    alphabet: &Option<Vec<String>>,
    edges: &[(String, String, String)],
) -> Result<(BTreeSet<Label>, Vec<Edge<NodeId>>), IoError> {
    let list = edges
        .iter()
        .enumerate()
        .map(|(i, (s, a, t))| {
            Ok(Edge::new(
                name(|| format!("edges[{i}][0]"), s)?,
                label(|| format!("edges[{i}][1]"), a)?,
                name(|| format!("edges[{i}][2]"), t)?,
            ))
        })
        .collect::<Result<Vec<_>, IoError>>()?;
    let alphabet = match alphabet {
        Some(given) => given
            .iter()
            .enumerate()
            .map(|(i, a)| label(|| format!("alphabet[{i}]"), a))
            .collect::<Result<_, _>>()?,
        None => list.iter().map(|e| e.label.clone()).collect(),
    };
    Ok((alphabet, list))
}

fn host_from_raw(raw: RawHost) -> Result<HostGraph, IoError> {
    let nodes = node_set("nodes", &raw.nodes)?;
    let (alphabet, edges) = edge_list(&raw.alphabet, &raw.edges)?;
    Ok(HostGraph::new(
        alphabet,
        nodes,
        edges.into_iter().collect(),
    )?)
}

fn guest_from_raw(raw: RawGuest) -> Result<Guest, IoError> {
    let nodes = node_set("nodes", &raw.nodes)?;
    let (alphabet, edges) = edge_list(&raw.alphabet, &raw.edges)?;
    let graph = HostGraph::new(alphabet, nodes, edges.iter().cloned().collect())?;
    let mut choice = BTreeMap::new();
    for (v, sets) in &raw.choice {
        let mut family = ChoiceFamily::new();
        for (j, set) in sets.iter().enumerate() {
            let gamma = set
                .iter()
                .enumerate()
                .map(|(k, &ix)| {
                    edges.get(ix).cloned().ok_or_else(|| {
                        schema(
                            format!("choice.{v}[{j}][{k}]"),
                            format!(
                                "edge index {ix} out of range (the file has {} edges)",
                                edges.len()
                            ),
                        )
                    })
                })
                .collect::<Result<_, _>>()?;
            family.insert(gamma);
        }
        choice.insert(name(|| format!("choice.{v}"), v)?, family);
    }
    Ok(Guest::new(
        graph,
        node_set("must", &raw.must)?,
        node_set("unique", &raw.unique)?,
        node_set("exclusive", &raw.exclusive)?,
        choice,
    )?)
}

fn decorated_from_raw(raw: RawDecorated) -> Result<DecoratedGraph, IoError> {
    let nodes = node_set("nodes", &raw.nodes)?;
    let mut edges = BTreeMap::new();
    for (i, (s, r, t)) in raw.edges.iter().enumerate() {
        let key = (
            name(|| format!("edges[{i}][0]"), s)?,
            name(|| format!("edges[{i}][2]"), t)?,
        );
        let ast = parse_regex(r).map_err(|source| IoError::Regex {
            path: format!("edges[{i}][1]"),
            source,
        })?;
        if edges.insert(key, ast).is_some() {
            return Err(schema(
                format!("edges[{i}]"),
                format!("second edge from `{s}` to `{t}`"),
            ));
        }
    }
    let alphabet = match &raw.alphabet {
        Some(given) => given
            .iter()
            .enumerate()
            .map(|(i, a)| label(|| format!("alphabet[{i}]"), a))
            .collect::<Result<_, _>>()?,
        None => edges.values().flat_map(|r| r.symbols()).collect(),
    };
    Ok(DecoratedGraph::new(alphabet, nodes, edges)?)
}

fn witness_from_raw(raw: RawWitness) -> Result<CandidateSubgraph, IoError> {
    let pair =
        |path: &dyn Fn() -> String, (g, h): &(String, String)| -> Result<PairNode, IoError> {
            Ok((
                name(|| format!("{}[0]", path()), g)?,
                name(|| format!("{}[1]", path()), h)?,
            ))
        };
    let nodes = raw
        .pair_nodes
        .iter()
        .enumerate()
        .map(|(i, p)| pair(&|| format!("pair_nodes[{i}]"), p))
        .collect::<Result<_, _>>()?;
    let edges = raw
        .pair_edges
        .iter()
        .enumerate()
        .map(|(i, (s, a, t))| {
            Ok(Edge::new(
                pair(&|| format!("pair_edges[{i}][0]"), s)?,
                label(|| format!("pair_edges[{i}][1]"), a)?,
                pair(&|| format!("pair_edges[{i}][2]"), t)?,
            ))
        })
        .collect::<Result<_, IoError>>()?;
    Ok(CandidateSubgraph::new(nodes, edges))
}

/// Parses any supported file.
pub fn read_document(text: &str) -> Result<Document, IoError> {
    let value: Value = serde_json::from_str(text)?;
    if !value.is_object() {
        return Err(schema("", "expected a JSON object"));
    }
    let header: Header = payload(value.clone())?;
    match header.format.as_str() {
        Some(FORMAT) => {}
        Some(other) => return Err(IoError::Format(other.to_string())),
        None => return Err(schema("format", "expected a string")),
    }
    let kind: Kind = serde_json::from_value(header.kind).map_err(|_| {
        schema(
            "kind",
            "expected one of host, guest, guest-expr, decorated-graph, witness",
        )
    })?;
    Ok(match kind {
        Kind::Host => Document::Host(host_from_raw(payload(value)?)?),
        Kind::Guest => Document::Guest(guest_from_raw(payload(value)?)?),
        Kind::GuestExpr => {
            let raw: RawGuestExpr = payload(value)?;
            Document::GuestExpr(parse_guest_dsl(&raw.expr)?)
        }
        Kind::DecoratedGraph => Document::DecoratedGraph(decorated_from_raw(payload(value)?)?),
        Kind::Witness => Document::Witness(witness_from_raw(payload(value)?)?),
    })
}

/// Reads a host; a `guest` file is not accepted.
pub fn read_host(text: &str) -> Result<HostGraph, IoError> {
    match read_document(text)? {
        Document::Host(h) => Ok(h),
        other => Err(IoError::WrongKind {
            expected: "host",
            found: other.kind(),
        }),
    }
}

/// Reads a guest from either an explicit `guest` file or a `guest-expr`
/// file, which is evaluated.
pub fn read_guest(text: &str) -> Result<Guest, IoError> {
    match read_document(text)? {
        Document::Guest(g) => Ok(g),
        Document::GuestExpr(e) => Ok(eval(&e)?),
        other => Err(IoError::WrongKind {
            expected: "guest or guest-expr",
            found: other.kind(),
        }),
    }
}

pub fn read_guest_expr(text: &str) -> Result<GuestExpr, IoError> {
    match read_document(text)? {
        Document::GuestExpr(e) => Ok(e),
        other => Err(IoError::WrongKind {
            expected: "guest-expr",
            found: other.kind(),
        }),
    }
}

pub fn read_decorated(text: &str) -> Result<DecoratedGraph, IoError> {
    match read_document(text)? {
        Document::DecoratedGraph(d) => Ok(d),
        other => Err(IoError::WrongKind {
            expected: "decorated-graph",
            found: other.kind(),
        }),
    }
}

pub fn read_witness(text: &str) -> Result<CandidateSubgraph, IoError> {
    match read_document(text)? {
        Document::Witness(w) => Ok(w),
        other => Err(IoError::WrongKind {
            expected: "witness",
            found: other.kind(),
        }),
    }
}

/// One top-level key per line. Nonempty objects, and arrays holding arrays,
/// get one element per line; everything else is written compactly.
fn render<T: Serialize>(raw: &T) -> String {
    // Value objects are BTreeMaps, so keys come out sorted
    let value = serde_json::to_value(raw).expect("file structs always serialise");
    let compact = |v: &Value| serde_json::to_string(v).expect("values always serialise");
    let Value::Object(map) = value else {
        unreachable!("file structs serialise to objects")
    };
    let fields: Vec<String> = map
        .iter()
        .map(|(k, v)| {
            let items: Vec<String> = match v {
                Value::Array(xs) if xs.iter().any(|x| x.is_array() || x.is_object()) => {
                    xs.iter().map(compact).collect()
                }
                Value::Object(m) if !m.is_empty() => m
                    .iter()
                    .map(|(k, v)| format!("{}: {}", compact(&Value::from(k.as_str())), compact(v)))
                    .collect(),
                _ => return format!("  {}: {}", compact(&Value::from(k.as_str())), compact(v)),
            };
            let (open, close) = if v.is_array() { ('[', ']') } else { ('{', '}') };
            format!(
                "  {}: {open}\n    {}\n  {close}",
                compact(&Value::from(k.as_str())),
                items.join(",\n    ")
            )
        })
        .collect();
    format!("{{\n{}\n}}\n", fields.join(",\n"))
}

fn strings<'a, T: ToString + 'a>(items: impl IntoIterator<Item = &'a T>) -> Vec<String> {
    items.into_iter().map(ToString::to_string).collect()
}

fn triples(edges: &BTreeSet<Edge<NodeId>>) -> Vec<(String, String, String)> {
    edges
        .iter()
        .map(|e| {
            (
                e.source.to_string(),
                e.label.to_string(),
                e.target.to_string(),
            )
        })
        .collect()
}

pub fn write_host(h: &HostGraph) -> String {
    render(&RawHost {
        format: FORMAT.into(),
        kind: Kind::Host,
        alphabet: Some(strings(h.alphabet())),
        nodes: strings(h.nodes()),
        edges: triples(h.edges()),
    })
}

/// Explicit components; every node gets a `choice` entry.
pub fn write_guest(g: &Guest) -> String {
    let index: BTreeMap<&Edge<NodeId>, usize> =
        g.edges().iter().enumerate().map(|(i, e)| (e, i)).collect();
    let choice = g
        .nodes()
        .iter()
        .map(|v| {
            let sets = g
                .choice(v)
                .iter()
                .map(|gamma| gamma.iter().map(|e| index[e]).collect())
                .collect();
            (v.to_string(), sets)
        })
        .collect();
    render(&RawGuest {
        format: FORMAT.into(),
        kind: Kind::Guest,
        alphabet: Some(strings(g.alphabet())),
        nodes: strings(g.nodes()),
        edges: triples(g.edges()),
        must: strings(g.must()),
        unique: strings(g.unique()),
        exclusive: strings(g.exclusive()),
        choice,
    })
}

pub fn write_guest_expr(e: &GuestExpr) -> String {
    render(&RawGuestExpr {
        format: FORMAT.into(),
        kind: Kind::GuestExpr,
        expr: e.to_string(),
    })
}

pub fn write_decorated(d: &DecoratedGraph) -> String {
    render(&RawDecorated {
        format: FORMAT.into(),
        kind: Kind::DecoratedGraph,
        alphabet: Some(strings(d.alphabet())),
        nodes: strings(d.nodes()),
        edges: d
            .edges()
            .iter()
            .map(|((s, t), r)| (s.to_string(), r.to_string(), t.to_string()))
            .collect(),
    })
}

pub fn write_witness(w: &CandidateSubgraph) -> String {
    let pair = |(g, h): &PairNode| (g.to_string(), h.to_string());
    render(&RawWitness {
        format: FORMAT.into(),
        kind: Kind::Witness,
        pair_nodes: w.nodes.iter().map(pair).collect(),
        pair_edges: w
            .edges
            .iter()
            .map(|e| (pair(&e.source), e.label.to_string(), pair(&e.target)))
            .collect(),
    })
}

pub fn write_document(doc: &Document) -> String {
    match doc {
        Document::Host(h) => write_host(h),
        Document::Guest(g) => write_guest(g),
        Document::GuestExpr(e) => write_guest_expr(e),
        Document::DecoratedGraph(d) => write_decorated(d),
        Document::Witness(w) => write_witness(w),
    }
}

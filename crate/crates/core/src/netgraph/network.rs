//! Networks, classical protocols, their JSON file format and validation.

use super::letter::{GroupKind, IllegalMapError, LetterMap};
use serde::{Deserialize, Serialize};
use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NodeKind {
    Source,
    Sink,
    Internal,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Node {
    pub id: String,
    pub kind: NodeKind,
}

/// A unit-capacity directed link. Its id is its position in [`Network::edges`].
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub from: String,
    pub to: String,
}

/// Sink `sink` must receive the letter fed to source `source`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Requirement {
    pub sink: String,
    pub source: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Network {
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    pub requirements: Vec<Requirement>,
}

/// One summand `h(X_in)`; `input` indexes the node's incoming edges sorted by edge id.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Term {
    #[serde(rename = "in")]
    pub input: usize,
    pub map: LetterMap,
}

/// The letter written on outgoing edge `out` (position among the node's
/// outgoing edges sorted by edge id) is the group sum of `terms`.
///
/// A sink has no outgoing edges; its single operation uses `out = 0` and
/// names the letter the sink delivers. Sinks with one incoming edge may omit it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OutputOp {
    pub out: usize,
    pub terms: Vec<Term>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassicalProtocol {
    pub group: GroupKind,
    pub ops: BTreeMap<String, Vec<OutputOp>>,
}

/// On-disk layout of a network together with its classical protocol.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NetworkFile {
    pub group: GroupKind,
    pub nodes: Vec<Node>,
    pub edges: Vec<Edge>,
    #[serde(default)]
    pub requirements: Vec<Requirement>,
    #[serde(default)]
    pub ops: BTreeMap<String, Vec<OutputOp>>,
}

impl NetworkFile {
    pub fn from_json(text: &str) -> Result<Self, serde_json::Error> {
        serde_json::from_str(text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("network files always serialize")
    }

    pub fn split(self) -> (Network, ClassicalProtocol) {
        (
            Network {
                nodes: self.nodes,
                edges: self.edges,
                requirements: self.requirements,
            },
            ClassicalProtocol {
                group: self.group,
                ops: self.ops,
            },
        )
    }

    pub fn join(net: Network, proto: ClassicalProtocol) -> Self {
        NetworkFile {
            group: proto.group,
            nodes: net.nodes,
            edges: net.edges,
            requirements: net.requirements,
            ops: proto.ops,
        }
    }
}

/// A single way in which a network or protocol is malformed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    DuplicateNodeId(String),
    UnknownEndpoint {
        edge: usize,
        node: String,
    },
    Cycle {
        nodes: Vec<String>,
    },
    SourceHasIncoming(String),
    SinkHasOutgoing(String),
    SinkHasNoIncoming(String),
    InternalHasNoIncoming(String),
    MissingRequirement(String),
    DuplicateRequirement(String),
    RequirementNotASink(String),
    RequirementNotASource {
        sink: String,
        source: String,
    },
    OpsOnSource(String),
    OpsOnUnknownNode(String),
    MissingOp {
        node: String,
        out: usize,
    },
    DuplicateOp {
        node: String,
        out: usize,
    },
    OutputOutOfRange {
        node: String,
        out: usize,
        outdegree: usize,
    },
    InputOutOfRange {
        node: String,
        out: usize,
        input: usize,
        indegree: usize,
    },
    IllegalMap {
        node: String,
        out: usize,
        term: usize,
        source: IllegalMapError,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Violation::*;
        match self {
            DuplicateNodeId(id) => write!(f, "node id {id:?} is declared more than once"),
            UnknownEndpoint { edge, node } => {
                write!(f, "edge {edge} references unknown node {node:?}")
            }
            Cycle { nodes } => write!(f, "graph has a cycle through {}", nodes.join(", ")),
            SourceHasIncoming(id) => write!(f, "source {id:?} has indegree > 0"),
            SinkHasOutgoing(id) => write!(f, "sink {id:?}: sink has outdegree > 0"),
            SinkHasNoIncoming(id) => write!(f, "sink {id:?} has no incoming edge"),
            InternalHasNoIncoming(id) => write!(f, "internal node {id:?} has no incoming edge"),
            MissingRequirement(id) => write!(f, "sink {id:?} has no source requirement"),
            DuplicateRequirement(id) => write!(f, "sink {id:?} has more than one requirement"),
            RequirementNotASink(id) => write!(f, "requirement names {id:?}, which is not a sink"),
            RequirementNotASource { sink, source } => {
                write!(
                    f,
                    "requirement of sink {sink:?} names {source:?}, which is not a source"
                )
            }
            OpsOnSource(id) => write!(f, "source {id:?} cannot carry operations"),
            OpsOnUnknownNode(id) => write!(f, "operations given for unknown node {id:?}"),
            MissingOp { node, out } => write!(f, "node {node:?}: no operation for output {out}"),
            DuplicateOp { node, out } => {
                write!(f, "node {node:?}: output {out} has more than one operation")
            }
            OutputOutOfRange { node, out, outdegree } => write!(
                f,
                "node {node:?}: operation for output {out} but node has {outdegree} outputs"
            ),
            InputOutOfRange {
                node,
                out,
                input,
                indegree,
            } => write!(
                f,
                "node {node:?}, output {out}: term reads incoming edge {input} but indegree is {indegree}"
            ),
            IllegalMap {
                node,
                out,
                term,
                source,
            } => {
                write!(f, "node {node:?}, output {out}, term {term}: {source}")
            }
        }
    }
}

/// Every violation found in an instance; empty iff the instance is well formed.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                writeln!(f)?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

impl std::error::Error for ValidationReport {}

/// Resolved operation: incoming-edge positions with their maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ResolvedOp {
    pub terms: Vec<(usize, LetterMap)>,
}

/// A validated network plus protocol with index structures for evaluation.
#[derive(Debug, Clone)]
pub struct Instance {
    pub network: Network,
    pub protocol: ClassicalProtocol,
    /// Incoming edge ids per node, ascending.
    pub in_edges: Vec<Vec<usize>>,
    /// Outgoing edge ids per node, ascending.
    pub out_edges: Vec<Vec<usize>>,
    pub edge_ends: Vec<(usize, usize)>,
    /// Kahn order, ties broken by node id.
    pub topo: Vec<usize>,
    /// Source node indices in declaration order.
    pub sources: Vec<usize>,
    /// Sink node indices in declaration order.
    pub sinks: Vec<usize>,
    /// `sigma[j]` is the position in `sources` that sink `j` requires.
    pub sigma: Vec<usize>,
    /// Per node, per outgoing edge (or the single delivery op of a sink).
    pub ops: Vec<Vec<ResolvedOp>>,
}

impl Instance {
    pub fn new(network: Network, protocol: ClassicalProtocol) -> Result<Self, ValidationReport> {
        let report = validate_network(&network, &protocol);
        if !report.is_ok() {
            return Err(report);
        }
        Ok(Self::build_unchecked(network, protocol))
    }

    pub fn from_file(file: NetworkFile) -> Result<Self, ValidationReport> {
        let (net, proto) = file.split();
        Self::new(net, proto)
    }

    pub fn to_file(&self) -> NetworkFile {
        NetworkFile::join(self.network.clone(), self.protocol.clone())
    }

    pub fn node_id(&self, idx: usize) -> &str {
        &self.network.nodes[idx].id
    }

    pub fn group(&self) -> GroupKind {
        self.protocol.group
    }

    fn build_unchecked(network: Network, protocol: ClassicalProtocol) -> Self {
        let index: HashMap<&str, usize> = network
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| (n.id.as_str(), i))
            .collect();
        let n = network.nodes.len();
        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        let mut edge_ends = Vec::with_capacity(network.edges.len());
        for (e, edge) in network.edges.iter().enumerate() {
            let (a, b) = (index[edge.from.as_str()], index[edge.to.as_str()]);
            out_edges[a].push(e);
            in_edges[b].push(e);
            edge_ends.push((a, b));
        }
        let topo = kahn_order(&network, &edge_ends).expect("validated graphs are acyclic");
        let sources: Vec<usize> = (0..n).filter(|&i| network.nodes[i].kind == NodeKind::Source).collect();
        let sinks: Vec<usize> = (0..n).filter(|&i| network.nodes[i].kind == NodeKind::Sink).collect();
        let sigma = sinks
            .iter()
            .map(|&t| {
                let req = network
                    .requirements
                    .iter()
                    .find(|r| r.sink == network.nodes[t].id)
                    .expect("validated");
                let s = index[req.source.as_str()];
                sources.iter().position(|&x| x == s).expect("validated")
            })
            .collect();
        let ops = (0..n)
            .map(|v| {
                let node = &network.nodes[v];
                let given = protocol.ops.get(&node.id);
                let resolve = |out: usize| -> ResolvedOp {
                    let op = given
                        .and_then(|ops| ops.iter().find(|o| o.out == out))
                        .expect("validated");
                    ResolvedOp {
                        terms: op.terms.iter().map(|t| (t.input, t.map)).collect(),
                    }
                };
                match node.kind {
                    NodeKind::Source => Vec::new(),
                    NodeKind::Sink => {
                        if given.is_some_and(|g| !g.is_empty()) {
                            vec![resolve(0)]
                        } else {
                            vec![ResolvedOp {
                                terms: vec![(0, LetterMap::IDENTITY)],
                            }]
                        }
                    }
                    NodeKind::Internal => (0..out_edges[v].len()).map(resolve).collect(),
                }
            })
            .collect();
        Instance {
            network,
            protocol,
            in_edges,
            out_edges,
            edge_ends,
            topo,
            sources,
            sinks,
            sigma,
            ops,
        }
    }
}

/// Kahn's algorithm, always releasing the ready node with the smallest id.
/// Returns the nodes left on a cycle on failure.
pub(crate) fn kahn_order(net: &Network, edge_ends: &[(usize, usize)]) -> Result<Vec<usize>, Vec<usize>> {
    let n = net.nodes.len();
    let mut indeg = vec![0usize; n];
    let mut succ = vec![Vec::new(); n];
    for &(a, b) in edge_ends {
        indeg[b] += 1;
        succ[a].push(b);
    }
    let mut ready: BTreeSet<(&str, usize)> = (0..n)
        .filter(|&i| indeg[i] == 0)
        .map(|i| (net.nodes[i].id.as_str(), i))
        .collect();
    let mut order = Vec::with_capacity(n);
    while let Some(first) = ready.pop_first() {
        let v = first.1;
        order.push(v);
        for &w in &succ[v] {
            indeg[w] -= 1;
            if indeg[w] == 0 {
                ready.insert((net.nodes[w].id.as_str(), w));
            }
        }
    }
    if order.len() == n {
        Ok(order)
    } else {
        Err((0..n).filter(|&i| indeg[i] > 0).collect())
    }
}

/// Collect every violated invariant of `net` under `proto`.
pub fn validate_network(net: &Network, proto: &ClassicalProtocol) -> ValidationReport {
    let mut out = Vec::new();
    let mut index: HashMap<&str, usize> = HashMap::new();
    for (i, node) in net.nodes.iter().enumerate() {
        if index.insert(node.id.as_str(), i).is_some() {
            out.push(Violation::DuplicateNodeId(node.id.clone()));
        }
    }

    let n = net.nodes.len();
    let mut indeg = vec![0usize; n];
    let mut outdeg = vec![0usize; n];
    let mut edge_ends = Vec::new();
    for (e, edge) in net.edges.iter().enumerate() {
        let a = index.get(edge.from.as_str()).copied();
        let b = index.get(edge.to.as_str()).copied();
        for (end, id) in [(a, &edge.from), (b, &edge.to)] {
            if end.is_none() {
                out.push(Violation::UnknownEndpoint {
                    edge: e,
                    node: id.clone(),
                });
            }
        }
        if let (Some(a), Some(b)) = (a, b) {
            outdeg[a] += 1;
            indeg[b] += 1;
            edge_ends.push((a, b));
        }
    }
    if let Err(stuck) = kahn_order(net, &edge_ends) {
        out.push(Violation::Cycle {
            nodes: stuck.iter().map(|&i| net.nodes[i].id.clone()).collect(),
        });
    }

    for (i, node) in net.nodes.iter().enumerate() {
        let id = node.id.clone();
        match node.kind {
            NodeKind::Source if indeg[i] > 0 => out.push(Violation::SourceHasIncoming(id)),
            NodeKind::Sink if outdeg[i] > 0 => out.push(Violation::SinkHasOutgoing(id)),
            NodeKind::Sink if indeg[i] == 0 => out.push(Violation::SinkHasNoIncoming(id)),
            NodeKind::Internal if indeg[i] == 0 => out.push(Violation::InternalHasNoIncoming(id)),
            _ => {}
        }
    }

    let mut seen_req = BTreeSet::new();
    for req in &net.requirements {
        match index.get(req.sink.as_str()) {
            Some(&t) if net.nodes[t].kind == NodeKind::Sink => {
                if !seen_req.insert(req.sink.as_str()) {
                    out.push(Violation::DuplicateRequirement(req.sink.clone()));
                }
            }
            _ => out.push(Violation::RequirementNotASink(req.sink.clone())),
        }
        match index.get(req.source.as_str()) {
            Some(&s) if net.nodes[s].kind == NodeKind::Source => {}
            _ => out.push(Violation::RequirementNotASource {
                sink: req.sink.clone(),
                source: req.source.clone(),
            }),
        }
    }
    for node in &net.nodes {
        if node.kind == NodeKind::Sink && !seen_req.contains(node.id.as_str()) {
            out.push(Violation::MissingRequirement(node.id.clone()));
        }
    }

    for (id, ops) in &proto.ops {
        let Some(&v) = index.get(id.as_str()) else {
            out.push(Violation::OpsOnUnknownNode(id.clone()));
            continue;
        };
        if net.nodes[v].kind == NodeKind::Source {
            if !ops.is_empty() {
                out.push(Violation::OpsOnSource(id.clone()));
            }
            continue;
        }
        let outputs = match net.nodes[v].kind {
            NodeKind::Sink => 1,
            _ => outdeg[v],
        };
        let mut seen = BTreeSet::new();
        for op in ops {
            if op.out >= outputs {
                out.push(Violation::OutputOutOfRange {
                    node: id.clone(),
                    out: op.out,
                    outdegree: outdeg[v],
                });
            } else if !seen.insert(op.out) {
                out.push(Violation::DuplicateOp {
                    node: id.clone(),
                    out: op.out,
                });
            }
            for (k, term) in op.terms.iter().enumerate() {
                if term.input >= indeg[v] {
                    out.push(Violation::InputOutOfRange {
                        node: id.clone(),
                        out: op.out,
                        input: term.input,
                        indegree: indeg[v],
                    });
                }
                if let Err(source) = term.map.classify() {
                    out.push(Violation::IllegalMap {
                        node: id.clone(),
                        out: op.out,
                        term: k,
                        source,
                    });
                }
            }
        }
    }
    for (v, node) in net.nodes.iter().enumerate() {
        let given: BTreeSet<usize> = proto
            .ops
            .get(&node.id)
            .map(|ops| ops.iter().map(|o| o.out).collect())
            .unwrap_or_default();
        match node.kind {
            NodeKind::Source => {}
            NodeKind::Sink => {
                if indeg[v] >= 2 && !given.contains(&0) {
                    out.push(Violation::MissingOp {
                        node: node.id.clone(),
                        out: 0,
                    });
                }
            }
            NodeKind::Internal => {
                for o in 0..outdeg[v] {
                    if !given.contains(&o) {
                        out.push(Violation::MissingOp {
                            node: node.id.clone(),
                            out: o,
                        });
                    }
                }
            }
        }
    }

    ValidationReport { violations: out }
}

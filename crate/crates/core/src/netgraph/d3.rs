//! Degree-3 networks: every node is a source, sink, fork, join or transform.

use super::letter::{GroupKind, Letter, LetterMap, MapClass};
use super::network::{Edge, Instance, Network, NetworkFile, Node, NodeKind, OutputOp, Requirement, Term};
use std::collections::{BTreeMap, HashMap};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum D3Role {
    /// (0, 1): emits its input letter.
    Source,
    /// (1, 0): receives a letter.
    Sink,
    /// (1, 2): copies.
    Fork,
    /// (2, 1): adds under the network group.
    Join,
    /// (1, 1): applies a constant, one-to-one or two-to-one map.
    Transform(LetterMap),
}

impl D3Role {
    pub fn degrees(&self) -> (usize, usize) {
        match self {
            D3Role::Source => (0, 1),
            D3Role::Sink => (1, 0),
            D3Role::Fork => (1, 2),
            D3Role::Join => (2, 1),
            D3Role::Transform(_) => (1, 1),
        }
    }
}

impl fmt::Display for D3Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            D3Role::Source => f.write_str("source"),
            D3Role::Sink => f.write_str("sink"),
            D3Role::Fork => f.write_str("fork"),
            D3Role::Join => f.write_str("join"),
            D3Role::Transform(m) => write!(f, "transform{m}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D3Node {
    pub id: String,
    pub role: D3Role,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum D3Error {
    #[error("node {node:?} has (indegree, outdegree) = {actual:?}, but a {role} needs {expected:?}")]
    Degree {
        node: String,
        role: D3Role,
        expected: (usize, usize),
        actual: (usize, usize),
    },
    #[error("node {0:?} is internal with degrees {1:?}, which matches no D3 role")]
    NoRole(String, (usize, usize)),
    #[error("node {node:?}: {reason}")]
    NotSimple { node: String, reason: String },
    #[error("transform {node:?} carries the illegal map {map}")]
    IllegalMap { node: String, map: LetterMap },
    #[error("sink {0:?} has no requirement")]
    MissingRequirement(String),
    #[error("requirement references unknown node {0:?}")]
    UnknownNode(String),
    #[error("node {0:?}: edge endpoint index out of range")]
    DanglingEdge(String),
    #[error("graph has a cycle")]
    Cycle,
    #[error(transparent)]
    Invalid(#[from] super::network::ValidationReport),
}

/// A D3 network with its simple protocol.
///
/// Sink requirements are stored as `sigma[j]` (position in `sources`) for the
/// sink at `sinks[j]`. Edges keep stable ids (their position in `edges`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct D3Network {
    pub group: GroupKind,
    pub nodes: Vec<D3Node>,
    /// `(from, to)` node indices.
    pub edges: Vec<(usize, usize)>,
    pub sources: Vec<usize>,
    pub sinks: Vec<usize>,
    pub sigma: Vec<usize>,
    in_edges: Vec<Vec<usize>>,
    out_edges: Vec<Vec<usize>>,
}

impl D3Network {
    /// Build and check a D3 network. `sources`/`sinks` order is the node order.
    pub fn new(
        group: GroupKind,
        nodes: Vec<D3Node>,
        edges: Vec<(usize, usize)>,
        requirements: &[(usize, usize)],
    ) -> Result<Self, D3Error> {
        let n = nodes.len();
        let mut in_edges = vec![Vec::new(); n];
        let mut out_edges = vec![Vec::new(); n];
        for (e, &(a, b)) in edges.iter().enumerate() {
            if a >= n || b >= n {
                return Err(D3Error::DanglingEdge(format!("edge {e}")));
            }
            out_edges[a].push(e);
            in_edges[b].push(e);
        }
        for (v, node) in nodes.iter().enumerate() {
            let actual = (in_edges[v].len(), out_edges[v].len());
            let expected = node.role.degrees();
            if actual != expected {
                return Err(D3Error::Degree {
                    node: node.id.clone(),
                    role: node.role,
                    expected,
                    actual,
                });
            }
            if let D3Role::Transform(m) = node.role {
                if m.classify().is_err() {
                    return Err(D3Error::IllegalMap {
                        node: node.id.clone(),
                        map: m,
                    });
                }
            }
        }
        let sources: Vec<usize> = (0..n).filter(|&v| nodes[v].role == D3Role::Source).collect();
        let sinks: Vec<usize> = (0..n).filter(|&v| nodes[v].role == D3Role::Sink).collect();
        let mut sigma = Vec::with_capacity(sinks.len());
        for &t in &sinks {
            let s = requirements
                .iter()
                .find(|&&(sink, _)| sink == t)
                .map(|&(_, s)| s)
                .ok_or_else(|| D3Error::MissingRequirement(nodes[t].id.clone()))?;
            let pos = sources
                .iter()
                .position(|&x| x == s)
                .ok_or_else(|| D3Error::UnknownNode(format!("#{s}")))?;
            sigma.push(pos);
        }
        let net = D3Network {
            group,
            nodes,
            edges,
            sources,
            sinks,
            sigma,
            in_edges,
            out_edges,
        };
        if net.topological_order().len() != n {
            return Err(D3Error::Cycle);
        }
        Ok(net)
    }

    pub fn in_edges(&self, v: usize) -> &[usize] {
        &self.in_edges[v]
    }

    pub fn out_edges(&self, v: usize) -> &[usize] {
        &self.out_edges[v]
    }

    pub fn parents(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        self.in_edges[v].iter().map(|&e| self.edges[e].0)
    }

    pub fn index_of(&self, id: &str) -> Option<usize> {
        self.nodes.iter().position(|n| n.id == id)
    }

    /// Kahn order with node-id tie breaking.
    pub fn topological_order(&self) -> Vec<usize> {
        let net = self.as_plain_network();
        super::network::kahn_order(&net, &self.edges).unwrap_or_default()
    }

    fn as_plain_network(&self) -> Network {
        Network {
            nodes: self
                .nodes
                .iter()
                .map(|n| Node {
                    id: n.id.clone(),
                    kind: NodeKind::Internal,
                })
                .collect(),
            edges: Vec::new(),
            requirements: Vec::new(),
        }
    }

    /// Letter on every edge for the given source letters.
    pub fn edge_values(&self, inputs: &[Letter]) -> Vec<Letter> {
        assert_eq!(inputs.len(), self.sources.len(), "one letter per source");
        let mut vals = vec![Letter::ZERO; self.edges.len()];
        for v in self.topological_order() {
            let inp = |k: usize| vals[self.in_edges[v][k]];
            let out = match self.nodes[v].role {
                D3Role::Source => {
                    let pos = self.sources.iter().position(|&s| s == v).unwrap();
                    inputs[pos]
                }
                D3Role::Sink => continue,
                D3Role::Fork => inp(0),
                D3Role::Join => self.group.add(inp(0), inp(1)),
                D3Role::Transform(m) => m.apply(inp(0)),
            };
            for &e in &self.out_edges[v] {
                vals[e] = out;
            }
        }
        vals
    }

    /// Letters delivered to the sinks, in `sinks` order.
    pub fn eval(&self, inputs: &[Letter]) -> Vec<Letter> {
        let vals = self.edge_values(inputs);
        self.sinks.iter().map(|&t| vals[self.in_edges[t][0]]).collect()
    }

    /// Interpret a validated instance as a D3 network with a simple
    /// protocol, without rewriting. Fails if any node is not already in
    /// D3 shape.
    pub fn from_instance(inst: &Instance) -> Result<Self, D3Error> {
        let net = &inst.network;
        let mut nodes = Vec::with_capacity(net.nodes.len());
        for (v, node) in net.nodes.iter().enumerate() {
            let degs = (inst.in_edges[v].len(), inst.out_edges[v].len());
            let ops = &inst.ops[v];
            let not_simple = |reason: &str| D3Error::NotSimple {
                node: node.id.clone(),
                reason: reason.to_string(),
            };
            let identity_of = |op: &super::network::ResolvedOp, input: usize| {
                op.terms.len() == 1 && op.terms[0] == (input, LetterMap::IDENTITY)
            };
            let role = match (node.kind, degs) {
                (NodeKind::Source, (0, 1)) => D3Role::Source,
                (NodeKind::Sink, (1, 0)) => {
                    if !identity_of(&ops[0], 0) {
                        return Err(not_simple("a sink must only receive"));
                    }
                    D3Role::Sink
                }
                (NodeKind::Internal, (1, 2)) => {
                    if !(identity_of(&ops[0], 0) && identity_of(&ops[1], 0)) {
                        return Err(not_simple("a fork must copy its input"));
                    }
                    D3Role::Fork
                }
                (NodeKind::Internal, (2, 1)) => {
                    let op = &ops[0];
                    let mut ins: Vec<usize> = op.terms.iter().map(|t| t.0).collect();
                    ins.sort_unstable();
                    if ins != [0, 1] || op.terms.iter().any(|t| !t.1.is_identity()) {
                        return Err(not_simple("a join must add its two inputs"));
                    }
                    D3Role::Join
                }
                (NodeKind::Internal, (1, 1)) => {
                    let op = &ops[0];
                    if op.terms.len() != 1 {
                        return Err(not_simple("a transform applies exactly one map"));
                    }
                    D3Role::Transform(op.terms[0].1)
                }
                (NodeKind::Source, d) | (NodeKind::Sink, d) => {
                    return Err(D3Error::Degree {
                        node: node.id.clone(),
                        role: if node.kind == NodeKind::Source {
                            D3Role::Source
                        } else {
                            D3Role::Sink
                        },
                        expected: if node.kind == NodeKind::Source { (0, 1) } else { (1, 0) },
                        actual: d,
                    })
                }
                (NodeKind::Internal, d) => return Err(D3Error::NoRole(node.id.clone(), d)),
            };
            nodes.push(D3Node {
                id: node.id.clone(),
                role,
            });
        }
        let reqs: Vec<(usize, usize)> = inst
            .sinks
            .iter()
            .zip(&inst.sigma)
            .map(|(&t, &s)| (t, inst.sources[s]))
            .collect();
        D3Network::new(inst.group(), nodes, inst.edge_ends.clone(), &reqs)
    }

    /// Write as an ordinary network file whose protocol is the simple protocol.
    pub fn to_file(&self) -> NetworkFile {
        let id = |v: usize| self.nodes[v].id.clone();
        let ident = |input: usize| Term {
            input,
            map: LetterMap::IDENTITY,
        };
        let mut ops = BTreeMap::new();
        for (v, node) in self.nodes.iter().enumerate() {
            let list = match node.role {
                D3Role::Source | D3Role::Sink => continue,
                D3Role::Fork => vec![
                    OutputOp {
                        out: 0,
                        terms: vec![ident(0)],
                    },
                    OutputOp {
                        out: 1,
                        terms: vec![ident(0)],
                    },
                ],
                D3Role::Join => vec![OutputOp {
                    out: 0,
                    terms: vec![ident(0), ident(1)],
                }],
                D3Role::Transform(map) => vec![OutputOp {
                    out: 0,
                    terms: vec![Term { input: 0, map }],
                }],
            };
            ops.insert(id(v), list);
        }
        NetworkFile {
            group: self.group,
            nodes: self
                .nodes
                .iter()
                .map(|n| Node {
                    id: n.id.clone(),
                    kind: match n.role {
                        D3Role::Source => NodeKind::Source,
                        D3Role::Sink => NodeKind::Sink,
                        _ => NodeKind::Internal,
                    },
                })
                .collect(),
            edges: self
                .edges
                .iter()
                .map(|&(a, b)| Edge { from: id(a), to: id(b) })
                .collect(),
            requirements: self
                .sinks
                .iter()
                .zip(&self.sigma)
                .map(|(&t, &s)| Requirement {
                    sink: id(t),
                    source: id(self.sources[s]),
                })
                .collect(),
            ops,
        }
    }

    /// Count of nodes per role name, handy for summaries.
    pub fn role_counts(&self) -> BTreeMap<&'static str, usize> {
        let mut counts = BTreeMap::new();
        for n in &self.nodes {
            let key = match n.role {
                D3Role::Source => "source",
                D3Role::Sink => "sink",
                D3Role::Fork => "fork",
                D3Role::Join => "join",
                D3Role::Transform(m) => match m.classify() {
                    Ok(MapClass::Constant) => "transform-constant",
                    Ok(MapClass::OneToOne) => "transform-one-to-one",
                    _ => "transform-two-to-one",
                },
            };
            *counts.entry(key).or_insert(0) += 1;
        }
        counts
    }

    /// Check that `map` (old node index to new node index) is a graph
    /// isomorphism onto `other` preserving roles, edge multiplicities,
    /// join input order irrelevance and requirements.
    pub fn isomorphic_under(&self, other: &D3Network, map: &[usize]) -> bool {
        if self.nodes.len() != other.nodes.len()
            || self.edges.len() != other.edges.len()
            || map.len() != self.nodes.len()
            || self.group != other.group
        {
            return false;
        }
        let mut seen = vec![false; other.nodes.len()];
        for (v, &w) in map.iter().enumerate() {
            if w >= seen.len() || seen[w] || self.nodes[v].role != other.nodes[w].role {
                return false;
            }
            seen[w] = true;
        }
        let mut count: HashMap<(usize, usize), isize> = HashMap::new();
        for &(a, b) in &self.edges {
            *count.entry((map[a], map[b])).or_insert(0) += 1;
        }
        for &(a, b) in &other.edges {
            *count.entry((a, b)).or_insert(0) -= 1;
        }
        if count.values().any(|&c| c != 0) {
            return false;
        }
        self.sinks.iter().zip(&self.sigma).all(|(&t, &s)| {
            let t2 = map[t];
            let s2 = map[self.sources[s]];
            other
                .sinks
                .iter()
                .position(|&x| x == t2)
                .is_some_and(|j| other.sources[other.sigma[j]] == s2)
        })
    }
}

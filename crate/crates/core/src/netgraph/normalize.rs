//! Rewrite an arbitrary network and protocol into a D3 network with a simple
//! protocol computing the same sink letters.
//!
//! Each original node becomes a small gadget:
//!
//! * every incoming value used `k >= 2` times is copied by a chain of `k - 1`
//!   fork nodes (the first fork's first output feeds the next fork);
//! * every summand `h(X)` with non-identity `h` becomes a transform node placed
//!   after the fork, so forks only ever copy;
//! * constant summands are folded into the first non-constant summand; an
//!   output made only of constants becomes a constant transform fed by a copy
//!   of incoming edge 0;
//! * the summands of one output are added by a left-leaning chain of joins.
//!
//! Pure relays (a single identity summand) produce no node. Values that never
//! reach a sink are dropped. A source whose letter reaches no sink is wired to
//! a fresh drain sink `"<source>.drain"` requiring that source, so the D3
//! source keeps its out-degree of one.

use super::d3::{D3Error, D3Network, D3Node, D3Role};
use super::letter::{Letter, LetterMap, MapClass};
use super::network::{Instance, NodeKind, ValidationReport};
use std::collections::{BTreeMap, HashSet};

/// Original node id to the ids of the D3 nodes that replace it.
pub type NodeCorrespondence = BTreeMap<String, Vec<String>>;

#[derive(Debug, thiserror::Error)]
pub enum NormalizeError {
    #[error("instance is not valid:\n{0}")]
    Invalid(#[from] ValidationReport),
    #[error("generated node id {0:?} collides with an existing node")]
    IdCollision(String),
    #[error("normalization produced an invalid D3 network: {0}")]
    Internal(#[from] D3Error),
}

struct Builder<'a> {
    inst: &'a Instance,
    nodes: Vec<D3Node>,
    edges: Vec<(usize, usize)>,
    owner: Vec<usize>,
    counters: BTreeMap<(usize, char), usize>,
    requirements: Vec<(usize, usize)>,
}

impl Builder<'_> {
    fn push(&mut self, orig: usize, role: D3Role) -> usize {
        let tag = match role {
            D3Role::Fork => 'f',
            D3Role::Join => 'j',
            D3Role::Transform(_) => 't',
            D3Role::Source | D3Role::Sink => unreachable!("sources and sinks keep their ids"),
        };
        let n = self.counters.entry((orig, tag)).or_insert(0);
        let id = format!("{}.{}{}", self.inst.node_id(orig), tag, n);
        *n += 1;
        self.nodes.push(D3Node { id, role });
        self.owner.push(orig);
        self.nodes.len() - 1
    }

    fn connect(&mut self, from: usize, to: usize) {
        self.edges.push((from, to));
    }

    /// Copy the value produced at `src` for `k >= 1` consumers; returns one
    /// stub (producing node) per consumer.
    fn fan_out(&mut self, orig: usize, src: usize, k: usize) -> Vec<usize> {
        assert!(k >= 1);
        if k == 1 {
            return vec![src];
        }
        let mut leaves = vec![usize::MAX; k];
        let mut cur = src;
        for i in 1..k {
            let f = self.push(orig, D3Role::Fork);
            self.connect(cur, f);
            if i < k - 1 {
                leaves[k - i] = f;
                cur = f;
            } else {
                leaves[0] = f;
                leaves[1] = f;
            }
        }
        leaves
    }
}

/// Per node, the number of live uses of each incoming edge (by position),
/// and per edge whether the value it carries is needed.
fn liveness(inst: &Instance) -> (Vec<Vec<usize>>, Vec<bool>) {
    let n = inst.network.nodes.len();
    let mut uses: Vec<Vec<usize>> = (0..n).map(|v| vec![0; inst.in_edges[v].len()]).collect();
    let mut live_edge = vec![false; inst.network.edges.len()];
    for &v in inst.topo.iter().rev() {
        let kind = inst.network.nodes[v].kind;
        for (j, &e) in inst.out_edges[v].iter().enumerate() {
            let w = inst.edge_ends[e].1;
            let p = inst.in_edges[w].iter().position(|&x| x == e).unwrap();
            live_edge[e] = uses[w][p] > 0;
            if kind == NodeKind::Internal && live_edge[e] {
                count_uses(&inst.ops[v][j].terms, &mut uses[v]);
            }
        }
        if kind == NodeKind::Sink {
            count_uses(&inst.ops[v][0].terms, &mut uses[v]);
        }
    }
    (uses, live_edge)
}

fn count_uses(terms: &[(usize, LetterMap)], uses: &mut [usize]) {
    let mut any = false;
    for &(p, h) in terms {
        if h.classify() != Ok(MapClass::Constant) {
            uses[p] += 1;
            any = true;
        }
    }
    if !any {
        uses[0] += 1;
    }
}

/// Rewrite `inst` into D3 form. Sources and sinks keep their ids and order.
pub fn normalize_to_d3(inst: &Instance) -> Result<(D3Network, NodeCorrespondence), NormalizeError> {
    let (uses, live_edge) = liveness(inst);
    let group = inst.group();
    let net = &inst.network;
    let mut b = Builder {
        inst,
        nodes: Vec::new(),
        edges: Vec::new(),
        owner: Vec::new(),
        counters: BTreeMap::new(),
        requirements: Vec::new(),
    };

    // Sources and sinks first, in declaration order.
    let mut d3_of = vec![usize::MAX; net.nodes.len()];
    for (v, node) in net.nodes.iter().enumerate() {
        let role = match node.kind {
            NodeKind::Source => D3Role::Source,
            NodeKind::Sink => D3Role::Sink,
            NodeKind::Internal => continue,
        };
        d3_of[v] = b.nodes.len();
        b.nodes.push(D3Node {
            id: node.id.clone(),
            role,
        });
        b.owner.push(v);
    }
    for (&t, &s) in inst.sinks.iter().zip(&inst.sigma) {
        b.requirements.push((d3_of[t], d3_of[inst.sources[s]]));
    }

    // Stub feeding each original edge.
    let mut edge_src = vec![usize::MAX; net.edges.len()];

    for &v in &inst.topo {
        match net.nodes[v].kind {
            NodeKind::Source => {
                let s = d3_of[v];
                let live: Vec<usize> = inst.out_edges[v].iter().copied().filter(|&e| live_edge[e]).collect();
                if live.is_empty() {
                    let id = format!("{}.drain", net.nodes[v].id);
                    b.nodes.push(D3Node { id, role: D3Role::Sink });
                    b.owner.push(v);
                    let drain = b.nodes.len() - 1;
                    b.connect(s, drain);
                    b.requirements.push((drain, s));
                    continue;
                }
                let stubs = b.fan_out(v, s, live.len());
                for (e, stub) in live.into_iter().zip(stubs) {
                    edge_src[e] = stub;
                }
            }
            kind => {
                let mut port_stubs: Vec<std::vec::IntoIter<usize>> = inst.in_edges[v]
                    .iter()
                    .enumerate()
                    .map(|(p, &e)| {
                        if uses[v][p] == 0 {
                            Vec::new().into_iter()
                        } else {
                            b.fan_out(v, edge_src[e], uses[v][p]).into_iter()
                        }
                    })
                    .collect();
                let outputs: Vec<(usize, Option<usize>)> = if kind == NodeKind::Sink {
                    vec![(0, None)]
                } else {
                    inst.out_edges[v]
                        .iter()
                        .enumerate()
                        .filter(|&(_, &e)| live_edge[e])
                        .map(|(j, &e)| (j, Some(e)))
                        .collect()
                };
                for (j, out_edge) in outputs {
                    let result = build_output(&mut b, v, &inst.ops[v][j].terms, &mut port_stubs, group);
                    match out_edge {
                        Some(e) => edge_src[e] = result,
                        None => b.connect(result, d3_of[v]),
                    }
                }
                debug_assert!(port_stubs.iter_mut().all(|it| it.next().is_none()));
            }
        }
    }

    let mut seen = HashSet::new();
    for node in &b.nodes {
        if !seen.insert(node.id.as_str()) {
            return Err(NormalizeError::IdCollision(node.id.clone()));
        }
    }

    let mut corr: NodeCorrespondence = net.nodes.iter().map(|n| (n.id.clone(), Vec::new())).collect();
    for (i, node) in b.nodes.iter().enumerate() {
        corr.get_mut(&net.nodes[b.owner[i]].id).unwrap().push(node.id.clone());
    }
    let d3 = D3Network::new(group, b.nodes, b.edges, &b.requirements)?;
    Ok((d3, corr))
}

fn build_output(
    b: &mut Builder<'_>,
    v: usize,
    terms: &[(usize, LetterMap)],
    port_stubs: &mut [std::vec::IntoIter<usize>],
    group: super::letter::GroupKind,
) -> usize {
    let mut constant = Letter::ZERO;
    let mut live: Vec<(usize, LetterMap)> = Vec::new();
    for &(p, h) in terms {
        if h.classify() == Ok(MapClass::Constant) {
            constant = group.add(constant, h.apply(Letter::ZERO));
        } else {
            live.push((p, h));
        }
    }
    if live.is_empty() {
        let stub = port_stubs[0].next().expect("carrier stub");
        let t = b.push(v, D3Role::Transform(LetterMap::constant(constant)));
        b.connect(stub, t);
        return t;
    }
    if constant != Letter::ZERO {
        live[0].1 = live[0].1.translate(group, constant);
    }
    let mut values = Vec::with_capacity(live.len());
    for (p, h) in live {
        let stub = port_stubs[p].next().expect("one stub per use");
        if h.is_identity() {
            values.push(stub);
        } else {
            let t = b.push(v, D3Role::Transform(h));
            b.connect(stub, t);
            values.push(t);
        }
    }
    let mut acc = values[0];
    for &val in &values[1..] {
        let j = b.push(v, D3Role::Join);
        b.connect(acc, j);
        b.connect(val, j);
        acc = j;
    }
    acc
}

//! Assign each D3 node its quantum operation and exact shrinking factor.

use crate::netgraph::{D3Error, D3Network, D3Role, Instance, Letter, LetterMap, MapClass};
use crate::qmath::ShrunkState;
use crate::rational::{self, int, Rational};
use num_traits::One;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CompileError {
    #[error("not a degree-3 network: {0}")]
    NotD3(#[from] D3Error),
    #[error("expected {expected} source shrinking factors, got {got}")]
    SourceAlphaArity { expected: usize, got: usize },
    #[error("shrinking factor {0} is outside (0, 1]")]
    AlphaOutOfRange(String),
    #[error("map {0} is not two-to-one")]
    NotTwoToOne(LetterMap),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum OpTag {
    SourceTTR,
    Join,
    TransformConstant(Letter),
    TransformOneToOne(LetterMap),
    TransformTwoToOne(LetterMap),
    ForkEFC,
    SinkNoop,
}

impl OpTag {
    pub fn name(&self) -> &'static str {
        match self {
            OpTag::SourceTTR => "SourceTTR",
            OpTag::Join => "Join",
            OpTag::TransformConstant(_) => "TransformConstant",
            OpTag::TransformOneToOne(_) => "TransformOneToOne",
            OpTag::TransformTwoToOne(_) => "TransformTwoToOne",
            OpTag::ForkEFC => "ForkEFC",
            OpTag::SinkNoop => "SinkNoop",
        }
    }

    fn for_role(role: D3Role) -> OpTag {
        match role {
            D3Role::Source => OpTag::SourceTTR,
            D3Role::Sink => OpTag::SinkNoop,
            D3Role::Fork => OpTag::ForkEFC,
            D3Role::Join => OpTag::Join,
            D3Role::Transform(m) => match m.classify().expect("D3 maps are legal") {
                MapClass::Constant => OpTag::TransformConstant(m.0[0]),
                MapClass::OneToOne => OpTag::TransformOneToOne(m),
                MapClass::TwoToOne => OpTag::TransformTwoToOne(m),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CompiledNode {
    pub id: String,
    /// Longest path length from a source.
    pub depth: usize,
    pub op: OpTag,
    /// Shrink of the state on every outgoing edge; for a sink, the shrink
    /// of the state it receives.
    pub alpha: Rational,
}

/// Comparison of the two readings of the two-to-one emission weights at one
/// node: weights in the parent's α, which yield the shrink `α/(6 - α)`, and
/// weights in the node's own α.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EmissionDiagnostic {
    pub node: String,
    pub parent_alpha: Rational,
    pub own_alpha: Rational,
    /// Output shrink under the parent-α reading, if the output is shrunk.
    pub parent_reading: Option<Rational>,
    /// Output shrink under the own-α reading, if the output is shrunk.
    pub own_reading: Option<Rational>,
}

impl EmissionDiagnostic {
    pub fn consistent(&self) -> bool {
        self.parent_reading == self.own_reading
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantumProtocol {
    pub network: D3Network,
    /// Node indices sorted by depth, then id.
    pub order: Vec<usize>,
    /// Indexed like `network.nodes`.
    pub nodes: Vec<CompiledNode>,
    /// Shrink at each sink, in `network.sinks` order.
    pub sink_alphas: Vec<Rational>,
    pub diagnostics: Vec<EmissionDiagnostic>,
}

impl QuantumProtocol {
    pub fn alpha(&self, v: usize) -> &Rational {
        &self.nodes[v].alpha
    }

    pub fn op(&self, v: usize) -> OpTag {
        self.nodes[v].op
    }

    /// Shrink of the state carried by edge `e`.
    pub fn edge_alpha(&self, e: usize) -> &Rational {
        self.alpha(self.network.edges[e].0)
    }

    /// `{node id: {"op", "alpha", "depth", ...}}`.
    pub fn to_json(&self) -> Value {
        let mut out = Map::new();
        for &v in &self.order {
            let n = &self.nodes[v];
            let mut entry = Map::new();
            entry.insert("op".into(), json!(n.op.name()));
            entry.insert("alpha".into(), json!(rational::format(&n.alpha)));
            entry.insert("depth".into(), json!(n.depth));
            match n.op {
                OpTag::TransformConstant(c) => {
                    entry.insert("letter".into(), json!(c.to_string()));
                }
                OpTag::TransformOneToOne(m) | OpTag::TransformTwoToOne(m) => {
                    entry.insert("map".into(), serde_json::to_value(m).expect("map serializes"));
                }
                _ => {}
            }
            out.insert(n.id.clone(), Value::Object(entry));
        }
        Value::Object(out)
    }
}

/// Shrink produced by a node with the given op from its input shrinks.
pub fn node_alpha(op: OpTag, inputs: &[&Rational]) -> Rational {
    match op {
        OpTag::SourceTTR | OpTag::TransformConstant(_) => Rational::one(),
        OpTag::ForkEFC => inputs[0] / int(9),
        OpTag::Join => inputs[0] * inputs[1] / int(9),
        OpTag::TransformOneToOne(_) => inputs[0] / int(3),
        OpTag::TransformTwoToOne(_) => inputs[0] / (int(6) - inputs[0]),
        OpTag::SinkNoop => inputs[0].clone(),
    }
}

pub fn compile(d3: &D3Network) -> QuantumProtocol {
    let ones = vec![Rational::one(); d3.sources.len()];
    compile_with_source_alphas(d3, &ones).expect("unit source shrinks are valid")
}

pub fn compile_instance(inst: &Instance) -> Result<QuantumProtocol, CompileError> {
    Ok(compile(&D3Network::from_instance(inst)?))
}

/// Like [`compile`], but each source emits a state shrunk by the given factor
/// (in `sources` order) instead of 1.
pub fn compile_with_source_alphas(d3: &D3Network, source_alphas: &[Rational]) -> Result<QuantumProtocol, CompileError> {
    if source_alphas.len() != d3.sources.len() {
        return Err(CompileError::SourceAlphaArity {
            expected: d3.sources.len(),
            got: source_alphas.len(),
        });
    }
    if let Some(a) = source_alphas.iter().find(|a| !rational::in_unit_interval(a)) {
        return Err(CompileError::AlphaOutOfRange(rational::format(a)));
    }
    let topo = d3.topological_order();
    let n = d3.nodes.len();
    let mut depth = vec![0usize; n];
    for &v in &topo {
        depth[v] = d3.parents(v).map(|p| depth[p] + 1).max().unwrap_or(0);
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        depth[a]
            .cmp(&depth[b])
            .then_with(|| d3.nodes[a].id.cmp(&d3.nodes[b].id))
    });

    let mut alpha: Vec<Option<Rational>> = vec![None; n];
    let mut diagnostics = Vec::new();
    for &v in &order {
        let op = OpTag::for_role(d3.nodes[v].role);
        let a = if op == OpTag::SourceTTR {
            let pos = d3.sources.iter().position(|&s| s == v).expect("source");
            source_alphas[pos].clone()
        } else {
            let parents: Vec<&Rational> = d3
                .parents(v)
                .map(|p| alpha[p].as_ref().expect("parents come first in depth order"))
                .collect();
            let a = node_alpha(op, &parents);
            if let OpTag::TransformTwoToOne(g) = op {
                let diag = emission_diagnostic(&d3.nodes[v].id, parents[0], &a, &g);
                if !diag.consistent() {
                    log::debug!(
                        "two-to-one node {}: own-alpha emission reading gives {:?}, parent reading {:?}",
                        diag.node,
                        diag.own_reading.as_ref().map(rational::format),
                        diag.parent_reading.as_ref().map(rational::format)
                    );
                }
                diagnostics.push(diag);
            }
            a
        };
        alpha[v] = Some(a);
    }
    let nodes: Vec<CompiledNode> = (0..n)
        .map(|v| CompiledNode {
            id: d3.nodes[v].id.clone(),
            depth: depth[v],
            op: OpTag::for_role(d3.nodes[v].role),
            alpha: alpha[v].take().expect("every node visited"),
        })
        .collect();
    let sink_alphas = d3.sinks.iter().map(|&t| nodes[t].alpha.clone()).collect();
    Ok(QuantumProtocol {
        network: d3.clone(),
        order,
        nodes,
        sink_alphas,
        diagnostics,
    })
}

/// Letter law emitted by a two-to-one node after measuring `measured`:
/// `g(measured)` with weight `3/(6 - α)` and each letter outside the image
/// of `g` with weight `(3 - α)/(2(6 - α))`.
pub fn two_to_one_emission(alpha_v: &Rational, g: &LetterMap, measured: Letter) -> Result<[Rational; 4], CompileError> {
    if g.classify() != Ok(MapClass::TwoToOne) {
        return Err(CompileError::NotTwoToOne(*g));
    }
    let denom = int(6) - alpha_v;
    let hit = int(3) / &denom;
    let miss = (int(3) - alpha_v) / (denom * int(2));
    let off = g.off_range();
    let target = g.apply(measured);
    Ok(Letter::ALL.map(|l| {
        if l == target {
            hit.clone()
        } else if off.contains(&l) {
            miss.clone()
        } else {
            Rational::from_integer(0.into())
        }
    }))
}

/// Exact output mixture of a two-to-one node fed `ShrunkState(y, parent)`
/// when the emission weights are evaluated at `weights_alpha`.
pub fn two_to_one_output(
    parent: &Rational,
    weights_alpha: &Rational,
    g: &LetterMap,
    y: Letter,
) -> Result<[Rational; 4], CompileError> {
    let input = ShrunkState {
        label: y,
        alpha: parent.clone(),
    };
    let law = input.ttr_probabilities();
    let mut out: [Rational; 4] = Default::default();
    for x in Letter::ALL {
        let emitted = two_to_one_emission(weights_alpha, g, x)?;
        for l in Letter::ALL {
            out[l.index()] += &law[x.index()] * &emitted[l.index()];
        }
    }
    Ok(out)
}

fn emission_diagnostic(id: &str, parent: &Rational, own: &Rational, g: &LetterMap) -> EmissionDiagnostic {
    let reading = |weights_alpha: &Rational| {
        let mut shrink = None;
        for y in Letter::ALL {
            let out = two_to_one_output(parent, weights_alpha, g, y).expect("two-to-one map");
            match ShrunkState::from_coefficients(&out) {
                Some(s) if s.label == g.apply(y) => match &shrink {
                    None => shrink = Some(s.alpha),
                    Some(prev) if *prev == s.alpha => {}
                    Some(_) => return None,
                },
                _ => return None,
            }
        }
        shrink
    };
    EmissionDiagnostic {
        node: id.to_string(),
        parent_alpha: parent.clone(),
        own_alpha: own.clone(),
        parent_reading: reading(parent),
        own_reading: reading(own),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgraph::{D3Node, GroupKind};
    use crate::rational::rat;

    fn l(s: &str) -> Letter {
        s.parse().unwrap()
    }

    fn chain(map: LetterMap) -> D3Network {
        let nodes = vec![
            D3Node {
                id: "s".into(),
                role: D3Role::Source,
            },
            D3Node {
                id: "v".into(),
                role: D3Role::Transform(map),
            },
            D3Node {
                id: "t".into(),
                role: D3Role::Sink,
            },
        ];
        D3Network::new(GroupKind::Z4, nodes, vec![(0, 1), (1, 2)], &[(2, 0)]).unwrap()
    }

    #[test]
    fn one_to_one_chain_gives_one_third() {
        let neg = LetterMap([l("00"), l("11"), l("10"), l("01")]);
        let qp = compile(&chain(neg));
        assert_eq!(qp.sink_alphas, vec![rat(1, 3)]);
        assert_eq!(qp.op(1), OpTag::TransformOneToOne(neg));
    }

    #[test]
    fn two_to_one_chain_gives_one_fifth() {
        let hi = LetterMap([l("00"), l("00"), l("10"), l("10")]);
        let qp = compile(&chain(hi));
        assert_eq!(qp.sink_alphas, vec![rat(1, 5)]);
        let d = &qp.diagnostics[0];
        assert_eq!(d.parent_reading, Some(rat(1, 5)));
        assert_eq!(d.own_reading, None);
        assert!(!d.consistent());
    }

    #[test]
    fn constant_resets_alpha() {
        let qp = compile(&chain(LetterMap::constant(l("01"))));
        assert_eq!(qp.sink_alphas, vec![Rational::one()]);
        assert_eq!(qp.op(1), OpTag::TransformConstant(l("01")));
    }

    #[test]
    fn emission_weights_at_one_fifth() {
        let hi = LetterMap([l("00"), l("00"), l("10"), l("10")]);
        let w = two_to_one_emission(&rat(1, 5), &hi, l("01")).unwrap();
        assert_eq!(w, [rat(15, 29), rat(7, 29), rat(0, 1), rat(7, 29)]);
        assert_eq!(w, two_to_one_emission(&rat(1, 5), &hi, l("00")).unwrap());
        assert!(two_to_one_emission(&rat(1, 5), &LetterMap::IDENTITY, l("00")).is_err());
    }

    #[test]
    fn source_alpha_overrides() {
        let swap = LetterMap([l("01"), l("00"), l("11"), l("10")]);
        let qp = compile_with_source_alphas(&chain(swap), &[rat(1, 3)]).unwrap();
        assert_eq!(qp.sink_alphas, vec![rat(1, 9)]);
        assert!(compile_with_source_alphas(&qp.network, &[]).is_err());
        assert!(compile_with_source_alphas(&qp.network, &[rat(0, 1)]).is_err());
    }

    #[test]
    fn json_shape() {
        let qp = compile(&chain(LetterMap::IDENTITY.translate(GroupKind::Z4, l("01"))));
        let j = qp.to_json();
        assert_eq!(j["v"]["op"], "TransformOneToOne");
        assert_eq!(j["v"]["alpha"], "1/3");
        assert_eq!(j["s"]["alpha"], "1/1");
        assert_eq!(j["t"]["depth"], 2);
    }
}

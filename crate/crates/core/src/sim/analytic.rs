use super::{check_arity, SimError};
use crate::compile::{OpTag, QuantumProtocol};
use crate::efc::efc_apply;
use crate::netgraph::Letter;
use crate::qmath::ShrunkState;
use crate::rational::{int, Rational};
use num_traits::One;

/// Shrunk state on every edge for tetra-label inputs, propagated with the
/// per-node rules. Sources emit their compiled shrink (1 unless overridden).
pub fn simulate_analytic(qp: &QuantumProtocol, inputs: &[Letter]) -> Result<Vec<ShrunkState>, SimError> {
    let net = &qp.network;
    check_arity(net.sources.len(), inputs.len())?;
    let mut edges: Vec<Option<ShrunkState>> = vec![None; net.edges.len()];
    for &v in &qp.order {
        let incoming: Vec<&ShrunkState> = net
            .in_edges(v)
            .iter()
            .map(|&e| edges[e].as_ref().expect("parents precede children"))
            .collect();
        let out = match qp.op(v) {
            OpTag::SinkNoop => continue,
            OpTag::SourceTTR => {
                let pos = net.sources.iter().position(|&s| s == v).expect("source");
                ShrunkState {
                    label: inputs[pos],
                    alpha: qp.alpha(v).clone(),
                }
            }
            OpTag::ForkEFC => efc_apply(incoming[0])?.0,
            OpTag::Join => ShrunkState {
                label: net.group.add(incoming[0].label, incoming[1].label),
                alpha: &incoming[0].alpha * &incoming[1].alpha / int(9),
            },
            OpTag::TransformConstant(c) => ShrunkState {
                label: c,
                alpha: Rational::one(),
            },
            OpTag::TransformOneToOne(g) => ShrunkState {
                label: g.apply(incoming[0].label),
                alpha: &incoming[0].alpha / int(3),
            },
            OpTag::TransformTwoToOne(g) => ShrunkState {
                label: g.apply(incoming[0].label),
                alpha: &incoming[0].alpha / (int(6) - &incoming[0].alpha),
            },
        };
        for &e in net.out_edges(v) {
            edges[e] = Some(out.clone());
        }
    }
    Ok(edges.into_iter().map(|s| s.expect("every edge has a tail")).collect())
}

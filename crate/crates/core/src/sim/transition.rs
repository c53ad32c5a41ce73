use crate::compile::{two_to_one_emission, OpTag, QuantumProtocol};
use crate::efc::{efc_pair_distribution, EfcAlphaParams};
use crate::netgraph::Letter;
use crate::rational::{rat, Rational};
use num_traits::Zero;

/// Exact law of a node's output labels given its input labels.
///
/// Labels are packed two bits each, first edge most significant, in the
/// node's `in_edges` / `out_edges` order. `rows[input]` lists the reachable
/// packed outputs with nonzero probability.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTransition {
    pub inputs: usize,
    pub outputs: usize,
    pub rows: Vec<Vec<(usize, Rational)>>,
}

/// Tetra measurement on `χ(z)`: `1/2` on `z`, `1/6` elsewhere.
fn measure(z: Letter) -> [Rational; 4] {
    Letter::ALL.map(|x| if x == z { rat(1, 2) } else { rat(1, 6) })
}

fn collect(dist: Vec<Rational>) -> Vec<(usize, Rational)> {
    dist.into_iter().enumerate().filter(|(_, w)| !w.is_zero()).collect()
}

impl NodeTransition {
    /// `None` for sources and sinks, which have no input-to-output law.
    pub fn of(qp: &QuantumProtocol, v: usize) -> Option<NodeTransition> {
        let net = &qp.network;
        let parent_alpha = || qp.edge_alpha(net.in_edges(v)[0]);
        let (inputs, outputs, rows) = match qp.op(v) {
            OpTag::SourceTTR | OpTag::SinkNoop => return None,
            OpTag::ForkEFC => {
                let params = EfcAlphaParams::new(parent_alpha()).expect("compiled alpha lies in (0, 1]");
                let pairs = Letter::ALL.map(|x| efc_pair_distribution(&params, x));
                let rows = Letter::ALL
                    .iter()
                    .map(|&z| {
                        let law = measure(z);
                        let mut dist = vec![Rational::zero(); 16];
                        for x in Letter::ALL {
                            for (k, slot) in dist.iter_mut().enumerate() {
                                *slot += &law[x.index()] * &pairs[x.index()].weights[k / 4][k % 4];
                            }
                        }
                        collect(dist)
                    })
                    .collect();
                (1, 2, rows)
            }
            OpTag::Join => {
                let rows = (0..16)
                    .map(|k| {
                        let (a, b) = (measure(Letter::new((k / 4) as u8)), measure(Letter::new((k % 4) as u8)));
                        let mut dist = vec![Rational::zero(); 4];
                        for x1 in Letter::ALL {
                            for x2 in Letter::ALL {
                                dist[net.group.add(x1, x2).index()] += &a[x1.index()] * &b[x2.index()];
                            }
                        }
                        collect(dist)
                    })
                    .collect();
                (2, 1, rows)
            }
            OpTag::TransformConstant(c) => (1, 1, vec![vec![(c.index(), rat(1, 1))]; 4]),
            OpTag::TransformOneToOne(g) => {
                let rows = Letter::ALL
                    .iter()
                    .map(|&z| {
                        let law = measure(z);
                        let mut dist = vec![Rational::zero(); 4];
                        for x in Letter::ALL {
                            dist[g.apply(x).index()] += &law[x.index()];
                        }
                        collect(dist)
                    })
                    .collect();
                (1, 1, rows)
            }
            OpTag::TransformTwoToOne(g) => {
                let alpha = parent_alpha();
                let emit = Letter::ALL.map(|x| two_to_one_emission(alpha, &g, x).expect("two-to-one map"));
                let rows = Letter::ALL
                    .iter()
                    .map(|&z| {
                        let law = measure(z);
                        let mut dist = vec![Rational::zero(); 4];
                        for x in Letter::ALL {
                            for (l, slot) in dist.iter_mut().enumerate() {
                                *slot += &law[x.index()] * &emit[x.index()][l];
                            }
                        }
                        collect(dist)
                    })
                    .collect();
                (1, 1, rows)
            }
        };
        Some(NodeTransition { inputs, outputs, rows })
    }
}

use super::{check_arity, NodeTransition, SimError, Weight, MAX_BRANCHES};
use crate::compile::{OpTag, QuantumProtocol};
use crate::netgraph::Letter;
use crate::qmath::{self, tetra_matrix, DensityMatrix2, C64};
use crate::rational::Rational;
use nalgebra::Matrix4;
use num_traits::{One, Zero};
use std::collections::BTreeMap;

/// Exact laws of the labels carried by the edges.
#[derive(Debug, Clone, PartialEq)]
pub struct OracleResult<W> {
    /// Law of the label on each edge (tetra-mixture weights of its state).
    pub edge_marginals: Vec<[W; 4]>,
    /// For each fork node, the joint law of its two output labels,
    /// `joint[z1][z2]` in `out_edges` order.
    pub fork_joints: Vec<(usize, [[W; 4]; 4])>,
    /// Law delivered to each sink, in `sinks` order.
    pub sink_laws: Vec<[W; 4]>,
    /// Largest number of joint frontier states held at once.
    pub max_frontier: usize,
}

fn mixture<W: Weight>(w: &[W; 4]) -> DensityMatrix2 {
    qmath::tetra_mixture(&[w[0].to_f64(), w[1].to_f64(), w[2].to_f64(), w[3].to_f64()])
}

impl<W: Weight> OracleResult<W> {
    pub fn edge_state(&self, e: usize) -> DensityMatrix2 {
        mixture(&self.edge_marginals[e])
    }

    pub fn sink_states(&self) -> Vec<DensityMatrix2> {
        self.sink_laws.iter().map(mixture).collect()
    }

    /// Two-qubit state on the outputs of the `k`-th recorded fork.
    pub fn fork_joint_matrix(&self, k: usize) -> Matrix4<C64> {
        let joint = &self.fork_joints[k].1;
        let mut m = Matrix4::zeros();
        for a in Letter::ALL {
            for b in Letter::ALL {
                let w = joint[a.index()][b.index()].to_f64();
                m += tetra_matrix(a).kronecker(&tetra_matrix(b)) * qmath::c(w, 0.);
            }
        }
        m
    }

    /// Largest entrywise gap between the `k`-th fork's joint state and the
    /// product of its two marginal states.
    pub fn fork_product_gap(&self, k: usize) -> f64 {
        let (u, v) = self.fork_marginals(k);
        let product = mixture(&u).kron(&mixture(&v));
        qmath::max_abs_diff(&self.fork_joint_matrix(k), &product)
    }

    fn fork_marginals(&self, k: usize) -> ([W; 4], [W; 4]) {
        let joint = &self.fork_joints[k].1;
        let mut u: [W; 4] = std::array::from_fn(|_| W::zero());
        let mut v: [W; 4] = std::array::from_fn(|_| W::zero());
        for i in 0..4 {
            for j in 0..4 {
                u[i] += joint[i][j].clone();
                v[j] += joint[i][j].clone();
            }
        }
        (u, v)
    }
}

impl OracleResult<Rational> {
    /// True when the `k`-th fork's joint law equals the product of its
    /// marginals exactly.
    pub fn fork_is_exact_product(&self, k: usize) -> bool {
        let (u, v) = self.fork_marginals(k);
        let joint = &self.fork_joints[k].1;
        (0..4).all(|i| (0..4).all(|j| joint[i][j] == &u[i] * &v[j]))
    }
}

fn label_at(key: u64, pos: usize) -> usize {
    ((key >> (2 * pos)) & 3) as usize
}

/// Enumerate the joint law of the labels on the live edges, node by node in
/// compiled order. `source_laws[i]` is the label law of source `i`'s edge.
pub fn simulate_oracle<W: Weight>(qp: &QuantumProtocol, source_laws: &[[W; 4]]) -> Result<OracleResult<W>, SimError> {
    let net = &qp.network;
    check_arity(net.sources.len(), source_laws.len())?;
    let mut live: Vec<usize> = Vec::new();
    let mut states: BTreeMap<u64, W> = BTreeMap::from([(0, W::one())]);
    let mut edge_marginals: Vec<Option<[W; 4]>> = vec![None; net.edges.len()];
    let mut fork_joints = Vec::new();
    let mut max_frontier = 1;

    for &v in &qp.order {
        let ins = net.in_edges(v);
        let outs = net.out_edges(v);
        let rows: Vec<Vec<(usize, W)>> = match qp.op(v) {
            OpTag::SourceTTR => {
                let pos = net.sources.iter().position(|&s| s == v).expect("source");
                vec![source_laws[pos]
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(z, w)| (z, w.clone()))
                    .collect()]
            }
            OpTag::SinkNoop => vec![vec![(0, W::one())]; 4],
            _ => NodeTransition::of(qp, v)
                .expect("internal node")
                .rows
                .iter()
                .map(|row| row.iter().map(|(o, p)| (*o, W::from_rational(p))).collect())
                .collect(),
        };
        let in_pos: Vec<usize> = ins
            .iter()
            .map(|e| live.iter().position(|x| x == e).expect("inputs are live"))
            .collect();
        let keep: Vec<usize> = (0..live.len()).filter(|p| !in_pos.contains(p)).collect();
        let width = keep.len() + outs.len();
        if width > 31 {
            return Err(SimError::TooLarge {
                limit: MAX_BRANCHES,
                context: format!("{width} edges live at node {}", net.nodes[v].id),
            });
        }
        let fan = rows.iter().map(Vec::len).max().unwrap_or(1);
        if states.len().saturating_mul(fan) > MAX_BRANCHES {
            return Err(SimError::TooLarge {
                limit: MAX_BRANCHES,
                context: format!(
                    "{} states times {fan} outcomes at node {}",
                    states.len(),
                    net.nodes[v].id
                ),
            });
        }

        let mut next: BTreeMap<u64, W> = BTreeMap::new();
        for (key, w) in &states {
            let inp = in_pos.iter().fold(0, |acc, &p| acc * 4 + label_at(*key, p));
            let rest = keep
                .iter()
                .enumerate()
                .fold(0u64, |acc, (i, &p)| acc | ((label_at(*key, p) as u64) << (2 * i)));
            for (out, p) in &rows[inp] {
                let mut k = rest;
                for i in 0..outs.len() {
                    let lab = (out >> (2 * (outs.len() - 1 - i))) & 3;
                    k |= (lab as u64) << (2 * (keep.len() + i));
                }
                let slot = next.entry(k).or_insert_with(W::zero);
                *slot += w.clone() * p.clone();
            }
        }
        next.retain(|_, w| !w.is_zero());
        max_frontier = max_frontier.max(next.len());
        live = keep.iter().map(|&p| live[p]).chain(outs.iter().copied()).collect();

        for (i, &e) in outs.iter().enumerate() {
            let mut m: [W; 4] = std::array::from_fn(|_| W::zero());
            for (key, w) in &next {
                m[label_at(*key, keep.len() + i)] += w.clone();
            }
            edge_marginals[e] = Some(m);
        }
        if outs.len() == 2 {
            let mut joint: [[W; 4]; 4] = std::array::from_fn(|_| std::array::from_fn(|_| W::zero()));
            for (key, w) in &next {
                joint[label_at(*key, keep.len())][label_at(*key, keep.len() + 1)] += w.clone();
            }
            fork_joints.push((v, joint));
        }
        states = next;
    }

    let edge_marginals: Vec<[W; 4]> = edge_marginals
        .into_iter()
        .map(|m| m.expect("every edge has a tail node"))
        .collect();
    let sink_laws = net
        .sinks
        .iter()
        .map(|&t| edge_marginals[net.in_edges(t)[0]].clone())
        .collect();
    Ok(OracleResult {
        edge_marginals,
        fork_joints,
        sink_laws,
        max_frontier,
    })
}

/// Exact oracle with each source edge carrying `χ(x)`.
pub fn simulate_oracle_labels(qp: &QuantumProtocol, inputs: &[Letter]) -> Result<OracleResult<Rational>, SimError> {
    let laws: Vec<[Rational; 4]> = inputs
        .iter()
        .map(|&x| Letter::ALL.map(|l| if l == x { Rational::one() } else { Rational::zero() }))
        .collect();
    simulate_oracle(qp, &laws)
}

/// Oracle for arbitrary source states, measured in the tetra basis at the
/// sources; weights are floats.
pub fn simulate_oracle_densities(
    qp: &QuantumProtocol,
    inputs: &[DensityMatrix2],
) -> Result<OracleResult<f64>, SimError> {
    let laws: Vec<[f64; 4]> = inputs.iter().map(qmath::ttr_probabilities).collect();
    simulate_oracle(qp, &laws)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compile::compile;
    use crate::netgraph::{D3Network, D3Node, D3Role, GroupKind, LetterMap};
    use crate::qmath::ShrunkState;
    use crate::rational::rat;

    fn l(s: &str) -> Letter {
        s.parse().unwrap()
    }

    fn node(id: &str, role: D3Role) -> D3Node {
        D3Node { id: id.into(), role }
    }

    #[test]
    fn single_fork_is_a_product_of_ninth_shrunk_states() {
        let d3 = D3Network::new(
            GroupKind::Z4,
            vec![
                node("s", D3Role::Source),
                node("f", D3Role::Fork),
                node("t1", D3Role::Sink),
                node("t2", D3Role::Sink),
            ],
            vec![(0, 1), (1, 2), (1, 3)],
            &[(2, 0), (3, 0)],
        )
        .unwrap();
        let qp = compile(&d3);
        let res = simulate_oracle_labels(&qp, &[l("00")]).unwrap();
        assert!(res.fork_is_exact_product(0));
        assert!(res.fork_product_gap(0) < 1e-12);
        let want = ShrunkState::new(l("00"), rat(1, 9)).unwrap();
        assert_eq!(res.sink_laws[0], want.coefficients());
        assert_eq!(res.sink_laws[1], want.coefficients());
    }

    #[test]
    fn one_to_one_transform_shrinks_by_three() {
        let neg = LetterMap([l("00"), l("11"), l("10"), l("01")]);
        let d3 = D3Network::new(
            GroupKind::Z4,
            vec![
                node("s", D3Role::Source),
                node("v", D3Role::Transform(neg)),
                node("t", D3Role::Sink),
            ],
            vec![(0, 1), (1, 2)],
            &[(2, 0)],
        )
        .unwrap();
        let qp = compile(&d3);
        let res = simulate_oracle_labels(&qp, &[l("10")]).unwrap();
        let want = ShrunkState::new(l("10"), rat(1, 3)).unwrap();
        assert_eq!(res.sink_laws[0], want.coefficients());
        let gap = res.sink_states()[0].max_abs_diff(&want.densify());
        assert!(gap < 1e-12);
    }

    #[test]
    fn density_inputs_shrink_by_a_third_at_the_source() {
        let d3 = D3Network::new(
            GroupKind::Z4,
            vec![node("s", D3Role::Source), node("t", D3Role::Sink)],
            vec![(0, 1)],
            &[(1, 0)],
        )
        .unwrap();
        let qp = compile(&d3);
        let rho = DensityMatrix2::from_pure(&qmath::ket0());
        let res = simulate_oracle_densities(&qp, &[rho]).unwrap();
        assert!(res.sink_states()[0].max_abs_diff(&rho.shrink(1.0 / 3.0)) < 1e-12);
    }
}

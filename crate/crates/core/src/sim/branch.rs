use super::{check_arity, NodeTransition, SimError, MAX_BRANCHES};
use crate::compile::{OpTag, QuantumProtocol};
use crate::netgraph::Letter;
use crate::rational::Rational;
use num_traits::Zero;

/// One complete run of the process: the label prepared on every edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Branch {
    pub probability: Rational,
    pub letters: Vec<Letter>,
}

/// Every run of the process with nonzero probability, enumerated depth first.
/// Each node branches over the labels it emits; its measurement outcomes are
/// summed into those branch weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BranchTree {
    pub branches: Vec<Branch>,
}

impl BranchTree {
    pub fn enumerate(qp: &QuantumProtocol, source_laws: &[[Rational; 4]]) -> Result<Self, SimError> {
        check_arity(qp.network.sources.len(), source_laws.len())?;
        let tables: Vec<Option<NodeTransition>> =
            (0..qp.network.nodes.len()).map(|v| NodeTransition::of(qp, v)).collect();
        let mut walk = Walk {
            qp,
            source_laws,
            tables: &tables,
            letters: vec![Letter::ZERO; qp.network.edges.len()],
            branches: Vec::new(),
        };
        walk.visit(0, Rational::from_integer(1.into()))?;
        Ok(BranchTree {
            branches: walk.branches,
        })
    }

    pub fn total(&self) -> Rational {
        self.branches.iter().map(|b| &b.probability).sum()
    }

    pub fn edge_marginal(&self, e: usize) -> [Rational; 4] {
        let mut m: [Rational; 4] = Default::default();
        for b in &self.branches {
            m[b.letters[e].index()] += &b.probability;
        }
        m
    }
}

struct Walk<'a> {
    qp: &'a QuantumProtocol,
    source_laws: &'a [[Rational; 4]],
    tables: &'a [Option<NodeTransition>],
    letters: Vec<Letter>,
    branches: Vec<Branch>,
}

impl Walk<'_> {
    fn visit(&mut self, step: usize, prob: Rational) -> Result<(), SimError> {
        let net = &self.qp.network;
        if step == self.qp.order.len() {
            if self.branches.len() >= MAX_BRANCHES {
                return Err(SimError::TooLarge {
                    limit: MAX_BRANCHES,
                    context: "branch enumeration".into(),
                });
            }
            self.branches.push(Branch {
                probability: prob,
                letters: self.letters.clone(),
            });
            return Ok(());
        }
        let v = self.qp.order[step];
        let outs = net.out_edges(v).to_vec();
        let choices: Vec<(usize, Rational)> = match self.qp.op(v) {
            OpTag::SinkNoop => return self.visit(step + 1, prob),
            OpTag::SourceTTR => {
                let pos = net.sources.iter().position(|&s| s == v).expect("source");
                self.source_laws[pos]
                    .iter()
                    .enumerate()
                    .filter(|(_, w)| !w.is_zero())
                    .map(|(z, w)| (z, w.clone()))
                    .collect()
            }
            _ => {
                let inp = net
                    .in_edges(v)
                    .iter()
                    .fold(0, |acc, &e| acc * 4 + self.letters[e].index());
                self.tables[v].as_ref().expect("internal node").rows[inp].clone()
            }
        };
        for (out, p) in choices {
            for (i, &e) in outs.iter().enumerate() {
                self.letters[e] = Letter::new(((out >> (2 * (outs.len() - 1 - i))) & 3) as u8);
            }
            self.visit(step + 1, &prob * &p)?;
        }
        Ok(())
    }
}

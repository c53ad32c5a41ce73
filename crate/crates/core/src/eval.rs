//! Classical evaluation of a protocol and exhaustive requirement checking.

use crate::netgraph::{D3Network, Instance, Letter, NodeKind};
use crate::par::Execution;
use std::fmt::Write as _;

/// Largest source count accepted by exhaustive checks (4^8 = 65 536 rows).
pub const MAX_EXHAUSTIVE_SOURCES: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EvalError {
    #[error("{sources} sources need 4^{sources} rows; exhaustive checks stop at {MAX_EXHAUSTIVE_SOURCES} sources")]
    TooManySources { sources: usize },
}

/// Anything that maps one letter per source to one letter per sink.
pub trait Evaluate: Sync {
    fn source_ids(&self) -> Vec<String>;
    fn sink_ids(&self) -> Vec<String>;
    /// `sigma()[j]` is the source position required by sink `j`.
    fn sigma(&self) -> Vec<usize>;
    fn eval(&self, inputs: &[Letter]) -> Vec<Letter>;
}

/// Letter on every original edge, evaluating nodes in topological order.
pub fn edge_values(inst: &Instance, inputs: &[Letter]) -> Vec<Letter> {
    assert_eq!(inputs.len(), inst.sources.len(), "one letter per source");
    let group = inst.group();
    let mut vals = vec![Letter::ZERO; inst.network.edges.len()];
    for &v in &inst.topo {
        match inst.network.nodes[v].kind {
            NodeKind::Source => {
                let pos = inst.sources.iter().position(|&s| s == v).unwrap();
                for &e in &inst.out_edges[v] {
                    vals[e] = inputs[pos];
                }
            }
            NodeKind::Internal => {
                for (j, &e) in inst.out_edges[v].iter().enumerate() {
                    vals[e] = apply_op(inst, v, j, &vals, group);
                }
            }
            NodeKind::Sink => {}
        }
    }
    vals
}

fn apply_op(inst: &Instance, v: usize, j: usize, vals: &[Letter], group: crate::netgraph::GroupKind) -> Letter {
    group.sum(
        inst.ops[v][j]
            .terms
            .iter()
            .map(|&(p, h)| h.apply(vals[inst.in_edges[v][p]])),
    )
}

/// Letters delivered at each sink, in declaration order.
pub fn eval(inst: &Instance, inputs: &[Letter]) -> Vec<Letter> {
    let vals = edge_values(inst, inputs);
    inst.sinks
        .iter()
        .map(|&t| apply_op(inst, t, 0, &vals, inst.group()))
        .collect()
}

impl Evaluate for Instance {
    fn source_ids(&self) -> Vec<String> {
        self.sources.iter().map(|&s| self.node_id(s).to_string()).collect()
    }
    fn sink_ids(&self) -> Vec<String> {
        self.sinks.iter().map(|&t| self.node_id(t).to_string()).collect()
    }
    fn sigma(&self) -> Vec<usize> {
        self.sigma.clone()
    }
    fn eval(&self, inputs: &[Letter]) -> Vec<Letter> {
        eval(self, inputs)
    }
}

impl Evaluate for D3Network {
    fn source_ids(&self) -> Vec<String> {
        self.sources.iter().map(|&s| self.nodes[s].id.clone()).collect()
    }
    fn sink_ids(&self) -> Vec<String> {
        self.sinks.iter().map(|&t| self.nodes[t].id.clone()).collect()
    }
    fn sigma(&self) -> Vec<usize> {
        self.sigma.clone()
    }
    fn eval(&self, inputs: &[Letter]) -> Vec<Letter> {
        D3Network::eval(self, inputs)
    }
}

/// The `i`-th input tuple in lexicographic order (first source most significant).
pub fn input_tuple(n: usize, i: usize) -> Vec<Letter> {
    (0..n)
        .map(|k| Letter::new(((i >> (2 * (n - 1 - k))) & 3) as u8))
        .collect()
}

/// Every input tuple over `n` sources, lexicographic.
pub fn all_inputs(n: usize) -> impl Iterator<Item = Vec<Letter>> {
    (0..1usize << (2 * n)).map(move |i| input_tuple(n, i))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TruthTable {
    pub sources: Vec<String>,
    pub sinks: Vec<String>,
    /// Indexed like [`input_tuple`]; each row holds one letter per sink.
    pub rows: Vec<Vec<Letter>>,
}

impl TruthTable {
    pub fn build(inst: &dyn Evaluate, exec: Execution) -> Result<Self, EvalError> {
        let sources = inst.source_ids();
        let n = sources.len();
        if n > MAX_EXHAUSTIVE_SOURCES {
            return Err(EvalError::TooManySources { sources: n });
        }
        let rows = exec.map_range(1 << (2 * n), |i| inst.eval(&input_tuple(n, i)));
        Ok(TruthTable {
            sources,
            sinks: inst.sink_ids(),
            rows,
        })
    }

    pub fn input(&self, row: usize) -> Vec<Letter> {
        input_tuple(self.sources.len(), row)
    }

    /// Restrict to the named sinks (in the given order).
    pub fn project(&self, sinks: &[String]) -> TruthTable {
        let cols: Vec<usize> = sinks
            .iter()
            .map(|s| self.sinks.iter().position(|x| x == s).expect("known sink"))
            .collect();
        TruthTable {
            sources: self.sources.clone(),
            sinks: sinks.to_vec(),
            rows: self.rows.iter().map(|r| cols.iter().map(|&c| r[c]).collect()).collect(),
        }
    }

    /// CSV with header `sources..., sinks...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.sources.iter().chain(&self.sinks).map(String::as_str).collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for (i, row) in self.rows.iter().enumerate() {
            let cells: Vec<String> = self.input(i).iter().chain(row).map(Letter::to_string).collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }
}

/// Outcome of an exhaustive requirement check.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RequirementCheck {
    pub satisfied: bool,
    /// First violating input tuple (lexicographic) and the letters delivered.
    pub counterexample: Option<(Vec<Letter>, Vec<Letter>)>,
}

/// True iff every sink receives its required source's letter on every input.
pub fn check_requirement(inst: &dyn Evaluate, exec: Execution) -> Result<RequirementCheck, EvalError> {
    let table = TruthTable::build(inst, exec)?;
    let sigma = inst.sigma();
    for (i, row) in table.rows.iter().enumerate() {
        let input = table.input(i);
        if row.iter().zip(&sigma).any(|(y, &s)| *y != input[s]) {
            return Ok(RequirementCheck {
                satisfied: false,
                counterexample: Some((input, row.clone())),
            });
        }
    }
    Ok(RequirementCheck {
        satisfied: true,
        counterexample: None,
    })
}

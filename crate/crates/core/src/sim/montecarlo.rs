use super::{check_arity, NodeTransition, SimError, SourceInput};
use crate::compile::{OpTag, QuantumProtocol};
use crate::netgraph::Letter;
use crate::par::Execution;
use crate::qmath::{self, overlap, tetra_vector, DensityMatrix2};
use crate::rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Upper 0.001 quantile of the chi-square distribution with 3 degrees of freedom.
pub const CHI2_CRITICAL_DF3_P001: f64 = 16.266;

/// Trials per independently seeded block.
const BLOCK: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct MonteCarloResult {
    pub trials: u64,
    pub seed: u64,
    /// Label counts received by each sink.
    pub counts: Vec<[u64; 4]>,
    /// Mean fidelity to the required source's target state and its standard
    /// error, for sinks whose source has a pure target.
    pub fidelity: Vec<Option<(f64, f64)>>,
}

impl MonteCarloResult {
    pub fn frequencies(&self, sink: usize) -> [f64; 4] {
        self.counts[sink].map(|c| c as f64 / self.trials as f64)
    }

    /// Empirical tetra mixture at each sink.
    pub fn sink_states(&self) -> Vec<DensityMatrix2> {
        (0..self.counts.len())
            .map(|j| qmath::tetra_mixture(&self.frequencies(j)))
            .collect()
    }
}

/// Cumulative row: `(packed output, cumulative probability)`.
type CumRow = Vec<(usize, f64)>;

fn cumulative<'a>(row: impl IntoIterator<Item = (usize, f64)> + 'a) -> CumRow {
    let mut acc = 0.0;
    row.into_iter()
        .map(|(o, p)| {
            acc += p;
            (o, acc)
        })
        .collect()
}

fn pick(row: &CumRow, u: f64) -> usize {
    let total = row.last().map_or(1.0, |r| r.1);
    let u = u * total;
    row.iter()
        .find(|(_, c)| u < *c)
        .unwrap_or(row.last().expect("nonempty row"))
        .0
}

/// Sample the process `trials` times. Block `b` of 4096 trials draws from
/// `ChaCha8Rng` seeded with `seed` on stream `b`, so the result does not
/// depend on `exec`.
pub fn simulate_montecarlo(
    qp: &QuantumProtocol,
    inputs: &[SourceInput],
    trials: u64,
    seed: u64,
    exec: Execution,
) -> Result<MonteCarloResult, SimError> {
    let net = &qp.network;
    check_arity(net.sources.len(), inputs.len())?;
    if trials == 0 {
        return Err(SimError::NoTrials);
    }
    let tables: Vec<Vec<CumRow>> = (0..net.nodes.len())
        .map(|v| match qp.op(v) {
            OpTag::SourceTTR => {
                let pos = net.sources.iter().position(|&s| s == v).expect("source");
                let law = inputs[pos].law();
                vec![cumulative((0..4).filter(|&z| law[z] > 0.0).map(|z| (z, law[z])))]
            }
            OpTag::SinkNoop => Vec::new(),
            _ => NodeTransition::of(qp, v)
                .expect("internal node")
                .rows
                .iter()
                .map(|row| cumulative(row.iter().map(|(o, p)| (*o, rational::to_f64(p)))))
                .collect(),
        })
        .collect();

    let blocks = trials.div_ceil(BLOCK) as usize;
    let run_block = |b: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(b as u64);
        let n = BLOCK.min(trials - b as u64 * BLOCK);
        let mut counts = vec![[0u64; 4]; net.sinks.len()];
        let mut letters = vec![0usize; net.edges.len()];
        for _ in 0..n {
            for &v in &qp.order {
                let outs = net.out_edges(v);
                if outs.is_empty() {
                    continue;
                }
                let inp = net.in_edges(v).iter().fold(0, |acc, &e| acc * 4 + letters[e]);
                let out = pick(&tables[v][inp], rng.random::<f64>());
                for (i, &e) in outs.iter().enumerate() {
                    letters[e] = (out >> (2 * (outs.len() - 1 - i))) & 3;
                }
            }
            for (j, &t) in net.sinks.iter().enumerate() {
                counts[j][letters[net.in_edges(t)[0]]] += 1;
            }
        }
        counts
    };
    let per_block = exec.map_range(blocks, run_block);
    let mut counts = vec![[0u64; 4]; net.sinks.len()];
    for block in per_block {
        for (total, c) in counts.iter_mut().zip(block) {
            for z in 0..4 {
                total[z] += c[z];
            }
        }
    }

    let fidelity = net
        .sigma
        .iter()
        .zip(&counts)
        .map(|(&s, c)| {
            let psi = inputs[s].target()?;
            let f = Letter::ALL.map(|z| overlap(&psi, &tetra_vector(z)));
            Some(mean_and_stderr(c, &f, trials))
        })
        .collect();
    Ok(MonteCarloResult {
        trials,
        seed,
        counts,
        fidelity,
    })
}

fn mean_and_stderr(counts: &[u64; 4], f: &[f64; 4], n: u64) -> (f64, f64) {
    let nf = n as f64;
    let mean = (0..4).map(|z| counts[z] as f64 * f[z]).sum::<f64>() / nf;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let ss: f64 = (0..4).map(|z| counts[z] as f64 * (f[z] - mean).powi(2)).sum();
    (mean, (ss / (nf - 1.0) / nf).sqrt())
}

/// Pearson statistic of observed counts against a law; categories with zero
/// expected mass contribute nothing if empty and make the statistic infinite
/// otherwise.
pub fn chi_square(counts: &[u64; 4], probs: &[f64; 4]) -> f64 {
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    for z in 0..4 {
        let expected = probs[z] * n as f64;
        if expected <= 0.0 {
            if counts[z] > 0 {
                return f64::INFINITY;
            }
            continue;
        }
        stat += (counts[z] as f64 - expected).powi(2) / expected;
    }
    stat
}

//! Running a compiled protocol: analytic propagation of shrunk states, an
//! exact enumeration of the measure-and-prepare process, and seeded Monte
//! Carlo sampling.
//!
//! Every node measures its inputs in the tetra basis and prepares tetra
//! states, so the whole process is a classical Markov chain over the tetra
//! labels carried by the edges. The oracle and the sampler both run that
//! chain; the analytic mode applies the per-node shrink rules directly.

mod analytic;
mod branch;
mod montecarlo;
mod oracle;
mod report;
mod transition;
mod weight;

pub use analytic::simulate_analytic;
pub use branch::{Branch, BranchTree};
pub use montecarlo::{chi_square, simulate_montecarlo, MonteCarloResult, CHI2_CRITICAL_DF3_P001};
pub use oracle::{simulate_oracle, simulate_oracle_densities, simulate_oracle_labels, OracleResult};
pub use report::{fidelity_report, float_json, ReportOptions, SimReport, SinkReport};
pub use transition::NodeTransition;
pub use weight::Weight;

use crate::netgraph::Letter;
use crate::qmath::{self, tetra_vector, DensityMatrix2, Ket, ShrunkState};
use crate::rational::{self, Rational};
use num_traits::{One, Zero};

/// Upper bound on oracle frontier states and on enumerated branches.
pub const MAX_BRANCHES: usize = 10_000_000;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum SimError {
    #[error("expected one input per source ({expected}), got {got}")]
    InputArity { expected: usize, got: usize },
    #[error("exact enumeration needs more than {limit} states ({context}); use Monte Carlo instead")]
    TooLarge { limit: usize, context: String },
    #[error("Monte Carlo needs at least one trial")]
    NoTrials,
    #[error("source input {index} needs an exact law here; use a tetra label or shrunk state")]
    InexactInput { index: usize },
    #[error(transparent)]
    Efc(#[from] crate::efc::EfcError),
    #[error(transparent)]
    Qmath(#[from] qmath::QmathError),
}

/// State fed to one source.
#[derive(Debug, Clone, PartialEq)]
pub enum SourceInput {
    /// `χ(x)`, taken as already measured: the source edge carries `χ(x)`.
    Label(Letter),
    /// A shrunk tetra state, likewise placed on the source edge as is.
    Shrunk(ShrunkState),
    /// An arbitrary qubit; the source applies the tetra measurement.
    Pure(Ket),
    /// An arbitrary mixed qubit; the source applies the tetra measurement.
    Density(DensityMatrix2),
}

impl SourceInput {
    /// Exact label law of the source edge, when the input is a tetra mixture.
    pub fn exact_law(&self) -> Option<[Rational; 4]> {
        match self {
            SourceInput::Label(x) => {
                Some(Letter::ALL.map(|l| if l == *x { Rational::one() } else { Rational::zero() }))
            }
            SourceInput::Shrunk(s) => Some(s.coefficients()),
            SourceInput::Pure(_) | SourceInput::Density(_) => None,
        }
    }

    pub fn law(&self) -> [f64; 4] {
        match self {
            SourceInput::Pure(psi) => qmath::ttr_probabilities(&DensityMatrix2::from_pure(psi)),
            SourceInput::Density(rho) => qmath::ttr_probabilities(rho),
            _ => self.exact_law().expect("tetra input").map(|w| rational::to_f64(&w)),
        }
    }

    /// Pure state whose fidelity is reported at the sinks fed by this source.
    pub fn target(&self) -> Option<Ket> {
        match self {
            SourceInput::Label(x) => Some(tetra_vector(*x)),
            SourceInput::Shrunk(s) => Some(tetra_vector(s.label)),
            SourceInput::Pure(psi) => Some(*psi),
            SourceInput::Density(_) => None,
        }
    }

    /// True when the source applies its own tetra measurement.
    pub fn is_measured_at_source(&self) -> bool {
        matches!(self, SourceInput::Pure(_) | SourceInput::Density(_))
    }
}

fn check_arity(expected: usize, got: usize) -> Result<(), SimError> {
    if expected != got {
        return Err(SimError::InputArity { expected, got });
    }
    Ok(())
}

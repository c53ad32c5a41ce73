//! Single-qubit state math: density matrices, tetra states and their
//! measurement, fidelity, and the linear-independence test for cloning sets.
//!
//! Matrices are complex doubles; every mixture weight or shrinking factor
//! that stays rational is kept exact as a [`Rational`].

mod tetra;

pub use tetra::{tetra, tetra_matrix, tetra_vector, ttr_channel, ttr_probabilities, TetraState};

use crate::netgraph::Letter;
use crate::rational::{self, rat, Rational};
use nalgebra::{DMatrix, Matrix2, Matrix4, Vector2};
use num_complex::Complex64;
use num_traits::{One, Zero};
use rand::Rng;
use std::f64::consts::PI;

pub type C64 = Complex64;
pub type Ket = Vector2<C64>;

/// Entrywise tolerance for matrix identities.
pub const MATRIX_TOL: f64 = 1e-12;
/// Singular values at or below this count as zero.
pub const RANK_TOL: f64 = 1e-9;
/// Allowed deviation of a state vector's norm from one.
pub const UNIT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum QmathError {
    #[error("state vector has norm {0}, expected 1")]
    NotUnit(f64),
    #[error("matrix is not a density matrix: {0}")]
    NotDensity(String),
    #[error("shrinking factor {0} is outside (0, 1]")]
    AlphaOutOfRange(String),
    #[error("rank test takes 1 to 4 states, got {0}")]
    RankArity(usize),
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> Matrix2<C64> {
    Matrix2::new(c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.))
}

pub fn pauli_y() -> Matrix2<C64> {
    Matrix2::new(c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.))
}

pub fn pauli_z() -> Matrix2<C64> {
    Matrix2::new(c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.))
}

/// Largest entrywise modulus of `a - b`.
pub fn max_abs_diff<const N: usize>(a: &nalgebra::SMatrix<C64, N, N>, b: &nalgebra::SMatrix<C64, N, N>) -> f64 {
    (a - b).iter().map(|z| z.norm()).fold(0.0, f64::max)
}

/// A 2x2 positive semidefinite matrix of unit trace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityMatrix2(Matrix2<C64>);

impl DensityMatrix2 {
    /// Validate Hermiticity, unit trace and eigenvalues `>= -tol` (tol = 1e-12).
    pub fn new(m: Matrix2<C64>) -> Result<Self, QmathError> {
        let herm = max_abs_diff(&m, &m.adjoint());
        if herm > MATRIX_TOL {
            return Err(QmathError::NotDensity(format!("not Hermitian (off by {herm:e})")));
        }
        let tr = m.trace();
        if (tr - c(1., 0.)).norm() > MATRIX_TOL {
            return Err(QmathError::NotDensity(format!("trace {tr}")));
        }
        let rho = DensityMatrix2(m);
        let r = rho.bloch();
        let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
        // eigenvalues are (1 ± |r|)/2
        if (1.0 - len) / 2.0 < -MATRIX_TOL {
            return Err(QmathError::NotDensity(format!(
                "negative eigenvalue {}",
                (1.0 - len) / 2.0
            )));
        }
        Ok(rho)
    }

    pub fn maximally_mixed() -> Self {
        DensityMatrix2(Matrix2::identity() * c(0.5, 0.))
    }

    pub fn from_pure(psi: &Ket) -> Self {
        DensityMatrix2(psi * psi.adjoint())
    }

    /// `(I + r·σ)/2`; `|r| <= 1` is not checked.
    pub fn from_bloch(r: [f64; 3]) -> Self {
        let m = (Matrix2::identity() + pauli_x() * c(r[0], 0.) + pauli_y() * c(r[1], 0.) + pauli_z() * c(r[2], 0.))
            * c(0.5, 0.);
        DensityMatrix2(m)
    }

    pub fn matrix(&self) -> &Matrix2<C64> {
        &self.0
    }

    /// `(Tr ρσx, Tr ρσy, Tr ρσz)`.
    pub fn bloch(&self) -> [f64; 3] {
        [
            (self.0 * pauli_x()).trace().re,
            (self.0 * pauli_y()).trace().re,
            (self.0 * pauli_z()).trace().re,
        ]
    }

    /// `k ρ + (1 - k) I/2`.
    pub fn shrink(&self, k: f64) -> Self {
        DensityMatrix2(self.0 * c(k, 0.) + Matrix2::identity() * c((1.0 - k) / 2.0, 0.))
    }

    /// Convex combination `Σ w_i ρ_i`; weights are not checked.
    pub fn mix<'a>(parts: impl IntoIterator<Item = (f64, &'a DensityMatrix2)>) -> Self {
        let m = parts
            .into_iter()
            .fold(Matrix2::zeros(), |acc, (w, r)| acc + r.0 * c(w, 0.));
        DensityMatrix2(m)
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix2) -> f64 {
        max_abs_diff(&self.0, &other.0)
    }

    pub fn kron(&self, other: &DensityMatrix2) -> Matrix4<C64> {
        self.0.kronecker(&other.0).fixed_view::<4, 4>(0, 0).into_owned()
    }
}

/// `α χ(label) + (1 - α) I/2` with exact `α ∈ (0, 1]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ShrunkState {
    pub label: Letter,
    pub alpha: Rational,
}

impl ShrunkState {
    pub fn new(label: Letter, alpha: Rational) -> Result<Self, QmathError> {
        if !rational::in_unit_interval(&alpha) {
            return Err(QmathError::AlphaOutOfRange(rational::format(&alpha)));
        }
        Ok(ShrunkState { label, alpha })
    }

    /// The pure tetra state itself (`α = 1`).
    pub fn pure(label: Letter) -> Self {
        ShrunkState {
            label,
            alpha: Rational::one(),
        }
    }

    /// Weights `w` with `Σ w_l χ(l)` equal to this state: `1/4 + 3α/4` on
    /// the label and `(1 - α)/4` elsewhere.
    pub fn coefficients(&self) -> [Rational; 4] {
        let quarter = rat(1, 4);
        Letter::ALL.map(|l| {
            if l == self.label {
                &quarter + &self.alpha * rat(3, 4)
            } else {
                (Rational::one() - &self.alpha) * &quarter
            }
        })
    }

    /// Exact tetra-measurement outcome law: `1/4 + α/4` on the label,
    /// `1/4 - α/12` on each other letter.
    pub fn ttr_probabilities(&self) -> [Rational; 4] {
        Letter::ALL.map(|l| {
            if l == self.label {
                rat(1, 4) + &self.alpha * rat(1, 4)
            } else {
                rat(1, 4) - &self.alpha * rat(1, 12)
            }
        })
    }

    pub fn densify(&self) -> DensityMatrix2 {
        DensityMatrix2(tetra_matrix(self.label)).shrink(rational::to_f64(&self.alpha))
    }

    /// Recognize exact tetra-mixture weights as a shrunk state, if they are one.
    pub fn from_coefficients(w: &[Rational; 4]) -> Option<Self> {
        let total: Rational = w.iter().sum();
        if !total.is_one() {
            return None;
        }
        let (top, _) = w.iter().enumerate().max_by(|a, b| a.1.cmp(b.1))?;
        let rest = &w[(top + 1) % 4];
        if w.iter().enumerate().any(|(i, x)| i != top && x != rest) {
            return None;
        }
        // rest = (1 - α)/4
        let alpha = Rational::one() - rest * rat(4, 1);
        if alpha.is_zero() {
            return None;
        }
        ShrunkState::new(Letter::new(top as u8), alpha).ok()
    }
}

/// `Σ w_l χ(l)` for float weights.
pub fn tetra_mixture(w: &[f64; 4]) -> DensityMatrix2 {
    let m = Letter::ALL
        .iter()
        .fold(Matrix2::zeros(), |acc, &l| acc + tetra_matrix(l) * c(w[l.index()], 0.));
    DensityMatrix2(m)
}

/// A finite POVM on a qubit.
#[derive(Debug, Clone)]
pub struct Povm {
    pub elements: Vec<Matrix2<C64>>,
}

impl Povm {
    /// `{χ(z)/2}` over the four letters.
    pub fn tetra() -> Self {
        Povm {
            elements: Letter::ALL.iter().map(|&l| tetra_matrix(l) * c(0.5, 0.)).collect(),
        }
    }

    /// Elements sum to the identity and are each positive semidefinite.
    pub fn is_valid(&self, tol: f64) -> bool {
        let sum = self.elements.iter().fold(Matrix2::zeros(), |a, e| a + e);
        let complete = max_abs_diff(&sum, &Matrix2::identity()) <= tol;
        let psd = self.elements.iter().all(|e| {
            let herm = max_abs_diff(e, &e.adjoint()) <= tol;
            let eig = e.map(|z| z).symmetric_eigenvalues();
            herm && eig.iter().all(|&x| x >= -tol)
        });
        complete && psd
    }

    pub fn probabilities(&self, rho: &DensityMatrix2) -> Vec<f64> {
        self.elements.iter().map(|e| (rho.0 * e).trace().re).collect()
    }
}

/// `⟨ψ|ρ|ψ⟩`; rejects vectors whose norm is off by more than 1e-9.
pub fn fidelity(psi: &Ket, rho: &DensityMatrix2) -> Result<f64, QmathError> {
    let norm = psi.norm();
    if (norm - 1.0).abs() > UNIT_TOL {
        return Err(QmathError::NotUnit(norm));
    }
    Ok((psi.adjoint() * rho.0 * psi)[(0, 0)].re)
}

/// `|⟨a|b⟩|²`.
pub fn overlap(a: &Ket, b: &Ket) -> f64 {
    a.dotc(b).norm_sqr()
}

/// Rank of the states viewed as vectors in the 4-dimensional space of 2x2
/// complex matrices.
///
/// A set admits an entanglement-free cloning map `ρ ↦ (pρ + (1-p)I/2) ⊗
/// (qρ + (1-q)I/2)` only if this rank equals the number of states. The
/// definition allows different shrinking factors `p` and `q` on the two
/// outputs; every cloning map built in this crate uses `p = q`.
pub fn linear_independence_rank(states: &[DensityMatrix2]) -> Result<usize, QmathError> {
    if states.is_empty() || states.len() > 4 {
        return Err(QmathError::RankArity(states.len()));
    }
    let m = DMatrix::from_fn(4, states.len(), |r, k| states[k].0[(r / 2, r % 2)]);
    let sv = m.svd(false, false).singular_values;
    Ok(sv.iter().filter(|&&s| s > RANK_TOL).count())
}

/// `cos(θ/2)|0⟩ + e^{iφ} sin(θ/2)|1⟩`.
pub fn ket_from_angles(theta: f64, phi: f64) -> Ket {
    Ket::new(c((theta / 2.0).cos(), 0.), C64::from_polar((theta / 2.0).sin(), phi))
}

/// A pure state uniform on the Bloch sphere.
pub fn random_ket<R: Rng + ?Sized>(rng: &mut R) -> Ket {
    let z: f64 = rng.random_range(-1.0..=1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    ket_from_angles(z.acos(), phi)
}

/// A density matrix uniform in the Bloch ball.
pub fn random_density<R: Rng + ?Sized>(rng: &mut R) -> DensityMatrix2 {
    let r = random_ket(rng);
    let b = DensityMatrix2::from_pure(&r).bloch();
    let len: f64 = rng.random::<f64>().cbrt();
    DensityMatrix2::from_bloch(b.map(|x| x * len))
}

pub fn ket0() -> Ket {
    Ket::new(C64::one(), C64::zero())
}

pub fn ket1() -> Ket {
    Ket::new(C64::zero(), C64::one())
}

//! The four tetra states and the tetra measurement `{χ(z)/2}`.

use super::{c, DensityMatrix2, Ket, C64};
use crate::netgraph::Letter;
use nalgebra::Matrix2;
use std::f64::consts::FRAC_PI_4;

/// `(cos θ, sin θ)` with `cos²θ = 1/2 + √3/6`.
fn angle() -> (f64, f64) {
    let cos2 = 0.5 + 3f64.sqrt() / 6.0;
    (cos2.sqrt(), (1.0 - cos2).sqrt())
}

/// Amplitudes of `|χ(label)⟩`:
///
/// * `00`: `cos θ|0⟩ + e^{iπ/4} sin θ|1⟩`
/// * `01`: `cos θ|0⟩ + e^{-3iπ/4} sin θ|1⟩`
/// * `10`: `sin θ|0⟩ + e^{-iπ/4} cos θ|1⟩`
/// * `11`: `sin θ|0⟩ + e^{3iπ/4} cos θ|1⟩`
pub fn tetra_vector(label: Letter) -> Ket {
    let (cs, sn) = angle();
    let (a, b, phase) = match label.index() {
        0 => (cs, sn, FRAC_PI_4),
        1 => (cs, sn, -3.0 * FRAC_PI_4),
        2 => (sn, cs, -FRAC_PI_4),
        _ => (sn, cs, 3.0 * FRAC_PI_4),
    };
    Ket::new(c(a, 0.), C64::from_polar(b, phase))
}

pub fn tetra_matrix(label: Letter) -> Matrix2<C64> {
    let v = tetra_vector(label);
    v * v.adjoint()
}

#[derive(Debug, Clone, PartialEq)]
pub struct TetraState {
    pub label: Letter,
    pub vector: Ket,
    pub matrix: DensityMatrix2,
}

pub fn tetra(label: Letter) -> TetraState {
    let vector = tetra_vector(label);
    TetraState {
        label,
        vector,
        matrix: DensityMatrix2::from_pure(&vector),
    }
}

/// `p_z = Tr(ρ χ(z))/2` for each letter `z`.
pub fn ttr_probabilities(rho: &DensityMatrix2) -> [f64; 4] {
    Letter::ALL.map(|z| (rho.matrix() * tetra_matrix(z)).trace().re / 2.0)
}

/// The measure-and-prepare channel `ρ ↦ Σ_z p_z χ(z)`, equal to
/// `ρ/3 + (2/3) I/2`.
pub fn ttr_channel(rho: &DensityMatrix2) -> DensityMatrix2 {
    super::tetra_mixture(&ttr_probabilities(rho))
}

//! Cloning of an arbitrary pair of distinct qubit states.
//!
//! This construction is not part of the normative protocol set. Callers must
//! pass [`NonNormative`] to acknowledge that.

use super::{efco2_apply, EfcError};
use crate::qmath::DensityMatrix2;
use crate::rational::Rational;
use num_traits::FromPrimitive;

const RESIDUAL_TOL: f64 = 1e-9;

/// Explicit opt-in marker for [`efc_two_mixed`].
#[derive(Debug, Clone, Copy)]
pub struct NonNormative;

#[derive(Debug, Clone, PartialEq)]
pub struct TwoMixedOutput {
    /// Common shrink `r`: state `i` is cloned into `r ρ_i + (1 - r) I/2`.
    pub r: f64,
    /// Weight of the equalizing mix before basis cloning.
    pub t: f64,
    /// Shrink fed to basis cloning.
    pub gamma: f64,
    /// Weight of the final mix towards the mean direction.
    pub q: f64,
    pub clones: [DensityMatrix2; 2],
    pub max_residual: f64,
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn scale(a: [f64; 3], k: f64) -> [f64; 3] {
    a.map(|x| x * k)
}

/// Measure along the difference direction, equalize the two outcome biases,
/// clone in that basis, and mix towards the mean Bloch direction.
pub fn efc_two_mixed(
    rho1: &DensityMatrix2,
    rho2: &DensityMatrix2,
    _marker: NonNormative,
) -> Result<TwoMixedOutput, EfcError> {
    let (r1, r2) = (rho1.bloch(), rho2.bloch());
    let diff = sub(r1, r2);
    let d = dot(diff, diff).sqrt();
    if d < 1e-12 {
        return Err(EfcError::IdenticalStates);
    }
    let n = scale(diff, 1.0 / d);
    let (alpha, beta) = (dot(r1, n), -dot(r2, n));

    let gap = (alpha - beta).abs();
    let t = gap / (2.0 + gap);
    let gamma = d * (1.0 - t) / 2.0;
    let gamma_exact =
        Rational::from_f64(gamma).ok_or_else(|| EfcError::Inconsistent(format!("shrink {gamma} is not finite")))?;
    let basis = efco2_apply(0, &gamma_exact)?;
    let c = crate::rational::to_f64(&basis.shrink);

    let sum = [r1[0] + r2[0], r1[1] + r2[1], r1[2] + r2[2]];
    let s = dot(sum, sum).sqrt();
    let r = 2.0 * c / (d + c * s);
    let q = r * s / 2.0;

    // Outputs: (1 - q)(±c n) + q·(sum/s), as Bloch vectors.
    let mean_dir = if s > 0.0 { scale(sum, 1.0 / s) } else { [0.0; 3] };
    let clone_for = |sign: f64| {
        let v = [0, 1, 2].map(|k| (1.0 - q) * sign * c * n[k] + q * mean_dir[k]);
        DensityMatrix2::from_bloch(v)
    };
    let clones = [clone_for(1.0), clone_for(-1.0)];
    let max_residual = clones[0]
        .max_abs_diff(&rho1.shrink(r))
        .max(clones[1].max_abs_diff(&rho2.shrink(r)));
    if max_residual > RESIDUAL_TOL {
        return Err(EfcError::Residual {
            what: "two-mixed-state clone",
            value: max_residual,
            tolerance: RESIDUAL_TOL,
        });
    }
    Ok(TwoMixedOutput {
        r,
        t,
        gamma,
        q,
        clones,
        max_residual,
    })
}

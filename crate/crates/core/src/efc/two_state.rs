use super::EfcError;
use crate::qmath::{c, max_abs_diff, DensityMatrix2, Ket};
use crate::rational::{self, int, rat, Rational};
use nalgebra::{Matrix2, Matrix4};

const RESIDUAL_TOL: f64 = 1e-12;

/// Exact record of cloning `p|x⟩⟨x| + (1 - p) I/2` for a basis bit `x`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Efco2Output {
    pub x: u8,
    pub p: Rational,
    /// Outcome law of the basis measurement, indexed by the measured bit.
    pub measure: [Rational; 2],
    /// Pair law given measured `X`: `(X, X)`, each of the two mixed pairs,
    /// and `(X̄, X̄)`.
    pub pair: [Rational; 3],
    /// `joint[y1][y2]`: probability that the outputs are `|y1⟩, |y2⟩`.
    pub joint: [[Rational; 2]; 2],
    /// Each clone is `shrink |x⟩⟨x| + (1 - shrink) I/2` with `shrink = p/2`.
    pub shrink: Rational,
}

impl Efco2Output {
    pub fn clone_state(&self) -> DensityMatrix2 {
        basis_state(self.x).shrink(rational::to_f64(&self.shrink))
    }
}

fn basis_state(x: u8) -> DensityMatrix2 {
    let mut m = Matrix2::zeros();
    m[(x as usize, x as usize)] = c(1., 0.);
    DensityMatrix2::new(m).expect("basis projector")
}

pub fn efco2_apply(x: u8, p: &Rational) -> Result<Efco2Output, EfcError> {
    if x > 1 {
        return Err(EfcError::BadBit(x));
    }
    if !rational::in_unit_interval(p) {
        return Err(EfcError::POutOfRange(rational::format(p)));
    }
    let half = rat(1, 2);
    let p2 = p * p / int(16);
    let pair = [&half + &p2, rat(1, 4) - &p2, p2];
    let hit = &half + p / int(2);
    let miss = &half - p / int(2);
    let mut measure = [miss.clone(), miss];
    measure[x as usize] = hit;

    let mut joint: [[Rational; 2]; 2] = Default::default();
    for (m, pm) in measure.iter().enumerate() {
        for (y1, row) in joint.iter_mut().enumerate() {
            for (y2, cell) in row.iter_mut().enumerate() {
                let class = (y1 != m) as usize + (y2 != m) as usize;
                *cell += pm * &pair[class];
            }
        }
    }

    let shrink = p / int(2);
    let mut marginal = [&half - &shrink / int(2), &half - &shrink / int(2)];
    marginal[x as usize] = &half + &shrink / int(2);
    for y1 in 0..2 {
        for y2 in 0..2 {
            if joint[y1][y2] != &marginal[y1] * &marginal[y2] {
                return Err(EfcError::Inconsistent(format!(
                    "basis-pair joint for p = {} is not a product",
                    rational::format(p)
                )));
            }
        }
    }
    Ok(Efco2Output {
        x,
        p: p.clone(),
        measure,
        pair,
        joint,
        shrink,
    })
}

/// Record of cloning `p|ψx⟩⟨ψx| + (1 - p) I/2` with `|ψ0⟩ = cos θ|0⟩ + sin θ|1⟩`
/// and `|ψ1⟩ = sin θ|0⟩ + cos θ|1⟩`.
///
/// The input is dephased in the computational basis (shrink `p cos 2θ`),
/// cloned by [`efco2_apply`], and each output is mixed with weight `q`
/// into `|+⟩⟨+|`. The final clone is `r|ψx⟩⟨ψx| + (1 - r) I/2` with
/// `r = p / (2 + p sin 2θ)` and `q = r sin 2θ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Efc2Output {
    pub theta: f64,
    pub x: u8,
    pub p: f64,
    pub step1_shrink: f64,
    pub basis_shrink: f64,
    pub q: f64,
    pub r: f64,
    pub clone: DensityMatrix2,
    pub target: DensityMatrix2,
    pub joint: Matrix4<crate::qmath::C64>,
    /// Diagonal and off-diagonal residuals of the defining equations.
    pub residuals: [f64; 2],
}

pub fn psi(theta: f64, x: u8) -> Ket {
    let (s, co) = theta.sin_cos();
    if x == 0 {
        Ket::new(c(co, 0.), c(s, 0.))
    } else {
        Ket::new(c(s, 0.), c(co, 0.))
    }
}

pub fn efc2_apply(theta: f64, x: u8, p: &Rational) -> Result<Efc2Output, EfcError> {
    if x > 1 {
        return Err(EfcError::BadBit(x));
    }
    if !(0.0..std::f64::consts::FRAC_PI_4).contains(&theta) {
        return Err(EfcError::ThetaOutOfRange(theta));
    }
    if !rational::in_unit_interval(p) {
        return Err(EfcError::POutOfRange(rational::format(p)));
    }
    let pf = rational::to_f64(p);
    let (sin2, cos2) = (2.0 * theta).sin_cos();
    let input = DensityMatrix2::from_pure(&psi(theta, x)).shrink(pf);

    // Step 1: dephase; the diagonal is the s-shrunk basis state |x⟩.
    let s = pf * cos2;
    let dephased = {
        let m = input.matrix();
        DensityMatrix2::new(Matrix2::new(m[(0, 0)], c(0., 0.), c(0., 0.), m[(1, 1)]))
            .expect("dephasing keeps a density matrix")
    };
    let expected_diag = basis_state(x).shrink(s);
    let step1 = dephased.max_abs_diff(&expected_diag);
    if step1 > RESIDUAL_TOL {
        return Err(EfcError::Residual {
            what: "dephasing step",
            value: step1,
            tolerance: RESIDUAL_TOL,
        });
    }

    // Step 2: basis cloning at shrink s (float form of `efco2_apply`).
    let basis_shrink = s / 2.0;
    let basis_clone = basis_state(x).shrink(basis_shrink);

    // Step 3: mix each clone towards |+⟩.
    let r = pf / (2.0 + pf * sin2);
    let q = r * sin2;
    let plus = DensityMatrix2::from_bloch([1.0, 0.0, 0.0]);
    let clone = DensityMatrix2::mix([(1.0 - q, &basis_clone), (q, &plus)]);
    let target = DensityMatrix2::from_pure(&psi(theta, x)).shrink(r);

    let (st, ct) = theta.sin_cos();
    let res_diag = (r * ct * ct + (1.0 - r) / 2.0 - ((0.5 + s / 4.0) * (1.0 - q) + q / 2.0)).abs();
    let res_off = (r * st * ct - q / 2.0).abs();
    let matrix_res = clone.max_abs_diff(&target);
    for (what, value) in [
        ("diagonal equation", res_diag),
        ("off-diagonal equation", res_off),
        ("clone matrix", matrix_res),
    ] {
        if value > RESIDUAL_TOL {
            return Err(EfcError::Residual {
                what,
                value,
                tolerance: RESIDUAL_TOL,
            });
        }
    }
    let joint = clone.kron(&clone);
    debug_assert!(max_abs_diff(&joint, &target.kron(&target)) < 1e-12);
    Ok(Efc2Output {
        theta,
        x,
        p: pf,
        step1_shrink: s,
        basis_shrink,
        q,
        r,
        clone,
        target,
        joint,
        residuals: [res_diag, res_off],
    })
}

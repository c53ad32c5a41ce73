use super::EfcError;
use crate::netgraph::Letter;
use crate::qmath::ShrunkState;
use crate::rational::{self, int, rat, Rational};
use num_traits::{One, Zero};

/// Exact parameters of the cloning protocol for a known shrink `alpha`.
///
/// After the tetra measurement returns `X`, the pair `(Z1, Z2)` is drawn with
/// probability `p[0]` for `(X, X)`, `p[1]` for each of the six `(X, Y)` /
/// `(Y, X)`, `p[2]` for each of the six `(Y, Y')` with `Y ≠ Y'`, and `p[3]`
/// for each of the three `(Y, Y)`, where `Y, Y' ≠ X`. The `q` values are the
/// resulting joint pair probabilities for an input labelled `X`, in the same
/// pattern classes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfcAlphaParams {
    pub alpha: Rational,
    pub p: [Rational; 4],
    pub q: [Rational; 4],
}

impl EfcAlphaParams {
    pub fn new(alpha: &Rational) -> Result<Self, EfcError> {
        if !rational::in_unit_interval(alpha) {
            return Err(EfcError::AlphaOutOfRange(rational::format(alpha)));
        }
        let a2 = alpha * alpha;
        let p = [
            (int(81) + alpha * int(6) + &a2) / int(432),
            (int(9) - alpha) * (int(15) + alpha) / int(1296),
            (int(9) - alpha) * (int(3) + alpha) / int(1296),
            (int(9) - alpha * int(2) + &a2) / int(432),
        ];
        let hi = rat(1, 4) + alpha * rat(1, 12);
        let lo = rat(1, 4) - alpha * rat(1, 36);
        let q = [&hi * &hi, &lo * &hi, &lo * &lo, &lo * &lo];
        let params = EfcAlphaParams {
            alpha: alpha.clone(),
            p,
            q,
        };
        params.verify()?;
        Ok(params)
    }

    /// Normalization of `p` and `q`, positivity of `p`, and the four linear
    /// relations tying `q` to `p` through the measurement law.
    fn verify(&self) -> Result<(), EfcError> {
        let [p1, p2, p3, p4] = &self.p;
        let [q1, q2, q3, q4] = &self.q;
        let weighted = |v: &[Rational; 4]| &v[0] + &v[1] * int(6) + &v[2] * int(6) + &v[3] * int(3);
        if !weighted(&self.p).is_one() {
            return Err(EfcError::Inconsistent("p1 + 6p2 + 6p3 + 3p4 != 1".into()));
        }
        if !weighted(&self.q).is_one() {
            return Err(EfcError::Inconsistent("q1 + 6q2 + 6q3 + 3q4 != 1".into()));
        }
        if self.p.iter().any(|x| x <= &Rational::zero()) {
            return Err(EfcError::Inconsistent("non-positive pair probability".into()));
        }
        let a = rat(1, 4) + &self.alpha * rat(1, 4);
        let b = rat(1, 4) - &self.alpha * rat(1, 12);
        let checks = [
            (q1, &a * p1 + &b * p4 * int(3)),
            (q2, (&a + &b) * p2 + &b * p3 * int(2)),
            (q3, &b * p2 * int(2) + (&a + &b) * p3),
            (q4, &b * p1 + (&a + &b * int(2)) * p4),
        ];
        for (k, (lhs, rhs)) in checks.iter().enumerate() {
            if *lhs != rhs {
                return Err(EfcError::Inconsistent(format!("relation for q{} fails", k + 1)));
            }
        }
        Ok(())
    }
}

/// Exact distribution over ordered letter pairs; `weights[z1][z2]`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairDistribution {
    pub weights: [[Rational; 4]; 4],
}

impl PairDistribution {
    pub fn get(&self, z1: Letter, z2: Letter) -> &Rational {
        &self.weights[z1.index()][z2.index()]
    }

    pub fn total(&self) -> Rational {
        self.weights.iter().flatten().sum()
    }

    pub fn marginals(&self) -> ([Rational; 4], [Rational; 4]) {
        let first = std::array::from_fn(|i| self.weights[i].iter().sum());
        let second = std::array::from_fn(|j| self.weights.iter().map(|row| &row[j]).sum());
        (first, second)
    }

    /// True when every weight factors as the product of the two marginals.
    pub fn is_product(&self) -> bool {
        let (u, v) = self.marginals();
        (0..4).all(|i| (0..4).all(|j| self.weights[i][j] == &u[i] * &v[j]))
    }
}

/// Conditional law of `(Z1, Z2)` once the measurement returned `measured`.
pub fn efc_pair_distribution(params: &EfcAlphaParams, measured: Letter) -> PairDistribution {
    let weights = std::array::from_fn(|i| {
        std::array::from_fn(|j| {
            let (z1, z2) = (Letter::new(i as u8), Letter::new(j as u8));
            let class = match (z1 == measured, z2 == measured) {
                (true, true) => 0,
                (true, false) | (false, true) => 1,
                (false, false) if z1 != z2 => 2,
                (false, false) => 3,
            };
            params.p[class].clone()
        })
    });
    PairDistribution { weights }
}

/// Exact tetra-pair mixture weights of the two outputs for `input`,
/// averaging the conditional tables over the measurement law.
pub fn efc_joint(input: &ShrunkState) -> Result<PairDistribution, EfcError> {
    let params = EfcAlphaParams::new(&input.alpha)?;
    let outcome = input.ttr_probabilities();
    let mut weights: [[Rational; 4]; 4] = Default::default();
    for x in Letter::ALL {
        let cond = efc_pair_distribution(&params, x);
        for (row, cond_row) in weights.iter_mut().zip(&cond.weights) {
            for (w, c) in row.iter_mut().zip(cond_row) {
                *w += &outcome[x.index()] * c;
            }
        }
    }
    Ok(PairDistribution { weights })
}

/// Clone `input = α χ(z) + (1 - α) I/2` into two copies of
/// `(α/9) χ(z) + (1 - α/9) I/2`. The joint output is checked to be exactly
/// that product before returning.
pub fn efc_apply(input: &ShrunkState) -> Result<(ShrunkState, ShrunkState), EfcError> {
    let joint = efc_joint(input)?;
    let out = ShrunkState {
        label: input.label,
        alpha: &input.alpha / int(9),
    };
    let u = out.coefficients();
    let product = (0..4).all(|i| (0..4).all(|j| joint.weights[i][j] == &u[i] * &u[j]));
    if !product {
        return Err(EfcError::Inconsistent(format!(
            "joint output for label {} and alpha {} is not the claimed product",
            input.label,
            rational::format(&input.alpha)
        )));
    }
    Ok((out.clone(), out))
}

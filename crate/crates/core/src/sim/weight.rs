use crate::rational::{self, Rational};
use num_traits::{One, Zero};
use std::fmt::Debug;
use std::ops::{AddAssign, Mul};

/// Probability weights for exact enumeration: exact rationals, or floats when
/// an input law is irrational.
pub trait Weight: Clone + Debug + PartialEq + Send + Sync + Zero + One + AddAssign + Mul<Output = Self> {
    fn from_rational(r: &Rational) -> Self;
    fn to_f64(&self) -> f64;
}

impl Weight for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn to_f64(&self) -> f64 {
        rational::to_f64(self)
    }
}

impl Weight for f64 {
    fn from_rational(r: &Rational) -> Self {
        rational::to_f64(r)
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

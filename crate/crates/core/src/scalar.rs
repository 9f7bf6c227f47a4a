//! Scalar abstraction shared by the exact and floating-point pipelines.

use std::fmt::Debug;
use std::ops::{Add, Mul, Neg, Sub};

use crate::numfield::{FieldElem, Rational};
use num_traits::ToPrimitive;

pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    /// True for exact arithmetic, where zero tests are decisive.
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: &Rational) -> Self;
    fn is_zero(&self) -> bool;
    fn inv(&self) -> Option<Self>;
    /// Sign of the real value: −1, 0 or +1.
    fn sign(&self) -> i8;
    fn to_f64(&self) -> f64;

    fn from_i64(n: i64) -> Self {
        Self::from_rational(&Rational::from_integer(n.into()))
    }

    /// Zero test: exact for exact scalars, |x| ≤ tol for floats.
    fn is_negligible(&self, tol: f64) -> bool {
        if Self::EXACT {
            self.is_zero()
        } else {
            self.to_f64().abs() <= tol
        }
    }

    fn div(&self, other: &Self) -> Option<Self> {
        other.inv().map(|i| self.clone() * i)
    }
}

impl Scalar for FieldElem {
    const EXACT: bool = true;

    fn zero() -> Self {
        FieldElem::zero()
    }
    fn one() -> Self {
        FieldElem::one()
    }
    fn from_rational(q: &Rational) -> Self {
        FieldElem::from_rational(q.clone())
    }
    fn is_zero(&self) -> bool {
        FieldElem::is_zero(self)
    }
    fn inv(&self) -> Option<Self> {
        self.inverse().ok()
    }
    fn sign(&self) -> i8 {
        FieldElem::sign(self)
    }
    fn to_f64(&self) -> f64 {
        FieldElem::to_f64(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_rational(q: &Rational) -> Self {
        q.to_f64().unwrap_or(f64::NAN)
    }
    fn is_zero(&self) -> bool {
        *self == 0.0
    }
    fn inv(&self) -> Option<Self> {
        if *self == 0.0 {
            None
        } else {
            Some(1.0 / self)
        }
    }
    fn sign(&self) -> i8 {
        if *self > 0.0 {
            1
        } else if *self < 0.0 {
            -1
        } else {
            0
        }
    }
    fn to_f64(&self) -> f64 {
        *self
    }
}

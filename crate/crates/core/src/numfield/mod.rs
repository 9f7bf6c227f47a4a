//! Exact arithmetic in real number fields ℚ(α) with sign determination.
//!
//! A [`NumberField`] is a monic minimal polynomial together with a rational
//! interval isolating one real root α. Elements are coefficient vectors in the
//! power basis 1, α, …, α^(d−1).

pub mod poly;

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

use poly::Poly;

pub type Rational = num_rational::BigRational;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum FieldError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("elements belong to different number fields")]
    FieldMismatch,
    #[error("malformed rational literal {0:?}")]
    BadRational(String),
    #[error("invalid number field: {0}")]
    InvalidField(String),
}

/// Parses "p/q", "p" or a plain decimal such as "-1.25".
pub fn parse_rational(text: &str) -> Result<Rational, FieldError> {
    let s = text.trim();
    let bad = || FieldError::BadRational(text.to_string());
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(n, d));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip_abs = ip.trim_start_matches(['-', '+']);
        let ip_val: BigInt = if ip_abs.is_empty() { BigInt::zero() } else { ip_abs.parse().map_err(|_| bad())? };
        let fp_val: BigInt = fp.parse().map_err(|_| bad())?;
        let den = num_traits::pow(BigInt::from(10), fp.len());
        let mag = Rational::new(ip_val * &den + fp_val, den);
        return Ok(if neg { -mag } else { mag });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(Rational::from_integer(n))
}

pub fn rational_to_string(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

pub fn rat(n: i64) -> Rational {
    Rational::from_integer(n.into())
}

pub fn ratio(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

/// Bits of isolation the stored root interval is refined to on construction.
const CACHED_REFINEMENT_BITS: u64 = 96;

#[derive(Debug)]
pub struct NumberField {
    min_poly: Poly,
    lo: Rational,
    hi: Rational,
    /// Tight isolating interval computed once; either a point or a sign change.
    tight: (Rational, Rational),
}

impl NumberField {
    pub fn new(min_poly: Vec<Rational>, lo: Rational, hi: Rational) -> Result<Self, FieldError> {
        let p = poly::trimmed(min_poly);
        let d = poly::degree(&p)
            .filter(|&d| d >= 1)
            .ok_or_else(|| FieldError::InvalidField("minimal polynomial has degree < 1".into()))?;
        let p = poly::monic(&p);
        if lo > hi {
            return Err(FieldError::InvalidField("root interval has lo > hi".into()));
        }
        let g = poly::gcd(&p, &poly::derivative(&p));
        if poly::degree(&g) != Some(0) {
            return Err(FieldError::InvalidField("minimal polynomial is not square-free".into()));
        }
        if d >= 2 {
            if let Some(r) = rational_root(&p) {
                return Err(FieldError::InvalidField(format!(
                    "minimal polynomial has rational root {}",
                    rational_to_string(&r)
                )));
            }
        }
        let tight = if lo == hi {
            if !poly::eval(&p, &lo).is_zero() {
                return Err(FieldError::InvalidField("point interval is not a root".into()));
            }
            (lo.clone(), hi.clone())
        } else {
            let flo = poly::eval(&p, &lo);
            let fhi = poly::eval(&p, &hi);
            if flo.is_zero() || fhi.is_zero() {
                // Only possible in degree 1.
                let r = if flo.is_zero() { lo.clone() } else { hi.clone() };
                (r.clone(), r)
            } else {
                let seq = poly::sturm_sequence(&p);
                if poly::count_roots(&seq, &lo, &hi) != 1 {
                    return Err(FieldError::InvalidField(
                        "root interval does not isolate exactly one real root".into(),
                    ));
                }
                refine(&p, lo.clone(), hi.clone(), CACHED_REFINEMENT_BITS)
            }
        };
        Ok(NumberField { min_poly: p, lo, hi, tight })
    }

    /// The field ℚ, presented as ℚ[t]/(t).
    pub fn rationals() -> Self {
        NumberField::new(vec![Rational::zero(), Rational::one()], Rational::zero(), Rational::zero())
            .expect("t is a valid minimal polynomial")
    }

    pub fn degree(&self) -> usize {
        self.min_poly.len() - 1
    }

    pub fn min_poly(&self) -> &[Rational] {
        &self.min_poly
    }

    pub fn root_interval(&self) -> (&Rational, &Rational) {
        (&self.lo, &self.hi)
    }

    /// Rational approximation of the distinguished root.
    pub fn root_approx(&self) -> f64 {
        let mid = (&self.tight.0 + &self.tight.1) / rat(2);
        mid.to_f64().unwrap_or(f64::NAN)
    }

    /// The generator α as an element.
    pub fn generator(self: &Arc<Self>) -> FieldElem {
        let mut coeffs = vec![Rational::zero(); self.degree()];
        if self.degree() == 1 {
            coeffs[0] = -self.min_poly[0].clone();
        } else {
            coeffs[1] = Rational::one();
        }
        FieldElem { field: Some(self.clone()), coeffs }
    }

    pub fn elem(self: &Arc<Self>, coeffs: &[Rational]) -> FieldElem {
        FieldElem::from_poly(Some(self.clone()), coeffs.to_vec())
    }

    fn same_root(&self, other: &NumberField) -> bool {
        if self.min_poly != other.min_poly {
            return false;
        }
        let lo = std::cmp::max(&self.tight.0, &other.tight.0);
        let hi = std::cmp::min(&self.tight.1, &other.tight.1);
        if lo > hi {
            return false;
        }
        if lo == hi {
            return poly::eval(&self.min_poly, lo).is_zero();
        }
        let seq = poly::sturm_sequence(&self.min_poly);
        poly::eval(&self.min_poly, lo).is_zero() || poly::count_roots(&seq, lo, hi) >= 1
    }
}

impl PartialEq for NumberField {
    fn eq(&self, other: &Self) -> bool {
        std::ptr::eq(self, other) || self.same_root(other)
    }
}

/// Bisects a sign-changing interval until its width is below 2^-bits.
fn refine(p: &[Rational], mut lo: Rational, mut hi: Rational, bits: u64) -> (Rational, Rational) {
    let target = Rational::new(BigInt::one(), BigInt::one() << bits);
    let slo = poly::eval(p, &lo).is_positive();
    while &hi - &lo > target {
        let mid = (&lo + &hi) / rat(2);
        let v = poly::eval(p, &mid);
        if v.is_zero() {
            return (mid.clone(), mid);
        }
        if v.is_positive() == slo {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    (lo, hi)
}

/// Rational-root test via the rational root theorem (skipped for huge coefficients).
fn rational_root(p: &[Rational]) -> Option<Rational> {
    let lcm = p.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
    let ints: Vec<BigInt> = p.iter().map(|c| (c * Rational::from_integer(lcm.clone())).to_integer()).collect();
    if ints[0].is_zero() {
        return Some(Rational::zero());
    }
    let a0 = small_divisors(&ints[0])?;
    let an = small_divisors(ints.last().unwrap())?;
    for n in &a0 {
        for d in &an {
            for s in [1i64, -1] {
                let r = Rational::new(BigInt::from(*n * s), BigInt::from(*d));
                if poly::eval(p, &r).is_zero() {
                    return Some(r);
                }
            }
        }
    }
    None
}

fn small_divisors(n: &BigInt) -> Option<Vec<i64>> {
    let n = n.abs().to_i64().filter(|&n| n <= 1_000_000_000_000)?;
    let mut out = Vec::new();
    let mut k = 1i64;
    while k * k <= n {
        if n % k == 0 {
            out.push(k);
            if k * k != n {
                out.push(n / k);
            }
        }
        k += 1;
    }
    Some(out)
}

/// Element of ℚ(α). `field == None` marks a bare rational, compatible with every field.
#[derive(Clone, Debug)]
pub struct FieldElem {
    field: Option<Arc<NumberField>>,
    coeffs: Vec<Rational>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl FieldElem {
    pub fn from_rational(q: Rational) -> Self {
        FieldElem { field: None, coeffs: vec![q] }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::from_rational(rat(n))
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn one() -> Self {
        Self::from_i64(1)
    }

    fn from_poly(field: Option<Arc<NumberField>>, p: Poly) -> Self {
        match field {
            None => {
                let c = poly::eval(&p, &Rational::zero());
                debug_assert!(poly::degree(&p).unwrap_or(0) == 0, "bare rational with α-terms");
                FieldElem { field: None, coeffs: vec![c] }
            }
            Some(f) => {
                let mut r = poly::rem(&p, &f.min_poly);
                r.resize(f.degree(), Rational::zero());
                FieldElem { field: Some(f), coeffs: r }
            }
        }
    }

    pub fn field(&self) -> Option<&Arc<NumberField>> {
        self.field.as_ref()
    }

    /// Power-basis coefficients (length = field degree, or 1 for bare rationals).
    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(|c| c.is_zero())
    }

    pub fn is_rational(&self) -> bool {
        self.coeffs.iter().skip(1).all(|c| c.is_zero())
    }

    pub fn as_rational(&self) -> Option<&Rational> {
        if self.is_rational() {
            self.coeffs.first()
        } else {
            None
        }
    }

    fn common_field(&self, other: &FieldElem) -> Result<Option<Arc<NumberField>>, FieldError> {
        match (&self.field, &other.field) {
            (None, None) => Ok(None),
            (Some(f), None) | (None, Some(f)) => Ok(Some(f.clone())),
            (Some(f), Some(g)) => {
                if Arc::ptr_eq(f, g) || **f == **g {
                    Ok(Some(f.clone()))
                } else {
                    Err(FieldError::FieldMismatch)
                }
            }
        }
    }

    /// Checked field arithmetic.
    pub fn arith(&self, other: &FieldElem, op: ArithOp) -> Result<FieldElem, FieldError> {
        let field = self.common_field(other)?;
        match op {
            ArithOp::Add => Ok(FieldElem::from_poly(field, poly::add(&self.coeffs, &other.coeffs))),
            ArithOp::Sub => Ok(FieldElem::from_poly(field, poly::sub(&self.coeffs, &other.coeffs))),
            ArithOp::Mul => Ok(FieldElem::from_poly(field, poly::mul(&self.coeffs, &other.coeffs))),
            ArithOp::Div => {
                let inv = other.inverse()?;
                FieldElem { field: field.clone(), ..inv }.arith(self, ArithOp::Mul)
            }
        }
    }

    pub fn inverse(&self) -> Result<FieldElem, FieldError> {
        if self.is_zero() {
            return Err(FieldError::DivisionByZero);
        }
        match &self.field {
            None => Ok(FieldElem::from_rational(Rational::one() / &self.coeffs[0])),
            Some(f) => {
                let (g, s) = poly::half_ext_gcd(&self.coeffs, &f.min_poly);
                if poly::degree(&g) != Some(0) {
                    // Nonzero element sharing a factor with min_poly: the input contract
                    // (irreducibility) was violated.
                    return Err(FieldError::DivisionByZero);
                }
                Ok(FieldElem::from_poly(Some(f.clone()), s))
            }
        }
    }

    /// Sign of the real embedding: exact zero test, then interval refinement.
    pub fn sign(&self) -> i8 {
        if self.is_zero() {
            return 0;
        }
        let f = match &self.field {
            None => return if self.coeffs[0].is_positive() { 1 } else { -1 },
            Some(f) => f,
        };
        if self.is_rational() {
            return if self.coeffs[0].is_positive() { 1 } else { -1 };
        }
        let (mut lo, mut hi) = f.tight.clone();
        loop {
            let (a, b) = poly::eval_interval(&self.coeffs, &lo, &hi);
            if a.is_positive() {
                return 1;
            }
            if b.is_negative() {
                return -1;
            }
            if lo == hi {
                unreachable!("nonzero element evaluated to zero at the exact root");
            }
            let bits = interval_bits(&lo, &hi) + 32;
            let r = refine(&f.min_poly, lo, hi, bits);
            lo = r.0;
            hi = r.1;
        }
    }

    /// Rational approximation with absolute error below 2^(2−bits)·max(1, |x|).
    pub fn approx(&self, precision_bits: u32) -> Rational {
        let f = match &self.field {
            Some(f) if !self.is_rational() => f,
            _ => return self.coeffs[0].clone(),
        };
        let (mut lo, mut hi) = f.tight.clone();
        loop {
            let (a, b) = poly::eval_interval(&self.coeffs, &lo, &hi);
            let mag = std::cmp::max(a.abs(), b.abs());
            let scale = std::cmp::max(mag, Rational::one());
            let tol = scale * Rational::new(BigInt::one(), BigInt::one() << precision_bits);
            if &b - &a < tol || lo == hi {
                return (a + b) / rat(2);
            }
            let bits = interval_bits(&lo, &hi) + 16;
            let r = refine(&f.min_poly, lo, hi, bits);
            lo = r.0;
            hi = r.1;
        }
    }

    /// Nearest double to [`FieldElem::approx`].
    pub fn to_float(&self, precision_bits: u32) -> f64 {
        self.approx(precision_bits.max(53)).to_f64().unwrap_or(f64::NAN)
    }

    pub fn to_f64(&self) -> f64 {
        self.to_float(default_precision_bits())
    }
}

/// Working precision for float conversion; overridable by CUSPFORGE_PRECISION_BITS.
pub fn default_precision_bits() -> u32 {
    std::env::var("CUSPFORGE_PRECISION_BITS")
        .ok()
        .and_then(|s| s.parse::<u32>().ok())
        .filter(|&b| b >= 53)
        .unwrap_or(64)
}

/// Approximate −log2(width) of an interval.
fn interval_bits(lo: &Rational, hi: &Rational) -> u64 {
    let w = hi - lo;
    if w.is_zero() {
        return 0;
    }
    let num_bits = w.numer().bits() as i64;
    let den_bits = w.denom().bits() as i64;
    (den_bits - num_bits).max(0) as u64
}

impl PartialEq for FieldElem {
    fn eq(&self, other: &Self) -> bool {
        match self.arith(other, ArithOp::Sub) {
            Ok(d) => d.is_zero(),
            Err(_) => false,
        }
    }
}

impl fmt::Display for FieldElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut terms = Vec::new();
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let mono = match i {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{i}"),
            };
            let mag = c.abs();
            let body = if mono.is_empty() {
                rational_to_string(&mag)
            } else if mag.is_one() {
                mono
            } else {
                format!("{}*{}", rational_to_string(&mag), mono)
            };
            terms.push((c.is_negative(), body));
        }
        if terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (neg, body)) in terms.iter().enumerate() {
            match (k, neg) {
                (0, true) => write!(f, "-{body}")?,
                (0, false) => write!(f, "{body}")?,
                (_, true) => write!(f, " - {body}")?,
                (_, false) => write!(f, " + {body}")?,
            }
        }
        Ok(())
    }
}

macro_rules! forward_op {
    ($tr:ident, $method:ident, $op:expr) => {
        impl $tr for FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: FieldElem) -> FieldElem {
                self.arith(&rhs, $op).unwrap_or_else(|e| panic!("{}", e))
            }
        }
        impl<'a> $tr<&'a FieldElem> for &'a FieldElem {
            type Output = FieldElem;
            fn $method(self, rhs: &'a FieldElem) -> FieldElem {
                self.arith(rhs, $op).unwrap_or_else(|e| panic!("{}", e))
            }
        }
    };
}

forward_op!(Add, add, ArithOp::Add);
forward_op!(Sub, sub, ArithOp::Sub);
forward_op!(Mul, mul, ArithOp::Mul);
forward_op!(Div, div, ArithOp::Div);

impl Neg for FieldElem {
    type Output = FieldElem;
    fn neg(self) -> FieldElem {
        FieldElem { field: self.field, coeffs: self.coeffs.into_iter().map(|c| -c).collect() }
    }
}

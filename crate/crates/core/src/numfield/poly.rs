//! Dense univariate polynomials over ℚ, little-endian coefficient vectors.

use num_traits::{One, Signed, Zero};

use super::Rational;

pub type Poly = Vec<Rational>;

pub fn trim(p: &mut Poly) {
    while p.last().is_some_and(|c| c.is_zero()) {
        p.pop();
    }
}

pub fn trimmed(mut p: Poly) -> Poly {
    trim(&mut p);
    p
}

/// Degree of a trimmed polynomial; `None` for the zero polynomial.
pub fn degree(p: &[Rational]) -> Option<usize> {
    p.iter().rposition(|c| !c.is_zero())
}

pub fn add(a: &[Rational], b: &[Rational]) -> Poly {
    let n = a.len().max(b.len());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let x = a.get(i).cloned().unwrap_or_else(Rational::zero);
        let y = b.get(i).cloned().unwrap_or_else(Rational::zero);
        out.push(x + y);
    }
    trimmed(out)
}

pub fn neg(a: &[Rational]) -> Poly {
    a.iter().map(|c| -c.clone()).collect()
}

pub fn sub(a: &[Rational], b: &[Rational]) -> Poly {
    add(a, &neg(b))
}

pub fn scale(a: &[Rational], s: &Rational) -> Poly {
    if s.is_zero() {
        return Vec::new();
    }
    a.iter().map(|c| c * s).collect()
}

pub fn mul(a: &[Rational], b: &[Rational]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    trimmed(out)
}

/// Quotient and remainder; panics on division by the zero polynomial.
pub fn divrem(a: &[Rational], b: &[Rational]) -> (Poly, Poly) {
    let db = degree(b).expect("polynomial division by zero");
    let lead = b[db].clone();
    let mut r: Poly = trimmed(a.to_vec());
    let mut q = vec![Rational::zero(); r.len().saturating_sub(db).max(1)];
    while let Some(dr) = degree(&r) {
        if dr < db {
            break;
        }
        let c = &r[dr] / &lead;
        let shift = dr - db;
        for (j, bj) in b.iter().enumerate().take(db + 1) {
            let t = &c * bj;
            r[shift + j] -= t;
        }
        q[shift] = c;
        trim(&mut r);
    }
    (trimmed(q), r)
}

pub fn rem(a: &[Rational], b: &[Rational]) -> Poly {
    divrem(a, b).1
}

pub fn monic(a: &[Rational]) -> Poly {
    match degree(a) {
        None => Vec::new(),
        Some(d) => {
            let lead = a[d].clone();
            a[..=d].iter().map(|c| c / &lead).collect()
        }
    }
}

/// Monic greatest common divisor.
pub fn gcd(a: &[Rational], b: &[Rational]) -> Poly {
    let mut x = trimmed(a.to_vec());
    let mut y = trimmed(b.to_vec());
    while !y.is_empty() {
        let r = rem(&x, &y);
        x = y;
        y = r;
    }
    monic(&x)
}

/// Returns (g, s) with s·a ≡ g (mod m), g = gcd(a, m) monic.
pub fn half_ext_gcd(a: &[Rational], m: &[Rational]) -> (Poly, Poly) {
    let mut r0 = trimmed(m.to_vec());
    let mut r1 = trimmed(a.to_vec());
    let mut s0: Poly = Vec::new();
    let mut s1: Poly = vec![Rational::one()];
    while !r1.is_empty() {
        let (q, r) = divrem(&r0, &r1);
        let s = sub(&s0, &mul(&q, &s1));
        r0 = r1;
        r1 = r;
        s0 = s1;
        s1 = s;
    }
    let d = degree(&r0).unwrap_or(0);
    let lead = r0.get(d).cloned().unwrap_or_else(Rational::one);
    let inv = Rational::one() / lead;
    (scale(&r0, &inv), scale(&s0, &inv))
}

pub fn derivative(a: &[Rational]) -> Poly {
    trimmed(a.iter().enumerate().skip(1).map(|(i, c)| c * Rational::from_integer((i as i64).into())).collect())
}

pub fn eval(a: &[Rational], x: &Rational) -> Rational {
    let mut acc = Rational::zero();
    for c in a.iter().rev() {
        acc = acc * x + c;
    }
    acc
}

fn sign(x: &Rational) -> i32 {
    if x.is_zero() {
        0
    } else if x.is_positive() {
        1
    } else {
        -1
    }
}

pub fn sturm_sequence(p: &[Rational]) -> Vec<Poly> {
    let mut seq = vec![trimmed(p.to_vec())];
    let d = derivative(p);
    if d.is_empty() {
        return seq;
    }
    seq.push(d);
    loop {
        let n = seq.len();
        let r = rem(&seq[n - 2], &seq[n - 1]);
        if r.is_empty() {
            break;
        }
        seq.push(neg(&r));
    }
    seq
}

fn sign_changes(seq: &[Poly], x: &Rational) -> usize {
    let mut last = 0;
    let mut count = 0;
    for p in seq {
        let s = sign(&eval(p, x));
        if s != 0 {
            if last != 0 && s != last {
                count += 1;
            }
            last = s;
        }
    }
    count
}

/// Number of distinct real roots in the half-open interval (lo, hi].
pub fn count_roots(seq: &[Poly], lo: &Rational, hi: &Rational) -> usize {
    sign_changes(seq, lo).saturating_sub(sign_changes(seq, hi))
}

/// Enclosure of p over [lo, hi] by interval Horner evaluation.
pub fn eval_interval(p: &[Rational], lo: &Rational, hi: &Rational) -> (Rational, Rational) {
    let mut a = Rational::zero();
    let mut b = Rational::zero();
    for c in p.iter().rev() {
        let prods = [&a * lo, &a * hi, &b * lo, &b * hi];
        let mut mn = prods[0].clone();
        let mut mx = prods[0].clone();
        for q in &prods[1..] {
            if *q < mn {
                mn = q.clone();
            }
            if *q > mx {
                mx = q.clone();
            }
        }
        a = mn + c;
        b = mx + c;
    }
    (a, b)
}

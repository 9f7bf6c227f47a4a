//! Representations Γ → GL(4), validation, the SL(2,ℂ) → SO(3,1) lift, and normalization of a
//! parabolic peripheral pair to the form N(1,0), N(u,v).

use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::diagnostics::Diagnostics;
use crate::fpgroup::{Presentation, Word};
use crate::lie::{form_j, in_so31, so31_defect};
use crate::linalg::{det, inverse, LinalgError, Matrix};
use crate::numfield::{ratio, FieldElem, NumberField};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RepError {
    #[error("generator {0:?} has no image")]
    MissingGenerator(String),
    #[error("image of {0:?} is not an invertible 4x4 matrix")]
    BadImage(String),
    #[error("SL(2,C) image of {0:?} does not have determinant 1")]
    NotSl2(String),
    #[error("peripheral image is not parabolic: {0}")]
    NonParabolic(String),
    #[error("peripheral images do not commute")]
    NonCommuting,
    #[error("normal form check failed: {0}")]
    NormalForm(String),
    #[error("cusp index {0} out of range")]
    NoSuchCusp(usize),
    #[error("generator names differ between presentation and representation")]
    NameMismatch,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Form {
    SO31,
    SL4,
}

/// Assignment of 4×4 matrices to generators, with cached inverses.
#[derive(Debug, Clone)]
pub struct Representation<S> {
    names: Vec<String>,
    images: Vec<Matrix<S>>,
    inverses: Vec<Matrix<S>>,
    form: Form,
}

impl<S: Scalar> Representation<S> {
    pub fn new(names: Vec<String>, images: Vec<Matrix<S>>, form: Form) -> Result<Self, RepError> {
        if images.len() != names.len() {
            let missing = names.get(images.len()).cloned().unwrap_or_default();
            return Err(RepError::MissingGenerator(missing));
        }
        let mut inverses = Vec::with_capacity(images.len());
        for (n, m) in names.iter().zip(&images) {
            if m.rows() != 4 || m.cols() != 4 {
                return Err(RepError::BadImage(n.clone()));
            }
            inverses.push(inverse(m).map_err(|_| RepError::BadImage(n.clone()))?);
        }
        Ok(Representation { names, images, inverses, form })
    }

    pub fn trivial(names: Vec<String>) -> Self {
        let n = names.len();
        Representation {
            names,
            images: vec![Matrix::identity(4); n],
            inverses: vec![Matrix::identity(4); n],
            form: Form::SO31,
        }
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn form(&self) -> Form {
        self.form
    }

    pub fn image(&self, g: usize) -> &Matrix<S> {
        &self.images[g]
    }

    pub fn inverse_image(&self, g: usize) -> &Matrix<S> {
        &self.inverses[g]
    }

    pub fn images(&self) -> &[Matrix<S>] {
        &self.images
    }

    /// ρ(g^e) for a single letter e = ±1.
    pub fn letter(&self, g: usize, e: i64) -> &Matrix<S> {
        if e > 0 {
            &self.images[g]
        } else {
            &self.inverses[g]
        }
    }

    pub fn evaluate_word(&self, w: &Word) -> Matrix<S> {
        let mut acc = Matrix::identity(4);
        for (g, e) in w.letters() {
            acc = &acc * self.letter(g, e);
        }
        acc
    }

    /// g·ρ·g⁻¹, given g and g⁻¹.
    pub fn conjugate(&self, g: &Matrix<S>, g_inv: &Matrix<S>) -> Self {
        Representation {
            names: self.names.clone(),
            images: self.images.iter().map(|m| &(g * m) * g_inv).collect(),
            inverses: self.inverses.iter().map(|m| &(g * m) * g_inv).collect(),
            form: self.form,
        }
    }

    pub fn map_scalar<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Representation<T> {
        Representation {
            names: self.names.clone(),
            images: self.images.iter().map(|m| m.map(&f)).collect(),
            inverses: self.inverses.iter().map(|m| m.map(&f)).collect(),
            form: self.form,
        }
    }

    pub fn to_f64(&self) -> Representation<f64> {
        self.map_scalar(|x| x.to_f64())
    }

    /// Representation of ⟨m, l ∣ [m,l]⟩ given by the cusp's peripheral images.
    pub fn peripheral(&self, pres: &Presentation, cusp: usize) -> Result<Representation<S>, RepError> {
        let p = pres.peripherals().get(cusp).ok_or(RepError::NoSuchCusp(cusp))?;
        let m = self.evaluate_word(&p.meridian);
        let l = self.evaluate_word(&p.longitude);
        let mi = self.evaluate_word(&p.meridian.inverse());
        let li = self.evaluate_word(&p.longitude.inverse());
        Ok(Representation {
            names: vec!["m".into(), "l".into()],
            images: vec![m, l],
            inverses: vec![mi, li],
            form: self.form,
        })
    }

    /// Representation of the torus group from two images.
    pub fn torus(m: Matrix<S>, l: Matrix<S>, form: Form) -> Result<Self, RepError> {
        Representation::new(vec!["m".into(), "l".into()], vec![m, l], form)
    }
}

fn is_plus_minus_identity<S: Scalar>(m: &Matrix<S>) -> bool {
    let i = Matrix::<S>::identity(4);
    m.same(&i) || m.same(&-&i)
}

/// Relators ↦ ±I, peripheral pairs commute, form condition per tag.
pub fn validate<S: Scalar>(rep: &Representation<S>, pres: &Presentation) -> Diagnostics {
    let mut d = Diagnostics::default();
    let names_ok = rep.names() == pres.generator_names();
    d.push("generator names", names_ok, if names_ok { "" } else { "presentation and holonomy disagree" });
    if !names_ok {
        return d;
    }
    for (k, r) in pres.relators().iter().enumerate() {
        let ok = is_plus_minus_identity(&rep.evaluate_word(r));
        d.push(format!("relator {}", k + 1), ok, pres.word_string(r));
    }
    for (k, p) in pres.peripherals().iter().enumerate() {
        let m = rep.evaluate_word(&p.meridian);
        let l = rep.evaluate_word(&p.longitude);
        let ok = (&m * &l).same(&(&l * &m));
        d.push(format!("cusp {} peripheral pair commutes", k + 1), ok, "");
    }
    for (n, m) in rep.names().iter().zip(rep.images()) {
        match rep.form() {
            Form::SO31 => {
                let ok = if S::EXACT { in_so31(m) } else { so31_defect(m) <= 1e-9 };
                d.push(format!("{n} preserves J"), ok, "");
            }
            Form::SL4 => {
                let dt = det(m).map(|x| x.to_f64().abs()).unwrap_or(0.0);
                let ok = if S::EXACT {
                    det(m).map(|x| x == S::one() || x == -S::one()).unwrap_or(false)
                } else {
                    (dt - 1.0).abs() <= 1e-9
                };
                d.push(format!("{n} has determinant ±1"), ok, "");
            }
        }
    }
    d
}

/// Complex number with real and imaginary parts in one real number field.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexPair {
    pub re: FieldElem,
    pub im: FieldElem,
}

impl ComplexPair {
    pub fn new(re: FieldElem, im: FieldElem) -> Self {
        ComplexPair { re, im }
    }

    pub fn real(re: FieldElem) -> Self {
        ComplexPair { re, im: FieldElem::zero() }
    }

    pub fn from_i64(n: i64) -> Self {
        Self::real(FieldElem::from_i64(n))
    }

    pub fn zero() -> Self {
        Self::from_i64(0)
    }

    pub fn conj(&self) -> Self {
        ComplexPair { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn add(&self, o: &Self) -> Self {
        ComplexPair { re: &self.re + &o.re, im: &self.im + &o.im }
    }

    pub fn sub(&self, o: &Self) -> Self {
        ComplexPair { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    pub fn mul(&self, o: &Self) -> Self {
        ComplexPair { re: &(&self.re * &o.re) - &(&self.im * &o.im), im: &(&self.re * &o.im) + &(&self.im * &o.re) }
    }

    pub fn neg(&self) -> Self {
        ComplexPair { re: -self.re.clone(), im: -self.im.clone() }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
}

/// 2×2 complex matrix [[a, b], [c, d]].
pub type Sl2 = [ComplexPair; 4];

pub fn sl2_mul(x: &Sl2, y: &Sl2) -> Sl2 {
    [
        x[0].mul(&y[0]).add(&x[1].mul(&y[2])),
        x[0].mul(&y[1]).add(&x[1].mul(&y[3])),
        x[2].mul(&y[0]).add(&x[3].mul(&y[2])),
        x[2].mul(&y[1]).add(&x[3].mul(&y[3])),
    ]
}

pub fn sl2_det(x: &Sl2) -> ComplexPair {
    x[0].mul(&x[3]).sub(&x[1].mul(&x[2]))
}

fn sl2_conj_transpose(x: &Sl2) -> Sl2 {
    [x[0].conj(), x[2].conj(), x[1].conj(), x[3].conj()]
}

/// Generator → SL(2,ℂ) matrix over one real field.
#[derive(Debug, Clone)]
pub struct Sl2cRep {
    pub field: Arc<NumberField>,
    pub names: Vec<String>,
    pub matrices: Vec<Sl2>,
}

impl Sl2cRep {
    pub fn new(field: Arc<NumberField>, names: Vec<String>, matrices: Vec<Sl2>) -> Result<Self, RepError> {
        if matrices.len() != names.len() {
            return Err(RepError::MissingGenerator(names.get(matrices.len()).cloned().unwrap_or_default()));
        }
        for (n, m) in names.iter().zip(&matrices) {
            let d = sl2_det(m);
            if !(d.re == FieldElem::one() && d.im.is_zero()) {
                return Err(RepError::NotSl2(n.clone()));
            }
        }
        Ok(Sl2cRep { field, names, matrices })
    }
}

/// Hermitian basis h₁ = [[2,0],[0,0]], h₂ = [[0,1],[1,0]], h₃ = [[0,i],[−i,0]], h₄ = [[0,0],[0,1]];
/// a Hermitian [[p,q],[q̄,r]] has coordinates (p/2, Re q, Im q, r), and −det is the form J.
fn hermitian_basis() -> [Sl2; 4] {
    let z = ComplexPair::zero;
    let one = || ComplexPair::from_i64(1);
    let i = || ComplexPair::new(FieldElem::zero(), FieldElem::one());
    [
        [ComplexPair::from_i64(2), z(), z(), z()],
        [z(), one(), one(), z()],
        [z(), i(), i().neg(), z()],
        [z(), z(), z(), one()],
    ]
}

fn hermitian_coords(h: &Sl2) -> [FieldElem; 4] {
    let half = FieldElem::from_rational(ratio(1, 2));
    [&h[0].re * &half, h[1].re.clone(), h[1].im.clone(), h[3].re.clone()]
}

/// Image of A under h ↦ A h A* in the Hermitian coordinates above. A and −A agree.
pub fn lift_matrix(a: &Sl2) -> Matrix<FieldElem> {
    let a_star = sl2_conj_transpose(a);
    let cols: Vec<Vec<FieldElem>> =
        hermitian_basis().iter().map(|h| hermitian_coords(&sl2_mul(&sl2_mul(a, h), &a_star)).to_vec()).collect();
    Matrix::from_columns(4, &cols)
}

pub fn lift_sl2c_to_so31(r: &Sl2cRep) -> Result<Representation<FieldElem>, RepError> {
    let images = r.matrices.iter().map(lift_matrix).collect();
    Representation::new(r.names.clone(), images, Form::SO31)
}

/// The parabolic N(u,v) = exp of u(E₁₂+E₂₄) + v(E₁₃+E₃₄).
pub fn parabolic<S: Scalar>(u: &S, v: &S) -> Matrix<S> {
    let half = S::from_rational(&ratio(1, 2));
    let corner = (u.clone() * u.clone() + v.clone() * v.clone()) * half;
    let mut m = Matrix::<S>::identity(4);
    m[(0, 1)] = u.clone();
    m[(0, 2)] = v.clone();
    m[(0, 3)] = corner;
    m[(1, 3)] = u.clone();
    m[(2, 3)] = v.clone();
    m
}

#[derive(Debug, Clone, PartialEq)]
pub struct CuspShape<S> {
    pub u: S,
    pub v: S,
}

impl<S: Scalar> CuspShape<S> {
    /// Requires v > 0.
    pub fn new(u: S, v: S) -> Result<Self, RepError> {
        if v.sign() <= 0 {
            return Err(RepError::NormalForm("cusp shape must have v > 0".into()));
        }
        Ok(CuspShape { u, v })
    }

    pub fn to_f64(&self) -> CuspShape<f64> {
        CuspShape { u: self.u.to_f64(), v: self.v.to_f64() }
    }
}

/// True iff v(v² − 3u²) ≠ 0, i.e. arg(u + iv) ∉ (π/3)ℤ for v > 0.
pub fn cusp_shape_argument_ok<S: Scalar>(shape: &CuspShape<S>) -> bool {
    let (u, v) = (&shape.u, &shape.v);
    let x = v.clone() * (v.clone() * v.clone() - S::from_i64(3) * u.clone() * u.clone());
    !x.is_negligible(1e-9)
}

/// A cusp whose peripheral pair is in normal form.
#[derive(Debug, Clone)]
pub struct NormalizedCusp<S> {
    /// g with rep' = g·rep·g⁻¹ (conformal for J, defined up to scale).
    pub conjugator: Matrix<S>,
    pub conjugator_inverse: Matrix<S>,
    pub rep: Representation<S>,
    pub shape: CuspShape<S>,
    /// ±1 factors removed from the meridian / longitude images.
    pub signs: (i8, i8),
}

/// Exact mode: first index satisfying `nonzero`; float mode: index maximizing `size`.
fn pick<S: Scalar>(n: usize, size: impl Fn(usize) -> f64, nonzero: impl Fn(usize) -> bool) -> Option<usize> {
    if S::EXACT {
        (0..n).find(|&i| nonzero(i))
    } else {
        (0..n).max_by(|&a, &b| size(a).total_cmp(&size(b))).filter(|&i| size(i) > 0.0)
    }
}

fn bilinear<S: Scalar>(x: &[S], y: &[S]) -> S {
    let jy = form_j::<S>().mul_vec(y).expect("length 4");
    x.iter().zip(&jy).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

fn parabolic_sign<S: Scalar>(m: &Matrix<S>, what: &str) -> Result<(i8, Matrix<S>), RepError> {
    let tr = m.trace();
    let s: i8 = if tr.sign() >= 0 { 1 } else { -1 };
    let mm = if s > 0 { m.clone() } else { -m };
    let four = S::from_i64(4);
    if !(mm.trace() - four).is_negligible(1e-9) {
        return Err(RepError::NonParabolic(format!("{what} has trace {}", tr.to_f64())));
    }
    let n = &mm - &Matrix::identity(4);
    let n2 = &n * &n;
    let n3 = &n2 * &n;
    if !n3.same(&Matrix::zeros(4, 4)) || n2.same(&Matrix::zeros(4, 4)) {
        return Err(RepError::NonParabolic(format!("{what} is not a nontrivial parabolic")));
    }
    Ok((s, mm))
}

/// Conjugates the representation so the cusp's meridian maps to ±N(1,0) and its
/// longitude to ±N(u,v) with v > 0.
pub fn normalize_peripheral<S: Scalar>(
    rep: &Representation<S>,
    pres: &Presentation,
    cusp: usize,
) -> Result<NormalizedCusp<S>, RepError> {
    let p = pres.peripherals().get(cusp).ok_or(RepError::NoSuchCusp(cusp))?;
    let (sm, m) = parabolic_sign(&rep.evaluate_word(&p.meridian), "meridian")?;
    let l_raw = rep.evaluate_word(&p.longitude);
    if !(&m * &l_raw).same(&(&l_raw * &m)) {
        return Err(RepError::NonCommuting);
    }
    let (sl, l) = parabolic_sign(&l_raw, "longitude")?;
    let id = Matrix::<S>::identity(4);
    let nm = &m - &id;
    let n2 = &nm * &nm;

    // Null fixed vector: a nonzero column of (M − I)².
    let n = pick::<S>(
        4,
        |j| n2.col(j).iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max),
        |j| n2.col(j).iter().any(|x| !x.is_zero()),
    )
    .map(|j| n2.col(j))
    .ok_or_else(|| RepError::NonParabolic("(M - I)^2 vanishes".into()))?;
    if !l.mul_vec(&n)?.iter().zip(&n).all(|(a, b)| (a.clone() - b.clone()).is_negligible(1e-9)) {
        return Err(RepError::NonCommuting);
    }

    // A null vector m0 with ⟨n, m0⟩ ≠ 0.
    let e = |k: usize| -> Vec<S> { (0..4).map(|i| if i == k { S::one() } else { S::zero() }).collect() };
    let k = pick::<S>(4, |k| bilinear(&n, &e(k)).to_f64().abs(), |k| !bilinear(&n, &e(k)).is_zero())
        .expect("n is nonzero and J is nondegenerate");
    let ek = e(k);
    let nek = bilinear(&n, &ek);
    let coef = bilinear(&ek, &ek).div(&(S::from_i64(2) * nek.clone())).expect("nonzero pairing");
    let m0: Vec<S> = ek.iter().zip(&n).map(|(a, b)| a.clone() - coef.clone() * b.clone()).collect();
    let c0 = bilinear(&n, &m0);

    // Translation direction b2, orthogonal to n and m0.
    let w: Vec<S> = nm.mul_vec(&m0)?;
    let wm = bilinear(&w, &m0).div(&c0).expect("nonzero");
    let wn = bilinear(&w, &n).div(&c0).expect("nonzero");
    let b2: Vec<S> = (0..4).map(|i| w[i].clone() - wm.clone() * n[i].clone() - wn.clone() * m0[i].clone()).collect();
    let q = bilinear(&b2, &b2);
    if q.sign() <= 0 {
        return Err(RepError::NonParabolic("translation vector is not spacelike".into()));
    }
    let scale_m = (-q.clone()).div(&c0).expect("nonzero");
    let mvec: Vec<S> = m0.iter().map(|x| x.clone() * scale_m.clone()).collect();
    let c = -q.clone();

    // b3 = J·ε(·, n, m, b2)/c has ⟨b3,b3⟩ = q.
    let mut b3 = Vec::with_capacity(4);
    for a in 0..4 {
        let rows = vec![e(a), n.clone(), mvec.clone(), b2.clone()];
        b3.push(det(&Matrix::from_rows(rows)?)?);
    }
    let b3 = form_j::<S>().mul_vec(&b3)?;
    let b3: Vec<S> = b3.iter().map(|x| x.div(&c).expect("nonzero")).collect();

    let frame = Matrix::from_columns(4, &[n, b2, b3, mvec]);
    let frame_inv = inverse(&frame)?;
    let m1 = &(&frame_inv * &m) * &frame;
    let t = m1[(0, 1)].clone();
    let t_inv = t.inv().ok_or_else(|| RepError::NormalForm("zero translation".into()))?;
    let d = Matrix::diag(&[t_inv.clone(), S::one(), S::one(), t.clone()]);
    let d_inv = Matrix::diag(&[t, S::one(), S::one(), t_inv]);
    let mut g = &d * &frame_inv;
    let mut g_inv = &frame * &d_inv;
    let l2 = &(&g * &l) * &g_inv;
    if l2[(0, 2)].sign() < 0 {
        let r = Matrix::diag(&[S::one(), S::one(), -S::one(), S::one()]);
        g = &r * &g;
        g_inv = &g_inv * &r;
    }
    let m_final = &(&g * &m) * &g_inv;
    let l_final = &(&g * &l) * &g_inv;
    let u = l_final[(0, 1)].clone();
    let v = l_final[(0, 2)].clone();
    if !m_final.same(&parabolic(&S::one(), &S::zero())) {
        return Err(RepError::NormalForm("meridian did not reach N(1,0)".into()));
    }
    if !l_final.same(&parabolic(&u, &v)) {
        return Err(RepError::NormalForm("longitude did not reach N(u,v)".into()));
    }
    let shape = CuspShape::new(u, v)?;
    let rep2 = rep.conjugate(&g, &g_inv);
    Ok(NormalizedCusp { conjugator: g, conjugator_inverse: g_inv, rep: rep2, shape, signs: (sm, sl) })
}

//! The slice of peripheral representations of ℤ² = ⟨γ₁, γ₂⟩ parameterized by
//! s = (a, b, x₁, y₁, x₂, y₂), its tangent cocycles, the cusp-shape function, and
//! the generalized cusp models of type 0, 1 and 2.
//!
//! ρ_s(γᵢ) is exp of [[0,xᵢ,yᵢ,0],[0,a·xᵢ,0,xᵢ],[0,0,b·yᵢ,yᵢ],[0,0,0,0]], rescaled
//! to determinant 1. At a = b = 0 the matrices are the unipotent N(xᵢ, yᵢ) and all
//! arithmetic is exact; elsewhere only the f64 closed form is available.

mod models;

pub use models::{
    act, conjugator, cusp_group_element, cusp_model, cusp_models, CuspModel, CuspParams, Type0Model, Type1Model,
    Type2Model,
};

use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{coboundary_map, Cocycle};
use crate::lie::{unit, Module};
use crate::linalg::{span_rank, Matrix, RankPolicy};
use crate::numfield::ratio;
use crate::rep::{parabolic, Form, RepError, Representation};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SliceError {
    #[error("slice point violates y1*x2 - x1*y2 = ±1 (got {0})")]
    Determinant(f64),
    #[error("slice point has x1 + i*y1 and x2 + i*y2 linearly dependent")]
    Degenerate,
    #[error("operation requires a = b = 0")]
    NotUnipotent,
    #[error("{0} requires a nonzero parameter")]
    ZeroParameter(&'static str),
    #[error("point outside the affine chart of the domain: {0}")]
    OutsideChart(String),
    #[error("unknown cusp model {0:?}")]
    UnknownModel(String),
    #[error(transparent)]
    Rep(#[from] RepError),
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlicePoint<S> {
    pub a: S,
    pub b: S,
    pub x1: S,
    pub y1: S,
    pub x2: S,
    pub y2: S,
}

impl<S: Scalar> SlicePoint<S> {
    /// A point of the slice: y₁x₂ − x₁y₂ must be ±1.
    pub fn new(a: S, b: S, x1: S, y1: S, x2: S, y2: S) -> Result<Self, SliceError> {
        let s = SlicePoint { a, b, x1, y1, x2, y2 };
        let d = s.det();
        let one = S::one();
        if !((d.clone() - one.clone()).is_negligible(1e-12) || (d.clone() + one).is_negligible(1e-12)) {
            return Err(SliceError::Determinant(d.to_f64()));
        }
        Ok(s)
    }

    /// Same closed forms with any nonzero determinant, e.g. (0,0,1,0,u,v) for a
    /// cusp normalized to N(1,0), N(u,v).
    pub fn with_nonzero_det(a: S, b: S, x1: S, y1: S, x2: S, y2: S) -> Result<Self, SliceError> {
        let s = SlicePoint { a, b, x1, y1, x2, y2 };
        if s.det().is_negligible(1e-12) {
            return Err(SliceError::Degenerate);
        }
        Ok(s)
    }

    /// The unipotent point (0, 0, 1, 0, u, v) attached to a normalized cusp shape.
    pub fn normalized(u: S, v: S) -> Result<Self, SliceError> {
        Self::with_nonzero_det(S::zero(), S::zero(), S::one(), S::zero(), u, v)
    }

    pub fn det(&self) -> S {
        self.y1.clone() * self.x2.clone() - self.x1.clone() * self.y2.clone()
    }

    pub fn is_unipotent(&self) -> bool {
        self.a.is_zero() && self.b.is_zero()
    }

    /// (xᵢ, yᵢ) for γ₁ (i = 0) and γ₂ (i = 1).
    pub fn translation(&self, i: usize) -> (&S, &S) {
        if i == 0 {
            (&self.x1, &self.y1)
        } else {
            (&self.x2, &self.y2)
        }
    }

    pub fn to_f64(&self) -> SlicePoint<f64> {
        SlicePoint {
            a: self.a.to_f64(),
            b: self.b.to_f64(),
            x1: self.x1.to_f64(),
            y1: self.y1.to_f64(),
            x2: self.x2.to_f64(),
            y2: self.y2.to_f64(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SliceMode {
    ExactUnipotent,
    Float,
}

/// (eᶻ − 1)/z.
fn phi1(z: f64) -> f64 {
    if z == 0.0 {
        1.0
    } else {
        z.exp_m1() / z
    }
}

/// (eᶻ − 1 − z)/z².
fn phi2(z: f64) -> f64 {
    if z.abs() < 1e-2 {
        let mut term = 0.5;
        let mut sum = 0.5;
        for k in 3..10 {
            term *= z / k as f64;
            sum += term;
        }
        sum
    } else {
        (z.exp_m1() - z) / (z * z)
    }
}

/// N_{a,b}(x,y) = exp of the affine generator, before determinant normalization.
pub fn affine_element(a: f64, b: f64, x: f64, y: f64) -> Matrix<f64> {
    let (p, q) = (a * x, b * y);
    let mut m = Matrix::identity(4);
    m[(0, 1)] = x * phi1(p);
    m[(0, 2)] = y * phi1(q);
    m[(0, 3)] = x * x * phi2(p) + y * y * phi2(q);
    m[(1, 1)] = p.exp();
    m[(1, 3)] = x * phi1(p);
    m[(2, 2)] = q.exp();
    m[(2, 3)] = y * phi1(q);
    m
}

/// ϖ(N_{a,b}(x,y)) = e^{−(ax+by)/4}·N_{a,b}(x,y), of determinant 1.
pub fn slice_element(a: f64, b: f64, x: f64, y: f64) -> Matrix<f64> {
    affine_element(a, b, x, y).scale(&(-(a * x + b * y) / 4.0).exp())
}

/// Exact slice representation; requires a = b = 0.
pub fn slice_rep_exact<S: Scalar>(s: &SlicePoint<S>) -> Result<Representation<S>, SliceError> {
    if !s.is_unipotent() {
        return Err(SliceError::NotUnipotent);
    }
    Ok(Representation::torus(parabolic(&s.x1, &s.y1), parabolic(&s.x2, &s.y2), Form::SL4)?)
}

pub fn slice_rep_float(s: &SlicePoint<f64>) -> Representation<f64> {
    Representation::torus(slice_element(s.a, s.b, s.x1, s.y1), slice_element(s.a, s.b, s.x2, s.y2), Form::SL4)
        .expect("slice matrices are invertible")
}

pub fn slice_rep(s: &SlicePoint<f64>, mode: SliceMode) -> Result<Representation<f64>, SliceError> {
    match mode {
        SliceMode::ExactUnipotent => slice_rep_exact(s),
        SliceMode::Float => Ok(slice_rep_float(s)),
    }
}

/// Cusp shape (x₁ + iy₁)/(x₂ + iy₂) as (re, im); requires a = b = 0.
pub fn cs<S: Scalar>(s: &SlicePoint<S>) -> Result<(S, S), SliceError> {
    if !s.is_unipotent() {
        return Err(SliceError::NotUnipotent);
    }
    let den = s.x2.clone() * s.x2.clone() + s.y2.clone() * s.y2.clone();
    let re = s.x1.clone() * s.x2.clone() + s.y1.clone() * s.y2.clone();
    let im = s.det();
    let (re, im) = (re.div(&den), im.div(&den));
    match (re, im) {
        (Some(re), Some(im)) if !im.is_negligible(1e-300) => Ok((re, im)),
        _ => Err(SliceError::Degenerate),
    }
}

/// Value of ∂/∂a at a = b = 0 on a generator with translation x (∂/∂b: swap
/// coordinates 2 and 3 and use y).
fn da_value<S: Scalar>(x: &S, k: usize) -> Matrix<S> {
    let quarter = S::from_rational(&ratio(1, 4));
    let mut m = Matrix::diag(&[-S::one(), -S::one(), -S::one(), -S::one()]);
    m[(k, k)] = S::from_i64(3);
    let mut m = m.scale(&(x.clone() * quarter));
    let x2 = x.clone() * x.clone();
    let half_x2 = x2.clone() * S::from_rational(&ratio(1, 2));
    m[(0, k)] = half_x2.clone();
    m[(k, 3)] = -half_x2;
    m[(0, 3)] = -(x2 * x.clone() * S::from_rational(&ratio(1, 3)));
    m
}

/// ξ: derivative of N(x,y) in x (k = 1) or y (k = 2), times N(x,y)⁻¹.
fn xi<S: Scalar>(k: usize) -> Matrix<S> {
    &unit::<S>(0, k) + &unit::<S>(k, 3)
}

/// The six cocycles ∂/∂a, ∂/∂b, ∂/∂x₁, ∂/∂y₁, ∂/∂x₂, ∂/∂y₂ in Z¹(ℤ², 𝔤) at a point
/// with a = b = 0, each the derivative of ρ_s times ρ_s⁻¹.
pub fn tangent_cocycles<S: Scalar>(s: &SlicePoint<S>) -> Result<[Cocycle<S>; 6], SliceError> {
    if !s.is_unipotent() {
        return Err(SliceError::NotUnipotent);
    }
    let z = Matrix::<S>::zeros(4, 4);
    let c = |v0: Matrix<S>, v1: Matrix<S>| Cocycle { module: Module::G, values: vec![v0, v1] };
    Ok([
        c(da_value(&s.x1, 1), da_value(&s.x2, 1)),
        c(da_value(&s.y1, 2), da_value(&s.y2, 2)),
        c(xi(1), z.clone()),
        c(xi(2), z.clone()),
        c(z.clone(), xi(1)),
        c(z, xi(2)),
    ])
}

/// D_a = π_𝔳(∂/∂a), D_b = π_𝔳(∂/∂b). The derivatives in a and b are already
/// 𝔳-valued; their diagonal parts are xᵢ·diag(−1,3,−1,−1)/4 and yᵢ·diag(−1,−1,3,−1)/4.
pub fn projected_da_db<S: Scalar>(s: &SlicePoint<S>) -> Result<(Cocycle<S>, Cocycle<S>), SliceError> {
    let [da, db, ..] = tangent_cocycles(s)?;
    Ok((da.project(Module::V), db.project(Module::V)))
}

/// Dimension of the span of the tangent classes in H¹(ℤ², 𝔤) at a unipotent point.
pub fn tangent_image_dim<S: Scalar>(s: &SlicePoint<S>, policy: RankPolicy) -> Result<usize, SliceError> {
    let rep = slice_rep_exact(s)?;
    let tangents = tangent_cocycles(s)?;
    Ok(class_span_dim(&rep, &tangents, policy))
}

/// dim of span{[zᵢ]} in H¹ = rank(B¹ ∪ {zᵢ}) − rank(B¹).
pub fn class_span_dim<S: Scalar>(rep: &Representation<S>, zs: &[Cocycle<S>], policy: RankPolicy) -> usize {
    let Some(module) = zs.first().map(|z| z.module) else {
        return 0;
    };
    let bmap = coboundary_map(rep, module);
    let len = bmap.rows();
    let mut cols: Vec<Vec<S>> = (0..bmap.cols()).map(|j| bmap.col(j)).collect();
    let rb = span_rank(&cols, len, policy);
    cols.extend(zs.iter().map(|z| z.to_vector()));
    span_rank(&cols, len, policy) - rb
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum CuspType {
    Type0,
    Type1 {
        lambda: f64,
    },
    Type2 {
        lambda1: f64,
        lambda2: f64,
        /// λ₁λ₂ < 0: leaves are not strictly convex and the domain is not properly convex.
        convexity_warning: bool,
    },
}

impl CuspType {
    pub fn index(&self) -> usize {
        match self {
            CuspType::Type0 => 0,
            CuspType::Type1 { .. } => 1,
            CuspType::Type2 { .. } => 2,
        }
    }

    pub fn params(&self) -> CuspParams {
        match *self {
            CuspType::Type0 => CuspParams::default(),
            CuspType::Type1 { lambda } => CuspParams { lambda1: lambda, lambda2: 0.0 },
            CuspType::Type2 { lambda1, lambda2, .. } => CuspParams { lambda1, lambda2 },
        }
    }
}

/// Type from the pattern of zeros in (a, b). A Type1 with a = 0 is of type 1 after
/// swapping coordinates 2 and 3.
pub fn classify_slice_point<S: Scalar>(s: &SlicePoint<S>) -> CuspType {
    match (s.a.is_negligible(0.0), s.b.is_negligible(0.0)) {
        (true, true) => CuspType::Type0,
        (false, true) => CuspType::Type1 { lambda: s.a.to_f64() },
        (true, false) => CuspType::Type1 { lambda: s.b.to_f64() },
        (false, false) => {
            let convexity_warning = s.a.sign() * s.b.sign() < 0;
            if convexity_warning {
                log::warn!("slice point with ab < 0: type 2 normal form without strict convexity");
            }
            CuspType::Type2 { lambda1: s.a.to_f64(), lambda2: s.b.to_f64(), convexity_warning }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohomology::{fox_jacobian, is_coboundary};
    use crate::fpgroup::Presentation;
    use crate::lie::in_module;
    use crate::linalg::det;
    use crate::numfield::FieldElem;

    type Q = FieldElem;

    fn q(n: i64, d: i64) -> Q {
        Q::from_rational(ratio(n, d))
    }

    fn pt(x1: Q, y1: Q, x2: Q, y2: Q) -> SlicePoint<Q> {
        SlicePoint::new(Q::zero(), Q::zero(), x1, y1, x2, y2).unwrap()
    }

    /// Taylor series with scaling and squaring.
    fn expm(m: &Matrix<f64>) -> Matrix<f64> {
        let norm = m.entries().iter().map(|x| x.abs()).fold(0.0, f64::max) * 4.0;
        let k = if norm > 0.5 { (norm / 0.5).log2().ceil() as i32 } else { 0 };
        let a = m.scale(&0.5f64.powi(k));
        let mut sum = Matrix::identity(4);
        let mut term = Matrix::identity(4);
        for n in 1..30 {
            term = (&term * &a).scale(&(1.0 / n as f64));
            sum = &sum + &term;
        }
        for _ in 0..k {
            sum = &sum * &sum;
        }
        sum
    }

    fn generator(a: f64, b: f64, x: f64, y: f64) -> Matrix<f64> {
        Matrix::from_rows(vec![vec![0.0, x, y, 0.0], vec![0.0, a * x, 0.0, x], vec![0.0, 0.0, b * y, y], vec![0.0; 4]])
            .unwrap()
    }

    #[test]
    fn determinant_invariant() {
        assert!(SlicePoint::new(q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1), q(0, 1)).is_err());
        assert!(SlicePoint::new(q(0, 1), q(0, 1), q(1, 1), q(0, 1), q(0, 1), q(-1, 1)).is_ok());
        assert!(SlicePoint::new(q(0, 1), q(0, 1), q(2, 1), q(0, 1), q(0, 1), q(-1, 1)).is_err());
        assert!(SlicePoint::normalized(q(1, 3), q(2, 1)).is_ok());
    }

    #[test]
    fn exact_unipotent_rep() {
        let s = pt(q(1, 2), q(3, 1), q(1, 1), q(4, 1));
        let r = slice_rep_exact(&s).unwrap();
        let m = r.image(0);
        assert_eq!(m[(0, 3)], q(37, 8));
        assert_eq!(r.image(0) * r.image(1), r.image(1) * r.image(0));
        let sf = SlicePoint { a: 0.5, ..s.to_f64() };
        assert_eq!(slice_rep_exact(&sf).unwrap_err(), SliceError::NotUnipotent);
    }

    #[test]
    fn closed_form_matches_numeric_exponential() {
        for &(a, b, x, y) in
            &[(0.7, 0.0, 1.3, -0.4), (-1.1, 0.4, 0.5, 2.0), (1e-7, -3e-6, 2.0, 1.0), (2.0, 1.5, -1.2, 0.8)]
        {
            let g = generator(a, b, x, y);
            let shift = Matrix::identity(4).scale(&(-(a * x + b * y) / 4.0));
            let e = expm(&(&g + &shift));
            let c = slice_element(a, b, x, y);
            assert!(c.max_abs_diff(&e) < 1e-12, "({a},{b},{x},{y}): {}", c.max_abs_diff(&e));
            assert!((det(&c).unwrap() - 1.0).abs() < 1e-12);
        }
        let m = slice_element(0.3, 0.0, 1.0, 0.0);
        assert!((m[(1, 1)] - (0.3f64 * 3.0 / 4.0).exp()).abs() < 1e-15);
    }

    #[test]
    fn float_images_commute() {
        let s = SlicePoint::new(0.8, -0.3, 1.2, 0.5, 0.4, 1.0).unwrap();
        let r = slice_rep_float(&s);
        let (m, l) = (r.image(0), r.image(1));
        assert!((m * l).max_abs_diff(&(l * m)) < 1e-12);
    }

    #[test]
    fn cusp_shape_function() {
        let s = pt(q(1, 1), q(0, 1), q(0, 1), q(-1, 1));
        assert_eq!(cs(&s).unwrap(), (q(0, 1), q(1, 1)));
        let (e, f) = (0.7f64, 2.5f64);
        let s = SlicePoint::new(0.0, 0.0, e / f.sqrt(), f.sqrt(), 1.0 / f.sqrt(), 0.0).unwrap();
        let (re, im) = cs(&s).unwrap();
        assert!((re - e).abs() < 1e-14 && (im - f).abs() < 1e-14);
    }

    #[test]
    fn tangent_cocycles_satisfy_commutator_condition() {
        let s = pt(q(2, 1), q(1, 3), q(-1, 1), q(1, 3));
        let rep = slice_rep_exact(&s).unwrap();
        let jac = fox_jacobian(&Presentation::torus(), &rep, Module::G);
        for z in tangent_cocycles(&s).unwrap() {
            assert!(jac.mul_vec(&z.to_vector()).unwrap().iter().all(|x| x.is_zero()));
        }
    }

    #[test]
    fn tangent_cocycles_match_finite_differences() {
        let s = SlicePoint::new(0.0, 0.0, 1.25, -0.6, 0.5, 0.56).unwrap();
        let zs = tangent_cocycles(&s).unwrap();
        let h = 1e-6;
        let bump = |k: usize, t: f64| {
            let mut v = [s.a, s.b, s.x1, s.y1, s.x2, s.y2];
            v[k] += t;
            SlicePoint { a: v[0], b: v[1], x1: v[2], y1: v[3], x2: v[4], y2: v[5] }
        };
        let base = slice_rep_float(&s);
        for (k, z) in zs.iter().enumerate() {
            let (p, m) = (slice_rep_float(&bump(k, h)), slice_rep_float(&bump(k, -h)));
            for i in 0..2 {
                let d = (p.image(i) - m.image(i)).scale(&(0.5 / h));
                let fd = &d * base.inverse_image(i);
                assert!(fd.max_abs_diff(&z.values[i]) < 1e-8, "tangent {k} on γ{i}");
            }
        }
    }

    #[test]
    fn tangent_parts() {
        let s = pt(q(1, 1), q(0, 1), q(3, 1), q(-1, 1));
        let [da, db, dx1, dy1, dx2, dy2] = tangent_cocycles(&s).unwrap();
        assert!(dx1.values[1].is_zero());
        for z in [&da, &db] {
            assert!(z.values.iter().all(|v| in_module(Module::V, v)));
            assert!(z.project(Module::So31).values.iter().all(|v| v.is_zero()));
        }
        for z in [&dx1, &dy1, &dx2, &dy2] {
            assert!(z.project(Module::V).values.iter().all(|v| v.is_zero()));
        }
        let diag: Vec<Q> = (0..4).map(|i| da.values[0][(i, i)].clone()).collect();
        assert_eq!(diag, vec![q(-1, 4), q(3, 4), q(-1, 4), q(-1, 4)]);
        let diag: Vec<Q> = (0..4).map(|i| db.values[1][(i, i)].clone()).collect();
        assert_eq!(diag, vec![q(1, 4), q(1, 4), q(-3, 4), q(1, 4)]);
    }

    #[test]
    fn da_db_independent_and_image_is_four_dimensional() {
        let p = RankPolicy::default();
        for s in [pt(q(1, 1), q(0, 1), q(3, 1), q(-1, 1)), pt(q(2, 1), q(1, 3), q(-1, 1), q(1, 3))] {
            let rep = slice_rep_exact(&s).unwrap();
            let (da, db) = projected_da_db(&s).unwrap();
            assert_eq!(class_span_dim(&rep, &[da.clone(), db.clone()], p), 2);
            assert!(is_coboundary(&da.add(&db.scale(&q(5, 2))), &rep, p).is_none());
            assert_eq!(tangent_image_dim(&s, p).unwrap(), 4);
        }
    }

    #[test]
    fn classification() {
        let s = |a: f64, b: f64| SlicePoint::new(a, b, 1.0, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(classify_slice_point(&s(0.0, 0.0)), CuspType::Type0);
        assert_eq!(classify_slice_point(&s(2.0, 0.0)), CuspType::Type1 { lambda: 2.0 });
        assert_eq!(classify_slice_point(&s(0.0, -1.0)), CuspType::Type1 { lambda: -1.0 });
        assert_eq!(
            classify_slice_point(&s(2.0, 3.0)),
            CuspType::Type2 { lambda1: 2.0, lambda2: 3.0, convexity_warning: false }
        );
        assert!(matches!(classify_slice_point(&s(2.0, -3.0)), CuspType::Type2 { convexity_warning: true, .. }));
    }
}

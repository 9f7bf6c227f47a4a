//! The 𝔰𝔩(4) module structure: form J, involution σ, splitting 𝔤 = 𝔰𝔬(3,1) ⊕ 𝔳,
//! frozen ordered bases, the Killing pairing 4·tr(ab), and the adjoint action.
//!
//! Basis orderings (all coordinates in the crate use these):
//! - 𝔰𝔬(3,1): J·(E_ij − E_ji) for (i,j) = (1,2),(1,3),(1,4),(2,3),(2,4),(3,4); the
//!   coordinate of a is the (i,j) entry of J·a.
//! - 𝔳: the generic element
//!   `[[-(u5+u8)/2, u1, u2, u3], [u4, u5, u6, -u1], [u7, u6, u8, -u2], [u9, -u4, -u7, -(u5+u8)/2]]`
//!   with coordinates u1..u9.
//! - 𝔤: the 𝔰𝔬(3,1) basis followed by the 𝔳 basis.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{inverse, LinalgError, Matrix};
use crate::numfield::ratio;
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("matrix has nonzero trace")]
    NonzeroTrace,
    #[error("matrix is not 4x4")]
    NotFourByFour,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Coefficient module for cohomology.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Module {
    #[serde(rename = "g")]
    G,
    #[serde(rename = "so31")]
    So31,
    #[serde(rename = "v")]
    V,
}

impl Module {
    pub const ALL: [Module; 3] = [Module::G, Module::So31, Module::V];

    pub fn dim(self) -> usize {
        match self {
            Module::G => 15,
            Module::So31 => 6,
            Module::V => 9,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Module::G => "g",
            Module::So31 => "so31",
            Module::V => "v",
        }
    }
}

impl std::fmt::Display for Module {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

const SO31_PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

/// J with ⟨x,x⟩ = x₂² + x₃² − 2x₁x₄.
pub fn form_j<S: Scalar>() -> Matrix<S> {
    Matrix::from_i64_rows(&[&[0, 0, 0, -1], &[0, 1, 0, 0], &[0, 0, 1, 0], &[-1, 0, 0, 0]])
}

pub fn unit<S: Scalar>(i: usize, j: usize) -> Matrix<S> {
    Matrix::from_fn(4, 4, |r, c| if r == i && c == j { S::one() } else { S::zero() })
}

fn check4<S: Scalar>(a: &Matrix<S>) -> Result<(), LieError> {
    if a.rows() != 4 || a.cols() != 4 {
        return Err(LieError::NotFourByFour);
    }
    Ok(())
}

/// σ(a) = −J aᵀ J.
pub fn sigma<S: Scalar>(a: &Matrix<S>) -> Matrix<S> {
    let j = form_j::<S>();
    -&(&(&j * &a.transpose()) * &j)
}

/// (so_part, v_part) = ((a + σa)/2, (a − σa)/2).
pub fn split<S: Scalar>(a: &Matrix<S>) -> Result<(Matrix<S>, Matrix<S>), LieError> {
    check4(a)?;
    if !a.trace().is_zero() {
        return Err(LieError::NonzeroTrace);
    }
    Ok(split_unchecked(a))
}

fn split_unchecked<S: Scalar>(a: &Matrix<S>) -> (Matrix<S>, Matrix<S>) {
    let s = sigma(a);
    let half = S::from_rational(&ratio(1, 2));
    ((a + &s).scale(&half), (a - &s).scale(&half))
}

pub fn project<S: Scalar>(module: Module, a: &Matrix<S>) -> Matrix<S> {
    match module {
        Module::G => a.clone(),
        Module::So31 => split_unchecked(a).0,
        Module::V => split_unchecked(a).1,
    }
}

/// Killing pairing 4·tr(ab).
pub fn killing<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> S {
    S::from_i64(4) * (a * b).trace()
}

/// g a g⁻¹.
pub fn adjoint<S: Scalar>(g: &Matrix<S>, a: &Matrix<S>) -> Result<Matrix<S>, LieError> {
    let gi = inverse(g)?;
    Ok(&(g * a) * &gi)
}

/// Exact test AᵀJA = J.
pub fn in_so31<S: Scalar>(a: &Matrix<S>) -> bool {
    if a.rows() != 4 || a.cols() != 4 {
        return false;
    }
    let j = form_j::<S>();
    &(&a.transpose() * &j) * a == j
}

/// Entrywise size of AᵀJA − J, for float inputs.
pub fn so31_defect<S: Scalar>(a: &Matrix<S>) -> f64 {
    let j = form_j::<S>();
    (&(&a.transpose() * &j) * a).max_abs_diff(&j)
}

pub fn in_module<S: Scalar>(module: Module, a: &Matrix<S>) -> bool {
    if a.rows() != 4 || a.cols() != 4 {
        return false;
    }
    let scale = a.entries().iter().map(|x| x.to_f64().abs()).fold(1.0, f64::max);
    if !a.trace().is_negligible(crate::linalg::FLOAT_EQ_TOL * scale) {
        return false;
    }
    match module {
        Module::G => true,
        Module::So31 => sigma(a).same(a),
        Module::V => sigma(a).same(&-a),
    }
}

fn so31_basis<S: Scalar>() -> Vec<Matrix<S>> {
    let j = form_j::<S>();
    SO31_PAIRS.iter().map(|&(i, k)| &j * &(&unit::<S>(i, k) - &unit::<S>(k, i))).collect()
}

fn v_from_u<S: Scalar>(u: &[S]) -> Matrix<S> {
    let half = S::from_rational(&ratio(1, 2));
    let d = -(u[4].clone() + u[7].clone()) * half;
    let z = |x: &S| -x.clone();
    Matrix::from_rows(vec![
        vec![d.clone(), u[0].clone(), u[1].clone(), u[2].clone()],
        vec![u[3].clone(), u[4].clone(), u[5].clone(), z(&u[0])],
        vec![u[6].clone(), u[5].clone(), u[7].clone(), z(&u[1])],
        vec![u[8].clone(), z(&u[3]), z(&u[6]), d],
    ])
    .expect("4x4")
}

fn v_basis<S: Scalar>() -> Vec<Matrix<S>> {
    (0..9)
        .map(|k| {
            let u: Vec<S> = (0..9).map(|i| if i == k { S::one() } else { S::zero() }).collect();
            v_from_u(&u)
        })
        .collect()
}

pub fn basis<S: Scalar>(module: Module) -> Vec<Matrix<S>> {
    match module {
        Module::So31 => so31_basis(),
        Module::V => v_basis(),
        Module::G => so31_basis().into_iter().chain(v_basis()).collect(),
    }
}

fn so31_coords<S: Scalar>(a: &Matrix<S>) -> Vec<S> {
    let s = &form_j::<S>() * a;
    SO31_PAIRS.iter().map(|&(i, j)| s[(i, j)].clone()).collect()
}

fn v_coords<S: Scalar>(a: &Matrix<S>) -> Vec<S> {
    [(0, 1), (0, 2), (0, 3), (1, 0), (1, 1), (1, 2), (2, 0), (2, 2), (3, 0)]
        .iter()
        .map(|&(i, j)| a[(i, j)].clone())
        .collect()
}

/// Coordinates of a module element in the frozen basis. For 𝔤 the input must be traceless;
/// for the summands it must already lie in that summand.
pub fn coords<S: Scalar>(module: Module, a: &Matrix<S>) -> Vec<S> {
    match module {
        Module::So31 => so31_coords(a),
        Module::V => v_coords(a),
        Module::G => {
            let (s, v) = split_unchecked(a);
            let mut c = so31_coords(&s);
            c.extend(v_coords(&v));
            c
        }
    }
}

pub fn from_coords<S: Scalar>(module: Module, c: &[S]) -> Matrix<S> {
    assert_eq!(c.len(), module.dim(), "coordinate vector length");
    let j = form_j::<S>();
    let so = |c: &[S]| {
        let mut s = Matrix::<S>::zeros(4, 4);
        for (k, &(i, l)) in SO31_PAIRS.iter().enumerate() {
            s[(i, l)] = c[k].clone();
            s[(l, i)] = -c[k].clone();
        }
        &j * &s
    };
    match module {
        Module::So31 => so(c),
        Module::V => v_from_u(c),
        Module::G => &so(&c[..6]) + &v_from_u(&c[6..]),
    }
}

/// Matrix of a ↦ g a g⁻¹ on the module, given g and g⁻¹. Assumes g preserves the module
/// (always true for 𝔤; true for the summands when g ∈ O(3,1) up to scale).
pub fn ad_matrix<S: Scalar>(g: &Matrix<S>, g_inv: &Matrix<S>, module: Module) -> Matrix<S> {
    let cols: Vec<Vec<S>> = basis::<S>(module).iter().map(|b| coords(module, &(&(g * b) * g_inv))).collect();
    Matrix::from_columns(module.dim(), &cols)
}

//! Generalized cusp models: enlarged translation groups T_k, the codimension-one
//! subgroups T(λ) / T(λ₁,λ₂), the domains Ω_k and their horosphere foliations, all in
//! the affine chart [a:b:c:1].

use serde::Serialize;

use super::{CuspType, SliceError};
use crate::linalg::Matrix;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct CuspParams {
    pub lambda1: f64,
    pub lambda2: f64,
}

pub trait CuspModel: Send + Sync {
    fn name(&self) -> &'static str;

    /// M_k(x, y, z) = exp(m_k(x, y, z)).
    fn group_element(&self, x: f64, y: f64, z: f64) -> Matrix<f64>;

    /// Element of the codimension-one subgroup T(0), T(λ) or T(λ₁,λ₂) with
    /// translation coordinates (x, y).
    fn lattice_element(&self, p: CuspParams, x: f64, y: f64) -> Result<Matrix<f64>, SliceError>;

    fn omega_contains(&self, p: CuspParams, point: [f64; 3]) -> bool;

    /// The foliation parameter s of the leaf through the point.
    fn horosphere_value(&self, p: CuspParams, point: [f64; 3]) -> Result<f64, SliceError>;

    /// The point of the leaf s with free chart coordinates (t₁, t₂); for types 1
    /// and 2 the logarithmic coordinates enter as eᵗ.
    fn leaf_point(&self, p: CuspParams, s: f64, t1: f64, t2: f64) -> Result<[f64; 3], SliceError>;

    /// Conjugator taking N_{a,b} to this model's normal form.
    fn conjugator(&self, a: f64, b: f64) -> Result<Matrix<f64>, SliceError>;
}

pub struct Type0Model;
pub struct Type1Model;
pub struct Type2Model;

fn nonzero(x: f64, what: &'static str) -> Result<f64, SliceError> {
    if x == 0.0 || !x.is_finite() {
        Err(SliceError::ZeroParameter(what))
    } else {
        Ok(x)
    }
}

fn positive_log(x: f64, what: &str) -> Result<f64, SliceError> {
    if x > 0.0 {
        Ok(x.ln())
    } else {
        Err(SliceError::OutsideChart(format!("{what} = {x} must be positive")))
    }
}

fn rows(r: [[f64; 4]; 4]) -> Matrix<f64> {
    Matrix::from_rows(r.iter().map(|x| x.to_vec()).collect()).expect("4x4")
}

impl CuspModel for Type0Model {
    fn name(&self) -> &'static str {
        "type0"
    }

    fn group_element(&self, x: f64, y: f64, z: f64) -> Matrix<f64> {
        rows([[1.0, x, y, z + (x * x + y * y) / 2.0], [0.0, 1.0, 0.0, x], [0.0, 0.0, 1.0, y], [0.0, 0.0, 0.0, 1.0]])
    }

    fn lattice_element(&self, _: CuspParams, x: f64, y: f64) -> Result<Matrix<f64>, SliceError> {
        Ok(self.group_element(x, y, 0.0))
    }

    fn omega_contains(&self, _: CuspParams, [a, b, c]: [f64; 3]) -> bool {
        a > (b * b + c * c) / 2.0
    }

    fn horosphere_value(&self, _: CuspParams, [a, b, c]: [f64; 3]) -> Result<f64, SliceError> {
        Ok(a - (b * b + c * c) / 2.0)
    }

    fn leaf_point(&self, _: CuspParams, s: f64, t1: f64, t2: f64) -> Result<[f64; 3], SliceError> {
        Ok([(t1 * t1 + t2 * t2) / 2.0 + s, t1, t2])
    }

    fn conjugator(&self, _: f64, _: f64) -> Result<Matrix<f64>, SliceError> {
        Ok(Matrix::identity(4))
    }
}

impl CuspModel for Type1Model {
    fn name(&self) -> &'static str {
        "type1"
    }

    fn group_element(&self, x: f64, y: f64, z: f64) -> Matrix<f64> {
        rows([[x.exp(), 0.0, 0.0, 0.0], [0.0, 1.0, y, z + y * y / 2.0], [0.0, 0.0, 1.0, y], [0.0, 0.0, 0.0, 1.0]])
    }

    fn lattice_element(&self, p: CuspParams, x: f64, y: f64) -> Result<Matrix<f64>, SliceError> {
        let l = nonzero(p.lambda1, "type 1 subgroup T(λ)")?;
        Ok(self.group_element(l * x, y, -x / l))
    }

    fn omega_contains(&self, p: CuspParams, point: [f64; 3]) -> bool {
        point[0] > 0.0 && self.horosphere_value(p, point).is_ok_and(|s| s > 0.0)
    }

    fn horosphere_value(&self, p: CuspParams, [a, b, c]: [f64; 3]) -> Result<f64, SliceError> {
        let l = nonzero(p.lambda1, "type 1 foliation")?;
        Ok(b - c * c / 2.0 + positive_log(a, "a")? / (l * l))
    }

    fn leaf_point(&self, p: CuspParams, s: f64, t1: f64, t2: f64) -> Result<[f64; 3], SliceError> {
        let l = nonzero(p.lambda1, "type 1 foliation")?;
        Ok([t1.exp(), t2 * t2 / 2.0 - t1 / (l * l) + s, t2])
    }

    /// C̃_a = P₍₁₂₎·C_a.
    fn conjugator(&self, a: f64, _: f64) -> Result<Matrix<f64>, SliceError> {
        let a = nonzero(a, "type 1 conjugator")?;
        Ok(rows([[0.0, a, 0.0, 1.0], [1.0, -1.0 / a, 0.0, 0.0], [0.0, 0.0, 1.0, 0.0], [0.0, 0.0, 0.0, 1.0]]))
    }
}

impl CuspModel for Type2Model {
    fn name(&self) -> &'static str {
        "type2"
    }

    fn group_element(&self, x: f64, y: f64, z: f64) -> Matrix<f64> {
        rows([[x.exp(), 0.0, 0.0, 0.0], [0.0, y.exp(), 0.0, 0.0], [0.0, 0.0, 1.0, z], [0.0, 0.0, 0.0, 1.0]])
    }

    fn lattice_element(&self, p: CuspParams, x: f64, y: f64) -> Result<Matrix<f64>, SliceError> {
        let l1 = nonzero(p.lambda1, "type 2 subgroup T(λ₁,λ₂)")?;
        let l2 = nonzero(p.lambda2, "type 2 subgroup T(λ₁,λ₂)")?;
        Ok(self.group_element(l1 * x, l2 * y, -x / l1 - y / l2))
    }

    fn omega_contains(&self, p: CuspParams, point: [f64; 3]) -> bool {
        point[0] > 0.0 && point[1] > 0.0 && self.horosphere_value(p, point).is_ok_and(|s| s > 0.0)
    }

    fn horosphere_value(&self, p: CuspParams, [a, b, c]: [f64; 3]) -> Result<f64, SliceError> {
        let l1 = nonzero(p.lambda1, "type 2 foliation")?;
        let l2 = nonzero(p.lambda2, "type 2 foliation")?;
        Ok(c + positive_log(a, "a")? / (l1 * l1) + positive_log(b, "b")? / (l2 * l2))
    }

    fn leaf_point(&self, p: CuspParams, s: f64, t1: f64, t2: f64) -> Result<[f64; 3], SliceError> {
        let l1 = nonzero(p.lambda1, "type 2 foliation")?;
        let l2 = nonzero(p.lambda2, "type 2 foliation")?;
        Ok([t1.exp(), t2.exp(), s - t1 / (l1 * l1) - t2 / (l2 * l2)])
    }

    /// D̃_{a,b} = P₍₁₂₃₎·D_{a,b}, where P₍₁₂₃₎ moves row 2 to row 1, 3 to 2, 1 to 3.
    fn conjugator(&self, a: f64, b: f64) -> Result<Matrix<f64>, SliceError> {
        let a = nonzero(a, "type 2 conjugator")?;
        let b = nonzero(b, "type 2 conjugator")?;
        Ok(rows([[0.0, a, 0.0, 1.0], [0.0, 0.0, b, 1.0], [1.0, -1.0 / a, -1.0 / b, 0.0], [0.0, 0.0, 0.0, 1.0]]))
    }
}

/// All registered models, in type order.
pub fn cusp_models() -> Vec<Box<dyn CuspModel>> {
    vec![Box::new(Type0Model), Box::new(Type1Model), Box::new(Type2Model)]
}

pub fn cusp_model(name: &str) -> Result<Box<dyn CuspModel>, SliceError> {
    cusp_models().into_iter().find(|m| m.name() == name).ok_or_else(|| SliceError::UnknownModel(name.to_string()))
}

fn model_for(t: &CuspType) -> Box<dyn CuspModel> {
    cusp_models().swap_remove(t.index())
}

pub fn cusp_group_element(t: &CuspType, x: f64, y: f64, z: f64) -> Matrix<f64> {
    model_for(t).group_element(x, y, z)
}

/// Conjugator for the type: identity, C̃_a, or D̃_{a,b}.
pub fn conjugator(t: &CuspType, a: f64, b: f64) -> Result<Matrix<f64>, SliceError> {
    model_for(t).conjugator(a, b)
}

/// Projective action on the affine chart [a:b:c:1].
pub fn act(g: &Matrix<f64>, [a, b, c]: [f64; 3]) -> [f64; 3] {
    let v = g.mul_vec(&[a, b, c, 1.0]).expect("4x4");
    [v[0] / v[3], v[1] / v[3], v[2] / v[3]]
}

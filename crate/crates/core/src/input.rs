//! JSON manifold descriptions: field, presentation, holonomy (SO31 or SL2C) and an
//! optional symmetry block. Rationals are strings "p/q"; integers may be bare numbers.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use serde_json::Value;
use thiserror::Error;

use crate::diagnostics::Diagnostics;
use crate::fpgroup::{FpError, Presentation};
use crate::linalg::Matrix;
use crate::numfield::{parse_rational, rational_to_string, FieldElem, FieldError, NumberField, Rational};
use crate::rep::{lift_sl2c_to_so31, validate, ComplexPair, Form, RepError, Representation, Sl2, Sl2cRep};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum InputError {
    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unsupported schema version {0}")]
    Schema(u32),
    #[error("field: {0}")]
    Field(#[from] FieldError),
    #[error("presentation: {0}")]
    Presentation(#[from] FpError),
    #[error("holonomy: {0}")]
    Holonomy(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("representation fails validation: {0}")]
    Invalid(String),
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("unknown bundled example {0:?}")]
    UnknownBundle(String),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FieldSpec {
    pub min_poly: Vec<Value>,
    pub root_interval: [Value; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeripheralSpec {
    pub meridian: String,
    pub longitude: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PresentationSpec {
    pub generators: Vec<String>,
    pub relators: Vec<String>,
    pub peripherals: Vec<PeripheralSpec>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum HolonomyForm {
    SO31,
    SL2C,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HolonomySpec {
    pub form: HolonomyForm,
    /// SO31: 4×4 arrays of coefficient vectors; SL2C: 2×2 arrays of [re, im] coefficient vectors.
    pub matrices: BTreeMap<String, Value>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymmetrySpec {
    /// Action on the cusp's (meridian, longitude) basis; columns are images.
    pub peripheral_matrix: [[i64; 2]; 2],
    #[serde(default)]
    pub cusp: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub automorphism: Option<BTreeMap<String, String>>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModeOptions {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rank_tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub float: Option<bool>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ManifoldInput {
    pub schema: u32,
    #[serde(default)]
    pub name: String,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub provenance: String,
    pub field: FieldSpec,
    pub presentation: PresentationSpec,
    pub holonomy: HolonomySpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetrySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub options: Option<ModeOptions>,
}

/// A parsed and validated manifold.
#[derive(Debug, Clone)]
pub struct Manifold {
    pub name: String,
    pub provenance: String,
    pub field: Arc<NumberField>,
    pub presentation: Presentation,
    pub rep: Representation<FieldElem>,
    pub symmetry: Option<SymmetrySpec>,
    pub options: ModeOptions,
}

fn rational(v: &Value) -> Result<Rational, InputError> {
    match v {
        Value::String(s) => Ok(parse_rational(s)?),
        Value::Number(n) if n.is_i64() => Ok(Rational::from_integer(n.as_i64().expect("checked").into())),
        other => Err(InputError::Holonomy(format!("expected a rational string, got {other}"))),
    }
}

fn elem(field: &Arc<NumberField>, v: &Value) -> Result<FieldElem, InputError> {
    let coeffs = match v {
        Value::Array(items) => items.iter().map(rational).collect::<Result<Vec<_>, _>>()?,
        scalar => vec![rational(scalar)?],
    };
    if coeffs.len() > field.degree().max(1) {
        return Err(InputError::Holonomy(format!(
            "{} coefficients for a degree {} field",
            coeffs.len(),
            field.degree()
        )));
    }
    Ok(field.elem(&coeffs))
}

fn grid<'a>(v: &'a Value, n: usize, what: &str) -> Result<Vec<&'a Value>, InputError> {
    let rows = v
        .as_array()
        .filter(|r| r.len() == n)
        .ok_or_else(|| InputError::Holonomy(format!("{what}: expected {n} rows")))?;
    let mut out = Vec::with_capacity(n * n);
    for r in rows {
        let r = r
            .as_array()
            .filter(|r| r.len() == n)
            .ok_or_else(|| InputError::Holonomy(format!("{what}: expected {n} columns")))?;
        out.extend(r.iter());
    }
    Ok(out)
}

fn so31_matrix(field: &Arc<NumberField>, name: &str, v: &Value) -> Result<Matrix<FieldElem>, InputError> {
    let entries = grid(v, 4, name)?.into_iter().map(|e| elem(field, e)).collect::<Result<Vec<_>, _>>()?;
    Ok(Matrix::from_fn(4, 4, |i, j| entries[4 * i + j].clone()))
}

fn sl2_matrix(field: &Arc<NumberField>, name: &str, v: &Value) -> Result<Sl2, InputError> {
    let mut out = Vec::with_capacity(4);
    for e in grid(v, 2, name)? {
        let pair = e
            .as_array()
            .filter(|p| p.len() == 2)
            .ok_or_else(|| InputError::Holonomy(format!("{name}: entries are [re, im] pairs")))?;
        out.push(ComplexPair::new(elem(field, &pair[0])?, elem(field, &pair[1])?));
    }
    Ok(out.try_into().expect("four entries"))
}

impl ManifoldInput {
    pub fn parse(text: &str) -> Result<Self, InputError> {
        let input: ManifoldInput = serde_json::from_str(text)?;
        if input.schema != SCHEMA_VERSION {
            return Err(InputError::Schema(input.schema));
        }
        Ok(input)
    }

    pub fn build_field(&self) -> Result<Arc<NumberField>, InputError> {
        let poly = self.field.min_poly.iter().map(rational).collect::<Result<Vec<_>, _>>()?;
        let lo = rational(&self.field.root_interval[0])?;
        let hi = rational(&self.field.root_interval[1])?;
        Ok(Arc::new(NumberField::new(poly, lo, hi)?))
    }

    pub fn build_presentation(&self) -> Result<Presentation, InputError> {
        let p = &self.presentation;
        let gens: Vec<&str> = p.generators.iter().map(String::as_str).collect();
        let rels: Vec<&str> = p.relators.iter().map(String::as_str).collect();
        let per: Vec<(&str, &str)> =
            p.peripherals.iter().map(|q| (q.meridian.as_str(), q.longitude.as_str())).collect();
        Ok(Presentation::parse(&gens, &rels, &per)?)
    }

    fn image<'a>(&'a self, name: &str) -> Result<&'a Value, InputError> {
        self.holonomy.matrices.get(name).ok_or_else(|| RepError::MissingGenerator(name.to_string()).into())
    }

    /// SL2C holonomy as given, if that is the input form.
    pub fn build_sl2c(&self, field: &Arc<NumberField>) -> Result<Option<Sl2cRep>, InputError> {
        if self.holonomy.form != HolonomyForm::SL2C {
            return Ok(None);
        }
        let names = self.presentation.generators.clone();
        let mats = names.iter().map(|n| sl2_matrix(field, n, self.image(n)?)).collect::<Result<Vec<_>, _>>()?;
        Ok(Some(Sl2cRep::new(field.clone(), names, mats)?))
    }

    pub fn build_rep(&self, field: &Arc<NumberField>) -> Result<Representation<FieldElem>, InputError> {
        match self.build_sl2c(field)? {
            Some(r) => Ok(lift_sl2c_to_so31(&r)?),
            None => {
                let names = self.presentation.generators.clone();
                let mats =
                    names.iter().map(|n| so31_matrix(field, n, self.image(n)?)).collect::<Result<Vec<_>, _>>()?;
                Ok(Representation::new(names, mats, Form::SO31)?)
            }
        }
    }

    /// Parses everything and requires `validate` to pass.
    pub fn load(&self) -> Result<Manifold, InputError> {
        let (m, d) = self.assemble()?;
        if !d.passed() {
            let msg = d.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join(", ");
            return Err(InputError::Invalid(msg));
        }
        Ok(m)
    }

    /// Parses everything and returns the validation record without acting on it.
    pub fn assemble(&self) -> Result<(Manifold, Diagnostics), InputError> {
        let field = self.build_field()?;
        let presentation = self.build_presentation()?;
        let rep = self.build_rep(&field)?;
        let d = validate(&rep, &presentation);
        let m = Manifold {
            name: self.name.clone(),
            provenance: self.provenance.clone(),
            field,
            presentation,
            rep,
            symmetry: self.symmetry.clone(),
            options: self.options.clone().unwrap_or_default(),
        };
        Ok((m, d))
    }

    /// Reads a file, or a bundled example given as "bundled:NAME".
    pub fn read(path: &str) -> Result<Self, InputError> {
        if let Some(name) = path.strip_prefix("bundled:") {
            return Self::parse(bundled(name).ok_or_else(|| InputError::UnknownBundle(name.to_string()))?);
        }
        let text = std::fs::read_to_string(path).map_err(|source| InputError::Io { path: path.to_string(), source })?;
        Self::parse(&text)
    }
}

fn coeff_value(x: &FieldElem, degree: usize) -> Value {
    let mut c: Vec<Value> = x.coeffs().iter().map(|q| Value::String(rational_to_string(q))).collect();
    c.resize(degree.max(1), Value::String("0".into()));
    Value::Array(c)
}

impl Manifold {
    pub fn from_json(text: &str) -> Result<Self, InputError> {
        ManifoldInput::parse(text)?.load()
    }

    pub fn from_path(path: &str) -> Result<Self, InputError> {
        ManifoldInput::read(path)?.load()
    }

    /// The same manifold with its holonomy written as SO31 coefficient matrices.
    pub fn to_so31_input(&self) -> ManifoldInput {
        let q = |r: &Rational| Value::String(rational_to_string(r));
        let (lo, hi) = self.field.root_interval();
        let deg = self.field.degree();
        let matrices = self
            .rep
            .names()
            .iter()
            .zip(self.rep.images())
            .map(|(n, m)| {
                let rows = (0..4).map(|i| Value::Array((0..4).map(|j| coeff_value(&m[(i, j)], deg)).collect()));
                (n.clone(), Value::Array(rows.collect()))
            })
            .collect();
        let pres = &self.presentation;
        ManifoldInput {
            schema: SCHEMA_VERSION,
            name: self.name.clone(),
            provenance: self.provenance.clone(),
            field: FieldSpec { min_poly: self.field.min_poly().iter().map(q).collect(), root_interval: [q(lo), q(hi)] },
            presentation: PresentationSpec {
                generators: pres.generator_names().to_vec(),
                relators: pres.relators().iter().map(|r| pres.word_string(r)).collect(),
                peripherals: pres
                    .peripherals()
                    .iter()
                    .map(|p| PeripheralSpec {
                        meridian: pres.word_string(&p.meridian),
                        longitude: pres.word_string(&p.longitude),
                    })
                    .collect(),
            },
            holonomy: HolonomySpec { form: HolonomyForm::SO31, matrices },
            symmetry: self.symmetry.clone(),
            options: None,
        }
    }
}

pub const FIGURE_EIGHT: &str = include_str!("../data/figure_eight.json");
pub const KNOT_5_2: &str = include_str!("../data/knot_5_2.json");
pub const KNOT_6_3: &str = include_str!("../data/knot_6_3.json");

/// Bundled examples by name: "4_1", "5_2", "6_3".
pub fn bundled(name: &str) -> Option<&'static str> {
    match name {
        "4_1" | "figure_eight" | "figure-eight" => Some(FIGURE_EIGHT),
        "5_2" => Some(KNOT_5_2),
        "6_3" => Some(KNOT_6_3),
        _ => None,
    }
}

pub const BUNDLED_NAMES: [&str; 3] = ["4_1", "5_2", "6_3"];

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bundled_examples_load() {
        for n in BUNDLED_NAMES {
            let m = Manifold::from_json(bundled(n).unwrap()).unwrap();
            assert_eq!(m.name, n);
            assert_eq!(m.presentation.num_cusps(), 1);
        }
    }

    #[test]
    fn so31_round_trip() {
        let m = Manifold::from_json(FIGURE_EIGHT).unwrap();
        let text = serde_json::to_string(&m.to_so31_input()).unwrap();
        let back = Manifold::from_json(&text).unwrap();
        assert_eq!(back.rep.images(), m.rep.images());
        assert_eq!(back.symmetry, m.symmetry);
    }

    #[test]
    fn rejects_bad_inputs() {
        let mut v: Value = serde_json::from_str(FIGURE_EIGHT).unwrap();
        v["schema"] = 2.into();
        assert!(matches!(ManifoldInput::parse(&v.to_string()), Err(InputError::Schema(2))));
        let mut v: Value = serde_json::from_str(FIGURE_EIGHT).unwrap();
        v["holonomy"]["matrices"]["y"][0][0][0] = serde_json::json!(["2", "0"]);
        assert!(matches!(Manifold::from_json(&v.to_string()), Err(InputError::Rep(RepError::NotSl2(_)))));
        let mut v: Value = serde_json::from_str(FIGURE_EIGHT).unwrap();
        v["presentation"]["relators"][0] = "x y x^-1 y^-1".into();
        assert!(matches!(Manifold::from_json(&v.to_string()), Err(InputError::Invalid(_))));
        assert!(matches!(Manifold::from_path("bundled:7_4"), Err(InputError::UnknownBundle(_))));
    }
}

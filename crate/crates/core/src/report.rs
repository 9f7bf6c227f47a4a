//! End-to-end pipeline on a loaded manifold: validation, rigidity, per-cusp shapes
//! and slice coordinates, type verdicts, the decomposition check, and the symmetry
//! criterion. Runs in exact arithmetic or in f64.

use std::any::Any;
use std::fmt;

use serde::Serialize;

use crate::cohomology::{fox_jacobian, h1, restrict, rigidity_verdict, Cocycle, Dims, RigidityVerdict};
use crate::diagnostics::Diagnostics;
use crate::fpgroup::Presentation;
use crate::input::{Manifold, SymmetrySpec};
use crate::lie::Module;
use crate::linalg::{rank_with, Matrix, RankPolicy};
use crate::numfield::FieldElem;
use crate::pairing::{
    classify_coords, cusp_slice_coordinates, find_admissible_shear, generic_class, involution_pm_basis,
    phi_eigen_check, pm_words, reframe_peripheral, symmetry_matrix, translemma_check, type1_criterion, z_pm_cocycles,
    PairingError, TranslemmaReport, TypeVerdict,
};
use crate::rep::{cusp_shape_argument_ok, normalize_peripheral, parabolic, validate, CuspShape, Form, Representation};
use crate::scalar::Scalar;
use crate::slice::class_span_dim;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Float,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Exact => "exact",
            Mode::Float => "float",
        })
    }
}

/// How far the pipeline runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Check,
    Rigidity,
    SliceCoords,
    Classify,
    Full,
}

#[derive(Debug, Clone, Copy)]
pub struct Options {
    pub policy: RankPolicy,
    pub float: bool,
    pub stage: Stage,
}

impl Default for Options {
    fn default() -> Self {
        Options { policy: RankPolicy::default(), float: false, stage: Stage::Full }
    }
}

/// A scalar with its mode: exact values keep their field expression.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Number {
    pub mode: Mode,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<String>,
    pub value: f64,
}

impl Number {
    pub fn of<S: Scalar>(x: &S) -> Self {
        let exact = (x as &dyn Any).downcast_ref::<FieldElem>().map(|e| e.to_string());
        Number { mode: if S::EXACT { Mode::Exact } else { Mode::Float }, exact, value: x.to_f64() }
    }

    pub fn is_zero(&self) -> bool {
        match &self.exact {
            Some(e) => e == "0",
            None => self.value == 0.0,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(e) if e.contains('t') => write!(f, "{:.12} [{}]", self.value, e),
            Some(e) => f.write_str(e),
            None => write!(f, "{:.12} [{}]", self.value, self.mode),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ShapeReport {
    pub u: Number,
    pub v: Number,
    pub argument_ok: bool,
}

impl ShapeReport {
    fn of<S: Scalar>(s: &CuspShape<S>) -> Self {
        ShapeReport { u: Number::of(&s.u), v: Number::of(&s.v), argument_ok: cusp_shape_argument_ok(s) }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PeripheralDims {
    pub g: usize,
    pub so31: usize,
    pub v: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CuspReport {
    /// 1-based.
    pub index: usize,
    pub meridian: String,
    pub longitude: String,
    pub shape: ShapeReport,
    pub peripheral_h1: PeripheralDims,
    /// n of the longitude reframing l ↦ mⁿl used for the slice coordinates.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub shear: Option<i64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reframed_shape: Option<ShapeReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_a: Option<Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c_b: Option<Number>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub verdict: Option<TypeVerdict>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RigidityReport {
    pub mode: Mode,
    /// rank of the Fox Jacobian with 𝔳 coefficients.
    pub fox_rank_v: usize,
    pub verdict: RigidityVerdict,
}

impl RigidityReport {
    pub fn dims(&self, module: Module) -> Dims {
        self.verdict.dims.iter().find(|d| d.module == module).expect("all modules computed").dims
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TranslemmaEntry {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub result: Option<TranslemmaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub skipped: Option<String>,
    pub diagnostics: Diagnostics,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SymmetryReport {
    pub cusp: usize,
    pub peripheral_matrix: [[i64; 2]; 2],
    pub gamma_plus: String,
    pub gamma_minus: String,
    /// Shape in the (γ₋, γ₊) frame is purely imaginary.
    pub pure_imaginary: Option<bool>,
    /// φ*-eigenvector checks on the torus (witnesses found).
    pub eigen: Diagnostics,
    /// The restricted class spans the +1 eigenline [z₊].
    pub restriction_in_plus_line: Option<bool>,
    /// res to ⟨γ₊⟩ is nontrivial.
    pub type1_criterion: bool,
    pub type1_achievable: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub name: String,
    pub mode: Mode,
    pub validation: Diagnostics,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub rigidity: Option<RigidityReport>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub cusps: Vec<CuspReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub translemma: Option<TranslemmaEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symmetry: Option<SymmetryReport>,
    /// Float-mode ranks compared against exact mode.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mode_agreement: Option<Diagnostics>,
}

impl Report {
    /// False when a mathematical check failed (validation, decomposition, mode agreement).
    pub fn ok(&self) -> bool {
        self.validation.passed()
            && self.translemma.as_ref().is_none_or(|t| t.diagnostics.passed())
            && self.mode_agreement.as_ref().is_none_or(|d| d.passed())
    }
}

fn peripheral_dims<S: Scalar>(
    rep: &Representation<S>,
    pres: &Presentation,
    cusp: usize,
    policy: RankPolicy,
) -> Result<PeripheralDims, PairingError> {
    let torus = Presentation::torus();
    let prep = rep.peripheral(pres, cusp)?;
    let d = |m| h1(&torus, &prep, m, policy).map(|s| s.dims.h1);
    Ok(PeripheralDims { g: d(Module::G)?, so31: d(Module::So31)?, v: d(Module::V)? })
}

fn cusp_report<S: Scalar>(
    rep: &Representation<S>,
    pres: &Presentation,
    cusp: usize,
    class: Option<&Cocycle<S>>,
    policy: RankPolicy,
) -> Result<CuspReport, PairingError> {
    let p = &pres.peripherals()[cusp];
    let nc = normalize_peripheral(rep, pres, cusp)?;
    let mut out = CuspReport {
        index: cusp + 1,
        meridian: pres.word_string(&p.meridian),
        longitude: pres.word_string(&p.longitude),
        shape: ShapeReport::of(&nc.shape),
        peripheral_h1: peripheral_dims(rep, pres, cusp, policy)?,
        shear: None,
        reframed_shape: None,
        c_a: None,
        c_b: None,
        verdict: None,
        note: None,
    };
    let Some(z) = class else {
        return Ok(out);
    };
    let (n, framed) = find_admissible_shear(pres, rep, cusp)?;
    let cc = cusp_slice_coordinates(z, &framed, rep, cusp)?;
    if n != 0 {
        out.shear = Some(n);
        out.reframed_shape = Some(ShapeReport::of(&cc.shape));
    }
    out.verdict = Some(classify_coords(&cc.coords, policy.rel_tol));
    out.c_a = Some(Number::of(&cc.coords.c_a));
    out.c_b = Some(Number::of(&cc.coords.c_b));
    Ok(out)
}

fn symmetry_report<S: Scalar>(
    rep: &Representation<S>,
    pres: &Presentation,
    spec: &SymmetrySpec,
    class: &Cocycle<S>,
    rigid: bool,
    policy: RankPolicy,
) -> Result<SymmetryReport, PairingError> {
    let cusp = spec.cusp;
    let m = spec.peripheral_matrix;
    let (plus, minus) = involution_pm_basis(m)?;
    let (gp, gm) = pm_words(pres, cusp, m)?;
    let type1 = type1_criterion(rep, class, &gp, policy)?;
    let mut out = SymmetryReport {
        cusp: cusp + 1,
        peripheral_matrix: m,
        gamma_plus: pres.word_string(&gp),
        gamma_minus: pres.word_string(&gm),
        pure_imaginary: None,
        eigen: Diagnostics::default(),
        restriction_in_plus_line: None,
        type1_criterion: type1,
        type1_achievable: type1 && rigid && pres.num_cusps() == 1,
        note: None,
    };
    let framed = match reframe_peripheral(pres, cusp, [minus, plus]) {
        Ok(p) => p,
        Err(_) => {
            out.note = Some("γ₋, γ₊ do not generate the peripheral group; torus-level checks skipped".into());
            return Ok(out);
        }
    };
    let nc = normalize_peripheral(rep, &framed, cusp)?;
    let pure = nc.shape.u.is_negligible(policy.rel_tol);
    out.pure_imaginary = Some(pure);
    if !pure {
        out.note = Some("shape in the (γ₋, γ₊) frame is not purely imaginary".into());
        return Ok(out);
    }
    let c = nc.shape.v.clone();
    let torus = Representation::torus(parabolic(&S::one(), &S::zero()), parabolic(&S::zero(), &c), Form::SO31)?;
    let (zp, zm) = z_pm_cocycles(&nc.shape)?;
    let check = phi_eigen_check(&torus, &zp, &zm, &symmetry_matrix(&S::zero(), &S::zero()), policy)?;
    out.eigen = check.diagnostics;
    let zc = class.conjugate(&nc.conjugator, &nc.conjugator_inverse);
    let (_, r) = restrict(&zc, &nc.rep, &framed, cusp)?;
    let with_plus = class_span_dim(&torus, &[r.clone(), zp], policy);
    let alone = class_span_dim(&torus, &[r], policy);
    out.restriction_in_plus_line = Some(alone == 1 && with_plus == 1);
    Ok(out)
}

/// Runs the pipeline on one representation in the scalar type S.
pub fn analyze<S: Scalar>(
    name: &str,
    pres: &Presentation,
    rep: &Representation<S>,
    symmetry: Option<&SymmetrySpec>,
    opts: Options,
) -> Result<Report, PairingError> {
    let mode = if S::EXACT { Mode::Exact } else { Mode::Float };
    let validation = validate(rep, pres);
    let mut report = Report {
        name: name.to_string(),
        mode,
        validation,
        rigidity: None,
        cusps: Vec::new(),
        translemma: None,
        symmetry: None,
        mode_agreement: None,
    };
    if opts.stage == Stage::Check || !report.validation.passed() {
        return Ok(report);
    }
    let policy = opts.policy;
    let verdict = rigidity_verdict(pres, rep, policy)?;
    let fox_rank_v = rank_with(&fox_jacobian(pres, rep, Module::V), policy);
    let rigid = verdict.rigid;
    report.rigidity = Some(RigidityReport { mode, fox_rank_v, verdict });
    if opts.stage == Stage::Rigidity {
        return Ok(report);
    }

    let v_basis = h1(pres, rep, Module::V, policy)?.h1_basis;
    let class = if rigid { Some(generic_class(&v_basis, pres, rep, policy)?) } else { None };
    for cusp in 0..pres.num_cusps() {
        let mut c = cusp_report(rep, pres, cusp, class.as_ref(), policy)?;
        if class.is_none() {
            c.note = Some("not infinitesimally rigid: slice coordinates not computed".into());
        }
        report.cusps.push(c);
    }
    if opts.stage == Stage::SliceCoords {
        return Ok(report);
    }

    if let (Some(spec), Some(z)) = (symmetry, class.as_ref()) {
        report.symmetry = Some(symmetry_report(rep, pres, spec, z, rigid, policy)?);
    }
    if opts.stage == Stage::Classify {
        return Ok(report);
    }

    let so31 = h1(pres, rep, Module::So31, policy)?.h1_basis;
    report.translemma = Some(if !rigid {
        TranslemmaEntry {
            result: None,
            skipped: Some("requires infinitesimal rigidity".into()),
            diagnostics: Diagnostics::default(),
        }
    } else {
        match translemma_check(pres, rep, &so31, policy) {
            Ok(t) => TranslemmaEntry { diagnostics: t.diagnostics(), result: Some(t), skipped: None },
            Err(PairingError::Precondition(why)) => {
                TranslemmaEntry { result: None, skipped: Some(why), diagnostics: Diagnostics::default() }
            }
            Err(e) => return Err(e),
        }
    });
    Ok(report)
}

/// Every rank and dimension of the exact report reproduced by the float report.
pub fn compare_modes(exact: &Report, float: &Report) -> Diagnostics {
    let mut d = Diagnostics::default();
    let mut eq = |name: &str, a: String, b: String| {
        let ok = a == b;
        d.push(name, ok, if ok { a } else { format!("exact {a} vs float {b}") });
    };
    eq("validation", exact.validation.passed().to_string(), float.validation.passed().to_string());
    if let (Some(e), Some(f)) = (&exact.rigidity, &float.rigidity) {
        eq("fox rank (v)", e.fox_rank_v.to_string(), f.fox_rank_v.to_string());
        for m in Module::ALL {
            eq(&format!("H1 dims ({m})"), format!("{:?}", e.dims(m)), format!("{:?}", f.dims(m)));
        }
        eq("rigid", e.verdict.rigid.to_string(), f.verdict.rigid.to_string());
    }
    for (e, f) in exact.cusps.iter().zip(&float.cusps) {
        eq(
            &format!("cusp {} peripheral H1", e.index),
            format!("{:?}", e.peripheral_h1),
            format!("{:?}", f.peripheral_h1),
        );
        eq(&format!("cusp {} verdict", e.index), format!("{:?}", e.verdict), format!("{:?}", f.verdict));
    }
    if let (Some(e), Some(f)) = (&exact.translemma, &float.translemma) {
        eq("decomposition", format!("{:?}", e.result), format!("{:?}", f.result));
    }
    if let (Some(e), Some(f)) = (&exact.symmetry, &float.symmetry) {
        eq("type-1 criterion", e.type1_criterion.to_string(), f.type1_criterion.to_string());
    }
    d
}

/// Exact pipeline; with `opts.float` the float pipeline runs too and the returned
/// report is the float one, carrying the mode comparison.
pub fn run(m: &Manifold, opts: Options) -> Result<Report, PairingError> {
    let exact = analyze(&m.name, &m.presentation, &m.rep, m.symmetry.as_ref(), opts)?;
    if !opts.float {
        return Ok(exact);
    }
    let frep = m.rep.to_f64();
    let mut float = analyze(&m.name, &m.presentation, &frep, m.symmetry.as_ref(), opts)?;
    let cmp = compare_modes(&exact, &float);
    for c in cmp.failures() {
        log::error!("float mode disagrees with exact mode: {} ({})", c.name, c.detail);
    }
    float.mode_agreement = Some(cmp);
    Ok(float)
}

fn dims_line(d: &Dims) -> String {
    format!("Z1 = {}, B1 = {}, H1 = {}", d.z1, d.b1, d.h1)
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "manifold: {} ({} mode)", self.name, self.mode)?;
        writeln!(f, "validation:")?;
        for line in self.validation.to_string().lines() {
            writeln!(f, "  {line}")?;
        }
        if let Some(r) = &self.rigidity {
            let v = &r.verdict;
            writeln!(f, "rigidity: {}", if v.rigid { "RIGID" } else { "NOT RIGID" })?;
            writeln!(f, "  cusps: {}", v.cusps)?;
            writeln!(f, "  rank of Fox Jacobian over v: {}", r.fox_rank_v)?;
            for m in &v.dims {
                writeln!(f, "  {:<5} {}", m.module.name(), dims_line(&m.dims))?;
            }
            writeln!(f, "  fast path (dim H1(v) = cusps): {}", v.fast_path)?;
            writeln!(f, "  kernel of restriction: v {}, g {}", v.v_restriction_kernel, v.g_restriction_kernel)?;
        }
        for c in &self.cusps {
            writeln!(f, "cusp {}: meridian {}, longitude {}", c.index, c.meridian, c.longitude)?;
            writeln!(
                f,
                "  shape u = {}, v = {} (argument condition {})",
                c.shape.u,
                c.shape.v,
                ok_word(c.shape.argument_ok)
            )?;
            let p = &c.peripheral_h1;
            writeln!(f, "  peripheral H1 dims: g {}, so31 {}, v {}", p.g, p.so31, p.v)?;
            if let (Some(n), Some(s)) = (c.shear, &c.reframed_shape) {
                writeln!(f, "  reframed longitude m^{n} l: shape u = {}, v = {}", s.u, s.v)?;
            }
            if let (Some(a), Some(b)) = (&c.c_a, &c.c_b) {
                writeln!(f, "  slice coordinates: c_a = {a}")?;
                writeln!(f, "                     c_b = {b}")?;
            }
            if let Some(v) = c.verdict {
                writeln!(f, "  verdict: {v}")?;
            }
            if let Some(n) = &c.note {
                writeln!(f, "  note: {n}")?;
            }
        }
        if let Some(s) = &self.symmetry {
            writeln!(f, "symmetry on cusp {}: p-curve {}, m-curve {}", s.cusp, s.gamma_plus, s.gamma_minus)?;
            if let Some(p) = s.pure_imaginary {
                writeln!(f, "  shape purely imaginary in (m-curve, p-curve) frame: {p}")?;
            }
            for line in s.eigen.to_string().lines() {
                writeln!(f, "  {line}")?;
            }
            if let Some(p) = s.restriction_in_plus_line {
                writeln!(f, "  restricted class spans [z+]: {p}")?;
            }
            writeln!(f, "  restriction to p-curve nontrivial: {}", s.type1_criterion)?;
            writeln!(f, "  type-1 achievable (symmetry criterion): {}", s.type1_achievable)?;
            if let Some(n) = &s.note {
                writeln!(f, "  note: {n}")?;
            }
        }
        if let Some(t) = &self.translemma {
            match (&t.result, &t.skipped) {
                (Some(r), _) => {
                    writeln!(f, "decomposition of H1(boundary, g):")?;
                    writeln!(
                        f,
                        "  slice span {}, so31 image {}, intersection {}, total {}",
                        r.slice_span, r.so31_image, r.intersection, r.total
                    )?;
                    for line in t.diagnostics.to_string().lines() {
                        writeln!(f, "  {line}")?;
                    }
                }
                (None, Some(why)) => writeln!(f, "decomposition check skipped: {why}")?,
                (None, None) => {}
            }
        }
        if let Some(d) = &self.mode_agreement {
            writeln!(f, "float/exact agreement:")?;
            for line in d.to_string().lines() {
                writeln!(f, "  {line}")?;
            }
        }
        Ok(())
    }
}

fn ok_word(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "fails"
    }
}

/// Matrix entries as f64 rows, for emitting generators.
pub fn float_rows(m: &Matrix<f64>) -> Vec<Vec<f64>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

//! Slice coordinates of deformation classes via the Killing pairing against
//! invariant vectors, type verdicts, peripheral reframing, and the orientation-
//! reversing symmetry machinery behind the type-1 criterion.
//!
//! At a cusp normalized to m ↦ N(1,0), l ↦ N(u,v) the slice basis of H¹(ℤ², 𝔳) is
//! z_{γ₁} = 4·∂/∂a, z_{γ₂} = 4·∂/∂b at s = (0,0,1,0,u,v), so z_{γ₁}(γ₁) has diagonal
//! (−1, 3, −1, −1).

use serde::Serialize;
use thiserror::Error;

use crate::cohomology::{evaluate_cocycle, is_coboundary, restrict, Cocycle, CohomologyError};
use crate::diagnostics::Diagnostics;
use crate::fpgroup::{Peripheral, Presentation, Word};
use crate::lie::{in_module, killing, Module};
use crate::linalg::{inverse, span_rank, Matrix, RankPolicy};
use crate::rep::{cusp_shape_argument_ok, normalize_peripheral, parabolic, CuspShape, RepError, Representation};
use crate::scalar::Scalar;
use crate::slice::{projected_da_db, tangent_cocycles, SliceError, SlicePoint};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PairingError {
    #[error("invariant vector needs u^2 + v^2 != 0")]
    ZeroShape,
    #[error("vector is not invariant under the peripheral element")]
    NotInvariant,
    #[error("cusp {cusp}: shape fails the argument condition; reframe the peripheral pair")]
    Singular { cusp: usize },
    #[error("bad peripheral matrix: {0}")]
    BadMatrix(String),
    #[error("cusp shape is not purely imaginary")]
    NotPureImaginary,
    #[error("matrix does not intertwine the symmetry on the peripheral group")]
    NotIntertwining,
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error(transparent)]
    Cohomology(#[from] CohomologyError),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error(transparent)]
    Slice(#[from] SliceError),
}

/// δ_{u,v} ∈ 𝔳, fixed by N(u,v).
#[derive(Debug, Clone, PartialEq)]
pub struct InvariantVector<S> {
    pub u: S,
    pub v: S,
    pub matrix: Matrix<S>,
}

pub fn delta_invariant<S: Scalar>(u: &S, v: &S) -> Result<InvariantVector<S>, PairingError> {
    let n2 = u.clone() * u.clone() + v.clone() * v.clone();
    let inv = n2.inv().filter(|_| !n2.is_negligible(1e-300)).ok_or(PairingError::ZeroShape)?;
    let three = S::from_i64(3);
    let (uu, vv) = (u.clone() * u.clone(), v.clone() * v.clone());
    let mut m = Matrix::diag(&[-S::one(), S::zero(), S::zero(), -S::one()]);
    m[(1, 1)] = -((uu.clone() - three.clone() * vv.clone()) * inv.clone());
    m[(2, 2)] = (three * uu - vv) * inv.clone();
    let off = -(S::from_i64(4) * u.clone() * v.clone() * inv);
    m[(1, 2)] = off.clone();
    m[(2, 1)] = off;
    let g = parabolic(u, v);
    let g_inv = parabolic(&-u.clone(), &-v.clone());
    if !in_module(Module::V, &m) || !(&(&g * &m) * &g_inv).same(&m) {
        return Err(PairingError::NotInvariant);
    }
    Ok(InvariantVector { u: u.clone(), v: v.clone(), matrix: m })
}

/// ⟨[z], δ⟩ = 4·tr(z(γ)·δ) for a cocycle on ⟨γ⟩ with value z(γ) and ρ(γ) = image.
pub fn duality_pairing<S: Scalar>(value: &Matrix<S>, image: &Matrix<S>, delta: &Matrix<S>) -> Result<S, PairingError> {
    let image_inv = inverse(image).map_err(RepError::from)?;
    if !(&(image * delta) * &image_inv).same(delta) {
        return Err(PairingError::NotInvariant);
    }
    Ok(killing(value, delta))
}

/// M(u,v) with (d₁, d₂) = M·(c_a, c_b).
pub fn slice_coord_matrix<S: Scalar>(u: &S, v: &S) -> Result<Matrix<S>, PairingError> {
    let n2 = u.clone() * u.clone() + v.clone() * v.clone();
    let inv = n2.inv().filter(|_| !n2.is_negligible(1e-300)).ok_or(PairingError::ZeroShape)?;
    let three = S::from_i64(3);
    let (uu, vv) = (u.clone() * u.clone(), v.clone() * v.clone());
    let m21 = u.clone() * (uu.clone() - three.clone() * vv.clone()) * inv.clone();
    let m22 = v.clone() * (vv - three * uu) * inv;
    let m = Matrix::from_rows(vec![vec![S::one(), S::zero()], vec![m21, m22]]).expect("2x2");
    Ok(m.scale(&S::from_i64(-16)))
}

/// (z_{γ₁}, z_{γ₂}) for the torus representation N(1,0), N(u,v).
pub fn slice_basis<S: Scalar>(u: &S, v: &S) -> Result<(Cocycle<S>, Cocycle<S>), PairingError> {
    let s = SlicePoint::normalized(u.clone(), v.clone())?;
    let (da, db) = projected_da_db(&s)?;
    let four = S::from_i64(4);
    Ok((da.scale(&four), db.scale(&four)))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SliceCoords<S> {
    pub c_a: S,
    pub c_b: S,
}

impl<S: Scalar> SliceCoords<S> {
    pub fn to_f64(&self) -> SliceCoords<f64> {
        SliceCoords { c_a: self.c_a.to_f64(), c_b: self.c_b.to_f64() }
    }
}

/// Pairings (d₁, d₂) of a torus cocycle against δ_{1,0} on m and δ_{u,v} on l.
pub fn torus_pairings<S: Scalar>(z: &Cocycle<S>, u: &S, v: &S) -> Result<(S, S), PairingError> {
    let d10 = delta_invariant(&S::one(), &S::zero())?;
    let duv = delta_invariant(u, v)?;
    let d1 = duality_pairing(&z.values[0], &parabolic(&S::one(), &S::zero()), &d10.matrix)?;
    let d2 = duality_pairing(&z.values[1], &parabolic(u, v), &duv.matrix)?;
    Ok((d1, d2))
}

/// Slice coordinates of a cocycle on the torus group N(1,0), N(u,v).
pub fn torus_slice_coordinates<S: Scalar>(
    z: &Cocycle<S>,
    shape: &CuspShape<S>,
    cusp: usize,
) -> Result<SliceCoords<S>, PairingError> {
    if !cusp_shape_argument_ok(shape) {
        return Err(PairingError::Singular { cusp });
    }
    let (d1, d2) = torus_pairings(z, &shape.u, &shape.v)?;
    let m = slice_coord_matrix(&shape.u, &shape.v)?;
    let mi = inverse(&m).map_err(|_| PairingError::Singular { cusp })?;
    let c = mi.mul_vec(&[d1, d2]).expect("2x2");
    Ok(SliceCoords { c_a: c[0].clone(), c_b: c[1].clone() })
}

/// Per-cusp slice data for a 𝔳-valued cocycle on Γ.
#[derive(Debug, Clone)]
pub struct CuspCoords<S> {
    pub shape: CuspShape<S>,
    pub coords: SliceCoords<S>,
}

/// Restricts z to the cusp in its normalized frame and reads off (c_a, c_b).
pub fn cusp_slice_coordinates<S: Scalar>(
    z: &Cocycle<S>,
    pres: &Presentation,
    rep: &Representation<S>,
    cusp: usize,
) -> Result<CuspCoords<S>, PairingError> {
    let nc = normalize_peripheral(rep, pres, cusp)?;
    let zc = z.conjugate(&nc.conjugator, &nc.conjugator_inverse).project(Module::V);
    let (_, r) = restrict(&zc, &nc.rep, pres, cusp)?;
    let coords = torus_slice_coordinates(&r, &nc.shape, cusp)?;
    Ok(CuspCoords { shape: nc.shape, coords })
}

pub fn slice_coordinates<S: Scalar>(
    z: &Cocycle<S>,
    pres: &Presentation,
    rep: &Representation<S>,
) -> Result<Vec<CuspCoords<S>>, PairingError> {
    (0..pres.num_cusps()).map(|c| cusp_slice_coordinates(z, pres, rep, c)).collect()
}

/// m^p·l^q in the cusp's current peripheral words.
fn peripheral_word(p: &Peripheral, e: [i64; 2]) -> Word {
    p.meridian.pow(e[0]).mul(&p.longitude.pow(e[1]))
}

/// New meridian m^{U₀₀}l^{U₀₁}, new longitude m^{U₁₀}l^{U₁₁}.
pub fn reframe_peripheral(pres: &Presentation, cusp: usize, u: [[i64; 2]; 2]) -> Result<Presentation, PairingError> {
    let d = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    if d.abs() != 1 {
        return Err(PairingError::BadMatrix(format!("determinant {d}, expected ±1")));
    }
    let p = pres.peripherals().get(cusp).ok_or(RepError::NoSuchCusp(cusp))?;
    let q = Peripheral { meridian: peripheral_word(p, u[0]), longitude: peripheral_word(p, u[1]) };
    Ok(pres.with_peripheral(cusp, q))
}

/// Shears n = 0, 1, −1, …, ±5 in that order.
pub const SHEAR_RANGE: i64 = 5;

/// First shear [[1,0],[n,1]] whose reframed shape passes the argument condition.
pub fn find_admissible_shear<S: Scalar>(
    pres: &Presentation,
    rep: &Representation<S>,
    cusp: usize,
) -> Result<(i64, Presentation), PairingError> {
    let order = std::iter::once(0).chain((1..=SHEAR_RANGE).flat_map(|n| [n, -n]));
    for n in order {
        let p = reframe_peripheral(pres, cusp, [[1, 0], [n, 1]])?;
        let nc = normalize_peripheral(rep, &p, cusp)?;
        if cusp_shape_argument_ok(&nc.shape) {
            if n != 0 {
                log::info!("cusp {}: reframed longitude by meridian^{n}", cusp + 1);
            }
            return Ok((n, p));
        }
    }
    Err(PairingError::SearchExhausted(format!("no shear with |n| <= {SHEAR_RANGE} for cusp {}", cusp + 1)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum TypeVerdict {
    /// Both slice coordinates nonzero.
    #[serde(rename = "type-2-achievable")]
    Type2Achievable,
    /// Exactly one slice coordinate nonzero.
    #[serde(rename = "type-1-or-2-achievable")]
    Type1Or2Achievable,
    /// Both zero: stays type 0 to first order.
    NoConclusion,
}

impl std::fmt::Display for TypeVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            TypeVerdict::Type2Achievable => "type-2 achievable",
            TypeVerdict::Type1Or2Achievable => "type-1-or-2 achievable",
            TypeVerdict::NoConclusion => "no conclusion (remains type 0 to first order)",
        })
    }
}

pub fn classify_coords<S: Scalar>(c: &SliceCoords<S>, tol: f64) -> TypeVerdict {
    match (c.c_a.is_negligible(tol), c.c_b.is_negligible(tol)) {
        (false, false) => TypeVerdict::Type2Achievable,
        (true, true) => TypeVerdict::NoConclusion,
        _ => TypeVerdict::Type1Or2Achievable,
    }
}

pub fn classify_types<S: Scalar>(coords: &[SliceCoords<S>], tol: f64) -> Vec<TypeVerdict> {
    coords.iter().map(|c| classify_coords(c, tol)).collect()
}

fn primitive(v: [i64; 2]) -> [i64; 2] {
    let g = num_integer::gcd(v[0], v[1]);
    let s = if v[0] < 0 || (v[0] == 0 && v[1] < 0) { -1 } else { 1 };
    [s * v[0] / g, s * v[1] / g]
}

/// Primitive integer (+1, −1)-eigenvectors (γ₊, γ₋) of an orientation-reversing
/// involution, first nonzero entry positive.
pub fn involution_pm_basis(m: [[i64; 2]; 2]) -> Result<([i64; 2], [i64; 2]), PairingError> {
    let d = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if d != -1 {
        return Err(PairingError::BadMatrix(format!("determinant {d}, expected -1")));
    }
    let sq = [
        [m[0][0] * m[0][0] + m[0][1] * m[1][0], m[0][0] * m[0][1] + m[0][1] * m[1][1]],
        [m[1][0] * m[0][0] + m[1][1] * m[1][0], m[1][0] * m[0][1] + m[1][1] * m[1][1]],
    ];
    if sq != [[1, 0], [0, 1]] {
        return Err(PairingError::BadMatrix("matrix is not an involution".into()));
    }
    // Nonzero columns of M ± I are ±1-eigenvectors.
    let col = |s: i64| -> [i64; 2] {
        let c0 = [m[0][0] + s, m[1][0]];
        if c0 != [0, 0] {
            c0
        } else {
            [m[0][1], m[1][1] + s]
        }
    };
    Ok((primitive(col(1)), primitive(col(-1))))
}

/// Peripheral words for (γ₊, γ₋) from an integer basis in (meridian, longitude)
/// coordinates.
pub fn pm_words(pres: &Presentation, cusp: usize, m: [[i64; 2]; 2]) -> Result<(Word, Word), PairingError> {
    let (plus, minus) = involution_pm_basis(m)?;
    let p = pres.peripherals().get(cusp).ok_or(RepError::NoSuchCusp(cusp))?;
    Ok((peripheral_word(p, plus), peripheral_word(p, minus)))
}

/// z₊, z₋ on the torus group (γ₋, γ₊) ↦ (N(1,0), N(0,c)): z₊(γ₋) = 0, z₊(γ₊) = δ_{1,0};
/// z₋(γ₊) = 0, z₋(γ₋) = δ_{0,1}.
pub fn z_pm_cocycles<S: Scalar>(shape: &CuspShape<S>) -> Result<(Cocycle<S>, Cocycle<S>), PairingError> {
    if !shape.u.is_negligible(1e-12) {
        return Err(PairingError::NotPureImaginary);
    }
    let a_plus = delta_invariant(&S::one(), &S::zero())?.matrix;
    let a_minus = delta_invariant(&S::zero(), &S::one())?.matrix;
    let z = Matrix::zeros(4, 4);
    Ok((
        Cocycle { module: Module::V, values: vec![z.clone(), a_plus] },
        Cocycle { module: Module::V, values: vec![a_minus, z] },
    ))
}

/// φ*(z)(γ) = A⁻¹·z(φ(γ))·A with φ(γ₋) = γ₋⁻¹, φ(γ₊) = γ₊.
pub fn phi_pullback<S: Scalar>(
    z: &Cocycle<S>,
    rep: &Representation<S>,
    a: &Matrix<S>,
    a_inv: &Matrix<S>,
) -> Cocycle<S> {
    let minus_inv = evaluate_cocycle(z, rep, &Word::power_of(0, -1));
    let values = [minus_inv, z.values[1].clone()].iter().map(|v| &(a_inv * v) * a).collect();
    Cocycle { module: z.module, values }
}

/// Witnesses for φ*(z₊) − z₊ and φ*(z₋) + z₋ being coboundaries.
#[derive(Debug, Clone)]
pub struct EigenCheck<S> {
    pub plus_witness: Option<Matrix<S>>,
    pub minus_witness: Option<Matrix<S>>,
    pub diagnostics: Diagnostics,
}

/// Verifies {[z₊], [z₋]} are ±1-eigenvectors of φ* for the torus representation
/// (γ₋, γ₊) and a matrix A with A·ρ(γ)·A⁻¹ = ρ(φ(γ)).
pub fn phi_eigen_check<S: Scalar>(
    rep: &Representation<S>,
    z_plus: &Cocycle<S>,
    z_minus: &Cocycle<S>,
    a: &Matrix<S>,
    policy: RankPolicy,
) -> Result<EigenCheck<S>, PairingError> {
    let a_inv = inverse(a).map_err(RepError::from)?;
    let conj = |g: &Matrix<S>| &(a * g) * &a_inv;
    if !conj(rep.image(0)).same(rep.inverse_image(0)) || !conj(rep.image(1)).same(rep.image(1)) {
        return Err(PairingError::NotIntertwining);
    }
    let mut d = Diagnostics::default();
    let plus = phi_pullback(z_plus, rep, a, &a_inv).add(&z_plus.scale(&-S::one()));
    let minus = phi_pullback(z_minus, rep, a, &a_inv).add(z_minus);
    let plus_witness = is_coboundary(&plus, rep, policy);
    let minus_witness = is_coboundary(&minus, rep, policy);
    d.push("phi*(z+) - z+ is a coboundary", plus_witness.is_some(), "");
    d.push("phi*(z-) + z- is a coboundary", minus_witness.is_some(), "");
    Ok(EigenCheck { plus_witness, minus_witness, diagnostics: d })
}

/// The symmetric conjugator N(x,y)·diag(1,−1,1,1).
pub fn symmetry_matrix<S: Scalar>(x: &S, y: &S) -> Matrix<S> {
    let r = Matrix::diag(&[S::one(), -S::one(), S::one(), S::one()]);
    &parabolic(x, y) * &r
}

/// True iff the restriction of z to ⟨γ₊⟩ is not a coboundary.
pub fn type1_criterion<S: Scalar>(
    rep: &Representation<S>,
    z: &Cocycle<S>,
    gamma_plus: &Word,
    policy: RankPolicy,
) -> Result<bool, PairingError> {
    let g = rep.evaluate_word(gamma_plus);
    let cyclic = Representation::new(vec!["p".into()], vec![g], rep.form())?;
    let value = evaluate_cocycle(z, rep, gamma_plus);
    Ok(is_coboundary(&Cocycle { module: z.module, values: vec![value] }, &cyclic, policy).is_none())
}

fn restricts_nontrivially<S: Scalar>(
    z: &Cocycle<S>,
    pres: &Presentation,
    rep: &Representation<S>,
    policy: RankPolicy,
) -> Result<bool, PairingError> {
    for cusp in 0..pres.num_cusps() {
        let (prep, r) = restrict(z, rep, pres, cusp)?;
        if is_coboundary(&r, &prep, policy).is_some() {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Coefficient vectors in {−2,…,2}ᵏ by increasing max-norm, lexicographic within.
fn coefficient_vectors(k: usize) -> Vec<Vec<i64>> {
    let mut out = Vec::new();
    for r in 1..=2i64 {
        let mut v = vec![-r; k];
        loop {
            if v.iter().any(|x| x.abs() == r) {
                out.push(v.clone());
            }
            let mut i = k;
            loop {
                if i == 0 {
                    break;
                }
                i -= 1;
                if v[i] < r {
                    v[i] += 1;
                    break;
                }
                v[i] = -r;
            }
            if v.iter().all(|&x| x == -r) {
                break;
            }
        }
    }
    // Prefer nonnegative combinations: all-positive first within each norm.
    out.sort_by_key(|v| {
        (
            v.iter().map(|x| x.abs()).max(),
            v.iter().filter(|&&x| x < 0).count(),
            v.iter().map(|x| -x).collect::<Vec<_>>(),
        )
    });
    out
}

/// A combination of the basis whose restriction to every cusp is nontrivial.
pub fn generic_class<S: Scalar>(
    basis: &[Cocycle<S>],
    pres: &Presentation,
    rep: &Representation<S>,
    policy: RankPolicy,
) -> Result<Cocycle<S>, PairingError> {
    if basis.is_empty() {
        return Err(PairingError::Precondition("empty H^1 basis".into()));
    }
    if basis.len() == 1 && restricts_nontrivially(&basis[0], pres, rep, policy)? {
        return Ok(basis[0].clone());
    }
    for c in coefficient_vectors(basis.len()) {
        let z = basis.iter().zip(&c).fold(Cocycle::zero(basis[0].module, pres.num_generators()), |acc, (b, &x)| {
            acc.add(&b.scale(&S::from_i64(x)))
        });
        if restricts_nontrivially(&z, pres, rep, policy)? {
            return Ok(z);
        }
    }
    Err(PairingError::SearchExhausted("no combination restricts nontrivially to every cusp".into()))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TranslemmaReport {
    pub cusps: usize,
    /// dim V_Σ, expected 4k.
    pub slice_span: usize,
    /// dim res_*(H¹(Γ, 𝔰𝔬(3,1))), expected 2k.
    pub so31_image: usize,
    pub intersection: usize,
    /// dim(V_Σ + res_*), expected 6k = dim H¹(Δ, 𝔤).
    pub total: usize,
}

impl TranslemmaReport {
    pub fn diagnostics(&self) -> Diagnostics {
        let k = self.cusps;
        let mut d = Diagnostics::default();
        d.push("slice span = 4k", self.slice_span == 4 * k, format!("{} vs {}", self.slice_span, 4 * k));
        d.push("so31 image = 2k", self.so31_image == 2 * k, format!("{} vs {}", self.so31_image, 2 * k));
        d.push("intersection = 0", self.intersection == 0, self.intersection.to_string());
        d.push("total = 6k", self.total == 6 * k, format!("{} vs {}", self.total, 6 * k));
        d
    }
}

/// Decomposes H¹(Δ, 𝔤) into the slice tangent span and the restriction of
/// H¹(Γ, 𝔰𝔬(3,1)), each cusp in its normalized frame.
pub fn translemma_check<S: Scalar>(
    pres: &Presentation,
    rep: &Representation<S>,
    so31_h1: &[Cocycle<S>],
    policy: RankPolicy,
) -> Result<TranslemmaReport, PairingError> {
    let k = pres.num_cusps();
    let block = 2 * Module::G.dim();
    let len = block * k;
    let mut b_cols = Vec::new();
    let mut v_cols = Vec::new();
    let mut r_cols: Vec<Vec<S>> = vec![Vec::with_capacity(len); so31_h1.len()];
    let place = |cusp: usize, v: Vec<S>| -> Vec<S> {
        let mut col = vec![S::zero(); len];
        for (i, x) in v.into_iter().enumerate() {
            col[cusp * block + i] = x;
        }
        col
    };
    for cusp in 0..k {
        let nc = normalize_peripheral(rep, pres, cusp)
            .map_err(|e| PairingError::Precondition(format!("cusp {} does not normalize: {e}", cusp + 1)))?;
        let s = SlicePoint::normalized(nc.shape.u.clone(), nc.shape.v.clone())?;
        let torus = crate::slice::slice_rep_exact(&s)?;
        let bmap = crate::cohomology::coboundary_map(&torus, Module::G);
        b_cols.extend((0..bmap.cols()).map(|j| place(cusp, bmap.col(j))));
        v_cols.extend(tangent_cocycles(&s)?.iter().map(|z| place(cusp, z.to_vector())));
        for (j, z) in so31_h1.iter().enumerate() {
            let zc = z.conjugate(&nc.conjugator, &nc.conjugator_inverse).with_module(Module::G);
            let (_, r) = restrict(&zc, &nc.rep, pres, cusp)?;
            r_cols[j].extend(r.to_vector());
        }
    }
    let rank = |extra: &[&Vec<Vec<S>>]| {
        let mut cols = b_cols.clone();
        for e in extra {
            cols.extend(e.iter().cloned());
        }
        span_rank(&cols, len, policy)
    };
    let rb = rank(&[]);
    let slice_span = rank(&[&v_cols]) - rb;
    let so31_image = rank(&[&r_cols]) - rb;
    let total = rank(&[&v_cols, &r_cols]) - rb;
    Ok(TranslemmaReport { cusps: k, slice_span, so31_image, intersection: slice_span + so31_image - total, total })
}

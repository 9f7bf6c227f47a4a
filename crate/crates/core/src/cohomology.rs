//! Twisted cohomology Z¹/B¹/H¹ of a finitely presented group with coefficients in 𝔤,
//! 𝔰𝔬(3,1) or 𝔳 (action Ad∘ρ), restriction to peripheral subgroups, and the
//! infinitesimal rigidity verdict.
//!
//! A cocycle is stored by its values on generators. Its coordinate vector concatenates
//! the module coordinates of those values in generator order.

use serde::Serialize;
use thiserror::Error;

use crate::fpgroup::{fox_derivative, GroupRingElem, Presentation, Word};
use crate::lie::{ad_matrix, coords, from_coords, in_module, Module};
use crate::linalg::{echelon, kernel_basis_with, rank_with, solve_with, Matrix, RankPolicy};
use crate::rep::{validate, RepError, Representation};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CohomologyError {
    #[error("representation fails validation: {0}")]
    InvalidRep(String),
    #[error(transparent)]
    Rep(#[from] RepError),
    #[error("presentation has no cusps")]
    NoCusps,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cocycle<S> {
    pub module: Module,
    /// Values on generators, in generator order.
    pub values: Vec<Matrix<S>>,
}

impl<S: Scalar> Cocycle<S> {
    pub fn zero(module: Module, ngens: usize) -> Self {
        Cocycle { module, values: vec![Matrix::zeros(4, 4); ngens] }
    }

    pub fn to_vector(&self) -> Vec<S> {
        self.values.iter().flat_map(|v| coords(self.module, v)).collect()
    }

    pub fn from_vector(module: Module, v: &[S]) -> Self {
        let d = module.dim();
        assert_eq!(v.len() % d, 0, "cocycle vector length");
        Cocycle { module, values: v.chunks(d).map(|c| from_coords(module, c)).collect() }
    }

    pub fn scale(&self, s: &S) -> Self {
        Cocycle { module: self.module, values: self.values.iter().map(|v| v.scale(s)).collect() }
    }

    pub fn add(&self, other: &Cocycle<S>) -> Self {
        Cocycle { module: self.module, values: self.values.iter().zip(&other.values).map(|(a, b)| a + b).collect() }
    }

    /// The cocycle g·z·g⁻¹ for the conjugated representation g·ρ·g⁻¹.
    pub fn conjugate(&self, g: &Matrix<S>, g_inv: &Matrix<S>) -> Self {
        Cocycle { module: self.module, values: self.values.iter().map(|v| &(g * v) * g_inv).collect() }
    }

    /// Componentwise projection to a summand (𝔰𝔬(3,1) or 𝔳) of a 𝔤-valued cocycle.
    pub fn project(&self, module: Module) -> Self {
        Cocycle { module, values: self.values.iter().map(|v| crate::lie::project(module, v)).collect() }
    }

    /// Reinterprets the values as elements of a larger module (e.g. 𝔳 ⊂ 𝔤).
    pub fn with_module(&self, module: Module) -> Self {
        Cocycle { module, values: self.values.clone() }
    }

    pub fn values_in_module(&self) -> bool {
        self.values.iter().all(|v| in_module(self.module, v))
    }

    pub fn to_f64(&self) -> Cocycle<f64> {
        Cocycle { module: self.module, values: self.values.iter().map(|v| v.to_f64()).collect() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Dims {
    pub z1: usize,
    pub b1: usize,
    pub h1: usize,
}

#[derive(Debug, Clone)]
pub struct CohomologySummary<S> {
    pub module: Module,
    pub dims: Dims,
    pub h1_basis: Vec<Cocycle<S>>,
    pub z1_basis: Vec<Cocycle<S>>,
    pub b1_basis: Vec<Cocycle<S>>,
}

/// Σ cᵢ·Ad(ρ(wᵢ)) on the module, in the frozen basis.
pub fn groupring_operator<S: Scalar>(rep: &Representation<S>, module: Module, e: &GroupRingElem) -> Matrix<S> {
    let d = module.dim();
    let mut out = Matrix::zeros(d, d);
    for (w, c) in e.terms() {
        let g = rep.evaluate_word(w);
        let gi = rep.evaluate_word(&w.inverse());
        let ad = ad_matrix(&g, &gi, module);
        out = &out + &ad.scale(&S::from_i64(c));
    }
    out
}

/// One block row per relator, one block column per generator; block = ∂r/∂g acting on the module.
pub fn fox_jacobian<S: Scalar>(pres: &Presentation, rep: &Representation<S>, module: Module) -> Matrix<S> {
    let d = module.dim();
    let ng = pres.num_generators();
    let mut out = Matrix::zeros(d * pres.relators().len(), d * ng);
    for (i, r) in pres.relators().iter().enumerate() {
        for g in 0..ng {
            let block = groupring_operator(rep, module, &fox_derivative(r, g));
            out.set_block(i * d, g * d, &block);
        }
    }
    out
}

/// Matrix of a ↦ (a − Ad(ρ(gᵢ))a)ᵢ.
pub fn coboundary_map<S: Scalar>(rep: &Representation<S>, module: Module) -> Matrix<S> {
    let d = module.dim();
    let id = Matrix::<S>::identity(d);
    let blocks: Vec<Matrix<S>> =
        (0..rep.names().len()).map(|g| &id - &ad_matrix(rep.image(g), rep.inverse_image(g), module)).collect();
    Matrix::vstack(&blocks)
}

/// The coboundary γ ↦ a − γ·a.
pub fn coboundary<S: Scalar>(rep: &Representation<S>, module: Module, a: &Matrix<S>) -> Cocycle<S> {
    Cocycle {
        module,
        values: (0..rep.names().len()).map(|g| a - &(&(rep.image(g) * a) * rep.inverse_image(g))).collect(),
    }
}

fn check_valid<S: Scalar>(pres: &Presentation, rep: &Representation<S>) -> Result<(), CohomologyError> {
    let d = validate(rep, pres);
    if d.passed() {
        Ok(())
    } else {
        let msg = d.failures().map(|c| c.name.clone()).collect::<Vec<_>>().join(", ");
        Err(CohomologyError::InvalidRep(msg))
    }
}

pub fn z1_basis<S: Scalar>(
    pres: &Presentation,
    rep: &Representation<S>,
    module: Module,
    policy: RankPolicy,
) -> Result<Vec<Cocycle<S>>, CohomologyError> {
    check_valid(pres, rep)?;
    let jac = fox_jacobian(pres, rep, module);
    Ok(kernel_basis_with(&jac, policy).iter().map(|v| Cocycle::from_vector(module, v)).collect())
}

/// Independent coboundaries: images of the basis elements at the pivot columns of the coboundary map.
pub fn b1_basis<S: Scalar>(rep: &Representation<S>, module: Module, policy: RankPolicy) -> Vec<Cocycle<S>> {
    let bmap = coboundary_map(rep, module);
    let e = echelon(&bmap, policy);
    e.pivots.iter().map(|&j| Cocycle::from_vector(module, &bmap.col(j))).collect()
}

pub fn h1<S: Scalar>(
    pres: &Presentation,
    rep: &Representation<S>,
    module: Module,
    policy: RankPolicy,
) -> Result<CohomologySummary<S>, CohomologyError> {
    let z = z1_basis(pres, rep, module, policy)?;
    let b = b1_basis(rep, module, policy);
    let len = module.dim() * pres.num_generators();
    let mut cols: Vec<Vec<S>> = b.iter().map(|c| c.to_vector()).collect();
    cols.extend(z.iter().map(|c| c.to_vector()));
    let h_basis = if cols.is_empty() {
        Vec::new()
    } else {
        let e = echelon(&Matrix::from_columns(len, &cols), policy);
        e.pivots.iter().filter(|&&j| j >= b.len()).map(|&j| z[j - b.len()].clone()).collect()
    };
    let dims = Dims { z1: z.len(), b1: b.len(), h1: z.len().saturating_sub(b.len()) };
    Ok(CohomologySummary { module, dims, h1_basis: h_basis, z1_basis: z, b1_basis: b })
}

/// Extends z to a word via z(uv) = z(u) + u·z(v), z(u⁻¹) = −u⁻¹·z(u).
pub fn evaluate_cocycle<S: Scalar>(z: &Cocycle<S>, rep: &Representation<S>, w: &Word) -> Matrix<S> {
    let mut acc = Matrix::zeros(4, 4);
    let mut prefix = Matrix::<S>::identity(4);
    let mut prefix_inv = Matrix::<S>::identity(4);
    for (g, e) in w.letters() {
        if e > 0 {
            acc = &acc + &(&(&prefix * &z.values[g]) * &prefix_inv);
            prefix = &prefix * rep.image(g);
            prefix_inv = rep.inverse_image(g) * &prefix_inv;
        } else {
            prefix = &prefix * rep.inverse_image(g);
            prefix_inv = rep.image(g) * &prefix_inv;
            acc = &acc - &(&(&prefix * &z.values[g]) * &prefix_inv);
        }
    }
    acc
}

/// Restriction to the cusp's torus group ⟨m, l⟩; returns the torus representation too.
pub fn restrict<S: Scalar>(
    z: &Cocycle<S>,
    rep: &Representation<S>,
    pres: &Presentation,
    cusp: usize,
) -> Result<(Representation<S>, Cocycle<S>), CohomologyError> {
    let p = pres.peripherals().get(cusp).ok_or(RepError::NoSuchCusp(cusp))?;
    let values = vec![evaluate_cocycle(z, rep, &p.meridian), evaluate_cocycle(z, rep, &p.longitude)];
    Ok((rep.peripheral(pres, cusp)?, Cocycle { module: z.module, values }))
}

/// Solves z(gᵢ) = a − Ad(ρ(gᵢ))a for a in the module; returns a witness if one exists.
pub fn is_coboundary<S: Scalar>(z: &Cocycle<S>, rep: &Representation<S>, policy: RankPolicy) -> Option<Matrix<S>> {
    let bmap = coboundary_map(rep, z.module);
    let sol = solve_with(&bmap, &z.to_vector(), policy).expect("consistent dimensions")?;
    Some(from_coords(z.module, &sol))
}

/// Dimension of the kernel of c ↦ Σ cⱼ[res(zⱼ)] into ⊕ᵢ H¹(Δᵢ) for the given cocycles.
pub fn restriction_kernel_dim<S: Scalar>(
    zs: &[Cocycle<S>],
    rep: &Representation<S>,
    pres: &Presentation,
    policy: RankPolicy,
) -> Result<usize, CohomologyError> {
    if zs.is_empty() {
        return Ok(0);
    }
    let module = zs[0].module;
    let d2 = 2 * module.dim();
    let k = pres.num_cusps();
    let len = d2 * k;
    let mut b_cols: Vec<Vec<S>> = Vec::new();
    let mut r_cols: Vec<Vec<S>> = vec![Vec::with_capacity(len); zs.len()];
    for cusp in 0..k {
        let prep = rep.peripheral(pres, cusp)?;
        for b in b1_basis(&prep, module, policy) {
            let mut col = vec![S::zero(); len];
            for (i, x) in b.to_vector().into_iter().enumerate() {
                col[cusp * d2 + i] = x;
            }
            b_cols.push(col);
        }
        for (j, z) in zs.iter().enumerate() {
            let (_, r) = restrict(z, rep, pres, cusp)?;
            r_cols[j].extend(r.to_vector());
        }
    }
    let rb = if b_cols.is_empty() { 0 } else { rank_with(&Matrix::from_columns(len, &b_cols), policy) };
    let mut all = b_cols;
    all.extend(r_cols);
    let rall = rank_with(&Matrix::from_columns(len, &all), policy);
    Ok(zs.len() - (rall - rb))
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ModuleDims {
    pub module: Module,
    pub dims: Dims,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct RigidityVerdict {
    pub cusps: usize,
    pub dims: Vec<ModuleDims>,
    /// dim H¹(Γ,𝔳) = k.
    pub fast_path: bool,
    /// dim ker(res: H¹(Γ,𝔳) → ⊕ H¹(Δᵢ,𝔳)).
    pub v_restriction_kernel: usize,
    /// dim ker(res: H¹(Γ,𝔤) → ⊕ H¹(Δᵢ,𝔤)), the defining condition.
    pub g_restriction_kernel: usize,
    pub rigid: bool,
}

pub fn rigidity_verdict<S: Scalar>(
    pres: &Presentation,
    rep: &Representation<S>,
    policy: RankPolicy,
) -> Result<RigidityVerdict, CohomologyError> {
    let k = pres.num_cusps();
    if k == 0 {
        return Err(CohomologyError::NoCusps);
    }
    let mut dims = Vec::new();
    let mut v_kernel = 0;
    let mut g_kernel = 0;
    let mut h1v = 0;
    for module in Module::ALL {
        let s = h1(pres, rep, module, policy)?;
        match module {
            Module::V => {
                h1v = s.dims.h1;
                v_kernel = restriction_kernel_dim(&s.h1_basis, rep, pres, policy)?;
            }
            Module::G => g_kernel = restriction_kernel_dim(&s.h1_basis, rep, pres, policy)?,
            Module::So31 => {}
        }
        dims.push(ModuleDims { module, dims: s.dims });
    }
    let fast_path = h1v == k;
    let rigid = fast_path || v_kernel == 0;
    Ok(RigidityVerdict {
        cusps: k,
        dims,
        fast_path,
        v_restriction_kernel: v_kernel,
        g_restriction_kernel: g_kernel,
        rigid,
    })
}

//! Randomized invariant suites shared by the `properties` and `acceptance` targets.
//! Exact over ℚ except the eigenvalue-symmetry suite.

#![allow(dead_code)]

use cuspforge::cohomology::{coboundary, evaluate_cocycle, fox_jacobian, z1_basis, Cocycle};
use cuspforge::fpgroup::{fox_derivative, GroupRingElem, Presentation, Word};
use cuspforge::lie::{form_j, from_coords, in_module, killing, project, sigma, Module};
use cuspforge::linalg::{inverse, Matrix, RankPolicy};
use cuspforge::numfield::ratio;
use cuspforge::pairing::{classify_coords, slice_basis, torus_pairings, torus_slice_coordinates};
use cuspforge::rep::{cusp_shape_argument_ok, parabolic, CuspShape, Form, Representation};
use cuspforge::slice::slice_element;
use cuspforge::{FieldElem, Scalar};
use proptest::prelude::*;
use proptest::test_runner::{Config, TestCaseError, TestRunner};

type Q = FieldElem;

pub fn runner(cases: u32) -> TestRunner {
    TestRunner::new(Config { cases, failure_persistence: None, ..Config::default() })
}

fn q(n: i64, d: i64) -> Q {
    Q::from_rational(ratio(n, d))
}

fn small_q() -> impl Strategy<Value = Q> {
    (-12i64..=12, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

fn nonzero_q() -> impl Strategy<Value = Q> {
    small_q().prop_filter("nonzero", |x| !x.is_zero())
}

fn positive_q() -> impl Strategy<Value = Q> {
    (1i64..=12, 1i64..=5).prop_map(|(n, d)| q(n, d))
}

fn word(ngens: usize, max_len: usize) -> impl Strategy<Value = Word> {
    prop::collection::vec((0..ngens, prop_oneof![Just(-1i64), Just(1i64), Just(2i64), Just(-2i64)]), 0..max_len)
        .prop_map(Word::from_syllables)
}

fn coords(module: Module) -> impl Strategy<Value = Vec<Q>> {
    prop::collection::vec(small_q(), module.dim())
}

/// A rational element of SO(3,1): N(p,q)·J N(r,s) J·diag(t,1,1,1/t).
fn so31_element() -> impl Strategy<Value = Matrix<Q>> {
    (small_q(), small_q(), small_q(), small_q(), positive_q()).prop_map(|(p, qq, r, s, t)| {
        let j = form_j::<Q>();
        let lower = &(&j * &parabolic(&r, &s)) * &j;
        let d = Matrix::diag(&[t.clone(), Q::one(), Q::one(), t.inv().expect("t > 0")]);
        &(&parabolic(&p, &qq) * &lower) * &d
    })
}

/// g·(N(p₁,q₁), N(p₂,q₂))·g⁻¹ on the torus group.
fn torus_rep() -> impl Strategy<Value = Representation<Q>> {
    (small_q(), small_q(), small_q(), small_q(), so31_element()).prop_map(|(a, b, c, d, g)| {
        let gi = inverse(&g).expect("invertible");
        let conj = |m: Matrix<Q>| &(&g * &m) * &gi;
        Representation::torus(conj(parabolic(&a, &b)), conj(parabolic(&c, &d)), Form::SO31).expect("valid torus")
    })
}

fn normal_torus(u: &Q, v: &Q) -> Representation<Q> {
    Representation::torus(parabolic(&Q::one(), &Q::zero()), parabolic(u, v), Form::SO31).expect("valid torus")
}

fn combination(basis: &[Cocycle<Q>], coeffs: &[i64], module: Module) -> Cocycle<Q> {
    basis.iter().zip(coeffs).fold(Cocycle::zero(module, 2), |acc, (b, &c)| acc.add(&b.scale(&Q::from_i64(c))))
}

fn bracket(a: &Matrix<Q>, b: &Matrix<Q>) -> Matrix<Q> {
    &(a * b) - &(b * a)
}

fn all_zero(v: &[Q]) -> bool {
    v.iter().all(|x| x.is_zero())
}

pub fn fox_axioms(r: &mut TestRunner) -> Result<(), TestCaseError> {
    r.run(&(word(3, 6), word(3, 6), 0usize..3), |(u, v, g)| {
        let lhs = fox_derivative(&u.mul(&v), g);
        let rhs = fox_derivative(&u, g).add(&fox_derivative(&v, g).left_mul_word(&u));
        prop_assert_eq!(lhs, rhs);
        let inv = fox_derivative(&u.inverse(), g);
        prop_assert_eq!(inv, fox_derivative(&u, g).left_mul_word(&u.inverse()).neg());
        // Σ_g ∂w/∂g·(g − 1) = w − 1
        let w = u.mul(&v);
        let sum = (0..3).fold(GroupRingElem::zero(), |acc, h| {
            let hm1 = GroupRingElem::from_word(Word::gen(h), 1).sub(&GroupRingElem::one());
            acc.add(&fox_derivative(&w, h).mul(&hm1))
        });
        prop_assert_eq!(sum, GroupRingElem::from_word(w, 1).sub(&GroupRingElem::one()));
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn cocycle_closure(r: &mut TestRunner) -> Result<(), TestCaseError> {
    let strat = (torus_rep(), prop::collection::vec(-3i64..=3, 30), word(2, 5), word(2, 5));
    r.run(&strat, |(rep, c, u, v)| {
        let pres = Presentation::torus();
        let basis = z1_basis(&pres, &rep, Module::G, RankPolicy::default()).unwrap();
        let z = combination(&basis, &c[..basis.len()], Module::G);
        prop_assert!(all_zero(&fox_jacobian(&pres, &rep, Module::G).mul_vec(&z.to_vector()).unwrap()));
        prop_assert!(evaluate_cocycle(&z, &rep, &pres.relators()[0]).is_zero());
        let zu = evaluate_cocycle(&z, &rep, &u);
        let zv = evaluate_cocycle(&z, &rep, &v);
        let expected = &zu + &(&(&rep.evaluate_word(&u) * &zv) * &rep.evaluate_word(&u.inverse()));
        prop_assert_eq!(evaluate_cocycle(&z, &rep, &u.mul(&v)), expected);
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn coboundary_kernel(r: &mut TestRunner) -> Result<(), TestCaseError> {
    r.run(&(torus_rep(), coords(Module::G), 0usize..3), |(rep, a, m)| {
        let module = Module::ALL[m];
        let b = coboundary(&rep, module, &project(module, &from_coords(Module::G, &a)));
        let jac = fox_jacobian(&Presentation::torus(), &rep, module);
        prop_assert!(all_zero(&jac.mul_vec(&b.to_vector()).unwrap()));
        prop_assert!(b.values_in_module());
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn sigma_involution(r: &mut TestRunner) -> Result<(), TestCaseError> {
    r.run(&(coords(Module::G), coords(Module::G)), |(a, b)| {
        let (a, b) = (from_coords(Module::G, &a), from_coords(Module::G, &b));
        prop_assert_eq!(sigma(&sigma(&a)), a.clone());
        prop_assert_eq!(sigma(&bracket(&a, &b)), bracket(&sigma(&a), &sigma(&b)));
        let (s, v) = (project(Module::So31, &a), project(Module::V, &a));
        prop_assert!(in_module(Module::So31, &s) && in_module(Module::V, &v));
        prop_assert_eq!(&s + &v, a);
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn killing_orthogonality(r: &mut TestRunner) -> Result<(), TestCaseError> {
    r.run(&(coords(Module::G), coords(Module::G)), |(a, b)| {
        let s = project(Module::So31, &from_coords(Module::G, &a));
        let v = project(Module::V, &from_coords(Module::G, &b));
        prop_assert!(killing(&s, &v).is_zero());
        prop_assert!(in_module(Module::V, &bracket(&s, &v)));
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn pairing_coboundary_insensitive(r: &mut TestRunner) -> Result<(), TestCaseError> {
    let strat = (small_q(), positive_q(), prop::collection::vec(-3i64..=3, 10), coords(Module::V));
    r.run(&strat, |(u, v, c, x)| {
        let rep = normal_torus(&u, &v);
        let basis = z1_basis(&Presentation::torus(), &rep, Module::V, RankPolicy::default()).unwrap();
        let z = combination(&basis, &c[..basis.len()], Module::V);
        let b = coboundary(&rep, Module::V, &from_coords(Module::V, &x));
        prop_assert_eq!(torus_pairings(&z, &u, &v).unwrap(), torus_pairings(&z.add(&b), &u, &v).unwrap());
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub fn slice_round_trip(r: &mut TestRunner) -> Result<(), TestCaseError> {
    let strat = (small_q(), positive_q(), small_q(), small_q(), coords(Module::V), nonzero_q());
    r.run(&strat, |(u, v, ca, cb, x, scale)| {
        let shape = CuspShape::new(u.clone(), v.clone()).unwrap();
        prop_assume!(cusp_shape_argument_ok(&shape));
        let rep = normal_torus(&u, &v);
        let (za, zb) = slice_basis(&u, &v).unwrap();
        let z = za.scale(&ca).add(&zb.scale(&cb)).add(&coboundary(&rep, Module::V, &from_coords(Module::V, &x)));
        let c = torus_slice_coordinates(&z, &shape, 0).unwrap();
        prop_assert_eq!((&c.c_a, &c.c_b), (&ca, &cb));
        let cs = torus_slice_coordinates(&z.scale(&scale), &shape, 0).unwrap();
        prop_assert_eq!(&cs.c_a, &(ca * scale.clone()));
        prop_assert_eq!(&cs.c_b, &(cb * scale));
        prop_assert_eq!(classify_coords(&c, 0.0), classify_coords(&cs, 0.0));
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

/// ρ_s(γ) is upper triangular; its spectrum is the diagonal.
fn spectrum_symmetric(m: &Matrix<f64>) -> bool {
    let mut d: Vec<f64> = (0..4).map(|i| m[(i, i)]).collect();
    d.sort_by(f64::total_cmp);
    let mut inv: Vec<f64> = d.iter().map(|x| 1.0 / x).collect();
    inv.sort_by(f64::total_cmp);
    d.iter().zip(&inv).all(|(a, b)| (a - b).abs() < 1e-12 * a.abs().max(1.0))
}

/// Float. Near s₀ = (0,0,1/c,0,0,c) the γ₁ spectrum is symmetric iff a = 0 and the
/// γ₂ spectrum iff b = 0.
pub fn eigenvalue_symmetry(r: &mut TestRunner) -> Result<(), TestCaseError> {
    let side = || prop_oneof![-2.0f64..-0.05, 0.05f64..2.0];
    r.run(&(0.5f64..6.0, -0.05f64..0.05, side(), side()), |(c, e, a, b)| {
        let (x1, y2) = (1.0 / c + e, c);
        prop_assert!(spectrum_symmetric(&slice_element(0.0, b, x1, 0.0)));
        prop_assert!(spectrum_symmetric(&slice_element(a, 0.0, 0.0, y2)));
        prop_assert!(!spectrum_symmetric(&slice_element(a, 0.0, x1, 0.0)));
        prop_assert!(!spectrum_symmetric(&slice_element(0.0, b, 0.0, y2)));
        prop_assert!(!spectrum_symmetric(&slice_element(a, b, x1, 0.0)));
        prop_assert!(!spectrum_symmetric(&slice_element(a, b, 0.0, y2)));
        Ok(())
    })
    .map_err(|e| TestCaseError::fail(e.to_string()))
}

pub type Suite = fn(&mut TestRunner) -> Result<(), TestCaseError>;

/// The suites listed by the property acceptance criterion.
pub const REQUIRED: [(&str, Suite); 7] = [
    ("Fox axioms", fox_axioms),
    ("cocycle closure", cocycle_closure),
    ("coboundary-kernel containment", coboundary_kernel),
    ("sigma involution", sigma_involution),
    ("Killing orthogonality", killing_orthogonality),
    ("pairing coboundary-insensitivity", pairing_coboundary_insensitive),
    ("slice-coordinate round trip", slice_round_trip),
];

//! Acceptance criteria. Prints one PASS/FAIL line per criterion and exits nonzero
//! if any fails. Tolerances are fixed below.

mod common;

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use cuspforge::cohomology::{coboundary, coboundary_map, h1, restrict, Cocycle};
use cuspforge::input::Manifold;
use cuspforge::lie::Module;
use cuspforge::linalg::{inverse, solve_with, Matrix, RankPolicy};
use cuspforge::pairing::{
    generic_class, phi_eigen_check, phi_pullback, pm_words, reframe_peripheral, slice_basis, symmetry_matrix,
    z_pm_cocycles, TypeVerdict,
};
use cuspforge::rep::{normalize_peripheral, parabolic, Form, Representation};
use cuspforge::report::{self, Options, Report};
use cuspforge::slice::{
    act, class_span_dim, cusp_models, projected_da_db, slice_rep_exact, tangent_image_dim, CuspModel, CuspParams,
    SlicePoint, Type1Model, Type2Model,
};
use cuspforge::FieldElem;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Census cusp shapes (imaginary parts for the amphichiral and symmetric cases).
const CENSUS_4_1: f64 = 3.464_101_615_137_754;
const CENSUS_5_2: (f64, f64) = (-2.490_244_667_506_614, 2.979_447_066_478_977);
const CENSUS_6_3: f64 = 5.510_570_258_265_164;
const SHAPE_TOL: f64 = 1e-8;
/// Regression pins for the 5₂ slice coordinates (computed, not from the literature).
const PIN_5_2: (f64, f64) = (-0.973_639_562_061, -0.212_226_122_923);
const PIN_TOL: f64 = 1e-9;
const RESIDUAL_TOL: f64 = 1e-9;
const SAMPLES: usize = 100;
const PROPERTY_CASES: u32 = 100;
const RIGIDITY_BUDGET: Duration = Duration::from_secs(60);

type Q = FieldElem;
type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn manifold(name: &str) -> &'static Manifold {
    static CELLS: [OnceLock<Manifold>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = ["4_1", "5_2", "6_3"].iter().position(|n| *n == name).expect("bundled name");
    CELLS[i].get_or_init(|| Manifold::from_path(&format!("bundled:{name}")).expect("bundled data loads"))
}

fn full_report(name: &str, float: bool) -> &'static Report {
    static EXACT: [OnceLock<Report>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    static FLOAT: [OnceLock<Report>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    let i = ["4_1", "5_2", "6_3"].iter().position(|n| *n == name).expect("bundled name");
    let cell = if float { &FLOAT[i] } else { &EXACT[i] };
    cell.get_or_init(|| {
        let opts = Options { float, ..Options::default() };
        report::run(manifold(name), opts).expect("pipeline runs")
    })
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn v_dims(r: &Report) -> (usize, usize, usize) {
    let d = r.rigidity.as_ref().expect("rigidity ran").dims(Module::V);
    (d.z1, d.b1, d.h1)
}

fn policy() -> RankPolicy {
    RankPolicy::default()
}

fn ac01_rigidity_5_2() -> Outcome {
    let m = manifold("5_2");
    let start = Instant::now();
    let r = report::analyze(
        &m.name,
        &m.presentation,
        &m.rep,
        None,
        Options { stage: report::Stage::Rigidity, ..Options::default() },
    )
    .map_err(|e| e.to_string())?;
    let elapsed = start.elapsed();
    let rig = r.rigidity.as_ref().ok_or("no rigidity stage")?;
    ensure(rig.fox_rank_v == 8, || format!("Fox rank {} != 8", rig.fox_rank_v))?;
    ensure(v_dims(&r) == (10, 9, 1), || format!("dims {:?} != (10, 9, 1)", v_dims(&r)))?;
    ensure(rig.verdict.rigid, || "not rigid".into())?;
    ensure(elapsed <= RIGIDITY_BUDGET, || format!("took {elapsed:?}"))?;
    Ok(format!("Fox rank 8, (Z1,B1,H1) = (10,9,1), rigid, {:.2}s", elapsed.as_secs_f64()))
}

/// Slice coordinates by a second route: solve res(z) = c_a·z_a + c_b·z_b + δx directly.
fn coords_by_solving(m: &Manifold, z: &Cocycle<Q>) -> Result<(Q, Q), String> {
    let nc = normalize_peripheral(&m.rep, &m.presentation, 0).map_err(|e| e.to_string())?;
    let zc = z.conjugate(&nc.conjugator, &nc.conjugator_inverse).project(Module::V);
    let (prep, r) = restrict(&zc, &nc.rep, &m.presentation, 0).map_err(|e| e.to_string())?;
    let (za, zb) = slice_basis(&nc.shape.u, &nc.shape.v).map_err(|e| e.to_string())?;
    let bmap = coboundary_map(&prep, Module::V);
    let mut cols = vec![za.to_vector(), zb.to_vector()];
    cols.extend((0..bmap.cols()).map(|j| bmap.col(j)));
    let a = Matrix::from_columns(bmap.rows(), &cols);
    let sol = solve_with(&a, &r.to_vector(), policy()).map_err(|e| e.to_string())?.ok_or("not in the span")?;
    Ok((sol[0].clone(), sol[1].clone()))
}

fn ac02_type2_5_2() -> Outcome {
    let m = manifold("5_2");
    let r = full_report("5_2", false);
    let c = &r.cusps[0];
    let (ca, cb) = (c.c_a.as_ref().ok_or("no c_a")?, c.c_b.as_ref().ok_or("no c_b")?);
    ensure(!ca.is_zero() && !cb.is_zero(), || format!("c_a = {ca}, c_b = {cb}"))?;
    ensure(c.verdict == Some(TypeVerdict::Type2Achievable), || format!("verdict {:?}", c.verdict))?;
    ensure((ca.value - PIN_5_2.0).abs() < PIN_TOL && (cb.value - PIN_5_2.1).abs() < PIN_TOL, || {
        format!("({}, {}) drifted from pins {:?}", ca.value, cb.value, PIN_5_2)
    })?;
    let (u, v) = (c.shape.u.value, c.shape.v.value);
    ensure((u - CENSUS_5_2.0).abs() < SHAPE_TOL && (v - CENSUS_5_2.1).abs() < SHAPE_TOL, || {
        format!("shape {u} + {v}i vs census")
    })?;
    // Second route: direct linear solve instead of the duality pairing.
    let basis = h1(&m.presentation, &m.rep, Module::V, policy()).map_err(|e| e.to_string())?.h1_basis;
    let z = generic_class(&basis, &m.presentation, &m.rep, policy()).map_err(|e| e.to_string())?;
    let (sa, sb) = coords_by_solving(m, &z)?;
    ensure(Some(sa.to_string()) == ca.exact && Some(sb.to_string()) == cb.exact, || {
        format!("solve route gives ({sa}, {sb})")
    })?;
    Ok(format!("c_a = {:.12}, c_b = {:.12} (exact, both routes), type-2 achievable", ca.value, cb.value))
}

fn type1_holds(name: &str, census: f64) -> Outcome {
    let r = full_report(name, false);
    let (z1, b1, h) = v_dims(r);
    ensure(h == 1, || format!("H1(v) = {h}"))?;
    let s = r.symmetry.as_ref().ok_or("no symmetry block")?;
    ensure(s.type1_criterion && s.type1_achievable, || "type-1 criterion fails".into())?;
    let c = &r.cusps[0];
    ensure(c.shape.u.is_zero(), || format!("shape real part {}", c.shape.u))?;
    let v = c.shape.v.value;
    ensure((v - census).abs() < SHAPE_TOL, || format!("shape {v}i vs census {census}i"))?;
    // The slice coordinate along γ₋ vanishes exactly, consistent with res[z] ∈ [z₊].
    ensure(c.c_a.as_ref().is_some_and(|x| x.is_zero()), || "c_a nonzero".into())?;
    ensure(s.restriction_in_plus_line == Some(true), || "restriction not on the +1 line".into())?;
    Ok(format!("(Z1,B1,H1) = ({z1},{b1},{h}), type-1 criterion holds on {}, shape {v:.12}i", s.gamma_plus))
}

fn ac03_six_three() -> Outcome {
    type1_holds("6_3", CENSUS_6_3)
}

fn ac04_figure_eight() -> Outcome {
    type1_holds("4_1", CENSUS_4_1)
}

fn ac05_peripheral_dims() -> Outcome {
    let mut seen = Vec::new();
    for name in ["4_1", "5_2", "6_3"] {
        for c in &full_report(name, false).cusps {
            let p = &c.peripheral_h1;
            ensure((p.g, p.so31, p.v) == (6, 4, 2), || format!("{name} cusp {}: {:?}", c.index, p))?;
            seen.push(format!("{name}#{}", c.index));
        }
    }
    Ok(format!("H1(Δ; g, so31, v) = (6, 4, 2) for {}", seen.join(", ")))
}

fn ac06_tangent_image() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(606);
    let p = policy();
    for i in 0..SAMPLES {
        let (x1, y1, x2): (f64, f64, f64) =
            (rng.gen_range(0.3..3.0), rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
        let sign = if i % 2 == 0 { 1.0 } else { -1.0 };
        let y2 = (y1 * x2 - sign) / x1;
        let s = SlicePoint::new(0.0, 0.0, x1, y1, x2, y2).map_err(|e| e.to_string())?;
        let d = tangent_image_dim(&s, p).map_err(|e| e.to_string())?;
        ensure(d == 4, || format!("float sample {i}: dim {d}"))?;
        let rep = slice_rep_exact(&s).map_err(|e| e.to_string())?;
        let (da, db) = projected_da_db(&s).map_err(|e| e.to_string())?;
        ensure(class_span_dim(&rep, &[da, db], p) == 2, || format!("float sample {i}: D_a, D_b dependent"))?;
    }
    for name in ["4_1", "5_2", "6_3"] {
        let m = manifold(name);
        let nc = normalize_peripheral(&m.rep, &m.presentation, 0).map_err(|e| e.to_string())?;
        let s = SlicePoint::normalized(nc.shape.u.clone(), nc.shape.v.clone()).map_err(|e| e.to_string())?;
        ensure(tangent_image_dim(&s, p).map_err(|e| e.to_string())? == 4, || format!("{name}: image dim"))?;
        let rep = slice_rep_exact(&s).map_err(|e| e.to_string())?;
        let (da, db) = projected_da_db(&s).map_err(|e| e.to_string())?;
        ensure(class_span_dim(&rep, &[da, db], p) == 2, || format!("{name}: D_a, D_b dependent"))?;
    }
    Ok(format!("dim 4 and [D_a],[D_b] independent at {SAMPLES} float samples and 3 exact shapes"))
}

/// Matrix exponential by scaling and squaring of a Taylor series.
fn expm(a: &Matrix<f64>) -> Matrix<f64> {
    let norm = a.entries().iter().map(|x| x.abs()).fold(0.0, f64::max);
    let k = (norm.max(1e-300).log2().ceil() + 4.0).max(0.0) as i32;
    let scaled = a.scale(&0.5f64.powi(k));
    let mut term = Matrix::identity(4);
    let mut sum = Matrix::identity(4);
    for n in 1..30 {
        term = (&term * &scaled).scale(&(1.0 / n as f64));
        sum = &sum + &term;
    }
    for _ in 0..k {
        sum = &sum * &sum;
    }
    sum
}

/// N_{a,b}(x,y) as exp(x(E₁₂ + E₂₄ + aE₂₂) + y(E₁₃ + E₃₄ + bE₃₃)).
fn n_oracle(a: f64, b: f64, x: f64, y: f64) -> Matrix<f64> {
    let mut g = Matrix::zeros(4, 4);
    g[(0, 1)] = x;
    g[(1, 3)] = x;
    g[(1, 1)] = a * x;
    g[(0, 2)] = y;
    g[(2, 3)] = y;
    g[(2, 2)] = b * y;
    expm(&g)
}

fn ac07_conjugators_and_foliations() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(707);
    let nonzero = |rng: &mut ChaCha8Rng| {
        let x: f64 = rng.gen_range(0.2..2.0);
        if rng.gen_bool(0.5) {
            x
        } else {
            -x
        }
    };
    let mut worst: f64 = 0.0;
    for _ in 0..SAMPLES {
        let (a, b) = (nonzero(&mut rng), nonzero(&mut rng));
        let (x, y): (f64, f64) = (rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let c = Type1Model.conjugator(a, 0.0).map_err(|e| e.to_string())?;
        let lhs = &(&c * &n_oracle(a, 0.0, x, y)) * &inverse(&c).map_err(|e| e.to_string())?;
        let r1 = lhs.max_abs_diff(&Type1Model.group_element(a * x, y, -x / a));
        let d = Type2Model.conjugator(a, b).map_err(|e| e.to_string())?;
        let lhs = &(&d * &n_oracle(a, b, x, y)) * &inverse(&d).map_err(|e| e.to_string())?;
        let r2 = lhs.max_abs_diff(&Type2Model.group_element(a * x, b * y, -x / a - y / b));
        worst = worst.max(r1).max(r2);
    }
    ensure(worst < RESIDUAL_TOL, || format!("conjugation residual {worst:e}"))?;
    let mut leaf_worst: f64 = 0.0;
    for (model, p) in cusp_models().iter().zip([
        CuspParams::default(),
        CuspParams { lambda1: 1.3, lambda2: 0.0 },
        CuspParams { lambda1: 0.6, lambda2: 2.1 },
    ]) {
        for _ in 0..SAMPLES {
            let s = rng.gen_range(0.1..3.0);
            let pt = model
                .leaf_point(p, s, rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5))
                .map_err(|e| e.to_string())?;
            let g = model
                .lattice_element(p, rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0))
                .map_err(|e| e.to_string())?;
            let moved = act(&g, pt);
            ensure(model.omega_contains(p, moved), || format!("{}: left the domain", model.name()))?;
            let h = model.horosphere_value(p, moved).map_err(|e| e.to_string())?;
            leaf_worst = leaf_worst.max((h - s).abs());
        }
    }
    ensure(leaf_worst < RESIDUAL_TOL, || format!("foliation residual {leaf_worst:e}"))?;
    Ok(format!("conjugation residual {worst:.1e}, foliation residual {leaf_worst:.1e} over {SAMPLES} samples each"))
}

fn ac08_decomposition() -> Outcome {
    let mut parts = Vec::new();
    for name in ["4_1", "5_2"] {
        let t = full_report(name, false).translemma.as_ref().ok_or("not run")?;
        let r = t.result.as_ref().ok_or_else(|| format!("{name}: skipped ({:?})", t.skipped))?;
        let got = (r.slice_span, r.so31_image, r.intersection, r.total);
        ensure(got == (4, 2, 0, 6), || format!("{name}: {got:?}"))?;
        parts.push(format!("{name} 4/2/0/6"));
    }
    Ok(parts.join(", "))
}

fn ac09_eigenbasis() -> Outcome {
    let mut parts = Vec::new();
    for name in ["6_3", "4_1"] {
        let m = manifold(name);
        let sym = m.symmetry.as_ref().ok_or("no symmetry block")?;
        let (plus, minus) =
            cuspforge::pairing::involution_pm_basis(sym.peripheral_matrix).map_err(|e| e.to_string())?;
        let _ = pm_words(&m.presentation, sym.cusp, sym.peripheral_matrix).map_err(|e| e.to_string())?;
        let framed = reframe_peripheral(&m.presentation, sym.cusp, [minus, plus]).map_err(|e| e.to_string())?;
        let nc = normalize_peripheral(&m.rep, &framed, sym.cusp).map_err(|e| e.to_string())?;
        ensure(nc.shape.u.is_zero(), || format!("{name}: shape not purely imaginary"))?;
        let torus =
            Representation::torus(parabolic(&Q::one(), &Q::zero()), parabolic(&Q::zero(), &nc.shape.v), Form::SO31)
                .map_err(|e| e.to_string())?;
        let (zp, zm) = z_pm_cocycles(&nc.shape).map_err(|e| e.to_string())?;
        let a = symmetry_matrix(&Q::zero(), &Q::zero());
        let check = phi_eigen_check(&torus, &zp, &zm, &a, policy()).map_err(|e| e.to_string())?;
        let (wp, wm) = (check.plus_witness.ok_or("no + witness")?, check.minus_witness.ok_or("no - witness")?);
        // Verify the witnesses independently of the solver.
        let a_inv = inverse(&a).map_err(|e| e.to_string())?;
        let plus = phi_pullback(&zp, &torus, &a, &a_inv).add(&zp.scale(&-Q::one()));
        let minus = phi_pullback(&zm, &torus, &a, &a_inv).add(&zm);
        ensure(plus == coboundary(&torus, Module::V, &wp), || format!("{name}: + witness wrong"))?;
        ensure(minus == coboundary(&torus, Module::V, &wm), || format!("{name}: - witness wrong"))?;
        ensure(!wp.is_zero() || plus.values.iter().all(|v| v.is_zero()), || "degenerate".into())?;
        parts.push(format!("{name} (c = {:.6})", nc.shape.v.to_f64()));
    }
    Ok(format!("exact witnesses for phi*(z+) - z+ and phi*(z-) + z- on {}", parts.join(", ")))
}

fn ac10_mode_agreement() -> Outcome {
    let mut checked = 0;
    for name in ["4_1", "5_2", "6_3"] {
        let (e, f) = (full_report(name, false), full_report(name, true));
        let agreement = f.mode_agreement.as_ref().ok_or("no comparison")?;
        if let Some(c) = agreement.failures().next() {
            return Err(format!("{name}: {} ({})", c.name, c.detail));
        }
        let (er, fr) = (e.rigidity.as_ref().ok_or("no rigidity")?, f.rigidity.as_ref().ok_or("no rigidity")?);
        ensure(er.fox_rank_v == fr.fox_rank_v, || format!("{name}: Fox rank"))?;
        for module in Module::ALL {
            ensure(er.dims(module) == fr.dims(module), || format!("{name}: dims for {module}"))?;
        }
        for (a, b) in e.cusps.iter().zip(&f.cusps) {
            ensure(a.peripheral_h1 == b.peripheral_h1, || format!("{name}: peripheral dims"))?;
        }
        let (et, ft) = (
            e.translemma.as_ref().and_then(|t| t.result.as_ref()),
            f.translemma.as_ref().and_then(|t| t.result.as_ref()),
        );
        ensure(et == ft, || format!("{name}: decomposition {et:?} vs {ft:?}"))?;
        checked += agreement.checks.len();
    }
    Ok(format!("float mode matches exact on {checked} ranks/dimensions across 3 manifolds"))
}

fn ac11_properties() -> Outcome {
    let mut names = Vec::new();
    for (name, suite) in common::REQUIRED {
        suite(&mut common::runner(PROPERTY_CASES)).map_err(|e| format!("{name}: {e}"))?;
        names.push(name);
    }
    Ok(format!("{} suites x {PROPERTY_CASES} cases: {}", names.len(), names.join(", ")))
}

fn main() {
    let criteria: [Criterion; 11] = [
        ("5_2 rigidity numbers", ac01_rigidity_5_2),
        ("5_2 type-2 verdict", ac02_type2_5_2),
        ("6_3 type-1 criterion", ac03_six_three),
        ("figure-eight type-1 criterion", ac04_figure_eight),
        ("peripheral dimensions", ac05_peripheral_dims),
        ("slice tangent image", ac06_tangent_image),
        ("conjugator identities and foliations", ac07_conjugators_and_foliations),
        ("boundary decomposition", ac08_decomposition),
        ("symmetry eigenbasis", ac09_eigenbasis),
        ("float/exact mode agreement", ac10_mode_agreement),
        ("property suites", ac11_properties),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("AC-{:02} PASS {name}: {detail} [{secs:.1}s]", i + 1),
            Err(why) => {
                failed += 1;
                println!("AC-{:02} FAIL {name}: {why} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

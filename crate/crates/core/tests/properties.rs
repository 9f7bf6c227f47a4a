mod common;

use common::runner;

const CASES: u32 = 128;

fn check(suite: common::Suite) {
    if let Err(e) = suite(&mut runner(CASES)) {
        panic!("{e}");
    }
}

#[test]
fn fox_axioms() {
    check(common::fox_axioms);
}

#[test]
fn cocycle_closure() {
    check(common::cocycle_closure);
}

#[test]
fn coboundaries_lie_in_fox_kernel() {
    check(common::coboundary_kernel);
}

#[test]
fn sigma_is_an_involutive_automorphism() {
    check(common::sigma_involution);
}

#[test]
fn killing_splitting_is_orthogonal() {
    check(common::killing_orthogonality);
}

#[test]
fn pairing_ignores_coboundaries() {
    check(common::pairing_coboundary_insensitive);
}

#[test]
fn slice_coordinates_round_trip() {
    check(common::slice_round_trip);
}

#[test]
fn eigenvalue_symmetry_near_pure_imaginary_point() {
    check(common::eigenvalue_symmetry);
}

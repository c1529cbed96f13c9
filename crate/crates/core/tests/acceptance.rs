//! One test per acceptance criterion; each prints a single PASS/FAIL line.

use dispersion_lab::harness::criteria::*;
use dispersion_lab::harness::CriterionResult;

fn check(c: CriterionResult, max_seconds: Option<f64>) {
    let slow = max_seconds.is_some_and(|s| c.seconds > s);
    println!("{c}{}", if slow { " [too slow]" } else { "" });
    assert!(c.passed && !slow, "{c}");
}

#[test]
fn criterion_1_coefficient_regression() {
    check(criterion_1(), Some(1.0));
}

#[test]
fn criterion_2_symbolic_invariance() {
    check(criterion_2(), Some(10.0));
}

#[test]
fn criterion_3_propagator_oracle() {
    check(criterion_3(), Some(10.0));
}

#[test]
fn criterion_4_enhanced_diffusivity() {
    check(criterion_4(), None);
}

#[test]
fn criterion_5_reduced_decay_exponents() {
    check(criterion_5(), None);
}

#[test]
fn criterion_6_off_manifold_contraction() {
    check(criterion_6(), None);
}

#[test]
fn criterion_7_residual_and_high_mode_bounds() {
    check(criterion_7(), None);
}

#[test]
fn criterion_8_error_scaling() {
    check(criterion_8(), None);
}

#[test]
fn criterion_9_structural_suites() {
    check(criterion_9(), None);
}

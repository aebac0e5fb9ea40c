//! Acceptance gate: one test per criterion, each printing a PASS/FAIL line.
//!
//! Run with `cargo test -p imcflab --test acceptance -- --nocapture` to see
//! every line; a failing criterion prints its offending reports before
//! panicking.

use imcflab::verify::{criterion, CriterionOutcome};

fn check(id: usize) {
    let outcome: CriterionOutcome = criterion(id).unwrap_or_else(|e| {
        println!("[FAIL] criterion {id}: errored: {e}");
        panic!("criterion {id} errored: {e}");
    });
    let verdict = if outcome.passes() { "PASS" } else { "FAIL" };
    println!(
        "[{verdict}] criterion {:>2} ({}) — {} checks in {:.2}s",
        outcome.id,
        outcome.name,
        outcome.reports.len(),
        outcome.seconds
    );
    for rep in &outcome.reports {
        println!(
            "         {:<32} violation {:>13.3e}  tol {:>9.3e}  at {}",
            rep.name, rep.worst_violation, rep.tolerance, rep.location
        );
    }
    assert!(outcome.passes(), "criterion {id} ({}) failed", outcome.name);
}

#[test]
fn criterion_01_slice_equality() {
    check(1);
}

#[test]
fn criterion_02_mass_round_trip() {
    check(2);
}

#[test]
fn criterion_03_scalar_curvature() {
    check(3);
}

#[test]
fn criterion_04_flux_limit() {
    check(4);
}

#[test]
fn criterion_05_embedding() {
    check(5);
}

#[test]
fn criterion_06_area_law() {
    check(6);
}

#[test]
fn criterion_07_monotonicity() {
    check(7);
}

#[test]
fn criterion_08_asymptotics() {
    check(8);
}

#[test]
fn criterion_09_convergence() {
    check(9);
}

#[test]
fn criterion_10_inequality_sampling() {
    check(10);
}

#[test]
fn criterion_11_genus_consistency() {
    check(11);
}

//! Randomized property suites, 1000 cases each.

mod common;

use common::props::{self, CASES};

#[test]
fn field_axioms() {
    props::field_axioms(CASES).unwrap();
}

#[test]
fn sylvester_invariance() {
    props::sylvester(CASES).unwrap();
}

#[test]
fn reflection_form_preservation_and_polar_scaling() {
    props::reflections(CASES).unwrap();
}

#[test]
fn heisenberg_law() {
    props::heisenberg(CASES).unwrap();
}

#[test]
fn cayley_hamilton() {
    props::cayley_hamilton(CASES).unwrap();
}

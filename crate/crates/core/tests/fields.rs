//! Homology over prime fields.

mod common;

use common::{braid, run};
use khova_core::complex::Reduction;
use khova_core::gradedalg::{AlgError, Field, LaurentPoly1};
use khova_core::homology::homology_dims;

fn p1(s: &str) -> LaurentPoly1 {
    s.parse().unwrap()
}

#[test]
fn trefoil_over_f2_gains_a_pair() {
    let d = braid("1,1,1", 2);
    let (_, q, _) = run(&d, Reduction::Unreduced, Field::Rational);
    let (_, f2, _) = run(&d, Reduction::Unreduced, Field::Prime(2));
    assert_eq!(q.dims, [p1("q^-2 + 1"), p1("0"), p1("1"), p1("q^3")]);
    assert_eq!(f2.dims, [p1("q^-2 + 1"), p1("0"), p1("1 + q^2"), p1("q + q^3")]);
    assert_eq!(q.alternating_sum(), f2.alternating_sum());
}

#[test]
fn odd_primes_agree_with_rationals_on_small_knots() {
    for (w, k) in [("1,1,1", 2), ("1,-2,1,-2", 3), ("1,1,1,1,1", 2)] {
        let d = braid(w, k);
        let q = run(&d, Reduction::Unreduced, Field::Rational).1;
        assert_eq!(run(&d, Reduction::Unreduced, Field::Prime(3)).1.dims, q.dims);
    }
}

#[test]
fn reduced_is_field_independent_for_the_trefoil() {
    let d = braid("1,1,1", 2);
    let q = run(&d, Reduction::Reduced(0), Field::Rational).1;
    assert_eq!(run(&d, Reduction::Reduced(0), Field::Prime(2)).1.dims, q.dims);
}

#[test]
fn composite_modulus_is_rejected() {
    let d = braid("1,1,1", 2);
    let (c, _, _) = run(&d, Reduction::Unreduced, Field::Rational);
    assert!(matches!(homology_dims(&c, Field::Prime(4)), Err(e) if e.to_string() == AlgError::NotPrime(4).to_string()));
}

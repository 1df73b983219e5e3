//! Exact algebra: integer Laurent polynomials in `q` and `(q, T)`, and ranks
//! of sparse integer matrices over Q or a prime field.

mod laurent;
mod matrix;

pub use laurent::{Exponent, Laurent, LaurentPoly1, LaurentPoly2, QT};
pub use matrix::{is_prime, rank, Field, IntMatrix};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgError {
    #[error("division leaves a nonzero remainder")]
    NotDivisible,
    #[error("division by zero polynomial")]
    DivisionByZero,
    #[error("only T = 1 or T = -1 can be substituted exactly, got {0}")]
    UnsupportedSpecialization(i64),
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    #[error("shape mismatch: {left:?} times {right:?}")]
    ShapeMismatch { left: (usize, usize), right: (usize, usize) },
    #[error("cannot parse polynomial: {0}")]
    Parse(String),
}

/// Exact quotient of two Laurent polynomials.
pub fn poly_div_exact<E: Exponent>(a: &Laurent<E>, b: &Laurent<E>) -> Result<Laurent<E>, AlgError> {
    a.div_exact(b)
}

/// Substitutes `T = value` (±1 only).
pub fn evaluate_t(p: &LaurentPoly2, value: i64) -> Result<LaurentPoly1, AlgError> {
    p.evaluate_t(value)
}

#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn poly2() -> impl Strategy<Value = LaurentPoly2> {
        prop::collection::vec(((-4i64..=4, -3i64..=3), -5i64..=5), 0..6).prop_map(|terms| {
            LaurentPoly2::from_terms(terms.into_iter().map(|((q, t), c)| (QT::new(q, t), c)))
        })
    }

    fn matrix() -> impl Strategy<Value = IntMatrix> {
        (1usize..6, 1usize..6).prop_flat_map(|(r, c)| {
            prop::collection::vec(prop::collection::vec(-2i64..=2, c), r)
                .prop_map(|rows| IntMatrix::from_dense(&rows))
        })
    }

    proptest! {
        #[test]
        fn div_exact_inverts_mul(a in poly2(), b in poly2()) {
            prop_assume!(!b.is_zero());
            let prod = &a * &b;
            prop_assert_eq!(poly_div_exact(&prod, &b).unwrap(), a);
        }

        #[test]
        fn text_round_trip(a in poly2()) {
            let s = a.to_string();
            prop_assert_eq!(s.parse::<LaurentPoly2>().unwrap(), a);
        }

        #[test]
        fn rank_transpose_and_fields(m in matrix()) {
            let r = m.rank(Field::Rational).unwrap();
            prop_assert_eq!(m.transpose().rank(Field::Rational).unwrap(), r);
            prop_assert!(m.rank(Field::Prime(2)).unwrap() <= r);
            prop_assert!(m.rank(Field::Prime(5)).unwrap() <= r);
        }

        #[test]
        fn rank_permutation_invariant(m in matrix(), seed in any::<u64>()) {
            use rand::{seq::SliceRandom, SeedableRng};
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
            let mut rp: Vec<usize> = (0..m.rows()).collect();
            let mut cp: Vec<usize> = (0..m.cols()).collect();
            rp.shuffle(&mut rng);
            cp.shuffle(&mut rng);
            let pm = m.permuted(&rp, &cp);
            prop_assert_eq!(pm.rank(Field::Rational).unwrap(), m.rank(Field::Rational).unwrap());
            prop_assert_eq!(pm.rank(Field::Prime(2)).unwrap(), m.rank(Field::Prime(2)).unwrap());
        }
    }
}

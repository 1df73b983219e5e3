//! Graded homology dimensions and the superpolynomials built from them.

use num_bigint::BigInt;
use num_traits::Signed;
use serde::ser::SerializeStruct;
use serde::{Deserialize, Serialize, Serializer};
use thiserror::Error;

use crate::complex::ChainComplex;
use crate::gradedalg::{AlgError, Field, LaurentPoly1, LaurentPoly2, QT};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HomologyError {
    #[error("negative dimension in degree {degree}, q-degree {qdeg}")]
    NegativeDimension { degree: usize, qdeg: i64 },
    #[error(transparent)]
    Alg(#[from] AlgError),
}

/// `dim_q H_i` for `i = 0..=n`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HomologyTable {
    pub reduced: bool,
    pub field: Field,
    pub dims: Vec<LaurentPoly1>,
}

impl HomologyTable {
    pub fn get(&self, i: usize) -> &LaurentPoly1 {
        &self.dims[i]
    }

    /// `Σ (-q)^i dim_q H_i`.
    pub fn alternating_sum(&self) -> LaurentPoly1 {
        alternating(&self.dims)
    }

    pub fn total_rank(&self) -> BigInt {
        self.dims.iter().flat_map(|p| p.terms().map(|(_, c)| c.clone())).sum()
    }
}

fn alternating(polys: &[LaurentPoly1]) -> LaurentPoly1 {
    polys
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let s = if i % 2 == 0 { 1 } else { -1 };
            p.shift(i as i64).scale(&BigInt::from(s))
        })
        .sum()
}

impl Serialize for HomologyTable {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut st = s.serialize_struct("HomologyTable", 3)?;
        st.serialize_field("reduced", &self.reduced)?;
        st.serialize_field("field", &self.field.to_string())?;
        let pairs: Vec<(usize, &LaurentPoly1)> = self.dims.iter().enumerate().collect();
        st.serialize_field("groups", &pairs)?;
        st.end()
    }
}

impl<'de> Deserialize<'de> for HomologyTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        struct Raw {
            reduced: bool,
            field: String,
            groups: Vec<(usize, LaurentPoly1)>,
        }
        let raw = Raw::deserialize(d)?;
        let field = match raw.field.as_str() {
            "Q" => Field::Rational,
            f => f
                .strip_prefix('F')
                .and_then(|p| p.parse().ok())
                .map(Field::Prime)
                .ok_or_else(|| serde::de::Error::custom(format!("unknown field {f}")))?,
        };
        let mut dims = vec![LaurentPoly1::zero(); raw.groups.len()];
        for (i, p) in raw.groups {
            *dims.get_mut(i).ok_or_else(|| serde::de::Error::custom("degree out of range"))? = p;
        }
        Ok(HomologyTable { reduced: raw.reduced, field, dims })
    }
}

/// `dim H_i^m = dim C_i^m - rank d_i^m - rank d_{i-1}^{m+1}`.
pub fn homology_dims(complex: &ChainComplex, field: Field) -> Result<HomologyTable, HomologyError> {
    let ranks = complex.ranks(field)?;
    let rank = |i: usize, m: i64| ranks.get(&(i, m)).copied().unwrap_or(0) as i64;
    let mut dims = Vec::with_capacity(complex.len());
    for g in complex.groups() {
        let i = g.degree;
        let mut p = LaurentPoly1::zero();
        for (&m, block) in &g.blocks {
            let incoming = if i == 0 { 0 } else { rank(i - 1, m + 1) };
            let h = block.len() as i64 - rank(i, m) - incoming;
            if h < 0 {
                return Err(HomologyError::NegativeDimension { degree: i, qdeg: m });
            }
            p.add_term(m, BigInt::from(h));
        }
        dims.push(p);
    }
    Ok(HomologyTable { reduced: complex.is_reduced(), field, dims })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Superpolynomial {
    pub value: LaurentPoly2,
    pub reduced: bool,
    pub n_black: usize,
    pub n_white: usize,
}

impl Superpolynomial {
    pub fn at_t_minus_one(&self) -> LaurentPoly1 {
        self.value.evaluate_t(-1).expect("T = -1 is supported")
    }
}

/// `q^{n_b - 2 n_w} T^{-n_w} (q^{-1} if reduced) Σ (qT)^i dim_q H_i`.
pub fn superpolynomial(table: &HomologyTable, n_black: usize, n_white: usize, reduced: bool) -> Superpolynomial {
    let sum: LaurentPoly2 = table
        .dims
        .iter()
        .enumerate()
        .map(|(i, p)| p.to_qt().shift(QT::new(i as i64, i as i64)))
        .sum();
    let q_shift = n_black as i64 - 2 * n_white as i64 - reduced as i64;
    Superpolynomial {
        value: sum.shift(QT::new(q_shift, -(n_white as i64))),
        reduced,
        n_black,
        n_white,
    }
}

/// `(q + q^{-1}) Pr - P`.
pub fn correction_term(p: &Superpolynomial, pr: &Superpolynomial) -> LaurentPoly2 {
    &(&LaurentPoly1::circle().to_qt() * &pr.value) - &p.value
}

/// Whether `P` at `T = -1` equals `jones`.
pub fn euler_check(p: &Superpolynomial, jones: &LaurentPoly1) -> bool {
    p.value.evaluate_t(-1).is_ok_and(|v| &v == jones)
}

/// Whether every `dim_q H_i` is nonnegative and bounded by `qdim C_i`.
pub fn bounded_by_chains(table: &HomologyTable, complex: &ChainComplex) -> bool {
    table.dims.iter().zip(complex.groups()).all(|(h, g)| {
        let c = g.qdim();
        h.terms().all(|(m, v)| !v.is_negative() && *v <= c.coeff(m))
    })
}

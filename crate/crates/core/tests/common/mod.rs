#![allow(dead_code)]

use khova_core::complex::{ChainComplex, Reduction};
use khova_core::diagram::{parse_braid_word, KnotDiagram};
use khova_core::gradedalg::Field;
use khova_core::homology::{homology_dims, superpolynomial, HomologyTable, Superpolynomial};
use khova_core::hypercube::Hypercube;
use proptest::prelude::*;

pub fn braid_word() -> impl Strategy<Value = (String, usize)> {
    (2usize..=4).prop_flat_map(|k| {
        let letter = (1..k as i64, any::<bool>()).prop_map(|(i, neg)| if neg { -i } else { i });
        prop::collection::vec(letter, 1..=8).prop_map(move |w| {
            (w.iter().map(i64::to_string).collect::<Vec<_>>().join(","), k)
        })
    })
}

pub fn braid(word: &str, strands: usize) -> KnotDiagram {
    parse_braid_word(word, strands).unwrap()
}

pub fn run(d: &KnotDiagram, red: Reduction, field: Field) -> (ChainComplex, HomologyTable, Superpolynomial) {
    let c = ChainComplex::build(&Hypercube::build(d).unwrap(), red).unwrap();
    let t = homology_dims(&c, field).unwrap();
    let s = superpolynomial(&t, d.n_black(), d.n_white(), red.is_reduced());
    (c, t, s)
}

//! Structural identities on random braid closures.

mod common;

use common::{braid, braid_word, run};
use khova_core::complex::{check_nilpotent, grading_violations, Reduction};
use khova_core::diagram::parse_pd_code;
use khova_core::gradedalg::{Field, LaurentPoly1};
use khova_core::homology::{bounded_by_chains, euler_check};
use khova_core::hypercube::{extended_jones, reduced_jones, state_sum_jones, Hypercube};
use proptest::prelude::*;

proptest! {
    #![proptest_config(ProptestConfig { cases: 50, ..ProptestConfig::default() })]

    #[test]
    fn complex_and_homology_identities((word, k) in braid_word(), marked in 0usize..64) {
        let d = braid(&word, k);
        let hc = Hypercube::build(&d).unwrap();
        let jones = state_sum_jones(&hc);
        let rjones = reduced_jones(&jones).unwrap();
        let reductions = [Reduction::Unreduced, Reduction::Reduced(marked % d.edge_count())];
        for (red, target) in reductions.into_iter().zip([&jones, &rjones]) {
            let (c, t, s) = run(&d, red, Field::Rational);
            prop_assert_eq!(check_nilpotent(&c), Ok(()));
            prop_assert_eq!(grading_violations(&c), 0);
            for i in 0..c.len() {
                let ker = c.kernel_qdim(i, Field::Rational).unwrap();
                let im = c.image_qdim(i, Field::Rational).unwrap();
                prop_assert_eq!(&ker + &im.shift(1), c.group(i).qdim());
            }
            prop_assert_eq!(&c.euler_characteristic(), target);
            prop_assert!(euler_check(&s, target));
            prop_assert!(bounded_by_chains(&t, &c));
            let chain_sum: LaurentPoly1 = c
                .groups()
                .iter()
                .map(|g| g.qdim().shift(g.degree as i64).scale(&(if g.degree % 2 == 0 { 1 } else { -1 }).into()))
                .sum();
            prop_assert_eq!(t.alternating_sum(), chain_sum);
        }
    }

    #[test]
    fn hypercube_identities((word, k) in braid_word()) {
        let d = braid(&word, k);
        let hc = Hypercube::build(&d).unwrap();
        let n = hc.dimension();
        prop_assert_eq!(hc.vertices().len(), 1 << n);
        prop_assert_eq!(hc.edges().len(), n << n.saturating_sub(1));
        for v in hc.vertices() {
            prop_assert_eq!(v.cycles().iter().map(|c| c.len()).sum::<usize>(), d.edge_count());
        }
        for e in hc.edges() {
            let (a, b) = (hc.vertex(e.low).nu() as i64, hc.vertex(e.high()).nu() as i64);
            prop_assert_eq!((a - b).abs(), 1);
        }
        for r in hc.labels() {
            for x in 0..n {
                for y in x + 1..n {
                    if r.bit(x) || r.bit(y) {
                        continue;
                    }
                    let s = hc.edge_at(r, x).sign
                        * hc.edge_at(r.flip(x), y).sign
                        * hc.edge_at(r, y).sign
                        * hc.edge_at(r.flip(y), x).sign;
                    prop_assert_eq!(s, -1);
                }
            }
        }
        let jones = state_sum_jones(&hc);
        prop_assert_eq!(extended_jones(&hc).specialize(), jones.clone());
        prop_assert!(reduced_jones(&jones).is_ok());

        let again = parse_pd_code(&d.to_pd_string()).unwrap();
        prop_assert_eq!(state_sum_jones(&Hypercube::build(&again).unwrap()), jones);
        prop_assert_eq!(again.n_black(), word.split(',').filter(|l| !l.starts_with('-')).count());
    }
}

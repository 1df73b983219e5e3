//! One PASS/FAIL line per acceptance criterion. Run with
//! `cargo test -p khova --test acceptance`.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use khova_cli::{batch_verify, bundled_table, Options};
use khova_core::complex::{check_nilpotent, grading_violations, ChainComplex, Reduction};
use khova_core::diagram::{parse_braid_word, parse_pd_code, KnotDiagram};
use khova_core::gradedalg::{Field, LaurentPoly1, LaurentPoly2};
use khova_core::homology::{correction_term, euler_check, homology_dims, superpolynomial, HomologyTable, Superpolynomial};
use khova_core::hypercube::{extended_jones, reduced_jones, state_sum_jones, ExtendedTerm, Hypercube};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const TREFOIL_GRAPH: &str = "X(H,E,F,G)+ X(A,B,D,E)+ X(D,C,G,F)+ X(B,A,H,C)+";
const FIG8_GRAPH: &str = "X(H,E,F,G)+ X(A,B,D,E)- X(D,C,G,F)+ X(B,A,H,C)-";

type Outcome = Result<String, String>;

fn p1(s: &str) -> LaurentPoly1 {
    s.parse().unwrap()
}

fn p2(s: &str) -> LaurentPoly2 {
    s.parse().unwrap()
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq<T: PartialEq + std::fmt::Display>(what: &str, got: &T, want: &T) -> Result<(), String> {
    ensure(got == want, || format!("{what}: got {got}, want {want}"))
}

fn complex(d: &KnotDiagram, red: Reduction) -> ChainComplex {
    ChainComplex::build(&Hypercube::build(d).unwrap(), red).unwrap()
}

fn homology(d: &KnotDiagram, red: Reduction, field: Field) -> (ChainComplex, HomologyTable, Superpolynomial) {
    let c = complex(d, red);
    let t = homology_dims(&c, field).unwrap();
    let s = superpolynomial(&t, d.n_black(), d.n_white(), red.is_reduced());
    (c, t, s)
}

fn at(d: &KnotDiagram, label: &str) -> Reduction {
    Reduction::Reduced(d.edge_index(&label.into()).unwrap())
}

fn dims(t: &HomologyTable) -> String {
    t.dims.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ")
}

fn two_strand() -> KnotDiagram {
    parse_braid_word("1,1,1", 2).unwrap()
}

fn graph(pd: &str) -> KnotDiagram {
    parse_pd_code(pd).unwrap()
}

fn jones_values() -> Outcome {
    let trefoil = p1("q + q^3 + q^5 - q^9");
    let fig8 = p1("q^5 + q^-5");
    for d in [two_strand(), graph(TREFOIL_GRAPH)] {
        eq("trefoil", &state_sum_jones(&Hypercube::build(&d).unwrap()), &trefoil)?;
    }
    for d in [parse_braid_word("1,-2,1,-2", 3).unwrap(), graph(FIG8_GRAPH)] {
        eq("4_1", &state_sum_jones(&Hypercube::build(&d).unwrap()), &fig8)?;
    }
    eq("reduced trefoil", &reduced_jones(&trefoil).unwrap(), &p1("q^2 + q^6 - q^8"))?;
    eq("reduced 4_1", &reduced_jones(&fig8).unwrap(), &p1("q^-4 - q^-2 + 1 - q^2 + q^4"))?;
    Ok(format!("J(3_1) = {trefoil}, J(4_1) = {fig8}"))
}

fn terms(list: &[(usize, &[usize], usize)]) -> Vec<ExtendedTerm> {
    let mut v: Vec<ExtendedTerm> = list
        .iter()
        .map(|&(t_power, l, multiplicity)| ExtendedTerm { t_power, lengths: l.to_vec(), multiplicity })
        .collect();
    v.sort();
    v
}

fn extended_multisets() -> Outcome {
    let cases: [(KnotDiagram, Vec<ExtendedTerm>); 3] = [
        (two_strand(), terms(&[(0, &[3, 3], 1), (1, &[6], 3), (2, &[2, 4], 3), (3, &[2, 2, 2], 1)])),
        (
            graph(TREFOIL_GRAPH),
            terms(&[(0, &[2, 2, 4], 1), (1, &[2, 6], 4), (2, &[2, 3, 3], 2), (2, &[8], 4), (3, &[3, 5], 4), (4, &[8], 1)]),
        ),
        (
            graph(FIG8_GRAPH),
            terms(&[
                (0, &[2, 3, 3], 1),
                (1, &[2, 6], 2),
                (1, &[3, 5], 2),
                (2, &[2, 2, 4], 1),
                (2, &[8], 5),
                (3, &[2, 6], 2),
                (3, &[3, 5], 2),
                (4, &[2, 3, 3], 1),
            ]),
        ),
    ];
    for (i, (d, want)) in cases.iter().enumerate() {
        let got = extended_jones(&Hypercube::build(d).unwrap()).terms;
        ensure(&got == want, || format!("case {i}: got {got:?}"))?;
    }
    Ok("3 diagrams, every (t, lengths, multiplicity) term".into())
}

fn trefoil_superpolynomials() -> Outcome {
    let p = p2("q + q^3 + q^5*T^2 + q^9*T^3");
    let pr = p2("q^2 + q^6*T^2 + q^8*T^3");
    for d in [two_strand(), graph(TREFOIL_GRAPH)] {
        eq("P", &homology(&d, Reduction::Unreduced, Field::Rational).2.value, &p)?;
        for e in 0..d.edge_count() {
            eq("Pr", &homology(&d, Reduction::Reduced(e), Field::Rational).2.value, &pr)?;
        }
    }
    Ok(format!("P = {p}, Pr = {pr} for 2- and 3-strand diagrams"))
}

fn fig8_superpolynomial() -> Outcome {
    let want = p2("q^-4*T^-2 + q^-2*T^-1 + 1 + q^2*T + q^4*T^2");
    // 1 + T^2 a^2 + q^2 T + 1/(q^2 T) + 1/(T^2 a^2) at a = q^2
    let dgr = p2("1 + q^4*T^2 + q^2*T + q^-2*T^-1 + q^-4*T^-2");
    eq("DGR at a = q^2", &dgr, &want)?;
    let d = graph(FIG8_GRAPH);
    eq("graph", &homology(&d, at(&d, "A"), Field::Rational).2.value, &want)?;
    let b = parse_braid_word("1,-2,1,-2", 3).unwrap();
    eq("braid", &homology(&b, Reduction::Reduced(0), Field::Rational).2.value, &want)?;
    Ok(format!("Pr(4_1) = {want}"))
}

fn homology_tables() -> Outcome {
    let f = Field::Rational;
    let d = two_strand();
    let (c, t, _) = homology(&d, Reduction::Unreduced, f);
    eq("Ker d on C0", &c.kernel_qdim(0, f).unwrap(), &p1("q^-2 + 1"))?;
    let want = [p1("q^-2 + 1"), p1("0"), p1("1"), p1("q^3")];
    ensure(t.dims == want, || format!("2-strand unreduced: {}", dims(&t)))?;
    let (_, t, _) = homology(&d, Reduction::Reduced(0), f);
    let want = [p1("1"), p1("0"), p1("q^2"), p1("q^3")];
    ensure(t.dims == want, || format!("2-strand reduced: {}", dims(&t)))?;

    let d = graph(TREFOIL_GRAPH);
    let (c, t, _) = homology(&d, at(&d, "A"), f);
    eq("3-strand Im d0", &c.image_qdim(0, f).unwrap(), &p1("2 + q^2"))?;
    let want = [p1("q^-1"), p1("0"), p1("q"), p1("q^2"), p1("0")];
    ensure(t.dims == want, || format!("3-strand reduced: {}", dims(&t)))?;

    let d = graph(FIG8_GRAPH);
    let (c, t, _) = homology(&d, at(&d, "A"), f);
    let qd2 = p1("q^-1 + 2q + q^3");
    let chain: Vec<LaurentPoly1> = c.groups().iter().map(|g| g.qdim()).collect();
    let want_chain = [qd2.clone(), p1("4 + 4q^2"), p1("q^-1 + 7q + q^3"), p1("4 + 4q^2"), qd2];
    ensure(chain == want_chain, || format!("4_1 chain qdims {chain:?}"))?;
    eq("4_1 Im d1", &c.image_qdim(1, f).unwrap(), &p1("q^-1 + 3q"))?;
    eq("4_1 Im d2", &c.image_qdim(2, f).unwrap(), &p1("3 + q^2"))?;
    for i in 1..3 {
        let sum = &c.kernel_qdim(i, f).unwrap() + &c.image_qdim(i, f).unwrap().shift(1);
        eq("4_1 rank-nullity", &sum, &chain[i])?;
    }
    let want = [p1("q^-1"), p1("1"), p1("q"), p1("q^2"), p1("q^3")];
    ensure(t.dims == want, || format!("4_1 reduced: {}", dims(&t)))?;
    Ok("2-strand 3_1, 3-strand 3_1 and 4_1 tables with intermediate qdims".into())
}

fn correction() -> Outcome {
    let want = p2("q^7*T^2 + q^7*T^3");
    for d in [two_strand(), graph(TREFOIL_GRAPH)] {
        let p = homology(&d, Reduction::Unreduced, Field::Rational).2;
        let pr = homology(&d, Reduction::Reduced(0), Field::Rational).2;
        eq("correction", &correction_term(&p, &pr), &want)?;
    }
    Ok(format!("(q + q^-1) Pr - P = {want}"))
}

fn random_braid(rng: &mut ChaCha8Rng) -> (String, usize) {
    let k = rng.gen_range(2..=4);
    let n = rng.gen_range(1..=8);
    let w: Vec<String> = (0..n)
        .map(|_| {
            let s = rng.gen_range(1..k) as i64;
            (if rng.gen_bool(0.5) { -s } else { s }).to_string()
        })
        .collect();
    (w.join(","), k)
}

fn property_suite() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(0x6b686f7661);
    let f = Field::Rational;
    for _ in 0..50 {
        let (w, k) = random_braid(&mut rng);
        let d = parse_braid_word(&w, k).unwrap();
        let jones = state_sum_jones(&Hypercube::build(&d).unwrap());
        let rjones = reduced_jones(&jones).map_err(|e| format!("{w}: {e}"))?;
        let marked = rng.gen_range(0..d.edge_count());
        for (red, target) in [(Reduction::Unreduced, &jones), (Reduction::Reduced(marked), &rjones)] {
            let (c, _, s) = homology(&d, red, f);
            ensure(check_nilpotent(&c).is_ok(), || format!("{w}: d^2 != 0"))?;
            ensure(grading_violations(&c) == 0, || format!("{w}: entry not lowering qdeg by 1"))?;
            for i in 0..c.len() {
                let sum = &c.kernel_qdim(i, f).unwrap() + &c.image_qdim(i, f).unwrap().shift(1);
                ensure(sum == c.group(i).qdim(), || format!("{w}: rank-nullity at {i}"))?;
            }
            ensure(euler_check(&s, target), || format!("{w}: P(T=-1) = {} != {target}", s.at_t_minus_one()))?;
        }
    }
    Ok("50 seeded braid words, unreduced and reduced".into())
}

fn marked_edge_invariance() -> Outcome {
    for (name, pd) in [("3_1", TREFOIL_GRAPH), ("4_1", FIG8_GRAPH)] {
        let d = graph(pd);
        let first = homology(&d, Reduction::Reduced(0), Field::Rational).2.value;
        for e in 1..d.edge_count() {
            let p = homology(&d, Reduction::Reduced(e), Field::Rational).2.value;
            eq(&format!("{name} at {}", d.edge_label(e)), &p, &first)?;
        }
    }
    Ok("8 markings x 2 colorings agree".into())
}

fn batch_table() -> Outcome {
    let table = bundled_table();
    let report = batch_verify(&table, &Options::default());
    let failed: Vec<String> = report.diagrams.iter().filter(|d| !d.passed()).map(|d| d.name.clone()).collect();
    ensure(failed.is_empty(), || format!("failed: {}", failed.join(" ")))?;
    Ok(format!("{} knots", report.summary.total))
}

fn field_sensitivity() -> Outcome {
    let mut differ = Vec::new();
    for entry in bundled_table() {
        let d = entry.diagram().unwrap();
        let c = complex(&d, Reduction::Unreduced);
        let q = homology_dims(&c, Field::Rational).unwrap();
        let f2 = homology_dims(&c, Field::Prime(2)).unwrap();
        eq(&format!("{} Euler characteristic", entry.name), &q.alternating_sum(), &f2.alternating_sum())?;
        if q.dims != f2.dims {
            differ.push(entry.name);
        }
    }
    ensure(!differ.is_empty(), || "no table differs over F2".into())?;
    Ok(format!("{} corpus knots differ over F2 (first {})", differ.len(), differ[0]))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 10] = [
        ("Jones values", Duration::from_secs(1), jones_values),
        ("extended Jones multisets", Duration::from_secs(1), extended_multisets),
        ("trefoil superpolynomials", Duration::from_secs(2), trefoil_superpolynomials),
        ("reduced 4_1 superpolynomial", Duration::from_secs(5), fig8_superpolynomial),
        ("graded homology tables", Duration::from_secs(5), homology_tables),
        ("correction relation", Duration::from_secs(2), correction),
        ("property suite", Duration::from_secs(120), property_suite),
        ("marked-edge invariance", Duration::from_secs(10), marked_edge_invariance),
        ("batch table", Duration::from_secs(300), batch_table),
        ("field sensitivity", Duration::from_secs(60), field_sensitivity),
    ];
    let mut all = true;
    for (n, (name, limit, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let took = start.elapsed();
        let (ok, detail) = match outcome {
            Ok(d) if took <= *limit => (true, d),
            Ok(d) => (false, format!("{d}; took {took:?}, limit {limit:?}")),
            Err(e) => (false, e),
        };
        all &= ok;
        let verdict = if ok { "PASS" } else { "FAIL" };
        println!("criterion {}: {verdict} ({} ms) {name}: {detail}", n + 1, took.as_millis());
    }
    if all {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

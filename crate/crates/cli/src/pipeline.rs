//! Runs the full computation for one diagram and collects checks.

use std::time::Instant;

use khova_core::complex::{check_nilpotent, grading_violations, ChainComplex, ComplexError, Reduction};
use khova_core::diagram::{DiagramError, EdgeLabel, KnotDiagram};
use khova_core::gradedalg::{Field, LaurentPoly1, LaurentPoly2};
use khova_core::homology::{
    bounded_by_chains, correction_term, euler_check, homology_dims, superpolynomial, HomologyError,
    HomologyTable, Superpolynomial,
};
use khova_core::hypercube::{
    build_hypercube, reduced_jones, state_sum_jones, Hypercube, HypercubeError, DEFAULT_MAX_CROSSINGS,
};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::table::KnotTableEntry;

#[derive(Debug, Error)]
pub enum PipelineError {
    #[error(transparent)]
    Diagram(#[from] DiagramError),
    #[error(transparent)]
    Hypercube(#[from] HypercubeError),
    #[error(transparent)]
    Complex(#[from] ComplexError),
    #[error(transparent)]
    Homology(#[from] HomologyError),
    #[error("marked edge {0} is not an edge of the diagram")]
    UnknownMarkedEdge(String),
}

impl PipelineError {
    pub fn kind(&self) -> &'static str {
        match self {
            PipelineError::Diagram(_) | PipelineError::UnknownMarkedEdge(_) => "diagram",
            PipelineError::Hypercube(_) => "resource",
            PipelineError::Complex(_) => "complex",
            PipelineError::Homology(_) => "homology",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Which {
    Unreduced,
    Reduced,
    Both,
}

impl Which {
    fn unreduced(self) -> bool {
        self != Which::Reduced
    }

    fn reduced(self) -> bool {
        self != Which::Unreduced
    }
}

#[derive(Clone, Debug)]
pub struct Options {
    pub which: Which,
    pub marked: Option<EdgeLabel>,
    pub field: Field,
    pub max_crossings: usize,
    /// Extra marked edges to try when checking that the reduced answer does
    /// not depend on the choice.
    pub invariance_samples: usize,
}

impl Default for Options {
    fn default() -> Self {
        Options {
            which: Which::Both,
            marked: None,
            field: Field::Rational,
            max_crossings: DEFAULT_MAX_CROSSINGS,
            invariance_samples: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

impl Check {
    fn new(name: &str, passed: bool) -> Self {
        Check { name: name.to_string(), passed, detail: None }
    }

    fn with_detail(name: &str, passed: bool, detail: String) -> Self {
        Check { name: name.to_string(), passed, detail: Some(detail) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HomologyResult {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub marked_edge: Option<String>,
    pub homology: HomologyTable,
    pub superpolynomial: LaurentPoly2,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DiagramReport {
    pub name: String,
    pub crossings: usize,
    pub n_black: usize,
    pub n_white: usize,
    pub field: String,
    pub jones: Option<LaurentPoly1>,
    pub reduced_jones: Option<LaurentPoly1>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub unreduced: Option<HomologyResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reduced: Option<HomologyResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub correction: Option<LaurentPoly2>,
    pub checks: Vec<Check>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl DiagramReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    fn failed(name: &str, err: &str) -> Self {
        DiagramReport {
            name: name.to_string(),
            crossings: 0,
            n_black: 0,
            n_white: 0,
            field: String::new(),
            jones: None,
            reduced_jones: None,
            unreduced: None,
            reduced: None,
            correction: None,
            checks: vec![Check::with_detail("pipeline", false, err.to_string())],
            elapsed_ms: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Summary {
    pub total: usize,
    pub passed: usize,
    pub failed: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunReport {
    pub diagrams: Vec<DiagramReport>,
    pub summary: Summary,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub elapsed_ms: Option<u64>,
}

impl RunReport {
    pub fn new(diagrams: Vec<DiagramReport>, elapsed_ms: Option<u64>) -> Self {
        let passed = diagrams.iter().filter(|d| d.passed()).count();
        let summary = Summary { total: diagrams.len(), passed, failed: diagrams.len() - passed };
        RunReport { diagrams, summary, elapsed_ms }
    }

    pub fn passed(&self) -> bool {
        self.summary.failed == 0
    }

    /// The same report with all timings removed.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        r.elapsed_ms = None;
        for d in &mut r.diagrams {
            d.elapsed_ms = None;
        }
        r
    }
}

/// Expected values a diagram is compared against, when known.
#[derive(Clone, Debug, Default)]
pub struct Expected {
    pub jones: Option<LaurentPoly1>,
    pub kh: Option<LaurentPoly2>,
    pub reduced_kh: Option<LaurentPoly2>,
    pub reduced_kh_f2: Option<LaurentPoly2>,
}

fn homology_for(
    hc: &Hypercube,
    d: &KnotDiagram,
    red: Reduction,
    field: Field,
    checks: &mut Vec<Check>,
) -> Result<(ChainComplex, HomologyTable, LaurentPoly2), PipelineError> {
    let c = ChainComplex::build(hc, red)?;
    let tag = if red.is_reduced() { "reduced" } else { "unreduced" };
    match check_nilpotent(&c) {
        Ok(()) => checks.push(Check::new(&format!("{tag}: d^2 = 0"), true)),
        Err(bad) => checks.push(Check::with_detail(
            &format!("{tag}: d^2 = 0"),
            false,
            format!("nonzero blocks {bad:?}"),
        )),
    }
    checks.push(Check::new(&format!("{tag}: grading"), grading_violations(&c) == 0));
    let t = homology_dims(&c, field)?;
    checks.push(Check::new(&format!("{tag}: homology bounded by chains"), bounded_by_chains(&t, &c)));
    let p = superpolynomial(&t, d.n_black(), d.n_white(), red.is_reduced()).value;
    Ok((c, t, p))
}

fn compare<T: PartialEq + std::fmt::Display>(checks: &mut Vec<Check>, name: &str, got: &T, want: &T) {
    if got == want {
        checks.push(Check::new(name, true));
    } else {
        checks.push(Check::with_detail(name, false, format!("got {got}, expected {want}")));
    }
}

/// Jones polynomials, homology and superpolynomials for one diagram.
pub fn analyze(
    name: &str,
    diagram: &KnotDiagram,
    opts: &Options,
    expected: &Expected,
) -> Result<DiagramReport, PipelineError> {
    let start = Instant::now();
    let hc = build_hypercube(diagram, opts.max_crossings)?;
    let jones = state_sum_jones(&hc);
    let rjones = reduced_jones(&jones).ok();
    let mut checks = Vec::new();
    checks.push(Check::new("jones divisible by q + q^-1", rjones.is_some()));
    if let Some(want) = &expected.jones {
        compare(&mut checks, "jones matches table", &jones, want);
    }

    let marked = match &opts.marked {
        Some(l) => diagram.edge_index(l).ok_or_else(|| PipelineError::UnknownMarkedEdge(l.to_string()))?,
        None => diagram.marked_edge(),
    };
    let field = opts.field;

    let mut unreduced = None;
    if opts.which.unreduced() {
        let (_, t, p) = homology_for(&hc, diagram, Reduction::Unreduced, field, &mut checks)?;
        let sp = Superpolynomial { value: p.clone(), reduced: false, n_black: diagram.n_black(), n_white: diagram.n_white() };
        checks.push(Check::new("unreduced: P(T=-1) = jones", euler_check(&sp, &jones)));
        if field == Field::Rational {
            if let Some(want) = &expected.kh {
                compare(&mut checks, "unreduced: matches reference", &p, want);
            }
        }
        unreduced = Some(HomologyResult { marked_edge: None, homology: t, superpolynomial: p });
    }

    let mut reduced = None;
    if opts.which.reduced() {
        let (_, t, p) = homology_for(&hc, diagram, Reduction::Reduced(marked), field, &mut checks)?;
        let ok = rjones.as_ref().is_some_and(|rj| p.evaluate_t(-1).ok().as_ref() == Some(rj));
        checks.push(Check::new("reduced: P(T=-1) = reduced jones", ok));
        let reference = match field {
            Field::Rational => expected.reduced_kh.as_ref(),
            Field::Prime(2) => expected.reduced_kh_f2.as_ref(),
            _ => None,
        };
        if let Some(want) = reference {
            compare(&mut checks, "reduced: matches reference", &p, want);
        }
        let edges = diagram.edge_count();
        let step = (edges / (opts.invariance_samples + 1)).max(1);
        let mut others: Vec<usize> =
            (1..=opts.invariance_samples).map(|k| (marked + k * step) % edges).filter(|&e| e != marked).collect();
        others.dedup();
        for other in others {
            let c = ChainComplex::build(&hc, Reduction::Reduced(other))?;
            let t2 = homology_dims(&c, field)?;
            let p2 = superpolynomial(&t2, diagram.n_black(), diagram.n_white(), true).value;
            compare(
                &mut checks,
                &format!("reduced: same at edge {}", diagram.edge_label(other)),
                &p2,
                &p,
            );
        }
        reduced = Some(HomologyResult {
            marked_edge: Some(diagram.edge_label(marked).to_string()),
            homology: t,
            superpolynomial: p,
        });
    }

    let correction = match (&unreduced, &reduced) {
        (Some(u), Some(r)) => {
            let sp = |x: &HomologyResult, red| Superpolynomial {
                value: x.superpolynomial.clone(),
                reduced: red,
                n_black: diagram.n_black(),
                n_white: diagram.n_white(),
            };
            let corr = correction_term(&sp(u, false), &sp(r, true));
            checks.push(Check::new(
                "correction vanishes at T=-1",
                corr.evaluate_t(-1).is_ok_and(|v| v.is_zero()),
            ));
            Some(corr)
        }
        _ => None,
    };

    Ok(DiagramReport {
        name: name.to_string(),
        crossings: diagram.crossing_count(),
        n_black: diagram.n_black(),
        n_white: diagram.n_white(),
        field: field.to_string(),
        jones: Some(jones),
        reduced_jones: rjones,
        unreduced,
        reduced,
        correction,
        checks,
        elapsed_ms: Some(start.elapsed().as_millis() as u64),
    })
}

fn parse_expected(e: &KnotTableEntry) -> Result<Expected, String> {
    fn opt<T: std::str::FromStr>(s: &Option<String>, what: &str) -> Result<Option<T>, String>
    where
        T::Err: std::fmt::Display,
    {
        s.as_deref().map(|t| t.parse::<T>().map_err(|e| format!("bad {what}: {e}"))).transpose()
    }
    Ok(Expected {
        jones: opt(&e.expected_jones, "jones")?,
        kh: opt(&e.kh, "kh")?,
        reduced_kh: opt(&e.reduced_kh, "reduced_kh")?,
        reduced_kh_f2: opt(&e.reduced_kh_f2, "reduced_kh_f2")?,
    })
}

/// One table entry; failures become failed checks.
pub fn verify_entry(entry: &KnotTableEntry, opts: &Options) -> DiagramReport {
    let expected = match parse_expected(entry) {
        Ok(e) => e,
        Err(msg) => return DiagramReport::failed(&entry.name, &msg),
    };
    let diagram = match entry.diagram() {
        Ok(d) => d,
        Err(e) => return DiagramReport::failed(&entry.name, &e.to_string()),
    };
    analyze(&entry.name, &diagram, opts, &expected)
        .unwrap_or_else(|e| DiagramReport::failed(&entry.name, &e.to_string()))
}

/// Verifies every entry in parallel; the report keeps input order.
pub fn batch_verify(entries: &[KnotTableEntry], opts: &Options) -> RunReport {
    let start = Instant::now();
    let diagrams: Vec<DiagramReport> = entries.par_iter().map(|e| verify_entry(e, opts)).collect();
    RunReport::new(diagrams, Some(start.elapsed().as_millis() as u64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use khova_core::diagram::parse_braid_word;

    #[test]
    fn trefoil_report() {
        let d = parse_braid_word("1,1,1", 2).unwrap();
        let r = analyze("3_1", &d, &Options::default(), &Expected::default()).unwrap();
        assert!(r.passed(), "{:?}", r.checks);
        assert_eq!(r.unreduced.unwrap().superpolynomial.to_string(), "q + q^3 + q^5*T^2 + q^9*T^3");
        assert_eq!(r.reduced.unwrap().superpolynomial.to_string(), "q^2 + q^6*T^2 + q^8*T^3");
        assert_eq!(r.correction.unwrap().to_string(), "q^7*T^2 + q^7*T^3");
    }

    #[test]
    fn unknown_marked_edge() {
        let d = parse_braid_word("1,1,1", 2).unwrap();
        let opts = Options { marked: Some("Z".into()), ..Options::default() };
        assert!(matches!(
            analyze("x", &d, &opts, &Expected::default()),
            Err(PipelineError::UnknownMarkedEdge(_))
        ));
    }

    #[test]
    fn corrupted_entry_fails_alone() {
        let mut entries = crate::table::bundled_table();
        entries.truncate(4);
        entries[2].expected_jones = Some("q^5 + q^-5 + 1".into());
        let r = batch_verify(&entries, &Options::default());
        assert_eq!(r.summary, Summary { total: 4, passed: 3, failed: 1 });
        assert!(!r.diagrams[2].passed());
        assert!(batch_verify(&[], &Options::default()).passed());
    }

    #[test]
    fn report_json_round_trip() {
        let entries = &crate::table::bundled_table()[..3];
        let r = batch_verify(entries, &Options { invariance_samples: 2, ..Options::default() });
        let json = serde_json::to_string_pretty(&r).unwrap();
        let back: RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(serde_json::to_string_pretty(&back).unwrap(), json);
    }
}

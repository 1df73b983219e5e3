//! Plain-text and LaTeX renderings of reports.

use std::fmt::Write;

use crate::pipeline::{DiagramReport, HomologyResult, RunReport};

fn homology_text(out: &mut String, title: &str, h: &HomologyResult, poly_name: &str) {
    let at = h.marked_edge.as_deref().map(|e| format!(" at edge {e}")).unwrap_or_default();
    let _ = writeln!(out, "  {title} homology{at} over {}:", h.homology.field);
    for (i, p) in h.homology.dims.iter().enumerate() {
        let _ = writeln!(out, "    H{i}: {p}");
    }
    let _ = writeln!(out, "  {poly_name} = {}", h.superpolynomial);
}

pub fn diagram_text(d: &DiagramReport) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{}: {} crossings ({} black, {} white)",
        d.name, d.crossings, d.n_black, d.n_white
    );
    if let Some(j) = &d.jones {
        let _ = writeln!(out, "  jones = {j}");
    }
    if let Some(j) = &d.reduced_jones {
        let _ = writeln!(out, "  reduced jones = {j}");
    }
    if let Some(u) = &d.unreduced {
        homology_text(&mut out, "unreduced", u, "P");
    }
    if let Some(r) = &d.reduced {
        homology_text(&mut out, "reduced", r, "Pr");
    }
    if let Some(c) = &d.correction {
        let _ = writeln!(out, "  (q + q^-1) Pr - P = {c}");
    }
    for c in &d.checks {
        let mark = if c.passed { "ok" } else { "FAIL" };
        match &c.detail {
            Some(detail) => {
                let _ = writeln!(out, "  [{mark}] {}: {detail}", c.name);
            }
            None => {
                let _ = writeln!(out, "  [{mark}] {}", c.name);
            }
        }
    }
    out
}

pub fn report_text(r: &RunReport) -> String {
    let mut out: String = r.diagrams.iter().map(diagram_text).collect::<Vec<_>>().join("\n");
    if r.diagrams.len() != 1 {
        let _ = writeln!(out, "\n{} diagrams: {} passed, {} failed", r.summary.total, r.summary.passed, r.summary.failed);
    }
    out
}

pub fn diagram_latex(d: &DiagramReport) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "% {}", d.name);
    if let Some(j) = &d.jones {
        let _ = writeln!(out, "J(q) = {}", j.to_latex());
    }
    if let Some(j) = &d.reduced_jones {
        let _ = writeln!(out, "\\underline{{J}}(q) = {}", j.to_latex());
    }
    for (name, h) in [("P", &d.unreduced), ("\\underline{P}", &d.reduced)] {
        if let Some(h) = h {
            for (i, p) in h.homology.dims.iter().enumerate() {
                let sub = if name == "P" { format!("H_{i}") } else { format!("\\underline{{H}}_{i}") };
                let _ = writeln!(out, "\\dim_q({sub}) = {}", p.to_latex());
            }
            let _ = writeln!(out, "{name}(q|T) = {}", h.superpolynomial.to_latex());
        }
    }
    if let Some(c) = &d.correction {
        let _ = writeln!(out, "(q+q^{{-1}})\\underline{{P}} - P = {}", c.to_latex());
    }
    out
}

pub fn report_latex(r: &RunReport) -> String {
    r.diagrams.iter().map(diagram_latex).collect::<Vec<_>>().join("\n")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pipeline::{analyze, Expected, Options};
    use khova_core::diagram::parse_braid_word;

    #[test]
    fn text_and_latex() {
        let d = parse_braid_word("1,1,1", 2).unwrap();
        let r = analyze("3_1", &d, &Options::default(), &Expected::default()).unwrap();
        let t = diagram_text(&r);
        assert!(t.contains("P = q + q^3 + q^5*T^2 + q^9*T^3"));
        assert!(t.contains("Pr = q^2 + q^6*T^2 + q^8*T^3"));
        assert!(!t.contains("FAIL"));
        let l = diagram_latex(&r);
        assert!(l.contains("q^{2} + q^{6}T^{2} + q^{8}T^{3}"), "{l}");
    }
}

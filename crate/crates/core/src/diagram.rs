//! Link diagrams: signed crossings over a labelled edge set.
//!
//! A crossing record `X(a,b,c,d)` lists its four edge ends counterclockwise,
//! starting from an incoming edge `a`; `c` is the edge that continues `a`
//! through the crossing. Edge orientations are recovered from the `a -> c`
//! strands. The 0-smoothing of a crossing is its oriented smoothing: it
//! joins `a–b, c–d` when `b` is outgoing and `a–d, b–c` otherwise. The sign
//! (black `+` / white `-`) only decides the starting vertex of the cube.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EdgeLabel {
    Index(u32),
    Name(String),
}

impl fmt::Display for EdgeLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EdgeLabel::Index(i) => write!(f, "{i}"),
            EdgeLabel::Name(s) => f.write_str(s),
        }
    }
}

impl FromStr for EdgeLabel {
    type Err = DiagramError;
    fn from_str(s: &str) -> Result<Self, DiagramError> {
        let s = s.trim();
        if !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()) {
            return s
                .parse()
                .map(EdgeLabel::Index)
                .map_err(|_| DiagramError::BadLabel(s.to_string()));
        }
        let mut chars = s.chars();
        let ok = matches!(chars.next(), Some(c) if c.is_ascii_alphabetic() || c == '_')
            && chars.all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '\'');
        if ok {
            Ok(EdgeLabel::Name(s.to_string()))
        } else {
            Err(DiagramError::BadLabel(s.to_string()))
        }
    }
}

impl From<u32> for EdgeLabel {
    fn from(i: u32) -> Self {
        EdgeLabel::Index(i)
    }
}

impl From<&str> for EdgeLabel {
    fn from(s: &str) -> Self {
        EdgeLabel::Name(s.to_string())
    }
}

/// Crossing coloring: black = positive, white = negative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CrossingSign {
    Positive,
    Negative,
}

impl CrossingSign {
    pub fn is_black(self) -> bool {
        self == CrossingSign::Positive
    }

    /// Bit of the starting resolution at this crossing.
    pub fn initial_bit(self) -> bool {
        self == CrossingSign::Negative
    }

    fn symbol(self) -> char {
        match self {
            CrossingSign::Positive => '+',
            CrossingSign::Negative => '-',
        }
    }
}

/// Unvalidated diagram data as read from input.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RawDiagram {
    pub edges: Vec<EdgeLabel>,
    pub crossings: Vec<RawCrossing>,
    pub marked_edge: Option<EdgeLabel>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RawCrossing {
    pub pd: [EdgeLabel; 4],
    /// `None` infers the sign assuming `a` is the under-strand.
    pub sign: Option<CrossingSign>,
}

impl RawCrossing {
    pub fn new(pd: [EdgeLabel; 4], sign: CrossingSign) -> Self {
        RawCrossing { pd, sign: Some(sign) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    NoEdges,
    DuplicateEdgeLabel { edge: EdgeLabel },
    UnknownEdge { crossing: usize, edge: EdgeLabel },
    EdgeIncidence { edge: EdgeLabel, count: usize },
    DuplicateCrossing { first: usize, second: usize },
    MarkedEdgeUnknown { edge: EdgeLabel },
    InconsistentOrientation { edge: EdgeLabel },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::NoEdges => write!(f, "diagram has no edges"),
            Violation::DuplicateEdgeLabel { edge } => write!(f, "edge label {edge} listed twice"),
            Violation::UnknownEdge { crossing, edge } => {
                write!(f, "crossing {crossing} refers to unknown edge {edge}")
            }
            Violation::EdgeIncidence { edge, count } => {
                write!(f, "edge {edge} appears {count} time(s), expected 2")
            }
            Violation::DuplicateCrossing { first, second } => {
                write!(f, "crossings {first} and {second} are identical records")
            }
            Violation::MarkedEdgeUnknown { edge } => write!(f, "marked edge unknown: {edge}"),
            Violation::InconsistentOrientation { edge } => {
                write!(f, "edge {edge} cannot be oriented consistently")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagramError {
    #[error("invalid diagram: {}", join_violations(.0))]
    Invalid(Vec<Violation>),
    #[error("braid letter {letter} out of range for {strands} strand(s)")]
    LetterOutOfRange { letter: i64, strands: usize },
    #[error("braid needs at least one strand")]
    NoStrands,
    #[error("malformed token {token:?}")]
    MalformedToken { token: String },
    #[error("empty PD code")]
    Empty,
    #[error("PD syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("bad edge label {0:?}")]
    BadLabel(String),
}

fn join_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

/// A validated crossing. Edge ends are indices into the diagram's sorted edge list.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub pd: [usize; 4],
    pub sign: CrossingSign,
    b_outgoing: bool,
}

impl Crossing {
    /// Position pairs joined by the given smoothing (`false` = 0-smoothing).
    pub fn smoothing(&self, one: bool) -> [(usize, usize); 2] {
        const AB: [(usize, usize); 2] = [(0, 1), (2, 3)];
        const AD: [(usize, usize); 2] = [(0, 3), (1, 2)];
        match (self.b_outgoing, one) {
            (true, false) | (false, true) => AB,
            _ => AD,
        }
    }

    pub fn b_outgoing(&self) -> bool {
        self.b_outgoing
    }
}

/// Immutable, validated link diagram.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotDiagram {
    edges: Vec<EdgeLabel>,
    crossings: Vec<Crossing>,
    marked_edge: Option<usize>,
}

impl KnotDiagram {
    pub fn new(raw: &RawDiagram) -> Result<Self, DiagramError> {
        let checked = check(raw);
        if !checked.violations.is_empty() {
            return Err(DiagramError::Invalid(checked.violations));
        }
        let index: HashMap<&EdgeLabel, usize> =
            checked.edges.iter().enumerate().map(|(i, e)| (e, i)).collect();
        let crossings = raw
            .crossings
            .iter()
            .zip(&checked.b_outgoing)
            .map(|(rc, &b_out)| {
                let pd = rc.pd.clone().map(|l| index[&l]);
                let sign = rc.sign.unwrap_or(if b_out {
                    CrossingSign::Positive
                } else {
                    CrossingSign::Negative
                });
                Crossing { pd, sign, b_outgoing: b_out }
            })
            .collect();
        let marked_edge = raw.marked_edge.as_ref().map(|m| index[m]);
        Ok(KnotDiagram { edges: checked.edges, crossings, marked_edge })
    }

    pub fn edges(&self) -> &[EdgeLabel] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn crossings(&self) -> &[Crossing] {
        &self.crossings
    }

    pub fn crossing_count(&self) -> usize {
        self.crossings.len()
    }

    pub fn n_black(&self) -> usize {
        self.crossings.iter().filter(|c| c.sign.is_black()).count()
    }

    pub fn n_white(&self) -> usize {
        self.crossings.len() - self.n_black()
    }

    pub fn edge_label(&self, i: usize) -> &EdgeLabel {
        &self.edges[i]
    }

    pub fn edge_index(&self, label: &EdgeLabel) -> Option<usize> {
        self.edges.binary_search(label).ok()
    }

    /// The marked edge; defaults to the smallest label.
    pub fn marked_edge(&self) -> usize {
        self.marked_edge.unwrap_or(0)
    }

    pub fn explicit_marked_edge(&self) -> Option<usize> {
        self.marked_edge
    }

    pub fn with_marked_edge(mut self, label: &EdgeLabel) -> Result<Self, DiagramError> {
        let i = self.edge_index(label).ok_or_else(|| {
            DiagramError::Invalid(vec![Violation::MarkedEdgeUnknown { edge: label.clone() }])
        })?;
        self.marked_edge = Some(i);
        Ok(self)
    }

    /// Same planar graph with new crossing colors.
    pub fn recolored(&self, signs: &[CrossingSign]) -> Self {
        assert_eq!(signs.len(), self.crossings.len());
        let mut out = self.clone();
        for (c, s) in out.crossings.iter_mut().zip(signs) {
            c.sign = *s;
        }
        out
    }

    /// Edges that touch no crossing, i.e. crossingless circles.
    pub fn free_loops(&self) -> Vec<usize> {
        let mut used = vec![false; self.edges.len()];
        for c in &self.crossings {
            for e in c.pd {
                used[e] = true;
            }
        }
        (0..self.edges.len()).filter(|&e| !used[e]).collect()
    }

    pub fn to_raw(&self) -> RawDiagram {
        RawDiagram {
            edges: self.edges.clone(),
            crossings: self
                .crossings
                .iter()
                .map(|c| RawCrossing::new(c.pd.map(|e| self.edges[e].clone()), c.sign))
                .collect(),
            marked_edge: self.marked_edge.map(|e| self.edges[e].clone()),
        }
    }

    /// PD text in the format read by [`parse_pd_code`].
    pub fn to_pd_string(&self) -> String {
        let mut lines: Vec<String> = self
            .crossings
            .iter()
            .map(|c| {
                let [a, b, cc, d] = c.pd.map(|e| self.edges[e].to_string());
                format!("X({a},{b},{cc},{d}){}", c.sign.symbol())
            })
            .collect();
        lines.extend(self.free_loops().into_iter().map(|e| format!("O({})", self.edges[e])));
        lines.join("\n")
    }
}

struct Checked {
    edges: Vec<EdgeLabel>,
    b_outgoing: Vec<bool>,
    violations: Vec<Violation>,
}

/// Checks every diagram invariant and reports all violations found.
pub fn validate(raw: &RawDiagram) -> Result<(), Vec<Violation>> {
    let v = check(raw).violations;
    if v.is_empty() {
        Ok(())
    } else {
        Err(v)
    }
}

fn check(raw: &RawDiagram) -> Checked {
    let mut violations = Vec::new();
    let mut edges = raw.edges.clone();
    edges.sort();
    for w in edges.windows(2) {
        if w[0] == w[1] {
            violations.push(Violation::DuplicateEdgeLabel { edge: w[0].clone() });
        }
    }
    edges.dedup();
    if edges.is_empty() {
        violations.push(Violation::NoEdges);
    }

    let mut counts: BTreeMap<&EdgeLabel, usize> = edges.iter().map(|e| (e, 0)).collect();
    for (i, c) in raw.crossings.iter().enumerate() {
        for e in &c.pd {
            match counts.get_mut(e) {
                Some(n) => *n += 1,
                None => violations.push(Violation::UnknownEdge { crossing: i, edge: e.clone() }),
            }
        }
    }
    for (e, &n) in &counts {
        if n != 0 && n != 2 {
            violations.push(Violation::EdgeIncidence { edge: (*e).clone(), count: n });
        }
    }

    let mut seen: HashMap<&[EdgeLabel; 4], usize> = HashMap::new();
    for (i, c) in raw.crossings.iter().enumerate() {
        if let Some(&first) = seen.get(&c.pd) {
            violations.push(Violation::DuplicateCrossing { first, second: i });
        } else {
            seen.insert(&c.pd, i);
        }
    }

    if let Some(m) = &raw.marked_edge {
        if edges.binary_search(m).is_err() {
            violations.push(Violation::MarkedEdgeUnknown { edge: m.clone() });
        }
    }

    let b_outgoing = if violations.is_empty() {
        match orient(&raw.crossings) {
            Ok(b) => b,
            Err(e) => {
                violations.push(Violation::InconsistentOrientation { edge: e });
                Vec::new()
            }
        }
    } else {
        Vec::new()
    };
    Checked { edges, b_outgoing, violations }
}

/// Union-find with parity over crossing variables `b_out[x]`, plus one
/// constant node (index `n`) with value `false`.
struct ParityUf {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUf {
    fn new(n: usize) -> Self {
        ParityUf { parent: (0..n).collect(), parity: vec![false; n] }
    }

    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (root, p) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.parity[x] ^= p;
        (root, self.parity[x])
    }

    /// Imposes `value(x) xor value(y) = rel`; false on contradiction.
    fn union(&mut self, x: usize, y: usize, rel: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == rel;
        }
        self.parent[rx] = ry;
        self.parity[rx] = px ^ py ^ rel;
        true
    }
}

/// Solves for which crossings have `b` outgoing.
fn orient(crossings: &[RawCrossing]) -> Result<Vec<bool>, EdgeLabel> {
    let n = crossings.len();
    let konst = n;
    let mut occurrences: BTreeMap<&EdgeLabel, Vec<(usize, usize)>> = BTreeMap::new();
    for (x, c) in crossings.iter().enumerate() {
        for (pos, e) in c.pd.iter().enumerate() {
            occurrences.entry(e).or_default().push((x, pos));
        }
    }
    // incoming(x, pos) = value(node) xor offset
    let incoming = |x: usize, pos: usize| -> (usize, bool) {
        match pos {
            0 => (konst, true),
            2 => (konst, false),
            1 => (x, true),
            _ => (x, false),
        }
    };
    let mut uf = ParityUf::new(n + 1);
    for (e, occ) in &occurrences {
        let (u, ku) = incoming(occ[0].0, occ[0].1);
        let (v, kv) = incoming(occ[1].0, occ[1].1);
        // exactly one end is the head of the edge
        if !uf.union(u, v, true ^ ku ^ kv) {
            return Err((*e).clone());
        }
    }
    let (kroot, kpar) = uf.find(konst);
    Ok((0..n)
        .map(|x| {
            let (root, par) = uf.find(x);
            if root == kroot {
                par ^ kpar
            } else {
                // unconstrained strand: take b outgoing for the class root
                !par
            }
        })
        .collect())
}

/// Closure of a braid word given as comma/space separated nonzero integers.
/// Letter `i` crosses strands `|i|` and `|i|+1`; positive letters are black.
pub fn parse_braid_word(text: &str, strands: usize) -> Result<KnotDiagram, DiagramError> {
    if strands == 0 {
        return Err(DiagramError::NoStrands);
    }
    let mut letters = Vec::new();
    for tok in text.split(|c: char| c == ',' || c.is_whitespace()).filter(|t| !t.is_empty()) {
        let v: i64 = tok
            .parse()
            .map_err(|_| DiagramError::MalformedToken { token: tok.to_string() })?;
        if v == 0 || v.unsigned_abs() as usize >= strands {
            return Err(DiagramError::LetterOutOfRange { letter: v, strands });
        }
        letters.push(v);
    }
    KnotDiagram::new(&braid_closure(&letters, strands))
}

/// Builds PD records for the closure of a braid. Edges are numbered from 1 in
/// the order met when following each strand upwards, starting at the bottom
/// of the lowest-numbered untraversed position.
pub fn braid_closure(letters: &[i64], strands: usize) -> RawDiagram {
    // events[p] = crossing indices touching position p, bottom to top
    let mut events: Vec<Vec<usize>> = vec![Vec::new(); strands];
    for (j, &l) in letters.iter().enumerate() {
        let i = l.unsigned_abs() as usize - 1;
        events[i].push(j);
        events[i + 1].push(j);
    }
    // segment (p, t) starts at the t-th event of p; the last wraps around
    let mut seg_base = vec![0usize; strands];
    let mut total = 0;
    for p in 0..strands {
        seg_base[p] = total;
        total += events[p].len().max(1);
    }
    let seg_after = |p: usize, j: usize| -> usize {
        let t = events[p].iter().position(|&x| x == j).unwrap();
        seg_base[p] + t
    };
    let seg_before = |p: usize, j: usize| -> usize {
        let len = events[p].len();
        let t = events[p].iter().position(|&x| x == j).unwrap();
        seg_base[p] + (t + len - 1) % len
    };

    // corners: (bl, br, tr, tl) per crossing
    let corners: Vec<[usize; 4]> = letters
        .iter()
        .enumerate()
        .map(|(j, &l)| {
            let i = l.unsigned_abs() as usize - 1;
            [seg_before(i, j), seg_before(i + 1, j), seg_after(i + 1, j), seg_after(i, j)]
        })
        .collect();

    // traversal numbering
    let mut number = vec![0u32; total];
    let mut next = 1u32;
    for p in 0..strands {
        let start = if events[p].is_empty() { seg_base[p] } else { seg_before(p, events[p][0]) };
        if number[start] != 0 {
            continue;
        }
        let (mut seg, mut pos) = (start, p);
        loop {
            number[seg] = next;
            next += 1;
            if events[pos].is_empty() {
                break;
            }
            // the crossing this segment runs into
            let t = seg - seg_base[pos];
            let j = events[pos][(t + 1) % events[pos].len()];
            let i = letters[j].unsigned_abs() as usize - 1;
            let [_, _, tr, tl] = corners[j];
            (seg, pos) = if pos == i { (tr, i + 1) } else { (tl, i) };
            if number[seg] != 0 {
                break;
            }
        }
    }

    let lab = |s: usize| EdgeLabel::Index(number[s]);
    let crossings = letters
        .iter()
        .zip(&corners)
        .map(|(&l, &[bl, br, tr, tl])| {
            if l > 0 {
                RawCrossing::new([lab(br), lab(tr), lab(tl), lab(bl)], CrossingSign::Positive)
            } else {
                RawCrossing::new([lab(bl), lab(br), lab(tr), lab(tl)], CrossingSign::Negative)
            }
        })
        .collect();
    RawDiagram {
        edges: (1..=total as u32).map(EdgeLabel::Index).collect(),
        crossings,
        marked_edge: None,
    }
}

/// Reads PD text: records `X(a,b,c,d)` with an optional trailing `+` or `-`,
/// `O(e)` for a crossingless circle, separated by whitespace, commas or
/// semicolons. `#` starts a comment. An omitted sign is inferred by reading
/// `a` as the incoming under-strand.
pub fn parse_pd_code(text: &str) -> Result<KnotDiagram, DiagramError> {
    KnotDiagram::new(&parse_pd_raw(text)?)
}

pub fn parse_pd_raw(text: &str) -> Result<RawDiagram, DiagramError> {
    let mut crossings = Vec::new();
    let mut loops = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("");
        let syntax = |message: String| DiagramError::Syntax { line: lineno + 1, message };
        let chars: Vec<char> = line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            if c.is_whitespace() || c == ',' || c == ';' {
                i += 1;
                continue;
            }
            let kind = c.to_ascii_uppercase();
            if kind != 'X' && kind != 'O' {
                return Err(syntax(format!("expected X(...) or O(...), found {c:?}")));
            }
            i += 1;
            let close = match chars.get(i) {
                Some('(') => ')',
                Some('[') => ']',
                _ => return Err(syntax("expected '(' after record tag".into())),
            };
            let end = chars[i..]
                .iter()
                .position(|&ch| ch == close)
                .map(|k| i + k)
                .ok_or_else(|| syntax("unclosed record".into()))?;
            let body: String = chars[i + 1..end].iter().collect();
            let labels = body
                .split(',')
                .map(|s| s.parse::<EdgeLabel>())
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| syntax(e.to_string()))?;
            i = end + 1;
            if kind == 'O' {
                if labels.len() != 1 {
                    return Err(syntax("O(...) takes exactly one edge".into()));
                }
                loops.push(labels[0].clone());
                continue;
            }
            let pd: [EdgeLabel; 4] = labels
                .try_into()
                .map_err(|v: Vec<EdgeLabel>| syntax(format!("crossing needs 4 edges, got {}", v.len())))?;
            let sign = match chars.get(i) {
                Some('+') => {
                    i += 1;
                    Some(CrossingSign::Positive)
                }
                Some('-') => {
                    i += 1;
                    Some(CrossingSign::Negative)
                }
                _ => None,
            };
            crossings.push(RawCrossing { pd, sign });
        }
    }
    if crossings.is_empty() && loops.is_empty() {
        return Err(DiagramError::Empty);
    }
    let mut edges: Vec<EdgeLabel> = crossings.iter().flat_map(|c: &RawCrossing| c.pd.iter().cloned()).collect();
    edges.sort();
    edges.dedup();
    edges.extend(loops);
    Ok(RawDiagram { edges, crossings, marked_edge: None })
}

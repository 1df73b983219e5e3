//! The cube of resolutions: cycle sets at every vertex, signed merge/split
//! descriptors on every edge, and the classical polynomials read off it.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::KnotDiagram;
use crate::gradedalg::{AlgError, LaurentPoly1};

pub const DEFAULT_MAX_CROSSINGS: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HypercubeError {
    #[error("{crossings} crossings exceed the configured cap of {cap}")]
    TooManyCrossings { crossings: usize, cap: usize },
    #[error("label has length {got}, diagram has {expected} crossings")]
    LabelLength { got: usize, expected: usize },
    #[error("star label must contain exactly one '*', found {0}")]
    StarCount(usize),
    #[error("bad resolution label {0:?}")]
    BadLabel(String),
    #[error("cycle counts {source_nu} -> {target_nu} do not differ by one")]
    NotAdjacent { source_nu: usize, target_nu: usize },
}

/// A vertex of the cube: one bit per crossing, position 0 leftmost.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ResolutionLabel {
    bits: u64,
    len: usize,
}

impl ResolutionLabel {
    pub fn new(bits: u64, len: usize) -> Self {
        assert!(len <= 63 && bits >> len == 0, "bits outside label length");
        ResolutionLabel { bits, len }
    }

    pub fn zero(len: usize) -> Self {
        Self::new(0, len)
    }

    pub fn from_bits(bits: &[bool]) -> Self {
        let v = bits.iter().enumerate().fold(0u64, |acc, (k, &b)| acc | (b as u64) << k);
        Self::new(v, bits.len())
    }

    pub fn bits(self) -> u64 {
        self.bits
    }

    pub fn len(self) -> usize {
        self.len
    }

    pub fn is_empty(self) -> bool {
        self.len == 0
    }

    pub fn bit(self, k: usize) -> bool {
        self.bits >> k & 1 == 1
    }

    pub fn flip(self, k: usize) -> Self {
        Self::new(self.bits ^ (1 << k), self.len)
    }

    pub fn distance(self, other: Self) -> usize {
        (self.bits ^ other.bits).count_ones() as usize
    }

    /// Number of 1-bits at positions `< k`.
    pub fn ones_left_of(self, k: usize) -> usize {
        (self.bits & ((1u64 << k) - 1)).count_ones() as usize
    }
}

impl fmt::Display for ResolutionLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for k in 0..self.len {
            f.write_str(if self.bit(k) { "1" } else { "0" })?;
        }
        f.write_str("]")
    }
}

impl FromStr for ResolutionLabel {
    type Err = HypercubeError;
    fn from_str(s: &str) -> Result<Self, HypercubeError> {
        let bits = parse_bits(s)?
            .into_iter()
            .map(|b| match b {
                StarBit::Zero => Ok(false),
                StarBit::One => Ok(true),
                StarBit::Star => Err(HypercubeError::BadLabel(s.to_string())),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(&bits))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarBit {
    Zero,
    One,
    Star,
}

/// Accepts `[1,*,1]`, `1*1` and similar spellings.
pub fn parse_bits(s: &str) -> Result<Vec<StarBit>, HypercubeError> {
    s.chars()
        .filter(|c| !matches!(c, '[' | ']' | ',' | ' '))
        .map(|c| match c {
            '0' => Ok(StarBit::Zero),
            '1' => Ok(StarBit::One),
            '*' => Ok(StarBit::Star),
            _ => Err(HypercubeError::BadLabel(s.to_string())),
        })
        .collect()
}

/// `(-1)^(number of 1s left of the star)`.
pub fn edge_sign(label: &[StarBit]) -> Result<i32, HypercubeError> {
    let stars: Vec<usize> =
        label.iter().enumerate().filter(|(_, b)| **b == StarBit::Star).map(|(k, _)| k).collect();
    if stars.len() != 1 {
        return Err(HypercubeError::StarCount(stars.len()));
    }
    let ones = label[..stars[0]].iter().filter(|b| **b == StarBit::One).count();
    Ok(if ones % 2 == 0 { 1 } else { -1 })
}

/// A closed loop of diagram edges, starting at its smallest edge and heading
/// towards the smaller of that edge's two neighbours.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Cycle {
    edges: Vec<usize>,
}

impl Cycle {
    pub fn edges(&self) -> &[usize] {
        &self.edges
    }

    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    pub fn min_edge(&self) -> usize {
        self.edges[0]
    }

    fn canonical(mut edges: Vec<usize>) -> Self {
        let k = (0..edges.len()).min_by_key(|&i| edges[i]).unwrap();
        edges.rotate_left(k);
        if edges.len() > 2 && edges[edges.len() - 1] < edges[1] {
            edges[1..].reverse();
        }
        Cycle { edges }
    }
}

/// The cycles of one resolution, sorted by smallest edge.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CycleSet {
    cycles: Vec<Cycle>,
    cycle_of_edge: Vec<usize>,
}

impl CycleSet {
    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn nu(&self) -> usize {
        self.cycles.len()
    }

    pub fn cycle_of(&self, edge: usize) -> usize {
        self.cycle_of_edge[edge]
    }

    pub fn lengths(&self) -> Vec<usize> {
        let mut l: Vec<usize> = self.cycles.iter().map(Cycle::len).collect();
        l.sort_unstable();
        l
    }

    /// Index in `self` of a cycle with exactly the edges of `c`, if any.
    pub fn find(&self, c: &Cycle) -> Option<usize> {
        let i = self.cycle_of_edge[c.min_edge()];
        let t = &self.cycles[i];
        (t.len() == c.len() && c.edges.iter().all(|&e| self.cycle_of_edge[e] == i)).then_some(i)
    }
}

/// Traces the cycles of `diagram` under the smoothing `label`.
pub fn smooth(diagram: &KnotDiagram, label: ResolutionLabel) -> Result<CycleSet, HypercubeError> {
    let n = diagram.crossing_count();
    if label.len() != n {
        return Err(HypercubeError::LabelLength { got: label.len(), expected: n });
    }
    let m = diagram.edge_count();
    // occurrence id = 4 * crossing + position
    let mut occ_of_edge: Vec<Vec<usize>> = vec![Vec::with_capacity(2); m];
    let mut partner = vec![0usize; 4 * n];
    let mut edge_at = vec![0usize; 4 * n];
    for (x, c) in diagram.crossings().iter().enumerate() {
        for (pos, &e) in c.pd.iter().enumerate() {
            occ_of_edge[e].push(4 * x + pos);
            edge_at[4 * x + pos] = e;
        }
        for (p, q) in c.smoothing(label.bit(x)) {
            partner[4 * x + p] = 4 * x + q;
            partner[4 * x + q] = 4 * x + p;
        }
    }

    let mut cycle_of_edge = vec![usize::MAX; m];
    let mut cycles = Vec::new();
    for start in 0..m {
        if cycle_of_edge[start] != usize::MAX {
            continue;
        }
        let id = cycles.len();
        let mut edges = vec![start];
        cycle_of_edge[start] = id;
        if !occ_of_edge[start].is_empty() {
            let mut cur = start;
            let mut came = occ_of_edge[start][0];
            loop {
                let occ = &occ_of_edge[cur];
                let exit = if occ[0] == came { occ[1] } else { occ[0] };
                let p = partner[exit];
                let next = edge_at[p];
                if next == start {
                    break;
                }
                cycle_of_edge[next] = id;
                edges.push(next);
                cur = next;
                came = p;
            }
        }
        cycles.push(Cycle::canonical(edges));
    }
    Ok(CycleSet { cycles, cycle_of_edge })
}

/// Which cycles change along a cube edge. Indices refer to the endpoint
/// cycle sets, read in the direction the edge is taken.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum EdgeKind {
    Merge { sources: [usize; 2], target: usize },
    Split { source: usize, targets: [usize; 2] },
}

impl EdgeKind {
    pub fn reversed(self) -> Self {
        match self {
            EdgeKind::Merge { sources, target } => EdgeKind::Split { source: target, targets: sources },
            EdgeKind::Split { source, targets } => EdgeKind::Merge { sources: targets, target: source },
        }
    }
}

/// Compares two resolutions one flip apart. Unchanged cycles are matched by
/// edge set; exactly the changed ones are reported.
pub fn classify_edge(source: &CycleSet, target: &CycleSet) -> Result<EdgeKind, HypercubeError> {
    let not_adjacent = || HypercubeError::NotAdjacent { source_nu: source.nu(), target_nu: target.nu() };
    let gone: Vec<usize> =
        (0..source.nu()).filter(|&i| target.find(&source.cycles[i]).is_none()).collect();
    let new: Vec<usize> =
        (0..target.nu()).filter(|&i| source.find(&target.cycles[i]).is_none()).collect();
    match (gone.as_slice(), new.as_slice()) {
        (&[a, b], &[t]) => Ok(EdgeKind::Merge { sources: [a, b], target: t }),
        (&[s], &[a, b]) => Ok(EdgeKind::Split { source: s, targets: [a, b] }),
        _ => Err(not_adjacent()),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct HypercubeEdge {
    /// Endpoint with 0 at `position`.
    pub low: ResolutionLabel,
    pub position: usize,
    pub sign: i32,
    /// Read from `low` to `high`.
    pub kind: EdgeKind,
}

impl HypercubeEdge {
    pub fn high(&self) -> ResolutionLabel {
        self.low.flip(self.position)
    }

    pub fn star_label(&self) -> Vec<StarBit> {
        (0..self.low.len())
            .map(|k| match (k == self.position, self.low.bit(k)) {
                (true, _) => StarBit::Star,
                (false, true) => StarBit::One,
                (false, false) => StarBit::Zero,
            })
            .collect()
    }

    pub fn star_string(&self) -> String {
        let body: String = self
            .star_label()
            .into_iter()
            .map(|b| match b {
                StarBit::Zero => '0',
                StarBit::One => '1',
                StarBit::Star => '*',
            })
            .collect();
        format!("[{body}]")
    }

    /// Endpoints and kind in the direction of increasing distance from `r_c`.
    pub fn oriented(&self, r_c: ResolutionLabel) -> (ResolutionLabel, ResolutionLabel, EdgeKind) {
        if r_c.bit(self.position) {
            (self.high(), self.low, self.kind.reversed())
        } else {
            (self.low, self.high(), self.kind)
        }
    }
}

#[derive(Clone, Debug)]
pub struct Hypercube {
    n: usize,
    edge_count: usize,
    vertices: Vec<CycleSet>,
    edges: Vec<HypercubeEdge>,
    r_c: ResolutionLabel,
}

impl Hypercube {
    pub fn build(diagram: &KnotDiagram) -> Result<Self, HypercubeError> {
        build_hypercube(diagram, DEFAULT_MAX_CROSSINGS)
    }

    pub fn dimension(&self) -> usize {
        self.n
    }

    pub fn diagram_edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn vertex(&self, r: ResolutionLabel) -> &CycleSet {
        &self.vertices[r.bits() as usize]
    }

    pub fn labels(&self) -> impl Iterator<Item = ResolutionLabel> + '_ {
        (0..self.vertices.len() as u64).map(move |b| ResolutionLabel::new(b, self.n))
    }

    pub fn vertices(&self) -> &[CycleSet] {
        &self.vertices
    }

    pub fn edges(&self) -> &[HypercubeEdge] {
        &self.edges
    }

    pub fn r_c(&self) -> ResolutionLabel {
        self.r_c
    }

    pub fn n_white(&self) -> usize {
        self.r_c.bits().count_ones() as usize
    }

    pub fn n_black(&self) -> usize {
        self.n - self.n_white()
    }

    /// The edge flipping `position` at vertex `r` (either endpoint).
    pub fn edge_at(&self, r: ResolutionLabel, position: usize) -> &HypercubeEdge {
        let b = r.bits() & !(1u64 << position);
        let low_mask = (1u64 << position) - 1;
        let compressed = ((b >> (position + 1)) << position) | (b & low_mask);
        &self.edges[(position << (self.n - 1)) + compressed as usize]
    }

    /// Serializable dump with edge labels resolved through `diagram`.
    pub fn dump(&self, diagram: &KnotDiagram) -> HypercubeDump {
        let names = |c: &Cycle| c.edges().iter().map(|&e| diagram.edge_label(e).to_string()).collect();
        let vertices = self
            .labels()
            .map(|r| VertexDump {
                label: r.to_string(),
                distance: r.distance(self.r_c),
                cycles: self.vertex(r).cycles().iter().map(names).collect(),
            })
            .collect();
        let edges = self
            .edges
            .iter()
            .map(|e| {
                let (from, to, kind) = e.oriented(self.r_c);
                let (a, b) = (self.vertex(from), self.vertex(to));
                let (src, dst): (Vec<usize>, Vec<usize>) = match kind {
                    EdgeKind::Merge { sources, target } => (sources.to_vec(), vec![target]),
                    EdgeKind::Split { source, targets } => (vec![source], targets.to_vec()),
                };
                EdgeDump {
                    star: e.star_string(),
                    sign: e.sign,
                    from: from.to_string(),
                    to: to.to_string(),
                    kind: match kind {
                        EdgeKind::Merge { .. } => "merge".into(),
                        EdgeKind::Split { .. } => "split".into(),
                    },
                    consumed: src.iter().map(|&i| names(&a.cycles()[i])).collect(),
                    produced: dst.iter().map(|&i| names(&b.cycles()[i])).collect(),
                }
            })
            .collect();
        HypercubeDump { crossings: self.n, r_c: self.r_c.to_string(), vertices, edges }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HypercubeDump {
    pub crossings: usize,
    pub r_c: String,
    pub vertices: Vec<VertexDump>,
    pub edges: Vec<EdgeDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexDump {
    pub label: String,
    pub distance: usize,
    pub cycles: Vec<Vec<String>>,
}

/// One cube edge in the direction of the differential.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeDump {
    pub star: String,
    pub sign: i32,
    pub from: String,
    pub to: String,
    pub kind: String,
    pub consumed: Vec<Vec<String>>,
    pub produced: Vec<Vec<String>>,
}

/// Smooths all `2^n` resolutions and classifies every edge.
pub fn build_hypercube(diagram: &KnotDiagram, max_crossings: usize) -> Result<Hypercube, HypercubeError> {
    let n = diagram.crossing_count();
    if n > max_crossings || n > 62 {
        return Err(HypercubeError::TooManyCrossings { crossings: n, cap: max_crossings.min(62) });
    }
    let vertices = (0..1u64 << n)
        .into_par_iter()
        .map(|b| smooth(diagram, ResolutionLabel::new(b, n)))
        .collect::<Result<Vec<_>, _>>()?;

    let half = if n == 0 { 0 } else { 1u64 << (n - 1) };
    let edges = (0..n)
        .flat_map(|k| (0..half).map(move |c| (k, c)))
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(k, c)| {
            // insert a 0 bit at position k
            let low_mask = (1u64 << k) - 1;
            let bits = ((c >> k) << (k + 1)) | (c & low_mask);
            let low = ResolutionLabel::new(bits, n);
            let high = low.flip(k);
            let kind = classify_edge(&vertices[low.bits() as usize], &vertices[high.bits() as usize])?;
            let sign = if low.ones_left_of(k) % 2 == 0 { 1 } else { -1 };
            Ok(HypercubeEdge { low, position: k, sign, kind })
        })
        .collect::<Result<Vec<_>, HypercubeError>>()?;

    let r_c = ResolutionLabel::from_bits(
        &diagram.crossings().iter().map(|c| c.sign.initial_bit()).collect::<Vec<_>>(),
    );
    Ok(Hypercube { n, edge_count: diagram.edge_count(), vertices, edges, r_c })
}

/// One aggregated term of the extended Jones polynomial.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ExtendedTerm {
    pub t_power: usize,
    /// Sorted cycle lengths.
    pub lengths: Vec<usize>,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtendedJones {
    pub n_black: usize,
    pub n_white: usize,
    pub terms: Vec<ExtendedTerm>,
}

impl ExtendedJones {
    /// Sets every cycle to `q + q^{-1}`, `t` to `-q`, and applies the
    /// normalization of [`state_sum_jones`].
    pub fn specialize(&self) -> LaurentPoly1 {
        let d = LaurentPoly1::circle();
        let minus_q = -LaurentPoly1::q();
        let sum: LaurentPoly1 = self
            .terms
            .iter()
            .map(|t| {
                (&minus_q.pow(t.t_power as u32) * &d.pow(t.lengths.len() as u32))
                    .scale(&BigInt::from(t.multiplicity))
            })
            .sum();
        &jones_prefactor(self.n_black, self.n_white) * &sum
    }
}

/// Resolutions grouped by distance from `r_c` and multiset of cycle lengths.
pub fn extended_jones(hc: &Hypercube) -> ExtendedJones {
    let mut agg: BTreeMap<(usize, Vec<usize>), usize> = BTreeMap::new();
    for r in hc.labels() {
        *agg.entry((r.distance(hc.r_c()), hc.vertex(r).lengths())).or_default() += 1;
    }
    ExtendedJones {
        n_black: hc.n_black(),
        n_white: hc.n_white(),
        terms: agg
            .into_iter()
            .map(|((t_power, lengths), multiplicity)| ExtendedTerm { t_power, lengths, multiplicity })
            .collect(),
    }
}

/// `(-1)^{n_white} q^{n_black - 2 n_white}`.
pub fn jones_prefactor(n_black: usize, n_white: usize) -> LaurentPoly1 {
    let c = if n_white % 2 == 0 { 1 } else { -1 };
    LaurentPoly1::monomial(n_black as i64 - 2 * n_white as i64, c)
}

/// Unreduced Jones polynomial as a sum over all resolutions.
pub fn state_sum_jones(hc: &Hypercube) -> LaurentPoly1 {
    let d = LaurentPoly1::circle();
    let max_nu = hc.vertices().iter().map(CycleSet::nu).max().unwrap_or(0);
    let d_pows: Vec<LaurentPoly1> = (0..=max_nu as u32).map(|k| d.pow(k)).collect();
    let mut sum = LaurentPoly1::zero();
    for r in hc.labels() {
        let w = r.distance(hc.r_c());
        let sign = if w % 2 == 0 { 1 } else { -1 };
        sum += &d_pows[hc.vertex(r).nu()].shift(w as i64).scale(&BigInt::from(sign));
    }
    &jones_prefactor(hc.n_black(), hc.n_white()) * &sum
}

/// Divides out one factor of `q + q^{-1}`.
pub fn reduced_jones(jones: &LaurentPoly1) -> Result<LaurentPoly1, AlgError> {
    jones.div_exact(&LaurentPoly1::circle())
}

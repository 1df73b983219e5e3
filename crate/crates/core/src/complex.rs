//! The q-graded Khovanov complex built on a hypercube, unreduced or reduced
//! at a marked edge.
//!
//! A generator is a resolution together with a tag per cycle. Tags are
//! stored as a bitmask over the (sorted) cycles of the resolution, bit set
//! meaning `minus`. Differentials are stored per block: the matrix keyed by
//! `(i, m)` maps the q-degree `m` part of `C_i` to the q-degree `m - 1` part
//! of `C_{i+1}`, with rows indexed by the target basis.

use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::diagram::KnotDiagram;
use crate::gradedalg::{AlgError, Field, IntMatrix, LaurentPoly1};
use crate::hypercube::{jones_prefactor, EdgeKind, Hypercube, ResolutionLabel};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ComplexError {
    #[error("marked edge {edge} is not an edge of a diagram with {edges} edges")]
    MarkedEdgeOutOfRange { edge: usize, edges: usize },
    #[error("reduced cycle cannot carry tag minus")]
    ForbiddenTag,
    #[error("differential entry from q-degree {from} lands in q-degree {to}")]
    Grading { from: i64, to: i64 },
    #[error(transparent)]
    Alg(#[from] AlgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Minus,
    Plus,
}

impl Tag {
    pub fn grading(self) -> i64 {
        match self {
            Tag::Minus => -1,
            Tag::Plus => 1,
        }
    }
}

/// Multiplication. With `first_reduced`, the first factor (and the product)
/// lives on the marked cycle, where only `plus` exists.
pub fn frobenius_merge(a: Tag, b: Tag, first_reduced: bool) -> Result<Option<Tag>, ComplexError> {
    use Tag::*;
    if first_reduced && a == Minus {
        return Err(ComplexError::ForbiddenTag);
    }
    let out = match (a, b) {
        (Plus, Plus) => Some(Plus),
        (Plus, Minus) | (Minus, Plus) => Some(Minus),
        (Minus, Minus) => None,
    };
    Ok(if first_reduced && out == Some(Minus) { None } else { out })
}

/// Comultiplication. With `source_reduced`, the source and the first output
/// factor live on the marked cycle.
pub fn frobenius_split(a: Tag, source_reduced: bool) -> Result<Vec<(Tag, Tag)>, ComplexError> {
    use Tag::*;
    match (a, source_reduced) {
        (Minus, true) => Err(ComplexError::ForbiddenTag),
        (Plus, true) => Ok(vec![(Plus, Minus)]),
        (Plus, false) => Ok(vec![(Plus, Minus), (Minus, Plus)]),
        (Minus, false) => Ok(vec![(Minus, Minus)]),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind", content = "marked_edge")]
pub enum Reduction {
    Unreduced,
    /// Reduced at the given edge index.
    Reduced(usize),
}

impl Reduction {
    pub fn is_reduced(self) -> bool {
        matches!(self, Reduction::Reduced(_))
    }

    pub fn marked_edge(self) -> Option<usize> {
        match self {
            Reduction::Reduced(e) => Some(e),
            Reduction::Unreduced => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ChainBasisElement {
    pub resolution: ResolutionLabel,
    /// Bit `j` set: cycle `j` carries `minus`.
    pub minus_mask: u64,
    pub nu: usize,
}

impl ChainBasisElement {
    pub fn tags(&self) -> Vec<Tag> {
        (0..self.nu)
            .map(|j| if self.minus_mask >> j & 1 == 1 { Tag::Minus } else { Tag::Plus })
            .collect()
    }

    pub fn qdeg(&self) -> i64 {
        self.nu as i64 - 2 * self.minus_mask.count_ones() as i64
    }
}

/// `C_i`, split into q-degree blocks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GradedChainGroup {
    pub degree: usize,
    pub blocks: BTreeMap<i64, Vec<ChainBasisElement>>,
}

impl GradedChainGroup {
    pub fn dim(&self) -> usize {
        self.blocks.values().map(Vec::len).sum()
    }

    pub fn block(&self, m: i64) -> &[ChainBasisElement] {
        self.blocks.get(&m).map_or(&[], Vec::as_slice)
    }

    pub fn qdim(&self) -> LaurentPoly1 {
        qdim(self)
    }
}

pub fn qdim(group: &GradedChainGroup) -> LaurentPoly1 {
    LaurentPoly1::from_terms(group.blocks.iter().map(|(&m, b)| (m, b.len() as i64)))
}

/// Index of the marked cycle at each vertex, when reduced.
fn marked_cycles(hc: &Hypercube, reduction: Reduction) -> Result<Option<Vec<usize>>, ComplexError> {
    match reduction {
        Reduction::Unreduced => Ok(None),
        Reduction::Reduced(e) => {
            let edges = hc.diagram_edge_count();
            if e >= edges {
                return Err(ComplexError::MarkedEdgeOutOfRange { edge: e, edges });
            }
            Ok(Some(hc.vertices().iter().map(|v| v.cycle_of(e)).collect()))
        }
    }
}

pub fn chain_groups(hc: &Hypercube, reduction: Reduction) -> Result<Vec<GradedChainGroup>, ComplexError> {
    let marked = marked_cycles(hc, reduction)?;
    let mut groups: Vec<GradedChainGroup> =
        (0..=hc.dimension()).map(|degree| GradedChainGroup { degree, blocks: BTreeMap::new() }).collect();
    for r in hc.labels() {
        let nu = hc.vertex(r).nu();
        let forbidden = marked.as_ref().map_or(0, |m| 1u64 << m[r.bits() as usize]);
        let g = &mut groups[r.distance(hc.r_c())];
        for mask in 0..1u64 << nu {
            if mask & forbidden != 0 {
                continue;
            }
            let e = ChainBasisElement { resolution: r, minus_mask: mask, nu };
            g.blocks.entry(e.qdeg()).or_default().push(e);
        }
    }
    Ok(groups)
}

#[derive(Clone, Debug)]
pub struct ChainComplex {
    reduction: Reduction,
    n_black: usize,
    n_white: usize,
    groups: Vec<GradedChainGroup>,
    differentials: BTreeMap<(usize, i64), IntMatrix>,
}

/// Images of one generator under the map of one cube edge.
fn edge_image(
    hc: &Hypercube,
    gen: &ChainBasisElement,
    k: usize,
    marked: Option<&Vec<usize>>,
) -> Result<(ChainBasisElement, Vec<u64>, i32), ComplexError> {
    let edge = hc.edge_at(gen.resolution, k);
    let (from, to, kind) = edge.oriented(hc.r_c());
    debug_assert_eq!(from, gen.resolution);
    let (src, dst) = (hc.vertex(from), hc.vertex(to));
    let tag = |j: usize| if gen.minus_mask >> j & 1 == 1 { Tag::Minus } else { Tag::Plus };
    let src_marked = marked.map(|m| m[from.bits() as usize]);
    let dst_marked = marked.map(|m| m[to.bits() as usize]);

    let (touched, outputs): (Vec<usize>, Vec<Vec<(usize, Tag)>>) = match kind {
        EdgeKind::Merge { sources: [a, b], target } => {
            let (a, b) = if Some(b) == src_marked { (b, a) } else { (a, b) };
            let out = frobenius_merge(tag(a), tag(b), Some(a) == src_marked)?;
            (vec![a, b], out.into_iter().map(|t| vec![(target, t)]).collect())
        }
        EdgeKind::Split { source, targets: [a, b] } => {
            let (a, b) = if Some(b) == dst_marked { (b, a) } else { (a, b) };
            let out = frobenius_split(tag(source), Some(source) == src_marked)?;
            (vec![source], out.into_iter().map(|(x, y)| vec![(a, x), (b, y)]).collect())
        }
    };

    let mut base = 0u64;
    for j in (0..src.nu()).filter(|j| !touched.contains(j)) {
        if tag(j) == Tag::Minus {
            let t = dst.find(&src.cycles()[j]).expect("unchanged cycle missing");
            base |= 1 << t;
        }
    }
    let masks = outputs
        .into_iter()
        .map(|outs| {
            outs.into_iter().fold(base, |m, (t, tg)| if tg == Tag::Minus { m | 1 << t } else { m })
        })
        .collect();
    let target = ChainBasisElement { resolution: to, minus_mask: 0, nu: dst.nu() };
    Ok((target, masks, edge.sign))
}

pub fn build_differentials(hc: &Hypercube, reduction: Reduction) -> Result<ChainComplex, ComplexError> {
    let groups = chain_groups(hc, reduction)?;
    let marked = marked_cycles(hc, reduction)?;
    let r_c = hc.r_c();
    let n = hc.dimension();

    let keys: Vec<(usize, i64)> = groups
        .iter()
        .take(n)
        .flat_map(|g| g.blocks.keys().map(move |&m| (g.degree, m)))
        .collect();
    let blocks = keys
        .into_par_iter()
        .map(|(i, m)| {
            let source = groups[i].block(m);
            let target = groups[i + 1].block(m - 1);
            let index: HashMap<(u64, u64), usize> = target
                .iter()
                .enumerate()
                .map(|(row, e)| ((e.resolution.bits(), e.minus_mask), row))
                .collect();
            let mut mat = IntMatrix::zeros(target.len(), source.len());
            for (col, gen) in source.iter().enumerate() {
                for k in (0..n).filter(|&k| gen.resolution.bit(k) == r_c.bit(k)) {
                    let (tgt, masks, sign) = edge_image(hc, gen, k, marked.as_ref())?;
                    for mask in masks {
                        let img = ChainBasisElement { minus_mask: mask, ..tgt };
                        if img.qdeg() != m - 1 {
                            return Err(ComplexError::Grading { from: m, to: img.qdeg() });
                        }
                        let row = *index
                            .get(&(img.resolution.bits(), mask))
                            .ok_or(ComplexError::ForbiddenTag)?;
                        mat.add_at(row, col, &BigInt::from(sign));
                    }
                }
            }
            Ok(((i, m), mat))
        })
        .collect::<Result<Vec<_>, ComplexError>>()?;
    let differentials = blocks.into_iter().filter(|(_, mat)| !mat.is_zero()).collect();

    Ok(ChainComplex { reduction, n_black: hc.n_black(), n_white: hc.n_white(), groups, differentials })
}

impl ChainComplex {
    pub fn build(hc: &Hypercube, reduction: Reduction) -> Result<Self, ComplexError> {
        build_differentials(hc, reduction)
    }

    pub fn reduction(&self) -> Reduction {
        self.reduction
    }

    pub fn is_reduced(&self) -> bool {
        self.reduction.is_reduced()
    }

    pub fn n_black(&self) -> usize {
        self.n_black
    }

    pub fn n_white(&self) -> usize {
        self.n_white
    }

    pub fn groups(&self) -> &[GradedChainGroup] {
        &self.groups
    }

    pub fn group(&self, i: usize) -> &GradedChainGroup {
        &self.groups[i]
    }

    /// Number of homological degrees, `n + 1`.
    pub fn len(&self) -> usize {
        self.groups.len()
    }

    pub fn is_empty(&self) -> bool {
        self.groups.is_empty()
    }

    pub fn differential(&self, i: usize, m: i64) -> Option<&IntMatrix> {
        self.differentials.get(&(i, m))
    }

    pub fn differentials(&self) -> &BTreeMap<(usize, i64), IntMatrix> {
        &self.differentials
    }

    /// Every nonzero entry as `(source, target, coefficient)`.
    pub fn entries(&self) -> impl Iterator<Item = (&ChainBasisElement, &ChainBasisElement, &BigInt)> + '_ {
        self.differentials.iter().flat_map(move |(&(i, m), mat)| {
            let src = self.groups[i].block(m);
            let dst = self.groups[i + 1].block(m - 1);
            mat.entries().map(move |(r, c, v)| (&src[c], &dst[r], v))
        })
    }

    /// Ranks of all nonzero blocks over `field`.
    pub fn ranks(&self, field: Field) -> Result<BTreeMap<(usize, i64), usize>, AlgError> {
        field.check()?;
        self.differentials
            .par_iter()
            .map(|(&k, mat)| Ok((k, mat.rank(field)?)))
            .collect::<Result<Vec<_>, AlgError>>()
            .map(|v| v.into_iter().collect())
    }

    /// q-dimension of the image of the map out of `C_i`, graded in `C_{i+1}`.
    pub fn image_qdim(&self, i: usize, field: Field) -> Result<LaurentPoly1, AlgError> {
        let mut out = LaurentPoly1::zero();
        for (&(j, m), mat) in self.differentials.range((i, i64::MIN)..=(i, i64::MAX)) {
            debug_assert_eq!(j, i);
            out.add_term(m - 1, BigInt::from(mat.rank(field)?));
        }
        Ok(out)
    }

    /// q-dimension of the kernel of the map out of `C_i`.
    pub fn kernel_qdim(&self, i: usize, field: Field) -> Result<LaurentPoly1, AlgError> {
        Ok(&self.groups[i].qdim() - &self.image_qdim(i, field)?.shift(1))
    }

    /// `(-1)^{n_w} q^{n_b - 2 n_w} Σ (-q)^i qdim(C_i)`, with the extra `q^{-1}`
    /// when reduced.
    pub fn euler_characteristic(&self) -> LaurentPoly1 {
        let sum: LaurentPoly1 = self
            .groups
            .iter()
            .map(|g| {
                let s = if g.degree % 2 == 0 { 1 } else { -1 };
                g.qdim().shift(g.degree as i64).scale(&BigInt::from(s))
            })
            .sum();
        let shift = if self.is_reduced() { -1 } else { 0 };
        (&jones_prefactor(self.n_black, self.n_white) * &sum).shift(shift)
    }

    pub fn dump(&self, diagram: &KnotDiagram) -> ComplexDump {
        ComplexDump {
            reduced: self.is_reduced(),
            marked_edge: self.reduction.marked_edge().map(|e| diagram.edge_label(e).to_string()),
            n_black: self.n_black,
            n_white: self.n_white,
            groups: self
                .groups
                .iter()
                .map(|g| GroupDump { degree: g.degree, dim: g.dim(), qdim: g.qdim() })
                .collect(),
            blocks: self
                .differentials
                .iter()
                .map(|(&(degree, qdeg), mat)| BlockDump {
                    degree,
                    qdeg,
                    rows: mat.rows(),
                    cols: mat.cols(),
                    nnz: mat.nnz(),
                })
                .collect(),
        }
    }
}

/// Blocks whose composite `d_{i+1} d_i` is nonzero, as `(i, m)`.
pub fn check_nilpotent(complex: &ChainComplex) -> Result<(), Vec<(usize, i64)>> {
    let bad: Vec<(usize, i64)> = complex
        .differentials
        .par_iter()
        .filter_map(|(&(i, m), first)| {
            let second = complex.differential(i + 1, m - 1)?;
            let prod = second.mul(first).expect("block shapes agree");
            (!prod.is_zero()).then_some((i, m))
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        Err(bad)
    }
}

/// Entries whose target q-degree is not one below the source's.
pub fn grading_violations(complex: &ChainComplex) -> usize {
    complex.entries().filter(|(s, t, v)| !v.is_zero() && t.qdeg() != s.qdeg() - 1).count()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDump {
    pub reduced: bool,
    pub marked_edge: Option<String>,
    pub n_black: usize,
    pub n_white: usize,
    pub groups: Vec<GroupDump>,
    pub blocks: Vec<BlockDump>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GroupDump {
    pub degree: usize,
    pub dim: usize,
    pub qdim: LaurentPoly1,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockDump {
    pub degree: usize,
    pub qdeg: i64,
    pub rows: usize,
    pub cols: usize,
    pub nnz: usize,
}

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use super::AlgError;

/// Coefficient field for rank computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Field {
    Rational,
    Prime(u64),
}

impl Field {
    pub fn check(self) -> Result<Self, AlgError> {
        match self {
            Field::Prime(p) if !is_prime(p) => Err(AlgError::NotPrime(p)),
            _ => Ok(self),
        }
    }
}

impl fmt::Display for Field {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Field::Rational => f.write_str("Q"),
            Field::Prime(p) => write!(f, "F{p}"),
        }
    }
}

pub fn is_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Sparse integer matrix, stored as one ordered map per row.
#[derive(Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BTreeMap<usize, BigInt>>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BTreeMap::new(); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_dense<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let mut m = Self::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), cols, "ragged dense matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.data.iter().map(BTreeMap::len).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(BTreeMap::is_empty)
    }

    pub fn get(&self, i: usize, j: usize) -> BigInt {
        self.data[i].get(&j).cloned().unwrap_or_default()
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of bounds");
        if v.is_zero() {
            self.data[i].remove(&j);
        } else {
            self.data[i].insert(j, v);
        }
    }

    pub fn add_at(&mut self, i: usize, j: usize, v: &BigInt) {
        let cur = self.get(i, j);
        self.set(i, j, cur + v);
    }

    /// Nonzero entries in row-major order.
    pub fn entries(&self) -> impl Iterator<Item = (usize, usize, &BigInt)> + '_ {
        self.data
            .iter()
            .enumerate()
            .flat_map(|(i, row)| row.iter().map(move |(j, v)| (i, *j, v)))
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.cols, self.rows);
        for (i, j, v) in self.entries() {
            t.data[j].insert(i, v.clone());
        }
        t
    }

    pub fn permuted(&self, row_perm: &[usize], col_perm: &[usize]) -> Self {
        let mut out = Self::zeros(self.rows, self.cols);
        for (i, j, v) in self.entries() {
            out.set(row_perm[i], col_perm[j], v.clone());
        }
        out
    }

    /// Product `self * rhs`.
    pub fn mul(&self, rhs: &IntMatrix) -> Result<IntMatrix, AlgError> {
        if self.cols != rhs.rows {
            return Err(AlgError::ShapeMismatch {
                left: (self.rows, self.cols),
                right: (rhs.rows, rhs.cols),
            });
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for (i, row) in self.data.iter().enumerate() {
            let acc = &mut out.data[i];
            for (k, a) in row {
                for (j, b) in &rhs.data[*k] {
                    *acc.entry(*j).or_default() += a * b;
                }
            }
            acc.retain(|_, v| !v.is_zero());
        }
        Ok(out)
    }

    pub fn rank(&self, field: Field) -> Result<usize, AlgError> {
        rank(self, field)
    }
}

impl fmt::Debug for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "IntMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self.get(i, j).to_string()).collect();
            writeln!(f, "  {}", row.join(" "))?;
        }
        write!(f, "]")
    }
}

/// Rank over the rationals or over a prime field.
///
/// Over Q this is fraction-free sparse elimination: the pivot is the entry of
/// smallest magnitude in the shortest remaining row, eliminated rows are
/// cross-multiplied and then divided by their content so that entries stay
/// small. No division ever leaves the integers.
pub fn rank(m: &IntMatrix, field: Field) -> Result<usize, AlgError> {
    match field.check()? {
        Field::Rational => Ok(rank_integer(m)),
        Field::Prime(p) => Ok(rank_mod_p(m, p)),
    }
}

type SparseRow<T> = Vec<(usize, T)>;

fn pick_pivot<T>(rows: &[SparseRow<T>], magnitude: impl Fn(&T) -> u64) -> Option<(usize, usize)> {
    // (row, position within row)
    let mut best: Option<(usize, usize, usize, u64)> = None;
    for (r, row) in rows.iter().enumerate() {
        if row.is_empty() {
            continue;
        }
        let (pos, mag) = row
            .iter()
            .enumerate()
            .map(|(k, (_, v))| (k, magnitude(v)))
            .min_by_key(|&(_, m)| m)
            .unwrap();
        let key = (row.len(), mag);
        if best.is_none_or(|(_, _, len, bm)| key < (len, bm)) {
            best = Some((r, pos, row.len(), mag));
        }
    }
    best.map(|(r, pos, _, _)| (r, pos))
}

fn find_col<T>(row: &SparseRow<T>, col: usize) -> Option<usize> {
    row.binary_search_by_key(&col, |(c, _)| *c).ok()
}

/// `a*x + b*y` on sparse rows, merging by column.
fn combine<T, F>(x: &SparseRow<T>, y: &SparseRow<T>, mut f: F) -> SparseRow<T>
where
    T: Clone,
    F: FnMut(Option<&T>, Option<&T>) -> Option<T>,
{
    let mut out = Vec::with_capacity(x.len() + y.len());
    let (mut i, mut j) = (0, 0);
    while i < x.len() || j < y.len() {
        let ci = x.get(i).map(|e| e.0);
        let cj = y.get(j).map(|e| e.0);
        let (col, v) = match (ci, cj) {
            (Some(a), Some(b)) if a == b => {
                i += 1;
                j += 1;
                (a, f(Some(&x[i - 1].1), Some(&y[j - 1].1)))
            }
            (Some(a), Some(b)) if a < b => {
                i += 1;
                (a, f(Some(&x[i - 1].1), None))
            }
            (Some(a), None) => {
                i += 1;
                (a, f(Some(&x[i - 1].1), None))
            }
            (_, Some(b)) => {
                j += 1;
                (b, f(None, Some(&y[j - 1].1)))
            }
            (None, None) => unreachable!(),
        };
        if let Some(v) = v {
            out.push((col, v));
        }
    }
    out
}

fn rank_integer(m: &IntMatrix) -> usize {
    let mut rows: Vec<SparseRow<BigInt>> = m
        .data
        .iter()
        .map(|r| r.iter().map(|(c, v)| (*c, v.clone())).collect::<Vec<_>>())
        .filter(|r: &SparseRow<BigInt>| !r.is_empty())
        .collect();
    let mag = |v: &BigInt| v.abs().to_u64().unwrap_or(u64::MAX);
    let mut rank = 0;
    while let Some((r, pos)) = pick_pivot(&rows, mag) {
        let pivot_row = rows.swap_remove(r);
        let (col, pivot) = pivot_row[pos].clone();
        rank += 1;
        for row in rows.iter_mut() {
            let Some(k) = find_col(row, col) else { continue };
            let factor = row[k].1.clone();
            // row <- pivot*row - factor*pivot_row
            let mut next = combine(row, &pivot_row, |a, b| {
                let v = match (a, b) {
                    (Some(a), Some(b)) => &pivot * a - &factor * b,
                    (Some(a), None) => &pivot * a,
                    (None, Some(b)) => -(&factor * b),
                    (None, None) => BigInt::zero(),
                };
                (!v.is_zero()).then_some(v)
            });
            let content = next.iter().fold(BigInt::zero(), |g, (_, v)| g.gcd(v));
            if !content.is_zero() && !content.is_one() {
                for (_, v) in next.iter_mut() {
                    *v /= &content;
                }
            }
            *row = next;
        }
        rows.retain(|r| !r.is_empty());
    }
    rank
}

fn mod_inv(a: u64, p: u64) -> u64 {
    // Fermat; p is prime
    let mut result = 1u128;
    let mut base = a as u128 % p as u128;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            result = result * base % p as u128;
        }
        base = base * base % p as u128;
        e >>= 1;
    }
    result as u64
}

fn rank_mod_p(m: &IntMatrix, p: u64) -> usize {
    let pb = BigInt::from(p);
    let mut rows: Vec<SparseRow<u64>> = m
        .data
        .iter()
        .map(|r| {
            r.iter()
                .filter_map(|(c, v)| {
                    let x = v.mod_floor(&pb).to_u64().unwrap();
                    (x != 0).then_some((*c, x))
                })
                .collect::<Vec<_>>()
        })
        .filter(|r| !r.is_empty())
        .collect();
    let mut rank = 0;
    let pm = p as u128;
    while let Some((r, pos)) = pick_pivot(&rows, |_| 0) {
        let pivot_row = rows.swap_remove(r);
        let (col, pivot) = pivot_row[pos];
        let inv = mod_inv(pivot, p) as u128;
        rank += 1;
        for row in rows.iter_mut() {
            let Some(k) = find_col(row, col) else { continue };
            // row <- row - (row[col]/pivot) * pivot_row
            let f = (row[k].1 as u128 * inv % pm) as u64;
            let neg_f = (p - f) as u128;
            *row = combine(row, &pivot_row, |a, b| {
                let a = a.copied().unwrap_or(0) as u128;
                let b = b.copied().unwrap_or(0) as u128;
                let v = ((a + neg_f * b) % pm) as u64;
                (v != 0).then_some(v)
            });
        }
        rows.retain(|r| !r.is_empty());
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    /// Determinant by permutation expansion.
    fn det_leibniz(a: &[Vec<i128>]) -> i128 {
        fn perms(n: usize) -> Vec<Vec<usize>> {
            if n == 0 {
                return vec![vec![]];
            }
            let mut out = Vec::new();
            for p in perms(n - 1) {
                for k in 0..n {
                    let mut q = p.clone();
                    q.insert(k, n - 1);
                    out.push(q);
                }
            }
            out
        }
        let n = a.len();
        perms(n)
            .into_iter()
            .map(|p| {
                let inversions = (0..n)
                    .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                    .filter(|&(i, j)| p[i] > p[j])
                    .count();
                let prod: i128 = (0..n).map(|i| a[i][p[i]]).product();
                if inversions % 2 == 0 { prod } else { -prod }
            })
            .sum()
    }

    fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
        (0u32..1 << n)
            .filter(|m| m.count_ones() as usize == k)
            .map(|m| (0..n).filter(|i| m >> i & 1 == 1).collect())
            .collect()
    }

    /// Largest k with a nonzero k x k minor.
    fn rank_by_minors(a: &[Vec<i64>]) -> usize {
        let (r, c) = (a.len(), a[0].len());
        for k in (1..=r.min(c)).rev() {
            for rs in subsets(r, k) {
                for cs in subsets(c, k) {
                    let sub: Vec<Vec<i128>> =
                        rs.iter().map(|&i| cs.iter().map(|&j| a[i][j] as i128).collect()).collect();
                    if det_leibniz(&sub) != 0 {
                        return k;
                    }
                }
            }
        }
        0
    }

    #[test]
    fn identity_and_zero() {
        assert_eq!(IntMatrix::identity(2).rank(Field::Rational).unwrap(), 2);
        assert_eq!(IntMatrix::zeros(3, 4).rank(Field::Rational).unwrap(), 0);
        assert_eq!(IntMatrix::zeros(0, 0).rank(Field::Prime(2)).unwrap(), 0);
    }

    #[test]
    fn non_prime_modulus_rejected() {
        assert_eq!(IntMatrix::identity(2).rank(Field::Prime(4)), Err(AlgError::NotPrime(4)));
        assert_eq!(IntMatrix::identity(2).rank(Field::Prime(1)), Err(AlgError::NotPrime(1)));
    }

    #[test]
    fn characteristic_two_drops_rank() {
        let m = IntMatrix::from_dense(&[vec![1, 1], vec![1, -1]]);
        assert_eq!(m.rank(Field::Rational).unwrap(), 2);
        assert_eq!(m.rank(Field::Prime(2)).unwrap(), 1);
        assert_eq!(m.rank(Field::Prime(3)).unwrap(), 2);
    }

    #[test]
    fn random_matrices_match_minor_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for trial in 0..60 {
            let (r, c) = if trial < 20 { (5, 7) } else { (rng.gen_range(1..=6), rng.gen_range(1..=6)) };
            // low-rank products mixed in so the oracle sees deficient cases
            let a: Vec<Vec<i64>> = if trial % 3 == 0 {
                let k = rng.gen_range(1..=3);
                let u: Vec<Vec<i64>> = (0..r).map(|_| (0..k).map(|_| rng.gen_range(-3..=3)).collect()).collect();
                let v: Vec<Vec<i64>> = (0..k).map(|_| (0..c).map(|_| rng.gen_range(-3..=3)).collect()).collect();
                (0..r).map(|i| (0..c).map(|j| (0..k).map(|l| u[i][l] * v[l][j]).sum()).collect()).collect()
            } else {
                (0..r).map(|_| (0..c).map(|_| rng.gen_range(-4..=4)).collect()).collect()
            };
            let m = IntMatrix::from_dense(&a);
            let expected = rank_by_minors(&a);
            assert_eq!(m.rank(Field::Rational).unwrap(), expected, "trial {trial}: {a:?}");
            assert!(m.rank(Field::Prime(2)).unwrap() <= expected);
            assert!(m.rank(Field::Prime(3)).unwrap() <= expected);
        }
    }

    #[test]
    fn product_and_transpose() {
        let a = IntMatrix::from_dense(&[vec![1, 2, 0], vec![0, -1, 3]]);
        let b = IntMatrix::from_dense(&[vec![1], vec![1], vec![1]]);
        let ab = a.mul(&b).unwrap();
        assert_eq!(ab, IntMatrix::from_dense(&[vec![3], vec![2]]));
        assert!(a.mul(&a).is_err());
        assert_eq!(a.transpose().transpose(), a);
    }
}

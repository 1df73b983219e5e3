use std::collections::BTreeMap;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, AddAssign, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::de::{self, Deserializer};
use serde::ser::{SerializeSeq, Serializer};
use serde::{Deserialize, Serialize};

use super::AlgError;

/// Exponent group of a Laurent ring. The derived `Ord` must be a monomial
/// order, i.e. compatible with `add`.
pub trait Exponent: Copy + Ord + Hash + fmt::Debug {
    fn zero() -> Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
}

impl Exponent for i64 {
    fn zero() -> Self {
        0
    }
    fn add(self, other: Self) -> Self {
        self + other
    }
    fn sub(self, other: Self) -> Self {
        self - other
    }
}

/// Exponent of the monomial `q^q * T^t`, ordered by `q` first.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QT {
    pub q: i64,
    pub t: i64,
}

impl QT {
    pub const fn new(q: i64, t: i64) -> Self {
        QT { q, t }
    }
}

impl Exponent for QT {
    fn zero() -> Self {
        QT::new(0, 0)
    }
    fn add(self, other: Self) -> Self {
        QT::new(self.q + other.q, self.t + other.t)
    }
    fn sub(self, other: Self) -> Self {
        QT::new(self.q - other.q, self.t - other.t)
    }
}

/// Laurent polynomial with arbitrary-precision integer coefficients.
/// Zero coefficients are never stored.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Laurent<E: Exponent> {
    terms: BTreeMap<E, BigInt>,
}

/// Laurent polynomial in `q`.
pub type LaurentPoly1 = Laurent<i64>;
/// Laurent polynomial in `q` and `T`.
pub type LaurentPoly2 = Laurent<QT>;

impl<E: Exponent> Default for Laurent<E> {
    fn default() -> Self {
        Self::zero()
    }
}

impl<E: Exponent> Laurent<E> {
    pub fn zero() -> Self {
        Laurent { terms: BTreeMap::new() }
    }

    pub fn one() -> Self {
        Self::monomial(E::zero(), 1)
    }

    pub fn monomial(exp: E, coeff: impl Into<BigInt>) -> Self {
        let mut p = Self::zero();
        p.add_term(exp, coeff.into());
        p
    }

    pub fn from_terms<C: Into<BigInt>>(terms: impl IntoIterator<Item = (E, C)>) -> Self {
        let mut p = Self::zero();
        for (e, c) in terms {
            p.add_term(e, c.into());
        }
        p
    }

    pub fn add_term(&mut self, exp: E, coeff: BigInt) {
        if coeff.is_zero() {
            return;
        }
        match self.terms.entry(exp) {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(coeff);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += coeff;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exp: E) -> BigInt {
        self.terms.get(&exp).cloned().unwrap_or_default()
    }

    /// Terms in increasing exponent order.
    pub fn terms(&self) -> impl DoubleEndedIterator<Item = (E, &BigInt)> + '_ {
        self.terms.iter().map(|(e, c)| (*e, c))
    }

    pub fn lowest(&self) -> Option<(E, &BigInt)> {
        self.terms.iter().next().map(|(e, c)| (*e, c))
    }

    pub fn leading(&self) -> Option<(E, &BigInt)> {
        self.terms.iter().next_back().map(|(e, c)| (*e, c))
    }

    /// Multiplies by the monomial `x^exp`.
    pub fn shift(&self, exp: E) -> Self {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (e.add(exp), c.clone())).collect(),
        }
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Laurent {
            terms: self.terms.iter().map(|(e, x)| (*e, x * c)).collect(),
        }
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// True if every coefficient is `>= 0`.
    pub fn is_nonnegative(&self) -> bool {
        self.terms.values().all(|c| !c.is_negative())
    }

    /// Exact quotient `self / divisor`; fails if the division leaves a remainder.
    ///
    /// Long division from the leading term down. If `divisor` divides `self`
    /// every quotient term lies at or above `low(self) - low(divisor)`, which
    /// bounds the loop for Laurent inputs.
    pub fn div_exact(&self, divisor: &Self) -> Result<Self, AlgError> {
        let (lead_exp, lead_coeff) = match divisor.leading() {
            Some((e, c)) => (e, c.clone()),
            None => return Err(AlgError::DivisionByZero),
        };
        let Some((low_a, _)) = self.lowest() else {
            return Ok(Self::zero());
        };
        let (low_b, _) = divisor.lowest().expect("nonzero divisor");
        let floor = low_a.sub(low_b);

        let mut rem = self.clone();
        let mut quot = Self::zero();
        while let Some((e, c)) = rem.leading() {
            let qe = e.sub(lead_exp);
            let (qc, r) = c.div_rem(&lead_coeff);
            if qe < floor || !r.is_zero() {
                return Err(AlgError::NotDivisible);
            }
            let term = Self::monomial(qe, qc.clone());
            rem = &rem - &(divisor * &term);
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }
}

impl LaurentPoly1 {
    /// The variable `q`.
    pub fn q() -> Self {
        Self::monomial(1, 1)
    }

    /// `q + q^{-1}`, the quantum dimension of a single circle.
    pub fn circle() -> Self {
        Self::from_terms([(1, 1), (-1, 1)])
    }

    /// Substitutes `q -> q^{-1}`.
    pub fn mirror(&self) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (-e, c.clone())))
    }

    /// Embeds into the two-variable ring with `T^0`.
    pub fn to_qt(&self) -> LaurentPoly2 {
        LaurentPoly2::from_terms(self.terms().map(|(e, c)| (QT::new(e, 0), c.clone())))
    }

    pub fn eval_i64(&self, q: i64) -> Option<BigInt> {
        let mut acc = BigInt::zero();
        for (e, c) in self.terms() {
            if e < 0 && q.abs() != 1 {
                return None;
            }
            acc += c * BigInt::from(q).pow(e.unsigned_abs() as u32);
        }
        Some(acc)
    }
}

impl LaurentPoly2 {
    pub fn q() -> Self {
        Self::monomial(QT::new(1, 0), 1)
    }

    pub fn t() -> Self {
        Self::monomial(QT::new(0, 1), 1)
    }

    /// Substitutes `T = value`; only `value = ±1` keeps integer exponents exact.
    pub fn evaluate_t(&self, value: i64) -> Result<LaurentPoly1, AlgError> {
        if value != 1 && value != -1 {
            return Err(AlgError::UnsupportedSpecialization(value));
        }
        let mut out = LaurentPoly1::zero();
        for (e, c) in self.terms() {
            let c = if value == -1 && e.t.is_odd() { -c.clone() } else { c.clone() };
            out.add_term(e.q, c);
        }
        Ok(out)
    }

    /// Substitutes `q -> q^{-1}, T -> T^{-1}`.
    pub fn mirror(&self) -> Self {
        Self::from_terms(self.terms().map(|(e, c)| (QT::new(-e.q, -e.t), c.clone())))
    }
}

impl<E: Exponent> Add for &Laurent<E> {
    type Output = Laurent<E>;
    fn add(self, rhs: Self) -> Laurent<E> {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl<E: Exponent> Add for Laurent<E> {
    type Output = Laurent<E>;
    fn add(mut self, rhs: Self) -> Laurent<E> {
        self += &rhs;
        self
    }
}

impl<E: Exponent> AddAssign<&Laurent<E>> for Laurent<E> {
    fn add_assign(&mut self, rhs: &Laurent<E>) {
        for (e, c) in rhs.terms() {
            self.add_term(e, c.clone());
        }
    }
}

impl<E: Exponent> Neg for &Laurent<E> {
    type Output = Laurent<E>;
    fn neg(self) -> Laurent<E> {
        Laurent {
            terms: self.terms.iter().map(|(e, c)| (*e, -c)).collect(),
        }
    }
}

impl<E: Exponent> Neg for Laurent<E> {
    type Output = Laurent<E>;
    fn neg(self) -> Laurent<E> {
        -&self
    }
}

impl<E: Exponent> Sub for &Laurent<E> {
    type Output = Laurent<E>;
    fn sub(self, rhs: Self) -> Laurent<E> {
        let mut out = self.clone();
        for (e, c) in rhs.terms() {
            out.add_term(e, -c);
        }
        out
    }
}

impl<E: Exponent> Sub for Laurent<E> {
    type Output = Laurent<E>;
    fn sub(self, rhs: Self) -> Laurent<E> {
        &self - &rhs
    }
}

impl<E: Exponent> Mul for &Laurent<E> {
    type Output = Laurent<E>;
    fn mul(self, rhs: Self) -> Laurent<E> {
        let mut out = Laurent::zero();
        for (e1, c1) in self.terms() {
            for (e2, c2) in rhs.terms() {
                out.add_term(e1.add(e2), c1 * c2);
            }
        }
        out
    }
}

impl<E: Exponent> Mul for Laurent<E> {
    type Output = Laurent<E>;
    fn mul(self, rhs: Self) -> Laurent<E> {
        &self * &rhs
    }
}

impl<E: Exponent> std::iter::Sum for Laurent<E> {
    fn sum<I: Iterator<Item = Self>>(iter: I) -> Self {
        iter.fold(Self::zero(), |acc, p| acc + p)
    }
}

// ---- text format ----

/// How a variable power is spelled.
#[derive(Clone, Copy)]
enum Style {
    Plain,
    Latex,
}

fn var_power(name: &str, e: i64, style: Style) -> Option<String> {
    match (e, style) {
        (0, _) => None,
        (1, _) => Some(name.to_string()),
        (_, Style::Plain) => Some(format!("{name}^{e}")),
        (_, Style::Latex) => Some(format!("{name}^{{{e}}}")),
    }
}

fn render<'a>(
    terms: impl Iterator<Item = (Vec<String>, &'a BigInt)>,
    style: Style,
) -> String {
    let sep = match style {
        Style::Plain => "*",
        Style::Latex => "",
    };
    let mut out = String::new();
    for (i, (vars, c)) in terms.enumerate() {
        let neg = c.is_negative();
        let abs = c.abs();
        let mono = vars.join(sep);
        let body = if mono.is_empty() {
            abs.to_string()
        } else if abs.is_one() {
            mono
        } else {
            format!("{abs}{sep}{mono}")
        };
        match (i, neg) {
            (0, false) => out.push_str(&body),
            (0, true) => {
                out.push('-');
                out.push_str(&body);
            }
            (_, false) => {
                out.push_str(" + ");
                out.push_str(&body);
            }
            (_, true) => {
                out.push_str(" - ");
                out.push_str(&body);
            }
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

impl LaurentPoly1 {
    fn render(&self, style: Style) -> String {
        render(
            self.terms().map(|(e, c)| (var_power("q", e, style).into_iter().collect(), c)),
            style,
        )
    }

    pub fn to_latex(&self) -> String {
        self.render(Style::Latex)
    }
}

impl LaurentPoly2 {
    fn render(&self, style: Style) -> String {
        render(
            self.terms().map(|(e, c)| {
                let vars = [var_power("q", e.q, style), var_power("T", e.t, style)]
                    .into_iter()
                    .flatten()
                    .collect();
                (vars, c)
            }),
            style,
        )
    }

    pub fn to_latex(&self) -> String {
        self.render(Style::Latex)
    }
}

impl fmt::Display for LaurentPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Plain))
    }
}

impl fmt::Display for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(Style::Plain))
    }
}

impl fmt::Debug for LaurentPoly1 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly1({self})")
    }
}

impl fmt::Debug for LaurentPoly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LaurentPoly2({self})")
    }
}

/// Parses sums of terms `[c*]q^a*T^b`. Exponents may be written `q^-2`,
/// `q^(-2)` or `q^{-2}`; `*` between factors is optional.
fn parse_terms(s: &str, allow_t: bool) -> Result<Vec<(QT, BigInt)>, AlgError> {
    let err = |msg: &str| AlgError::Parse(format!("{msg} in {s:?}"));
    let chars: Vec<char> = s.chars().filter(|c| !c.is_whitespace()).collect();
    if chars.is_empty() {
        return Err(err("empty polynomial"));
    }
    let mut i = 0;
    let mut out = Vec::new();

    let read_int = |i: &mut usize| -> Option<BigInt> {
        let start = *i;
        if *i < chars.len() && (chars[*i] == '-' || chars[*i] == '+') {
            *i += 1;
        }
        let digits_start = *i;
        while *i < chars.len() && chars[*i].is_ascii_digit() {
            *i += 1;
        }
        if *i == digits_start {
            *i = start;
            return None;
        }
        chars[start..*i].iter().collect::<String>().parse().ok()
    };

    while i < chars.len() {
        let mut sign = BigInt::one();
        if chars[i] == '+' || chars[i] == '-' {
            if chars[i] == '-' {
                sign = -sign;
            }
            i += 1;
        } else if !out.is_empty() {
            return Err(err("expected '+' or '-'"));
        }
        let mut coeff = sign;
        let mut exp = QT::new(0, 0);
        let mut factors = 0;
        loop {
            if i < chars.len() && chars[i] == '*' && factors > 0 {
                i += 1;
            }
            if i >= chars.len() {
                break;
            }
            match chars[i] {
                c if c.is_ascii_digit() => {
                    let n = read_int(&mut i).ok_or_else(|| err("bad coefficient"))?;
                    coeff *= n;
                }
                v @ ('q' | 'T') => {
                    if v == 'T' && !allow_t {
                        return Err(err("unexpected variable T"));
                    }
                    i += 1;
                    let mut e = 1i64;
                    if i < chars.len() && chars[i] == '^' {
                        i += 1;
                        let close = match chars.get(i) {
                            Some('(') => Some(')'),
                            Some('{') => Some('}'),
                            _ => None,
                        };
                        if close.is_some() {
                            i += 1;
                        }
                        let n = read_int(&mut i).ok_or_else(|| err("bad exponent"))?;
                        e = n.to_i64().ok_or_else(|| err("exponent out of range"))?;
                        if let Some(close) = close {
                            if chars.get(i) != Some(&close) {
                                return Err(err("unbalanced exponent bracket"));
                            }
                            i += 1;
                        }
                    }
                    if v == 'q' {
                        exp.q += e;
                    } else {
                        exp.t += e;
                    }
                }
                '+' | '-' if factors > 0 => break,
                c => return Err(err(&format!("unexpected character {c:?}"))),
            }
            factors += 1;
        }
        if factors == 0 {
            return Err(err("empty term"));
        }
        out.push((exp, coeff));
    }
    Ok(out)
}

impl FromStr for LaurentPoly1 {
    type Err = AlgError;
    fn from_str(s: &str) -> Result<Self, AlgError> {
        let terms = parse_terms(s, false)?;
        Ok(Self::from_terms(terms.into_iter().map(|(e, c)| (e.q, c))))
    }
}

impl FromStr for LaurentPoly2 {
    type Err = AlgError;
    fn from_str(s: &str) -> Result<Self, AlgError> {
        Ok(Self::from_terms(parse_terms(s, true)?))
    }
}

// ---- JSON term arrays ----
//
// LaurentPoly1 -> [[e, c], ...], LaurentPoly2 -> [[e_q, e_T, c], ...], in
// increasing exponent order. `c` is a JSON integer when it fits in i64 and a
// decimal string otherwise.

fn coeff_json(c: &BigInt) -> serde_json::Value {
    match c.to_i64() {
        Some(v) => serde_json::Value::from(v),
        None => serde_json::Value::from(c.to_string()),
    }
}

fn coeff_from_json<Er: de::Error>(v: &serde_json::Value) -> Result<BigInt, Er> {
    match v {
        serde_json::Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .ok_or_else(|| Er::custom("coefficient must be an integer")),
        serde_json::Value::String(s) => s.parse().map_err(|_| Er::custom("bad coefficient string")),
        _ => Err(Er::custom("coefficient must be integer or string")),
    }
}

impl Serialize for LaurentPoly1 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (e, c) in self.terms() {
            seq.serialize_element(&(e, coeff_json(c)))?;
        }
        seq.end()
    }
}

impl Serialize for LaurentPoly2 {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(self.len()))?;
        for (e, c) in self.terms() {
            seq.serialize_element(&(e.q, e.t, coeff_json(c)))?;
        }
        seq.end()
    }
}

impl<'de> Deserialize<'de> for LaurentPoly1 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<(i64, serde_json::Value)> = Vec::deserialize(d)?;
        let mut p = Self::zero();
        for (e, c) in raw {
            p.add_term(e, coeff_from_json(&c)?);
        }
        Ok(p)
    }
}

impl<'de> Deserialize<'de> for LaurentPoly2 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw: Vec<(i64, i64, serde_json::Value)> = Vec::deserialize(d)?;
        let mut p = Self::zero();
        for (q, t, c) in raw {
            p.add_term(QT::new(q, t), coeff_from_json(&c)?);
        }
        Ok(p)
    }
}

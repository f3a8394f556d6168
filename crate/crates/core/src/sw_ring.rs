//! `Z/2[w1, ..., wk]` with `deg wi = i`, i.e. `H*(BO(k); Z/2)`, and its action
//! by Steenrod squares.
//!
//! Generators act by the Wu formula, truncated by `w_m = 0` for `m > k`;
//! products act by the Cartan formula. The Thom class of `MO(k)` is `w_k`, and
//! `H*(MO(k))` is the ideal it generates.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::gf2_linalg::BitVector;
use crate::steenrod::{binom_mod2, SqExpr, SqWord};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum RingError {
    #[error("polynomial rings differ: k = {0} vs k = {1}")]
    WidthMismatch(usize, usize),
    #[error("w{index} is not a generator of Z/2[w1..w{k}]")]
    NoSuchGenerator { index: usize, k: usize },
    #[error("polynomial is not homogeneous of degree {0}")]
    NotHomogeneous(u32),
    #[error("vector length {found} does not match the {expected} monomials of degree {degree}")]
    VectorLength {
        degree: u32,
        expected: usize,
        found: usize,
    },
    #[error("cannot parse polynomial term {0:?}")]
    Parse(String),
    #[error("ring width must be positive")]
    ZeroWidth,
}

/// `w1^e1 ... wk^ek`. The width `k` is the length of the exponent vector.
///
/// Ordered by degree, then lexicographically on `(e1, ..., ek)` with larger
/// exponents first: for `k = 2`, degree 4 runs `w1^4, w1^2 w2, w2^2`.
#[derive(Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SWMonomial {
    exponents: Vec<u16>,
}

impl SWMonomial {
    pub fn one(k: usize) -> Self {
        Self {
            exponents: vec![0; k],
        }
    }

    /// The generator `w_j`, `1 <= j <= k`.
    pub fn generator(k: usize, j: usize) -> Result<Self, RingError> {
        if j == 0 || j > k {
            return Err(RingError::NoSuchGenerator { index: j, k });
        }
        let mut m = Self::one(k);
        m.exponents[j - 1] = 1;
        Ok(m)
    }

    pub fn from_exponents(exponents: Vec<u16>) -> Self {
        Self { exponents }
    }

    pub fn exponents(&self) -> &[u16] {
        &self.exponents
    }

    pub fn k(&self) -> usize {
        self.exponents.len()
    }

    pub fn degree(&self) -> u32 {
        self.exponents
            .iter()
            .enumerate()
            .map(|(i, &e)| (i as u32 + 1) * e as u32)
            .sum()
    }

    fn mul(&self, other: &Self) -> Self {
        Self {
            exponents: self
                .exponents
                .iter()
                .zip(&other.exponents)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    fn frobenius(&self, times: u32) -> Self {
        Self {
            exponents: self.exponents.iter().map(|e| e << times).collect(),
        }
    }
}

impl Ord for SWMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.exponents.cmp(&self.exponents))
    }
}

impl PartialOrd for SWMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let factors: Vec<String> = self
            .exponents
            .iter()
            .enumerate()
            .filter(|(_, &e)| e > 0)
            .map(|(i, &e)| match e {
                1 => format!("w{}", i + 1),
                _ => format!("w{}^{}", i + 1, e),
            })
            .collect();
        if factors.is_empty() {
            f.write_str("1")
        } else {
            f.write_str(&factors.join(" "))
        }
    }
}

impl fmt::Debug for SWMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// Every monomial of degree `d` in `Z/2[w1..wk]`, in [`SWMonomial`] order.
/// There are as many as partitions of `d` into parts of size at most `k`.
pub fn monomials_of_degree(k: usize, d: u32) -> Vec<SWMonomial> {
    fn go(k: usize, var: usize, remaining: u32, exps: &mut Vec<u16>, out: &mut Vec<SWMonomial>) {
        let weight = var as u32 + 1;
        if var + 1 == k {
            if remaining.is_multiple_of(weight) {
                exps.push((remaining / weight) as u16);
                out.push(SWMonomial::from_exponents(exps.clone()));
                exps.pop();
            }
            return;
        }
        for e in (0..=remaining / weight).rev() {
            exps.push(e as u16);
            go(k, var + 1, remaining - e * weight, exps, out);
            exps.pop();
        }
    }
    assert!(k >= 1, "ring width must be positive");
    let mut out = Vec::new();
    go(k, 0, d, &mut Vec::with_capacity(k), &mut out);
    out
}

/// A polynomial over GF(2) in `w1..wk`, stored as its set of monomials.
#[derive(Clone, PartialEq, Eq)]
pub struct SWPoly {
    k: usize,
    terms: BTreeSet<SWMonomial>,
}

impl SWPoly {
    pub fn zero(k: usize) -> Self {
        Self {
            k,
            terms: BTreeSet::new(),
        }
    }

    pub fn one(k: usize) -> Self {
        Self::from_monomial(SWMonomial::one(k))
    }

    /// `w_j`; `w_0` is `1`.
    pub fn w(k: usize, j: usize) -> Result<Self, RingError> {
        if j == 0 {
            return Ok(Self::one(k));
        }
        SWMonomial::generator(k, j).map(Self::from_monomial)
    }

    /// The Thom class `w_k`.
    pub fn thom_class(k: usize) -> Self {
        Self::w(k, k).expect("k >= 1")
    }

    pub fn from_monomial(m: SWMonomial) -> Self {
        let mut p = Self::zero(m.k());
        p.terms.insert(m);
        p
    }

    /// Sums monomials mod 2. All monomials must have width `k`.
    pub fn from_monomials<I: IntoIterator<Item = SWMonomial>>(k: usize, monomials: I) -> Self {
        let mut p = Self::zero(k);
        for m in monomials {
            debug_assert_eq!(m.k(), k);
            p.toggle(m);
        }
        p
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn terms(&self) -> impl Iterator<Item = &SWMonomial> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn contains(&self, m: &SWMonomial) -> bool {
        self.terms.contains(m)
    }

    fn toggle(&mut self, m: SWMonomial) {
        if !self.terms.remove(&m) {
            self.terms.insert(m);
        }
    }

    /// The common degree of all terms; `None` for zero or mixed degrees.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degrees = self.terms.iter().map(SWMonomial::degree);
        let first = degrees.next()?;
        degrees.all(|d| d == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, d: u32) -> bool {
        self.terms.iter().all(|m| m.degree() == d)
    }

    pub fn add(&self, other: &SWPoly) -> Result<SWPoly, RingError> {
        let mut out = self.clone();
        out.add_assign(other)?;
        Ok(out)
    }

    pub fn add_assign(&mut self, other: &SWPoly) -> Result<(), RingError> {
        if self.k != other.k {
            return Err(RingError::WidthMismatch(self.k, other.k));
        }
        for m in &other.terms {
            self.toggle(m.clone());
        }
        Ok(())
    }

    pub fn multiply(&self, other: &SWPoly) -> Result<SWPoly, RingError> {
        if self.k != other.k {
            return Err(RingError::WidthMismatch(self.k, other.k));
        }
        let mut out = SWPoly::zero(self.k);
        for a in &self.terms {
            for b in &other.terms {
                out.toggle(a.mul(b));
            }
        }
        Ok(out)
    }

    /// `p^(2^times)`, which over GF(2) just scales exponents.
    pub fn frobenius(&self, times: u32) -> SWPoly {
        SWPoly {
            k: self.k,
            terms: self.terms.iter().map(|m| m.frobenius(times)).collect(),
        }
    }

    pub fn square(&self) -> SWPoly {
        self.frobenius(1)
    }

    /// Whether `w_j` divides every term.
    pub fn divisible_by(&self, j: usize) -> bool {
        self.terms.iter().all(|m| m.exponents[j - 1] >= 1)
    }

    /// Parses `w1^2 w3 + w2 + 1`, with `0` for zero. Repeated factors in a
    /// term multiply.
    pub fn parse(k: usize, s: &str) -> Result<SWPoly, RingError> {
        if k == 0 {
            return Err(RingError::ZeroWidth);
        }
        let mut p = SWPoly::zero(k);
        for term in s.split('+') {
            let tokens: Vec<&str> = term.split_whitespace().collect();
            match tokens.as_slice() {
                [] => return Err(RingError::Parse(term.to_string())),
                ["0"] => continue,
                ["1"] => p.toggle(SWMonomial::one(k)),
                _ => {
                    let mut m = SWMonomial::one(k);
                    for tok in tokens {
                        let bad = || RingError::Parse(tok.to_string());
                        let body = tok.strip_prefix('w').ok_or_else(bad)?;
                        let (index, exp) = match body.split_once('^') {
                            Some((i, e)) => (i, e.parse::<u16>().map_err(|_| bad())?),
                            None => (body, 1),
                        };
                        let index: usize = index.parse().map_err(|_| bad())?;
                        if index == 0 || index > k {
                            return Err(RingError::NoSuchGenerator { index, k });
                        }
                        m.exponents[index - 1] += exp;
                    }
                    p.toggle(m);
                }
            }
        }
        Ok(p)
    }
}

impl fmt::Display for SWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.terms.iter().map(SWMonomial::to_string).collect();
        f.write_str(&parts.join(" + "))
    }
}

impl fmt::Debug for SWPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "SWPoly[k={}]({self})", self.k)
    }
}

/// `Sq^i(w_j)` in `Z/2[w1..wk]`, by the Wu formula
/// `Sq^i w_j = sum_t C(j-i+t-1, t) w_{i-t} w_{j+t}` for `0 < i < j`, together
/// with `Sq^0 = 1`, `Sq^j w_j = w_j^2` and `Sq^i w_j = 0` for `i > j`.
pub fn wu_sq_generator(i: u32, j: usize, k: usize) -> Result<SWPoly, RingError> {
    let wj = SWMonomial::generator(k, j).map(SWPoly::from_monomial)?;
    let j32 = j as u32;
    if i == 0 {
        return Ok(wj);
    }
    if i > j32 {
        return Ok(SWPoly::zero(k));
    }
    if i == j32 {
        return Ok(wj.square());
    }
    let mut out = SWPoly::zero(k);
    for t in 0..=i {
        let upper = (j32 - i + t - 1) as u64;
        if !binom_mod2(upper, t as u64) {
            continue;
        }
        let hi = j + t as usize;
        if hi > k {
            continue;
        }
        let lo = SWPoly::w(k, (i - t) as usize)?;
        let hi = SWPoly::w(k, hi)?;
        out.add_assign(&lo.multiply(&hi)?)?;
    }
    Ok(out)
}

/// A truncated total square `sum_a Sq^a(x)`: component `a` raises degree by `a`.
type Graded = Vec<SWPoly>;

fn graded_mul(x: &Graded, y: &Graded, top: usize, k: usize) -> Graded {
    let mut out = vec![SWPoly::zero(k); top + 1];
    for (a, xa) in x.iter().enumerate().filter(|(_, p)| !p.is_zero()) {
        for (b, yb) in y.iter().enumerate().take(top + 1 - a) {
            if !yb.is_zero() {
                out[a + b]
                    .add_assign(&xa.multiply(yb).expect("same width"))
                    .expect("same width");
            }
        }
    }
    out
}

/// Sq^0..=Sq^top of one monomial.
///
/// The total square is multiplicative, and `Sq(x^(2^s)) = Sq(x)^(2^s)`, so the
/// monomial splits into factors `w_j^(2^s)` whose total squares are the
/// Frobenius powers of the Wu polynomials, living in degrees `b * 2^s`.
fn total_sq_monomial(m: &SWMonomial, top: usize) -> Graded {
    let k = m.k();
    let mut acc: Graded = vec![SWPoly::zero(k); top + 1];
    acc[0] = SWPoly::one(k);
    for (idx, &e) in m.exponents.iter().enumerate() {
        let j = idx + 1;
        for s in 0..16u32 {
            if (e >> s) & 1 == 0 {
                continue;
            }
            let step = 1usize << s;
            let mut factor: Graded = vec![SWPoly::zero(k); top + 1];
            for b in 0..=j {
                if b * step > top {
                    break;
                }
                factor[b * step] = wu_sq_generator(b as u32, j, k)
                    .expect("generator in range")
                    .frobenius(s);
            }
            acc = graded_mul(&acc, &factor, top, k);
        }
    }
    acc
}

/// `Sq^i(p)`, extended to products by the Cartan formula and linearly to sums.
pub fn sq_on_poly(i: u32, p: &SWPoly) -> SWPoly {
    if i == 0 {
        return p.clone();
    }
    let mut out = SWPoly::zero(p.k);
    for m in &p.terms {
        if i > m.degree() {
            continue;
        }
        let graded = total_sq_monomial(m, i as usize);
        out.add_assign(&graded[i as usize]).expect("same width");
    }
    out
}

/// Applies `Sq^{i1} ∘ ... ∘ Sq^{ir}` to `p`, innermost (`Sq^{ir}`) first.
pub fn sq_word_apply(word: &SqWord, p: &SWPoly) -> SWPoly {
    word.entries()
        .iter()
        .rev()
        .fold(p.clone(), |acc, &i| sq_on_poly(i, &acc))
}

/// Applies a sum of words linearly.
pub fn sq_expr_apply(expr: &SqExpr, p: &SWPoly) -> SWPoly {
    let mut out = SWPoly::zero(p.k);
    for w in expr.words() {
        out.add_assign(&sq_word_apply(w, p)).expect("same width");
    }
    out
}

/// Position of every degree-`d` monomial in [`monomials_of_degree`] order.
pub struct MonomialIndex {
    k: usize,
    degree: u32,
    basis: Vec<SWMonomial>,
    position: HashMap<SWMonomial, usize>,
}

impl MonomialIndex {
    pub fn new(k: usize, degree: u32) -> Self {
        let basis = monomials_of_degree(k, degree);
        let position = basis
            .iter()
            .enumerate()
            .map(|(i, m)| (m.clone(), i))
            .collect();
        Self {
            k,
            degree,
            basis,
            position,
        }
    }

    pub fn basis(&self) -> &[SWMonomial] {
        &self.basis
    }

    pub fn into_basis(self) -> Vec<SWMonomial> {
        self.basis
    }

    pub fn to_vector(&self, p: &SWPoly) -> Result<BitVector, RingError> {
        if p.k != self.k {
            return Err(RingError::WidthMismatch(p.k, self.k));
        }
        let mut v = BitVector::zeros(self.basis.len());
        for m in &p.terms {
            let &i = self
                .position
                .get(m)
                .ok_or(RingError::NotHomogeneous(self.degree))?;
            v.set(i, true);
        }
        Ok(v)
    }

    pub fn to_poly(&self, v: &BitVector) -> Result<SWPoly, RingError> {
        if v.len() != self.basis.len() {
            return Err(RingError::VectorLength {
                degree: self.degree,
                expected: self.basis.len(),
                found: v.len(),
            });
        }
        Ok(SWPoly::from_monomials(
            self.k,
            v.iter_ones().map(|i| self.basis[i].clone()),
        ))
    }
}

/// Coordinates of `p` in the degree-`d` monomial basis.
pub fn poly_to_vector(p: &SWPoly, d: u32) -> Result<BitVector, RingError> {
    MonomialIndex::new(p.k, d).to_vector(p)
}

/// Inverse of [`poly_to_vector`].
pub fn vector_to_poly(k: usize, d: u32, v: &BitVector) -> Result<SWPoly, RingError> {
    MonomialIndex::new(k, d).to_poly(v)
}

//! The mod-2 Steenrod algebra in the admissible (Serre–Cartan) basis.
//!
//! A [`SqWord`] `(i1, ..., ir)` stands for the composite `Sq^i1 ∘ ... ∘ Sq^ir`,
//! so it acts on a class by `Sq^ir` first. It is admissible when
//! `i_s >= 2 i_{s+1}` for every adjacent pair, and its excess is
//! `i1 - i2 - ... - ir`. Arbitrary words are rewritten into sums of admissible
//! ones with the Adem relations
//!
//! ```text
//! Sq^a Sq^b = sum_{c=0}^{a/2} C(b-c-1, a-2c) Sq^{a+b-c} Sq^c      (a < 2b)
//! ```

use std::cell::RefCell;
use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum SteenrodError {
    #[error("Sq^0 is not allowed inside a word (it is the identity)")]
    ZeroEntry,
    #[error("cannot parse {0:?} as a Steenrod square (expected Sq^n)")]
    BadToken(String),
    #[error("empty term in Steenrod expression")]
    EmptyTerm,
    #[error("expression is not homogeneous: degrees {0} and {1}")]
    Inhomogeneous(u32, u32),
}

/// `C(m, t) mod 2`, by Lucas' theorem: odd iff the binary digits of `t` are a
/// subset of those of `m`.
pub fn binom_mod2(m: u64, t: u64) -> bool {
    t & !m == 0
}

/// A composite of Steenrod squares with positive entries.
///
/// Ordered length-first, then lexicographically, which is the canonical order
/// of words inside an [`SqExpr`] and of [`enumerate_admissible`] output.
#[derive(Clone, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(try_from = "Vec<u32>", into = "Vec<u32>")]
pub struct SqWord(Vec<u32>);

impl SqWord {
    pub fn new(entries: Vec<u32>) -> Result<Self, SteenrodError> {
        if entries.contains(&0) {
            return Err(SteenrodError::ZeroEntry);
        }
        Ok(Self(entries))
    }

    /// The unit `Sq^0 = 1`.
    pub fn empty() -> Self {
        Self(Vec::new())
    }

    pub fn entries(&self) -> &[u32] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }

    pub fn excess(&self) -> i64 {
        match self.0.split_first() {
            None => 0,
            Some((&first, rest)) => first as i64 - rest.iter().map(|&x| x as i64).sum::<i64>(),
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.first_inadmissible().is_none()
    }

    /// Position `s` of the leftmost pair with `i_s < 2 i_{s+1}`.
    pub fn first_inadmissible(&self) -> Option<usize> {
        self.0.windows(2).position(|w| w[0] < 2 * w[1])
    }

    pub fn last_inadmissible(&self) -> Option<usize> {
        self.0.windows(2).rposition(|w| w[0] < 2 * w[1])
    }

    /// Termination measure for Adem rewriting: `sum_s s * i_s` (1-based).
    /// A rewrite at position `s` replaces `(a, b)` by `(a+b-c, c)`, changing
    /// the moment by `c - b < 0`; the `c = 0` term also shifts later entries
    /// left, which lowers it further.
    pub fn moment(&self) -> u64 {
        self.0
            .iter()
            .enumerate()
            .map(|(s, &i)| (s as u64 + 1) * i as u64)
            .sum()
    }
}

impl Ord for SqWord {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0
            .len()
            .cmp(&other.0.len())
            .then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SqWord {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl TryFrom<Vec<u32>> for SqWord {
    type Error = SteenrodError;

    fn try_from(v: Vec<u32>) -> Result<Self, Self::Error> {
        Self::new(v)
    }
}

impl From<SqWord> for Vec<u32> {
    fn from(w: SqWord) -> Self {
        w.0
    }
}

impl fmt::Debug for SqWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Sq{:?}", self.0)
    }
}

/// `Sq^a Sq^b ...`, or `1` for the empty word.
impl fmt::Display for SqWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("1");
        }
        let parts: Vec<String> = self.0.iter().map(|i| format!("Sq^{i}")).collect();
        f.write_str(&parts.join(" "))
    }
}

/// The tuple form used by the `admissible` listing, e.g. `(2,1)`.
pub fn tuple_form(word: &SqWord) -> String {
    let parts: Vec<String> = word.0.iter().map(u32::to_string).collect();
    format!("({})", parts.join(","))
}

/// A GF(2)-linear combination of words. The empty set is zero; the set
/// containing only the empty word is the unit.
#[derive(Clone, PartialEq, Eq, Default, Debug)]
pub struct SqExpr {
    words: BTreeSet<SqWord>,
}

impl SqExpr {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn unit() -> Self {
        Self::from_word(SqWord::empty())
    }

    pub fn from_word(word: SqWord) -> Self {
        let mut e = Self::zero();
        e.toggle(word);
        e
    }

    /// Adds a single word mod 2.
    pub fn toggle(&mut self, word: SqWord) {
        if !self.words.remove(&word) {
            self.words.insert(word);
        }
    }

    pub fn add_assign(&mut self, other: &SqExpr) {
        for w in &other.words {
            self.toggle(w.clone());
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &SqWord> {
        self.words.iter()
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn is_reduced(&self) -> bool {
        self.words.iter().all(SqWord::is_admissible)
    }

    /// The common degree, or `None` for zero.
    pub fn degree(&self) -> Option<u32> {
        self.words.first().map(SqWord::degree)
    }

    /// Adem-reduces every word and sums the results.
    pub fn reduce(&self) -> SqExpr {
        let mut out = SqExpr::zero();
        for w in &self.words {
            out.add_assign(&adem_reduce(w));
        }
        out
    }
}

impl FromIterator<SqWord> for SqExpr {
    fn from_iter<T: IntoIterator<Item = SqWord>>(iter: T) -> Self {
        let mut e = SqExpr::zero();
        for w in iter {
            e.toggle(w);
        }
        e
    }
}

impl fmt::Display for SqExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.words.is_empty() {
            return f.write_str("0");
        }
        let parts: Vec<String> = self.words.iter().map(SqWord::to_string).collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Parses `Sq^a Sq^b + Sq^c + 1`, with `0` for zero. `Sq^0` factors are
/// dropped since they act as the identity. Mixed degrees are rejected.
impl FromStr for SqExpr {
    type Err = SteenrodError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut expr = SqExpr::zero();
        for term in s.split('+') {
            let tokens: Vec<&str> = term.split_whitespace().collect();
            match tokens.as_slice() {
                [] => return Err(SteenrodError::EmptyTerm),
                ["0"] => continue,
                ["1"] => expr.toggle(SqWord::empty()),
                _ => {
                    let mut entries = Vec::with_capacity(tokens.len());
                    for tok in tokens {
                        let n = tok
                            .strip_prefix("Sq^")
                            .and_then(|n| n.parse::<u32>().ok())
                            .ok_or_else(|| SteenrodError::BadToken(tok.to_string()))?;
                        if n > 0 {
                            entries.push(n);
                        }
                    }
                    expr.toggle(SqWord(entries));
                }
            }
        }
        let mut degrees = expr.words.iter().map(SqWord::degree);
        if let Some(d0) = degrees.next() {
            if let Some(d) = degrees.find(|&d| d != d0) {
                return Err(SteenrodError::Inhomogeneous(d0, d));
            }
        }
        Ok(expr)
    }
}

/// Admissible words of degree `m` with excess at most `max_excess`
/// (`None` = unbounded), in canonical [`SqWord`] order. For `m = 0` this is
/// `[()]` when the bound admits excess 0.
pub fn enumerate_admissible(m: u32, max_excess: Option<i64>) -> Vec<SqWord> {
    fn go(m: u32, max_first: u32, prefix: &mut Vec<u32>, out: &mut Vec<SqWord>) {
        if m == 0 {
            out.push(SqWord(prefix.clone()));
            return;
        }
        for first in 1..=m.min(max_first) {
            prefix.push(first);
            go(m - first, first / 2, prefix, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(m, m, &mut Vec::new(), &mut out);
    out.retain(|w| max_excess.is_none_or(|e| w.excess() <= e));
    out.sort();
    out
}

/// Which inadmissible pair to rewrite first.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum RewriteStrategy {
    Leftmost,
    Rightmost,
}

/// Terms of one Adem rewrite of the pair at `pos`, with `Sq^0` factors removed.
fn adem_step(word: &SqWord, pos: usize) -> Vec<SqWord> {
    let e = &word.0;
    let (a, b) = (e[pos], e[pos + 1]);
    debug_assert!(a < 2 * b);
    (0..=a / 2)
        .filter(|&c| binom_mod2((b - c - 1) as u64, (a - 2 * c) as u64))
        .map(|c| {
            let mut next = Vec::with_capacity(e.len());
            next.extend_from_slice(&e[..pos]);
            next.push(a + b - c);
            if c > 0 {
                next.push(c);
            }
            next.extend_from_slice(&e[pos + 2..]);
            let next = SqWord(next);
            debug_assert!(next.moment() < word.moment());
            next
        })
        .collect()
}

/// Rewrites `word` into the admissible basis without memoization, choosing the
/// pair to rewrite by `strategy`.
pub fn reduce_with_strategy(word: &SqWord, strategy: RewriteStrategy) -> SqExpr {
    let pos = match strategy {
        RewriteStrategy::Leftmost => word.first_inadmissible(),
        RewriteStrategy::Rightmost => word.last_inadmissible(),
    };
    match pos {
        None => SqExpr::from_word(word.clone()),
        Some(pos) => {
            let mut out = SqExpr::zero();
            for next in adem_step(word, pos) {
                out.add_assign(&reduce_with_strategy(&next, strategy));
            }
            out
        }
    }
}

thread_local! {
    static ADEM_CACHE: RefCell<HashMap<SqWord, SqExpr>> = RefCell::new(HashMap::new());
}

/// Rewrites `word` into a sum of admissible words equal to it in the Steenrod
/// algebra, always rewriting the leftmost inadmissible pair. Results are
/// memoized in a per-thread cache.
pub fn adem_reduce(word: &SqWord) -> SqExpr {
    let Some(pos) = word.first_inadmissible() else {
        return SqExpr::from_word(word.clone());
    };
    if let Some(hit) = ADEM_CACHE.with(|c| c.borrow().get(word).cloned()) {
        return hit;
    }
    let mut out = SqExpr::zero();
    for next in adem_step(word, pos) {
        out.add_assign(&adem_reduce(&next));
    }
    ADEM_CACHE.with(|c| c.borrow_mut().insert(word.clone(), out.clone()));
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn w(e: &[u32]) -> SqWord {
        SqWord::new(e.to_vec()).unwrap()
    }

    fn binom(m: u64, t: u64) -> u64 {
        if t > m {
            return 0;
        }
        (0..t).fold(1u64, |acc, i| acc * (m - i) / (i + 1))
    }

    #[test]
    fn lucas_matches_direct_binomials() {
        assert!(!binom_mod2(4, 2));
        assert!(binom_mod2(5, 1));
        for m in 0..40 {
            assert!(binom_mod2(m, 0));
            for t in 0..45 {
                assert_eq!(binom_mod2(m, t), binom(m, t) % 2 == 1, "C({m},{t})");
            }
        }
    }

    #[test]
    fn excess_degree_admissibility() {
        let e = SqWord::empty();
        assert_eq!((e.excess(), e.degree(), e.is_admissible()), (0, 0, true));
        let x = w(&[2, 1]);
        assert_eq!((x.excess(), x.degree(), x.is_admissible()), (1, 3, true));
        assert!(!w(&[3, 2]).is_admissible());
        assert_eq!(SqWord::new(vec![2, 0]), Err(SteenrodError::ZeroEntry));
    }

    #[test]
    fn enumeration_examples() {
        assert_eq!(enumerate_admissible(3, None), vec![w(&[3]), w(&[2, 1])]);
        assert_eq!(enumerate_admissible(3, Some(1)), vec![w(&[2, 1])]);
        assert_eq!(enumerate_admissible(4, Some(2)), vec![w(&[3, 1])]);
        assert_eq!(enumerate_admissible(0, Some(0)), vec![SqWord::empty()]);
        assert!(enumerate_admissible(0, Some(-1)).is_empty());
    }

    fn compositions(m: u32) -> Vec<Vec<u32>> {
        if m == 0 {
            return vec![vec![]];
        }
        let mut out = Vec::new();
        for first in 1..=m {
            for mut rest in compositions(m - first) {
                rest.insert(0, first);
                out.push(rest);
            }
        }
        out
    }

    #[test]
    fn enumeration_matches_composition_filter() {
        for m in 0..=14 {
            for e_max in [None, Some(0), Some(1), Some(2), Some(3), Some(5)] {
                let mut brute: Vec<SqWord> = compositions(m)
                    .into_iter()
                    .map(SqWord)
                    .filter(|x| x.is_admissible() && e_max.is_none_or(|e| x.excess() <= e))
                    .collect();
                brute.sort();
                assert_eq!(enumerate_admissible(m, e_max), brute, "m={m} e={e_max:?}");
            }
        }
    }

    #[test]
    fn adem_identity_table() {
        assert!(adem_reduce(&w(&[1, 1])).is_zero());
        assert!(adem_reduce(&w(&[1, 3])).is_zero());
        assert!(adem_reduce(&w(&[3, 2])).is_zero());
        assert_eq!(adem_reduce(&w(&[1, 2])), SqExpr::from_word(w(&[3])));
        assert_eq!(adem_reduce(&w(&[2, 2])), SqExpr::from_word(w(&[3, 1])));
        assert_eq!(adem_reduce(&w(&[3, 1])), SqExpr::from_word(w(&[3, 1])));
        for n in 1..=8 {
            assert_eq!(
                adem_reduce(&w(&[1, 2 * n])),
                SqExpr::from_word(w(&[2 * n + 1]))
            );
        }
    }

    #[test]
    fn known_longer_relations() {
        // Sq^2 Sq^3 = Sq^5 + Sq^4 Sq^1
        assert_eq!(
            adem_reduce(&w(&[2, 3])),
            [w(&[5]), w(&[4, 1])].into_iter().collect()
        );
        // Sq^2 Sq^2 Sq^2 = Sq^3 Sq^1 Sq^2 = Sq^3 Sq^3 = Sq^5 Sq^1
        assert_eq!(adem_reduce(&w(&[2, 2, 2])), SqExpr::from_word(w(&[5, 1])));
    }

    #[test]
    fn parse_and_render() {
        let e: SqExpr = "Sq^2 Sq^2".parse().unwrap();
        assert_eq!(e.reduce().to_string(), "Sq^3 Sq^1");
        let e: SqExpr = "Sq^1 Sq^1".parse().unwrap();
        assert_eq!(e.reduce().to_string(), "0");
        assert_eq!("1".parse::<SqExpr>().unwrap().to_string(), "1");
        assert_eq!("0".parse::<SqExpr>().unwrap(), SqExpr::zero());
        assert_eq!("Sq^3 + Sq^3".parse::<SqExpr>().unwrap(), SqExpr::zero());
        assert_eq!(
            "Sq^0 Sq^2".parse::<SqExpr>().unwrap(),
            SqExpr::from_word(w(&[2]))
        );
        assert!(matches!(
            "Sq2".parse::<SqExpr>(),
            Err(SteenrodError::BadToken(_))
        ));
        assert_eq!("Sq^1 + ".parse::<SqExpr>(), Err(SteenrodError::EmptyTerm));
        assert_eq!(
            "Sq^1 + Sq^2".parse::<SqExpr>(),
            Err(SteenrodError::Inhomogeneous(1, 2))
        );
        assert_eq!(tuple_form(&w(&[4, 2, 1])), "(4,2,1)");
        assert_eq!(tuple_form(&SqWord::empty()), "()");
    }

    #[test]
    fn serde_as_integer_array() {
        let json = serde_json::to_string(&w(&[4, 2])).unwrap();
        assert_eq!(json, "[4,2]");
        assert_eq!(serde_json::from_str::<SqWord>("[4,2]").unwrap(), w(&[4, 2]));
        assert!(serde_json::from_str::<SqWord>("[4,0]").is_err());
    }

    fn arb_word(max_degree: u32) -> impl Strategy<Value = SqWord> {
        proptest::collection::vec(1u32..=6, 0..6).prop_map(move |mut v| {
            while v.iter().sum::<u32>() > max_degree {
                v.pop();
            }
            SqWord(v)
        })
    }

    proptest! {
        #[test]
        fn reduction_is_confluent_and_degree_preserving(word in arb_word(24)) {
            let left = reduce_with_strategy(&word, RewriteStrategy::Leftmost);
            let right = reduce_with_strategy(&word, RewriteStrategy::Rightmost);
            prop_assert_eq!(&left, &right);
            prop_assert_eq!(&adem_reduce(&word), &left);
            prop_assert!(left.is_reduced());
            prop_assert!(left.words().all(|x| x.degree() == word.degree()));
        }

        #[test]
        fn reduction_is_idempotent(word in arb_word(24)) {
            let once = adem_reduce(&word);
            prop_assert_eq!(once.reduce(), once);
        }
    }

    #[test]
    fn terminates_up_to_degree_64() {
        // long flat words are the worst case for the rewriting depth
        for d in [16u32, 32, 48, 64] {
            let ones = SqWord(vec![1; d as usize]);
            assert!(
                adem_reduce(&ones).is_zero(),
                "Sq^1 Sq^1 = 0 kills (1,...,1)"
            );
            let twos = SqWord(vec![2; (d / 2) as usize]);
            assert!(adem_reduce(&twos).words().all(|x| x.degree() == d));
            let ramp = SqWord((1..=10).collect());
            assert!(adem_reduce(&ramp).is_reduced());
        }
    }
}

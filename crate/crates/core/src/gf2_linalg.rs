//! Dense, bit-packed linear algebra over GF(2).
//!
//! Rows are packed into `u64` words and eliminated with XOR. The column order
//! is owned by the caller through [`BitMatrix::column_labels`]; nothing in this
//! module ever permutes columns, so a matrix serializes the same way every
//! time it is built from the same inputs.

use std::collections::HashSet;
use std::fmt;
use std::hash::Hash;

use thiserror::Error;

const WORD_BITS: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum LinalgError {
    #[error("row {row} has length {found}, expected {expected}")]
    RaggedRows {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("column labels are not pairwise distinct (column {0} repeats an earlier label)")]
    DuplicateLabel(usize),
    #[error("invalid character {0:?} in bit string")]
    BadBit(char),
}

/// A vector over GF(2) of fixed length.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        Self {
            len,
            words: vec![0; len.div_ceil(WORD_BITS)],
        }
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let bits: Vec<bool> = bits.into_iter().collect();
        let mut v = Self::zeros(bits.len());
        for (i, b) in bits.into_iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    /// Parses a string of `'0'`/`'1'` characters.
    pub fn from_bit_string(s: &str) -> Result<Self, LinalgError> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(false),
                '1' => Ok(true),
                other => Err(LinalgError::BadBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self::from_bits(bits))
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        (self.words[i / WORD_BITS] >> (i % WORD_BITS)) & 1 == 1
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        let mask = 1u64 << (i % WORD_BITS);
        if value {
            self.words[i / WORD_BITS] |= mask;
        } else {
            self.words[i / WORD_BITS] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit index {i} out of range {}", self.len);
        self.words[i / WORD_BITS] ^= 1u64 << (i % WORD_BITS);
    }

    /// `self += other` over GF(2). Panics if the lengths differ.
    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= *b;
        }
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    /// Index of the lowest set bit.
    pub fn first_one(&self) -> Option<usize> {
        self.words
            .iter()
            .enumerate()
            .find(|(_, &w)| w != 0)
            .map(|(i, w)| i * WORD_BITS + w.trailing_zeros() as usize)
    }

    pub fn iter_ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let tz = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD_BITS + tz)
            })
        })
    }

    pub fn to_bit_string(&self) -> String {
        (0..self.len)
            .map(|i| if self.get(i) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitVector({})", self.to_bit_string())
    }
}

impl fmt::Display for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_bit_string())
    }
}

/// A dense GF(2) matrix whose columns carry caller-supplied labels.
///
/// Every row has exactly `column_labels.len()` entries and the labels are
/// pairwise distinct; both are checked on construction.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BitMatrix<L = usize> {
    rows: Vec<BitVector>,
    column_labels: Vec<L>,
}

/// Outcome of [`BitMatrix::independent_rows`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Independence {
    pub independent: bool,
    /// Selects a nonempty set of rows whose sum is zero. Present iff the rows
    /// are dependent.
    pub witness: Option<BitVector>,
}

/// A row-echelon form: nonzero rows only, with the pivot column of each row.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Echelon<L> {
    pub matrix: BitMatrix<L>,
    /// Strictly increasing.
    pub pivots: Vec<usize>,
}

impl<L: Clone + Eq + Hash> BitMatrix<L> {
    pub fn new(rows: Vec<BitVector>, column_labels: Vec<L>) -> Result<Self, LinalgError> {
        let ncols = column_labels.len();
        if let Some((row, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(LinalgError::RaggedRows {
                row,
                expected: ncols,
                found: r.len(),
            });
        }
        let mut seen = HashSet::with_capacity(ncols);
        for (i, label) in column_labels.iter().enumerate() {
            if !seen.insert(label) {
                return Err(LinalgError::DuplicateLabel(i));
            }
        }
        Ok(Self {
            rows,
            column_labels,
        })
    }
}

impl BitMatrix<usize> {
    /// Builds a matrix with columns labelled `0..ncols`.
    pub fn from_rows(rows: Vec<BitVector>, ncols: usize) -> Result<Self, LinalgError> {
        Self::new(rows, (0..ncols).collect())
    }

    /// Builds a matrix from row-major `'0'`/`'1'` strings.
    pub fn from_bit_strings<S: AsRef<str>>(rows: &[S], ncols: usize) -> Result<Self, LinalgError> {
        let rows = rows
            .iter()
            .map(|s| BitVector::from_bit_string(s.as_ref()))
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_rows(rows, ncols)
    }

    pub fn identity(n: usize) -> Self {
        let rows = (0..n)
            .map(|i| {
                let mut v = BitVector::zeros(n);
                v.set(i, true);
                v
            })
            .collect();
        Self {
            rows,
            column_labels: (0..n).collect(),
        }
    }
}

impl<L> BitMatrix<L> {
    pub fn rows(&self) -> &[BitVector] {
        &self.rows
    }

    pub fn column_labels(&self) -> &[L] {
        &self.column_labels
    }

    pub fn nrows(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.column_labels.len()
    }

    pub fn to_bit_strings(&self) -> Vec<String> {
        self.rows.iter().map(BitVector::to_bit_string).collect()
    }

    pub fn transpose(&self) -> BitMatrix<usize> {
        let mut cols = vec![BitVector::zeros(self.nrows()); self.ncols()];
        for (i, row) in self.rows.iter().enumerate() {
            for j in row.iter_ones() {
                cols[j].set(i, true);
            }
        }
        BitMatrix {
            rows: cols,
            column_labels: (0..self.nrows()).collect(),
        }
    }

    pub fn rank(&self) -> usize {
        let mut rows = self.rows.clone();
        let mut rank = 0;
        for col in 0..self.ncols() {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let (head, tail) = rows.split_at_mut(rank + 1);
            let pivot = &head[rank];
            for r in tail.iter_mut().filter(|r| r.get(col)) {
                r.xor_assign(pivot);
            }
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rank
    }

    /// Decides whether the rows are linearly independent. When they are not,
    /// returns the first dependency found while inserting rows in order.
    pub fn independent_rows(&self) -> Independence {
        let n = self.nrows();
        // (reduced row, pivot column, combination of original rows)
        let mut basis: Vec<(BitVector, usize, BitVector)> = Vec::new();
        for (i, row) in self.rows.iter().enumerate() {
            let mut reduced = row.clone();
            let mut history = BitVector::zeros(n);
            history.set(i, true);
            for (b, pivot, h) in &basis {
                if reduced.get(*pivot) {
                    reduced.xor_assign(b);
                    history.xor_assign(h);
                }
            }
            match reduced.first_one() {
                Some(pivot) => basis.push((reduced, pivot, history)),
                None => {
                    return Independence {
                        independent: false,
                        witness: Some(history),
                    }
                }
            }
        }
        Independence {
            independent: true,
            witness: None,
        }
    }

    /// True iff `witness` is nonzero and the rows it selects sum to zero.
    pub fn verify_witness(&self, witness: &BitVector) -> bool {
        if witness.len() != self.nrows() || witness.is_zero() {
            return false;
        }
        let mut acc = BitVector::zeros(self.ncols());
        for i in witness.iter_ones() {
            acc.xor_assign(&self.rows[i]);
        }
        acc.is_zero()
    }
}

impl<L: Clone> BitMatrix<L> {
    /// Reduced row-echelon form with zero rows dropped.
    pub fn row_reduce(&self) -> Echelon<L> {
        let mut rows = self.rows.clone();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.ncols() {
            let Some(p) = (rank..rows.len()).find(|&r| rows[r].get(col)) else {
                continue;
            };
            rows.swap(rank, p);
            let pivot = rows[rank].clone();
            for (r, row) in rows.iter_mut().enumerate() {
                if r != rank && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == rows.len() {
                break;
            }
        }
        rows.truncate(rank);
        Echelon {
            matrix: BitMatrix {
                rows,
                column_labels: self.column_labels.clone(),
            },
            pivots,
        }
    }
}

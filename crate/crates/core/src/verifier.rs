//! Degree-by-degree certification that the classes `Sq^I(w_k)`, for admissible
//! `I` of excess at most `k`, are linearly independent in `H*(MO(k))`.
//!
//! Each degree produces a [`Certificate`]: the admissible words (rows), the
//! monomial basis (columns), the coordinate matrix, its rank and a verdict. A
//! rank deficit is reported as a falsified certificate carrying a dependency
//! witness, never as an error. [`replay`] re-checks a certificate using only
//! the GF(2) layer.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::em_cobordism::{h_dim_k, h_dim_mo, primitive_dim_k};
use crate::gf2_linalg::{BitMatrix, BitVector, LinalgError};
use crate::steenrod::{adem_reduce, enumerate_admissible, SqWord};
use crate::sw_ring::{
    monomials_of_degree, sq_expr_apply, sq_word_apply, MonomialIndex, RingError, SWPoly,
};

/// Seed used by randomized checks when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_2019;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error("k must be positive")]
    ZeroK,
    #[error("degree {degree} is below the bottom class in degree {k}")]
    DegreeBelowK { k: u32, degree: u32 },
    #[error("{0:?} is not admissible; rewrite it with adem_reduce first")]
    Inadmissible(SqWord),
    #[error("{words} admissible words but the primitive count is {expected}")]
    CountMismatch { words: usize, expected: u64 },
    #[error("certificate has no row {0}")]
    NoSuchRow(usize),
    #[error(transparent)]
    Ring(#[from] RingError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Verified,
    Falsified,
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Verdict::Verified => "verified",
            Verdict::Falsified => "falsified",
        })
    }
}

/// Size data kept even when the matrix itself is omitted.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Integrity {
    pub rows: usize,
    pub cols: usize,
    pub row_popcounts: Vec<usize>,
    pub pivots: Vec<usize>,
}

impl Integrity {
    pub fn of<L: Clone>(m: &BitMatrix<L>) -> Self {
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            row_popcounts: m.rows().iter().map(BitVector::count_ones).collect(),
            pivots: m.row_reduce().pivots,
        }
    }
}

/// The record of one degree's independence check.
///
/// Serialized with the field names below; `matrix` and `witness` are rows of
/// `'0'`/`'1'` characters, `words` are integer arrays and `basis` entries are
/// exponent arrays `[e1, ..., ek]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub k: u32,
    pub degree: u32,
    pub words: Vec<SqWord>,
    pub basis: Vec<crate::sw_ring::SWMonomial>,
    /// `None` when dropped by [`Certificate::compact`].
    pub matrix: Option<Vec<String>>,
    pub rank: usize,
    pub expected: usize,
    pub verdict: Verdict,
    pub witness: Option<String>,
    pub integrity: Integrity,
}

impl Certificate {
    pub fn bit_matrix(&self) -> Option<Result<BitMatrix, LinalgError>> {
        self.matrix
            .as_ref()
            .map(|rows| BitMatrix::from_bit_strings(rows, self.basis.len()))
    }

    /// Drops the matrix when it has more than `max_cells` entries.
    pub fn compact(mut self, max_cells: usize) -> Self {
        if self.integrity.rows * self.integrity.cols > max_cells {
            self.matrix = None;
        }
        self
    }

    /// Whether the certificate contains no words.
    pub fn is_vacuous(&self) -> bool {
        self.words.is_empty()
    }
}

/// `Sq^I(w_k)`; `I` must be admissible.
pub fn phi_image(k: u32, word: &SqWord) -> Result<SWPoly, VerifyError> {
    if k == 0 {
        return Err(VerifyError::ZeroK);
    }
    if !word.is_admissible() {
        return Err(VerifyError::Inadmissible(word.clone()));
    }
    Ok(sq_word_apply(word, &SWPoly::thom_class(k as usize)))
}

/// Certifies degree `d` for the Thom class `w_k`.
pub fn check_degree(k: u32, d: u32) -> Result<Certificate, VerifyError> {
    if k == 0 {
        return Err(VerifyError::ZeroK);
    }
    if d < k {
        return Err(VerifyError::DegreeBelowK { k, degree: d });
    }
    let words = enumerate_admissible(d - k, Some(k as i64));
    let expected = primitive_dim_k(k, d);
    if words.len() as u64 != expected {
        return Err(VerifyError::CountMismatch {
            words: words.len(),
            expected,
        });
    }
    let index = MonomialIndex::new(k as usize, d);
    let rows = words
        .iter()
        .map(|w| Ok(index.to_vector(&phi_image(k, w)?)?))
        .collect::<Result<Vec<_>, VerifyError>>()?;
    let matrix = BitMatrix::new(rows, index.into_basis())?;
    let rank = matrix.rank();
    let independence = matrix.independent_rows();
    let verdict = if rank == words.len() {
        Verdict::Verified
    } else {
        Verdict::Falsified
    };
    debug_assert_eq!(independence.independent, verdict == Verdict::Verified);
    Ok(Certificate {
        k,
        degree: d,
        integrity: Integrity::of(&matrix),
        matrix: Some(matrix.to_bit_strings()),
        basis: matrix.column_labels().to_vec(),
        words,
        rank,
        expected: expected as usize,
        verdict,
        witness: independence.witness.map(|w| w.to_bit_string()),
    })
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DegreeSummary {
    pub degree: u32,
    pub count: usize,
    pub columns: usize,
    pub rank: usize,
    pub verdict: Verdict,
    pub primitive_dim: u64,
    pub h_dim_mo: u64,
    pub h_dim_k: u64,
}

#[derive(Clone, Debug)]
pub struct RangeReport {
    pub k: u32,
    pub max_degree: u32,
    pub certificates: Vec<Certificate>,
    pub summary: Vec<DegreeSummary>,
    pub verdict: Verdict,
}

/// Runs [`check_degree`] for `d = k..=d_max`, in parallel, reporting in
/// degree order.
pub fn check_range(k: u32, d_max: u32) -> Result<RangeReport, VerifyError> {
    if k == 0 {
        return Err(VerifyError::ZeroK);
    }
    if d_max < k {
        return Err(VerifyError::DegreeBelowK { k, degree: d_max });
    }
    let certificates = (k..=d_max)
        .into_par_iter()
        .map(|d| check_degree(k, d))
        .collect::<Result<Vec<_>, _>>()?;
    let summary = certificates
        .iter()
        .map(|c| DegreeSummary {
            degree: c.degree,
            count: c.words.len(),
            columns: c.basis.len(),
            rank: c.rank,
            verdict: c.verdict,
            primitive_dim: c.expected as u64,
            h_dim_mo: h_dim_mo(k, c.degree),
            h_dim_k: h_dim_k(k, c.degree),
        })
        .collect::<Vec<_>>();
    let verdict = if certificates.iter().all(|c| c.verdict == Verdict::Verified) {
        Verdict::Verified
    } else {
        Verdict::Falsified
    };
    Ok(RangeReport {
        k,
        max_degree: d_max,
        certificates,
        summary,
        verdict,
    })
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ReplayError {
    #[error("certificate matrix was omitted; only integrity data is available")]
    MatrixOmitted,
    #[error("malformed certificate matrix: {0}")]
    Matrix(#[from] LinalgError),
}

/// What an independent re-check of a certificate found.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Replay {
    pub rank: usize,
    pub verdict: Verdict,
    /// Empty when everything recorded in the certificate was reproduced.
    pub discrepancies: Vec<String>,
}

impl Replay {
    pub fn is_consistent(&self) -> bool {
        self.discrepancies.is_empty()
    }
}

/// Recomputes rank, verdict, witness validity and integrity data from the
/// serialized matrix alone.
pub fn replay(cert: &Certificate) -> Result<Replay, ReplayError> {
    let matrix = cert.bit_matrix().ok_or(ReplayError::MatrixOmitted)??;
    let rank = matrix.rank();
    let verdict = if rank == matrix.nrows() {
        Verdict::Verified
    } else {
        Verdict::Falsified
    };
    let mut discrepancies = Vec::new();
    let mut expect = |ok: bool, what: String| {
        if !ok {
            discrepancies.push(what);
        }
    };
    expect(
        rank == cert.rank,
        format!("rank {rank} != recorded {}", cert.rank),
    );
    expect(
        verdict == cert.verdict,
        format!("verdict {verdict} != recorded {}", cert.verdict),
    );
    expect(
        matrix.nrows() == cert.words.len() && cert.words.len() == cert.expected,
        format!(
            "{} rows, {} words, {} expected",
            matrix.nrows(),
            cert.words.len(),
            cert.expected
        ),
    );
    match (&cert.witness, verdict) {
        (None, Verdict::Verified) => {}
        (Some(w), Verdict::Falsified) => {
            let ok = BitVector::from_bit_string(w).is_ok_and(|w| matrix.verify_witness(&w));
            expect(ok, "dependency witness does not cancel".into());
        }
        (Some(_), Verdict::Verified) => expect(false, "witness present on independent rows".into()),
        (None, Verdict::Falsified) => expect(false, "dependent rows but no witness".into()),
    }
    expect(
        Integrity::of(&matrix) == cert.integrity,
        "integrity data does not match matrix".into(),
    );
    Ok(Replay {
        rank,
        verdict,
        discrepancies,
    })
}

/// Recomputes row `row` from `(k, I)` and compares it with the stored matrix.
/// Returns `Ok(None)` if the matrix was omitted.
pub fn recheck_row(cert: &Certificate, row: usize) -> Result<Option<bool>, VerifyError> {
    let word = cert.words.get(row).ok_or(VerifyError::NoSuchRow(row))?;
    let Some(matrix) = &cert.matrix else {
        return Ok(None);
    };
    let image = phi_image(cert.k, word)?;
    let mut v = BitVector::zeros(cert.basis.len());
    for m in image.terms() {
        match cert.basis.iter().position(|b| b == m) {
            Some(i) => v.set(i, true),
            None => return Ok(Some(false)),
        }
    }
    Ok(Some(matrix.get(row) == Some(&v.to_bit_string())))
}

/// Checks that `cert` was built over the full degree-`d` monomial basis.
pub fn basis_is_complete(cert: &Certificate) -> bool {
    cert.basis == monomials_of_degree(cert.k as usize, cert.degree)
}

/// A random word of total degree at most `max_degree`; a uniformly random
/// composition of a uniformly chosen degree. Not necessarily admissible.
pub fn random_word<R: Rng>(rng: &mut R, max_degree: u32) -> SqWord {
    let degree = rng.gen_range(0..=max_degree);
    let mut entries = Vec::new();
    let mut run = 0;
    for _ in 0..degree {
        run += 1;
        if rng.gen_bool(0.5) {
            entries.push(run);
            run = 0;
        }
    }
    if run > 0 {
        entries.push(run);
    }
    SqWord::new(entries).expect("entries are positive")
}

/// A random homogeneous polynomial in `Z/2[w1..wk]` of degree at most
/// `max_degree`; each monomial of the chosen degree appears with probability
/// one half.
pub fn random_poly<R: Rng>(rng: &mut R, k: usize, max_degree: u32) -> SWPoly {
    let d = rng.gen_range(0..=max_degree);
    SWPoly::from_monomials(
        k,
        monomials_of_degree(k, d)
            .into_iter()
            .filter(|_| rng.gen_bool(0.5)),
    )
}

/// A trial where `Sq^I p` disagreed with the Adem-reduced evaluation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Counterexample {
    pub trial: usize,
    pub trial_seed: u64,
    pub word: SqWord,
    pub poly: String,
    pub direct: String,
    pub reduced: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConsistencyReport {
    pub seed: u64,
    pub trials: usize,
    pub passed: usize,
    pub failures: Vec<Counterexample>,
}

const CONSISTENCY_WIDTH: usize = 10;
const CONSISTENCY_WORD_DEGREE: u32 = 16;
const CONSISTENCY_POLY_DEGREE: u32 = 10;

/// Seed of trial `trial` in a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: usize) -> u64 {
    seed.wrapping_add(trial as u64)
}

/// One action-consistency trial: compares `Sq^I p` with
/// `sum_{J in adem_reduce(I)} Sq^J p` for a random word and polynomial drawn
/// from `trial_seed`.
pub fn consistency_trial(trial: usize, trial_seed: u64) -> Result<(), Counterexample> {
    let mut rng = ChaCha8Rng::seed_from_u64(trial_seed);
    let word = random_word(&mut rng, CONSISTENCY_WORD_DEGREE);
    let poly = random_poly(&mut rng, CONSISTENCY_WIDTH, CONSISTENCY_POLY_DEGREE);
    let direct = sq_word_apply(&word, &poly);
    let reduced = sq_expr_apply(&adem_reduce(&word), &poly);
    if direct == reduced {
        Ok(())
    } else {
        Err(Counterexample {
            trial,
            trial_seed,
            word,
            poly: poly.to_string(),
            direct: direct.to_string(),
            reduced: reduced.to_string(),
        })
    }
}

/// Runs `trials` seeded action-consistency trials. Any failure can be
/// reproduced with [`consistency_trial`] and its recorded seed.
pub fn consistency_adem_action(trials: usize, seed: u64) -> ConsistencyReport {
    let failures: Vec<Counterexample> = (0..trials)
        .into_par_iter()
        .filter_map(|t| consistency_trial(t, trial_seed(seed, t)).err())
        .collect();
    ConsistencyReport {
        seed,
        trials,
        passed: trials - failures.len(),
        failures,
    }
}

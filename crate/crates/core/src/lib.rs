//! Exact mod-2 computations behind the statement that every pair `(M, α)`
//! with `α ∈ H^k(M; Z/2)` is realizable by immersions up to cobordism.
//!
//! The key step is that the classes `Sq^I(w_k)`, for admissible `I` with
//! excess `e(I) <= k`, are linearly independent in `H*(MO(k)) = (w_k)`.
//! [`verifier`] certifies this degree by degree over GF(2); the other modules
//! supply the algebra it needs.

pub mod cli;
pub mod em_cobordism;
pub mod gf2_linalg;
pub mod steenrod;
pub mod sw_ring;
pub mod verifier;

pub use gf2_linalg::{BitMatrix, BitVector};
pub use steenrod::{adem_reduce, enumerate_admissible, SqExpr, SqWord};
pub use sw_ring::{sq_on_poly, sq_word_apply, SWMonomial, SWPoly};
pub use verifier::{check_degree, check_range, Certificate, Verdict};

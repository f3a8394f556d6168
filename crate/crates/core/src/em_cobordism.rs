//! Graded dimension counts: `H*(K(Z/2, k))`, its primitives, `H*(MO(k))`, the
//! unoriented cobordism ring `N_*`, and the bordism groups `N_n(K(Z/2, k))`.
//!
//! `H*(K(Z/2, k))` is polynomial on `Sq^I ι_k` for admissible `I` with
//! `e(I) < k`; its primitives are spanned by the `Sq^I ι_k` with `e(I) <= k`.
//! `N_*` is polynomial on one generator in each degree `i >= 2` with
//! `i != 2^s - 1`, and `N_*(X) = H_*(X) ⊗ N_*`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::steenrod::enumerate_admissible;
use crate::sw_ring::monomials_of_degree;

/// Coefficients of a power series in `t`, truncated after degree `d_max`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HilbertSeries {
    coefficients: Vec<u64>,
}

impl HilbertSeries {
    pub fn one(d_max: u32) -> Self {
        let mut coefficients = vec![0; d_max as usize + 1];
        coefficients[0] = 1;
        Self { coefficients }
    }

    pub fn from_coefficients(coefficients: Vec<u64>) -> Self {
        assert!(
            !coefficients.is_empty(),
            "series needs a degree-0 coefficient"
        );
        Self { coefficients }
    }

    /// `prod_g 1/(1 - t^g)`: the Hilbert series of a polynomial algebra on
    /// generators of the given (positive) degrees.
    pub fn polynomial_algebra<I: IntoIterator<Item = u32>>(
        generator_degrees: I,
        d_max: u32,
    ) -> Self {
        let mut s = Self::one(d_max);
        for g in generator_degrees {
            s.divide_by_one_minus_t_pow(g);
        }
        s
    }

    /// Multiplies in place by `1/(1 - t^g) = 1 + t^g + t^2g + ...`.
    fn divide_by_one_minus_t_pow(&mut self, g: u32) {
        assert!(g > 0, "generators must have positive degree");
        let g = g as usize;
        for d in g..self.coefficients.len() {
            self.coefficients[d] += self.coefficients[d - g];
        }
    }

    pub fn d_max(&self) -> u32 {
        (self.coefficients.len() - 1) as u32
    }

    pub fn coefficient(&self, d: u32) -> Option<u64> {
        self.coefficients.get(d as usize).copied()
    }

    pub fn coefficients(&self) -> &[u64] {
        &self.coefficients
    }

    /// Product truncated at the smaller of the two truncation degrees.
    pub fn mul(&self, other: &HilbertSeries) -> HilbertSeries {
        let n = self.coefficients.len().min(other.coefficients.len());
        let coefficients = (0..n)
            .map(|d| {
                (0..=d)
                    .map(|j| self.coefficients[j] * other.coefficients[d - j])
                    .sum()
            })
            .collect();
        HilbertSeries { coefficients }
    }
}

/// Degrees `k + |I|` of the polynomial generators `Sq^I ι_k` of
/// `H*(K(Z/2, k))` up to `d_max`, in increasing order.
pub fn serre_generator_degrees(k: u32, d_max: u32) -> Vec<u32> {
    assert!(k >= 1, "k must be positive");
    if d_max < k {
        return Vec::new();
    }
    (0..=d_max - k)
        .flat_map(|m| {
            let count = enumerate_admissible(m, Some(k as i64 - 1)).len();
            std::iter::repeat_n(k + m, count)
        })
        .collect()
}

pub fn h_series_k(k: u32, d_max: u32) -> HilbertSeries {
    HilbertSeries::polynomial_algebra(serre_generator_degrees(k, d_max), d_max)
}

/// `dim H^d(K(Z/2, k))`.
pub fn h_dim_k(k: u32, d: u32) -> u64 {
    h_series_k(k, d).coefficient(d).unwrap()
}

/// `dim PH^d(K(Z/2, k))`, which equals `dim QH_d(K(Z/2, k))`.
pub fn primitive_dim_k(k: u32, d: u32) -> u64 {
    if d < k {
        return 0;
    }
    enumerate_admissible(d - k, Some(k as i64)).len() as u64
}

/// `dim H^d(MO(k))`, the degree-`d` part of the ideal `(w_k)`.
pub fn h_dim_mo(k: u32, d: u32) -> u64 {
    if d < k {
        return 0;
    }
    monomials_of_degree(k as usize, d - k).len() as u64
}

/// Whether `i` is a degree carrying a polynomial generator of `N_*`.
pub fn is_nstar_generator_degree(i: u32) -> bool {
    i >= 2 && !(i + 1).is_power_of_two()
}

pub fn nstar_series(d_max: u32) -> HilbertSeries {
    HilbertSeries::polynomial_algebra((2..=d_max).filter(|&i| is_nstar_generator_degree(i)), d_max)
}

/// `dim N_n`.
pub fn nstar_dim(n: u32) -> u64 {
    nstar_series(n).coefficient(n).unwrap()
}

/// `dim N_n(K(Z/2, k)) = sum_j dim H_j(K) * dim N_{n-j}`.
pub fn bordism_dim_k(k: u32, n: u32) -> u64 {
    bordism_series_k(k, n).coefficient(n).unwrap()
}

pub fn bordism_series_k(k: u32, d_max: u32) -> HilbertSeries {
    h_series_k(k, d_max).mul(&nstar_series(d_max))
}

/// The graded objects whose dimensions the CLI tabulates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Space {
    /// `H*(K(Z/2, k))`
    K,
    /// `H̄*(MO(k))`
    MO,
    /// `N_*`
    Nstar,
    /// `N_*(K(Z/2, k))`
    NK,
}

impl Space {
    pub fn needs_k(self) -> bool {
        !matches!(self, Space::Nstar)
    }

    /// Dimensions in degrees `lo..=hi`. `k` is ignored for `Nstar`.
    pub fn dims(self, k: u32, lo: u32, hi: u32) -> Vec<u64> {
        if lo > hi {
            return Vec::new();
        }
        let series = match self {
            Space::K => h_series_k(k, hi),
            Space::Nstar => nstar_series(hi),
            Space::NK => bordism_series_k(k, hi),
            Space::MO => return (lo..=hi).map(|d| h_dim_mo(k, d)).collect(),
        };
        series.coefficients()[lo as usize..=hi as usize].to_vec()
    }
}

impl fmt::Display for Space {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Space::K => "K",
            Space::MO => "MO",
            Space::Nstar => "Nstar",
            Space::NK => "NK",
        })
    }
}

impl FromStr for Space {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "K" => Ok(Space::K),
            "MO" => Ok(Space::MO),
            "Nstar" => Ok(Space::Nstar),
            "NK" => Ok(Space::NK),
            other => Err(format!(
                "unknown space {other:?} (expected K, MO, Nstar or NK)"
            )),
        }
    }
}

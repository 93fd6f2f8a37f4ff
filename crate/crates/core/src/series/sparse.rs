//! Sparse q-series and the classical expansions of Euler's product.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{Modulus, TruncatedSeries};

/// A finite sum of monomials `c q^e` with strictly increasing exponents and
/// no zero coefficients.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SparseSeries {
    terms: Vec<(usize, i64)>,
}

impl SparseSeries {
    /// Builds a sparse series, dropping zero coefficients.
    pub fn new(terms: Vec<(usize, i64)>) -> Result<Self> {
        if terms.windows(2).any(|w| w[0].0 >= w[1].0) {
            return Err(Error::InvalidArgument(
                "sparse exponents must be strictly increasing".into(),
            ));
        }
        Ok(SparseSeries {
            terms: terms.into_iter().filter(|&(_, c)| c != 0).collect(),
        })
    }

    pub fn terms(&self) -> &[(usize, i64)] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Coefficient of `q^e` (zero when absent).
    pub fn coeff(&self, e: usize) -> i64 {
        self.terms
            .binary_search_by_key(&e, |&(x, _)| x)
            .map_or(0, |i| self.terms[i].1)
    }

    /// Substitutes `q -> q^t`.
    pub fn dilate(&self, t: usize) -> Self {
        assert!(t >= 1, "dilation factor must be positive");
        SparseSeries {
            terms: self.terms.iter().map(|&(e, c)| (e * t, c)).collect(),
        }
    }

    /// Drops every term with exponent `>= n`.
    pub fn truncate(&self, n: usize) -> Self {
        SparseSeries {
            terms: self.terms.iter().copied().take_while(|&(e, _)| e < n).collect(),
        }
    }

    /// Dense form with the given truncation and coefficient ring.
    pub fn to_dense(&self, truncation: usize, modulus: Modulus) -> TruncatedSeries {
        let mut coeffs = vec![0i64; truncation];
        for &(e, c) in self.terms.iter().take_while(|&&(e, _)| e < truncation) {
            coeffs[e] = c;
        }
        TruncatedSeries::from_i64(&coeffs, modulus)
    }
}

/// Euler's product `prod_{n>=1} (1 - q^{tn})` below `q^truncation`, expanded
/// by the pentagonal number theorem as `sum_k (-1)^k q^{t k(3k-1)/2}`.
pub fn euler_series(truncation: usize, t: usize) -> SparseSeries {
    assert!(t >= 1, "dilation factor must be positive");
    let mut terms = Vec::new();
    if truncation == 0 {
        return SparseSeries { terms };
    }
    terms.push((0, 1));
    for k in 1usize.. {
        let sign = if k % 2 == 0 { 1 } else { -1 };
        // generalized pentagonal numbers k(3k-1)/2 and k(3k+1)/2
        let lo = t * (k * (3 * k - 1) / 2);
        if lo >= truncation {
            break;
        }
        terms.push((lo, sign));
        let hi = t * (k * (3 * k + 1) / 2);
        if hi < truncation {
            terms.push((hi, sign));
        }
    }
    SparseSeries { terms }
}

/// `prod_{n>=1} (1 - q^{tn})^3 = sum_{k>=0} (-1)^k (2k+1) q^{t k(k+1)/2}`
/// below `q^truncation`.
pub fn jacobi_cube_series(truncation: usize, t: usize) -> SparseSeries {
    assert!(t >= 1, "dilation factor must be positive");
    let terms = (0usize..)
        .map(|k| (t * (k * (k + 1) / 2), k))
        .take_while(|&(e, _)| e < truncation)
        .map(|(e, k)| {
            let c = 2 * k as i64 + 1;
            (e, if k % 2 == 0 { c } else { -c })
        })
        .collect();
    SparseSeries { terms }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Multiplies out `prod_{n < len} (1 - q^n)` directly.
    fn product_oracle(len: usize) -> Vec<i64> {
        let mut acc = vec![0i64; len];
        if len > 0 {
            acc[0] = 1;
        }
        for n in 1..len {
            for i in (n..len).rev() {
                acc[i] -= acc[i - n];
            }
        }
        acc
    }

    fn dense(s: &SparseSeries, len: usize) -> Vec<i64> {
        (0..len).map(|e| s.coeff(e)).collect()
    }

    #[test]
    fn pentagonal_matches_product_to_13() {
        let s = euler_series(13, 1);
        assert_eq!(
            s.terms(),
            &[(0, 1), (1, -1), (2, -1), (5, 1), (7, 1), (12, -1)]
        );
        assert_eq!(dense(&s, 13), product_oracle(13));
    }

    #[test]
    fn pentagonal_matches_product_to_1000() {
        assert_eq!(dense(&euler_series(1000, 1), 1000), product_oracle(1000));
    }

    #[test]
    fn pentagonal_edge_truncations() {
        assert_eq!(euler_series(1, 1).terms(), &[(0, 1)]);
        assert!(euler_series(0, 1).is_empty());
        let s = euler_series(100, 45);
        assert_eq!(s.terms(), &[(0, 1), (45, -1), (90, -1)]);
        assert_eq!(s, euler_series(3, 1).dilate(45));
    }

    #[test]
    fn jacobi_cube_small_cases() {
        assert_eq!(
            jacobi_cube_series(11, 1).terms(),
            &[(0, 1), (1, -3), (3, 5), (6, -7), (10, 9)]
        );
        assert_eq!(jacobi_cube_series(1, 1).terms(), &[(0, 1)]);
        // 9 k(k+1)/2 = 0, 9, 27, 54, ...
        let s = jacobi_cube_series(50, 9);
        assert_eq!(s.terms(), &[(0, 1), (9, -3), (27, 5)]);
        assert_eq!(jacobi_cube_series(55, 9).terms().last(), Some(&(54, -7)));
        assert_eq!(s, jacobi_cube_series(6, 1).dilate(9));
    }

    #[test]
    fn jacobi_cube_is_cube_of_pentagonal_small() {
        let e = product_oracle(11);
        let mut cube = vec![0i64; 11];
        for i in 0..11 {
            for j in 0..11 - i {
                for k in 0..11 - i - j {
                    cube[i + j + k] += e[i] * e[j] * e[k];
                }
            }
        }
        assert_eq!(dense(&jacobi_cube_series(11, 1), 11), cube);
    }

    #[test]
    fn sparse_constructor_validates() {
        assert!(SparseSeries::new(vec![(3, 1), (2, 1)]).is_err());
        let s = SparseSeries::new(vec![(0, 1), (2, 0), (4, -2)]).unwrap();
        assert_eq!(s.terms(), &[(0, 1), (4, -2)]);
        assert_eq!(s.truncate(4).terms(), &[(0, 1)]);
    }
}

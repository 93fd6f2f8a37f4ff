//! Truncated formal power series in `q`.
//!
//! A [`TruncatedSeries`] stores the coefficients of `q^0, ..., q^{N-1}`;
//! coefficients at `n >= N` are unknown (not zero), so every binary operation
//! returns the smallest truncation its inputs determine. Coefficients live
//! either in the integers ([`Modulus::EXACT`]) or in `Z/MZ` with every stored
//! value normalized to `[0, M)`.

mod io;
mod ntt;
mod sparse;

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub use sparse::{euler_series, jacobi_cube_series, SparseSeries};

/// Largest residue modulus accepted (coefficients must fit in a `u32`).
pub const MAX_MODULUS: u64 = 1 << 31;

/// Below this many nonzero terms an operand is treated as sparse by
/// [`MulAlgorithm::Auto`] and by [`TruncatedSeries::invert`].
const SPARSE_MUL_TERMS: usize = 32;
const SPARSE_INVERT_TERMS: usize = 256;
const SCHOOLBOOK_LEN: usize = 64;

/// Coefficient ring of a series: the integers, or `Z/MZ` for `2 <= M <= 2^31`.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Modulus(u32);

impl Modulus {
    /// Unreduced arbitrary-precision integers.
    pub const EXACT: Modulus = Modulus(0);

    pub fn new(m: u64) -> Result<Self> {
        if (2..=MAX_MODULUS).contains(&m) {
            Ok(Modulus(m as u32))
        } else {
            Err(Error::InvalidModulus(m))
        }
    }

    pub fn is_exact(self) -> bool {
        self.0 == 0
    }

    /// The residue modulus, or `None` in exact mode.
    pub fn value(self) -> Option<u64> {
        (self.0 != 0).then_some(self.0 as u64)
    }

    /// Reduces an integer into this ring's canonical representative.
    pub(crate) fn reduce_i64(self, x: i64) -> u32 {
        x.rem_euclid(self.0 as i64) as u32
    }
}

impl fmt::Debug for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Modulus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.value() {
            Some(m) => write!(f, "{m}"),
            None => f.write_str("exact"),
        }
    }
}

impl std::str::FromStr for Modulus {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("exact") {
            return Ok(Modulus::EXACT);
        }
        let m: u64 = s
            .parse()
            .map_err(|_| Error::parse(s, "expected a modulus or `exact`"))?;
        Modulus::new(m)
    }
}

impl Serialize for Modulus {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self.value() {
            Some(m) => serializer.serialize_u64(m),
            None => serializer.serialize_str("exact"),
        }
    }
}

impl<'de> Deserialize<'de> for Modulus {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Number(u64),
            Text(String),
        }
        match Raw::deserialize(deserializer)? {
            Raw::Number(m) => Modulus::new(m).map_err(serde::de::Error::custom),
            Raw::Text(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Multiplication strategy for dense operands.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum MulAlgorithm {
    /// Direct convolution, `O(N * nonzeros)`.
    Schoolbook,
    /// Multi-modular NTT convolution, `O(N log N)` per prime.
    Fast,
    /// Sparse path for very sparse operands, schoolbook for tiny ones, NTT otherwise.
    #[default]
    Auto,
}

#[derive(Clone, PartialEq, Eq)]
enum Coeffs {
    Residue(Vec<u32>),
    Exact(Vec<BigInt>),
}

/// Coefficients of `q^0 .. q^{N-1}` over [`Modulus`].
#[derive(Clone, PartialEq, Eq)]
pub struct TruncatedSeries {
    modulus: Modulus,
    coeffs: Coeffs,
}

impl fmt::Debug for TruncatedSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<String> = (0..self.truncation().min(16))
            .map(|n| self.coeff(n).to_string())
            .collect();
        write!(
            f,
            "TruncatedSeries(mod {}, N={}, [{}{}])",
            self.modulus,
            self.truncation(),
            shown.join(", "),
            if self.truncation() > 16 { ", .." } else { "" }
        )
    }
}

fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let g = (a as i64).extended_gcd(&(m as i64));
    (g.gcd == 1).then(|| g.x.rem_euclid(m as i64) as u64)
}

/// Additions of products `< (m-1)^2` that fit in a `u64` on top of a value `< m`.
fn lazy_budget(m: u64) -> usize {
    let sq = (m - 1) * (m - 1);
    if sq == 0 {
        usize::MAX
    } else {
        ((u64::MAX - m) / sq).min(usize::MAX as u64) as usize
    }
}

fn sparse_mul_residues(a: &[u32], terms: &[(usize, u64)], out_len: usize, m: u64) -> Vec<u32> {
    let budget = lazy_budget(m);
    let mut acc = vec![0u64; out_len];
    let mut pending = 0usize;
    for &(e, c) in terms {
        if e >= out_len {
            break;
        }
        if c == 0 {
            continue;
        }
        for (dst, &x) in acc[e..].iter_mut().zip(a) {
            *dst += c * x as u64;
        }
        pending += 1;
        if pending == budget {
            acc.iter_mut().for_each(|v| *v %= m);
            pending = 0;
        }
    }
    acc.into_iter().map(|v| (v % m) as u32).collect()
}

/// Solves `b * s = a` for `b` where `s = c0 + sum tail`; `tail` holds the
/// negated residues of the nonconstant terms.
fn sparse_div_residues(a: &[u32], neg_tail: &[(usize, u64)], inv_c0: u64, m: u64) -> Vec<u32> {
    let n = a.len();
    let mut b = vec![0u32; n];
    if neg_tail.len() < lazy_budget(m) {
        for k in 0..n {
            let mut acc = a[k] as u64;
            for &(e, c) in neg_tail {
                if e > k {
                    break;
                }
                acc += c * b[k - e] as u64;
            }
            b[k] = (acc % m * inv_c0 % m) as u32;
        }
    } else {
        for k in 0..n {
            let mut acc = a[k] as u64;
            for &(e, c) in neg_tail {
                if e > k {
                    break;
                }
                acc = (acc + c * b[k - e] as u64) % m;
            }
            b[k] = (acc % m * inv_c0 % m) as u32;
        }
    }
    b
}

fn sparse_mul_exact(a: &[BigInt], terms: &[(usize, BigInt)], out_len: usize) -> Vec<BigInt> {
    let mut acc = vec![BigInt::zero(); out_len];
    for (e, c) in terms {
        if *e >= out_len {
            break;
        }
        for (dst, x) in acc[*e..].iter_mut().zip(a) {
            if !x.is_zero() {
                *dst += c * x;
            }
        }
    }
    acc
}

fn sparse_div_exact(a: &[BigInt], tail: &[(usize, BigInt)], c0: &BigInt) -> Vec<BigInt> {
    let mut b: Vec<BigInt> = Vec::with_capacity(a.len());
    for k in 0..a.len() {
        let mut acc = a[k].clone();
        for (e, c) in tail {
            if *e > k {
                break;
            }
            acc -= c * &b[k - e];
        }
        // c0 is +-1
        if c0.is_negative() {
            acc = -acc;
        }
        b.push(acc);
    }
    b
}

impl TruncatedSeries {
    /// The zero series with `truncation` known coefficients.
    pub fn zero(truncation: usize, modulus: Modulus) -> Self {
        let coeffs = if modulus.is_exact() {
            Coeffs::Exact(vec![BigInt::zero(); truncation])
        } else {
            Coeffs::Residue(vec![0; truncation])
        };
        TruncatedSeries { modulus, coeffs }
    }

    /// The constant series 1 (empty when `truncation == 0`).
    pub fn one(truncation: usize, modulus: Modulus) -> Self {
        let mut s = Self::zero(truncation, modulus);
        if truncation > 0 {
            s.set_i64(0, 1);
        }
        s
    }

    pub fn from_i64(coeffs: &[i64], modulus: Modulus) -> Self {
        let coeffs = match modulus.value() {
            None => Coeffs::Exact(coeffs.iter().map(|&c| BigInt::from(c)).collect()),
            Some(_) => Coeffs::Residue(coeffs.iter().map(|&c| modulus.reduce_i64(c)).collect()),
        };
        TruncatedSeries { modulus, coeffs }
    }

    /// Builds a series from integers, reducing them when `modulus` is a residue ring.
    pub fn from_bigints(coeffs: Vec<BigInt>, modulus: Modulus) -> Self {
        let coeffs = match modulus.value() {
            None => Coeffs::Exact(coeffs),
            Some(m) => {
                let mb = BigInt::from(m);
                Coeffs::Residue(
                    coeffs
                        .iter()
                        .map(|c| c.mod_floor(&mb).to_u32().expect("residue fits in u32"))
                        .collect(),
                )
            }
        };
        TruncatedSeries { modulus, coeffs }
    }

    /// Builds a residue series; every value must already lie in `[0, m)`.
    pub fn from_residues(values: Vec<u32>, modulus: Modulus) -> Result<Self> {
        let m = modulus
            .value()
            .ok_or_else(|| Error::InvalidArgument("residues need a finite modulus".into()))?;
        if let Some(bad) = values.iter().find(|&&v| v as u64 >= m) {
            return Err(Error::InvalidArgument(format!(
                "residue {bad} is not reduced modulo {m}"
            )));
        }
        Ok(TruncatedSeries {
            modulus,
            coeffs: Coeffs::Residue(values),
        })
    }

    pub fn modulus(&self) -> Modulus {
        self.modulus
    }

    /// Number of known coefficients `N`.
    pub fn truncation(&self) -> usize {
        match &self.coeffs {
            Coeffs::Residue(v) => v.len(),
            Coeffs::Exact(v) => v.len(),
        }
    }

    /// Coefficient of `q^n`, or zero when `n` is beyond the truncation.
    pub fn coeff(&self, n: usize) -> BigInt {
        match &self.coeffs {
            Coeffs::Residue(v) => v.get(n).map_or_else(BigInt::zero, |&x| BigInt::from(x)),
            Coeffs::Exact(v) => v.get(n).cloned().unwrap_or_default(),
        }
    }

    pub fn residues(&self) -> Option<&[u32]> {
        match &self.coeffs {
            Coeffs::Residue(v) => Some(v),
            Coeffs::Exact(_) => None,
        }
    }

    pub fn exact_coeffs(&self) -> Option<&[BigInt]> {
        match &self.coeffs {
            Coeffs::Exact(v) => Some(v),
            Coeffs::Residue(_) => None,
        }
    }

    /// Whether the coefficient of `q^n` is zero in the coefficient ring.
    pub fn is_zero_at(&self, n: usize) -> bool {
        match &self.coeffs {
            Coeffs::Residue(v) => v[n] == 0,
            Coeffs::Exact(v) => v[n].is_zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        (0..self.truncation()).all(|n| self.is_zero_at(n))
    }

    /// First index with a nonzero coefficient (the `M`-adic order), if any is known.
    pub fn order(&self) -> Option<usize> {
        (0..self.truncation()).find(|&n| !self.is_zero_at(n))
    }

    pub fn nonzero_count(&self) -> usize {
        (0..self.truncation()).filter(|&n| !self.is_zero_at(n)).count()
    }

    fn set_i64(&mut self, n: usize, value: i64) {
        let modulus = self.modulus;
        match &mut self.coeffs {
            Coeffs::Residue(v) => v[n] = modulus.reduce_i64(value),
            Coeffs::Exact(v) => v[n] = BigInt::from(value),
        }
    }

    fn check_same_ring(&self, other: &Self) -> Result<()> {
        if self.modulus != other.modulus {
            return Err(Error::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        Ok(())
    }

    /// Keeps the first `n` coefficients (`n` larger than the truncation is a no-op).
    pub fn truncate(&self, n: usize) -> Self {
        let n = n.min(self.truncation());
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => Coeffs::Residue(v[..n].to_vec()),
            Coeffs::Exact(v) => Coeffs::Exact(v[..n].to_vec()),
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Zero-pads to truncation `n`. Only for internal use where the padded
    /// tail is genuinely zero (polynomial operands, Newton iterates).
    fn pad_zeros(&self, n: usize) -> Self {
        let mut out = self.clone();
        match &mut out.coeffs {
            Coeffs::Residue(v) => v.resize(n, 0),
            Coeffs::Exact(v) => v.resize(n, BigInt::zero()),
        }
        out
    }

    /// Reduces into a coarser residue ring `Z/M'Z`; requires `M' | M`
    /// (any `M'` from exact mode).
    pub fn reduce(&self, target: Modulus) -> Result<Self> {
        let m2 = target
            .value()
            .ok_or_else(|| Error::InvalidArgument("cannot lift residues to exact".into()))?;
        match (&self.coeffs, self.modulus.value()) {
            (Coeffs::Exact(v), _) => Ok(Self::from_bigints(v.clone(), target)),
            (Coeffs::Residue(v), Some(m)) => {
                if m % m2 != 0 {
                    return Err(Error::InvalidArgument(format!(
                        "{m2} does not divide the modulus {m}"
                    )));
                }
                Ok(TruncatedSeries {
                    modulus: target,
                    coeffs: Coeffs::Residue(v.iter().map(|&x| (x as u64 % m2) as u32).collect()),
                })
            }
            (Coeffs::Residue(_), None) => unreachable!("residue coefficients carry a modulus"),
        }
    }

    /// Coefficientwise sum; truncation is the smaller of the two.
    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, false)
    }

    /// Coefficientwise difference; truncation is the smaller of the two.
    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, true)
    }

    fn zip_with(&self, other: &Self, subtract: bool) -> Result<Self> {
        self.check_same_ring(other)?;
        let n = self.truncation().min(other.truncation());
        let coeffs = match (&self.coeffs, &other.coeffs) {
            (Coeffs::Residue(a), Coeffs::Residue(b)) => {
                let m = self.modulus.value().unwrap();
                Coeffs::Residue(
                    a[..n]
                        .iter()
                        .zip(&b[..n])
                        .map(|(&x, &y)| {
                            let y = if subtract { (m - y as u64) % m } else { y as u64 };
                            ((x as u64 + y) % m) as u32
                        })
                        .collect(),
                )
            }
            (Coeffs::Exact(a), Coeffs::Exact(b)) => Coeffs::Exact(
                a[..n]
                    .iter()
                    .zip(&b[..n])
                    .map(|(x, y)| if subtract { x - y } else { x + y })
                    .collect(),
            ),
            _ => unreachable!("moduli already checked"),
        };
        Ok(TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        })
    }

    pub fn neg(&self) -> Self {
        self.scale(-1)
    }

    /// Multiplies every coefficient by an integer.
    pub fn scale(&self, k: i64) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => {
                let m = self.modulus.value().unwrap();
                let k = self.modulus.reduce_i64(k) as u64;
                Coeffs::Residue(v.iter().map(|&x| (x as u64 * k % m) as u32).collect())
            }
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().map(|x| x * k).collect()),
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Multiplies coefficient `n` by `f(n)`.
    pub fn map_indexed(&self, f: impl Fn(usize) -> i64) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => {
                let m = self.modulus.value().unwrap();
                Coeffs::Residue(
                    v.iter()
                        .enumerate()
                        .map(|(n, &x)| (x as u64 * self.modulus.reduce_i64(f(n)) as u64 % m) as u32)
                        .collect(),
                )
            }
            Coeffs::Exact(v) => {
                Coeffs::Exact(v.iter().enumerate().map(|(n, x)| x * f(n)).collect())
            }
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    fn residue_terms(&self) -> Vec<(usize, u64)> {
        match &self.coeffs {
            Coeffs::Residue(v) => v
                .iter()
                .enumerate()
                .filter(|(_, &c)| c != 0)
                .map(|(e, &c)| (e, c as u64))
                .collect(),
            Coeffs::Exact(_) => unreachable!(),
        }
    }

    fn exact_terms(&self) -> Vec<(usize, BigInt)> {
        match &self.coeffs {
            Coeffs::Exact(v) => v
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(e, c)| (e, c.clone()))
                .collect(),
            Coeffs::Residue(_) => unreachable!(),
        }
    }

    /// Truncated product `sum_{i+j=n} a_i b_j`; truncation is the smaller of the two.
    pub fn mul(&self, other: &Self, algorithm: MulAlgorithm) -> Result<Self> {
        self.check_same_ring(other)?;
        let n = self.truncation().min(other.truncation());
        let a = self.truncate(n);
        let b = if std::ptr::eq(self, other) {
            None
        } else {
            Some(other.truncate(n))
        };
        let b_ref = b.as_ref().unwrap_or(&a);
        let algorithm = match algorithm {
            MulAlgorithm::Auto => {
                let sparse = a.nonzero_count().min(b_ref.nonzero_count()) <= SPARSE_MUL_TERMS;
                if sparse || n <= SCHOOLBOOK_LEN {
                    MulAlgorithm::Schoolbook
                } else {
                    MulAlgorithm::Fast
                }
            }
            other => other,
        };
        if algorithm == MulAlgorithm::Fast {
            let fast = match (&a.coeffs, &b_ref.coeffs) {
                (Coeffs::Residue(x), Coeffs::Residue(y)) => {
                    ntt::convolve_residues(x, y, n, self.modulus.value().unwrap()).map(Coeffs::Residue)
                }
                (Coeffs::Exact(x), Coeffs::Exact(y)) => {
                    ntt::convolve_exact(x, y, n).map(Coeffs::Exact)
                }
                _ => unreachable!(),
            };
            // falls through to schoolbook only when the prime family is too small
            if let Some(coeffs) = fast {
                return Ok(TruncatedSeries {
                    modulus: self.modulus,
                    coeffs,
                });
            }
        }
        Ok(a.schoolbook_mul(b_ref))
    }

    fn schoolbook_mul(&self, other: &Self) -> Self {
        let n = self.truncation().min(other.truncation());
        // convolve the denser operand against the sparser one's nonzero terms
        let (dense, sparse) = if self.nonzero_count() >= other.nonzero_count() {
            (self, other)
        } else {
            (other, self)
        };
        let coeffs = match &dense.coeffs {
            Coeffs::Residue(v) => Coeffs::Residue(sparse_mul_residues(
                &v[..n],
                &sparse.residue_terms(),
                n,
                self.modulus.value().unwrap(),
            )),
            Coeffs::Exact(v) => Coeffs::Exact(sparse_mul_exact(&v[..n], &sparse.exact_terms(), n)),
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Product with a sparse series, `O(N * terms)`; truncation unchanged.
    pub fn mul_sparse(&self, s: &SparseSeries) -> Self {
        let n = self.truncation();
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => {
                let terms: Vec<(usize, u64)> = s
                    .terms()
                    .iter()
                    .map(|&(e, c)| (e, self.modulus.reduce_i64(c) as u64))
                    .collect();
                Coeffs::Residue(sparse_mul_residues(v, &terms, n, self.modulus.value().unwrap()))
            }
            Coeffs::Exact(v) => {
                let terms: Vec<(usize, BigInt)> =
                    s.terms().iter().map(|&(e, c)| (e, BigInt::from(c))).collect();
                Coeffs::Exact(sparse_mul_exact(v, &terms, n))
            }
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Quotient by a sparse series via the division recurrence, `O(N * terms)`.
    /// The constant term of `s` must be a unit.
    pub fn div_sparse(&self, s: &SparseSeries) -> Result<Self> {
        let c0 = s.coeff(0);
        let tail: Vec<(usize, i64)> = s.terms().iter().copied().filter(|&(e, _)| e > 0).collect();
        match &self.coeffs {
            Coeffs::Residue(v) => {
                let m = self.modulus.value().unwrap();
                let inv_c0 = inv_mod(self.modulus.reduce_i64(c0) as u64, m)
                    .ok_or_else(|| self.non_unit(BigInt::from(c0)))?;
                let neg_tail: Vec<(usize, u64)> = tail
                    .iter()
                    .map(|&(e, c)| (e, self.modulus.reduce_i64(-c) as u64))
                    .collect();
                Ok(TruncatedSeries {
                    modulus: self.modulus,
                    coeffs: Coeffs::Residue(sparse_div_residues(v, &neg_tail, inv_c0, m)),
                })
            }
            Coeffs::Exact(v) => {
                if c0.abs() != 1 {
                    return Err(self.non_unit(BigInt::from(c0)));
                }
                let tail: Vec<(usize, BigInt)> =
                    tail.iter().map(|&(e, c)| (e, BigInt::from(c))).collect();
                Ok(TruncatedSeries {
                    modulus: self.modulus,
                    coeffs: Coeffs::Exact(sparse_div_exact(v, &tail, &BigInt::from(c0))),
                })
            }
        }
    }

    fn non_unit(&self, constant: BigInt) -> Error {
        Error::NonUnitConstant {
            constant: constant.to_string(),
            modulus: self.modulus,
        }
    }

    /// `self^e` by binary powering; `e = 0` gives 1 at the same truncation.
    pub fn pow(&self, e: u64) -> Self {
        let mut result = Self::one(self.truncation(), self.modulus);
        let mut base = self.clone();
        let mut e = e;
        let mut first = true;
        while e > 0 {
            if e & 1 == 1 {
                result = if first {
                    base.clone()
                } else {
                    result.mul(&base, MulAlgorithm::Auto).expect("same ring")
                };
                first = false;
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base, MulAlgorithm::Auto).expect("same ring");
            }
        }
        result
    }

    /// Multiplicative inverse up to the truncation. The constant term must be a
    /// unit (`+-1` in exact mode); sparse inputs use the division recurrence,
    /// dense ones Newton iteration with fast multiplication.
    pub fn invert(&self) -> Result<Self> {
        let n = self.truncation();
        if n == 0 {
            return Ok(self.clone());
        }
        let c0 = self.coeff(0);
        let unit = match self.modulus.value() {
            Some(m) => inv_mod(self.modulus.reduce_i64(c0.to_i64().unwrap()) as u64, m).is_some(),
            None => c0.abs().is_one(),
        };
        if !unit {
            return Err(self.non_unit(c0));
        }
        if self.nonzero_count() <= SPARSE_INVERT_TERMS {
            return self.invert_by_recurrence();
        }
        Ok(self.invert_newton())
    }

    fn invert_by_recurrence(&self) -> Result<Self> {
        let one = Self::one(self.truncation(), self.modulus);
        match &self.coeffs {
            Coeffs::Residue(_) => {
                let m = self.modulus.value().unwrap();
                let terms = self.residue_terms();
                let inv_c0 = inv_mod(terms[0].1, m).expect("checked unit");
                let neg_tail: Vec<(usize, u64)> =
                    terms[1..].iter().map(|&(e, c)| (e, (m - c) % m)).collect();
                Ok(TruncatedSeries {
                    modulus: self.modulus,
                    coeffs: Coeffs::Residue(sparse_div_residues(
                        one.residues().unwrap(),
                        &neg_tail,
                        inv_c0,
                        m,
                    )),
                })
            }
            Coeffs::Exact(_) => {
                let terms = self.exact_terms();
                Ok(TruncatedSeries {
                    modulus: self.modulus,
                    coeffs: Coeffs::Exact(sparse_div_exact(
                        one.exact_coeffs().unwrap(),
                        &terms[1..],
                        &terms[0].1,
                    )),
                })
            }
        }
    }

    fn invert_newton(&self) -> Self {
        let n = self.truncation();
        let c0 = self.coeff(0);
        let inv_c0 = match self.modulus.value() {
            Some(m) => BigInt::from(inv_mod(self.modulus.reduce_i64(c0.to_i64().unwrap()) as u64, m).unwrap()),
            None => c0,
        };
        let mut b = Self::from_bigints(vec![inv_c0], self.modulus);
        let mut k = 1;
        while k < n {
            let k2 = (2 * k).min(n);
            let b_ext = b.pad_zeros(k2);
            // b <- b - b (a b - 1); the correction vanishes below q^k
            let mut err = self.truncate(k2).mul(&b_ext, MulAlgorithm::Auto).expect("same ring");
            err.set_i64(0, 0);
            let corr = b_ext.mul(&err, MulAlgorithm::Auto).expect("same ring");
            b = b_ext.sub(&corr).expect("same ring");
            k = k2;
        }
        b
    }

    /// Substitutes `q -> q^t`; truncation becomes `t * N`.
    pub fn dilate(&self, t: usize) -> Self {
        assert!(t >= 1, "dilation factor must be positive");
        let n = self.truncation() * t;
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => {
                let mut out = vec![0u32; n];
                for (i, &c) in v.iter().enumerate() {
                    out[i * t] = c;
                }
                Coeffs::Residue(out)
            }
            Coeffs::Exact(v) => {
                let mut out = vec![BigInt::zero(); n];
                for (i, c) in v.iter().enumerate() {
                    out[i * t] = c.clone();
                }
                Coeffs::Exact(out)
            }
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Multiplies by `q^s`; truncation becomes `N + s`.
    pub fn shift(&self, s: usize) -> Self {
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => {
                let mut out = vec![0u32; s];
                out.extend_from_slice(v);
                Coeffs::Residue(out)
            }
            Coeffs::Exact(v) => {
                let mut out = vec![BigInt::zero(); s];
                out.extend_from_slice(v);
                Coeffs::Exact(out)
            }
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }

    /// Coefficients `a_{t n}` for every `t n < N`.
    pub fn extract_stride(&self, t: usize) -> Self {
        assert!(t >= 1, "stride must be positive");
        let coeffs = match &self.coeffs {
            Coeffs::Residue(v) => Coeffs::Residue(v.iter().step_by(t).copied().collect()),
            Coeffs::Exact(v) => Coeffs::Exact(v.iter().step_by(t).cloned().collect()),
        };
        TruncatedSeries {
            modulus: self.modulus,
            coeffs,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn m(x: u64) -> Modulus {
        Modulus::new(x).unwrap()
    }

    fn ex(v: &[i64]) -> TruncatedSeries {
        TruncatedSeries::from_i64(v, Modulus::EXACT)
    }

    #[test]
    fn modulus_bounds() {
        assert!(Modulus::new(1).is_err());
        assert!(Modulus::new(MAX_MODULUS + 1).is_err());
        assert_eq!(m(625).value(), Some(625));
        assert_eq!("exact".parse::<Modulus>().unwrap(), Modulus::EXACT);
        assert_eq!("25".parse::<Modulus>().unwrap(), m(25));
    }

    #[test]
    fn add_examples() {
        let a = ex(&[1, 1, 0]);
        let b = ex(&[1, -1, 0]);
        assert_eq!(a.add(&b).unwrap(), ex(&[2, 0, 0]));
        assert_eq!(a.add(&TruncatedSeries::zero(3, Modulus::EXACT)).unwrap(), a);
        let c = TruncatedSeries::from_i64(&[1, 1, 0, 0, 0], m(5));
        let d = TruncatedSeries::from_i64(&[4, 4, 0, 0, 0], m(5));
        assert!(c.add(&d).unwrap().is_zero());
        assert_eq!(c.add(&d).unwrap().truncation(), 5);
        // truncation is the minimum
        assert_eq!(ex(&[1, 2, 3]).add(&ex(&[1])).unwrap(), ex(&[2]));
    }

    #[test]
    fn modulus_mismatch_rejected() {
        let a = TruncatedSeries::one(3, m(5));
        let b = TruncatedSeries::one(3, m(7));
        assert!(matches!(a.add(&b), Err(Error::ModulusMismatch { .. })));
        assert!(matches!(
            a.mul(&b, MulAlgorithm::Auto),
            Err(Error::ModulusMismatch { .. })
        ));
    }

    #[test]
    fn mul_examples() {
        let a = ex(&[1, 1, 0]);
        let b = ex(&[1, -1, 0]);
        for alg in [MulAlgorithm::Schoolbook, MulAlgorithm::Fast, MulAlgorithm::Auto] {
            assert_eq!(a.mul(&b, alg).unwrap(), ex(&[1, 0, -1]));
        }
    }

    #[test]
    fn empty_series_absorbs() {
        let e = TruncatedSeries::zero(0, m(625));
        let a = TruncatedSeries::one(10, m(625));
        assert_eq!(a.mul(&e, MulAlgorithm::Fast).unwrap().truncation(), 0);
        assert_eq!(a.add(&e).unwrap().truncation(), 0);
        assert_eq!(e.invert().unwrap().truncation(), 0);
        assert_eq!(e.pow(5).truncation(), 0);
    }

    #[test]
    fn pow_examples() {
        let e = euler_series(200, 1).to_dense(200, m(625));
        assert_eq!(e.pow(1), e);
        assert_eq!(e.pow(0), TruncatedSeries::one(200, m(625)));
        assert_eq!(e.pow(2), e.mul(&e, MulAlgorithm::Schoolbook).unwrap());
    }

    #[test]
    fn invert_geometric_and_partitions() {
        assert_eq!(ex(&[1, -1, 0, 0]).invert().unwrap(), ex(&[1, 1, 1, 1]));
        let e = euler_series(8, 1).to_dense(8, Modulus::EXACT);
        assert_eq!(e.invert().unwrap(), ex(&[1, 1, 2, 3, 5, 7, 11, 15]));
    }

    #[test]
    fn invert_non_unit_rejected() {
        let a = TruncatedSeries::from_i64(&[5, 1, 1], m(625));
        assert!(matches!(a.invert(), Err(Error::NonUnitConstant { .. })));
        let b = ex(&[2, 1]);
        assert!(matches!(b.invert(), Err(Error::NonUnitConstant { .. })));
        let s = SparseSeries::new(vec![(0, 5), (1, 1)]).unwrap();
        assert!(TruncatedSeries::one(4, m(25)).div_sparse(&s).is_err());
    }

    #[test]
    fn newton_and_recurrence_agree() {
        let n = 3000;
        let md = m(625);
        // dense input: more than SPARSE_INVERT_TERMS nonzeros
        let a = TruncatedSeries::from_i64(
            &(0..n as i64).map(|i| if i == 0 { 3 } else { (i * i + 1) % 17 }).collect::<Vec<_>>(),
            md,
        );
        let newton = a.invert_newton();
        let rec = a.invert_by_recurrence().unwrap();
        assert_eq!(newton, rec);
        assert_eq!(a.mul(&newton, MulAlgorithm::Fast).unwrap(), TruncatedSeries::one(n, md));
    }

    #[test]
    fn dilate_and_shift() {
        assert_eq!(ex(&[1, 1]).dilate(3), ex(&[1, 0, 0, 1, 0, 0]));
        assert_eq!(ex(&[1, 2]).dilate(1), ex(&[1, 2]));
        let s = ex(&[1]).shift(41);
        assert_eq!(s.truncation(), 42);
        assert_eq!(s.order(), Some(41));
        assert_eq!(ex(&[1, 1]).shift(3), ex(&[0, 0, 0, 1, 1]));
        assert_eq!(ex(&[1, 1]).shift(0), ex(&[1, 1]));
    }

    #[test]
    fn dilate_matches_sparse_dilation() {
        let e = euler_series(40, 1).to_dense(40, Modulus::EXACT);
        assert_eq!(e.dilate(5), euler_series(200, 5).to_dense(200, Modulus::EXACT));
    }

    #[test]
    fn reduce_between_rings() {
        let a = TruncatedSeries::from_i64(&[624, 26, 5], m(625));
        assert_eq!(a.reduce(m(25)).unwrap(), TruncatedSeries::from_i64(&[24, 1, 5], m(25)));
        assert!(a.reduce(m(7)).is_err());
        assert_eq!(
            ex(&[-1, 7]).reduce(m(5)).unwrap(),
            TruncatedSeries::from_i64(&[4, 2], m(5))
        );
    }
}

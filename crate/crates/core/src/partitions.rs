//! Generating functions for three-colored Frobenius partitions.
//!
//! `cphibar3(n) = cphi3(n) - p(n/3)` (with `p` vanishing off the integers) has
//! generating function `9 q prod (1 - q^{9n})^3 / ((1 - q^{3n}) (1 - q^n)^3)`.
//! The auxiliary series `a(n)` is `prod 1 / ((1 - q^{3n}) (1 - q^n)^3)`, so
//! that by the cube identity at `q^9`
//! `cphibar3(n) = 9 sum_k (-1)^k (2k+1) a(n - 1 - 9k(k+1)/2)`.

use std::collections::BTreeSet;
use std::fmt;
use std::io::{Read, Write};
use std::str::FromStr;
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::series::{euler_series, jacobi_cube_series, Modulus, TruncatedSeries};
use crate::verification::{verify_series, CongruenceClaim, VerificationReport};

/// Which partition function a table or claim refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Flavor {
    Cphi3,
    Cphibar3,
    ASeries,
    /// Any other q-expansion (eta-quotient, operator output, identity residual).
    Expansion,
}

impl fmt::Display for Flavor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Flavor::Cphi3 => "cphi3",
            Flavor::Cphibar3 => "cphibar3",
            Flavor::ASeries => "a_series",
            Flavor::Expansion => "expansion",
        })
    }
}

impl FromStr for Flavor {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "cphi3" => Ok(Flavor::Cphi3),
            "cphibar3" => Ok(Flavor::Cphibar3),
            "a_series" | "a" => Ok(Flavor::ASeries),
            "expansion" => Ok(Flavor::Expansion),
            other => Err(Error::parse(other, "expected cphi3, cphibar3, a_series or expansion")),
        }
    }
}

/// Values `0..N` of one of the partition functions, over a fixed ring.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CphiTable {
    pub flavor: Flavor,
    pub values: TruncatedSeries,
}

impl CphiTable {
    pub fn build(flavor: Flavor, truncation: usize, modulus: Modulus) -> Result<Self> {
        match flavor {
            Flavor::Cphi3 => Ok(cphi3_series(truncation, modulus)),
            Flavor::Cphibar3 => Ok(cphibar3_series(truncation, modulus)),
            Flavor::ASeries => Ok(a_series(truncation, modulus)),
            Flavor::Expansion => Err(Error::InvalidArgument(
                "expansion tables come from eta-quotients, not from a flavor".into(),
            )),
        }
    }

    pub fn modulus(&self) -> Modulus {
        self.values.modulus()
    }

    pub fn truncation(&self) -> usize {
        self.values.truncation()
    }

    fn header(&self) -> Value {
        serde_json::json!({
            "flavor": self.flavor,
            "modulus": self.modulus(),
            "truncation": self.truncation(),
        })
    }

    /// `{"header": {"flavor", "modulus", "truncation"}, "values": [...]}`.
    pub fn to_json_value(&self) -> Value {
        let series = self.values.to_json_value();
        serde_json::json!({
            "header": self.header(),
            "values": series["coeffs"],
        })
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let header = value
            .get("header")
            .ok_or_else(|| Error::Serialization("missing `header`".into()))?;
        let flavor: Flavor = serde_json::from_value(header["flavor"].clone())
            .map_err(|e| Error::Serialization(e.to_string()))?;
        let series = serde_json::json!({
            "modulus": header["modulus"],
            "truncation": header["truncation"],
            "coeffs": value["values"],
        });
        Ok(CphiTable {
            flavor,
            values: TruncatedSeries::from_json_value(&series)?,
        })
    }

    /// A `# flavor=... modulus=...` comment line, then `n,value` rows.
    pub fn write_csv<W: Write>(&self, mut writer: W) -> Result<()> {
        writeln!(writer, "# flavor={} modulus={}", self.flavor, self.modulus())
            .map_err(|e| Error::Serialization(e.to_string()))?;
        self.values.write_csv(writer)
    }

    pub fn read_csv<R: Read>(mut reader: R) -> Result<Self> {
        let mut text = String::new();
        reader
            .read_to_string(&mut text)
            .map_err(|e| Error::Serialization(e.to_string()))?;
        let (first, rest) = text.split_once('\n').unwrap_or((&text, ""));
        let fields = first
            .strip_prefix("# ")
            .ok_or_else(|| Error::parse(first, "expected a `# flavor=... modulus=...` header"))?;
        let mut flavor = None;
        let mut modulus = None;
        for field in fields.split_whitespace() {
            match field.split_once('=') {
                Some(("flavor", v)) => flavor = Some(v.parse::<Flavor>()?),
                Some(("modulus", v)) => modulus = Some(v.parse::<Modulus>()?),
                _ => return Err(Error::parse(field, "unknown header field")),
            }
        }
        let (flavor, modulus) = flavor
            .zip(modulus)
            .ok_or_else(|| Error::parse(first, "header needs flavor and modulus"))?;
        Ok(CphiTable {
            flavor,
            values: TruncatedSeries::read_csv(rest.as_bytes(), modulus)?,
        })
    }
}

/// `cphibar3(0..N)` from its product formula: `9 q J(q^9)` divided by the
/// pentagonal series at `q^3` and three times at `q`.
pub fn cphibar3_series(truncation: usize, modulus: Modulus) -> CphiTable {
    let values = if truncation == 0 {
        TruncatedSeries::zero(0, modulus)
    } else {
        let n = truncation - 1;
        let e1 = euler_series(n, 1);
        let mut acc = jacobi_cube_series(n, 9)
            .to_dense(n, modulus)
            .div_sparse(&euler_series(n, 3))
            .expect("unit constant term");
        for _ in 0..3 {
            acc = acc.div_sparse(&e1).expect("unit constant term");
        }
        acc.scale(9).shift(1)
    };
    CphiTable {
        flavor: Flavor::Cphibar3,
        values,
    }
}

/// `cphi3(n) = cphibar3(n) + p(n/3)`.
pub fn cphi3_series(truncation: usize, modulus: Modulus) -> CphiTable {
    let bar = cphibar3_series(truncation, modulus).values;
    let thirds = truncation.div_ceil(3);
    let partitions = TruncatedSeries::one(thirds, modulus)
        .div_sparse(&euler_series(thirds, 1))
        .expect("unit constant term")
        .dilate(3)
        .truncate(truncation);
    CphiTable {
        flavor: Flavor::Cphi3,
        values: bar.add(&partitions).expect("same ring"),
    }
}

/// `a(0..N)` for `prod 1 / ((1 - q^{3n}) (1 - q^n)^3)`: one division by the
/// cube series and one by the pentagonal series at `q^3`.
pub fn a_series(truncation: usize, modulus: Modulus) -> CphiTable {
    let values = TruncatedSeries::one(truncation, modulus)
        .div_sparse(&jacobi_cube_series(truncation, 1))
        .and_then(|s| s.div_sparse(&euler_series(truncation, 3)))
        .expect("unit constant term");
    CphiTable {
        flavor: Flavor::ASeries,
        values,
    }
}

/// Checks `cphibar3(n) = 9 sum_k (-1)^k (2k+1) a(n - 1 - 9k(k+1)/2)` for all
/// `n < N`, the two sides being computed from separate products.
pub fn jacobi_decomposition_check(truncation: usize, modulus: Modulus) -> VerificationReport {
    let start = Instant::now();
    let lhs = cphibar3_series(truncation, modulus).values;
    let rhs = if truncation == 0 {
        TruncatedSeries::zero(0, modulus)
    } else {
        let n = truncation - 1;
        a_series(n, modulus)
            .values
            .mul_sparse(&jacobi_cube_series(n, 9))
            .scale(9)
            .shift(1)
    };
    let diff = lhs.sub(&rhs).expect("same ring");
    let claim = CongruenceClaim {
        flavor: Flavor::Expansion,
        label: "cphibar3 - 9 q J(q^9) a".into(),
        step: 1,
        offset: 0,
        modulus: modulus.value().unwrap_or(0),
        bound: truncation.saturating_sub(1) as u64,
    };
    let mut report = verify_series(&diff, &claim).expect("claim fits the residual");
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    report
}

/// Residues of `1 + 9k(k+1)/2` modulo 45, and the classes `{23, 41} - r`
/// they force for `a(n)`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResidueLemma {
    pub shifts: BTreeSet<u64>,
    pub classes: BTreeSet<u64>,
}

pub fn residue_lemma() -> ResidueLemma {
    let shifts: BTreeSet<u64> = (0u64..90).map(|k| (1 + 9 * k * (k + 1) / 2) % 45).collect();
    let classes = [23u64, 41]
        .iter()
        .flat_map(|&t| shifts.iter().map(move |&r| (t + 45 - r) % 45))
        .collect();
    ResidueLemma { shifts, classes }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::{enumerate_frobenius3, partition_numbers};
    use crate::verification::Status;
    use num_bigint::BigInt;

    #[test]
    fn cphibar3_leading_values() {
        let t = cphibar3_series(6, Modulus::EXACT);
        assert_eq!(t.values.coeff(0), BigInt::from(0));
        assert_eq!(t.values.coeff(1), BigInt::from(9));
        assert_eq!(t.values.coeff(2), BigInt::from(27));
        assert_eq!(t.values.coeff(3), BigInt::from(81));
    }

    #[test]
    fn cphi3_matches_enumeration() {
        let t = cphi3_series(13, Modulus::EXACT);
        assert_eq!(t.values.coeff(0), BigInt::from(1));
        for n in 0..=12u64 {
            assert_eq!(t.values.coeff(n as usize), BigInt::from(enumerate_frobenius3(n).unwrap()), "n = {n}");
        }
    }

    #[test]
    fn cphi3_minus_cphibar3_is_partitions_of_thirds() {
        let n = 400;
        let full = cphi3_series(n, Modulus::EXACT).values;
        let bar = cphibar3_series(n, Modulus::EXACT).values;
        let p = partition_numbers(n / 3);
        for i in 0..n {
            let expected = if i % 3 == 0 { BigInt::from(p[i / 3].clone()) } else { BigInt::from(0) };
            assert_eq!(full.coeff(i) - bar.coeff(i), expected, "n = {i}");
        }
    }

    #[test]
    fn a_series_small_values() {
        let a = a_series(14, Modulus::EXACT).values;
        let got: Vec<BigInt> = (0..4).map(|i| a.coeff(i)).collect();
        assert_eq!(got, [1, 3, 9, 23].map(BigInt::from));
        let a625 = a_series(14, Modulus::new(625).unwrap()).values;
        assert!(a625.is_zero_at(13));
    }

    /// Triples of partitions plus a partition into multiples of 3.
    #[test]
    fn a_series_against_direct_convolution() {
        let n = 60;
        let p: Vec<BigInt> = partition_numbers(n).into_iter().map(BigInt::from).collect();
        let conv = |x: &[BigInt], y: &[BigInt]| -> Vec<BigInt> {
            (0..=n)
                .map(|k| (0..=k).map(|i| &x[i] * &y[k - i]).sum())
                .collect()
        };
        let p3: Vec<BigInt> = (0..=n)
            .map(|k| if k % 3 == 0 { p[k / 3].clone() } else { BigInt::from(0) })
            .collect();
        let cube = conv(&conv(&p, &p), &p);
        let expected = conv(&cube, &p3);
        let a = a_series(n + 1, Modulus::EXACT).values;
        for k in 0..=n {
            assert_eq!(a.coeff(k), expected[k]);
        }
    }

    #[test]
    fn decomposition_spot_values() {
        let bar = cphibar3_series(11, Modulus::EXACT).values;
        let a = a_series(11, Modulus::EXACT).values;
        assert_eq!(bar.coeff(1), BigInt::from(9) * a.coeff(0));
        assert_eq!(bar.coeff(10), BigInt::from(9) * (a.coeff(9) - BigInt::from(3) * a.coeff(0)));
    }

    #[test]
    fn decomposition_check_exact() {
        let report = jacobi_decomposition_check(1500, Modulus::EXACT);
        assert_eq!(report.status, Status::VerifiedToBound);
        assert_eq!(report.checked_count, 1500);
    }

    #[test]
    fn residue_lemma_sets() {
        let lemma = residue_lemma();
        assert_eq!(lemma.shifts, BTreeSet::from([1, 10, 28]));
        assert_eq!(lemma.classes, BTreeSet::from([13, 22, 31, 40]));
        let period: Vec<u64> = (0u64..90).map(|k| (1 + 9 * k * (k + 1) / 2) % 45).collect();
        let next: Vec<u64> = (90u64..180).map(|k| (1 + 9 * k * (k + 1) / 2) % 45).collect();
        assert_eq!(period, next);
    }

    #[test]
    fn table_json_and_csv_round_trip() {
        let t = cphi3_series(20, Modulus::new(625).unwrap());
        let json = t.to_json_value();
        assert_eq!(json["header"]["flavor"], "cphi3");
        assert_eq!(json["header"]["modulus"], 625);
        assert_eq!(CphiTable::from_json_value(&json).unwrap(), t);
        let mut buf = Vec::new();
        t.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# flavor=cphi3 modulus=625\n0,1\n1,9\n"));
        assert_eq!(CphiTable::read_csv(buf.as_slice()).unwrap(), t);
        let exact = a_series(30, Modulus::EXACT);
        let mut buf = Vec::new();
        exact.write_csv(&mut buf).unwrap();
        assert_eq!(CphiTable::read_csv(buf.as_slice()).unwrap(), exact);
    }
}

//! JSON and CSV encodings of truncated series.
//!
//! JSON: `{"modulus": M | "exact", "truncation": N, "coeffs": [c0, c1, ...]}`.
//! CSV: one `n,c_n` row per known coefficient, no header. Residues are
//! written already reduced to `[0, M)`; exact coefficients keep full precision.

use std::io::{Read, Write};

use num_bigint::BigInt;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use serde_json::{Number, Value};

use super::{Coeffs, Modulus, TruncatedSeries};
use crate::error::{Error, Result};

fn ser_err(e: impl std::fmt::Display) -> Error {
    Error::Serialization(e.to_string())
}

fn parse_coeff(text: &str) -> Result<BigInt> {
    text.trim()
        .parse::<BigInt>()
        .map_err(|_| Error::parse(text, "expected an integer coefficient"))
}

impl TruncatedSeries {
    pub fn to_json_value(&self) -> Value {
        let coeffs: Vec<Value> = match &self.coeffs {
            Coeffs::Residue(v) => v.iter().map(|&c| Value::from(c)).collect(),
            Coeffs::Exact(v) => v
                .iter()
                .map(|c| Value::Number(c.to_string().parse::<Number>().expect("integer literal")))
                .collect(),
        };
        serde_json::json!({
            "modulus": self.modulus,
            "truncation": self.truncation(),
            "coeffs": coeffs,
        })
    }

    pub fn from_json_value(value: &Value) -> Result<Self> {
        let modulus: Modulus = serde_json::from_value(
            value.get("modulus").cloned().ok_or_else(|| ser_err("missing `modulus`"))?,
        )
        .map_err(ser_err)?;
        let truncation = value
            .get("truncation")
            .and_then(Value::as_u64)
            .ok_or_else(|| ser_err("missing or invalid `truncation`"))? as usize;
        let raw = value
            .get("coeffs")
            .and_then(Value::as_array)
            .ok_or_else(|| ser_err("missing `coeffs` array"))?;
        if raw.len() != truncation {
            return Err(ser_err(format!(
                "`truncation` is {truncation} but {} coefficients were given",
                raw.len()
            )));
        }
        let ints = raw
            .iter()
            .map(|c| match c {
                Value::Number(n) => parse_coeff(&n.to_string()),
                other => Err(Error::parse(other.to_string(), "expected an integer coefficient")),
            })
            .collect::<Result<Vec<_>>>()?;
        if let Some(m) = modulus.value() {
            let unreduced = ints
                .iter()
                .find(|c| **c < BigInt::from(0) || **c >= BigInt::from(m));
            if let Some(c) = unreduced {
                return Err(ser_err(format!("coefficient {c} is not reduced modulo {m}")));
            }
        }
        Ok(TruncatedSeries::from_bigints(ints, modulus))
    }

    pub fn to_json_string(&self) -> String {
        self.to_json_value().to_string()
    }

    pub fn from_json_str(text: &str) -> Result<Self> {
        let value: Value = serde_json::from_str(text).map_err(ser_err)?;
        Self::from_json_value(&value)
    }

    /// Writes `n,c_n` rows.
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(writer);
        for n in 0..self.truncation() {
            w.write_record([n.to_string(), self.coeff(n).to_string()])
                .map_err(ser_err)?;
        }
        w.flush().map_err(ser_err)
    }

    /// Reads `n,c_n` rows; indices must run `0, 1, 2, ...` without gaps.
    pub fn read_csv<R: Read>(reader: R, modulus: Modulus) -> Result<Self> {
        let mut r = csv::ReaderBuilder::new().has_headers(false).from_reader(reader);
        let mut coeffs = Vec::new();
        for record in r.records() {
            let record = record.map_err(ser_err)?;
            if record.len() != 2 {
                return Err(ser_err(format!("expected 2 fields, found {}", record.len())));
            }
            let n: usize = record[0]
                .trim()
                .parse()
                .map_err(|_| Error::parse(&record[0], "expected an index"))?;
            if n != coeffs.len() {
                return Err(ser_err(format!("expected index {}, found {n}", coeffs.len())));
            }
            coeffs.push(parse_coeff(&record[1])?);
        }
        Ok(TruncatedSeries::from_bigints(coeffs, modulus))
    }
}

impl Serialize for TruncatedSeries {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_json_value().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for TruncatedSeries {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let value = Value::deserialize(deserializer)?;
        TruncatedSeries::from_json_value(&value).map_err(serde::de::Error::custom)
    }
}

//! Bounded congruence checks and the scripted reproductions built on them.
//!
//! A [`CongruenceClaim`] states `c(T n + gamma) = 0 (mod M)` for `0 <= n <= bound`.
//! Scans return the minimal failing `n`, which is the `M`-adic order of the
//! subsequence `n -> c(T n + gamma)`. Modulus `0` asks for exact vanishing.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::eta::{thm12_quotient, thm31_quotient, EtaQuotient};
use crate::number_theory::{gamma0_index, sturm_bound, CharacterSpec};
use crate::operators::{build_filter_series, form_add, op_twist, op_u};
use crate::partitions::{a_series, cphi3_series, cphibar3_series, jacobi_decomposition_check, CphiTable, Flavor};
use crate::series::{euler_series, Modulus, MulAlgorithm, TruncatedSeries};

/// `c(step * n + offset) = 0 (mod modulus)` for every `0 <= n <= bound`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CongruenceClaim {
    pub flavor: Flavor,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub label: String,
    pub step: u64,
    pub offset: u64,
    /// `0` means the coefficients must vanish in the integers.
    pub modulus: u64,
    pub bound: u64,
}

impl CongruenceClaim {
    pub fn new(flavor: Flavor, step: u64, offset: u64, modulus: u64, bound: u64) -> Result<Self> {
        let claim = CongruenceClaim {
            flavor,
            label: String::new(),
            step,
            offset,
            modulus,
            bound,
        };
        claim.validate()?;
        Ok(claim)
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.step == 0 || self.offset >= self.step {
            return Err(Error::InvalidArgument(format!(
                "progression needs 0 <= offset < step, got ({}, {})",
                self.step, self.offset
            )));
        }
        Ok(())
    }

    pub fn index(&self, n: u64) -> u64 {
        self.step * n + self.offset
    }

    /// Number of coefficients a series needs for this claim to be checkable.
    pub fn required_truncation(&self) -> usize {
        (self.index(self.bound) + 1) as usize
    }

    /// The largest `n` with `step * n + offset < truncation`, if any.
    pub fn max_bound(step: u64, offset: u64, truncation: usize) -> Option<u64> {
        (truncation as u64)
            .checked_sub(offset + 1)
            .map(|top| top / step)
    }
}

impl fmt::Display for CongruenceClaim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let m = if self.modulus == 0 {
            "exact".to_string()
        } else {
            self.modulus.to_string()
        };
        write!(
            f,
            "{}({}n+{}) = 0 mod {} for n <= {}",
            self.flavor, self.step, self.offset, m, self.bound
        )?;
        if !self.label.is_empty() {
            write!(f, " [{}]", self.label)?;
        }
        Ok(())
    }
}

impl FromStr for CongruenceClaim {
    type Err = Error;

    /// `flavor:T:gamma:M:bound`, e.g. `cphi3:45:23:625:2000`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').map(str::trim).collect();
        if parts.len() != 5 {
            return Err(Error::parse(s, "expected flavor:T:gamma:M:bound"));
        }
        let num = |t: &str| t.parse::<u64>().map_err(|_| Error::parse(t, "expected a nonnegative integer"));
        CongruenceClaim::new(parts[0].parse()?, num(parts[1])?, num(parts[2])?, num(parts[3])?, num(parts[4])?)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Status {
    VerifiedToBound,
    Counterexample,
}

/// The first failing term: `c(index) = value (mod M)` with `index = T n + gamma`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub n: u64,
    pub index: u64,
    /// Residue in `[0, M)`, or the exact coefficient when `M = 0`.
    #[serde(with = "json_int")]
    pub value: BigInt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub claim: CongruenceClaim,
    pub status: Status,
    pub witness: Option<Witness>,
    /// Number of terms examined, including the witness.
    pub checked_count: u64,
    /// `Ord_M` of `n -> c(T n + gamma)` is at least this; equal to it when a
    /// witness was found.
    pub ord_lower_bound: u64,
    pub elapsed_ms: u64,
    pub truncation: usize,
    pub modulus: Modulus,
}

impl VerificationReport {
    pub fn verified(&self) -> bool {
        self.status == Status::VerifiedToBound
    }

    /// Zeroes the timing so that reruns serialize identically.
    pub fn without_timing(mut self) -> Self {
        self.elapsed_ms = 0;
        self
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.witness {
            None => write!(f, "verified   {} ({} terms)", self.claim, self.checked_count),
            Some(w) => write!(
                f,
                "FAILED     {}: n = {}, c({}) = {}",
                self.claim, w.n, w.index, w.value
            ),
        }
    }
}

/// A named constant or structural fact checked alongside the scans.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: String,
    pub actual: String,
    pub passed: bool,
}

impl Check {
    pub fn new(name: impl Into<String>, expected: impl fmt::Display, actual: impl fmt::Display) -> Self {
        let expected = expected.to_string();
        let actual = actual.to_string();
        Check {
            name: name.into(),
            passed: expected == actual,
            expected,
            actual,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "ok    " } else { "FAILED" };
        write!(f, "{tag}     {}: expected {}, got {}", self.name, self.expected, self.actual)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportBundle {
    pub name: String,
    pub checks: Vec<Check>,
    pub reports: Vec<VerificationReport>,
}

impl ReportBundle {
    fn new(name: impl Into<String>) -> Self {
        ReportBundle {
            name: name.into(),
            checks: Vec::new(),
            reports: Vec::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed) && self.reports.iter().all(|r| r.verified())
    }

    pub fn without_timing(mut self) -> Self {
        self.reports = self.reports.into_iter().map(VerificationReport::without_timing).collect();
        self
    }

    fn check(&mut self, name: &str, expected: impl fmt::Display, actual: impl fmt::Display) {
        self.checks.push(Check::new(name, expected, actual));
    }
}

impl fmt::Display for ReportBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed() { "PASS" } else { "FAIL" };
        writeln!(f, "== {} [{verdict}]", self.name)?;
        for c in &self.checks {
            writeln!(f, "  {c}")?;
        }
        for r in &self.reports {
            writeln!(f, "  {r}")?;
        }
        Ok(())
    }
}

/// Run size: the smoke tier checks a tenth of each range.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Tier {
    #[default]
    Smoke,
    Full,
}

impl FromStr for Tier {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "smoke" => Ok(Tier::Smoke),
            "full" => Ok(Tier::Full),
            other => Err(Error::parse(other, "expected smoke or full")),
        }
    }
}

/// Scans `series` for the claim, returning the minimal counterexample if any.
pub fn verify_series(series: &TruncatedSeries, claim: &CongruenceClaim) -> Result<VerificationReport> {
    claim.validate()?;
    let start = Instant::now();
    let required = claim.required_truncation();
    if required > series.truncation() {
        return Err(Error::InsufficientTruncation {
            required,
            available: series.truncation(),
        });
    }
    let m = claim.modulus;
    let residue: Box<dyn Fn(usize) -> BigInt + Sync> = match (series.residues(), series.exact_coeffs()) {
        (Some(v), _) => {
            let series_m = series.modulus().value().expect("residue series");
            if m == 0 || series_m % m != 0 {
                return Err(Error::InvalidArgument(format!(
                    "claim modulus {m} does not divide the series modulus {series_m}"
                )));
            }
            Box::new(move |i| BigInt::from(v[i] as u64 % m))
        }
        (None, Some(v)) => {
            if m == 0 {
                Box::new(move |i| v[i].clone())
            } else {
                let mb = BigInt::from(m);
                Box::new(move |i| v[i].mod_floor(&mb))
            }
        }
        (None, None) => unreachable!("series is either residue or exact"),
    };
    let first = (0..=claim.bound)
        .into_par_iter()
        .find_first(|&n| !residue(claim.index(n) as usize).is_zero());
    let witness = first.map(|n| Witness {
        n,
        index: claim.index(n),
        value: residue(claim.index(n) as usize),
    });
    Ok(VerificationReport {
        claim: claim.clone(),
        status: if witness.is_some() {
            Status::Counterexample
        } else {
            Status::VerifiedToBound
        },
        checked_count: witness.as_ref().map_or(claim.bound + 1, |w| w.n + 1),
        ord_lower_bound: witness.as_ref().map_or(claim.bound + 1, |w| w.n),
        witness,
        elapsed_ms: start.elapsed().as_millis() as u64,
        truncation: series.truncation(),
        modulus: series.modulus(),
    })
}

/// [`verify_series`] on a partition table whose flavor matches the claim.
pub fn verify_progression(table: &CphiTable, claim: &CongruenceClaim) -> Result<VerificationReport> {
    if claim.flavor != table.flavor {
        return Err(Error::InvalidArgument(format!(
            "claim is about {} but the table holds {}",
            claim.flavor, table.flavor
        )));
    }
    verify_series(&table.values, claim)
}

fn m(value: u64) -> Modulus {
    Modulus::new(value).expect("modulus in range")
}

fn claim_on(
    flavor: Flavor,
    label: impl Into<String>,
    step: u64,
    offset: u64,
    modulus: u64,
    bound: u64,
) -> CongruenceClaim {
    CongruenceClaim::new(flavor, step, offset, modulus, bound)
        .expect("valid progression")
        .with_label(label)
}

fn exponents_text(q: &EtaQuotient) -> String {
    q.exponents()
        .iter()
        .map(|(d, r)| format!("{d}:{r}"))
        .collect::<Vec<_>>()
        .join(", ")
}

/// The mod-625 congruences for `a(n)` via the level-135 eta-quotient `g`.
///
/// Full tier: `g` mod 625 to `9 * 45541 + 1` terms, `r(9n)` for every
/// `n <= 45541` prime to 5, and `a(n)` on `n = 13, 22, 31, 40 (mod 45)` up to
/// `409829`. Smoke tier: `n <= 4554`.
pub fn verify_thm31(tier: Tier) -> Result<ReportBundle> {
    let n_max: u64 = match tier {
        Tier::Full => 45541,
        Tier::Smoke => 4554,
    };
    let truncation = (9 * n_max + 1) as usize;
    let mut bundle = ReportBundle::new(format!("a(45n+{{13,22,31,40}}) mod 625 ({tier:?} tier)"));

    let g = thm31_quotient();
    bundle.check("weight of g", 506, g.weight());
    bundle.check("leading exponent of g", 41, g.leading_exponent()?);
    bundle.check("character of g trivial", true, g.character()?.is_trivial_on_units());
    bundle.check("admissibility of g", true, g.check_conditions().passes());
    bundle.check("Sturm bound (506, 675)", 45541, sturm_bound(506, 675));
    let reduction = g.reduce_mod(5, 4);
    bundle.check(
        "g reduced mod 625",
        "1:-3, 3:-1, 45:13, 135:3",
        exponents_text(&reduction.quotient),
    );

    let gx = g.expand_congruent(5, 4, truncation)?;
    let filter = build_filter_series(&gx, 9, 45, 5)?;
    bundle.check("filter level", 675, filter.level);
    for gamma in 1..5 {
        let claim = claim_on(Flavor::Expansion, "r(9n), 5 does not divide n", 5, gamma, 625, (n_max - gamma) / 5);
        bundle.reports.push(verify_series(&filter.series, &claim)?);
    }

    let shifted: Vec<u64> = [9u64, 18, 27, 36].iter().map(|c| (c + 45 - 41) % 45).collect();
    bundle.check("r classes shifted by 41", "[13, 22, 31, 40]", format!("{shifted:?}"));
    let a_len = truncation - 41;
    let a = a_series(a_len, m(625));
    for gamma in [13u64, 22, 31, 40] {
        let bound = CongruenceClaim::max_bound(45, gamma, a_len).expect("range covers the class");
        let claim = claim_on(Flavor::ASeries, "", 45, gamma, 625, bound);
        bundle.reports.push(verify_progression(&a, &claim)?);
    }

    let cross = 2000;
    let full = g.expand_series(cross, m(625))?;
    let diff = full.sub(&gx.series.truncate(cross))?;
    let claim = claim_on(Flavor::Expansion, "g minus its reduced quotient", 1, 0, 625, cross as u64 - 1);
    bundle.reports.push(verify_series(&diff, &claim)?);
    Ok(bundle)
}

/// The mod-25 congruences via the level-225 eta-quotient `f`, its twist by
/// `(. | 3)` and `U(25)`, plus direct checks on the partition tables.
///
/// Full tier: source indices up to 135001 and `U(25)` outputs up to the
/// Sturm bound 5401 of weight 20 and level 2025. Smoke tier: a tenth.
pub fn verify_thm12(tier: Tier) -> Result<ReportBundle> {
    let (source_bound, m_max): (u64, u64) = match tier {
        Tier::Full => (135001, sturm_bound(20, 2025)),
        Tier::Smoke => (13501, 540),
    };
    let truncation = ((25 * m_max + 1).max(source_bound + 1)) as usize;
    let mut bundle = ReportBundle::new(format!("cphi3(75n+22), cphibar3(75n+72) mod 25 ({tier:?} tier)"));

    let f = thm12_quotient();
    bundle.check("weight of f", 20, f.weight());
    bundle.check("leading exponent of f", 4, f.leading_exponent()?);
    bundle.check("character of f trivial", true, f.character()?.is_trivial_on_units());
    bundle.check("admissibility of f", true, f.check_conditions().passes());
    bundle.check("index of Gamma_0(2025)", 3240, gamma0_index(2025));
    bundle.check("Sturm bound (20, 2025)", 5401, sturm_bound(20, 2025));
    bundle.check(
        "f reduced mod 25",
        "1:-3, 3:-1, 9:3, 75:1",
        exponents_text(&f.reduce_mod(5, 2).quotient),
    );

    let fx = f.expand_congruent(5, 2, truncation)?;
    bundle.check("c(4)", 9, fx.series.coeff(4));
    bundle.check("order of f", 4, fx.series.order().map_or(-1, |o| o as i64));

    let f2 = op_twist(&fx, &CharacterSpec::legendre(3)?);
    let big_f = form_add(&fx, &f2)?;
    bundle.check("level of F", 2025, big_f.level);
    let support = claim_on(
        Flavor::Expansion,
        "F at n = 2 mod 3",
        3,
        2,
        25,
        CongruenceClaim::max_bound(3, 2, truncation).expect("nonempty"),
    );
    bundle.reports.push(verify_series(&big_f.series, &support)?);

    let u = op_u(&big_f, 25)?;
    bundle.check("level of F | U(25)", 2025, u.level);
    let claim = claim_on(Flavor::Expansion, "F | U(25)", 1, 0, 25, m_max);
    bundle.reports.push(verify_series(&u.series, &claim)?);

    let table_len = (source_bound + 1) as usize;
    let cphi3 = cphi3_series(table_len, m(25));
    let claim = claim_on(Flavor::Cphi3, "", 75, 22, 25, (source_bound - 22) / 75);
    bundle.reports.push(verify_progression(&cphi3, &claim)?);
    let cphibar3 = CphiTable {
        flavor: Flavor::Cphibar3,
        values: cphibar3_series(table_len, m(25)).values,
    };
    let claim = claim_on(Flavor::Cphibar3, "", 75, 72, 25, (source_bound - 72) / 75);
    bundle.reports.push(verify_progression(&cphibar3, &claim)?);

    for gamma in [0u64, 25] {
        let claim = claim_on(Flavor::Expansion, "c(n) of f", 75, gamma, 25, (source_bound - gamma) / 75);
        bundle.reports.push(verify_series(&fx.series, &claim)?);
    }
    Ok(bundle)
}

/// `cphi3(45n+23)` and `cphi3(45n+41)` mod 625 straight from the generating function.
pub fn verify_thm11(bound: u64) -> Result<ReportBundle> {
    let mut bundle = ReportBundle::new("cphi3(45n+{23,41}) mod 625");
    let table = cphi3_series((45 * bound + 42) as usize, m(625));
    for gamma in [23, 41] {
        let claim = claim_on(Flavor::Cphi3, "", 45, gamma, 625, bound);
        bundle.reports.push(verify_progression(&table, &claim)?);
    }
    Ok(bundle)
}

/// The five base congruences modulo 5, 7, 11 and 19 for `n <= bound`.
pub fn verify_base_congruences(bound: u64) -> Result<ReportBundle> {
    let mut bundle = ReportBundle::new("base congruences mod 5, 7, 11, 19");
    let cases = [(45u64, 23u64, 5u64), (45, 41, 5), (63, 50, 7), (99, 95, 11), (171, 50, 19)];
    let len = cases.iter().map(|&(t, g, _)| t * bound + g + 1).max().unwrap() as usize;
    let table = cphi3_series(len, m(5 * 7 * 11 * 19));
    for (t, g, p) in cases {
        let claim = claim_on(Flavor::Cphi3, "", t, g, p, bound);
        bundle.reports.push(verify_progression(&table, &claim)?);
    }
    Ok(bundle)
}

/// `eta^{l^s}(z) / eta^{l^{s-1}}(l z) = 1 (mod l^s)` through `truncation` terms,
/// expanded directly by powering and inversion.
pub fn verify_prop25(l: u64, s: u32, truncation: usize) -> Result<VerificationReport> {
    if !crate::number_theory::is_prime(l) || s == 0 {
        return Err(Error::InvalidArgument(format!("need a prime l and s >= 1, got l={l}, s={s}")));
    }
    let big = l
        .checked_pow(s)
        .filter(|&b| b <= crate::series::MAX_MODULUS)
        .ok_or_else(|| Error::InvalidArgument(format!("{l}^{s} exceeds the modulus range")))?;
    let start = Instant::now();
    let modulus = m(big);
    let num = euler_series(truncation, 1).to_dense(truncation, modulus).pow(big);
    let inner = truncation.div_ceil(l as usize);
    let den = euler_series(inner, 1)
        .to_dense(inner, modulus)
        .pow(big / l)
        .invert()?
        .dilate(l as usize)
        .truncate(truncation);
    let quotient = num.mul(&den, MulAlgorithm::Auto)?;
    let diff = quotient.sub(&TruncatedSeries::one(truncation, modulus))?;
    let claim = claim_on(
        Flavor::Expansion,
        format!("eta^{big}(z) / eta^{}({l}z) - 1", big / l),
        1,
        0,
        big,
        truncation.saturating_sub(1) as u64,
    );
    let mut report = verify_series(&diff, &claim)?;
    report.elapsed_ms = start.elapsed().as_millis() as u64;
    Ok(report)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CandidateStatus {
    /// Holds on the scanned range only.
    Unproven,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Candidate {
    pub claim: CongruenceClaim,
    pub status: CandidateStatus,
}

/// Every `(T, gamma)` with `T` in `steps` and `gamma < T` whose terms up to
/// `n_limit` all vanish modulo `modulus`. Candidates are bounded evidence only.
pub fn search_congruences(table: &CphiTable, steps: &[u64], modulus: u64, n_limit: u64) -> Result<Vec<Candidate>> {
    let pairs: Vec<(u64, u64)> = steps
        .iter()
        .flat_map(|&t| (0..t).map(move |g| (t, g)))
        .collect();
    let reports = pairs
        .par_iter()
        .map(|&(t, g)| {
            let claim = CongruenceClaim::new(table.flavor, t, g, modulus, n_limit)?;
            verify_progression(table, &claim)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(reports
        .into_iter()
        .filter(|r| r.verified())
        .map(|r| Candidate {
            claim: r.claim,
            status: CandidateStatus::Unproven,
        })
        .collect())
}

/// The minimal `n <= n_limit` with `c(T n + gamma)` nonzero mod `modulus`.
pub fn find_counterexample(table: &CphiTable, step: u64, offset: u64, modulus: u64, n_limit: u64) -> Result<VerificationReport> {
    let claim = CongruenceClaim::new(table.flavor, step, offset, modulus, n_limit)?;
    verify_progression(table, &claim)
}

/// Constants and identity checks that need no long scans.
pub fn verify_constants() -> Result<ReportBundle> {
    let mut bundle = ReportBundle::new("constants and identities");
    let g = thm31_quotient();
    let f = thm12_quotient();
    bundle.check("sturm_bound(506, 675)", 45541, sturm_bound(506, 675));
    bundle.check("gamma0_index(2025)", 3240, gamma0_index(2025));
    bundle.check("25 * 20 * 3240 / 12 + 1", 135001, 25 * 20 * gamma0_index(2025) / 12 + 1);
    bundle.check("weight of g", 506, g.weight());
    bundle.check("weight of f", 20, f.weight());
    bundle.check("leading exponent of g", 41, g.leading_exponent()?);
    bundle.check("leading exponent of f", 4, f.leading_exponent()?);
    bundle.check("character of g trivial", true, g.character()?.is_trivial_on_units());
    bundle.check("character of f trivial", true, f.character()?.is_trivial_on_units());
    for (name, q) in [("g", &g), ("f", &f)] {
        for (d, order) in q.cusp_orders().orders {
            bundle.check(&format!("order of {name} at cusp 1/{d} positive"), true, order > num_rational::Ratio::from_integer(0));
        }
    }
    bundle.reports.push(jacobi_decomposition_check(5000, Modulus::EXACT));
    Ok(bundle)
}

/// Every scripted reproduction at the given tier.
pub fn reproduce_all(tier: Tier) -> Result<Vec<ReportBundle>> {
    let prop = {
        let mut b = ReportBundle::new("eta^{l^s}(z) / eta^{l^{s-1}}(lz) = 1 mod l^s");
        b.reports.push(verify_prop25(5, 2, 10000)?);
        b.reports.push(verify_prop25(5, 4, 2000)?);
        b
    };
    Ok(vec![
        verify_constants()?,
        prop,
        verify_thm11(2000)?,
        verify_base_congruences(1000)?,
        verify_thm31(tier)?,
        verify_thm12(tier)?,
    ])
}

/// Big integers as bare JSON numbers.
mod json_int {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use serde_json::Number;

    pub fn serialize<S: Serializer>(value: &BigInt, serializer: S) -> Result<S::Ok, S::Error> {
        let number: Number = value.to_string().parse().map_err(serde::ser::Error::custom)?;
        number.serialize(serializer)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigInt, D::Error> {
        let number = Number::deserialize(deserializer)?;
        number.to_string().parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn claim_validation_and_parsing() {
        assert!(CongruenceClaim::new(Flavor::Cphi3, 45, 45, 625, 10).is_err());
        assert!(CongruenceClaim::new(Flavor::Cphi3, 0, 0, 625, 10).is_err());
        let c: CongruenceClaim = "cphi3:45:23:625:2000".parse().unwrap();
        assert_eq!(c.required_truncation(), 45 * 2000 + 24);
        assert!(matches!("cphi3:45:23".parse::<CongruenceClaim>(), Err(Error::Parse { .. })));
        assert_eq!(CongruenceClaim::max_bound(45, 23, 23), None);
        assert_eq!(CongruenceClaim::max_bound(45, 23, 24), Some(0));
    }

    #[test]
    fn scanner_reports_minimal_witness() {
        let s = TruncatedSeries::from_i64(&[0, 5, 0, 10, 0, 3, 0, 7], Modulus::EXACT);
        let claim = CongruenceClaim::new(Flavor::Expansion, 2, 1, 5, 3).unwrap();
        let r = verify_series(&s, &claim).unwrap();
        assert_eq!(r.status, Status::Counterexample);
        let w = r.witness.unwrap();
        assert_eq!((w.n, w.index, w.value), (2, 5, BigInt::from(3)));
        assert_eq!(r.checked_count, 3);
        assert_eq!(r.ord_lower_bound, 2);

        let exact = CongruenceClaim::new(Flavor::Expansion, 2, 0, 0, 3).unwrap();
        assert!(verify_series(&s, &exact).unwrap().verified());
    }

    #[test]
    fn scanner_guards_truncation_and_modulus() {
        let s = TruncatedSeries::from_i64(&[0; 10], m(25));
        let claim = CongruenceClaim::new(Flavor::Expansion, 5, 0, 5, 2).unwrap();
        assert!(matches!(
            verify_series(&s, &claim),
            Err(Error::InsufficientTruncation { required: 11, available: 10 })
        ));
        let claim = CongruenceClaim::new(Flavor::Expansion, 1, 0, 7, 2).unwrap();
        assert!(verify_series(&s, &claim).is_err());
        let claim = CongruenceClaim::new(Flavor::Expansion, 1, 0, 0, 2).unwrap();
        assert!(verify_series(&s, &claim).is_err());
    }

    #[test]
    fn bound_zero_checks_one_term() {
        let table = cphi3_series(23, m(625));
        let r = find_counterexample(&table, 45, 23, 625, 0);
        assert!(r.is_err());
        let table = cphi3_series(24, m(625));
        let r = find_counterexample(&table, 45, 23, 625, 0).unwrap();
        assert!(r.verified());
        assert_eq!(r.checked_count, 1);
    }

    #[test]
    fn modulus_one_is_trivial() {
        let table = cphi3_series(100, Modulus::EXACT);
        let r = find_counterexample(&table, 1, 0, 1, 99).unwrap();
        assert!(r.verified());
    }

    #[test]
    fn flavor_must_match_table() {
        let table = a_series(100, m(625));
        let claim = CongruenceClaim::new(Flavor::Cphi3, 45, 13, 625, 1).unwrap();
        assert!(verify_progression(&table, &claim).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let s = TruncatedSeries::from_i64(&[0, 1], Modulus::EXACT);
        let claim = CongruenceClaim::new(Flavor::Expansion, 1, 0, 0, 1).unwrap().with_label("x");
        let r = verify_series(&s, &claim).unwrap().without_timing();
        let text = serde_json::to_string(&r).unwrap();
        assert!(text.contains(r#""status":"counterexample""#));
        assert!(text.contains(r#""value":1"#));
        let back: VerificationReport = serde_json::from_str(&text).unwrap();
        assert_eq!(back, r);
    }

    #[test]
    fn prop25_small_cases() {
        assert!(verify_prop25(2, 1, 1000).unwrap().verified());
        assert!(verify_prop25(5, 2, 3000).unwrap().verified());
        assert!(verify_prop25(3, 3, 500).unwrap().verified());
        assert!(verify_prop25(4, 1, 10).is_err());
    }

    #[test]
    fn smoke_tiers_pass() {
        let b = verify_thm31(Tier::Smoke).unwrap();
        assert!(b.passed(), "{b}");
        let b = verify_thm12(Tier::Smoke).unwrap();
        assert!(b.passed(), "{b}");
    }

    #[test]
    fn search_rediscovers_known_progressions() {
        let table = cphi3_series(45 * 200 + 45, m(625));
        let found: Vec<u64> = search_congruences(&table, &[45], 625, 200)
            .unwrap()
            .into_iter()
            .map(|c| c.claim.offset)
            .collect();
        assert!(found.contains(&23) && found.contains(&41), "{found:?}");
    }
}

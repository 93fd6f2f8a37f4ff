//! Eta-quotients `scalar * prod_{delta | N} eta(delta z)^{r_delta}` as
//! symbolic objects, with their modular invariants and q-expansions.
//!
//! The `q^{1/24}` prefactors of the eta factors combine into the integral
//! leading power `q^{(sum delta r_delta)/24}`; a quotient whose prefactor is
//! fractional has no expansion in integral powers of `q` and is rejected.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use num_integer::Integer;
use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::number_theory::{divisors, factorize, CharacterSpec};
use crate::series::{euler_series, Modulus, MulAlgorithm, TruncatedSeries};

/// Exponents up to this size are applied as repeated sparse products or
/// divisions by the pentagonal series; larger ones by binary powering.
const SPARSE_POWER_LIMIT: u64 = 4;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EtaQuotient {
    level: u64,
    exponents: BTreeMap<u64, i64>,
    scalar: i64,
}

/// The three admissibility conditions for an eta-quotient to be a modular
/// form on `Gamma_0(N)`, evaluated exactly.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// `sum r_delta` (twice the weight).
    pub sum_r: i64,
    pub weight_integral: bool,
    pub sum_delta_r: i64,
    pub sum_delta_r_ok: bool,
    pub sum_level_over_delta_r: i64,
    pub sum_level_over_delta_r_ok: bool,
}

impl ConditionReport {
    pub fn passes(&self) -> bool {
        self.weight_integral && self.sum_delta_r_ok && self.sum_level_over_delta_r_ok
    }
}

/// Orders of vanishing at the cusps `c/d`, one entry per divisor `d | N`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CuspReport {
    pub orders: Vec<(u64, Ratio<i64>)>,
}

impl CuspReport {
    pub fn is_cusp_form(&self) -> bool {
        self.orders.iter().all(|(_, o)| *o > Ratio::from_integer(0))
    }
}

/// Result of stripping factors congruent to 1 modulo `l^s`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Reduction {
    pub quotient: EtaQuotient,
    /// False when no pattern was found and the quotient is returned unchanged.
    pub reduced: bool,
    /// The modulus `l^s` under which the coefficients are preserved.
    pub modulus: u64,
}

/// A q-expansion tagged with the weight, level and character of its form.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FormExpansion {
    pub series: TruncatedSeries,
    pub weight: i64,
    pub level: u64,
    pub character: CharacterSpec,
}

impl EtaQuotient {
    /// Validates that every `delta` divides `level`; zero exponents are dropped.
    pub fn new(level: u64, exponents: impl IntoIterator<Item = (u64, i64)>, scalar: i64) -> Result<Self> {
        if level == 0 {
            return Err(Error::InvalidArgument("level must be positive".into()));
        }
        let mut map = BTreeMap::new();
        for (delta, r) in exponents {
            if delta == 0 || level % delta != 0 {
                return Err(Error::NotADivisor { divisor: delta, level });
            }
            if map.insert(delta, r).is_some() {
                return Err(Error::InvalidArgument(format!("divisor {delta} listed twice")));
            }
        }
        map.retain(|_, r| *r != 0);
        Ok(EtaQuotient {
            level,
            exponents: map,
            scalar,
        })
    }

    pub fn level(&self) -> u64 {
        self.level
    }

    pub fn scalar(&self) -> i64 {
        self.scalar
    }

    pub fn exponents(&self) -> &BTreeMap<u64, i64> {
        &self.exponents
    }

    /// `r_delta`, zero when absent.
    pub fn exponent(&self, delta: u64) -> i64 {
        self.exponents.get(&delta).copied().unwrap_or(0)
    }

    /// `k = (1/2) sum r_delta`.
    pub fn weight(&self) -> Ratio<i64> {
        Ratio::new(self.exponents.values().sum(), 2)
    }

    fn integral_weight(&self) -> Result<i64> {
        let w = self.weight();
        if w.is_integer() {
            Ok(w.to_integer())
        } else {
            Err(Error::HalfIntegralWeight {
                numerator: self.exponents.values().sum(),
            })
        }
    }

    pub fn check_conditions(&self) -> ConditionReport {
        let sum_r: i64 = self.exponents.values().sum();
        let sum_delta_r: i64 = self.exponents.iter().map(|(&d, &r)| d as i64 * r).sum();
        let sum_level_over_delta_r: i64 = self
            .exponents
            .iter()
            .map(|(&d, &r)| (self.level / d) as i64 * r)
            .sum();
        ConditionReport {
            sum_r,
            weight_integral: sum_r % 2 == 0,
            sum_delta_r,
            sum_delta_r_ok: sum_delta_r % 24 == 0,
            sum_level_over_delta_r,
            sum_level_over_delta_r_ok: sum_level_over_delta_r % 24 == 0,
        }
    }

    /// The character `d -> ((-1)^k s | d)` with `s = prod delta^{r_delta}`,
    /// represented through the squarefree part of `(-1)^k s`.
    pub fn character(&self) -> Result<CharacterSpec> {
        let report = self.check_conditions();
        if !report.passes() {
            return Err(Error::NotAdmissible(format!("{report:?}")));
        }
        let k = self.integral_weight()?;
        // exponent vector of s over primes, reduced mod 2
        let mut parity: BTreeMap<u64, i64> = BTreeMap::new();
        for (&delta, &r) in &self.exponents {
            for (p, e) in factorize(delta) {
                *parity.entry(p).or_default() += e as i64 * r;
            }
        }
        let core: i64 = parity
            .into_iter()
            .filter(|(_, e)| e.rem_euclid(2) == 1)
            .map(|(p, _)| p as i64)
            .product();
        let top = if k % 2 == 0 { core } else { -core };
        if top == 1 {
            Ok(CharacterSpec::trivial(self.level))
        } else {
            CharacterSpec::kronecker(top, self.level)
        }
    }

    /// Order of vanishing at the cusp `c/d` (Ligozat):
    /// `(N/24) sum_delta gcd(d, delta)^2 r_delta / (gcd(d, N/d) d delta)`.
    pub fn cusp_order(&self, d: u64) -> Result<Ratio<i64>> {
        if d == 0 || self.level % d != 0 {
            return Err(Error::NotADivisor {
                divisor: d,
                level: self.level,
            });
        }
        let n = self.level as i64;
        let d = d as i64;
        let width = d.gcd(&(n / d));
        let sum = self.exponents.iter().fold(Ratio::from_integer(0), |acc, (&delta, &r)| {
            let delta = delta as i64;
            let g = d.gcd(&delta);
            acc + Ratio::new(g * g * r, width * d * delta)
        });
        Ok(sum * Ratio::new(n, 24))
    }

    pub fn cusp_orders(&self) -> CuspReport {
        CuspReport {
            orders: divisors(self.level)
                .into_iter()
                .map(|d| (d, self.cusp_order(d).expect("divisor of the level")))
                .collect(),
        }
    }

    /// Positivity of every cusp order; requires the admissibility conditions.
    pub fn is_cusp_form(&self) -> Result<CuspReport> {
        let report = self.check_conditions();
        if !report.passes() {
            return Err(Error::NotAdmissible(format!("{report:?}")));
        }
        Ok(self.cusp_orders())
    }

    /// `(1/24) sum delta r_delta`, the power of `q` the expansion starts at.
    pub fn leading_exponent(&self) -> Result<i64> {
        let sum: i64 = self.exponents.iter().map(|(&d, &r)| d as i64 * r).sum();
        if sum % 24 != 0 {
            return Err(Error::FractionalLeadingExponent { numerator: sum });
        }
        Ok(sum / 24)
    }

    /// The q-expansion as a bare series, for any quotient with a nonnegative
    /// integral leading exponent (admissibility is not required).
    pub fn expand_series(&self, truncation: usize, modulus: Modulus) -> Result<TruncatedSeries> {
        let lead = self.leading_exponent()?;
        if lead < 0 {
            return Err(Error::InvalidArgument(format!(
                "leading exponent {lead} is negative; Laurent expansions are not supported"
            )));
        }
        let lead = lead as usize;
        if truncation <= lead {
            return Ok(TruncatedSeries::zero(truncation, modulus));
        }
        let inner = truncation - lead;
        let mut acc = TruncatedSeries::one(inner, modulus);
        for (&delta, &r) in self.exponents.iter().filter(|(_, &r)| r > 0) {
            acc = apply_euler_power(&acc, delta as usize, r.unsigned_abs(), false)?;
        }
        for (&delta, &r) in self.exponents.iter().filter(|(_, &r)| r < 0) {
            acc = apply_euler_power(&acc, delta as usize, r.unsigned_abs(), true)?;
        }
        Ok(acc.scale(self.scalar).shift(lead))
    }

    /// The q-expansion with its weight, level and character; the quotient
    /// must be admissible with integral weight.
    pub fn expand(&self, truncation: usize, modulus: Modulus) -> Result<FormExpansion> {
        let weight = self.integral_weight()?;
        let character = self.character()?;
        Ok(FormExpansion {
            series: self.expand_series(truncation, modulus)?,
            weight,
            level: self.level,
            character,
        })
    }

    /// Removes factors `(eta^{l^s}(delta z) / eta^{l^{s-1}}(l delta z))^c`,
    /// which are congruent to 1 modulo `l^s`.
    ///
    /// For each `delta` with `l delta | N` and `r_{l delta} < 0`, the
    /// multiplicity `c` ranges over `1 ..= -r_{l delta} / l^{s-1}` and the
    /// value minimizing `|r_delta| + |r_{l delta}|` afterwards is taken, when
    /// it beats leaving the pair untouched.
    pub fn reduce_mod(&self, l: u64, s: u32) -> Reduction {
        assert!(s >= 1, "exponent must be positive");
        let big = l.pow(s) as i64;
        let small = l.pow(s - 1) as i64;
        let mut exps = self.exponents.clone();
        let mut reduced = false;
        for delta in divisors(self.level) {
            let upper = l * delta;
            if self.level % upper != 0 {
                continue;
            }
            let r_lo = exps.get(&delta).copied().unwrap_or(0);
            let r_hi = exps.get(&upper).copied().unwrap_or(0);
            if r_hi >= 0 {
                continue;
            }
            let cost = |c: i64| (r_lo - c * big).abs() + (r_hi + c * small).abs();
            let best = (1..=(-r_hi) / small).min_by_key(|&c| (cost(c), c));
            if let Some(c) = best.filter(|&c| cost(c) < cost(0)) {
                exps.insert(delta, r_lo - c * big);
                exps.insert(upper, r_hi + c * small);
                reduced = true;
            }
        }
        exps.retain(|_, r| *r != 0);
        Reduction {
            quotient: EtaQuotient {
                level: self.level,
                exponents: exps,
                scalar: self.scalar,
            },
            reduced,
            modulus: big as u64,
        }
    }

    /// Expansion modulo `l^s` computed from the reduced quotient, carrying
    /// this quotient's weight, level and character.
    pub fn expand_congruent(&self, l: u64, s: u32, truncation: usize) -> Result<FormExpansion> {
        let reduction = self.reduce_mod(l, s);
        let modulus = Modulus::new(reduction.modulus)?;
        Ok(FormExpansion {
            series: reduction.quotient.expand_series(truncation, modulus)?,
            weight: self.integral_weight()?,
            level: self.level,
            character: self.character()?,
        })
    }
}

/// Multiplies (or divides) `acc` by `prod_n (1 - q^{delta n})^power`.
fn apply_euler_power(acc: &TruncatedSeries, delta: usize, power: u64, divide: bool) -> Result<TruncatedSeries> {
    let n = acc.truncation();
    if power <= SPARSE_POWER_LIMIT {
        let factor = euler_series(n, delta);
        let mut out = acc.clone();
        for _ in 0..power {
            out = if divide {
                out.div_sparse(&factor)?
            } else {
                out.mul_sparse(&factor)
            };
        }
        return Ok(out);
    }
    let base_len = n.div_ceil(delta);
    let mut base = euler_series(base_len, 1)
        .to_dense(base_len, acc.modulus())
        .pow(power);
    if divide {
        base = base.invert()?;
    }
    let factor = base.dilate(delta).truncate(n);
    acc.mul(&factor, MulAlgorithm::Auto)
}

impl fmt::Display for EtaQuotient {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .exponents
            .iter()
            .map(|(d, r)| format!("{d}:{r}"))
            .collect();
        write!(f, "N={}; {}; scalar={}", self.level, parts.join(", "), self.scalar)
    }
}

impl FromStr for EtaQuotient {
    type Err = Error;

    /// Parses `N=135; 1:-3, 3:-1, 45:13, 135:3; scalar=1`; whitespace is
    /// ignored and the scalar segment is optional.
    fn from_str(text: &str) -> Result<Self> {
        let compact: String = text.chars().filter(|c| !c.is_whitespace()).collect();
        let mut level = None;
        let mut scalar = None;
        let mut exponents = Vec::new();
        for segment in compact.split(';').filter(|s| !s.is_empty()) {
            if let Some(v) = segment.strip_prefix("N=") {
                let n: u64 = v.parse().map_err(|_| Error::parse(segment, "expected N=<positive integer>"))?;
                if level.replace(n).is_some() {
                    return Err(Error::parse(segment, "level given twice"));
                }
            } else if let Some(v) = segment.strip_prefix("scalar=") {
                let k: i64 = v.parse().map_err(|_| Error::parse(segment, "expected scalar=<integer>"))?;
                if scalar.replace(k).is_some() {
                    return Err(Error::parse(segment, "scalar given twice"));
                }
            } else {
                for entry in segment.split(',').filter(|s| !s.is_empty()) {
                    let (d, r) = entry
                        .split_once(':')
                        .ok_or_else(|| Error::parse(entry, "expected <delta>:<exponent>"))?;
                    let d: u64 = d.parse().map_err(|_| Error::parse(entry, "divisor is not a positive integer"))?;
                    let r: i64 = r.parse().map_err(|_| Error::parse(entry, "exponent is not an integer"))?;
                    exponents.push((d, r));
                }
            }
        }
        let level = level.ok_or_else(|| Error::parse(text.trim(), "missing `N=<level>` segment"))?;
        if level == 0 {
            return Err(Error::parse("N=0", "level must be positive"));
        }
        EtaQuotient::new(level, exponents, scalar.unwrap_or(1)).map_err(|e| match e {
            Error::NotADivisor { divisor, level } => {
                Error::parse(format!("{divisor}:"), format!("{divisor} does not divide {level}"))
            }
            other => other,
        })
    }
}

/// The weight-506 level-135 quotient used for the modulus-625 congruences:
/// `eta^13(45z) eta^3(135z) / (eta(3z) eta^3(z)) * (eta^625(z)/eta^125(5z))^2`.
pub fn thm31_quotient() -> EtaQuotient {
    EtaQuotient::new(135, [(1, 1247), (3, -1), (5, -250), (45, 13), (135, 3)], 1)
        .expect("static quotient")
}

/// The weight-20 level-225 quotient used for the modulus-25 congruences:
/// `9 eta^3(9z) eta(75z) / (eta(3z) eta^3(z)) * (eta^25(z)/eta^5(5z))^2`.
pub fn thm12_quotient() -> EtaQuotient {
    EtaQuotient::new(225, [(1, 47), (3, -1), (5, -10), (9, 3), (75, 1)], 9).expect("static quotient")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::number_theory::CharacterKind;

    fn r(n: i64, d: i64) -> Ratio<i64> {
        Ratio::new(n, d)
    }

    #[test]
    fn weights() {
        assert_eq!(thm31_quotient().weight(), r(506, 1));
        assert_eq!(thm12_quotient().weight(), r(20, 1));
        assert_eq!(EtaQuotient::new(1, [(1, 1)], 1).unwrap().weight(), r(1, 2));
    }

    #[test]
    fn conditions() {
        let g = thm31_quotient().check_conditions();
        assert_eq!(g.sum_delta_r, 984);
        assert_eq!(g.sum_level_over_delta_r, 161592);
        assert!(g.passes());
        let f = thm12_quotient().check_conditions();
        assert_eq!(f.sum_delta_r, 96);
        assert!(f.passes());
        let eta = EtaQuotient::new(1, [(1, 1)], 1).unwrap().check_conditions();
        assert_eq!(eta.sum_delta_r, 1);
        assert!(!eta.passes());
    }

    #[test]
    fn characters() {
        assert_eq!(thm31_quotient().character().unwrap(), CharacterSpec::trivial(135));
        assert_eq!(thm12_quotient().character().unwrap(), CharacterSpec::trivial(225));
        // k = 2, s = 2^14 3^3 -> s* = 3
        let q = EtaQuotient::new(12, [(1, -4), (2, 2), (4, 3), (12, 3)], 1).unwrap();
        assert!(q.check_conditions().passes());
        let chi = q.character().unwrap();
        assert_eq!(chi.kind, CharacterKind::Kronecker { top: 3 });
        assert_eq!(chi.eval(2), -1);
        assert!(EtaQuotient::new(1, [(1, 1)], 1).unwrap().character().is_err());
    }

    #[test]
    fn characters_trivial_on_units() {
        for q in [thm31_quotient(), thm12_quotient()] {
            let chi = q.character().unwrap();
            for d in 1..=q.level() as i64 {
                if (d as u64).gcd(&q.level()) == 1 {
                    assert_eq!(chi.eval(d), 1);
                }
            }
        }
    }

    #[test]
    fn cusp_orders() {
        let g = thm31_quotient();
        assert_eq!(g.cusp_order(135).unwrap(), r(41, 1));
        assert_eq!(g.cusp_order(1).unwrap(), r(6733, 1));
        assert_eq!(thm12_quotient().cusp_order(225).unwrap(), r(4, 1));
        assert!(matches!(g.cusp_order(7), Err(Error::NotADivisor { .. })));
        let g_orders: Vec<(u64, Ratio<i64>)> = [(1, 6733), (3, 748), (5, 5), (9, 254), (15, 8), (27, 257), (45, 26), (135, 41)]
            .iter()
            .map(|&(d, o)| (d, r(o, 1)))
            .collect();
        assert_eq!(g.is_cusp_form().unwrap().orders, g_orders);
        assert!(g.is_cusp_form().unwrap().is_cusp_form());
        // the level-225 quotient has a pole at 1/5 and order 0 at 1/15
        let f_report = thm12_quotient().is_cusp_form().unwrap();
        let f_orders: Vec<(u64, Ratio<i64>)> = [(1, 422), (3, 47), (5, -1), (9, 72), (15, 0), (25, 2), (45, 1), (75, 3), (225, 4)]
            .iter()
            .map(|&(d, o)| (d, r(o, 1)))
            .collect();
        assert_eq!(f_report.orders, f_orders);
        assert!(!f_report.is_cusp_form());
        let neg = EtaQuotient::new(5, [(1, -24)], 1).unwrap();
        let report = neg.is_cusp_form().unwrap();
        assert!(!report.is_cusp_form());
        assert!(report.orders.iter().all(|(_, o)| *o < r(0, 1)));
    }

    #[test]
    fn leading_exponents() {
        assert_eq!(thm31_quotient().leading_exponent().unwrap(), 41);
        assert_eq!(thm12_quotient().leading_exponent().unwrap(), 4);
        assert_eq!(EtaQuotient::new(1, [(1, 24)], 1).unwrap().leading_exponent().unwrap(), 1);
        assert!(matches!(
            EtaQuotient::new(1, [(1, 1)], 1).unwrap().leading_exponent(),
            Err(Error::FractionalLeadingExponent { numerator: 1 })
        ));
    }

    #[test]
    fn leading_exponent_is_cusp_order_at_infinity() {
        for q in [
            thm31_quotient(),
            thm12_quotient(),
            EtaQuotient::new(1, [(1, 24)], 1).unwrap(),
            EtaQuotient::new(5, [(1, 25), (5, -5)], 1).unwrap(),
            EtaQuotient::new(6, [(1, 2), (2, -1), (3, 4), (6, 1)], 1).unwrap(),
        ] {
            if let Ok(lead) = q.leading_exponent() {
                assert_eq!(q.cusp_order(q.level()).unwrap(), r(lead, 1), "{q}");
            }
        }
    }

    #[test]
    fn expansions() {
        let m25 = Modulus::new(25).unwrap();
        let f = thm12_quotient().expand(10, m25).unwrap();
        assert_eq!(f.series.order(), Some(4));
        assert_eq!(f.series.coeff(4), 9.into());
        assert_eq!(f.weight, 20);
        assert_eq!(f.level, 225);

        let g = thm31_quotient().expand(50, Modulus::new(625).unwrap()).unwrap();
        assert_eq!(g.series.order(), Some(41));
        assert_eq!(g.series.coeff(41), 1.into());

        let p25 = EtaQuotient::new(5, [(1, 25), (5, -5)], 1).unwrap();
        assert_eq!(p25.expand_series(100, m25).unwrap(), TruncatedSeries::one(100, m25));
    }

    #[test]
    fn half_integral_weight_rejected_downstream() {
        // eta(z)^3 eta(2z)^... : sum delta r = 24 but sum r odd
        let q = EtaQuotient::new(2, [(1, 6), (2, 9)], 1).unwrap();
        assert_eq!(q.leading_exponent().unwrap(), 1);
        assert_eq!(q.weight(), r(15, 2));
        assert!(matches!(
            q.expand(10, Modulus::EXACT),
            Err(Error::HalfIntegralWeight { .. })
        ));
    }

    #[test]
    fn reductions() {
        let g = thm31_quotient().reduce_mod(5, 4);
        assert!(g.reduced);
        assert_eq!(g.modulus, 625);
        assert_eq!(
            g.quotient,
            EtaQuotient::new(135, [(1, -3), (3, -1), (45, 13), (135, 3)], 1).unwrap()
        );
        let f = thm12_quotient().reduce_mod(5, 2);
        assert!(f.reduced);
        assert_eq!(
            f.quotient,
            EtaQuotient::new(225, [(1, -3), (3, -1), (9, 3), (75, 1)], 9).unwrap()
        );
        let plain = EtaQuotient::new(6, [(1, 2), (2, -1)], 1).unwrap();
        let none = plain.reduce_mod(5, 2);
        assert!(!none.reduced);
        assert_eq!(none.quotient, plain);
    }

    #[test]
    fn parse_and_print() {
        let q: EtaQuotient = "N=135; 1:-3, 3:-1, 45:13, 135:3; scalar=1".parse().unwrap();
        assert_eq!(q, EtaQuotient::new(135, [(1, -3), (3, -1), (45, 13), (135, 3)], 1).unwrap());
        let spaced: EtaQuotient = "  N = 135 ;1 : -3,3:-1 , 45:13,135 :3".parse().unwrap();
        assert_eq!(spaced, q);
        assert_eq!(q.to_string().parse::<EtaQuotient>().unwrap(), q);
        let f: EtaQuotient = "N=225; 1:47, 3:-1, 5:-10, 9:3, 75:1; scalar=9".parse().unwrap();
        assert_eq!(f, thm12_quotient());
    }

    #[test]
    fn parse_errors_name_the_token() {
        let err = "N=135; 1:-3, 7:2".parse::<EtaQuotient>().unwrap_err();
        assert!(matches!(&err, Error::Parse { token, .. } if token == "7:"), "{err}");
        let err = "N=135; 1:x".parse::<EtaQuotient>().unwrap_err();
        assert!(matches!(&err, Error::Parse { token, .. } if token == "1:x"));
        let err = "1:2".parse::<EtaQuotient>().unwrap_err();
        assert!(matches!(err, Error::Parse { .. }));
        let err = "N=abc; 1:2".parse::<EtaQuotient>().unwrap_err();
        assert!(matches!(&err, Error::Parse { token, .. } if token == "N=abc"));
    }
}

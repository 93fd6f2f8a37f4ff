//! The operators `U(t)`, `V(t)` and twisting by a real character, acting on
//! tagged expansions and keeping track of level and character.

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::eta::FormExpansion;
use crate::number_theory::{CharacterKind, CharacterSpec};

/// `sum u(t n) q^n`. Requires `t | level`; weight, level and character are kept.
///
/// Every known coefficient `u(t n)` with `t n < N` is kept, so the output has
/// `ceil(N / t)` coefficients.
pub fn op_u(fx: &FormExpansion, t: u64) -> Result<FormExpansion> {
    if t == 0 || fx.level % t != 0 {
        return Err(Error::NotADivisor {
            divisor: t,
            level: fx.level,
        });
    }
    Ok(FormExpansion {
        series: fx.series.extract_stride(t as usize),
        ..fx.clone()
    })
}

/// `sum u(n) q^{t n}`; the level is multiplied by `t`.
pub fn op_v(fx: &FormExpansion, t: u64) -> Result<FormExpansion> {
    if t == 0 {
        return Err(Error::InvalidArgument("V(t) needs t >= 1".into()));
    }
    Ok(FormExpansion {
        series: fx.series.dilate(t as usize),
        level: fx.level * t,
        character: with_modulus(fx.character, fx.level * t),
        ..fx.clone()
    })
}

/// `sum chi(n) u(n) q^n`; the level is multiplied by the square of the
/// modulus of `chi`. The character is unchanged since `chi^2` is principal.
pub fn op_twist(fx: &FormExpansion, chi: &CharacterSpec) -> FormExpansion {
    let level = fx.level * chi.modulus * chi.modulus;
    FormExpansion {
        series: fx.series.map_indexed(|n| chi.eval(n as i64) as i64),
        level,
        character: with_modulus(fx.character, level),
        ..fx.clone()
    }
}

/// `fx | U(a) - fx | U(b) V(t)` with `b = a t`: keeps `u(a n)` for `t` not
/// dividing `n` and cancels the rest.
pub fn build_filter_series(fx: &FormExpansion, a: u64, b: u64, t: u64) -> Result<FormExpansion> {
    if a.checked_mul(t) != Some(b) {
        return Err(Error::InvalidArgument(format!("filter needs b = a t, got a={a}, b={b}, t={t}")));
    }
    let kept = op_u(fx, a)?;
    let removed = op_v(&op_u(fx, b)?, t)?;
    form_sub(&kept, &removed)
}

/// Sum of two expansions of equal weight and compatible characters, at the
/// least common multiple of the levels.
pub fn form_add(x: &FormExpansion, y: &FormExpansion) -> Result<FormExpansion> {
    combine(x, y, false)
}

pub fn form_sub(x: &FormExpansion, y: &FormExpansion) -> Result<FormExpansion> {
    combine(x, y, true)
}

fn combine(x: &FormExpansion, y: &FormExpansion, subtract: bool) -> Result<FormExpansion> {
    if x.weight != y.weight {
        return Err(Error::InvalidArgument(format!(
            "weights differ: {} and {}",
            x.weight, y.weight
        )));
    }
    if !same_character(&x.character, &y.character) {
        return Err(Error::InvalidArgument(format!(
            "characters differ: {} and {}",
            x.character, y.character
        )));
    }
    let level = x.level.lcm(&y.level);
    let series = if subtract {
        x.series.sub(&y.series)?
    } else {
        x.series.add(&y.series)?
    };
    Ok(FormExpansion {
        series,
        weight: x.weight,
        level,
        character: with_modulus(x.character, level),
    })
}

fn same_character(a: &CharacterSpec, b: &CharacterSpec) -> bool {
    match (a.kind, b.kind) {
        (CharacterKind::Trivial, CharacterKind::Trivial) => true,
        _ => a.squarefree_part() == b.squarefree_part() && a.kind == b.kind,
    }
}

fn with_modulus(chi: CharacterSpec, modulus: u64) -> CharacterSpec {
    match chi.kind {
        CharacterKind::Legendre { .. } => chi,
        _ => CharacterSpec {
            kind: chi.kind,
            modulus,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eta::{thm12_quotient, thm31_quotient};
    use crate::series::{Modulus, TruncatedSeries};

    fn form(coeffs: &[i64], level: u64) -> FormExpansion {
        FormExpansion {
            series: TruncatedSeries::from_i64(coeffs, Modulus::EXACT),
            weight: 2,
            level,
            character: CharacterSpec::trivial(level),
        }
    }

    #[test]
    fn u_extracts_indices() {
        let out = op_u(&form(&[1, 1, 1, 1], 4), 2).unwrap();
        assert_eq!(out.series, TruncatedSeries::from_i64(&[1, 1], Modulus::EXACT));
        assert_eq!(out.level, 4);
        assert!(matches!(op_u(&form(&[1], 4), 3), Err(Error::NotADivisor { .. })));
        // ceil(5 / 2) = 3 coefficients are determined
        assert_eq!(op_u(&form(&[0, 1, 2, 3, 4], 4), 2).unwrap().series.truncation(), 3);
    }

    #[test]
    fn v_then_u_is_identity() {
        let x = form(&[3, -1, 4, 1, -5, 9], 6);
        let v = op_v(&x, 3).unwrap();
        assert_eq!(v.level, 18);
        let back = op_u(&v, 3).unwrap();
        assert_eq!(back.series, x.series);
        assert_eq!(op_v(&x, 1).unwrap(), x);
    }

    #[test]
    fn twist_by_legendre_three() {
        let x = form(&[1, 2, 3, 4, 5, 6, 7], 225);
        let chi = CharacterSpec::legendre(3).unwrap();
        let tw = op_twist(&x, &chi);
        assert_eq!(tw.level, 2025);
        assert_eq!(tw.series, TruncatedSeries::from_i64(&[0, 2, -3, 0, 5, -6, 0], Modulus::EXACT));
        let twice = op_twist(&tw, &chi);
        assert_eq!(twice.series, TruncatedSeries::from_i64(&[0, 2, 3, 0, 5, 6, 0], Modulus::EXACT));
        let sum = form_add(&x, &tw).unwrap();
        assert_eq!(sum.level, 2025);
        assert_eq!(sum.series, TruncatedSeries::from_i64(&[1, 4, 0, 4, 10, 0, 7], Modulus::EXACT));
    }

    #[test]
    fn twist_by_trivial_character() {
        let x = form(&[1, 1, 1, 1, 1, 1], 5);
        let tw = op_twist(&x, &CharacterSpec::trivial(3));
        assert_eq!(tw.series, TruncatedSeries::from_i64(&[0, 1, 1, 0, 1, 1], Modulus::EXACT));
    }

    #[test]
    fn filter_zeroes_multiples() {
        let coeffs: Vec<i64> = (0..500).map(|i| (i * 7919 % 1013) as i64 - 500).collect();
        let x = form(&coeffs, 135);
        let filt = build_filter_series(&x, 9, 45, 5).unwrap();
        assert_eq!(filt.level, 675);
        for n in 0..filt.series.truncation() {
            if n % 5 == 0 {
                assert!(filt.series.is_zero_at(n));
            } else {
                assert_eq!(filt.series.coeff(n), coeffs[9 * n].into());
            }
        }
        assert!(build_filter_series(&x, 9, 40, 5).is_err());
        let zero = form(&[0; 100], 135);
        assert!(build_filter_series(&zero, 9, 45, 5).unwrap().series.is_zero());
    }

    #[test]
    fn level_bookkeeping_of_both_pipelines() {
        let g = thm31_quotient().expand_congruent(5, 4, 500).unwrap();
        assert_eq!(op_u(&g, 9).unwrap().level, 135);
        assert_eq!(build_filter_series(&g, 9, 45, 5).unwrap().level, 675);
        let f = thm12_quotient().expand_congruent(5, 2, 500).unwrap();
        let f2 = op_twist(&f, &CharacterSpec::legendre(3).unwrap());
        assert_eq!(f2.level, 2025);
        let big_f = form_add(&f, &f2).unwrap();
        assert_eq!(big_f.level, 2025);
        assert_eq!(op_u(&big_f, 25).unwrap().level, 2025);
        assert_eq!(big_f.weight, 20);
    }

    #[test]
    fn mismatched_weights_rejected() {
        let mut y = form(&[1], 5);
        y.weight = 4;
        assert!(form_add(&form(&[1], 5), &y).is_err());
    }
}

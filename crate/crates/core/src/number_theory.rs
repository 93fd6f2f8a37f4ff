//! Integer primitives: Kronecker symbols and real characters, `Gamma_0(N)`
//! indices and Sturm bounds, partition numbers, and a brute-force counter
//! for three-colored Frobenius partitions.

use std::fmt;

use num_bigint::BigUint;
use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Prime factorization by trial division, as `(p, e)` pairs with `p` increasing.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2;
    while p * p <= n {
        if n % p == 0 {
            let mut e = 0;
            while n % p == 0 {
                n /= p;
                e += 1;
            }
            out.push((p, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn is_prime(n: u64) -> bool {
    n >= 2 && factorize(n) == [(n, 1)]
}

/// Positive divisors of `n` in increasing order.
pub fn divisors(n: u64) -> Vec<u64> {
    let mut out = vec![1u64];
    for (p, e) in factorize(n) {
        let len = out.len();
        let mut pk = 1;
        for _ in 0..e {
            pk *= p;
            for i in 0..len {
                out.push(out[i] * pk);
            }
        }
    }
    out.sort_unstable();
    out
}

/// Jacobi symbol `(a | n)` for odd positive `n`.
fn jacobi(a: i128, n: i128) -> i8 {
    debug_assert!(n > 0 && n % 2 == 1);
    let mut a = a.rem_euclid(n);
    let mut n = n;
    let mut result = 1i8;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            if matches!(n % 8, 3 | 5) {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// The Kronecker symbol `(a | n)`, defined for every pair of integers.
///
/// Conventions: `(a | 0) = 1` iff `a = +-1`; `(a | -1) = -1` iff `a < 0`;
/// `(a | 2) = 0` for even `a`, `+1` for `a = +-1 (mod 8)` and `-1` for
/// `a = +-3 (mod 8)`; odd positive `n` reduces to the Jacobi symbol. The
/// result is completely multiplicative in `n`.
pub fn kronecker_symbol(a: i64, n: i64) -> i8 {
    let a = a as i128;
    let mut n = n as i128;
    if n == 0 {
        return if a == 1 || a == -1 { 1 } else { 0 };
    }
    let mut result = 1i8;
    if n < 0 {
        n = -n;
        if a < 0 {
            result = -result;
        }
    }
    let twos = n.trailing_zeros();
    if twos > 0 {
        if a % 2 == 0 {
            return 0;
        }
        if twos % 2 == 1 && matches!(a.rem_euclid(8), 3 | 5) {
            result = -result;
        }
        n >>= twos;
    }
    result * jacobi(a, n)
}

/// Squarefree part of a nonzero integer, keeping its sign.
pub fn squarefree_part(a: i64) -> i64 {
    assert!(a != 0, "squarefree part of zero is undefined");
    let core: i64 = factorize(a.unsigned_abs())
        .into_iter()
        .filter(|&(_, e)| e % 2 == 1)
        .map(|(p, _)| p as i64)
        .product();
    core * a.signum()
}

/// Kind of a real Dirichlet character.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum CharacterKind {
    Trivial,
    /// `n -> (top | n)`.
    Kronecker { top: i64 },
    /// `n -> (n | p)` for an odd prime `p`.
    Legendre { prime: u64 },
}

/// A real character together with the modulus it is considered on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CharacterSpec {
    pub kind: CharacterKind,
    pub modulus: u64,
}

impl CharacterSpec {
    /// The principal character modulo `modulus`.
    pub fn trivial(modulus: u64) -> Self {
        assert!(modulus >= 1);
        CharacterSpec {
            kind: CharacterKind::Trivial,
            modulus,
        }
    }

    /// The quadratic character `(. | p)` for an odd prime `p`.
    pub fn legendre(p: u64) -> Result<Self> {
        if p == 2 || !is_prime(p) {
            return Err(Error::InvalidArgument(format!("{p} is not an odd prime")));
        }
        Ok(CharacterSpec {
            kind: CharacterKind::Legendre { prime: p },
            modulus: p,
        })
    }

    /// `d -> (top | d)`, considered modulo `modulus`.
    pub fn kronecker(top: i64, modulus: u64) -> Result<Self> {
        if top == 0 {
            return Err(Error::InvalidArgument("Kronecker top must be nonzero".into()));
        }
        Ok(CharacterSpec {
            kind: CharacterKind::Kronecker { top },
            modulus: modulus.max(1),
        })
    }

    /// Squarefree part of the Kronecker top (1 for trivial, `p*` for Legendre).
    pub fn squarefree_part(&self) -> i64 {
        match self.kind {
            CharacterKind::Trivial => 1,
            CharacterKind::Kronecker { top } => squarefree_part(top),
            CharacterKind::Legendre { prime } => {
                if prime % 4 == 1 {
                    prime as i64
                } else {
                    -(prime as i64)
                }
            }
        }
    }

    pub fn eval(&self, n: i64) -> i8 {
        match self.kind {
            CharacterKind::Trivial => {
                if n.unsigned_abs().gcd(&self.modulus) == 1 {
                    1
                } else {
                    0
                }
            }
            CharacterKind::Kronecker { top } => kronecker_symbol(top, n),
            CharacterKind::Legendre { prime } => kronecker_symbol(n, prime as i64),
        }
    }

    /// True when the character is 1 at every residue coprime to its modulus,
    /// checked exhaustively over one period `4 * modulus * |top|`.
    pub fn is_trivial_on_units(&self) -> bool {
        let period = match self.kind {
            CharacterKind::Trivial => return true,
            CharacterKind::Kronecker { top } => 4 * self.modulus as i64 * top.abs(),
            CharacterKind::Legendre { prime } => prime as i64,
        };
        (1..=period)
            .filter(|d| d.unsigned_abs().gcd(&self.modulus) == 1)
            .all(|d| self.eval(d) == 1)
    }
}

impl fmt::Display for CharacterSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.kind {
            CharacterKind::Trivial => write!(f, "trivial mod {}", self.modulus),
            CharacterKind::Kronecker { top } => write!(f, "({top} | .) mod {}", self.modulus),
            CharacterKind::Legendre { prime } => write!(f, "(. | {prime})"),
        }
    }
}

/// `[SL_2(Z) : Gamma_0(N)] = N prod_{p | N} (1 + 1/p)`.
pub fn gamma0_index(level: u64) -> u64 {
    assert!(level >= 1, "level must be positive");
    factorize(level)
        .into_iter()
        .fold(level, |acc, (p, _)| acc / p * (p + 1))
}

/// `1 + ceil(k [SL_2(Z) : Gamma_0(N)] / 12)`: congruence of the first
/// coefficients up to this index implies congruence of all of them.
pub fn sturm_bound(weight: u64, level: u64) -> u64 {
    assert!(weight >= 1, "weight must be positive");
    1 + (weight * gamma0_index(level)).div_ceil(12)
}

/// `p(0), ..., p(n)` by Euler's pentagonal recurrence.
pub fn partition_numbers(n: usize) -> Vec<BigUint> {
    use num_bigint::BigInt;
    let mut p: Vec<BigInt> = Vec::with_capacity(n + 1);
    p.push(BigInt::from(1));
    for m in 1..=n {
        let mut acc = BigInt::zero();
        for k in 1usize.. {
            let g1 = k * (3 * k - 1) / 2;
            if g1 > m {
                break;
            }
            let sign_positive = k % 2 == 1;
            let mut term = p[m - g1].clone();
            let g2 = k * (3 * k + 1) / 2;
            if g2 <= m {
                term += &p[m - g2];
            }
            if sign_positive {
                acc += term;
            } else {
                acc -= term;
            }
        }
        p.push(acc);
    }
    p.into_iter()
        .map(|x| x.to_biguint().expect("partition numbers are nonnegative"))
        .collect()
}

/// `p(x)` with `p(x) = 0` unless `x` is a nonnegative integer.
pub fn partition_p(x: Ratio<i64>) -> BigUint {
    if !x.is_integer() || *x.numer() < 0 {
        return BigUint::zero();
    }
    let n = x.to_integer().to_usize().expect("nonnegative");
    partition_numbers(n).pop().expect("nonempty")
}

/// Largest `n` accepted by [`enumerate_frobenius3`].
pub const FROBENIUS_ORACLE_LIMIT: u64 = 25;

/// Counts three-colored Frobenius partitions of `n` by explicit enumeration.
///
/// Each row of the two-rowed array is ordered by size and then color, and no
/// two consecutive entries may coincide, so a row is exactly a finite set of
/// colored entries `(value, color)`. The count is therefore the number of
/// pairs of such sets of a common size `k` with total value sum `n - k`.
/// Every set is enumerated explicitly and tallied by `(size, sum)`.
pub fn enumerate_frobenius3(n: u64) -> Result<u64> {
    if n > FROBENIUS_ORACLE_LIMIT {
        return Err(Error::EnumerationTooLarge {
            n,
            limit: FROBENIUS_ORACLE_LIMIT,
        });
    }
    let n = n as usize;
    // colored entries in increasing (value, color) order
    let items: Vec<usize> = (0..=n).flat_map(|v| [v, v, v]).collect();
    let mut tally = vec![vec![0u64; n + 1]; n + 1];

    fn walk(items: &[usize], start: usize, size: usize, sum: usize, n: usize, tally: &mut [Vec<u64>]) {
        tally[size][sum] += 1;
        if size == n {
            return;
        }
        for i in start..items.len() {
            let v = items[i];
            if sum + v + size + 1 > n {
                // items are sorted by value; later ones are no smaller
                break;
            }
            walk(items, i + 1, size + 1, sum + v, n, tally);
        }
    }
    walk(&items, 0, 0, 0, n, &mut tally);

    let mut total = 0u64;
    for k in 0..=n {
        let rest = n - k;
        for s in 0..=rest {
            total += tally[k][s] * tally[k][rest - s];
        }
    }
    Ok(total)
}

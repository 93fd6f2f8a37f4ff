//! Multi-modular convolution.
//!
//! Products are computed with number-theoretic transforms over a family of
//! word-size primes `p = c * 2^22 + 1 < 2^31` and recombined with Garner's
//! mixed-radix algorithm. The number of primes is chosen per call from an a
//! priori bound on the exact (unreduced) convolution coefficients, so the
//! recombined values are exact before the final reduction.

use std::sync::OnceLock;

use num_bigint::{BigInt, Sign};
use num_traits::{Signed, Zero};
use rayon::prelude::*;

const TWO_ADICITY: u32 = 22;

/// Longest cyclic convolution supported by the prime family.
pub(crate) const MAX_LEN: usize = 1 << TWO_ADICITY;

#[derive(Clone, Copy, Debug)]
struct NttPrime {
    p: u64,
    /// Element of multiplicative order exactly `MAX_LEN`.
    root: u64,
}

fn pow_mod(mut base: u64, mut exp: u64, p: u64) -> u64 {
    let mut acc = 1 % p;
    base %= p;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % p;
        }
        base = base * base % p;
        exp >>= 1;
    }
    acc
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

fn prime_factors(mut n: u64) -> Vec<u64> {
    let mut out = Vec::new();
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            out.push(d);
            while n % d == 0 {
                n /= d;
            }
        }
        d += 1;
    }
    if n > 1 {
        out.push(n);
    }
    out
}

fn primitive_root(p: u64) -> u64 {
    let factors = prime_factors(p - 1);
    (2..p)
        .find(|&g| factors.iter().all(|&q| pow_mod(g, (p - 1) / q, p) != 1))
        .expect("prime field has a generator")
}

fn primes() -> &'static [NttPrime] {
    static PRIMES: OnceLock<Vec<NttPrime>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let step = 1u64 << TWO_ADICITY;
        (1..(1u64 << 31) / step)
            .rev()
            .map(|c| c * step + 1)
            .filter(|&p| is_prime(p))
            .map(|p| {
                let g = primitive_root(p);
                NttPrime {
                    p,
                    root: pow_mod(g, (p - 1) >> TWO_ADICITY, p),
                }
            })
            .collect()
    })
}

/// Total bit capacity of the prime family (sum of floor(log2 p)).
#[cfg(test)]
pub(crate) fn capacity_bits() -> u64 {
    primes().iter().map(|pr| 63 - pr.p.leading_zeros() as u64).sum()
}

/// Smallest prefix of the prime family whose product exceeds `2^bits`.
fn primes_for_bits(bits: u64) -> Option<&'static [NttPrime]> {
    let family = primes();
    let mut acc = 0u64;
    for (i, pr) in family.iter().enumerate() {
        acc += 63 - pr.p.leading_zeros() as u64;
        if acc > bits {
            return Some(&family[..=i]);
        }
    }
    None
}

fn ntt(a: &mut [u64], prime: NttPrime, inverse: bool) {
    let n = a.len();
    let p = prime.p;
    let mut j = 0;
    for i in 1..n {
        let mut bit = n >> 1;
        while j & bit != 0 {
            j ^= bit;
            bit >>= 1;
        }
        j |= bit;
        if i < j {
            a.swap(i, j);
        }
    }
    let mut twiddles = Vec::with_capacity(n / 2);
    let mut len = 2;
    while len <= n {
        let mut w_len = pow_mod(prime.root, (MAX_LEN / len) as u64, p);
        if inverse {
            w_len = pow_mod(w_len, p - 2, p);
        }
        let half = len / 2;
        twiddles.clear();
        let mut w = 1u64;
        for _ in 0..half {
            twiddles.push(w);
            w = w * w_len % p;
        }
        for chunk in a.chunks_mut(len) {
            let (lo, hi) = chunk.split_at_mut(half);
            for ((x, y), &tw) in lo.iter_mut().zip(hi.iter_mut()).zip(&twiddles) {
                let u = *x;
                let v = *y * tw % p;
                *x = if u + v >= p { u + v - p } else { u + v };
                *y = if u >= v { u - v } else { u + p - v };
            }
        }
        len <<= 1;
    }
    if inverse {
        let inv_n = pow_mod(n as u64, p - 2, p);
        for x in a.iter_mut() {
            *x = *x * inv_n % p;
        }
    }
}

/// Cyclic convolution modulo one prime, truncated to `out_len`.
fn convolve_prime(a: &[u64], b: Option<&[u64]>, out_len: usize, prime: NttPrime) -> Vec<u64> {
    let full = a.len() + b.map_or(a.len(), <[u64]>::len) - 1;
    let size = full.next_power_of_two();
    let mut fa = vec![0u64; size];
    fa[..a.len()].copy_from_slice(a);
    ntt(&mut fa, prime, false);
    match b {
        Some(b) => {
            let mut fb = vec![0u64; size];
            fb[..b.len()].copy_from_slice(b);
            ntt(&mut fb, prime, false);
            for (x, y) in fa.iter_mut().zip(&fb) {
                *x = *x * y % prime.p;
            }
        }
        None => {
            for x in fa.iter_mut() {
                *x = *x * *x % prime.p;
            }
        }
    }
    ntt(&mut fa, prime, true);
    fa.truncate(out_len);
    fa.resize(out_len, 0);
    fa
}

/// Garner mixed-radix digits of the value with residues `rs` modulo `ps`.
struct Garner {
    /// `inverses[i] = (p_0 ... p_{i-1})^{-1} mod p_i`.
    inverses: Vec<u64>,
    ps: Vec<u64>,
}

impl Garner {
    fn new(family: &[NttPrime]) -> Self {
        let ps: Vec<u64> = family.iter().map(|pr| pr.p).collect();
        let inverses = (0..ps.len())
            .map(|i| {
                let prod = ps[..i].iter().fold(1u64, |acc, &q| acc * (q % ps[i]) % ps[i]);
                pow_mod(prod, ps[i] - 2, ps[i])
            })
            .collect();
        Garner { inverses, ps }
    }

    fn digits(&self, rs: &[u64], out: &mut Vec<u64>) {
        out.clear();
        for (i, &r) in rs.iter().enumerate() {
            let p = self.ps[i];
            // value of the partial mixed-radix number modulo p
            let mut partial = 0u64;
            for j in (0..i).rev() {
                partial = (partial * (self.ps[j] % p) + out[j]) % p;
            }
            let diff = (r + p - partial) % p;
            out.push(diff * self.inverses[i] % p);
        }
    }
}

/// Truncated product of residues modulo `m`, exact by construction.
pub(crate) fn convolve_residues(a: &[u32], b: &[u32], out_len: usize, m: u64) -> Option<Vec<u32>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Some(vec![0; out_len]);
    }
    let la = a.len().min(out_len);
    let lb = b.len().min(out_len);
    let a = &a[..la];
    let b = &b[..lb];
    if la + lb - 1 > MAX_LEN {
        return None;
    }
    let bound = ((m - 1) as u128).pow(2) * la.min(lb) as u128;
    let bits = 128 - bound.leading_zeros() as u64;
    let family = primes_for_bits(bits)?;
    let squaring = std::ptr::eq(a.as_ptr(), b.as_ptr()) && la == lb;

    let per_prime: Vec<Vec<u64>> = family
        .par_iter()
        .map(|&pr| {
            let ra: Vec<u64> = a.iter().map(|&x| x as u64 % pr.p).collect();
            if squaring {
                convolve_prime(&ra, None, out_len, pr)
            } else {
                let rb: Vec<u64> = b.iter().map(|&x| x as u64 % pr.p).collect();
                convolve_prime(&ra, Some(&rb), out_len, pr)
            }
        })
        .collect();

    if family.len() == 1 {
        return Some(per_prime[0].iter().map(|&x| (x % m) as u32).collect());
    }
    let garner = Garner::new(family);
    // radix weights p_0 ... p_{j-1} reduced mod m
    let mut weights = Vec::with_capacity(family.len());
    let mut w = 1 % m;
    for pr in family {
        weights.push(w);
        w = w * (pr.p % m) % m;
    }
    let out = (0..out_len)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(family.len()), Vec::with_capacity(family.len())),
            |(rs, digits), n| {
                rs.clear();
                rs.extend(per_prime.iter().map(|v| v[n]));
                garner.digits(rs, digits);
                let mut acc = 0u64;
                for (d, wt) in digits.iter().zip(&weights) {
                    acc = (acc + (d % m) * wt) % m;
                }
                acc as u32
            },
        )
        .collect();
    Some(out)
}

fn reduce_bigint(x: &BigInt, p: u64) -> u64 {
    let (sign, digits) = x.to_u32_digits();
    let mut r = 0u64;
    for &d in digits.iter().rev() {
        r = ((r << 32) | d as u64) % p;
    }
    if sign == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

/// Truncated exact integer product, or `None` when the coefficient bound
/// exceeds the capacity of the prime family.
pub(crate) fn convolve_exact(a: &[BigInt], b: &[BigInt], out_len: usize) -> Option<Vec<BigInt>> {
    if a.is_empty() || b.is_empty() || out_len == 0 {
        return Some(vec![BigInt::zero(); out_len]);
    }
    let la = a.len().min(out_len);
    let lb = b.len().min(out_len);
    let a = &a[..la];
    let b = &b[..lb];
    if la + lb - 1 > MAX_LEN {
        return None;
    }
    let max_bits = |v: &[BigInt]| v.iter().map(|x| x.bits()).max().unwrap_or(0);
    let len_bits = 64 - (la.min(lb) as u64).leading_zeros() as u64;
    // |c| < 2^(bits_a + bits_b + len_bits); symmetric range needs one more bit
    let bits = max_bits(a) + max_bits(b) + len_bits + 1;
    let family = primes_for_bits(bits)?;
    let squaring = std::ptr::eq(a.as_ptr(), b.as_ptr()) && la == lb;

    let per_prime: Vec<Vec<u64>> = family
        .par_iter()
        .map(|&pr| {
            let ra: Vec<u64> = a.iter().map(|x| reduce_bigint(x, pr.p)).collect();
            if squaring {
                convolve_prime(&ra, None, out_len, pr)
            } else {
                let rb: Vec<u64> = b.iter().map(|x| reduce_bigint(x, pr.p)).collect();
                convolve_prime(&ra, Some(&rb), out_len, pr)
            }
        })
        .collect();

    let garner = Garner::new(family);
    let mut weights = Vec::with_capacity(family.len());
    let mut w = BigInt::from(1u32);
    for pr in family {
        weights.push(w.clone());
        w *= pr.p;
    }
    let total = w;
    let half = &total >> 1usize;
    let out = (0..out_len)
        .into_par_iter()
        .map_init(
            || (Vec::with_capacity(family.len()), Vec::with_capacity(family.len())),
            |(rs, digits), n| {
                rs.clear();
                rs.extend(per_prime.iter().map(|v| v[n]));
                garner.digits(rs, digits);
                let mut acc = BigInt::zero();
                for (d, wt) in digits.iter().zip(&weights) {
                    acc += wt * *d;
                }
                if acc > half {
                    acc -= &total;
                }
                debug_assert!(acc.abs() <= half);
                acc
            },
        )
        .collect();
    Some(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn prime_family_is_ntt_friendly() {
        let family = primes();
        assert!(family.len() >= 20);
        for pr in family {
            assert!(pr.p < 1 << 31);
            assert_eq!((pr.p - 1) % MAX_LEN as u64, 0);
            assert_eq!(pow_mod(pr.root, MAX_LEN as u64, pr.p), 1);
            assert_ne!(pow_mod(pr.root, MAX_LEN as u64 / 2, pr.p), 1);
        }
        assert!(capacity_bits() > 600);
    }

    #[test]
    fn transform_round_trip() {
        let pr = primes()[0];
        let orig: Vec<u64> = (0..64).map(|i| (i * i + 7) % pr.p).collect();
        let mut v = orig.clone();
        ntt(&mut v, pr, false);
        ntt(&mut v, pr, true);
        assert_eq!(v, orig);
    }

    #[test]
    fn garner_recovers_small_values() {
        let family = &primes()[..3];
        let garner = Garner::new(family);
        let value: u128 = 123_456_789_012_345_678;
        let rs: Vec<u64> = family.iter().map(|pr| (value % pr.p as u128) as u64).collect();
        let mut digits = Vec::new();
        garner.digits(&rs, &mut digits);
        let mut acc = 0u128;
        let mut w = 1u128;
        for (d, pr) in digits.iter().zip(family) {
            acc += *d as u128 * w;
            w *= pr.p as u128;
        }
        assert_eq!(acc, value);
    }

    #[test]
    fn exact_convolution_handles_signs() {
        let a: Vec<BigInt> = [1, -1, 3].iter().map(|&x| BigInt::from(x)).collect();
        let b: Vec<BigInt> = [-2, 5].iter().map(|&x| BigInt::from(x)).collect();
        let c = convolve_exact(&a, &b, 4).unwrap();
        let expect: Vec<BigInt> = [-2, 7, -11, 15].iter().map(|&x| BigInt::from(x)).collect();
        assert_eq!(c, expect);
    }
}

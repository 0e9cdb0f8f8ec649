//! Deterministic primality for the level primes.

use num_bigint::BigUint;

use crate::error::{Error, Result};

const BASES: [u64; 13] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41];

/// Miller–Rabin with the first 13 prime bases, deterministic for
/// `n < 3.3 * 10^24`.
pub fn is_prime(n: u128) -> bool {
    if n < 2 {
        return false;
    }
    for &b in &BASES {
        let b = b as u128;
        if n == b {
            return true;
        }
        if n % b == 0 {
            return false;
        }
    }
    if n < 43 * 43 {
        return true;
    }
    let mut d = n - 1;
    let mut s = 0u32;
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    if n <= u64::MAX as u128 {
        let n = n as u64;
        BASES
            .iter()
            .all(|&a| strong_probable_prime_u64(n, a, d as u64, s))
    } else {
        let nb = BigUint::from(n);
        let db = BigUint::from(d);
        BASES
            .iter()
            .all(|&a| strong_probable_prime_big(&nb, a, &db, s))
    }
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn pow_mod(mut base: u64, mut e: u64, m: u64) -> u64 {
    let mut acc = 1u64 % m;
    base %= m;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        e >>= 1;
    }
    acc
}

fn strong_probable_prime_u64(n: u64, a: u64, d: u64, s: u32) -> bool {
    let mut x = pow_mod(a, d, n);
    if x == 1 || x == n - 1 {
        return true;
    }
    for _ in 1..s {
        x = mul_mod(x, x, n);
        if x == n - 1 {
            return true;
        }
    }
    false
}

fn strong_probable_prime_big(n: &BigUint, a: u64, d: &BigUint, s: u32) -> bool {
    let one = BigUint::from(1u32);
    let n1 = n - &one;
    let mut x = BigUint::from(a).modpow(d, n);
    if x == one || x == n1 {
        return true;
    }
    for _ in 1..s {
        x = (&x * &x) % n;
        if x == n1 {
            return true;
        }
    }
    false
}

/// Smallest prime `p` with `l < (p - 1) / 3`, i.e. `p > 3l + 1`.
/// Bertrand's postulate places it strictly below `6l + 2`.
pub fn prime_for(l: u128) -> Result<u128> {
    if l == 0 {
        return Err(Error::Parse("prime_for needs L >= 1".into()));
    }
    let mut c = l
        .checked_mul(3)
        .and_then(|v| v.checked_add(2))
        .ok_or(Error::Overflow("prime_for"))?;
    while !is_prime(c) {
        c = c.checked_add(1).ok_or(Error::Overflow("prime_for"))?;
    }
    Ok(c)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn trial(n: u128) -> bool {
        n >= 2 && (2..).take_while(|d| d * d <= n).all(|d| n % d != 0)
    }

    #[test]
    fn agrees_with_trial_division() {
        for n in 0..20_000u128 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
        for n in (1u128 << 40)..(1u128 << 40) + 500 {
            assert_eq!(is_prime(n), trial(n), "n = {n}");
        }
    }

    #[test]
    fn large_values() {
        // 2^61 - 1 and 2^89 - 1 are Mersenne primes.
        assert!(is_prime((1u128 << 61) - 1));
        assert!(is_prime((1u128 << 89) - 1));
        assert!(!is_prime(((1u128 << 61) - 1) * 1_000_003));
        assert!(!is_prime((1u128 << 89) + 1));
    }

    #[test]
    fn prime_for_examples() {
        assert_eq!(prime_for(1).unwrap(), 5);
        assert_eq!(prime_for(2).unwrap(), 11);
        assert_eq!(prime_for(3).unwrap(), 11);
        assert_eq!(prime_for(16).unwrap(), 53);
        for l in 1..2000u128 {
            let p = prime_for(l).unwrap();
            assert!(3 * l + 1 < p && p < 6 * l + 2);
            assert!((3 * l + 2..p).all(|c| !trial(c)));
        }
    }
}

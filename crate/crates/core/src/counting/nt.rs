//! Small exact number theory used by the counting formulas.

use num_bigint::BigUint;
use num_traits::One;

use crate::error::{Error, Result};

pub fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs in increasing prime order.
pub fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            let mut k = 0;
            while n % d == 0 {
                n /= d;
                k += 1;
            }
            out.push((d, k));
        }
        d += 1;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// Splits `q = p^r`, failing when `q` is not a prime power.
pub fn prime_power(q: u64) -> Result<(u64, u32)> {
    match factorize(q).as_slice() {
        [(p, r)] => Ok((*p, *r)),
        _ => Err(Error::NotPrimePower(q)),
    }
}

pub fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1u64;
    while d.saturating_mul(d) <= n {
        if n % d == 0 {
            small.push(d);
            if d != n / d {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

pub fn euler_phi(n: u64) -> u64 {
    factorize(n)
        .into_iter()
        .fold(n, |acc, (p, _)| acc / p * (p - 1))
}

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Least `k >= 1` with `q^k = 1 (mod d)`.
pub fn mult_order(q: u64, d: u64) -> Result<u64> {
    if d == 0 || gcd(q, d) != 1 {
        return Err(Error::NotCoprime { a: q, b: d });
    }
    if d == 1 {
        return Ok(1);
    }
    let base = q % d;
    let mut acc = base;
    let mut k = 1;
    while acc != 1 {
        acc = mul_mod(acc, base, d);
        k += 1;
    }
    Ok(k)
}

pub fn binomial(a: u64, b: u64) -> BigUint {
    if b > a {
        return BigUint::default();
    }
    let b = b.min(a - b);
    let mut acc = BigUint::one();
    for i in 0..b {
        // exact at every step: acc is C(a, i) before the update
        acc = acc * (a - i) / (i + 1);
    }
    acc
}

pub fn big_pow(base: u64, exp: u64) -> BigUint {
    num_traits::pow(BigUint::from(base), exp as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_examples() {
        assert_eq!(mult_order(3, 2), Ok(1));
        assert_eq!(mult_order(2, 7), Ok(3));
        assert_eq!(mult_order(5, 1), Ok(1));
        assert_eq!(binomial(2, 1), BigUint::from(2u32));
        assert_eq!(euler_phi(3), 2);
    }

    #[test]
    fn mult_order_rejects_shared_factor() {
        assert_eq!(mult_order(4, 6), Err(Error::NotCoprime { a: 4, b: 6 }));
    }

    #[test]
    fn divisors_sorted() {
        assert_eq!(divisors(12), vec![1, 2, 3, 4, 6, 12]);
        assert_eq!(divisors(1), vec![1]);
        assert_eq!(divisors(49), vec![1, 7, 49]);
    }

    #[test]
    fn phi_sums_to_n_over_divisors() {
        for n in 1..200u64 {
            let s: u64 = divisors(n).into_iter().map(euler_phi).sum();
            assert_eq!(s, n);
        }
    }

    #[test]
    fn binomial_matches_pascal() {
        let mut row = vec![BigUint::one()];
        for a in 1..40u64 {
            let mut next = vec![BigUint::one(); a as usize + 1];
            for i in 1..a as usize {
                next[i] = &row[i - 1] + &row[i];
            }
            row = next;
            for (b, v) in row.iter().enumerate() {
                assert_eq!(&binomial(a, b as u64), v);
            }
        }
        assert_eq!(binomial(3, 5), BigUint::default());
    }

    #[test]
    fn prime_power_split() {
        assert_eq!(prime_power(9), Ok((3, 2)));
        assert_eq!(prime_power(2), Ok((2, 1)));
        assert_eq!(prime_power(12), Err(Error::NotPrimePower(12)));
        assert_eq!(prime_power(1), Err(Error::NotPrimePower(1)));
    }
}

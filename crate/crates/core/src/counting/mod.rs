//! Closed-form determinant counts for diagonal and circulant matrices.
//!
//! Every count depends only on the residue field size `q`, the nilpotency
//! index `e`, the dimension `n` and the valuation class of the target
//! determinant. All values are exact `BigUint`s and every formula is
//! rearranged so that no intermediate is fractional.

pub mod nt;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use nt::{big_pow, binomial};

/// Valuation class of a determinant: units, `γ^s · U(R)` for `1 <= s < e`, or zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DetClass {
    Unit,
    GammaPow(u32),
    Zero,
}

impl DetClass {
    /// The class of an element of valuation `s` in a ring of nilpotency `e`.
    pub fn from_valuation(s: u32, e: u32) -> Self {
        match s {
            0 => DetClass::Unit,
            s if s >= e => DetClass::Zero,
            s => DetClass::GammaPow(s),
        }
    }

    pub fn valuation(self, e: u32) -> u32 {
        match self {
            DetClass::Unit => 0,
            DetClass::GammaPow(s) => s,
            DetClass::Zero => e,
        }
    }

    /// All classes of a ring of nilpotency `e`, ordered by valuation.
    pub fn all(e: u32) -> Vec<DetClass> {
        (0..=e).map(|s| DetClass::from_valuation(s, e)).collect()
    }

    /// Number of ring elements in this class.
    pub fn size(self, q: u64, e: u32) -> BigUint {
        match self {
            DetClass::Zero => BigUint::one(),
            c => BigUint::from(q - 1) * big_pow(q, (e - 1 - c.valuation(e)) as u64),
        }
    }
}

impl fmt::Display for DetClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetClass::Unit => f.write_str("unit"),
            DetClass::GammaPow(s) => write!(f, "gamma^{s}"),
            DetClass::Zero => f.write_str("zero"),
        }
    }
}

impl FromStr for DetClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "unit" => Ok(DetClass::Unit),
            "zero" => Ok(DetClass::Zero),
            _ => s
                .strip_prefix("gamma^")
                .and_then(|k| k.parse::<u32>().ok())
                .filter(|&k| k >= 1)
                .map(DetClass::GammaPow)
                .ok_or_else(|| {
                    Error::InvalidQuery(format!(
                        "determinant class `{s}` is not unit, zero or gamma^s"
                    ))
                }),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Shape {
    Diagonal,
    Circulant,
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Shape::Diagonal => "diagonal",
            Shape::Circulant => "circulant",
        })
    }
}

impl FromStr for Shape {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "diagonal" => Ok(Shape::Diagonal),
            "circulant" => Ok(Shape::Circulant),
            _ => Err(Error::InvalidQuery(format!(
                "shape `{s}` is not diagonal or circulant"
            ))),
        }
    }
}

/// A validated `(q, e, n, class)` query.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CountQuery {
    q: u64,
    e: u32,
    n: u32,
    class: DetClass,
}

impl CountQuery {
    pub fn new(q: u64, e: u32, n: u32, class: DetClass) -> Result<Self> {
        nt::prime_power(q)?;
        if e == 0 || n == 0 {
            return Err(Error::InvalidQuery("e and n must be at least 1".into()));
        }
        if let DetClass::GammaPow(s) = class {
            if s == 0 || s >= e {
                return Err(Error::InvalidQuery(format!(
                    "gamma^{s} needs 1 <= s < e = {e}"
                )));
            }
        }
        Ok(CountQuery { q, e, n, class })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn e(&self) -> u32 {
        self.e
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn class(&self) -> DetClass {
        self.class
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Formula,
    Recursion,
    Enumeration,
}

/// An exact count, or the reason no closed form covers the query.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountResult {
    pub value: Option<BigUint>,
    pub method: Method,
    pub reason: Option<String>,
}

impl CountResult {
    fn formula(value: BigUint) -> Self {
        CountResult {
            value: Some(value),
            method: Method::Formula,
            reason: None,
        }
    }

    fn open(reason: impl Into<String>) -> Self {
        CountResult {
            value: None,
            method: Method::Formula,
            reason: Some(reason.into()),
        }
    }

    pub fn applicable(&self) -> bool {
        self.value.is_some()
    }
}

fn unit_group_order(q: u64, e: u32) -> BigUint {
    BigUint::from(q - 1) * big_pow(q, (e - 1) as u64)
}

/// `d_n(R, γ^s)` for `0 <= s < e`: `q^{(e-1)(n-1)} (q-1)^{n-1} C(n+s-1, n-1)`.
fn d_gamma_pow(q: u64, e: u32, n: u32, s: u32) -> BigUint {
    let (e, n, s) = (e as u64, n as u64, s as u64);
    big_pow(q, (e - 1) * (n - 1)) * big_pow(q - 1, n - 1) * binomial(n + s - 1, n - 1)
}

/// `d_n(R, 0) = q^{ne} - Σ_{i<e} (q-1)^n C(n+i-1, n-1) q^{(e-1)n - i}`.
fn d_zero(q: u64, e: u32, n: u32) -> BigUint {
    let (e, n) = (e as u64, n as u64);
    let nonzero: BigUint = (0..e)
        .map(|i| big_pow(q - 1, n) * binomial(n + i - 1, n - 1) * big_pow(q, (e - 1) * n - i))
        .sum();
    big_pow(q, n * e) - nonzero
}

/// Number of `n x n` diagonal matrices with determinant in the given class
/// representative (`1`, `γ^s` or `0`).
pub fn d_count(query: &CountQuery) -> CountResult {
    let (q, e, n) = (query.q, query.e, query.n);
    CountResult::formula(match query.class {
        DetClass::Unit => d_gamma_pow(q, e, n, 0),
        DetClass::GammaPow(s) => d_gamma_pow(q, e, n, s),
        DetClass::Zero => d_zero(q, e, n),
    })
}

/// `d_n(R, 0)` through the recursion on `(n, e)`:
/// `d_n(e) = (q-1) q^{e-1} d_{n-1}(e) + q^{n-1} d_n(e-1)`,
/// with `d_1 = 1` and `d_n(1) = q^n - (q-1)^n`.
pub fn d_zero_recursive(q: u64, e: u32, n: u32) -> BigUint {
    assert!(e >= 1 && n >= 1);
    let (e, n) = (e as usize, n as usize);
    // table[j][k] = d_{k+1} over nilpotency j+1
    let mut table: Vec<Vec<BigUint>> = Vec::with_capacity(e);
    for j in 0..e {
        let mut row = Vec::with_capacity(n);
        for k in 0..n {
            let value = if k == 0 {
                BigUint::one()
            } else if j == 0 {
                big_pow(q, k as u64 + 1) - big_pow(q - 1, k as u64 + 1)
            } else {
                unit_group_order(q, j as u32 + 1) * &row[k - 1]
                    + big_pow(q, k as u64) * &table[j - 1][k]
            };
            row.push(value);
        }
        table.push(row);
    }
    table[e - 1][n - 1].clone()
}

/// `|NSD_n(R)| = (q-1)^n q^{(e-1)n}`.
pub fn nsd_count(q: u64, e: u32, n: u32) -> BigUint {
    big_pow(q - 1, n as u64) * big_pow(q, (e as u64 - 1) * n as u64)
}

/// Invertible circulants over `F_q`:
/// `q^{n - n'} Π_{d | n'} (q^{ord_d(q)} - 1)^{φ(d) / ord_d(q)}` where `n = n' p^k`, `p ∤ n'`.
pub fn nsc_count_field(q: u64, n: u32) -> BigUint {
    let (p, _) = nt::prime_power(q).expect("q is a prime power");
    let mut n_prime = n as u64;
    while n_prime % p == 0 {
        n_prime /= p;
    }
    let product: BigUint = nt::divisors(n_prime)
        .into_iter()
        .map(|d| {
            let ord = nt::mult_order(q, d).expect("d divides n', which is prime to q");
            let phi = nt::euler_phi(d);
            num_traits::pow(big_pow(q, ord) - BigUint::one(), (phi / ord) as usize)
        })
        .product();
    big_pow(q, n as u64 - n_prime) * product
}

/// `|NSC_n(R)| = q^{(e-1)n} |NSC_n(F_q)|`, valid for `gcd(n, q) = 1`.
pub fn nsc_count_ring(q: u64, e: u32, n: u32) -> Result<BigUint> {
    if nt::gcd(n as u64, q) != 1 {
        return Err(Error::NotCoprime { a: n as u64, b: q });
    }
    Ok(big_pow(q, (e as u64 - 1) * n as u64) * nsc_count_field(q, n))
}

/// Number of `n x n` circulants with determinant in the given class, where
/// a closed form is known: unit class for `gcd(n, q) = 1`, non-units for
/// `n | q - 1`. Anything else is reported as open.
pub fn c_count(query: &CountQuery) -> CountResult {
    let (q, e, n) = (query.q, query.e, query.n);
    match query.class {
        DetClass::Unit => match nsc_count_ring(q, e, n) {
            Ok(total) => {
                let units = unit_group_order(q, e);
                let (quot, rem) = (&total / &units, &total % &units);
                assert!(
                    rem.is_zero(),
                    "|NSC_n(R)| = {total} not divisible by |U(R)| = {units}"
                );
                CountResult::formula(quot)
            }
            Err(_) => CountResult::open(format!("open problem: gcd(n, q) = gcd({n}, {q}) != 1")),
        },
        class => {
            if (q - 1) % n as u64 != 0 {
                return CountResult::open(format!(
                    "open problem: n = {n} does not divide q - 1 = {}",
                    q - 1
                ));
            }
            // circulants are diagonalizable, so the diagonal counts carry over
            d_count(&CountQuery { class, ..*query })
        }
    }
}

/// Checks `d_n(R_{e+f}, γ^s) = q^{f(n-1)} d_n(R_e, γ^s)` between closed-form instances.
pub fn d_quotient_reduction_check(q: u64, e: u32, f: u32, n: u32, s: u32) -> Result<bool> {
    let big = CountQuery::new(q, e + f, n, DetClass::GammaPow(s))?;
    let small = CountQuery::new(q, e, n, DetClass::GammaPow(s))?;
    let lhs = d_count(&big).value.expect("diagonal counts are always known");
    let rhs = big_pow(q, f as u64 * (n as u64 - 1))
        * d_count(&small).value.expect("diagonal counts are always known");
    Ok(lhs == rhs)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: u64) -> BigUint {
        BigUint::from(v)
    }

    fn d(q: u64, e: u32, n: u32, class: DetClass) -> BigUint {
        d_count(&CountQuery::new(q, e, n, class).unwrap()).value.unwrap()
    }

    fn c(q: u64, e: u32, n: u32, class: DetClass) -> CountResult {
        c_count(&CountQuery::new(q, e, n, class).unwrap())
    }

    #[test]
    fn d_count_examples() {
        assert_eq!(d(2, 2, 2, DetClass::Zero), big(8));
        assert_eq!(d(2, 3, 2, DetClass::GammaPow(1)), big(8));
        assert_eq!(d(3, 1, 2, DetClass::Unit), big(2));
        for (q, e) in [(2, 1), (3, 4), (9, 2)] {
            assert_eq!(d(q, e, 1, DetClass::Zero), big(1));
        }
        assert_eq!(d(2, 3, 2, DetClass::Zero), big(20));
        assert_eq!(d(2, 2, 3, DetClass::Unit), big(4));
    }

    #[test]
    fn recursion_examples() {
        assert_eq!(d_zero_recursive(2, 2, 2), big(8));
        assert_eq!(d_zero_recursive(3, 1, 2), big(5));
        assert_eq!(d_zero_recursive(7, 5, 1), big(1));
    }

    #[test]
    fn nsd_examples() {
        assert_eq!(nsd_count(3, 1, 2), big(4));
        assert_eq!(nsd_count(2, 2, 2), big(4));
        assert_eq!(nsd_count(5, 3, 1), big(4 * 25));
    }

    #[test]
    fn nsc_examples() {
        assert_eq!(nsc_count_field(3, 2), big(4));
        assert_eq!(nsc_count_field(2, 4), big(8));
        assert_eq!(nsc_count_field(4, 3), big(27));
        assert_eq!(nsc_count_ring(3, 1, 2), Ok(big(4)));
        assert_eq!(nsc_count_ring(3, 2, 2), Ok(big(36)));
        assert_eq!(nsc_count_ring(2, 2, 3), Ok(big(24)));
        assert_eq!(
            nsc_count_ring(2, 2, 2),
            Err(Error::NotCoprime { a: 2, b: 2 })
        );
    }

    #[test]
    fn c_count_examples() {
        assert_eq!(c(3, 1, 2, DetClass::Unit).value, Some(big(2)));
        assert_eq!(c(3, 1, 2, DetClass::Zero).value, Some(big(5)));
        let open = c(2, 2, 2, DetClass::GammaPow(1));
        assert!(!open.applicable());
        assert!(open.reason.unwrap().starts_with("open problem"));
        assert_eq!(c(4, 1, 3, DetClass::Unit).value, Some(big(9)));
        assert!(!c(2, 2, 2, DetClass::Unit).applicable());
    }

    #[test]
    fn quotient_reduction_examples() {
        assert_eq!(d_quotient_reduction_check(2, 2, 1, 2, 1), Ok(true));
        assert_eq!(d_quotient_reduction_check(2, 2, 0, 2, 1), Ok(true));
        assert_eq!(d_quotient_reduction_check(3, 2, 2, 2, 1), Ok(true));
    }

    #[test]
    fn query_validation() {
        assert_eq!(
            CountQuery::new(12, 1, 2, DetClass::Unit).unwrap_err(),
            Error::NotPrimePower(12)
        );
        assert!(CountQuery::new(4, 2, 2, DetClass::GammaPow(2)).is_err());
        assert!(CountQuery::new(4, 2, 0, DetClass::Unit).is_err());
    }

    #[test]
    fn field_specialization() {
        for q in [2u64, 3, 4, 5, 7, 8, 9] {
            for n in 1..6 {
                assert_eq!(d(q, 1, n, DetClass::Unit), big_pow(q - 1, n as u64 - 1));
                assert_eq!(nsd_count(q, 1, n), big_pow(q - 1, n as u64));
            }
        }
    }

    #[test]
    fn class_parse_display() {
        for c in [DetClass::Unit, DetClass::Zero, DetClass::GammaPow(3)] {
            assert_eq!(c.to_string().parse::<DetClass>(), Ok(c));
        }
        assert!("gamma^0".parse::<DetClass>().is_err());
        assert!("units".parse::<DetClass>().is_err());
    }

    #[test]
    fn class_sizes_partition_ring() {
        for (q, e) in [(2u64, 1u32), (2, 3), (3, 2), (4, 4), (9, 2)] {
            let total: BigUint = DetClass::all(e).into_iter().map(|c| c.size(q, e)).sum();
            assert_eq!(total, big_pow(q, e as u64));
        }
    }
}

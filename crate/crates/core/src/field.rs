//! Finite fields `F_q`, `q = p^r`, in a polynomial basis over `F_p`.
//!
//! Elements are indexed by the integer `c_0 + c_1 p + ... + c_{r-1} p^{r-1}`
//! of their coefficient vector, so `0` and `1` are the additive and
//! multiplicative identities.

use std::fmt;

use crate::counting::nt;
use crate::error::{Error, Result};

/// Field size up to which log/antilog tables are built.
const LOG_TABLE_LIMIT: u64 = 1 << 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FieldElement(pub u64);

impl FieldElement {
    pub fn index(self) -> u64 {
        self.0
    }
}

#[derive(Clone)]
pub struct FiniteField {
    p: u64,
    r: u32,
    q: u64,
    /// Monic modulus, low coefficient first, length `r + 1`.
    modulus: Vec<u64>,
    generator: FieldElement,
    tables: Option<LogTables>,
}

#[derive(Clone)]
struct LogTables {
    exp: Vec<u64>,
    log: Vec<u64>,
}

impl fmt::Debug for FiniteField {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FiniteField")
            .field("p", &self.p)
            .field("r", &self.r)
            .field("modulus", &self.modulus)
            .field("generator", &self.generator)
            .finish()
    }
}

impl PartialEq for FiniteField {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.modulus == other.modulus
    }
}

impl Eq for FiniteField {}

impl FiniteField {
    /// Builds `F_{p^r}` with the least monic irreducible modulus of degree `r`
    /// (coefficient vectors compared from the top coefficient down) and the
    /// least primitive element as generator.
    pub fn new(p: u64, r: u32, cap: u64) -> Result<Self> {
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if r == 0 {
            return Err(Error::UnsupportedCombination(
                "extension degree must be at least 1".into(),
            ));
        }
        let q = p
            .checked_pow(r)
            .filter(|&q| q <= cap)
            .ok_or_else(|| Error::TooLarge {
                what: format!("F_{p}^{r}"),
                size: (p as u128).saturating_pow(r),
                cap,
            })?;
        let modulus = least_irreducible(p, r as usize);
        let mut field = FiniteField {
            p,
            r,
            q,
            modulus,
            generator: FieldElement(1),
            tables: None,
        };
        field.generator = field.find_generator();
        if q <= LOG_TABLE_LIMIT {
            field.tables = Some(field.build_tables());
        }
        Ok(field)
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.r
    }

    pub fn order(&self) -> u64 {
        self.q
    }

    pub fn modulus(&self) -> &[u64] {
        &self.modulus
    }

    pub fn generator(&self) -> FieldElement {
        self.generator
    }

    pub fn zero(&self) -> FieldElement {
        FieldElement(0)
    }

    pub fn one(&self) -> FieldElement {
        FieldElement(1)
    }

    pub fn element(&self, index: u64) -> Option<FieldElement> {
        (index < self.q).then_some(FieldElement(index))
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> {
        (0..self.q).map(FieldElement)
    }

    pub fn coeffs(&self, x: FieldElement) -> Vec<u64> {
        let mut v = x.0;
        (0..self.r)
            .map(|_| {
                let c = v % self.p;
                v /= self.p;
                c
            })
            .collect()
    }

    pub fn from_coeffs(&self, coeffs: &[u64]) -> FieldElement {
        debug_assert!(coeffs.len() <= self.r as usize);
        FieldElement(
            coeffs
                .iter()
                .rev()
                .fold(0, |acc, &c| acc * self.p + c % self.p),
        )
    }

    pub fn add(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.r == 1 {
            return FieldElement((a.0 + b.0) % self.p);
        }
        let (mut x, mut y) = (a.0, b.0);
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += ((x % self.p + y % self.p) % self.p) * place;
            x /= self.p;
            y /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    pub fn neg(&self, a: FieldElement) -> FieldElement {
        if self.r == 1 {
            return FieldElement((self.p - a.0) % self.p);
        }
        let mut x = a.0;
        let mut out = 0;
        let mut place = 1;
        for _ in 0..self.r {
            out += ((self.p - x % self.p) % self.p) * place;
            x /= self.p;
            place *= self.p;
        }
        FieldElement(out)
    }

    pub fn sub(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if a.0 == 0 || b.0 == 0 {
            return FieldElement(0);
        }
        match &self.tables {
            Some(t) => {
                let k = (t.log[a.0 as usize] + t.log[b.0 as usize]) % (self.q - 1);
                FieldElement(t.exp[k as usize])
            }
            None => self.mul_poly(a, b),
        }
    }

    fn mul_poly(&self, a: FieldElement, b: FieldElement) -> FieldElement {
        if self.r == 1 {
            return FieldElement(a.0 * b.0 % self.p);
        }
        let prod = poly_mul_mod(&self.coeffs(a), &self.coeffs(b), &self.modulus, self.p);
        self.from_coeffs(&prod)
    }

    pub fn pow(&self, a: FieldElement, mut k: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul(acc, base);
            }
            base = self.mul(base, base);
            k >>= 1;
        }
        acc
    }

    pub fn inv(&self, a: FieldElement) -> Result<FieldElement> {
        if a.0 == 0 {
            return Err(Error::NotAUnit);
        }
        Ok(self.pow(a, self.q - 2))
    }

    /// Multiplicative order of a nonzero element.
    pub fn element_order(&self, a: FieldElement) -> Option<u64> {
        if a.0 == 0 {
            return None;
        }
        let mut order = self.q - 1;
        for (l, _) in nt::factorize(self.q - 1) {
            while order % l == 0 && self.pow(a, order / l) == self.one() {
                order /= l;
            }
        }
        Some(order)
    }

    fn find_generator(&self) -> FieldElement {
        (1..self.q)
            .map(FieldElement)
            .find(|&g| {
                nt::factorize(self.q - 1)
                    .iter()
                    .all(|&(l, _)| self.mul_pow_poly(g, (self.q - 1) / l) != self.one())
            })
            .expect("multiplicative group of a finite field is cyclic")
    }

    fn mul_pow_poly(&self, a: FieldElement, mut k: u64) -> FieldElement {
        let mut base = a;
        let mut acc = self.one();
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_poly(acc, base);
            }
            base = self.mul_poly(base, base);
            k >>= 1;
        }
        acc
    }

    fn build_tables(&self) -> LogTables {
        let n = (self.q - 1) as usize;
        let mut exp = vec![0u64; n];
        let mut log = vec![0u64; self.q as usize];
        let mut x = self.one();
        for (k, slot) in exp.iter_mut().enumerate() {
            *slot = x.0;
            log[x.0 as usize] = k as u64;
            x = self.mul_poly(x, self.generator);
        }
        LogTables { exp, log }
    }
}

fn trim(v: &mut Vec<u64>) {
    while v.len() > 1 && *v.last().unwrap() == 0 {
        v.pop();
    }
}

/// `a * b mod m` over `F_p`, with `m` monic.
pub(crate) fn poly_mul_mod(a: &[u64], b: &[u64], m: &[u64], p: u64) -> Vec<u64> {
    let mut prod = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            prod[i + j] = (prod[i + j] + x * y) % p;
        }
    }
    poly_rem(prod, m, p)
}

/// Remainder of `a` modulo the monic polynomial `m` over `F_p`, padded to `deg m` coefficients.
pub(crate) fn poly_rem(mut a: Vec<u64>, m: &[u64], p: u64) -> Vec<u64> {
    let d = m.len() - 1;
    for top in (d..a.len()).rev() {
        let c = a[top] % p;
        if c == 0 {
            continue;
        }
        for j in 0..=d {
            let idx = top - d + j;
            a[idx] = (a[idx] + (p - c) * m[j]) % p;
        }
    }
    a.resize(d.max(1), 0);
    a
}

/// Remainder for an arbitrary (not necessarily monic) nonzero divisor over `F_p`.
fn poly_rem_general(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    trim(&mut a);
    trim(&mut b);
    let db = b.len() - 1;
    let lead_inv = (1..p).find(|&x| x * b[db] % p == 1).unwrap();
    while a.len() > db && !(a.len() == 1 && a[0] == 0) {
        let top = a.len() - 1;
        let c = a[top] * lead_inv % p;
        for j in 0..=db {
            let idx = top - db + j;
            a[idx] = (a[idx] + (p - c) * b[j] % p) % p;
        }
        a.pop();
        if a.is_empty() {
            a.push(0);
        }
        trim(&mut a);
    }
    a
}

fn is_zero_poly(a: &[u64]) -> bool {
    a.iter().all(|&c| c == 0)
}

/// Trial division by every monic polynomial of degree `1..=r/2`.
pub(crate) fn is_irreducible(f: &[u64], p: u64) -> bool {
    let r = f.len() - 1;
    for d in 1..=r / 2 {
        let count = p.pow(d as u32);
        for t in 0..count {
            let mut g = Vec::with_capacity(d + 1);
            let mut v = t;
            for _ in 0..d {
                g.push(v % p);
                v /= p;
            }
            g.push(1);
            if is_zero_poly(&poly_rem_general(f, &g, p)) {
                return false;
            }
        }
    }
    true
}

/// Least monic irreducible of degree `r` over `F_p`, low coefficient first.
pub(crate) fn least_irreducible(p: u64, r: usize) -> Vec<u64> {
    let count = p.pow(r as u32);
    for t in 0..count {
        let mut f = Vec::with_capacity(r + 1);
        let mut v = t;
        for _ in 0..r {
            f.push(v % p);
            v /= p;
        }
        f.push(1);
        if is_irreducible(&f, p) {
            return f;
        }
    }
    unreachable!("irreducible polynomials exist in every degree")
}

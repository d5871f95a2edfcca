//! Commutative finite chain rings: `Z/p^e`, Galois rings `GR(p^e, r)` and
//! truncated polynomial rings `F_q[u]/(u^e)`.
//!
//! Every ring is a local ring with maximal ideal `γR` and residue field
//! `F_q`. Elements are small integer handles (`RingElement`) interpreted by
//! the owning `ChainRing`; the canonical public view of an element is its
//! γ-adic coordinate vector `(a_0, ..., a_{e-1})` with digits taken from the
//! representative set `V` and written as residue-field indices.
//!
//! Internal encodings, all with `0` and `1` as the ring identities:
//!
//! * `Z/p^e`: the residue itself.
//! * `GR(p^e, r)`: `c_0 + c_1 m + ... + c_{r-1} m^{r-1}` with `m = p^e`, the
//!   coefficients of a polynomial in `x` reduced modulo a monic lift of the
//!   residue field modulus.
//! * `F_q[u]/(u^e)`: `a_0 + a_1 q + ... + a_{e-1} q^{e-1}` with `a_k` field indices.

use std::fmt;
use std::sync::{Arc, OnceLock};

use crate::counting::nt;
use crate::error::{Error, Result};
use crate::field::{FieldElement, FiniteField};

/// Rings at most this large get precomputed addition and multiplication tables.
const TABLE_LIMIT: u64 = 256;

/// A commutative ring with identity, as far as determinants need one.
pub trait CommRing {
    type Elem: Clone + PartialEq + fmt::Debug;

    fn zero(&self) -> Self::Elem;
    fn one(&self) -> Self::Elem;
    fn add(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn mul(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem;
    fn neg(&self, a: &Self::Elem) -> Self::Elem;

    fn sub(&self, a: &Self::Elem, b: &Self::Elem) -> Self::Elem {
        self.add(a, &self.neg(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Family {
    IntegerModPE,
    GaloisRing,
    PolyU,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RingElement(pub u64);

impl RingElement {
    pub fn index(self) -> u64 {
        self.0
    }
}

/// `x = γ^s · unit_part`; the unit part is absent exactly for `x = 0` (`s = e`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValUnitDecomposition {
    pub s: u32,
    pub unit_part: Option<RingElement>,
}

#[derive(Clone)]
pub struct ChainRing(Arc<Inner>);

struct Inner {
    family: Family,
    p: u64,
    e: u32,
    r: u32,
    q: u64,
    size: u64,
    /// `p^e`, the coefficient modulus for `Z/p^e` and Galois rings.
    pe: u64,
    field: FiniteField,
    /// Monic modulus of a Galois ring over `Z/p^e`, low coefficient first.
    gr_modulus: Vec<u64>,
    gamma: RingElement,
    reps: Vec<RingElement>,
    teich: Vec<RingElement>,
    tables: Option<Tables>,
    order: OnceLock<Vec<RingElement>>,
}

struct Tables {
    add: Vec<u32>,
    mul: Vec<u32>,
    neg: Vec<u32>,
}

impl fmt::Debug for ChainRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "ChainRing({})", self.name())
    }
}

impl fmt::Display for ChainRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl PartialEq for ChainRing {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.family == other.0.family
                && self.0.p == other.0.p
                && self.0.e == other.0.e
                && self.0.r == other.0.r)
    }
}

impl Eq for ChainRing {}

impl ChainRing {
    pub fn new(family: Family, p: u64, e: u32, r: u32, cap: u64) -> Result<Self> {
        if !nt::is_prime(p) {
            return Err(Error::NotPrime(p));
        }
        if e == 0 || r == 0 {
            return Err(Error::UnsupportedCombination(
                "nilpotency index and residue degree must be at least 1".into(),
            ));
        }
        if family == Family::IntegerModPE && r != 1 {
            return Err(Error::UnsupportedCombination(format!(
                "Z/p^e has residue degree 1, got r = {r}"
            )));
        }
        let too_large = || Error::TooLarge {
            what: format!("ring with q = {p}^{r}, e = {e}"),
            size: (p as u128)
                .checked_pow(r)
                .and_then(|q| q.checked_pow(e))
                .unwrap_or(u128::MAX),
            cap,
        };
        let q = p.checked_pow(r).ok_or_else(too_large)?;
        let size = q.checked_pow(e).filter(|&s| s <= cap).ok_or_else(too_large)?;
        let pe = p.pow(e);
        let field = FiniteField::new(p, r, cap)?;
        let gr_modulus = match family {
            Family::GaloisRing => field.modulus().to_vec(),
            _ => Vec::new(),
        };
        let gamma = match family {
            Family::IntegerModPE | Family::GaloisRing => RingElement(p % pe),
            Family::PolyU => RingElement(if e >= 2 { q } else { 0 }),
        };
        let mut inner = Inner {
            family,
            p,
            e,
            r,
            q,
            size,
            pe,
            field,
            gr_modulus,
            gamma,
            reps: Vec::new(),
            teich: Vec::new(),
            tables: None,
            order: OnceLock::new(),
        };
        inner.teich = (0..q).map(|t| inner.teichmuller_lift(t)).collect();
        inner.reps = match family {
            Family::GaloisRing => inner.teich.clone(),
            Family::IntegerModPE | Family::PolyU => (0..q).map(RingElement).collect(),
        };
        if size <= TABLE_LIMIT {
            inner.tables = Some(inner.build_tables());
        }
        Ok(ChainRing(Arc::new(inner)))
    }

    pub fn integers_mod(p: u64, e: u32, cap: u64) -> Result<Self> {
        Self::new(Family::IntegerModPE, p, e, 1, cap)
    }

    pub fn galois(p: u64, e: u32, r: u32, cap: u64) -> Result<Self> {
        Self::new(Family::GaloisRing, p, e, r, cap)
    }

    pub fn poly_u(p: u64, r: u32, e: u32, cap: u64) -> Result<Self> {
        Self::new(Family::PolyU, p, e, r, cap)
    }

    pub fn family(&self) -> Family {
        self.0.family
    }

    pub fn p(&self) -> u64 {
        self.0.p
    }

    pub fn e(&self) -> u32 {
        self.0.e
    }

    pub fn r(&self) -> u32 {
        self.0.r
    }

    pub fn q(&self) -> u64 {
        self.0.q
    }

    pub fn size(&self) -> u64 {
        self.0.size
    }

    pub fn field(&self) -> &FiniteField {
        &self.0.field
    }

    pub fn gamma(&self) -> RingElement {
        self.0.gamma
    }

    /// The representative set `V`, indexed by residue-field element.
    pub fn reps(&self) -> &[RingElement] {
        &self.0.reps
    }

    /// The Teichmüller representative of a residue-field element.
    pub fn teichmuller(&self, t: FieldElement) -> RingElement {
        self.0.teich[t.0 as usize]
    }

    /// Canonical textual name in the ring-spec grammar.
    pub fn name(&self) -> String {
        let i = &self.0;
        match i.family {
            Family::IntegerModPE => format!("Z/{}", i.pe),
            Family::GaloisRing => format!("GR({},{})", i.pe, i.r),
            Family::PolyU => format!("F{}[u]/u^{}", i.q, i.e),
        }
    }

    pub fn zero(&self) -> RingElement {
        RingElement(0)
    }

    pub fn one(&self) -> RingElement {
        RingElement(1)
    }

    pub fn element(&self, index: u64) -> Option<RingElement> {
        (index < self.0.size).then_some(RingElement(index))
    }

    /// Embeds an integer via `Z -> R`.
    pub fn from_int(&self, k: i64) -> RingElement {
        let m = self.0.p as i64;
        let pe = self.0.pe as i64;
        // the characteristic of every family here is p^e (Z/p^e, GR) or p (PolyU)
        let modulus = match self.0.family {
            Family::PolyU => m,
            _ => pe,
        };
        RingElement(k.rem_euclid(modulus) as u64)
    }

    pub fn add(&self, a: RingElement, b: RingElement) -> RingElement {
        match &self.0.tables {
            Some(t) => RingElement(t.add[self.slot(a, b)] as u64),
            None => self.0.add_raw(a, b),
        }
    }

    pub fn neg(&self, a: RingElement) -> RingElement {
        match &self.0.tables {
            Some(t) => RingElement(t.neg[a.0 as usize] as u64),
            None => self.0.neg_raw(a),
        }
    }

    pub fn sub(&self, a: RingElement, b: RingElement) -> RingElement {
        self.add(a, self.neg(b))
    }

    pub fn mul(&self, a: RingElement, b: RingElement) -> RingElement {
        match &self.0.tables {
            Some(t) => RingElement(t.mul[self.slot(a, b)] as u64),
            None => self.0.mul_raw(a, b),
        }
    }

    #[inline]
    fn slot(&self, a: RingElement, b: RingElement) -> usize {
        (a.0 * self.0.size + b.0) as usize
    }

    pub fn pow(&self, a: RingElement, mut k: u64) -> RingElement {
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

    /// The image of `x` in the residue field `R/γR`.
    pub fn residue(&self, x: RingElement) -> FieldElement {
        self.0.residue(x)
    }

    pub fn is_unit(&self, x: RingElement) -> bool {
        self.residue(x).0 != 0
    }

    /// Inverse of a unit by Newton iteration `y <- y(2 - xy)` from a lift of
    /// the residue-field inverse; each step doubles the γ-adic precision.
    pub fn inv(&self, x: RingElement) -> Result<RingElement> {
        let t = self.residue(x);
        if t.0 == 0 {
            return Err(Error::NotAUnit);
        }
        let field = self.field();
        let mut y = self.0.reps[field.inv(t)?.0 as usize];
        let two = self.from_int(2);
        for _ in 0..=self.0.e.ilog2() + 1 {
            let xy = self.mul(x, y);
            if xy == self.one() {
                return Ok(y);
            }
            y = self.mul(y, self.sub(two, xy));
        }
        debug_assert_eq!(self.mul(x, y), self.one());
        Ok(y)
    }

    /// γ-adic digits `(a_0, ..., a_{e-1})` of `x = Σ a_i γ^i`, each digit given
    /// by the residue-field index of its representative in `V`.
    pub fn coords(&self, x: RingElement) -> Vec<u64> {
        let mut cur = x;
        let mut out = Vec::with_capacity(self.0.e as usize);
        for _ in 0..self.0.e {
            let t = self.residue(cur);
            out.push(t.0);
            let rest = self.sub(cur, self.0.reps[t.0 as usize]);
            cur = self.0.div_gamma(rest);
        }
        out
    }

    pub fn from_coords(&self, coords: &[u64]) -> Result<RingElement> {
        if coords.len() != self.0.e as usize {
            return Err(Error::SizeMismatch {
                left: coords.len(),
                right: self.0.e as usize,
            });
        }
        if let Some(&bad) = coords.iter().find(|&&c| c >= self.0.q) {
            return Err(Error::InvalidQuery(format!(
                "digit {bad} is not a residue-field index below {}",
                self.0.q
            )));
        }
        let mut acc = self.zero();
        for &c in coords.iter().rev() {
            acc = self.add(self.mul(acc, self.gamma()), self.0.reps[c as usize]);
        }
        Ok(acc)
    }

    pub fn format_element(&self, x: RingElement) -> String {
        format_coords(&self.coords(x))
    }

    pub fn valuation(&self, x: RingElement) -> ValUnitDecomposition {
        let coords = self.coords(x);
        match coords.iter().position(|&c| c != 0) {
            None => ValUnitDecomposition {
                s: self.0.e,
                unit_part: None,
            },
            Some(s) => {
                let mut b = x;
                for _ in 0..s {
                    b = self.0.div_gamma(b);
                }
                ValUnitDecomposition {
                    s: s as u32,
                    unit_part: Some(b),
                }
            }
        }
    }

    /// Elements in lexicographic order of their γ-adic coordinates.
    pub fn enumeration_order(&self) -> &[RingElement] {
        self.0.order.get_or_init(|| {
            let mut keyed: Vec<(Vec<u64>, RingElement)> = (0..self.0.size)
                .map(|i| (self.coords(RingElement(i)), RingElement(i)))
                .collect();
            keyed.sort();
            keyed.into_iter().map(|(_, x)| x).collect()
        })
    }

    pub fn elements(&self, cap: u64) -> Result<impl Iterator<Item = RingElement> + '_> {
        self.check_enumerable(cap)?;
        Ok(self.enumeration_order().iter().copied())
    }

    pub fn units(&self, cap: u64) -> Result<impl Iterator<Item = RingElement> + '_> {
        Ok(self.elements(cap)?.filter(|&x| self.is_unit(x)))
    }

    fn check_enumerable(&self, cap: u64) -> Result<()> {
        if self.0.size > cap {
            return Err(Error::TooLarge {
                what: format!("element stream of {}", self.name()),
                size: self.0.size as u128,
                cap,
            });
        }
        Ok(())
    }

    /// `R/γ^i R` of the same family and residue field, with the projection.
    pub fn quotient(&self, i: u32) -> Result<(ChainRing, Projection)> {
        if i == 0 || i > self.0.e {
            return Err(Error::BadIndex {
                index: i as usize,
                bound: self.0.e as usize,
            });
        }
        let target = if i == self.0.e {
            self.clone()
        } else {
            ChainRing::new(self.0.family, self.0.p, i, self.0.r, self.0.size)?
        };
        let proj = Projection {
            source: self.clone(),
            target: target.clone(),
        };
        Ok((target, proj))
    }

    /// A primitive `n`-th root of unity from the Teichmüller set.
    pub fn root_of_unity(&self, n: u64) -> Result<RingElement> {
        let q1 = self.0.q - 1;
        if n == 0 || q1 % n != 0 {
            return Err(Error::NoRoot { n, q_minus_one: q1 });
        }
        let field = self.field();
        let zeta = field.pow(field.generator(), q1 / n);
        Ok(self.teichmuller(zeta))
    }

    /// Multiplicative order of a unit, by brute force up to `|U(R)|`.
    pub fn multiplicative_order(&self, x: RingElement) -> Option<u64> {
        if !self.is_unit(x) {
            return None;
        }
        let bound = (self.0.q - 1) * self.0.q.pow(self.0.e - 1);
        let mut acc = x;
        for k in 1..=bound {
            if acc == self.one() {
                return Some(k);
            }
            acc = self.mul(acc, x);
        }
        None
    }
}

impl CommRing for ChainRing {
    type Elem = RingElement;

    fn zero(&self) -> RingElement {
        ChainRing::zero(self)
    }

    fn one(&self) -> RingElement {
        ChainRing::one(self)
    }

    fn add(&self, a: &RingElement, b: &RingElement) -> RingElement {
        ChainRing::add(self, *a, *b)
    }

    fn mul(&self, a: &RingElement, b: &RingElement) -> RingElement {
        ChainRing::mul(self, *a, *b)
    }

    fn neg(&self, a: &RingElement) -> RingElement {
        ChainRing::neg(self, *a)
    }
}

/// The surjection `R -> R/γ^i R`, truncating γ-adic expansions.
#[derive(Debug, Clone)]
pub struct Projection {
    source: ChainRing,
    target: ChainRing,
}

impl Projection {
    pub fn source(&self) -> &ChainRing {
        &self.source
    }

    pub fn target(&self) -> &ChainRing {
        &self.target
    }

    pub fn apply(&self, x: RingElement) -> RingElement {
        let s = &self.source.0;
        let t = &self.target.0;
        RingElement(match s.family {
            Family::IntegerModPE => x.0 % t.pe,
            Family::PolyU => x.0 % t.size,
            Family::GaloisRing => {
                let coeffs = s.gr_coeffs(x);
                coeffs.iter().rev().fold(0, |acc, &c| acc * t.pe + c % t.pe)
            }
        })
    }
}

pub fn format_coords(coords: &[u64]) -> String {
    let parts: Vec<String> = coords.iter().map(u64::to_string).collect();
    format!("[{}]", parts.join(","))
}

impl Inner {
    fn gr_coeffs(&self, x: RingElement) -> Vec<u64> {
        let mut v = x.0;
        (0..self.r)
            .map(|_| {
                let c = v % self.pe;
                v /= self.pe;
                c
            })
            .collect()
    }

    fn gr_encode(&self, coeffs: &[u64]) -> RingElement {
        RingElement(coeffs.iter().rev().fold(0, |acc, &c| acc * self.pe + c))
    }

    fn u_coeffs(&self, x: RingElement) -> Vec<FieldElement> {
        let mut v = x.0;
        (0..self.e)
            .map(|_| {
                let c = v % self.q;
                v /= self.q;
                FieldElement(c)
            })
            .collect()
    }

    fn u_encode(&self, coeffs: &[FieldElement]) -> RingElement {
        RingElement(coeffs.iter().rev().fold(0, |acc, c| acc * self.q + c.0))
    }

    fn add_raw(&self, a: RingElement, b: RingElement) -> RingElement {
        match self.family {
            Family::IntegerModPE => RingElement((a.0 + b.0) % self.pe),
            Family::GaloisRing => {
                let (x, y) = (self.gr_coeffs(a), self.gr_coeffs(b));
                let z: Vec<u64> = x.iter().zip(&y).map(|(c, d)| (c + d) % self.pe).collect();
                self.gr_encode(&z)
            }
            Family::PolyU => {
                let (x, y) = (self.u_coeffs(a), self.u_coeffs(b));
                let z: Vec<FieldElement> =
                    x.iter().zip(&y).map(|(&c, &d)| self.field.add(c, d)).collect();
                self.u_encode(&z)
            }
        }
    }

    fn neg_raw(&self, a: RingElement) -> RingElement {
        match self.family {
            Family::IntegerModPE => RingElement((self.pe - a.0) % self.pe),
            Family::GaloisRing => {
                let z: Vec<u64> = self
                    .gr_coeffs(a)
                    .iter()
                    .map(|c| (self.pe - c) % self.pe)
                    .collect();
                self.gr_encode(&z)
            }
            Family::PolyU => {
                let z: Vec<FieldElement> =
                    self.u_coeffs(a).iter().map(|&c| self.field.neg(c)).collect();
                self.u_encode(&z)
            }
        }
    }

    fn mul_raw(&self, a: RingElement, b: RingElement) -> RingElement {
        match self.family {
            Family::IntegerModPE => {
                RingElement((a.0 as u128 * b.0 as u128 % self.pe as u128) as u64)
            }
            Family::GaloisRing => {
                let (x, y) = (self.gr_coeffs(a), self.gr_coeffs(b));
                let m = self.pe as u128;
                let r = self.r as usize;
                let mut prod = vec![0u128; 2 * r - 1];
                for (i, &c) in x.iter().enumerate() {
                    for (j, &d) in y.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + c as u128 * d as u128) % m;
                    }
                }
                for top in (r..prod.len()).rev() {
                    let c = prod[top];
                    if c == 0 {
                        continue;
                    }
                    // x^r = -(f_0 + ... + f_{r-1} x^{r-1})
                    for j in 0..r {
                        let idx = top - r + j;
                        let f = self.gr_modulus[j] as u128;
                        prod[idx] = (prod[idx] + (m - c) * f % m) % m;
                    }
                    prod[top] = 0;
                }
                let z: Vec<u64> = prod[..r].iter().map(|&c| c as u64).collect();
                self.gr_encode(&z)
            }
            Family::PolyU => {
                let (x, y) = (self.u_coeffs(a), self.u_coeffs(b));
                let e = self.e as usize;
                let mut z = vec![FieldElement(0); e];
                for (i, &c) in x.iter().enumerate() {
                    if c.0 == 0 {
                        continue;
                    }
                    for (j, &d) in y.iter().take(e - i).enumerate() {
                        z[i + j] = self.field.add(z[i + j], self.field.mul(c, d));
                    }
                }
                self.u_encode(&z)
            }
        }
    }

    fn pow_raw(&self, a: RingElement, mut k: u64) -> RingElement {
        let mut base = a;
        let mut acc = RingElement(1);
        while k > 0 {
            if k & 1 == 1 {
                acc = self.mul_raw(acc, base);
            }
            base = self.mul_raw(base, base);
            k >>= 1;
        }
        acc
    }

    fn residue(&self, x: RingElement) -> FieldElement {
        match self.family {
            Family::IntegerModPE => FieldElement(x.0 % self.p),
            Family::GaloisRing => {
                let c: Vec<u64> = self.gr_coeffs(x).iter().map(|c| c % self.p).collect();
                self.field.from_coeffs(&c)
            }
            Family::PolyU => FieldElement(x.0 % self.q),
        }
    }

    /// Exact division by γ of an element of `γR`, choosing the quotient whose
    /// top γ-adic digit is zero.
    fn div_gamma(&self, x: RingElement) -> RingElement {
        match self.family {
            Family::IntegerModPE => RingElement(x.0 / self.p),
            Family::PolyU => RingElement(x.0 / self.q),
            Family::GaloisRing => {
                let z: Vec<u64> = self.gr_coeffs(x).iter().map(|c| c / self.p).collect();
                self.gr_encode(&z)
            }
        }
    }

    /// Naive lift of a residue-field element, then `x -> x^q` until fixed.
    fn teichmuller_lift(&self, t: u64) -> RingElement {
        let lift = match self.family {
            Family::IntegerModPE | Family::PolyU => RingElement(t),
            Family::GaloisRing => {
                let c = self.field.coeffs(FieldElement(t));
                self.gr_encode(&c)
            }
        };
        let mut x = lift;
        for _ in 0..=self.e {
            let next = self.pow_raw(x, self.q);
            if next == x {
                return x;
            }
            x = next;
        }
        unreachable!("Teichmüller iteration stabilizes within e steps")
    }

    fn build_tables(&self) -> Tables {
        let n = self.size;
        let mut add = Vec::with_capacity((n * n) as usize);
        let mut mul = Vec::with_capacity((n * n) as usize);
        for a in 0..n {
            for b in 0..n {
                add.push(self.add_raw(RingElement(a), RingElement(b)).0 as u32);
                mul.push(self.mul_raw(RingElement(a), RingElement(b)).0 as u32);
            }
        }
        let neg = (0..n).map(|a| self.neg_raw(RingElement(a)).0 as u32).collect();
        Tables { add, mul, neg }
    }
}

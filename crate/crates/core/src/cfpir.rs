//! Finite principal ideal rings as products of chain rings.
//!
//! Elements are kept as tuples of factor elements; nothing is recombined
//! through CRT, so each projection is just a component lookup.

use std::fmt;

use num_bigint::BigUint;
use num_traits::One;

use crate::census::{enumerate_tally, CensusOptions, DetTally};
use crate::counting::{self, CountQuery, CountResult, DetClass, Method, Shape};
use crate::error::{Error, Result};
use crate::matrix::det_entries;
use crate::report::{ProductCheck, ReportRow, VerificationReport};
use crate::ring::{ChainRing, CommRing, RingElement};

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ProductElement(pub Vec<RingElement>);

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProductRing {
    factors: Vec<ChainRing>,
}

impl fmt::Display for ProductRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl ProductRing {
    pub fn new(factors: Vec<ChainRing>) -> Result<Self> {
        if factors.is_empty() {
            return Err(Error::InvalidQuery("a product needs at least one factor".into()));
        }
        Ok(ProductRing { factors })
    }

    pub fn factors(&self) -> &[ChainRing] {
        &self.factors
    }

    pub fn m(&self) -> usize {
        self.factors.len()
    }

    pub fn name(&self) -> String {
        let names: Vec<String> = self.factors.iter().map(ChainRing::name).collect();
        names.join(" x ")
    }

    /// `|R_1| ... |R_m|`, saturating.
    pub fn size(&self) -> u64 {
        self.factors
            .iter()
            .fold(1u64, |acc, r| acc.saturating_mul(r.size()))
    }

    fn joined<T: ToString>(&self, f: impl Fn(&ChainRing) -> T) -> String {
        let parts: Vec<String> = self.factors.iter().map(|r| f(r).to_string()).collect();
        parts.join("x")
    }

    /// Residue field sizes joined by `x`, e.g. `4x2`.
    pub fn q_label(&self) -> String {
        self.joined(ChainRing::q)
    }

    pub fn e_label(&self) -> String {
        self.joined(ChainRing::e)
    }

    pub fn check(&self, x: &ProductElement) -> Result<()> {
        if x.0.len() != self.m() {
            return Err(Error::SizeMismatch {
                left: x.0.len(),
                right: self.m(),
            });
        }
        for (r, c) in self.factors.iter().zip(&x.0) {
            if c.0 >= r.size() {
                return Err(Error::RingMismatch);
            }
        }
        Ok(())
    }

    /// `φ_i`, 1-based.
    pub fn project(&self, x: &ProductElement, i: usize) -> Result<RingElement> {
        if i == 0 || i > self.m() {
            return Err(Error::BadIndex {
                index: i,
                bound: self.m(),
            });
        }
        self.check(x)?;
        Ok(x.0[i - 1])
    }

    pub fn is_unit(&self, x: &ProductElement) -> bool {
        self.factors.iter().zip(&x.0).all(|(r, &c)| r.is_unit(c))
    }

    pub fn format_element(&self, x: &ProductElement) -> String {
        let parts: Vec<String> = self
            .factors
            .iter()
            .zip(&x.0)
            .map(|(r, &c)| r.format_element(c))
            .collect();
        parts.join(" x ")
    }

    /// Every element, lexicographic in the factors' enumeration orders.
    pub fn elements(&self, cap: u64) -> Result<Vec<ProductElement>> {
        let size = self.size();
        if size > cap {
            return Err(Error::TooLarge {
                what: format!("element list of {}", self.name()),
                size: size as u128,
                cap,
            });
        }
        let mut out = vec![ProductElement(Vec::new())];
        for r in &self.factors {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    r.enumeration_order().iter().map(move |&c| {
                        let mut v = prefix.0.clone();
                        v.push(c);
                        ProductElement(v)
                    })
                })
                .collect();
        }
        Ok(out)
    }

    /// Dense index used by product tallies.
    fn key(&self, x: &ProductElement) -> usize {
        self.factors
            .iter()
            .zip(&x.0)
            .fold(0usize, |acc, (r, c)| acc * r.size() as usize + c.0 as usize)
    }
}

impl CommRing for ProductRing {
    type Elem = ProductElement;

    fn zero(&self) -> ProductElement {
        ProductElement(self.factors.iter().map(ChainRing::zero).collect())
    }

    fn one(&self) -> ProductElement {
        ProductElement(self.factors.iter().map(ChainRing::one).collect())
    }

    fn add(&self, a: &ProductElement, b: &ProductElement) -> ProductElement {
        ProductElement(
            self.factors
                .iter()
                .zip(a.0.iter().zip(&b.0))
                .map(|(r, (&x, &y))| r.add(x, y))
                .collect(),
        )
    }

    fn mul(&self, a: &ProductElement, b: &ProductElement) -> ProductElement {
        ProductElement(
            self.factors
                .iter()
                .zip(a.0.iter().zip(&b.0))
                .map(|(r, (&x, &y))| r.mul(x, y))
                .collect(),
        )
    }

    fn neg(&self, a: &ProductElement) -> ProductElement {
        ProductElement(
            self.factors
                .iter()
                .zip(&a.0)
                .map(|(r, &x)| r.neg(x))
                .collect(),
        )
    }
}

fn class_of(ring: &ChainRing, x: RingElement) -> DetClass {
    DetClass::from_valuation(ring.valuation(x).s, ring.e())
}

/// Class tuple of a product element.
pub fn classes_of(ring: &ProductRing, x: &ProductElement) -> Result<Vec<DetClass>> {
    ring.check(x)?;
    Ok(ring
        .factors
        .iter()
        .zip(&x.0)
        .map(|(r, &c)| class_of(r, c))
        .collect())
}

fn factor_queries(ring: &ProductRing, n: u32, classes: &[DetClass]) -> Result<Vec<CountQuery>> {
    if classes.len() != ring.m() {
        return Err(Error::SizeMismatch {
            left: classes.len(),
            right: ring.m(),
        });
    }
    ring.factors
        .iter()
        .zip(classes)
        .map(|(r, &class)| CountQuery::new(r.q(), r.e(), n, class))
        .collect()
}

/// `d_n(R_1 x ... x R_m, (r_1, ..., r_m)) = Π d_n(R_i, r_i)`, by class.
pub fn d_count_product_classes(ring: &ProductRing, n: u32, classes: &[DetClass]) -> Result<BigUint> {
    Ok(factor_queries(ring, n, classes)?
        .iter()
        .map(|q| counting::d_count(q).value.expect("diagonal counts are always known"))
        .product())
}

pub fn d_count_product(ring: &ProductRing, n: u32, r: &ProductElement) -> Result<BigUint> {
    d_count_product_classes(ring, n, &classes_of(ring, r)?)
}

/// Product of the factor circulant counts; open as soon as one factor is,
/// with that factor named in the reason.
pub fn c_count_product_classes(
    ring: &ProductRing,
    n: u32,
    classes: &[DetClass],
) -> Result<CountResult> {
    let mut value = BigUint::one();
    for (i, query) in factor_queries(ring, n, classes)?.iter().enumerate() {
        let part = counting::c_count(query);
        match part.value {
            Some(v) => value *= v,
            None => {
                return Ok(CountResult {
                    value: None,
                    method: Method::Formula,
                    reason: Some(format!(
                        "factor {} ({}): {}",
                        i + 1,
                        ring.factors[i].name(),
                        part.reason.unwrap_or_default()
                    )),
                })
            }
        }
    }
    Ok(CountResult {
        value: Some(value),
        method: Method::Formula,
        reason: None,
    })
}

pub fn c_count_product(ring: &ProductRing, n: u32, r: &ProductElement) -> Result<CountResult> {
    c_count_product_classes(ring, n, &classes_of(ring, r)?)
}

/// Determinant tally of a product ring, enumerated directly with
/// component-wise arithmetic.
#[derive(Debug, Clone)]
pub struct ProductTally {
    ring: ProductRing,
    n: u32,
    shape: Shape,
    counts: Vec<u64>,
}

impl ProductTally {
    pub fn ring(&self) -> &ProductRing {
        &self.ring
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn count(&self, x: &ProductElement) -> u64 {
        self.counts[self.ring.key(x)]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }
}

pub fn enumerate_product_tally(
    ring: &ProductRing,
    n: u32,
    shape: Shape,
    opts: &CensusOptions,
) -> Result<ProductTally> {
    if n == 0 {
        return Err(Error::InvalidQuery("dimension must be at least 1".into()));
    }
    let size = ring.size();
    crate::limits::bounded_pow(size, n, opts.cap).ok_or_else(|| Error::TooLarge {
        what: format!("{shape} census over {} with n = {n}", ring.name()),
        size: (size as u128).checked_pow(n).unwrap_or(u128::MAX),
        cap: opts.cap,
    })?;
    let elems = ring.elements(opts.cap)?;
    let nu = n as usize;
    let mut counts = vec![0u64; size as usize];
    let mut digits = vec![0usize; nu];
    let mut scratch = Vec::new();
    loop {
        let row: Vec<&ProductElement> = digits.iter().map(|&d| &elems[d]).collect();
        let det = match shape {
            Shape::Diagonal => row.iter().fold(ring.one(), |acc, x| ring.mul(&acc, x)),
            Shape::Circulant => {
                let entries: Vec<ProductElement> = (0..nu * nu)
                    .map(|k| row[(k % nu + nu - k / nu) % nu].clone())
                    .collect();
                det_entries(ring, nu, &entries, &mut scratch)
            }
        };
        counts[ring.key(&det)] += 1;
        let mut pos = nu;
        loop {
            if pos == 0 {
                return Ok(ProductTally {
                    ring: ring.clone(),
                    n,
                    shape,
                    counts,
                });
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < elems.len() {
                break;
            }
            digits[pos] = 0;
        }
    }
}

fn class_label(classes: &[DetClass]) -> String {
    let parts: Vec<String> = classes.iter().map(DetClass::to_string).collect();
    parts.join(" x ")
}

/// Compares the direct product tally with the product of factor tallies
/// element by element, and each class tuple with the product formula.
pub fn product_verify(
    ring: &ProductRing,
    n: u32,
    shape: Shape,
    opts: &CensusOptions,
) -> Result<VerificationReport> {
    let direct = enumerate_product_tally(ring, n, shape, opts)?;
    let factor_tallies: Vec<DetTally> = ring
        .factors
        .iter()
        .map(|r| enumerate_tally(r, n, shape, opts))
        .collect::<Result<_>>()?;
    let elems = ring.elements(opts.cap)?;

    let mut first_mismatch = None;
    for x in &elems {
        let expected: u128 = factor_tallies
            .iter()
            .zip(&x.0)
            .map(|(t, &c)| t.count(c) as u128)
            .product();
        if direct.count(x) as u128 != expected && first_mismatch.is_none() {
            first_mismatch = Some(format!(
                "count({}) = {} but factor product = {expected}",
                ring.format_element(x),
                direct.count(x)
            ));
        }
    }
    let check = ProductCheck {
        ring: ring.name(),
        n,
        shape,
        elementwise_match: first_mismatch.is_none(),
        detail: first_mismatch
            .unwrap_or_else(|| format!("{} elements agree", elems.len())),
    };

    // class tuples in lexicographic order of factor classes
    let mut tuples: Vec<Vec<DetClass>> = vec![Vec::new()];
    for r in &ring.factors {
        tuples = tuples
            .into_iter()
            .flat_map(|t| {
                DetClass::all(r.e()).into_iter().map(move |c| {
                    let mut t = t.clone();
                    t.push(c);
                    t
                })
            })
            .collect();
    }
    let mut rows = Vec::with_capacity(tuples.len());
    for classes in tuples {
        let formula = match shape {
            Shape::Diagonal => Some(d_count_product_classes(ring, n, &classes)?),
            Shape::Circulant => c_count_product_classes(ring, n, &classes)?.value,
        };
        let members: Vec<&ProductElement> = elems
            .iter()
            .filter(|x| classes_of(ring, x).is_ok_and(|c| c == classes))
            .collect();
        let first = direct.count(members[0]);
        let constant = members.iter().all(|x| direct.count(x) == first);
        let oracle = Some(BigUint::from(first));
        let matched = constant && matches!((&formula, &oracle), (Some(f), Some(o)) if f == o);
        rows.push(ReportRow {
            ring: ring.name(),
            q: ring.q_label(),
            e: ring.e_label(),
            n,
            shape,
            class: class_label(&classes),
            applicable: formula.is_some(),
            formula,
            oracle,
            matched,
        });
    }
    Ok(VerificationReport {
        rows,
        skipped: Vec::new(),
        product_checks: vec![check],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: u64 = 10_000_000;

    fn z(p: u64, e: u32) -> ChainRing {
        ChainRing::integers_mod(p, e, CAP).unwrap()
    }

    fn f2u2() -> ChainRing {
        ChainRing::poly_u(2, 1, 2, CAP).unwrap()
    }

    fn pe(v: &[u64]) -> ProductElement {
        ProductElement(v.iter().map(|&x| RingElement(x)).collect())
    }

    #[test]
    fn projections() {
        let r = ProductRing::new(vec![z(2, 2), f2u2()]).unwrap();
        let u = f2u2().from_coords(&[0, 1]).unwrap();
        let one_plus_u = f2u2().from_coords(&[1, 1]).unwrap();
        let x = ProductElement(vec![RingElement(1), u]);
        assert_eq!(r.project(&x, 1).unwrap(), RingElement(1));
        assert_eq!(r.project(&r.zero(), 2).unwrap(), f2u2().zero());
        let y = ProductElement(vec![RingElement(3), one_plus_u]);
        assert_eq!(r.project(&y, 2).unwrap(), one_plus_u);
        assert!(matches!(r.project(&y, 3), Err(Error::BadIndex { .. })));
        assert!(matches!(r.project(&y, 0), Err(Error::BadIndex { .. })));
    }

    #[test]
    fn product_counts() {
        let r = ProductRing::new(vec![z(2, 2), z(3, 1)]).unwrap();
        assert_eq!(d_count_product(&r, 2, &pe(&[1, 1])).unwrap(), BigUint::from(4u32));
        assert_eq!(d_count_product(&r, 2, &pe(&[0, 0])).unwrap(), BigUint::from(40u32));
        let single = ProductRing::new(vec![z(2, 3)]).unwrap();
        assert_eq!(d_count_product(&single, 2, &pe(&[2])).unwrap(), BigUint::from(8u32));
    }

    #[test]
    fn circulant_product_names_open_factor() {
        let r = ProductRing::new(vec![z(3, 1), z(2, 2)]).unwrap();
        let res = c_count_product(&r, 2, &pe(&[1, 1])).unwrap();
        assert!(!res.applicable());
        assert!(res.reason.unwrap().starts_with("factor 2 (Z/4)"));
        let ok = ProductRing::new(vec![z(3, 1), z(5, 1)]).unwrap();
        assert!(c_count_product(&ok, 2, &pe(&[1, 1])).unwrap().applicable());
    }

    #[test]
    fn product_tallies_factor() {
        let opts = CensusOptions::with_cap(CAP);
        for (factors, shape) in [
            (vec![z(2, 2), z(2, 1)], Shape::Diagonal),
            (vec![z(2, 1), z(2, 1)], Shape::Circulant),
            (vec![z(2, 3)], Shape::Circulant),
        ] {
            let r = ProductRing::new(factors).unwrap();
            let report = product_verify(&r, 2, shape, &opts).unwrap();
            assert!(report.product_checks[0].elementwise_match);
            assert!(!report.has_mismatch(), "{report:?}");
        }
    }

    #[test]
    fn direct_det_is_componentwise() {
        let r = ProductRing::new(vec![z(2, 2), z(3, 1)]).unwrap();
        let elems = r.elements(CAP).unwrap();
        let mut scratch = Vec::new();
        for a in &elems {
            for b in elems.iter().step_by(5) {
                let entries = vec![a.clone(), b.clone(), b.clone(), a.clone()];
                let det = det_entries(&r, 2, &entries, &mut scratch);
                for (i, f) in r.factors().iter().enumerate() {
                    let (x, y) = (a.0[i], b.0[i]);
                    assert_eq!(det.0[i], f.sub(f.mul(x, x), f.mul(y, y)));
                }
            }
        }
    }
}

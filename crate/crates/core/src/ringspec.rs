//! Textual ring specifications.
//!
//! ```text
//! ring    := "Z/" INT | "GR(" INT "," INT ")" | "F" INT "[u]/u^" INT
//! product := ring (" x " ring)*
//! ```
//!
//! `Z/p^e`, `GR(p^e, r)` and `F_q[u]/(u^e)` respectively. Spaces around the
//! product separator may be repeated; nothing else may contain whitespace.

use std::fmt;
use std::str::FromStr;

use crate::cfpir::{ProductElement, ProductRing};
use crate::counting::{nt, DetClass};
use crate::error::{Error, Result};
use crate::ring::{ChainRing, RingElement};

/// A parsed specification: one chain ring, or a product of several.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RingSpec {
    Chain(ChainRing),
    Product(ProductRing),
}

impl RingSpec {
    pub fn parse(text: &str, cap: u64) -> Result<Self> {
        let mut factors = Vec::new();
        let mut p = Parser { text, pos: 0 };
        p.skip_spaces();
        loop {
            factors.push(p.chain_ring(cap)?);
            let before = p.pos;
            p.skip_spaces();
            if p.at_end() {
                break;
            }
            if p.pos == before || !p.eat("x") {
                return Err(p.error("` x ` or end of input"));
            }
            let after_x = p.pos;
            p.skip_spaces();
            if p.pos == after_x {
                return Err(p.error("space after `x`"));
            }
        }
        Ok(if factors.len() == 1 {
            RingSpec::Chain(factors.pop().expect("one factor"))
        } else {
            RingSpec::Product(ProductRing::new(factors)?)
        })
    }

    pub fn name(&self) -> String {
        match self {
            RingSpec::Chain(r) => r.name(),
            RingSpec::Product(r) => r.name(),
        }
    }

    pub fn as_chain(&self) -> Option<&ChainRing> {
        match self {
            RingSpec::Chain(r) => Some(r),
            RingSpec::Product(_) => None,
        }
    }

    /// A chain ring is viewed as a one-factor product.
    pub fn to_product(&self) -> ProductRing {
        match self {
            RingSpec::Chain(r) => ProductRing::new(vec![r.clone()]).expect("nonempty"),
            RingSpec::Product(r) => r.clone(),
        }
    }
}

impl fmt::Display for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// Parses one chain ring; products are rejected.
pub fn parse_chain_ring(text: &str, cap: u64) -> Result<ChainRing> {
    match RingSpec::parse(text, cap)? {
        RingSpec::Chain(r) => Ok(r),
        RingSpec::Product(r) => Err(Error::InvalidQuery(format!(
            "`{}` is a product; a single chain ring is required here",
            r.name()
        ))),
    }
}

/// Splits a comma-separated list of ring specs, ignoring the comma inside
/// `GR(..,..)`.
pub fn split_ring_list(text: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (i, ch) in text.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(text[start..i].trim());
                start = i + 1;
            }
            _ => {}
        }
    }
    out.push(text[start..].trim());
    out.into_iter().filter(|s| !s.is_empty()).collect()
}

pub fn parse_ring_list(text: &str, cap: u64) -> Result<Vec<RingSpec>> {
    split_ring_list(text)
        .into_iter()
        .map(|s| RingSpec::parse(s, cap))
        .collect()
}

struct Parser<'a> {
    text: &'a str,
    pos: usize,
}

impl Parser<'_> {
    fn rest(&self) -> &str {
        &self.text[self.pos..]
    }

    fn at_end(&self) -> bool {
        self.pos == self.text.len()
    }

    fn skip_spaces(&mut self) {
        while self.rest().starts_with(' ') {
            self.pos += 1;
        }
    }

    fn eat(&mut self, token: &str) -> bool {
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn error(&self, expected: &str) -> Error {
        Error::Parse {
            pos: self.pos,
            expected: expected.to_string(),
            found: match self.rest().chars().next() {
                None => "end of input".to_string(),
                Some(c) => format!("`{c}`"),
            },
        }
    }

    fn expect(&mut self, token: &str) -> Result<()> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.error(&format!("`{token}`")))
        }
    }

    fn int(&mut self) -> Result<u64> {
        let digits = self.rest().bytes().take_while(u8::is_ascii_digit).count();
        if digits == 0 {
            return Err(self.error("an integer"));
        }
        let value = self.rest()[..digits].parse::<u64>().map_err(|_| Error::Parse {
            pos: self.pos,
            expected: "an integer below 2^64".into(),
            found: self.rest()[..digits].to_string(),
        })?;
        self.pos += digits;
        Ok(value)
    }

    fn exponent(&mut self, what: &str) -> Result<u32> {
        let start = self.pos;
        let v = self.int()?;
        u32::try_from(v).ok().filter(|&v| v >= 1).ok_or(Error::Parse {
            pos: start,
            expected: format!("{what} >= 1"),
            found: v.to_string(),
        })
    }

    fn chain_ring(&mut self, cap: u64) -> Result<ChainRing> {
        if self.eat("Z/") {
            let (p, e) = nt::prime_power(self.int()?)?;
            ChainRing::integers_mod(p, e, cap)
        } else if self.eat("GR(") {
            let (p, e) = nt::prime_power(self.int()?)?;
            self.expect(",")?;
            let r = self.exponent("residue degree")?;
            self.expect(")")?;
            ChainRing::galois(p, e, r, cap)
        } else if self.eat("F") {
            let (p, r) = nt::prime_power(self.int()?)?;
            self.expect("[u]/u^")?;
            let e = self.exponent("nilpotency index")?;
            ChainRing::poly_u(p, r, e, cap)
        } else {
            Err(self.error("`Z/`, `GR(` or `F`"))
        }
    }
}

/// What a count refers to: a whole valuation class or one element.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Target {
    Class(DetClass),
    Element(RingElement),
}

/// `unit`, `zero`, `gamma^s`, a coordinate list `[a0,...,a_{e-1}]`, or an
/// integer (read as that multiple of 1).
pub fn parse_target(ring: &ChainRing, text: &str) -> Result<Target> {
    let text = text.trim();
    if let Ok(class) = DetClass::from_str(text) {
        return match class {
            DetClass::GammaPow(s) if s >= ring.e() => Err(Error::InvalidQuery(format!(
                "gamma^{s} needs 1 <= s < e = {}",
                ring.e()
            ))),
            c => Ok(Target::Class(c)),
        };
    }
    parse_element(ring, text).map(Target::Element)
}

pub fn parse_element(ring: &ChainRing, text: &str) -> Result<RingElement> {
    let text = text.trim();
    if let Some(inner) = text.strip_prefix('[').and_then(|t| t.strip_suffix(']')) {
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim().parse::<u64>().map_err(|_| Error::Parse {
                    pos: 0,
                    expected: "a coordinate list like [1,0]".into(),
                    found: text.to_string(),
                })
            })
            .collect::<Result<Vec<u64>>>()?;
        return ring.from_coords(&coords);
    }
    match text.parse::<i64>() {
        Ok(k) => Ok(ring.from_int(k)),
        Err(_) => Err(Error::Parse {
            pos: 0,
            expected: "unit, zero, gamma^s, [a0,...] or an integer".into(),
            found: text.to_string(),
        }),
    }
}

/// Component-wise targets for a product, joined by ` x `.
pub fn parse_product_target(ring: &ProductRing, text: &str) -> Result<Vec<Target>> {
    let parts: Vec<&str> = text.split(" x ").collect();
    if parts.len() != ring.m() {
        return Err(Error::SizeMismatch {
            left: parts.len(),
            right: ring.m(),
        });
    }
    ring.factors()
        .iter()
        .zip(parts)
        .map(|(r, t)| parse_target(r, t))
        .collect()
}

/// Elements only (no classes) for a product.
pub fn parse_product_element(ring: &ProductRing, text: &str) -> Result<ProductElement> {
    let parts: Vec<&str> = text.split(" x ").collect();
    if parts.len() != ring.m() {
        return Err(Error::SizeMismatch {
            left: parts.len(),
            right: ring.m(),
        });
    }
    Ok(ProductElement(
        ring.factors()
            .iter()
            .zip(parts)
            .map(|(r, t)| parse_element(r, t))
            .collect::<Result<_>>()?,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ring::Family;

    const CAP: u64 = 10_000_000;

    fn parse(s: &str) -> Result<RingSpec> {
        RingSpec::parse(s, CAP)
    }

    #[test]
    fn chain_rings() {
        let z8 = parse_chain_ring("Z/8", CAP).unwrap();
        assert_eq!((z8.family(), z8.q(), z8.e()), (Family::IntegerModPE, 2, 3));
        let gr = parse_chain_ring("GR(4,2)", CAP).unwrap();
        assert_eq!((gr.family(), gr.q(), gr.e(), gr.size()), (Family::GaloisRing, 4, 2, 16));
        let f = parse_chain_ring("F9[u]/u^2", CAP).unwrap();
        assert_eq!((f.family(), f.q(), f.e()), (Family::PolyU, 9, 2));
        for s in ["Z/8", "GR(4,2)", "F9[u]/u^2", "GR(27,1)"] {
            assert_eq!(parse(s).unwrap().name(), s);
        }
    }

    #[test]
    fn not_prime_power() {
        assert_eq!(parse("Z/12"), Err(Error::NotPrimePower(12)));
        assert_eq!(parse("F6[u]/u^2"), Err(Error::NotPrimePower(6)));
    }

    #[test]
    fn parse_errors_locate_the_problem() {
        match parse("GR(4;2)") {
            Err(Error::Parse { pos, expected, found }) => {
                assert_eq!(pos, 4);
                assert_eq!(expected, "`,`");
                assert_eq!(found, "`;`");
            }
            other => panic!("{other:?}"),
        }
        assert!(matches!(parse("Q/5"), Err(Error::Parse { pos: 0, .. })));
        assert!(matches!(parse("Z/"), Err(Error::Parse { pos: 2, .. })));
        assert!(matches!(parse("F4[u]/u^0"), Err(Error::Parse { pos: 8, .. })));
        assert!(matches!(parse("Z/4 F2[u]/u^2"), Err(Error::Parse { .. })));
        assert!(matches!(parse("Z/4 xF2[u]/u^2"), Err(Error::Parse { .. })));
    }

    #[test]
    fn products() {
        let spec = parse("Z/4 x F2[u]/u^2").unwrap();
        let RingSpec::Product(r) = &spec else {
            panic!("expected a product")
        };
        assert_eq!(r.m(), 2);
        assert_eq!(spec.name(), "Z/4 x F2[u]/u^2");
        assert_eq!(r.q_label(), "2x2");
        let list = parse_ring_list("Z/4, GR(4,2),F2[u]/u^2 x Z/2", CAP).unwrap();
        assert_eq!(list.len(), 3);
        assert_eq!(list[1].name(), "GR(4,2)");
    }

    #[test]
    fn targets() {
        let z8 = parse_chain_ring("Z/8", CAP).unwrap();
        assert_eq!(parse_target(&z8, "gamma^1").unwrap(), Target::Class(DetClass::GammaPow(1)));
        assert!(parse_target(&z8, "gamma^3").is_err());
        assert_eq!(parse_target(&z8, "[0,1,1]").unwrap(), Target::Element(RingElement(6)));
        assert_eq!(parse_target(&z8, "6").unwrap(), Target::Element(RingElement(6)));
        assert!(parse_target(&z8, "[0,1]").is_err());
        let r = parse("Z/4 x F3[u]/u^1").unwrap().to_product();
        let t = parse_product_target(&r, "unit x zero").unwrap();
        assert_eq!(t, vec![Target::Class(DetClass::Unit), Target::Class(DetClass::Zero)]);
        let x = parse_product_element(&r, "[1,1] x [2]").unwrap();
        assert_eq!(x, ProductElement(vec![RingElement(3), RingElement(2)]));
    }
}

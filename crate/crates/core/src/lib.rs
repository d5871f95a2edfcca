//! Exact arithmetic over finite chain rings and a determinant census for
//! diagonal and circulant matrices over them.
//!
//! The closed-form counts in [`counting`] are checked against brute-force
//! enumeration in [`census`]; [`cfpir`] extends both to finite products of
//! chain rings.

pub mod census;
pub mod cfpir;
pub mod counting;
pub mod error;
pub mod field;
pub mod limits;
pub mod matrix;
pub mod report;
pub mod ring;
pub mod ringspec;

pub use counting::{CountQuery, CountResult, DetClass, Shape};
pub use error::{Error, Result};
pub use field::{FieldElement, FiniteField};
pub use ring::{ChainRing, CommRing, Family, RingElement, ValUnitDecomposition};

//! Serializable reports and their JSON/CSV encodings.
//!
//! Counts are written as decimal strings so that arbitrary-precision values
//! survive any JSON reader. Every encoder is deterministic: rows keep the
//! order in which the grid was given.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};

use crate::counting::Shape;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Emit {
    Json,
    Csv,
}

impl FromStr for Emit {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "json" => Ok(Emit::Json),
            "csv" => Ok(Emit::Csv),
            _ => Err(Error::InvalidQuery(format!("unknown output format `{s}`"))),
        }
    }
}

mod decimal {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Option<BigUint>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_str(&v.to_str_radix(10)),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigUint>, D::Error> {
        match Option::<String>::deserialize(d)? {
            None => Ok(None),
            Some(s) if s.is_empty() => Ok(None),
            Some(s) => BigUint::parse_bytes(s.as_bytes(), 10)
                .map(Some)
                .ok_or_else(|| serde::de::Error::custom(format!("not a decimal count: {s}"))),
        }
    }
}

/// One `(ring, n, shape, class)` comparison between closed form and census.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReportRow {
    pub ring: String,
    pub q: String,
    pub e: String,
    pub n: u32,
    pub shape: Shape,
    pub class: String,
    #[serde(with = "decimal")]
    pub formula: Option<BigUint>,
    #[serde(with = "decimal")]
    pub oracle: Option<BigUint>,
    pub applicable: bool,
    #[serde(rename = "match")]
    pub matched: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowStatus {
    Match,
    /// A closed form applies and the census disagrees with it.
    Mismatch,
    /// No closed form applies (an open problem), or only one side was
    /// computed.
    Open,
}

impl ReportRow {
    pub fn status(&self) -> RowStatus {
        match (&self.formula, &self.oracle) {
            _ if self.matched => RowStatus::Match,
            (Some(_), Some(_)) => RowStatus::Mismatch,
            _ => RowStatus::Open,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SkippedCell {
    pub ring: String,
    pub n: u32,
    pub shape: Shape,
    pub reason: String,
}

/// Element-wise comparison of a product-ring census with the product of
/// its factor censuses.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductCheck {
    pub ring: String,
    pub n: u32,
    pub shape: Shape,
    pub elementwise_match: bool,
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub rows: Vec<ReportRow>,
    #[serde(default)]
    pub skipped: Vec<SkippedCell>,
    #[serde(default)]
    pub product_checks: Vec<ProductCheck>,
}

impl VerificationReport {
    pub fn has_mismatch(&self) -> bool {
        self.rows.iter().any(|r| r.status() == RowStatus::Mismatch)
            || self.product_checks.iter().any(|c| !c.elementwise_match)
    }

    pub fn extend(&mut self, other: VerificationReport) {
        self.rows.extend(other.rows);
        self.skipped.extend(other.skipped);
        self.product_checks.extend(other.product_checks);
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| parse_error("report JSON", e))
    }

    /// CSV carries the comparison rows only; skipped cells and product
    /// checks are JSON-only.
    pub fn to_csv(&self) -> String {
        to_csv(&self.rows)
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        Ok(VerificationReport {
            rows: from_csv(text)?,
            ..Default::default()
        })
    }

    pub fn emit(&self, format: Emit) -> String {
        match format {
            Emit::Json => self.to_json(),
            Emit::Csv => self.to_csv(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Conjecture {
    /// Circulant counts are constant on `{b γ^s : b unit}` even when `gcd(n, q) != 1`.
    OrbitWithoutGcd,
    /// Every unit is the determinant of some circulant.
    UnitCoverage,
}

impl fmt::Display for Conjecture {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Conjecture::OrbitWithoutGcd => "orbit-without-gcd",
            Conjecture::UnitCoverage => "unit-coverage",
        })
    }
}

impl FromStr for Conjecture {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "orbit-without-gcd" => Ok(Conjecture::OrbitWithoutGcd),
            "unit-coverage" => Ok(Conjecture::UnitCoverage),
            _ => Err(Error::InvalidQuery(format!("unknown conjecture `{s}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScanStatus {
    Consistent,
    Counterexample,
    Skipped,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureCell {
    pub ring: String,
    pub q: u64,
    pub e: u32,
    pub n: u32,
    pub status: ScanStatus,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConjectureReport {
    pub conjecture: Conjecture,
    pub cells: Vec<ConjectureCell>,
}

#[derive(Serialize, Deserialize)]
struct ConjectureCsvRow {
    ring: String,
    q: u64,
    e: u32,
    n: u32,
    conjecture: Conjecture,
    status: ScanStatus,
    detail: String,
}

impl ConjectureReport {
    pub fn found_counterexample(&self) -> bool {
        self.cells
            .iter()
            .any(|c| c.status == ScanStatus::Counterexample)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| parse_error("conjecture JSON", e))
    }

    pub fn to_csv(&self) -> String {
        let rows: Vec<ConjectureCsvRow> = self
            .cells
            .iter()
            .map(|c| ConjectureCsvRow {
                ring: c.ring.clone(),
                q: c.q,
                e: c.e,
                n: c.n,
                conjecture: self.conjecture,
                status: c.status,
                detail: c.detail.clone(),
            })
            .collect();
        to_csv(&rows)
    }

    /// The conjecture column of the rows wins; `default` is used for an
    /// empty report.
    pub fn from_csv(text: &str, default: Conjecture) -> Result<Self> {
        let rows: Vec<ConjectureCsvRow> = from_csv(text)?;
        let conjecture = rows.first().map_or(default, |r| r.conjecture);
        Ok(ConjectureReport {
            conjecture,
            cells: rows
                .into_iter()
                .map(|r| ConjectureCell {
                    ring: r.ring,
                    q: r.q,
                    e: r.e,
                    n: r.n,
                    status: r.status,
                    detail: r.detail,
                })
                .collect(),
        })
    }

    pub fn emit(&self, format: Emit) -> String {
        match format {
            Emit::Json => self.to_json(),
            Emit::Csv => self.to_csv(),
        }
    }
}

/// Determinant image, elements written as γ-adic coordinate lists.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ImageReport {
    pub ring: String,
    pub n: u32,
    pub shape: Shape,
    pub mode: String,
    pub image: Vec<String>,
    pub missing: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct ImageCsvRow {
    ring: String,
    n: u32,
    shape: Shape,
    mode: String,
    element: String,
    attained: bool,
}

impl ImageReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes") + "\n"
    }

    pub fn to_csv(&self) -> String {
        let row = |element: &String, attained| ImageCsvRow {
            ring: self.ring.clone(),
            n: self.n,
            shape: self.shape,
            mode: self.mode.clone(),
            element: element.clone(),
            attained,
        };
        let rows: Vec<ImageCsvRow> = self
            .image
            .iter()
            .map(|x| row(x, true))
            .chain(self.missing.iter().map(|x| row(x, false)))
            .collect();
        to_csv(&rows)
    }

    pub fn emit(&self, format: Emit) -> String {
        match format {
            Emit::Json => self.to_json(),
            Emit::Csv => self.to_csv(),
        }
    }
}

fn to_csv<T: Serialize>(rows: &[T]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    for row in rows {
        w.serialize(row).expect("in-memory CSV write");
    }
    String::from_utf8(w.into_inner().expect("in-memory CSV flush")).expect("CSV is UTF-8")
}

fn from_csv<T: for<'de> Deserialize<'de>>(text: &str) -> Result<Vec<T>> {
    csv::Reader::from_reader(text.as_bytes())
        .deserialize()
        .collect::<std::result::Result<Vec<T>, _>>()
        .map_err(|e| parse_error("CSV report", e))
}

fn parse_error(what: &str, err: impl fmt::Display) -> Error {
    Error::Parse {
        pos: 0,
        expected: what.to_string(),
        found: err.to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn arb_count() -> impl Strategy<Value = Option<BigUint>> {
        prop::option::of(prop::collection::vec(any::<u32>(), 0..4).prop_map(BigUint::new))
    }

    fn arb_row() -> impl Strategy<Value = ReportRow> {
        (
            prop::sample::select(vec!["Z/8", "GR(4,2)", "F9[u]/u^2", "Z/4 x F2[u]/u^2"]),
            1u32..9,
            prop::sample::select(vec![Shape::Diagonal, Shape::Circulant]),
            prop::sample::select(vec!["unit", "zero", "gamma^1", "[1,0]"]),
            arb_count(),
            arb_count(),
            any::<bool>(),
            any::<bool>(),
        )
            .prop_map(|(ring, n, shape, class, formula, oracle, applicable, matched)| ReportRow {
                ring: ring.to_string(),
                q: "4".into(),
                e: "2".into(),
                n,
                shape,
                class: class.to_string(),
                formula,
                oracle,
                applicable,
                matched,
            })
    }

    proptest! {
        #[test]
        fn json_round_trip(rows in prop::collection::vec(arb_row(), 0..6)) {
            let report = VerificationReport { rows, ..Default::default() };
            prop_assert_eq!(VerificationReport::from_json(&report.to_json()).unwrap(), report);
        }

        #[test]
        fn csv_round_trip(rows in prop::collection::vec(arb_row(), 0..6)) {
            let report = VerificationReport { rows, ..Default::default() };
            prop_assert_eq!(VerificationReport::from_csv(&report.to_csv()).unwrap(), report);
        }
    }

    #[test]
    fn csv_header_and_decimal_strings() {
        let row = ReportRow {
            ring: "GR(4,2)".into(),
            q: "4".into(),
            e: "2".into(),
            n: 2,
            shape: Shape::Circulant,
            class: "zero".into(),
            formula: Some(BigUint::parse_bytes(b"123456789012345678901234567890", 10).unwrap()),
            oracle: None,
            applicable: true,
            matched: false,
        };
        let report = VerificationReport {
            rows: vec![row],
            ..Default::default()
        };
        let csv = report.to_csv();
        assert_eq!(
            csv,
            "ring,q,e,n,shape,class,formula,oracle,applicable,match\n\
             \"GR(4,2)\",4,2,2,circulant,zero,123456789012345678901234567890,,true,false\n"
        );
        assert!(report.to_json().contains("\"formula\": \"123456789012345678901234567890\""));
    }

    #[test]
    fn conjecture_round_trip() {
        let report = ConjectureReport {
            conjecture: Conjecture::UnitCoverage,
            cells: vec![ConjectureCell {
                ring: "Z/4".into(),
                q: 2,
                e: 2,
                n: 2,
                status: ScanStatus::Counterexample,
                detail: "units never attained: [1,1]".into(),
            }],
        };
        assert_eq!(ConjectureReport::from_json(&report.to_json()).unwrap(), report);
        assert_eq!(
            ConjectureReport::from_csv(&report.to_csv(), Conjecture::OrbitWithoutGcd).unwrap(),
            report
        );
        assert!(report.found_counterexample());
    }
}

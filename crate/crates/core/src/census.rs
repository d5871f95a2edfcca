//! Brute-force determinant census over all diagonal or circulant matrices,
//! and verification of the closed-form counts against it.
//!
//! Candidates are visited in lexicographic order of the γ-adic coordinates
//! of their first row (or diagonal). The space is split by the first entry;
//! each worker keeps a private tally and tallies are merged by addition, so
//! results do not depend on scheduling.

use std::collections::BTreeMap;
use std::time::{Duration, Instant};

use num_bigint::BigUint;
use rayon::prelude::*;

use crate::counting::{self, nt, CountQuery, DetClass, Shape};
use crate::error::{Error, Result};
use crate::matrix::{det_entries, CirculantSpec};
use crate::report::{
    Conjecture, ConjectureCell, ConjectureReport, ReportRow, ScanStatus, SkippedCell,
    VerificationReport,
};
use crate::ring::{ChainRing, RingElement};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CensusOptions {
    /// Maximum number of candidate matrices per cell.
    pub cap: u64,
    /// Use the eigenvalue product for circulant determinants when `n | q - 1`,
    /// after it has matched the division-free determinant on the first
    /// partition of the same run.
    pub eigen_fast_path: bool,
}

impl Default for CensusOptions {
    fn default() -> Self {
        CensusOptions {
            cap: crate::limits::DEFAULT_MAX_ENUM,
            eigen_fast_path: false,
        }
    }
}

impl CensusOptions {
    pub fn with_cap(cap: u64) -> Self {
        CensusOptions {
            cap,
            ..Default::default()
        }
    }
}

/// Exact determinant counts for every `n x n` matrix of one shape.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DetTally {
    ring: ChainRing,
    n: u32,
    shape: Shape,
    /// Indexed by `RingElement::index`.
    counts: Vec<u64>,
}

impl DetTally {
    pub fn ring(&self) -> &ChainRing {
        &self.ring
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn count(&self, x: RingElement) -> u64 {
        self.counts[x.0 as usize]
    }

    pub fn total(&self) -> u128 {
        self.counts.iter().map(|&c| c as u128).sum()
    }

    /// Counts keyed by γ-adic coordinate vector.
    pub fn by_element(&self) -> BTreeMap<Vec<u64>, u64> {
        self.ring
            .enumeration_order()
            .iter()
            .map(|&x| (self.ring.coords(x), self.count(x)))
            .collect()
    }

    /// Counts summed by valuation `s = 0, ..., e`.
    pub fn by_valuation(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.ring.e() as usize + 1];
        for &x in self.ring.enumeration_order() {
            out[self.ring.valuation(x).s as usize] += self.count(x);
        }
        out
    }

    /// Elements attained as a determinant, in enumeration order.
    pub fn support(&self) -> Vec<RingElement> {
        self.ring
            .enumeration_order()
            .iter()
            .copied()
            .filter(|&x| self.count(x) > 0)
            .collect()
    }

    /// Elements of one valuation class, in enumeration order.
    pub fn class_members(&self, class: DetClass) -> Vec<RingElement> {
        let e = self.ring.e();
        self.ring
            .enumeration_order()
            .iter()
            .copied()
            .filter(|&x| DetClass::from_valuation(self.ring.valuation(x).s, e) == class)
            .collect()
    }

    /// The common count over a class, if the tally is constant on it.
    pub fn class_value(&self, class: DetClass) -> Option<u64> {
        let members = self.class_members(class);
        let first = self.count(*members.first()?);
        members
            .iter()
            .all(|&x| self.count(x) == first)
            .then_some(first)
    }

    pub fn class_total(&self, class: DetClass) -> u128 {
        self.class_members(class)
            .iter()
            .map(|&x| self.count(x) as u128)
            .sum()
    }
}

fn candidate_count(ring: &ChainRing, n: u32, cap: u64, what: &str) -> Result<u64> {
    crate::limits::bounded_pow(ring.size(), n, cap).ok_or_else(|| Error::TooLarge {
        what: format!("{what} over {} with n = {n}", ring.name()),
        size: (ring.size() as u128).checked_pow(n).unwrap_or(u128::MAX),
        cap,
    })
}

/// Visits every `(n-1)`-tuple of `elems` in lexicographic order.
fn for_each_tail(elems: &[RingElement], len: usize, mut f: impl FnMut(&[RingElement])) {
    let mut digits = vec![0usize; len];
    let mut tuple: Vec<RingElement> = vec![elems[0]; len];
    loop {
        f(&tuple);
        let mut pos = len;
        loop {
            if pos == 0 {
                return;
            }
            pos -= 1;
            digits[pos] += 1;
            if digits[pos] < elems.len() {
                tuple[pos] = elems[digits[pos]];
                break;
            }
            digits[pos] = 0;
            tuple[pos] = elems[0];
        }
    }
}

enum CirculantDet {
    Expansion,
    Eigen(RingElement),
    Both(RingElement),
}

fn tally_partition(
    ring: &ChainRing,
    n: usize,
    shape: Shape,
    first: RingElement,
    mode: &CirculantDet,
) -> Vec<u64> {
    let elems = ring.enumeration_order();
    let mut counts = vec![0u64; ring.size() as usize];
    let mut entries = vec![ring.zero(); n * n];
    let mut scratch = Vec::new();
    let mut row = vec![first; n];
    for_each_tail(elems, n - 1, |tail| {
        let det = match shape {
            Shape::Diagonal => tail.iter().fold(first, |acc, &a| ring.mul(acc, a)),
            Shape::Circulant => {
                row[1..].copy_from_slice(tail);
                let expansion = |entries: &mut Vec<RingElement>, scratch: &mut Vec<RingElement>| {
                    for i in 0..n {
                        for j in 0..n {
                            entries[i * n + j] = row[(j + n - i) % n];
                        }
                    }
                    det_entries(ring, n, entries, scratch)
                };
                match mode {
                    CirculantDet::Expansion => expansion(&mut entries, &mut scratch),
                    CirculantDet::Eigen(omega) => eigen_det(ring, &row, *omega),
                    CirculantDet::Both(omega) => {
                        let d = expansion(&mut entries, &mut scratch);
                        let w = eigen_det(ring, &row, *omega);
                        assert_eq!(
                            d, w,
                            "eigenvalue determinant disagrees with expansion on {row:?}"
                        );
                        d
                    }
                }
            }
        };
        counts[det.0 as usize] += 1;
    });
    counts
}

fn eigen_det(ring: &ChainRing, row: &[RingElement], omega: RingElement) -> RingElement {
    CirculantSpec::new(ring, row.to_vec())
        .eigenvalues_unchecked(omega)
        .into_iter()
        .fold(ring.one(), |acc, w| ring.mul(acc, w))
}

fn merge(mut a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    for (x, y) in a.iter_mut().zip(b) {
        *x += y;
    }
    a
}

/// Determinant tally over all `q^{en}` diagonal or circulant matrices.
pub fn enumerate_tally(
    ring: &ChainRing,
    n: u32,
    shape: Shape,
    opts: &CensusOptions,
) -> Result<DetTally> {
    if n == 0 {
        return Err(Error::InvalidQuery("dimension must be at least 1".into()));
    }
    candidate_count(ring, n, opts.cap, &format!("{shape} census"))?;
    let elems = ring.enumeration_order();
    let nu = n as usize;
    let fast_root = (opts.eigen_fast_path
        && shape == Shape::Circulant
        && (ring.q() - 1) % n as u64 == 0)
        .then(|| ring.root_of_unity(n as u64))
        .transpose()?;
    let counts = match fast_root {
        None => elems
            .par_iter()
            .map(|&first| tally_partition(ring, nu, shape, first, &CirculantDet::Expansion))
            .reduce(|| vec![0u64; ring.size() as usize], merge),
        Some(omega) => {
            // the first partition runs both routes and must agree before the
            // eigenvalue route is trusted alone
            let head = tally_partition(ring, nu, shape, elems[0], &CirculantDet::Both(omega));
            let rest = elems[1..]
                .par_iter()
                .map(|&first| tally_partition(ring, nu, shape, first, &CirculantDet::Eigen(omega)))
                .reduce(|| vec![0u64; ring.size() as usize], merge);
            merge(head, rest)
        }
    };
    Ok(DetTally {
        ring: ring.clone(),
        n,
        shape,
        counts,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImageMode {
    Full,
    /// Only `cir(a, b, ..., b)` (or `diag(a, b, ..., b)`): `q^{2e}` candidates.
    Cheap,
}

/// The set of determinants attained, in enumeration order.
pub fn det_image(
    ring: &ChainRing,
    n: u32,
    shape: Shape,
    mode: ImageMode,
    opts: &CensusOptions,
) -> Result<Vec<RingElement>> {
    match mode {
        ImageMode::Full => Ok(enumerate_tally(ring, n, shape, opts)?.support()),
        ImageMode::Cheap => {
            if n == 0 {
                return Err(Error::InvalidQuery("dimension must be at least 1".into()));
            }
            candidate_count(ring, 2, opts.cap, "two-parameter family")?;
            let nu = n as usize;
            let mut hit = vec![false; ring.size() as usize];
            let mut scratch = Vec::new();
            let mut entries = vec![ring.zero(); nu * nu];
            for &a in ring.enumeration_order() {
                for &b in ring.enumeration_order() {
                    let det = match shape {
                        Shape::Diagonal => ring.mul(a, ring.pow(b, nu as u64 - 1)),
                        Shape::Circulant => {
                            for i in 0..nu {
                                for j in 0..nu {
                                    entries[i * nu + j] = if i == j { a } else { b };
                                }
                            }
                            det_entries(ring, nu, &entries, &mut scratch)
                        }
                    };
                    hit[det.0 as usize] = true;
                }
            }
            Ok(ring
                .enumeration_order()
                .iter()
                .copied()
                .filter(|x| hit[x.0 as usize])
                .collect())
        }
    }
}

/// Why a tally is not constant on unit-association classes (or not positive).
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum OrbitViolation {
    Unequal {
        s: u32,
        first: (RingElement, u64),
        second: (RingElement, u64),
    },
    NotAttained {
        element: RingElement,
    },
}

impl OrbitViolation {
    pub fn describe(&self, ring: &ChainRing) -> String {
        match self {
            OrbitViolation::Unequal { s, first, second } => format!(
                "valuation {s}: count({}) = {} but count({}) = {}",
                ring.format_element(first.0),
                first.1,
                ring.format_element(second.0),
                second.1
            ),
            OrbitViolation::NotAttained { element } => {
                format!("{} is never a determinant", ring.format_element(*element))
            }
        }
    }
}

/// First element pair breaking constancy on `{b γ^s : b ∈ U(R)}`; for
/// circulants with `gcd(n, q) = 1`, also the first element with count zero.
pub fn orbit_violation(tally: &DetTally) -> Option<OrbitViolation> {
    let ring = &tally.ring;
    let mut seen: BTreeMap<u32, (RingElement, u64)> = BTreeMap::new();
    for &x in ring.enumeration_order() {
        let s = ring.valuation(x).s;
        let c = tally.count(x);
        match seen.get(&s) {
            None => {
                seen.insert(s, (x, c));
            }
            Some(&first) if first.1 != c => {
                return Some(OrbitViolation::Unequal {
                    s,
                    first,
                    second: (x, c),
                })
            }
            Some(_) => {}
        }
    }
    if tally.shape == Shape::Circulant && nt::gcd(tally.n as u64, ring.q()) == 1 {
        if let Some(&element) = ring
            .enumeration_order()
            .iter()
            .find(|&&x| tally.count(x) == 0)
        {
            return Some(OrbitViolation::NotAttained { element });
        }
    }
    None
}

pub fn unit_orbit_check(
    ring: &ChainRing,
    n: u32,
    shape: Shape,
    opts: &CensusOptions,
) -> Result<bool> {
    Ok(orbit_violation(&enumerate_tally(ring, n, shape, opts)?).is_none())
}

/// A `(ring, n)` cell of a verification or scan grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridCell {
    pub ring: ChainRing,
    pub n: u32,
}

impl GridCell {
    pub fn new(ring: ChainRing, n: u32) -> Self {
        GridCell { ring, n }
    }
}

/// Formula value for one class, when a closed form applies.
pub fn formula_for(ring: &ChainRing, n: u32, shape: Shape, class: DetClass) -> Result<Option<BigUint>> {
    let query = CountQuery::new(ring.q(), ring.e(), n, class)?;
    Ok(match shape {
        Shape::Diagonal => counting::d_count(&query).value,
        Shape::Circulant => counting::c_count(&query).value,
    })
}

/// Compares one class of a tally with its closed form. The unit class also
/// checks the summed count over all units.
pub fn compare_class(tally: &DetTally, class: DetClass) -> Result<ReportRow> {
    let ring = &tally.ring;
    let formula = formula_for(ring, tally.n, tally.shape, class)?;
    // a class on which the tally is not constant reports its first member
    // and can never match
    let constant = tally.class_value(class);
    let members = tally.class_members(class);
    let oracle = Some(BigUint::from(tally.count(members[0])));
    let mut matched =
        constant.is_some() && matches!((&formula, &oracle), (Some(f), Some(o)) if f == o);
    if let (Some(f), true) = (&formula, matched) {
        let expected_total = f * class.size(ring.q(), ring.e());
        matched = expected_total == BigUint::from(tally.class_total(class));
    }
    Ok(ReportRow {
        ring: ring.name(),
        q: ring.q().to_string(),
        e: ring.e().to_string(),
        n: tally.n,
        shape: tally.shape,
        class: class.to_string(),
        applicable: formula.is_some(),
        formula,
        oracle,
        matched,
    })
}

/// Census-backed verification of every class over a grid. Cells above the
/// cap are reported as skipped rather than failing the run.
pub fn verify(grid: &[GridCell], shapes: &[Shape], opts: &CensusOptions) -> VerificationReport {
    verify_timed(grid, shapes, opts).0
}

pub fn verify_timed(
    grid: &[GridCell],
    shapes: &[Shape],
    opts: &CensusOptions,
) -> (VerificationReport, Duration) {
    let start = Instant::now();
    let mut report = VerificationReport::default();
    for cell in grid {
        for &shape in shapes {
            match enumerate_tally(&cell.ring, cell.n, shape, opts) {
                Ok(tally) => {
                    for class in DetClass::all(cell.ring.e()) {
                        let row = compare_class(&tally, class)
                            .expect("classes of a constructed ring form valid queries");
                        report.rows.push(row);
                    }
                }
                Err(err) => report.skipped.push(SkippedCell {
                    ring: cell.ring.name(),
                    n: cell.n,
                    shape,
                    reason: err.to_string(),
                }),
            }
        }
    }
    (report, start.elapsed())
}

/// Scans the open conjectures over a grid.
///
/// `OrbitWithoutGcd` looks only at cells with `gcd(n, q) != 1` and checks
/// that circulant counts are constant on unit-association classes.
/// `UnitCoverage` checks that every unit is a circulant determinant.
pub fn conjecture_scan(
    which: Conjecture,
    grid: &[GridCell],
    opts: &CensusOptions,
) -> ConjectureReport {
    let mut cells = Vec::new();
    for cell in grid {
        let ring = &cell.ring;
        if which == Conjecture::OrbitWithoutGcd && nt::gcd(cell.n as u64, ring.q()) == 1 {
            continue;
        }
        let (status, detail) = match enumerate_tally(ring, cell.n, Shape::Circulant, opts) {
            Err(err) => (ScanStatus::Skipped, err.to_string()),
            Ok(tally) => match which {
                Conjecture::OrbitWithoutGcd => match orbit_violation(&tally) {
                    None => (ScanStatus::Consistent, String::new()),
                    Some(v) => (ScanStatus::Counterexample, v.describe(ring)),
                },
                Conjecture::UnitCoverage => {
                    let missing: Vec<String> = ring
                        .enumeration_order()
                        .iter()
                        .filter(|&&x| ring.is_unit(x) && tally.count(x) == 0)
                        .map(|&x| ring.format_element(x))
                        .collect();
                    if missing.is_empty() {
                        (ScanStatus::Consistent, String::new())
                    } else {
                        (
                            ScanStatus::Counterexample,
                            format!("units never attained: {}", missing.join(" ")),
                        )
                    }
                }
            },
        };
        cells.push(ConjectureCell {
            ring: ring.name(),
            q: ring.q(),
            e: ring.e(),
            n: cell.n,
            status,
            detail,
        });
    }
    ConjectureReport {
        conjecture: which,
        cells,
    }
}

//! Square matrices over a commutative ring, with diagonal and circulant
//! constructors.
//!
//! Determinants are computed without division: chain rings have zero
//! divisors, so elimination with arbitrary pivots is not available.

use crate::error::{Error, Result};
use crate::ring::{ChainRing, CommRing, RingElement};

#[derive(Debug, Clone, PartialEq)]
pub struct RingMatrix<R: CommRing = ChainRing> {
    ring: R,
    n: usize,
    entries: Vec<R::Elem>,
}

impl<R: CommRing + Clone + PartialEq> RingMatrix<R> {
    pub fn from_fn(ring: &R, n: usize, mut f: impl FnMut(usize, usize) -> R::Elem) -> Self {
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(f(i, j));
            }
        }
        RingMatrix {
            ring: ring.clone(),
            n,
            entries,
        }
    }

    pub fn from_rows(ring: &R, rows: Vec<Vec<R::Elem>>) -> Result<Self> {
        let n = rows.len();
        if let Some(bad) = rows.iter().find(|row| row.len() != n) {
            return Err(Error::SizeMismatch {
                left: bad.len(),
                right: n,
            });
        }
        Ok(RingMatrix {
            ring: ring.clone(),
            n,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn identity(ring: &R, n: usize) -> Self {
        Self::from_fn(ring, n, |i, j| if i == j { ring.one() } else { ring.zero() })
    }

    pub fn ring(&self) -> &R {
        &self.ring
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> &R::Elem {
        &self.entries[i * self.n + j]
    }

    pub fn entries(&self) -> &[R::Elem] {
        &self.entries
    }

    pub fn rows(&self) -> Vec<Vec<R::Elem>> {
        self.entries.chunks(self.n.max(1)).map(<[_]>::to_vec).collect()
    }

    pub fn det(&self) -> R::Elem {
        let mut ws = Vec::new();
        det_entries(&self.ring, self.n, &self.entries, &mut ws)
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        if self.n != other.n {
            return Err(Error::SizeMismatch {
                left: self.n,
                right: other.n,
            });
        }
        let ring = &self.ring;
        Ok(Self::from_fn(ring, self.n, |i, j| {
            (0..self.n).fold(ring.zero(), |acc, k| {
                ring.add(&acc, &ring.mul(self.get(i, k), other.get(k, j)))
            })
        }))
    }

    /// Matrix of cofactors, transposed: `M · adj(M) = det(M) · I`.
    pub fn adjugate(&self) -> Self {
        let n = self.n;
        let ring = &self.ring;
        if n == 1 {
            return Self::identity(ring, 1);
        }
        let mut ws = Vec::new();
        let mut minor = Vec::with_capacity((n - 1) * (n - 1));
        Self::from_fn(ring, n, |i, j| {
            // entry (i, j) of adj is the (j, i) cofactor
            minor.clear();
            for r in (0..n).filter(|&r| r != j) {
                for c in (0..n).filter(|&c| c != i) {
                    minor.push(self.get(r, c).clone());
                }
            }
            let m = det_entries(ring, n - 1, &minor, &mut ws);
            if (i + j) % 2 == 0 {
                m
            } else {
                ring.neg(&m)
            }
        })
    }
}

impl RingMatrix<ChainRing> {
    /// Inverse as `adj(M) · det(M)^{-1}`; requires a unit determinant.
    pub fn inverse(&self) -> Result<Self> {
        let det_inv = self
            .ring
            .inv(self.det())
            .map_err(|_| Error::NotInvertible)?;
        let adj = self.adjugate();
        let ring = &self.ring;
        Ok(Self::from_fn(ring, self.n, |i, j| {
            ring.mul(*adj.get(i, j), det_inv)
        }))
    }
}

/// Determinant of the row-major `n x n` matrix `entries`.
///
/// Laplace expansion memoized over column subsets: after placing rows
/// `0..k`, `scratch[S]` with `|S| = k` holds the determinant of those rows
/// restricted to the columns in `S`. Uses `O(n 2^n)` ring operations.
pub fn det_entries<R: CommRing>(
    ring: &R,
    n: usize,
    entries: &[R::Elem],
    scratch: &mut Vec<R::Elem>,
) -> R::Elem {
    debug_assert_eq!(entries.len(), n * n);
    match n {
        0 => return ring.one(),
        1 => return entries[0].clone(),
        2 => {
            return ring.sub(
                &ring.mul(&entries[0], &entries[3]),
                &ring.mul(&entries[1], &entries[2]),
            )
        }
        _ => {}
    }
    assert!(n < 32, "dimension {n} too large for subset expansion");
    let full = 1usize << n;
    scratch.clear();
    scratch.resize(full, ring.zero());
    scratch[0] = ring.one();
    for mask in 1..full {
        let k = mask.count_ones() as usize;
        let row = &entries[(k - 1) * n..k * n];
        let mut acc = ring.zero();
        let mut above = 0usize;
        // walk columns from the top so `above` counts members greater than j
        for j in (0..n).rev() {
            if mask & (1 << j) == 0 {
                continue;
            }
            let a = &row[j];
            if *a != ring.zero() {
                let term = ring.mul(a, &scratch[mask & !(1 << j)]);
                acc = if above % 2 == 0 {
                    ring.add(&acc, &term)
                } else {
                    ring.sub(&acc, &term)
                };
            }
            above += 1;
        }
        scratch[mask] = acc;
    }
    scratch[full - 1].clone()
}

/// `diag(a_1, ..., a_n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalSpec<R: CommRing = ChainRing> {
    pub ring: R,
    pub diag: Vec<R::Elem>,
}

impl<R: CommRing + Clone + PartialEq> DiagonalSpec<R> {
    pub fn new(ring: &R, diag: Vec<R::Elem>) -> Self {
        DiagonalSpec {
            ring: ring.clone(),
            diag,
        }
    }

    pub fn expand(&self) -> RingMatrix<R> {
        let ring = &self.ring;
        RingMatrix::from_fn(ring, self.diag.len(), |i, j| {
            if i == j {
                self.diag[i].clone()
            } else {
                ring.zero()
            }
        })
    }

    /// Product of the diagonal entries.
    pub fn det(&self) -> R::Elem {
        let ring = &self.ring;
        self.diag
            .iter()
            .fold(ring.one(), |acc, a| ring.mul(&acc, a))
    }
}

/// `cir(a_1, ..., a_n)`: row `i` is the first row cyclically shifted right
/// `i` places, so entry `(i, j)` is `a_{(j - i) mod n + 1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct CirculantSpec<R: CommRing = ChainRing> {
    pub ring: R,
    pub row: Vec<R::Elem>,
}

impl<R: CommRing + Clone + PartialEq> CirculantSpec<R> {
    pub fn new(ring: &R, row: Vec<R::Elem>) -> Self {
        CirculantSpec {
            ring: ring.clone(),
            row,
        }
    }

    pub fn n(&self) -> usize {
        self.row.len()
    }

    pub fn expand(&self) -> RingMatrix<R> {
        let n = self.row.len();
        RingMatrix::from_fn(&self.ring, n, |i, j| self.row[(j + n - i) % n].clone())
    }

    /// Product in `R[X]/(X^n - 1)`, the polynomial model of circulants.
    pub fn mul_as_poly(&self, other: &Self) -> Result<Self> {
        if self.ring != other.ring {
            return Err(Error::RingMismatch);
        }
        let n = self.n();
        if n != other.n() {
            return Err(Error::SizeMismatch {
                left: n,
                right: other.n(),
            });
        }
        let ring = &self.ring;
        let mut out = vec![ring.zero(); n];
        for (i, a) in self.row.iter().enumerate() {
            for (j, b) in other.row.iter().enumerate() {
                let k = (i + j) % n;
                out[k] = ring.add(&out[k], &ring.mul(a, b));
            }
        }
        Ok(CirculantSpec {
            ring: ring.clone(),
            row: out,
        })
    }
}

/// Rejects `omega` unless `omega^n = 1` and `omega^k - 1` is a unit for
/// `0 < k < n` (so the order is exactly `n`, also in the residue field).
pub fn check_primitive_root(ring: &ChainRing, omega: RingElement, n: usize) -> Result<()> {
    if ring.pow(omega, n as u64) != ring.one() {
        return Err(Error::BadRoot {
            n,
            reason: format!("{}^{n} != 1", ring.format_element(omega)),
        });
    }
    let mut acc = ring.one();
    for k in 1..n {
        acc = ring.mul(acc, omega);
        if !ring.is_unit(ring.sub(acc, ring.one())) {
            return Err(Error::BadRoot {
                n,
                reason: format!(
                    "{}^{k} - 1 is not a unit",
                    ring.format_element(omega)
                ),
            });
        }
    }
    Ok(())
}

impl CirculantSpec<ChainRing> {
    /// `w_j = Σ_i a_{i+1} ω^{ij}` for `j = 0, ..., n-1`.
    pub fn eigenvalues(&self, omega: RingElement) -> Result<Vec<RingElement>> {
        let ring = &self.ring;
        let n = self.n();
        check_primitive_root(ring, omega, n)?;
        Ok(self.eigenvalues_unchecked(omega))
    }

    pub(crate) fn eigenvalues_unchecked(&self, omega: RingElement) -> Vec<RingElement> {
        let ring = &self.ring;
        let n = self.n();
        let mut step = ring.one();
        (0..n)
            .map(|_| {
                let mut power = ring.one();
                let mut w = ring.zero();
                for &a in &self.row {
                    w = ring.add(w, ring.mul(a, power));
                    power = ring.mul(power, step);
                }
                step = ring.mul(step, omega);
                w
            })
            .collect()
    }

    pub fn det_via_eigenvalues(&self, omega: RingElement) -> Result<RingElement> {
        let ring = &self.ring;
        Ok(self
            .eigenvalues(omega)?
            .into_iter()
            .fold(ring.one(), |acc, w| ring.mul(acc, w)))
    }

    /// Vandermonde diagonalization `P A P^{-1} = diag(w_0, ..., w_{n-1})`
    /// with `P_{ji} = ω^{-ij}`.
    pub fn diagonalize(&self, omega: RingElement) -> Result<Diagonalization> {
        let ring = &self.ring;
        let n = self.n();
        let eigenvalues = self.eigenvalues(omega)?;
        let omega_inv = ring.inv(omega).map_err(|_| Error::NotInvertible)?;
        let p = RingMatrix::from_fn(ring, n, |j, i| ring.pow(omega_inv, (i * j) as u64));
        let p_inv = p.inverse()?;
        Ok(Diagonalization {
            p,
            p_inv,
            d: DiagonalSpec::new(ring, eigenvalues),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagonalization {
    pub p: RingMatrix,
    pub p_inv: RingMatrix,
    pub d: DiagonalSpec,
}

impl Diagonalization {
    /// Checks `P · P^{-1} = I` and `P · A · P^{-1} = D` entry-wise.
    pub fn verify(&self, a: &RingMatrix) -> Result<bool> {
        let ring = self.p.ring();
        let n = self.p.n();
        let identity = RingMatrix::identity(ring, n);
        if self.p.mul(&self.p_inv)? != identity {
            return Ok(false);
        }
        let conj = self.p.mul(a)?.mul(&self.p_inv)?;
        Ok(conj == self.d.expand())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const CAP: u64 = 10_000_000;

    fn ring(p: u64, e: u32) -> ChainRing {
        ChainRing::integers_mod(p, e, CAP).unwrap()
    }

    fn el(x: u64) -> RingElement {
        RingElement(x)
    }

    /// Leibniz formula over all permutations, an independent reference.
    fn det_leibniz(m: &RingMatrix) -> RingElement {
        let ring = m.ring();
        let n = m.n();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut total = ring.zero();
        permute(&mut perm, 0, &mut |perm| {
            let inversions = (0..n)
                .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
                .filter(|&(i, j)| perm[i] > perm[j])
                .count();
            let term = (0..n).fold(ring.one(), |acc, i| ring.mul(acc, *m.get(i, perm[i])));
            total = if inversions % 2 == 0 {
                ring.add(total, term)
            } else {
                ring.sub(total, term)
            };
        });
        total
    }

    fn permute(v: &mut Vec<usize>, k: usize, f: &mut impl FnMut(&[usize])) {
        if k == v.len() {
            f(v);
            return;
        }
        for i in k..v.len() {
            v.swap(k, i);
            permute(v, k + 1, f);
            v.swap(k, i);
        }
    }

    #[test]
    fn det_examples() {
        let z4 = ring(2, 2);
        assert_eq!(DiagonalSpec::new(&z4, vec![el(2), el(3)]).expand().det(), el(2));
        for r in [ring(2, 3), ring(3, 1), ChainRing::galois(2, 2, 2, CAP).unwrap()] {
            for n in 1..6 {
                assert_eq!(RingMatrix::identity(&r, n).det(), r.one());
            }
        }
        let f3 = ring(3, 1);
        assert_eq!(CirculantSpec::new(&f3, vec![el(1), el(1)]).expand().det(), el(0));
    }

    #[test]
    fn subset_expansion_matches_leibniz() {
        let r = ChainRing::galois(2, 2, 2, CAP).unwrap();
        let mut seed = 12345u64;
        for n in 1..=6 {
            for _ in 0..30 {
                let m = RingMatrix::from_fn(&r, n, |_, _| {
                    seed = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                    el((seed >> 33) % r.size())
                });
                assert_eq!(m.det(), det_leibniz(&m));
            }
        }
    }

    #[test]
    fn diag_det_examples() {
        let z8 = ring(2, 3);
        assert_eq!(DiagonalSpec::new(&z8, vec![el(3), el(3)]).det(), el(1));
        assert_eq!(DiagonalSpec::new(&z8, vec![el(2), el(2)]).det(), el(4));
        for a in z8.elements(CAP).unwrap() {
            assert_eq!(DiagonalSpec::new(&z8, vec![a]).det(), a);
        }
    }

    #[test]
    fn eigenvalue_examples() {
        let f3 = ring(3, 1);
        let omega = el(2);
        for a in 0..3 {
            for b in 0..3 {
                let spec = CirculantSpec::new(&f3, vec![el(a), el(b)]);
                assert_eq!(
                    spec.eigenvalues(omega).unwrap(),
                    vec![f3.add(el(a), el(b)), f3.sub(el(a), el(b))]
                );
            }
        }
        assert_eq!(
            CirculantSpec::new(&f3, vec![el(1), el(1)]).eigenvalues(omega).unwrap(),
            vec![el(2), el(0)]
        );
        let f4 = ChainRing::galois(2, 1, 2, CAP).unwrap();
        let w = f4.root_of_unity(3).unwrap();
        let c = el(2);
        assert_eq!(
            CirculantSpec::new(&f4, vec![c, el(0), el(0)]).eigenvalues(w).unwrap(),
            vec![c, c, c]
        );
    }

    #[test]
    fn det_via_eigenvalue_examples() {
        let f3 = ring(3, 1);
        let cir = |a, b| CirculantSpec::new(&f3, vec![el(a), el(b)]);
        assert_eq!(cir(1, 1).det_via_eigenvalues(el(2)), Ok(el(0)));
        assert_eq!(cir(0, 1).det_via_eigenvalues(el(2)), Ok(el(2)));
        let f4 = ChainRing::galois(2, 1, 2, CAP).unwrap();
        let w = f4.root_of_unity(3).unwrap();
        let id = CirculantSpec::new(&f4, vec![el(1), el(0), el(0)]);
        assert_eq!(id.det_via_eigenvalues(w), Ok(f4.one()));
    }

    #[test]
    fn bad_roots_rejected() {
        let f3 = ring(3, 1);
        let spec = CirculantSpec::new(&f3, vec![el(1), el(1)]);
        assert!(matches!(spec.eigenvalues(el(1)), Err(Error::BadRoot { .. })));
        assert!(matches!(spec.eigenvalues(el(0)), Err(Error::BadRoot { .. })));
        // 4 has order 3 in Z/9, but 4 - 1 = 3 is not a unit
        let z9 = ring(3, 2);
        let spec = CirculantSpec::new(&z9, vec![el(1), el(2), el(0)]);
        assert!(matches!(spec.eigenvalues(el(4)), Err(Error::BadRoot { .. })));
    }

    #[test]
    fn poly_product_examples() {
        let f3 = ring(3, 1);
        let cir = |v: &[u64]| CirculantSpec::new(&f3, v.iter().map(|&x| el(x)).collect());
        let x = cir(&[2, 1]);
        assert_eq!(x.mul_as_poly(&cir(&[1, 0])).unwrap(), x);
        assert_eq!(cir(&[0, 1]).mul_as_poly(&cir(&[0, 1])).unwrap(), cir(&[1, 0]));
        assert_eq!(cir(&[1, 1]).mul_as_poly(&cir(&[1, 2])).unwrap(), cir(&[0, 0]));
        assert_eq!(
            cir(&[1, 1]).mul_as_poly(&cir(&[1, 2, 0])).unwrap_err(),
            Error::SizeMismatch { left: 2, right: 3 }
        );
        let z9 = ring(3, 2);
        let other = CirculantSpec::new(&z9, vec![el(1), el(1)]);
        assert_eq!(cir(&[1, 1]).mul_as_poly(&other).unwrap_err(), Error::RingMismatch);
    }

    #[test]
    fn poly_product_matches_matrix_product_exhaustively() {
        for r in [ring(2, 1), ring(3, 1), ring(2, 2), ring(3, 2), ChainRing::poly_u(2, 1, 3, CAP).unwrap()] {
            if r.size() > 9 {
                continue;
            }
            for n in 1..=3usize {
                let rows = all_rows(&r, n);
                for x in &rows {
                    for y in &rows {
                        let a = CirculantSpec::new(&r, x.clone());
                        let b = CirculantSpec::new(&r, y.clone());
                        let prod = a.mul_as_poly(&b).unwrap().expand();
                        assert_eq!(prod, a.expand().mul(&b.expand()).unwrap());
                    }
                }
            }
        }
    }

    fn all_rows(r: &ChainRing, n: usize) -> Vec<Vec<RingElement>> {
        let elems: Vec<RingElement> = r.elements(CAP).unwrap().collect();
        let mut out = vec![vec![]];
        for _ in 0..n {
            out = out
                .into_iter()
                .flat_map(|row: Vec<RingElement>| {
                    elems.iter().map(move |&x| {
                        let mut next = row.clone();
                        next.push(x);
                        next
                    })
                })
                .collect();
        }
        out
    }

    #[test]
    fn diagonalization_examples() {
        let f3 = ring(3, 1);
        for a in 0..3 {
            for b in 0..3 {
                let spec = CirculantSpec::new(&f3, vec![el(a), el(b)]);
                let diag = spec.diagonalize(el(2)).unwrap();
                assert_eq!(diag.d.diag, vec![f3.add(el(a), el(b)), f3.sub(el(a), el(b))]);
                assert!(diag.verify(&spec.expand()).unwrap());
            }
        }
        let z9 = ring(3, 2);
        let spec = CirculantSpec::new(&z9, vec![el(1), el(1)]);
        let diag = spec.diagonalize(z9.root_of_unity(2).unwrap()).unwrap();
        assert_eq!(diag.d.diag, vec![el(2), el(0)]);
        assert!(diag.verify(&spec.expand()).unwrap());

        let gr = ChainRing::galois(3, 2, 2, CAP).unwrap();
        let w = gr.root_of_unity(4).unwrap();
        let c = el(7);
        let scalar = CirculantSpec::new(&gr, vec![c, el(0), el(0), el(0)]);
        let diag = scalar.diagonalize(w).unwrap();
        assert_eq!(diag.d.diag, vec![c; 4]);
        assert!(diag.verify(&scalar.expand()).unwrap());
    }

    #[test]
    fn two_parameter_circulant_determinant() {
        for r in [ring(2, 2), ring(3, 1), ring(3, 2), ChainRing::poly_u(2, 1, 2, CAP).unwrap()] {
            for n in 1..=5usize {
                for a in r.elements(CAP).unwrap() {
                    for b in r.elements(CAP).unwrap() {
                        let mut row = vec![b; n];
                        row[0] = a;
                        let det = CirculantSpec::new(&r, row).expand().det();
                        let expected = r.mul(
                            r.pow(r.sub(a, b), n as u64 - 1),
                            r.add(a, r.mul(r.from_int(n as i64 - 1), b)),
                        );
                        assert_eq!(det, expected, "{r} n={n}");
                    }
                }
            }
        }
    }

    #[test]
    fn adjugate_identity() {
        let r = ring(2, 3);
        let m = RingMatrix::from_rows(
            &r,
            vec![vec![el(1), el(2), el(3)], vec![el(4), el(5), el(6)], vec![el(7), el(0), el(1)]],
        )
        .unwrap();
        let prod = m.mul(&m.adjugate()).unwrap();
        let d = m.det();
        assert_eq!(prod, RingMatrix::from_fn(&r, 3, |i, j| if i == j { d } else { r.zero() }));
    }
}

//! Exact rank, super-rank and canonical subspaces over the ambient field,
//! plus a modular rank filter that certifies full rank without exact
//! arithmetic.

use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{reduce_bigint, Field, FieldValue, ModRing};
use crate::numtheory::pow_mod;
use crate::orbit::{check_degree, ExpTuple, ProjPoint};

pub type Matrix = Vec<Vec<FieldValue>>;

fn shape(m: &[Vec<FieldValue>]) -> (usize, usize) {
    (m.len(), m.first().map_or(0, Vec::len))
}

fn all_rational(m: &[Vec<FieldValue>]) -> bool {
    m.iter().flatten().all(|v| v.field().is_rational())
}

/// Bareiss fraction-free elimination on an integer matrix; returns the rank.
pub fn bareiss_rank(mut a: Vec<Vec<BigInt>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut prev = BigInt::one();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        for i in rank + 1..rows {
            for j in c + 1..cols {
                let num = &a[rank][c] * &a[i][j] - &a[i][c] * &a[rank][j];
                let (q, r) = num.div_rem(&prev);
                debug_assert!(r.is_zero(), "Bareiss division must be exact");
                a[i][j] = q;
            }
            a[i][c] = BigInt::zero();
        }
        prev = a[rank][c].clone();
        rank += 1;
    }
    rank
}

/// Scales each row by its denominator lcm, giving an integer matrix with
/// the same rank.
fn clear_denominators(m: &[Vec<FieldValue>]) -> Vec<Vec<BigInt>> {
    m.iter()
        .map(|row| {
            let l = row.iter().fold(BigInt::one(), |acc, v| acc.lcm(&v.denominator_lcm()));
            row.iter()
                .map(|v| {
                    let q = &v.coeffs()[0];
                    q.numer() * (&l / q.denom())
                })
                .collect()
        })
        .collect()
}

/// Row echelon form over the field with pivots scaled to one; returns the
/// nonzero rows and their pivot columns. With `reduce` set, entries above
/// each pivot are cleared too (RREF).
fn echelon(mut a: Matrix, reduce: bool) -> Result<(Matrix, Vec<usize>)> {
    let (rows, cols) = shape(&a);
    let mut pivots = Vec::new();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let Some(piv) = (rank..rows).find(|&i| !a[i][c].is_zero()) else {
            continue;
        };
        a.swap(rank, piv);
        let inv = a[rank][c].inverse()?;
        a[rank] = a[rank].iter().map(|v| v * &inv).collect();
        let pivot_row = a[rank].clone();
        let targets: Vec<usize> = if reduce { (0..rows).filter(|&i| i != rank).collect() } else { (rank + 1..rows).collect() };
        for i in targets {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = a[i][c].clone();
            for j in c..cols {
                if !pivot_row[j].is_zero() {
                    a[i][j] = &a[i][j] - &(&factor * &pivot_row[j]);
                }
            }
        }
        pivots.push(c);
        rank += 1;
    }
    a.truncate(rank);
    Ok((a, pivots))
}

/// Exact rank. Rational matrices go through Bareiss elimination on cleared
/// denominators; other ambients use elimination with exact division.
pub fn rank(m: &[Vec<FieldValue>]) -> Result<usize> {
    if m.is_empty() {
        return Ok(0);
    }
    if all_rational(m) {
        return Ok(bareiss_rank(clear_denominators(m)));
    }
    Ok(echelon(m.to_vec(), false)?.1.len())
}

/// Exact determinant of a square matrix by elimination.
pub fn determinant(m: &[Vec<FieldValue>]) -> Result<FieldValue> {
    let (rows, cols) = shape(m);
    if rows != cols || rows == 0 {
        return Err(Error::NonSquareMatrix { rows, cols });
    }
    let field = m[0][0].field().clone();
    let mut a = m.to_vec();
    let mut det = FieldValue::one(&field);
    for c in 0..cols {
        let Some(piv) = (c..rows).find(|&i| !a[i][c].is_zero()) else {
            return Ok(FieldValue::zero(&field));
        };
        if piv != c {
            a.swap(c, piv);
            det = -det;
        }
        det = &det * &a[c][c];
        let inv = a[c][c].inverse()?;
        for i in c + 1..rows {
            if a[i][c].is_zero() {
                continue;
            }
            let factor = &a[i][c] * &inv;
            for j in c..cols {
                a[i][j] = &a[i][j] - &(&factor * &a[c][j]);
            }
        }
    }
    Ok(det)
}

/// Whether `a` (with `r + 1` rows) has rank `r` and every `r`-row
/// submatrix also has rank `r`.
pub fn super_rank(a: &[Vec<FieldValue>]) -> Result<bool> {
    let (rows, cols) = shape(a);
    if rows == 0 || cols < rows {
        return Err(Error::ShapeMismatch { rows, cols });
    }
    let r = rows - 1;
    if rank(a)? != r {
        return Ok(false);
    }
    for t in 0..rows {
        if deleted_row_rank_of(a, t)? != r {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Rank of `a` with row `t` removed.
pub fn deleted_row_rank_of(a: &[Vec<FieldValue>], t: usize) -> Result<usize> {
    if t >= a.len() {
        return Err(Error::IndexOutOfRange { index: t, limit: a.len() });
    }
    let rest: Matrix = a.iter().enumerate().filter(|(i, _)| *i != t).map(|(_, r)| r.clone()).collect();
    rank(&rest)
}

/// A linear subspace of `P^n`, held as the RREF of a spanning set.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct Subspace {
    field: Field,
    n: usize,
    basis: Matrix,
    pivots: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SubspaceJson {
    pub n: usize,
    pub basis: Vec<Vec<Vec<String>>>,
}

impl Subspace {
    /// Span of arbitrary coordinate rows (not necessarily independent).
    pub fn from_rows(field: &Field, rows: Matrix) -> Result<Subspace> {
        let (nrows, cols) = shape(&rows);
        if nrows == 0 || cols == 0 {
            return Err(Error::ShapeMismatch { rows: nrows, cols });
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::ShapeMismatch { rows: nrows, cols });
        }
        let (basis, pivots) = echelon(rows, true)?;
        if basis.is_empty() {
            return Err(Error::Parse("span of zero vectors".into()));
        }
        Ok(Subspace {
            field: field.clone(),
            n: cols - 1,
            basis,
            pivots,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn basis(&self) -> &Matrix {
        &self.basis
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn dim_projective(&self) -> usize {
        self.basis.len() - 1
    }

    /// Membership by reduction against the RREF basis.
    pub fn contains(&self, q: &ProjPoint) -> Result<bool> {
        if q.dim() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n + 1,
                found: q.dim() + 1,
            });
        }
        let mut v = q.coords().to_vec();
        for (row, &c) in self.basis.iter().zip(&self.pivots) {
            if v[c].is_zero() {
                continue;
            }
            let factor = v[c].clone();
            for j in 0..v.len() {
                if !row[j].is_zero() {
                    v[j] = &v[j] - &(&factor * &row[j]);
                }
            }
        }
        Ok(v.iter().all(FieldValue::is_zero))
    }

    /// Canonical serialized form, also used as the dedup key.
    pub fn key(&self) -> String {
        serde_json::to_string(&self.to_json()).expect("subspace serializes")
    }

    pub fn to_json(&self) -> SubspaceJson {
        SubspaceJson {
            n: self.n,
            basis: self.basis.iter().map(|r| r.iter().map(FieldValue::to_strings).collect()).collect(),
        }
    }

    pub fn from_json(field: &Field, js: &SubspaceJson) -> Result<Subspace> {
        let rows = js
            .basis
            .iter()
            .map(|r| r.iter().map(|e| FieldValue::parse(field, e)).collect::<Result<Vec<_>>>())
            .collect::<Result<Matrix>>()?;
        let s = Self::from_rows(field, rows)?;
        if s.n != js.n {
            return Err(Error::DimensionMismatch { expected: js.n + 1, found: s.n + 1 });
        }
        Ok(s)
    }
}

/// RREF span of a list of points.
pub fn span_canonical(rows: &[ProjPoint]) -> Result<Subspace> {
    let first = rows.first().ok_or(Error::ShapeMismatch { rows: 0, cols: 0 })?;
    Subspace::from_rows(first.field(), rows.iter().map(|p| p.coords().to_vec()).collect())
}

// ---- modular rank filter ----

/// Rank of a matrix over `F_p[x]/(f)` using only unit pivots. The result
/// never exceeds the exact rank of any lift: the pivot minor maps to a unit.
pub fn mod_rank(ring: &ModRing, mut a: Vec<Vec<Vec<u64>>>) -> usize {
    let rows = a.len();
    if rows == 0 {
        return 0;
    }
    let cols = a[0].len();
    let mut rank = 0;
    for c in 0..cols {
        if rank == rows {
            break;
        }
        let found = (rank..rows).find_map(|i| ring.inverse(&a[i][c]).map(|inv| (i, inv)));
        let Some((piv, inv)) = found else {
            continue;
        };
        a.swap(rank, piv);
        let pivot_row: Vec<Vec<u64>> = a[rank].iter().map(|v| ring.mul(v, &inv)).collect();
        for i in rank + 1..rows {
            if ring.is_zero(&a[i][c]) {
                continue;
            }
            let factor = a[i][c].clone();
            for j in c..cols {
                let prod = ring.mul(&factor, &pivot_row[j]);
                a[i][j] = ring.sub(&a[i][j], &prod);
            }
        }
        a[rank] = pivot_row;
        rank += 1;
    }
    rank
}

/// Residues of the orbit `phi^m(P)` for `m = 0..=max` in one quotient ring.
pub struct ModularOrbit {
    ring: Arc<ModRing>,
    rows: Vec<Vec<Vec<u64>>>,
}

impl ModularOrbit {
    pub fn new(p: &ProjPoint, d: u64, max: u64, prime: u64) -> Result<ModularOrbit> {
        let ring = p.field().mod_ring(prime)?;
        let base = p
            .coords()
            .iter()
            .map(|c| c.reduce_mod(&ring).map(|r| r.into_coeffs()))
            .collect::<Result<Vec<_>>>()?;
        let mut rows = Vec::with_capacity(max as usize + 1);
        if ring.is_prime_field() {
            // Fermat: a^(d^m) = a^(d^m mod (p-1)) for a != 0
            for m in 0..=max {
                let e = pow_mod(d, m, prime - 1);
                let e = if e == 0 { prime - 1 } else { e };
                rows.push(
                    base.iter()
                        .map(|a| vec![if a[0] == 0 { 0 } else { pow_mod(a[0], e, prime) }])
                        .collect(),
                );
            }
        } else {
            let mut cur = base;
            for m in 0..=max {
                if m > 0 {
                    cur = cur.iter().map(|a| ring.iterated_pow(a, d, 1)).collect();
                }
                rows.push(cur.clone());
            }
        }
        Ok(ModularOrbit { ring, rows })
    }

    pub fn prime(&self) -> u64 {
        self.ring.prime()
    }

    pub fn rank_of(&self, m: &ExpTuple) -> usize {
        let a = m.entries().iter().map(|&i| self.rows[i as usize].clone()).collect();
        mod_rank(&self.ring, a)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum FilterVerdict {
    /// Some prime shows rank `r + 1`, so the tuple is not super-rank `r`.
    CertifiedFullRank { prime: u64 },
    /// No prime certified full rank; exact confirmation is required.
    Candidate { max_modular_rank: usize, primes_used: Vec<u64>, primes_rejected: Vec<u64> },
}

impl FilterVerdict {
    pub fn is_certified(&self) -> bool {
        matches!(self, FilterVerdict::CertifiedFullRank { .. })
    }
}

/// Runs the modular filter for `A_m` against each of `primes`.
pub fn modular_rank_filter(p: &ProjPoint, d: u64, m: &ExpTuple, r: usize, primes: &[u64]) -> Result<FilterVerdict> {
    check_degree(d)?;
    p.require_nonzero_coords()?;
    let orbits: Vec<std::result::Result<ModularOrbit, u64>> = primes
        .iter()
        .map(|&q| ModularOrbit::new(p, d, m.max(), q).map_err(|_| q))
        .collect();
    filter_with_orbits(&orbits, m, r)
}

/// Filter step against precomputed modular orbits (`Err(prime)` marks a
/// rejected prime).
pub fn filter_with_orbits(
    orbits: &[std::result::Result<ModularOrbit, u64>],
    m: &ExpTuple,
    r: usize,
) -> Result<FilterVerdict> {
    let mut used = Vec::new();
    let mut rejected = Vec::new();
    let mut best = 0;
    for o in orbits {
        match o {
            Err(q) => rejected.push(*q),
            Ok(orbit) => {
                let k = orbit.rank_of(m);
                if k == r + 1 {
                    return Ok(FilterVerdict::CertifiedFullRank { prime: orbit.prime() });
                }
                best = best.max(k);
                used.push(orbit.prime());
            }
        }
    }
    if used.is_empty() {
        return Err(Error::AllPrimesBad);
    }
    Ok(FilterVerdict::Candidate {
        max_modular_rank: best,
        primes_used: used,
        primes_rejected: rejected,
    })
}

/// Reduction of a rational integer matrix mod `p`, used in tests that
/// compare modular and exact rank.
pub fn int_matrix_mod(m: &[Vec<BigInt>], p: u64) -> Vec<Vec<Vec<u64>>> {
    m.iter().map(|r| r.iter().map(|v| vec![reduce_bigint(v, p)]).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{cyclotomic, rationals, Rational};
    use crate::orbit::{iterate_matrix, ExponentBudget};

    fn int_matrix(f: &Field, rows: &[&[i64]]) -> Matrix {
        rows.iter().map(|r| r.iter().map(|&v| FieldValue::from_int(f, v)).collect()).collect()
    }

    #[test]
    fn ranks() {
        let f = rationals();
        assert_eq!(rank(&int_matrix(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap(), 3);
        assert_eq!(rank(&int_matrix(&f, &[&[1, 2, -3], &[1, 4, 9], &[1, 16, 81]])).unwrap(), 2);
        assert_eq!(rank(&int_matrix(&f, &[&[1, 2, 3], &[1, 2, 3], &[0, 1, 5]])).unwrap(), 2);
        assert_eq!(rank(&int_matrix(&f, &[&[0, 0], &[0, 0]])).unwrap(), 0);
        let a = int_matrix(&f, &[&[1, 2, -3], &[1, 4, 9], &[1, 256, 6561]]);
        assert_eq!(determinant(&a).unwrap(), FieldValue::from_int(&f, 10080));
        let a = int_matrix(&f, &[&[1, 4, 9], &[1, 16, 81], &[1, 256, 6561]]);
        assert_eq!(determinant(&a).unwrap(), FieldValue::from_int(&f, 60480));
        let a = int_matrix(&f, &[&[0, 1], &[1, 0]]);
        assert_eq!(determinant(&a).unwrap(), FieldValue::from_int(&f, -1));
    }

    #[test]
    fn rank_with_fractions_matches_field_elimination() {
        let f = rationals();
        let q = |s: &str| FieldValue::from_rational(&f, crate::field::parse_rational(s).unwrap());
        let m = vec![vec![q("1/2"), q("1/3"), q("1")], vec![q("3/2"), q("1"), q("3")], vec![q("0"), q("1/7"), q("2")]];
        assert_eq!(rank(&m).unwrap(), 2);
        assert_eq!(echelon(m, false).unwrap().1.len(), 2);
    }

    #[test]
    fn super_rank_cases() {
        let f = rationals();
        assert!(super_rank(&int_matrix(&f, &[&[1, 2, -3], &[1, 4, 9], &[1, 16, 81]])).unwrap());
        assert!(!super_rank(&int_matrix(&f, &[&[1, 2, 3], &[1, 2, 3], &[2, 4, 6]])).unwrap());
        assert!(!super_rank(&int_matrix(&f, &[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1]])).unwrap());
        assert!(matches!(super_rank(&int_matrix(&f, &[&[1], &[2]])), Err(Error::ShapeMismatch { .. })));
    }

    #[test]
    fn canonical_spans() {
        let f = rationals();
        let pts = |rows: &[&[i64]]| rows.iter().map(|r| ProjPoint::from_ints(&f, r).unwrap()).collect::<Vec<_>>();
        let s = span_canonical(&pts(&[&[1, 0, 0], &[0, 1, 0]])).unwrap();
        assert_eq!(s.basis(), &int_matrix(&f, &[&[1, 0, 0], &[0, 1, 0]]));
        assert_eq!(s.dim_projective(), 1);
        let line = span_canonical(&pts(&[&[1, 2, -3], &[1, 4, 9], &[1, 16, 81]])).unwrap();
        assert_eq!(line.rank(), 2);
        // 1*[1,0,-15] + 2*[0,1,6]... RREF of the line through [1,2,-3] and [1,4,9]
        assert_eq!(line.basis(), &int_matrix(&f, &[&[1, 0, -15], &[0, 1, 6]]));
        assert_eq!(span_canonical(&pts(&[&[3, 1, 2]])).unwrap().dim_projective(), 0);
        // scaling the inputs does not change the span
        let scaled = span_canonical(&pts(&[&[-2, -4, 6], &[5, 20, 45]])).unwrap();
        assert_eq!(scaled, line);
    }

    #[test]
    fn membership() {
        let f = rationals();
        let line = span_canonical(&[
            ProjPoint::from_ints(&f, &[1, 2, -3]).unwrap(),
            ProjPoint::from_ints(&f, &[1, 4, 9]).unwrap(),
        ])
        .unwrap();
        assert!(line.contains(&ProjPoint::from_ints(&f, &[1, 16, 81]).unwrap()).unwrap());
        assert!(!line.contains(&ProjPoint::from_ints(&f, &[1, 256, 6561]).unwrap()).unwrap());
        assert!(line.contains(&ProjPoint::from_ints(&f, &[1, 2, -3]).unwrap()).unwrap());
        assert!(matches!(
            line.contains(&ProjPoint::from_ints(&f, &[1, 2]).unwrap()),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn filter_verdicts() {
        let f = rationals();
        let m = ExpTuple::new(vec![0, 1, 2]).unwrap();
        let generic = ProjPoint::from_ints(&f, &[1, 2, 3]).unwrap();
        assert_eq!(
            modular_rank_filter(&generic, 2, &m, 2, &[10007]).unwrap(),
            FilterVerdict::CertifiedFullRank { prime: 10007 }
        );
        let special = ProjPoint::from_ints(&f, &[1, 2, -3]).unwrap();
        let v = modular_rank_filter(&special, 2, &m, 2, &[10007, 1_000_003, 998_244_353]).unwrap();
        assert!(!v.is_certified());
        let half = ProjPoint::from_rationals(
            &f,
            &[Rational::from_integer(1.into()), Rational::new(1.into(), 7.into()), Rational::from_integer(2.into())],
        )
        .unwrap();
        assert_eq!(modular_rank_filter(&half, 2, &m, 2, &[7]).unwrap_err(), Error::AllPrimesBad);
    }

    #[test]
    fn cyclotomic_filter_and_rank() {
        let c5 = cyclotomic(5).unwrap();
        let z = FieldValue::generator(&c5);
        let p = ProjPoint::new(&c5, vec![FieldValue::one(&c5), z, FieldValue::from_int(&c5, 2), FieldValue::from_int(&c5, 3)])
            .unwrap();
        // indices 0, 4, 8 share zeta coordinate, so they lie on x1 = zeta x0
        let m = ExpTuple::new(vec![0, 4, 8]).unwrap();
        let a = iterate_matrix(&p, 2, &m, ExponentBudget::default()).unwrap().materialize().unwrap();
        assert_eq!(rank(&a).unwrap(), 3);
        let m2 = ExpTuple::new(vec![0, 1, 2, 3]).unwrap();
        let v = modular_rank_filter(&p, 2, &m2, 3, &[11, 31, 41]).unwrap();
        let a2 = iterate_matrix(&p, 2, &m2, ExponentBudget::default()).unwrap().materialize().unwrap();
        assert_eq!(rank(&a2).unwrap(), 4);
        assert!(v.is_certified());
    }
}

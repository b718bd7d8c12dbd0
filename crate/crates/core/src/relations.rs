//! The multiplicative relation lattice of a point: integer vectors `e`
//! with `sum e_i = 0` and `prod alpha_i^e_i = 1`.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{FieldValue, Rational};
use crate::numtheory::{coprime_base, valuation};
use crate::orbit::ProjPoint;

/// Prime factorization data of a point with nonzero rational coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExponentMatrix {
    /// Pairwise coprime base (primes whenever trial division suffices).
    pub primes: Vec<BigUint>,
    /// `rows[i][j]` is the exponent of `primes[j]` in coordinate `i`.
    pub rows: Vec<Vec<i64>>,
    pub signs: Vec<i8>,
}

fn signed_valuation(q: &Rational, b: &BigUint) -> i64 {
    let num = q.numer().magnitude();
    let den = q.denom().magnitude();
    valuation(num, b) as i64 - valuation(den, b) as i64
}

fn exponent_matrix_of(values: &[Rational]) -> ExponentMatrix {
    let mut parts = Vec::new();
    for q in values {
        parts.push(q.numer().magnitude().clone());
        parts.push(q.denom().magnitude().clone());
    }
    let primes = coprime_base(&parts);
    let rows = values.iter().map(|q| primes.iter().map(|b| signed_valuation(q, b)).collect()).collect();
    let signs = values.iter().map(|q| if q.is_negative() { -1 } else { 1 }).collect();
    ExponentMatrix { primes, rows, signs }
}

/// Factorization of every coordinate over a common coprime base.
pub fn exponent_matrix(p: &ProjPoint) -> Result<ExponentMatrix> {
    p.require_nonzero_coords()?;
    let values = p
        .coords()
        .iter()
        .map(|c| c.as_rational().cloned().ok_or_else(|| Error::Unsupported("non-rational coordinate".into())))
        .collect::<Result<Vec<_>>>()?;
    Ok(exponent_matrix_of(&values))
}

/// A sublattice of `Z^dim` held in row Hermite normal form.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RelLattice {
    dim: usize,
    basis: Vec<Vec<BigInt>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RelLatticeJson {
    pub rank: usize,
    pub basis: Vec<Vec<i64>>,
}

impl RelLattice {
    /// Lattice spanned by arbitrary integer generators.
    pub fn from_generators(dim: usize, gens: Vec<Vec<BigInt>>) -> Result<RelLattice> {
        if let Some(g) = gens.iter().find(|g| g.len() != dim) {
            return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
        }
        Ok(RelLattice { dim, basis: hnf(gens, dim) })
    }

    pub fn trivial(dim: usize) -> RelLattice {
        RelLattice { dim, basis: Vec::new() }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    pub fn is_trivial(&self) -> bool {
        self.basis.is_empty()
    }

    pub fn basis(&self) -> &[Vec<BigInt>] {
        &self.basis
    }

    pub fn to_json(&self) -> RelLatticeJson {
        RelLatticeJson {
            rank: self.rank(),
            basis: self
                .basis
                .iter()
                .map(|r| r.iter().map(|v| v.to_i64().expect("relation entries fit in i64")).collect())
                .collect(),
        }
    }
}

fn pivot_col(row: &[BigInt]) -> Option<usize> {
    row.iter().position(|v| !v.is_zero())
}

/// Row Hermite normal form restricted to the first `cols` columns; the
/// remaining columns are carried along by the same row operations. Zero
/// rows (in the leading block) are returned separately, in order.
fn echelon_int(mut rows: Vec<Vec<BigInt>>, cols: usize) -> (Vec<Vec<BigInt>>, Vec<Vec<BigInt>>) {
    let mut done: Vec<Vec<BigInt>> = Vec::new();
    for c in 0..cols {
        // Euclid on column c among the remaining rows
        loop {
            let mut nz: Vec<usize> = (0..rows.len()).filter(|&i| !rows[i][c].is_zero()).collect();
            if nz.len() <= 1 {
                break;
            }
            nz.sort_by(|&a, &b| rows[a][c].abs().cmp(&rows[b][c].abs()));
            let piv = nz[0];
            for &i in &nz[1..] {
                let q = rows[i][c].div_floor(&rows[piv][c]);
                let sub: Vec<BigInt> = rows[piv].iter().map(|v| v * &q).collect();
                for (x, s) in rows[i].iter_mut().zip(sub) {
                    *x -= s;
                }
            }
        }
        if let Some(i) = (0..rows.len()).find(|&i| !rows[i][c].is_zero()) {
            let mut row = rows.remove(i);
            if row[c].is_negative() {
                row.iter_mut().for_each(|v| *v = -v.clone());
            }
            for prev in done.iter_mut() {
                let q = prev[c].div_floor(&row[c]);
                if !q.is_zero() {
                    for (x, s) in prev.iter_mut().zip(&row) {
                        *x -= &q * s;
                    }
                }
            }
            done.push(row);
        }
    }
    (done, rows)
}

fn hnf(rows: Vec<Vec<BigInt>>, dim: usize) -> Vec<Vec<BigInt>> {
    let (basis, _) = echelon_int(rows, dim);
    basis
}

/// Left integer kernel of `b`: all integer `x` with `x * b = 0`, as a
/// lattice basis (not reduced).
fn left_kernel(b: &[Vec<BigInt>], cols: usize) -> Vec<Vec<BigInt>> {
    let n = b.len();
    let aug: Vec<Vec<BigInt>> = b
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { BigInt::one() } else { BigInt::zero() }));
            r
        })
        .collect();
    let (_, zero) = echelon_int(aug, cols);
    zero.into_iter().map(|r| r[cols..].to_vec()).collect()
}

/// Multiplicative data of one coordinate: `sign * q * zeta^j` with `q > 0`.
struct Decomposed {
    positive: Rational,
    negative: bool,
    zeta_power: u64,
}

fn decompose(c: &FieldValue) -> Result<Decomposed> {
    let (q, j) = if let Some(q) = c.as_rational() {
        (q.clone(), 0)
    } else if let Some((q, j)) = c.as_scaled_root_of_unity() {
        (q, j)
    } else {
        return Err(Error::Unsupported(format!("relation lattice for coordinate {c}")));
    };
    Ok(Decomposed {
        negative: q.is_negative(),
        positive: q.abs(),
        zeta_power: j,
    })
}

/// Raises a coordinate to a signed integer power.
fn signed_pow(c: &FieldValue, e: &BigInt) -> Result<FieldValue> {
    let base = if e.is_negative() { c.inverse()? } else { c.clone() };
    base.pow(e.magnitude())
}

/// Exact value of `prod alpha_i^e_i`.
pub fn relation_value(p: &ProjPoint, e: &[BigInt]) -> Result<FieldValue> {
    if e.len() != p.coords().len() {
        return Err(Error::DimensionMismatch { expected: p.coords().len(), found: e.len() });
    }
    let mut acc = FieldValue::one(p.field());
    for (c, k) in p.coords().iter().zip(e) {
        if !k.is_zero() {
            acc = &acc * &signed_pow(c, k)?;
        }
    }
    Ok(acc)
}

/// Whether `e` is a multiplicative relation of `p` (sum zero, product one).
pub fn is_relation(p: &ProjPoint, e: &[BigInt]) -> Result<bool> {
    let sum: BigInt = e.iter().sum();
    Ok(sum.is_zero() && relation_value(p, e)?.is_one())
}

/// The full lattice `R(P)`. Rational coordinates are handled exactly, and
/// in a cyclotomic ambient so are coordinates of the form `q * zeta^j`;
/// -1 and `zeta` are treated as torsion of orders 2 and `l`.
pub fn relation_lattice(p: &ProjPoint) -> Result<RelLattice> {
    p.require_nonzero_coords()?;
    let parts = p.coords().iter().map(decompose).collect::<Result<Vec<_>>>()?;
    let ell = p.field().cyclotomic_order();
    let em = exponent_matrix_of(&parts.iter().map(|d| d.positive.clone()).collect::<Vec<_>>());
    let n1 = parts.len();

    // columns: prime exponents, coordinate sum, sign parity, zeta power
    let mut cols = em.primes.len() + 2;
    if ell.is_some() {
        cols += 1;
    }
    let mut b: Vec<Vec<BigInt>> = (0..n1)
        .map(|i| {
            let mut row: Vec<BigInt> = em.rows[i].iter().map(|&v| BigInt::from(v)).collect();
            row.push(BigInt::one());
            row.push(BigInt::from(parts[i].negative as u8));
            if ell.is_some() {
                row.push(BigInt::from(parts[i].zeta_power));
            }
            row
        })
        .collect();
    let mut aux = vec![BigInt::zero(); cols];
    aux[em.primes.len() + 1] = BigInt::from(2);
    b.push(aux);
    if let Some(l) = ell {
        let mut aux = vec![BigInt::zero(); cols];
        aux[cols - 1] = BigInt::from(l);
        b.push(aux);
    }
    let gens: Vec<Vec<BigInt>> = left_kernel(&b, cols).into_iter().map(|k| k[..n1].to_vec()).collect();
    let lattice = RelLattice::from_generators(n1, gens)?;
    for e in lattice.basis() {
        if !is_relation(p, e)? {
            return Err(Error::WrongRelationRank(format!("basis vector {e:?} is not a relation")));
        }
    }
    Ok(lattice)
}

/// Membership of an integer vector in the lattice.
pub fn lattice_contains(l: &RelLattice, v: &[BigInt]) -> Result<bool> {
    if v.len() != l.dim {
        return Err(Error::DimensionMismatch { expected: l.dim, found: v.len() });
    }
    let mut v = v.to_vec();
    for row in &l.basis {
        let c = pivot_col(row).expect("HNF rows are nonzero");
        if v[..c].iter().any(|x| !x.is_zero()) {
            return Ok(false);
        }
        let (q, r) = v[c].div_rem(&row[c]);
        if !r.is_zero() {
            return Ok(false);
        }
        for (x, s) in v.iter_mut().zip(row) {
            *x -= &q * s;
        }
    }
    Ok(v.iter().all(Zero::is_zero))
}

pub fn lattice_contains_i64(l: &RelLattice, v: &[i64]) -> Result<bool> {
    lattice_contains(l, &v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>())
}

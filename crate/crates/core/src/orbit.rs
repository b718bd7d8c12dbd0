//! Points of projective space and their orbits under the power map
//! `[z_0, ..., z_n] -> [z_0^d, ..., z_n^d]`.

use std::fmt;

use num_bigint::BigUint;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldValue, Rational};
use crate::linalg::Subspace;

/// Default cap on the exponent `d^m` for exact iterates.
pub const DEFAULT_EXPONENT_BUDGET: u64 = 1 << 40;

/// Upper bound on `d^m` allowed in exact computations.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExponentBudget(pub u64);

impl Default for ExponentBudget {
    fn default() -> Self {
        ExponentBudget(DEFAULT_EXPONENT_BUDGET)
    }
}

impl ExponentBudget {
    /// `d^m` as an exact integer, or an error when it exceeds the budget.
    pub fn exponent(&self, d: u64, m: u64) -> Result<BigUint> {
        let exceeded = Error::ExponentBudgetExceeded {
            degree: d,
            iterate: m,
            budget: self.0,
        };
        let e = BigUint::from(d).pow(m.to_u32().ok_or(exceeded.clone())?);
        if e > BigUint::from(self.0) {
            return Err(exceeded);
        }
        Ok(e)
    }
}

/// A point of `P^n`, scaled so its first nonzero coordinate is 1.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct ProjPoint {
    field: Field,
    coords: Vec<FieldValue>,
}

impl ProjPoint {
    pub fn new(field: &Field, coords: Vec<FieldValue>) -> Result<ProjPoint> {
        if coords.is_empty() {
            return Err(Error::Parse("a point needs at least one coordinate".into()));
        }
        for c in &coords {
            if c.field() != field {
                return Err(Error::MixedAmbients);
            }
        }
        let lead = coords
            .iter()
            .find(|c| !c.is_zero())
            .ok_or_else(|| Error::Parse("all coordinates are zero".into()))?
            .inverse()?;
        let coords = if lead.is_one() {
            coords
        } else {
            coords.iter().map(|c| c * &lead).collect()
        };
        Ok(ProjPoint {
            field: field.clone(),
            coords,
        })
    }

    pub fn from_rationals(field: &Field, coords: &[Rational]) -> Result<ProjPoint> {
        let coords = coords.iter().map(|q| FieldValue::from_rational(field, q.clone())).collect();
        Self::new(field, coords)
    }

    pub fn from_ints(field: &Field, coords: &[i64]) -> Result<ProjPoint> {
        let coords = coords.iter().map(|&v| FieldValue::from_int(field, v)).collect();
        Self::new(field, coords)
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coords(&self) -> &[FieldValue] {
        &self.coords
    }

    /// Projective dimension `n` of the ambient space.
    pub fn dim(&self) -> usize {
        self.coords.len() - 1
    }

    pub fn first_zero_coordinate(&self) -> Option<usize> {
        self.coords.iter().position(FieldValue::is_zero)
    }

    pub fn require_nonzero_coords(&self) -> Result<()> {
        match self.first_zero_coordinate() {
            Some(j) => Err(Error::ZeroCoordinate(j)),
            None => Ok(()),
        }
    }

    /// Coordinate-wise power `[z_0^e, ..., z_n^e]`.
    pub fn power(&self, e: &BigUint) -> Result<ProjPoint> {
        let coords = self
            .coords
            .iter()
            .map(|c| if c.is_zero() { Ok(c.clone()) } else { c.pow(e) })
            .collect::<Result<Vec<_>>>()?;
        Self::new(&self.field, coords)
    }
}

impl fmt::Debug for ProjPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

/// A strictly increasing tuple `m_0 < m_1 < ... < m_r` of iterate indices.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(try_from = "Vec<u64>", into = "Vec<u64>")]
pub struct ExpTuple(Vec<u64>);

impl ExpTuple {
    pub fn new(entries: Vec<u64>) -> Result<ExpTuple> {
        if entries.is_empty() {
            return Err(Error::InvalidTuple("empty tuple".into()));
        }
        if entries.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTuple(format!("{entries:?} is not strictly increasing")));
        }
        Ok(ExpTuple(entries))
    }

    pub fn entries(&self) -> &[u64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// `r`, one less than the tuple length.
    pub fn r(&self) -> usize {
        self.0.len() - 1
    }

    pub fn max(&self) -> u64 {
        *self.0.last().unwrap()
    }
}

impl TryFrom<Vec<u64>> for ExpTuple {
    type Error = Error;
    fn try_from(v: Vec<u64>) -> Result<Self> {
        ExpTuple::new(v)
    }
}

impl From<ExpTuple> for Vec<u64> {
    fn from(t: ExpTuple) -> Vec<u64> {
        t.0
    }
}

/// All strictly increasing `(r+1)`-tuples with entries in `[0, max]`, in
/// lexicographic order.
pub fn increasing_tuples(len: usize, max: u64) -> Vec<ExpTuple> {
    fn rec(start: u64, max: u64, left: usize, cur: &mut Vec<u64>, out: &mut Vec<ExpTuple>) {
        if left == 0 {
            out.push(ExpTuple(cur.clone()));
            return;
        }
        let mut v = start;
        while v + (left as u64 - 1) <= max {
            cur.push(v);
            rec(v + 1, max, left - 1, cur, out);
            cur.pop();
            v += 1;
        }
    }
    let mut out = Vec::new();
    if len > 0 {
        rec(0, max, len, &mut Vec::new(), &mut out);
    }
    out
}

pub fn check_degree(d: u64) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidDegree(d));
    }
    Ok(())
}

/// `phi^m(P)` for the degree-`d` power map.
pub fn iterate(p: &ProjPoint, d: u64, m: u64, budget: ExponentBudget) -> Result<ProjPoint> {
    check_degree(d)?;
    if m == 0 {
        return Ok(p.clone());
    }
    let e = budget.exponent(d, m)?;
    p.power(&e)
}

/// The iterate matrix `A_m`, whose `i`-th row is `phi^{m_i}(P)`. Entries
/// are produced on demand.
#[derive(Clone, Debug)]
pub struct IterMatrix {
    point: ProjPoint,
    degree: u64,
    tuple: ExpTuple,
    budget: ExponentBudget,
}

pub fn iterate_matrix(p: &ProjPoint, d: u64, m: &ExpTuple, budget: ExponentBudget) -> Result<IterMatrix> {
    check_degree(d)?;
    p.require_nonzero_coords()?;
    if m.len() > p.dim() + 1 {
        return Err(Error::TupleTooLong {
            len: m.len(),
            cols: p.dim() + 1,
        });
    }
    Ok(IterMatrix {
        point: p.clone(),
        degree: d,
        tuple: m.clone(),
        budget,
    })
}

impl IterMatrix {
    pub fn point(&self) -> &ProjPoint {
        &self.point
    }

    pub fn degree(&self) -> u64 {
        self.degree
    }

    pub fn tuple(&self) -> &ExpTuple {
        &self.tuple
    }

    pub fn budget(&self) -> ExponentBudget {
        self.budget
    }

    pub fn rows(&self) -> usize {
        self.tuple.len()
    }

    pub fn cols(&self) -> usize {
        self.point.dim() + 1
    }

    /// `k_i(m) = d^{m_i}`.
    pub fn k(&self, i: usize) -> Result<BigUint> {
        self.budget.exponent(self.degree, self.tuple.entries()[i])
    }

    /// Entry `(i, j) = alpha_j^{d^{m_i}}`.
    pub fn entry(&self, i: usize, j: usize) -> Result<FieldValue> {
        let e = self.k(i)?;
        self.point.coords()[j].pow(&e)
    }

    /// Row `i` as the (unscaled) coordinate vector of `phi^{m_i}(P)`.
    pub fn row(&self, i: usize) -> Result<Vec<FieldValue>> {
        let e = self.k(i)?;
        if e.is_one() {
            return Ok(self.point.coords().to_vec());
        }
        self.point.coords().iter().map(|c| c.pow(&e)).collect()
    }

    pub fn materialize(&self) -> Result<Vec<Vec<FieldValue>>> {
        (0..self.rows()).map(|i| self.row(i)).collect()
    }

    pub fn row_point(&self, i: usize) -> Result<ProjPoint> {
        ProjPoint::new(self.point.field(), self.row(i)?)
    }
}

/// Whether `q` lies in the linear span `l`.
pub fn subspace_membership(q: &ProjPoint, l: &Subspace) -> Result<bool> {
    l.contains(q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{cyclotomic, rationals};

    #[test]
    fn iterates_of_small_point() {
        let f = rationals();
        let p = ProjPoint::from_ints(&f, &[1, 2, 3]).unwrap();
        let b = ExponentBudget::default();
        assert_eq!(iterate(&p, 2, 0, b).unwrap(), p);
        assert_eq!(iterate(&p, 2, 2, b).unwrap(), ProjPoint::from_ints(&f, &[1, 16, 81]).unwrap());
    }

    #[test]
    fn root_of_unity_iterate() {
        let c5 = cyclotomic(5).unwrap();
        let z = FieldValue::generator(&c5);
        let p = ProjPoint::new(&c5, vec![FieldValue::one(&c5), z.clone()]).unwrap();
        let q = iterate(&p, 2, 3, ExponentBudget::default()).unwrap();
        assert_eq!(q.coords()[1], z.pow_u64(3).unwrap());
    }

    #[test]
    fn canonical_scaling() {
        let f = rationals();
        let a = ProjPoint::from_ints(&f, &[2, 4, -6]).unwrap();
        let b = ProjPoint::from_ints(&f, &[1, 2, -3]).unwrap();
        assert_eq!(a, b);
        let c = ProjPoint::from_ints(&f, &[0, 3, 6]).unwrap();
        assert_eq!(c, ProjPoint::from_ints(&f, &[0, 1, 2]).unwrap());
        assert!(ProjPoint::from_ints(&f, &[0, 0]).is_err());
    }

    #[test]
    fn iterate_matrix_entries() {
        let f = rationals();
        let p = ProjPoint::from_ints(&f, &[1, 2, -3]).unwrap();
        let m = ExpTuple::new(vec![0, 1, 2]).unwrap();
        let a = iterate_matrix(&p, 2, &m, ExponentBudget::default()).unwrap();
        let expect = [[1, 2, -3], [1, 4, 9], [1, 16, 81]];
        for (i, row) in expect.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                assert_eq!(a.entry(i, j).unwrap(), FieldValue::from_int(&f, v));
            }
        }
        let p2 = ProjPoint::from_ints(&f, &[1, 2]).unwrap();
        let a2 = iterate_matrix(&p2, 3, &ExpTuple::new(vec![0, 1]).unwrap(), ExponentBudget::default()).unwrap();
        assert_eq!(a2.row(1).unwrap(), vec![FieldValue::from_int(&f, 1), FieldValue::from_int(&f, 8)]);
    }

    #[test]
    fn iterate_matrix_errors() {
        let f = rationals();
        let p = ProjPoint::from_ints(&f, &[1, 0, 2]).unwrap();
        let m = ExpTuple::new(vec![0, 1]).unwrap();
        assert_eq!(
            iterate_matrix(&p, 2, &m, ExponentBudget::default()).unwrap_err(),
            Error::ZeroCoordinate(1)
        );
        let q = ProjPoint::from_ints(&f, &[1, 2]).unwrap();
        let long = ExpTuple::new(vec![0, 1, 2]).unwrap();
        assert!(matches!(
            iterate_matrix(&q, 2, &long, ExponentBudget::default()),
            Err(Error::TupleTooLong { .. })
        ));
        assert_eq!(iterate(&q, 1, 1, ExponentBudget::default()).unwrap_err(), Error::InvalidDegree(1));
    }

    #[test]
    fn budget_guard() {
        let f = rationals();
        let p = ProjPoint::from_ints(&f, &[1, 2]).unwrap();
        let small = ExponentBudget(1 << 10);
        assert!(iterate(&p, 2, 10, small).is_ok());
        assert!(matches!(iterate(&p, 2, 11, small), Err(Error::ExponentBudgetExceeded { .. })));
    }

    #[test]
    fn tuples() {
        assert!(ExpTuple::new(vec![0, 0]).is_err());
        assert!(ExpTuple::new(vec![2, 1]).is_err());
        let all = increasing_tuples(3, 3);
        let v: Vec<Vec<u64>> = all.iter().map(|t| t.entries().to_vec()).collect();
        assert_eq!(v, vec![vec![0, 1, 2], vec![0, 1, 3], vec![0, 2, 3], vec![1, 2, 3]]);
        assert_eq!(increasing_tuples(3, 5).len(), 20);
    }
}

//! Determinant term vectors `u_{sigma,p}(m)`, zero-sum partitions of the
//! symmetric group, exceptional partitions and the fingerprint map.

use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{Field, FieldValue};
use crate::linalg::{deleted_row_rank_of, Matrix};
use crate::numtheory::is_prime;
use crate::orbit::{iterate_matrix, ExpTuple, ExponentBudget, IterMatrix, ProjPoint};
use crate::perm::{all_perms, factorial, Perm};

/// Largest `r` for which the exhaustive zero-sum search is attempted.
pub const MAX_EXHAUSTIVE_R: usize = 3;

/// A strictly increasing column map `p: {0..r} -> {0..n}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ColumnSelect {
    n: usize,
    map: Vec<usize>,
}

impl ColumnSelect {
    pub fn new(n: usize, map: Vec<usize>) -> Result<ColumnSelect> {
        if map.is_empty() || map.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidTuple(format!("column map {map:?} is not strictly increasing")));
        }
        if let Some(&last) = map.last() {
            if last > n {
                return Err(Error::IndexOutOfRange { index: last, limit: n + 1 });
            }
        }
        Ok(ColumnSelect { n, map })
    }

    pub fn identity(r: usize) -> ColumnSelect {
        ColumnSelect { n: r, map: (0..=r).collect() }
    }

    pub fn r(&self) -> usize {
        self.map.len() - 1
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }

    #[inline]
    pub fn apply(&self, j: usize) -> usize {
        self.map[j]
    }
}

/// Every strictly increasing map `{0..r} -> {0..n}`, in lex order.
pub fn all_column_selects(r: usize, n: usize) -> Vec<ColumnSelect> {
    crate::orbit::increasing_tuples(r + 1, n as u64)
        .into_iter()
        .map(|t| ColumnSelect {
            n,
            map: t.entries().iter().map(|&v| v as usize).collect(),
        })
        .collect()
}

/// The `(r+1)!` signed determinant terms, indexed by permutations in lex order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TermVector {
    r: usize,
    perms: Vec<Perm>,
    signs: Vec<i8>,
    values: Vec<FieldValue>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TermJson {
    pub perm: Vec<usize>,
    pub sign: i8,
    pub value: Vec<String>,
}

impl TermVector {
    /// Builds a term vector from signed values `sgn(sigma) * u_sigma`.
    pub fn from_signed(r: usize, signed: Vec<FieldValue>) -> Result<TermVector> {
        let perms = all_perms(r + 1);
        if signed.len() != perms.len() {
            return Err(Error::DimensionMismatch { expected: perms.len(), found: signed.len() });
        }
        let signs: Vec<i8> = perms.iter().map(Perm::sign).collect();
        let values = signed.iter().zip(&signs).map(|(v, &s)| if s < 0 { -v } else { v.clone() }).collect();
        Ok(TermVector { r, perms, signs, values })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn perms(&self) -> &[Perm] {
        &self.perms
    }

    pub fn sign(&self, i: usize) -> i8 {
        self.signs[i]
    }

    /// Unsigned term `u_sigma`.
    pub fn value(&self, i: usize) -> &FieldValue {
        &self.values[i]
    }

    pub fn signed(&self, i: usize) -> FieldValue {
        if self.signs[i] < 0 {
            -&self.values[i]
        } else {
            self.values[i].clone()
        }
    }

    fn field(&self) -> &Field {
        self.values[0].field()
    }

    pub fn signed_sum_of(&self, idx: impl IntoIterator<Item = usize>) -> FieldValue {
        idx.into_iter().fold(FieldValue::zero(self.field()), |acc, i| &acc + &self.signed(i))
    }

    pub fn total(&self) -> FieldValue {
        self.signed_sum_of(0..self.len())
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        (0..self.len())
            .map(|i| TermJson {
                perm: self.perms[i].0.clone(),
                sign: self.signs[i],
                value: self.values[i].to_strings(),
            })
            .collect()
    }
}

/// Terms of the minor of `a` on the columns selected by `p`:
/// `u_sigma = prod_j a[sigma(j)][p(j)]`.
pub fn terms_from_matrix(a: &Matrix, p: &ColumnSelect) -> Result<TermVector> {
    let r = p.r();
    if a.len() != r + 1 {
        return Err(Error::DimensionMismatch { expected: r + 1, found: a.len() });
    }
    if a[0].len() <= p.map.last().copied().unwrap_or(0) {
        return Err(Error::IndexOutOfRange { index: *p.map.last().unwrap(), limit: a[0].len() });
    }
    let perms = all_perms(r + 1);
    let signs = perms.iter().map(Perm::sign).collect();
    let values = perms
        .iter()
        .map(|s| {
            (1..=r).fold(a[s.apply(0)][p.apply(0)].clone(), |acc, j| &acc * &a[s.apply(j)][p.apply(j)])
        })
        .collect();
    Ok(TermVector { r, perms, signs, values })
}

/// Term vector of `det A_{m,p}`.
pub fn det_terms(pt: &ProjPoint, d: u64, m: &ExpTuple, p: &ColumnSelect, budget: ExponentBudget) -> Result<TermVector> {
    let a = iterate_matrix(pt, d, m, budget)?;
    if p.n != pt.dim() {
        return Err(Error::DimensionMismatch { expected: pt.dim(), found: p.n });
    }
    terms_from_matrix(&a.materialize()?, p)
}

/// A set partition of `S_{r+1}`, blocks sorted internally and by least element.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TermPartition {
    r: usize,
    blocks: Vec<Vec<Perm>>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermPartitionJson {
    pub r: usize,
    pub blocks: Vec<Vec<Vec<usize>>>,
}

impl TermPartition {
    pub fn new(r: usize, mut blocks: Vec<Vec<Perm>>) -> Result<TermPartition> {
        let n = factorial(r + 1);
        let mut seen = vec![false; n];
        for b in &mut blocks {
            if b.is_empty() {
                return Err(Error::InvalidTuple("empty block".into()));
            }
            b.sort();
            for s in b.iter() {
                if s.len() != r + 1 {
                    return Err(Error::DimensionMismatch { expected: r + 1, found: s.len() });
                }
                let k = s.rank();
                if seen[k] {
                    return Err(Error::InvalidTuple(format!("{s:?} appears twice")));
                }
                seen[k] = true;
            }
        }
        if seen.iter().any(|&x| !x) {
            return Err(Error::InvalidTuple("blocks do not cover the group".into()));
        }
        blocks.sort();
        Ok(TermPartition { r, blocks })
    }

    /// Builds a partition from blocks of lex indices into `S_{r+1}`.
    pub fn from_indices(r: usize, blocks: &[Vec<usize>]) -> Result<TermPartition> {
        let perms = all_perms(r + 1);
        let blocks = blocks
            .iter()
            .map(|b| {
                b.iter()
                    .map(|&i| perms.get(i).cloned().ok_or(Error::IndexOutOfRange { index: i, limit: perms.len() }))
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(r, blocks)
    }

    pub fn single_block(r: usize) -> TermPartition {
        TermPartition { r, blocks: vec![all_perms(r + 1)] }
    }

    pub fn singletons(r: usize) -> TermPartition {
        TermPartition { r, blocks: all_perms(r + 1).into_iter().map(|s| vec![s]).collect() }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn blocks(&self) -> &[Vec<Perm>] {
        &self.blocks
    }

    /// Blocks as lex indices.
    pub fn index_blocks(&self) -> Vec<Vec<usize>> {
        self.blocks.iter().map(|b| b.iter().map(Perm::rank).collect()).collect()
    }

    /// Whether every block of `self` lies inside a block of `other`.
    pub fn refines(&self, other: &TermPartition) -> bool {
        let mut owner = vec![usize::MAX; factorial(self.r + 1)];
        for (k, b) in other.blocks.iter().enumerate() {
            for s in b {
                owner[s.rank()] = k;
            }
        }
        self.blocks.iter().all(|b| b.iter().all(|s| owner[s.rank()] == owner[b[0].rank()]))
    }

    pub fn to_json(&self) -> TermPartitionJson {
        TermPartitionJson {
            r: self.r,
            blocks: self.blocks.iter().map(|b| b.iter().map(|s| s.0.clone()).collect()).collect(),
        }
    }

    pub fn from_json(js: &TermPartitionJson) -> Result<TermPartition> {
        Self::new(js.r, js.blocks.iter().map(|b| b.iter().map(|s| Perm(s.clone())).collect()).collect())
    }
}

/// Result of the zero-sum partition search.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FinestPartition {
    pub partition: TermPartition,
    /// Another partition into minimal zero-sum blocks exists.
    pub non_unique: bool,
}

/// Linear hash of field values into `Z/p`, used to prefilter subset sums.
struct SumHash {
    primes: Vec<u64>,
    images: Vec<Vec<u64>>,
}

impl SumHash {
    fn new(tv: &TermVector) -> SumHash {
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed0f5a11);
        let mut primes = Vec::new();
        let mut images = Vec::new();
        let mut cand = (1u64 << 61) - 1;
        while primes.len() < 2 && cand > 3 {
            if is_prime(cand) {
                if let Some(img) = Self::images(tv, cand, &mut rng) {
                    primes.push(cand);
                    images.push(img);
                }
            }
            cand -= 2;
        }
        SumHash { primes, images }
    }

    fn images(tv: &TermVector, p: u64, rng: &mut ChaCha8Rng) -> Option<Vec<u64>> {
        let ring = tv.field().mod_ring(p).ok()?;
        let w: Vec<u64> = (0..ring.degree()).map(|_| rng.gen_range(1..p)).collect();
        (0..tv.len())
            .map(|i| {
                let res = tv.signed(i).reduce_mod(&ring).ok()?;
                Some(res.coeffs().iter().zip(&w).fold(0u64, |acc, (&c, &wi)| {
                    ((acc as u128 + c as u128 * wi as u128) % p as u128) as u64
                }))
            })
            .collect()
    }
}

/// All nonempty subsets (as bitmasks) whose signed sum is zero, found by a
/// Gray-code walk over hashed sums and confirmed exactly.
fn zero_sum_subsets(tv: &TermVector) -> Vec<u32> {
    let n = tv.len();
    let hash = SumHash::new(tv);
    let k = hash.primes.len();
    let mut acc = vec![0u64; k];
    let mut mask = 0u32;
    let mut hits = Vec::new();
    for step in 1u64..(1u64 << n) {
        let bit = step.trailing_zeros() as usize;
        let adding = mask & (1 << bit) == 0;
        mask ^= 1 << bit;
        for h in 0..k {
            let p = hash.primes[h];
            let v = hash.images[h][bit];
            acc[h] = if adding { (acc[h] + v) % p } else { (acc[h] + p - v) % p };
        }
        if acc.iter().all(|&a| a == 0) {
            hits.push(mask);
        }
    }
    hits.retain(|&s| tv.signed_sum_of((0..n).filter(|i| s >> i & 1 == 1)).is_zero());
    hits
}

/// Zero-sum subsets with no vanishing proper nonempty subset.
fn minimal_zero_sets(mut sets: Vec<u32>) -> Vec<u32> {
    sets.sort_by_key(|s| (s.count_ones(), *s));
    let mut minimal: Vec<u32> = Vec::new();
    for s in sets {
        if !minimal.iter().any(|&t| t & s == t) {
            minimal.push(s);
        }
    }
    minimal
}

fn mask_elems(s: u32) -> Vec<usize> {
    (0..32).filter(|i| s >> i & 1 == 1).collect()
}

/// Exact cover of `{0..n}` by `sets`, choosing at each step a set through
/// the lowest uncovered element in lex order of element lists. Stops after
/// `limit` covers.
fn exact_covers(n: usize, sets: &[u32], limit: usize) -> Vec<Vec<u32>> {
    let mut by_elem: Vec<Vec<u32>> = vec![Vec::new(); n];
    for &s in sets {
        by_elem[s.trailing_zeros() as usize].push(s);
    }
    for v in &mut by_elem {
        v.sort_by_key(|&s| mask_elems(s));
    }
    let full = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut out = Vec::new();
    let mut chosen = Vec::new();
    fn go(covered: u32, full: u32, by_elem: &[Vec<u32>], chosen: &mut Vec<u32>, out: &mut Vec<Vec<u32>>, limit: usize) {
        if out.len() >= limit {
            return;
        }
        if covered == full {
            out.push(chosen.clone());
            return;
        }
        let e = (!covered).trailing_zeros() as usize;
        // a set through e may have e as its least element only if all lower elements are covered
        for &s in &by_elem[e] {
            if s & covered == 0 {
                chosen.push(s);
                go(covered | s, full, by_elem, chosen, out, limit);
                chosen.pop();
            }
        }
    }
    go(0, full, &by_elem, &mut chosen, &mut out, limit);
    out
}

/// The canonically least partition of `S_{r+1}` into zero-sum blocks with no
/// vanishing proper sub-block, plus whether it is unique.
pub fn finest_zero_partition(tv: &TermVector) -> Result<FinestPartition> {
    if tv.r > MAX_EXHAUSTIVE_R {
        return Err(Error::TooManyTerms(tv.len()));
    }
    if !tv.total().is_zero() {
        return Err(Error::NonVanishingTotal);
    }
    let minimal = minimal_zero_sets(zero_sum_subsets(tv));
    let covers = exact_covers(tv.len(), &minimal, 2);
    let first = covers.first().expect("a vanishing total always decomposes into minimal blocks");
    let blocks: Vec<Vec<usize>> = first.iter().map(|&s| mask_elems(s)).collect();
    Ok(FinestPartition {
        partition: TermPartition::from_indices(tv.r, &blocks)?,
        non_unique: covers.len() > 1,
    })
}

/// `I^t = {T_0^t, ..., T_r^t}` where `T_j^t = {sigma : sigma(j) = t}`.
pub fn bullet_partition(r: usize, t: usize) -> Result<TermPartition> {
    if t > r {
        return Err(Error::IndexOutOfRange { index: t, limit: r + 1 });
    }
    let perms = all_perms(r + 1);
    let blocks = (0..=r).map(|j| perms.iter().filter(|s| s.apply(j) == t).cloned().collect()).collect();
    TermPartition::new(r, blocks)
}

/// All `t` for which the partition refines `I^t`.
pub fn classify_exceptional(part: &TermPartition) -> BTreeSet<usize> {
    (0..=part.r)
        .filter(|&t| {
            part.blocks.iter().all(|b| {
                let pos = b[0].inverse().apply(t);
                b.iter().all(|s| s.inverse().apply(t) == pos)
            })
        })
        .collect()
}

/// Signed sums of each block of `part`.
pub fn block_sums(tv: &TermVector, part: &TermPartition) -> Vec<FieldValue> {
    part.blocks.iter().map(|b| tv.signed_sum_of(b.iter().map(Perm::rank))).collect()
}

/// Rank of `A_m` with row `t` deleted.
pub fn deleted_row_rank(a: &IterMatrix, t: usize) -> Result<usize> {
    if t >= a.rows() {
        return Err(Error::IndexOutOfRange { index: t, limit: a.rows() });
    }
    deleted_row_rank_of(&a.materialize()?, t)
}

/// Whether every block of `I^t` has vanishing signed sum for every column
/// selection of the (materialized) iterate matrix.
pub fn bullet_sums_vanish(a: &Matrix, t: usize) -> Result<bool> {
    let r = a.len() - 1;
    let n = a[0].len() - 1;
    let part = bullet_partition(r, t)?;
    for p in all_column_selects(r, n) {
        let tv = terms_from_matrix(a, &p)?;
        if block_sums(&tv, &part).iter().any(|s| !s.is_zero()) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Normalized fingerprint: per column selection and per block, the unsigned
/// terms scaled so the first is one.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Fingerprint(pub Vec<FieldValue>);

pub type PartitionFamily = BTreeMap<ColumnSelect, TermPartition>;

/// The same partition for every column selection of `P^n`.
pub fn uniform_family(r: usize, n: usize, part: &TermPartition) -> PartitionFamily {
    all_column_selects(r, n).into_iter().map(|p| (p, part.clone())).collect()
}

pub fn fingerprint_from_matrix(a: &Matrix, family: &PartitionFamily) -> Result<Fingerprint> {
    let mut out = Vec::new();
    for (p, part) in family {
        if part.r != p.r() {
            return Err(Error::DimensionMismatch { expected: p.r(), found: part.r });
        }
        let tv = terms_from_matrix(a, p)?;
        for b in &part.blocks {
            let lead = tv.value(b[0].rank()).inverse()?;
            for s in b {
                out.push(tv.value(s.rank()) * &lead);
            }
        }
    }
    Ok(Fingerprint(out))
}

#[allow(non_snake_case)]
pub fn fingerprint_F(pt: &ProjPoint, d: u64, m: &ExpTuple, family: &PartitionFamily, budget: ExponentBudget) -> Result<Fingerprint> {
    fingerprint_from_matrix(&rows_for(pt, d, m.entries(), budget)?, family)
}

/// Unscaled iterate rows for an arbitrary (not necessarily increasing)
/// list of iterate indices.
pub fn rows_for(pt: &ProjPoint, d: u64, m: &[u64], budget: ExponentBudget) -> Result<Matrix> {
    m.iter()
        .map(|&mi| {
            let e = budget.exponent(d, mi)?;
            pt.coords().iter().map(|c| c.pow(&e)).collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rationals;
    use crate::linalg::{determinant, rank};

    fn pt(v: &[i64]) -> ProjPoint {
        ProjPoint::from_ints(&rationals(), v).unwrap()
    }

    fn ints(f: &Field, v: &[i64]) -> Vec<FieldValue> {
        v.iter().map(|&x| FieldValue::from_int(f, x)).collect()
    }

    fn example_terms() -> TermVector {
        let m = ExpTuple::new(vec![0, 1, 2]).unwrap();
        det_terms(&pt(&[1, 2, -3]), 2, &m, &ColumnSelect::identity(2), ExponentBudget::default()).unwrap()
    }

    #[test]
    fn term_vector_example() {
        let tv = example_terms();
        let signed: Vec<FieldValue> = (0..6).map(|i| tv.signed(i)).collect();
        assert_eq!(signed, ints(&rationals(), &[324, -144, -162, -48, 18, 12]));
        assert!(tv.total().is_zero());
        let r0 = det_terms(&pt(&[1, 5]), 2, &ExpTuple::new(vec![3]).unwrap(), &ColumnSelect::new(1, vec![1]).unwrap(), ExponentBudget::default())
            .unwrap();
        assert_eq!(r0.len(), 1);
        assert_eq!(r0.sign(0), 1);
        assert_eq!(r0.value(0), &FieldValue::from_int(&rationals(), 390625));
    }

    #[test]
    fn terms_sum_to_determinant() {
        let p = pt(&[1, 2, 3, 7]);
        let m = ExpTuple::new(vec![0, 2, 3]).unwrap();
        let a = iterate_matrix(&p, 2, &m, ExponentBudget::default()).unwrap().materialize().unwrap();
        for sel in all_column_selects(2, 3) {
            let tv = terms_from_matrix(&a, &sel).unwrap();
            let minor: Matrix = a.iter().map(|row| sel.map().iter().map(|&c| row[c].clone()).collect()).collect();
            assert_eq!(tv.total(), determinant(&minor).unwrap());
        }
        assert_eq!(all_column_selects(2, 3).len(), 4);
    }

    #[test]
    fn pairing_partition_is_not_unique() {
        let f = rationals();
        let tv = TermVector::from_signed(2, ints(&f, &[1, -1, 1, -1, 1, -1])).unwrap();
        let fp = finest_zero_partition(&tv).unwrap();
        assert!(fp.non_unique);
        assert_eq!(fp.partition.index_blocks(), vec![vec![0, 1], vec![2, 3], vec![4, 5]]);
        let bad = TermVector::from_signed(2, ints(&f, &[1, 1, 1, -1, 1, -1])).unwrap();
        assert_eq!(finest_zero_partition(&bad).unwrap_err(), Error::NonVanishingTotal);
    }

    #[test]
    fn example_partition_matches_bruteforce() {
        let tv = example_terms();
        let fp = finest_zero_partition(&tv).unwrap();
        let zero = crate::oracles::vanishing_subsum_bruteforce(&tv).unwrap().counterexamples;
        let full: Vec<usize> = (0..tv.len()).collect();
        for blk in fp.partition.index_blocks() {
            assert!(blk == full || zero.contains(&blk));
            // no vanishing proper sub-block
            assert!(!zero.iter().any(|z| z.len() < blk.len() && z.iter().all(|i| blk.contains(i))));
        }
        for s in block_sums(&tv, &fp.partition) {
            assert!(s.is_zero());
        }
    }

    #[test]
    fn bullet_partitions() {
        let b = bullet_partition(1, 0).unwrap();
        assert_eq!(b.index_blocks(), vec![vec![0], vec![1]]);
        let b = bullet_partition(2, 0).unwrap();
        assert_eq!(b.blocks().len(), 3);
        for blk in b.blocks() {
            assert_eq!(blk.len(), 2);
            let j = blk[0].inverse().apply(0);
            assert!(blk.iter().all(|s| s.apply(j) == 0));
        }
        for r in 1..=3 {
            for t in 0..=r {
                assert!(bullet_partition(r, t).unwrap().blocks().iter().all(|blk| blk.len() == factorial(r)));
            }
        }
        assert!(matches!(bullet_partition(2, 3), Err(Error::IndexOutOfRange { .. })));
    }

    #[test]
    fn exceptional_classes() {
        assert_eq!(classify_exceptional(&bullet_partition(2, 0).unwrap()), BTreeSet::from([0]));
        assert_eq!(classify_exceptional(&TermPartition::singletons(2)), BTreeSet::from([0, 1, 2]));
        assert!(classify_exceptional(&TermPartition::single_block(2)).is_empty());
        assert!(TermPartition::singletons(3).refines(&bullet_partition(3, 1).unwrap()));
    }

    #[test]
    fn bullet_block_sums_are_scaled_cofactors() {
        let p = pt(&[1, 2, 5, 7]);
        let m = ExpTuple::new(vec![0, 1, 3]).unwrap();
        let a = iterate_matrix(&p, 2, &m, ExponentBudget::default()).unwrap().materialize().unwrap();
        for sel in all_column_selects(2, 3) {
            let tv = terms_from_matrix(&a, &sel).unwrap();
            for t in 0..=2 {
                let part = bullet_partition(2, t).unwrap();
                for (blk, sum) in part.blocks().iter().zip(block_sums(&tv, &part)) {
                    let j = blk[0].inverse().apply(t);
                    let minor: Matrix = (0..3)
                        .filter(|&i| i != t)
                        .map(|i| (0..3).filter(|&jj| jj != j).map(|jj| a[i][sel.apply(jj)].clone()).collect())
                        .collect();
                    let mut cof = determinant(&minor).unwrap();
                    if (t + j) % 2 == 1 {
                        cof = -cof;
                    }
                    assert_eq!(sum, &a[t][sel.apply(j)] * &cof);
                }
            }
        }
    }

    #[test]
    fn deleted_rows() {
        let p = pt(&[1, 2, -3]);
        let a = iterate_matrix(&p, 2, &ExpTuple::new(vec![0, 1, 2]).unwrap(), ExponentBudget::default()).unwrap();
        for t in 0..3 {
            assert_eq!(deleted_row_rank(&a, t).unwrap(), 2);
        }
        assert!(matches!(deleted_row_rank(&a, 3), Err(Error::IndexOutOfRange { .. })));
        // rows 1 and 2 proportional, row 0 generic: deleting row 0 drops the rank
        let q = pt(&[1, -1, 2, -2]);
        let a = iterate_matrix(&q, 2, &ExpTuple::new(vec![0, 1, 2]).unwrap(), ExponentBudget::default()).unwrap();
        let mat = a.materialize().unwrap();
        assert_eq!(rank(&mat).unwrap(), 3);
        let b = iterate_matrix(&pt(&[1, 2]), 2, &ExpTuple::new(vec![0]).unwrap(), ExponentBudget::default()).unwrap();
        assert_eq!(rank(&b.materialize().unwrap()).unwrap(), 1);
    }

    #[test]
    fn fingerprints() {
        let p = pt(&[1, 2, 3, 5]);
        let b = ExponentBudget::default();
        let singles = uniform_family(2, 3, &TermPartition::singletons(2));
        let f1 = fingerprint_F(&p, 2, &ExpTuple::new(vec![0, 1, 2]).unwrap(), &singles, b).unwrap();
        let f2 = fingerprint_F(&p, 2, &ExpTuple::new(vec![1, 4, 6]).unwrap(), &singles, b).unwrap();
        assert_eq!(f1, f2);
        assert!(f1.0.iter().all(FieldValue::is_one));
        let bullet = uniform_family(2, 3, &bullet_partition(2, 1).unwrap());
        let g1 = fingerprint_from_matrix(&rows_for(&p, 2, &[0, 2, 5], b).unwrap(), &bullet).unwrap();
        let g2 = fingerprint_from_matrix(&rows_for(&p, 2, &[0, 7, 5], b).unwrap(), &bullet).unwrap();
        assert_eq!(g1, g2);
        let whole = uniform_family(2, 3, &TermPartition::single_block(2));
        let h1 = fingerprint_from_matrix(&rows_for(&p, 2, &[0, 2, 5], b).unwrap(), &whole).unwrap();
        let h2 = fingerprint_from_matrix(&rows_for(&p, 2, &[0, 7, 5], b).unwrap(), &whole).unwrap();
        assert_ne!(h1, h2);
    }

    #[test]
    fn partition_json_roundtrip() {
        let b = bullet_partition(2, 2).unwrap();
        let js = b.to_json();
        assert_eq!(TermPartition::from_json(&js).unwrap(), b);
        assert!(TermPartition::from_indices(2, &[vec![0, 1], vec![2]]).is_err());
    }
}

//! Deliberately naive brute-force oracles, used to cross-check the
//! optimized code paths.

use num_bigint::BigInt;
use num_traits::Pow;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::subsum::{TermVector, MAX_EXHAUSTIVE_R};

/// Outcome of an exhaustive search over a declared space.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleResult<T> {
    pub space: String,
    pub checked: u64,
    pub counterexamples: Vec<T>,
}

impl<T> OracleResult<T> {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// Checks that `d^a - d^b = d^x - d^y` implies `{a, y} = {b, x}` for all
/// exponents up to `bound`.
pub fn power_diff_classify(d: u64, bound: u32) -> OracleResult<[u32; 4]> {
    let pw: Vec<BigInt> = (0..=bound).map(|e| BigInt::from(d).pow(e)).collect();
    let mut checked = 0;
    let mut bad = Vec::new();
    for a in 0..=bound {
        for b in 0..=bound {
            let lhs = &pw[a as usize] - &pw[b as usize];
            for x in 0..=bound {
                for y in 0..=bound {
                    checked += 1;
                    if lhs == &pw[x as usize] - &pw[y as usize] {
                        let mut l = [a, y];
                        let mut r = [b, x];
                        l.sort();
                        r.sort();
                        if l != r {
                            bad.push([a, b, x, y]);
                        }
                    }
                }
            }
        }
    }
    OracleResult {
        space: format!("d={d}, 0<=a,b,x,y<={bound}"),
        checked,
        counterexamples: bad,
    }
}

/// Every nonempty proper subset (as sorted lex indices) of the terms whose
/// signed sum is exactly zero, by a plain scan of all subsets.
pub fn vanishing_subsum_bruteforce(tv: &TermVector) -> Result<OracleResult<Vec<usize>>> {
    if tv.r() > MAX_EXHAUSTIVE_R {
        return Err(Error::TooManyTerms(tv.len()));
    }
    let n = tv.len();
    let mut found = Vec::new();
    let full = (1u64 << n) - 1;
    for mask in 1..full {
        let idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        if tv.signed_sum_of(idx.iter().copied()).is_zero() {
            found.push(idx);
        }
    }
    found.sort();
    Ok(OracleResult {
        space: format!("nonempty proper subsets of {n} terms"),
        checked: full - 1,
        counterexamples: found,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{rationals, FieldValue};

    #[test]
    fn power_differences() {
        for d in [2, 3, 5] {
            let res = power_diff_classify(d, 12);
            assert!(res.passed(), "{:?}", res.counterexamples);
            assert_eq!(res.checked, 13u64.pow(4));
        }
        assert!(power_diff_classify(2, 10).passed());
    }

    #[test]
    fn subsets_of_small_vectors() {
        let f = rationals();
        let ints = |v: &[i64]| v.iter().map(|&x| FieldValue::from_int(&f, x)).collect::<Vec<_>>();
        // signed values +1, -1 on a transposition pair
        let tv = TermVector::from_signed(1, ints(&[1, -1])).unwrap();
        assert!(vanishing_subsum_bruteforce(&tv).unwrap().counterexamples.is_empty());
        let tv = TermVector::from_signed(2, ints(&[3, 7, 11, 19, 29, 41])).unwrap();
        assert!(vanishing_subsum_bruteforce(&tv).unwrap().counterexamples.is_empty());
        let tv = TermVector::from_signed(2, ints(&[1, -1, 2, -2, 5, 6])).unwrap();
        let res = vanishing_subsum_bruteforce(&tv).unwrap();
        assert_eq!(res.counterexamples, vec![vec![0, 1], vec![0, 1, 2, 3], vec![2, 3]]);
    }
}

//! Sparse multivariate polynomials over Q with a lexicographic term order.
//!
//! This is a verification tool for small symbolic determinants, not a
//! general computer-algebra kernel: expansion is by permutations and the
//! only division offered is exact division.

use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{fmt_rational, parse_rational, Rational};
use crate::perm::all_perms;

pub type Exponents = Vec<u32>;

#[derive(Clone, PartialEq, Eq)]
pub struct MPoly {
    vars: Vec<String>,
    // BTreeMap order on exponent vectors is lex with the first variable most significant.
    terms: BTreeMap<Exponents, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermJson {
    pub exponents: Vec<u32>,
    pub coeff: String,
}

impl MPoly {
    pub fn zero(vars: &[&str]) -> MPoly {
        MPoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: Rational) -> MPoly {
        let mut p = Self::zero(vars);
        p.add_term(vec![0; vars.len()], c);
        p
    }

    pub fn one(vars: &[&str]) -> MPoly {
        Self::constant(vars, Rational::one())
    }

    pub fn monomial(vars: &[&str], exps: Exponents, c: Rational) -> MPoly {
        assert_eq!(exps.len(), vars.len());
        let mut p = Self::zero(vars);
        p.add_term(exps, c);
        p
    }

    /// The `i`-th variable raised to `e`.
    pub fn var_pow(vars: &[&str], i: usize, e: u32) -> MPoly {
        let mut exps = vec![0; vars.len()];
        exps[i] = e;
        Self::monomial(vars, exps, Rational::one())
    }

    pub fn var(vars: &[&str], i: usize) -> MPoly {
        Self::var_pow(vars, i, 1)
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exponents, &Rational)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add_term(&mut self, exps: Exponents, c: Rational) {
        if c.is_zero() {
            return;
        }
        let entry = self.terms.entry(exps);
        match entry {
            std::collections::btree_map::Entry::Vacant(v) => {
                v.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut o) => {
                *o.get_mut() += c;
                if o.get().is_zero() {
                    o.remove();
                }
            }
        }
    }

    fn same_vars(&self, other: &MPoly) {
        assert_eq!(self.vars, other.vars, "polynomials over different variable sets");
    }

    pub fn add(&self, other: &MPoly) -> MPoly {
        self.same_vars(other);
        let mut out = self.clone();
        for (e, c) in &other.terms {
            out.add_term(e.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, other: &MPoly) -> MPoly {
        self.add(&other.neg())
    }

    pub fn neg(&self) -> MPoly {
        MPoly {
            vars: self.vars.clone(),
            terms: self.terms.iter().map(|(e, c)| (e.clone(), -c)).collect(),
        }
    }

    pub fn mul(&self, other: &MPoly) -> MPoly {
        self.same_vars(other);
        let mut out = MPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (e1, c1) in &self.terms {
            for (e2, c2) in &other.terms {
                let e: Exponents = e1.iter().zip(e2).map(|(a, b)| a + b).collect();
                out.add_term(e, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, e: u32) -> MPoly {
        let mut acc = MPoly::one(&self.vars());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    /// Leading term under lex order.
    pub fn leading_term(&self) -> Option<(&Exponents, &Rational)> {
        self.terms.iter().next_back()
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    /// `Some(deg)` when every term has total degree `deg`.
    pub fn homogeneous_degree(&self) -> Option<u32> {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        let first = degs.next()?;
        degs.all(|d| d == first).then_some(first)
    }

    /// Exact quotient `self / divisor`; fails if the remainder is nonzero.
    pub fn div_exact(&self, divisor: &MPoly) -> Result<MPoly> {
        self.same_vars(divisor);
        let (lead_e, lead_c) = divisor.leading_term().ok_or(Error::DivisionByZero)?;
        let mut rem = self.clone();
        let mut quot = MPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        while let Some((e, c)) = rem.leading_term() {
            if e.iter().zip(lead_e).any(|(a, b)| a < b) {
                return Err(Error::NotExactlyDivisible);
            }
            let qe: Exponents = e.iter().zip(lead_e).map(|(a, b)| a - b).collect();
            let qc = c / lead_c;
            let step = MPoly::monomial(&self.vars(), qe.clone(), qc.clone());
            rem = rem.sub(&step.mul(divisor));
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }

    /// Substitutes `values[i]` for the `i`-th variable.
    pub fn substitute(&self, values: &[MPoly]) -> MPoly {
        assert_eq!(values.len(), self.vars.len());
        let target_vars = values[0].vars();
        let mut out = MPoly::zero(&target_vars);
        for (e, c) in &self.terms {
            let mut t = MPoly::constant(&target_vars, c.clone());
            for (v, &k) in values.iter().zip(e) {
                if k > 0 {
                    t = t.mul(&v.pow(k));
                }
            }
            out = out.add(&t);
        }
        out
    }

    pub fn to_json(&self) -> Vec<TermJson> {
        // descending lex: leading term first
        self.terms
            .iter()
            .rev()
            .map(|(e, c)| TermJson {
                exponents: e.clone(),
                coeff: fmt_rational(c),
            })
            .collect()
    }

    pub fn from_json(vars: &[&str], terms: &[TermJson]) -> Result<MPoly> {
        let mut p = MPoly::zero(vars);
        for t in terms {
            if t.exponents.len() != vars.len() {
                return Err(Error::DimensionMismatch {
                    expected: vars.len(),
                    found: t.exponents.len(),
                });
            }
            p.add_term(t.exponents.clone(), parse_rational(&t.coeff)?);
        }
        Ok(p)
    }
}

impl fmt::Display for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let mono: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(k, _)| **k > 0)
                .map(|(k, v)| if *k == 1 { v.clone() } else { format!("{v}^{k}") })
                .collect();
            let body = if mono.is_empty() {
                fmt_rational(c)
            } else if c.is_one() {
                mono.join("*")
            } else if *c == -Rational::one() {
                format!("-{}", mono.join("*"))
            } else {
                format!("{}*{}", fmt_rational(c), mono.join("*"))
            };
            if first {
                write!(f, "{body}")?;
            } else if let Some(rest) = body.strip_prefix('-') {
                write!(f, " - {rest}")?;
            } else {
                write!(f, " + {body}")?;
            }
            first = false;
        }
        Ok(())
    }
}

impl fmt::Debug for MPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// Determinant by permutation expansion, fully collected.
pub fn sym_det(entries: &[Vec<MPoly>]) -> Result<MPoly> {
    let n = entries.len();
    if let Some(row) = entries.iter().find(|r| r.len() != n) {
        return Err(Error::NonSquareMatrix { rows: n, cols: row.len() });
    }
    if n == 0 {
        return Err(Error::NonSquareMatrix { rows: 0, cols: 0 });
    }
    let vars = entries[0][0].vars();
    let mut det = MPoly::zero(&vars);
    for sigma in all_perms(n) {
        let mut term = MPoly::constant(&vars, Rational::from_integer(sigma.sign().into()));
        for (i, row) in entries.iter().enumerate() {
            term = term.mul(&row[sigma.apply(i)]);
        }
        det = det.add(&term);
    }
    Ok(det)
}

/// Product of `factors`; the empty product is the constant 1.
pub fn mpoly_product(vars: &[&str], factors: &[MPoly]) -> MPoly {
    factors.iter().fold(MPoly::one(vars), |acc, f| acc.mul(f))
}

pub fn mpoly_equal(a: &MPoly, b: &MPoly) -> bool {
    a == b
}

/// The `k x k` matrix `(x_j^{e_i})` for exponent rows `e_0, ..., e_{k-1}`.
pub fn power_matrix(vars: &[&str], exponents: &[u32]) -> Vec<Vec<MPoly>> {
    exponents
        .iter()
        .map(|&e| (0..vars.len()).map(|j| MPoly::var_pow(vars, j, e)).collect())
        .collect()
}

/// `abc(a-b)(b-c)(c-a)` over three variables `a, b, c`.
pub fn cyclic_difference_factor(vars: &[&str]) -> MPoly {
    assert_eq!(vars.len(), 3, "cyclic difference product is defined for three variables");
    let v = |i| MPoly::var(vars, i);
    mpoly_product(
        vars,
        &[v(0), v(1), v(2), v(0).sub(&v(1)), v(1).sub(&v(2)), v(2).sub(&v(0))],
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: [&str; 3] = ["a", "b", "c"];

    fn int(v: i64) -> Rational {
        Rational::from_integer(v.into())
    }

    #[test]
    fn det_2x2() {
        let vars = ["a", "b"];
        let m = power_matrix(&vars, &[1, 2]);
        let det = sym_det(&m).unwrap();
        let expect = MPoly::monomial(&vars, vec![1, 2], int(1)).sub(&MPoly::monomial(&vars, vec![2, 1], int(1)));
        assert!(mpoly_equal(&det, &expect));
    }

    #[test]
    fn det_124_factorization() {
        let det = sym_det(&power_matrix(&V, &[1, 2, 4])).unwrap();
        assert_eq!(det.num_terms(), 6);
        assert_eq!(det.homogeneous_degree(), Some(7));
        let sum = MPoly::var(&V, 0).add(&MPoly::var(&V, 1)).add(&MPoly::var(&V, 2));
        let rhs = cyclic_difference_factor(&V).mul(&sum);
        assert!(mpoly_equal(&det, &rhs));
    }

    #[test]
    fn det_1_8_16_cofactor() {
        let det = sym_det(&power_matrix(&V, &[1, 8, 16])).unwrap();
        assert_eq!(det.num_terms(), 6);
        assert_eq!(det.homogeneous_degree(), Some(25));
        let base = cyclic_difference_factor(&V);
        let h = det.div_exact(&base).unwrap();
        assert_eq!(h.homogeneous_degree(), Some(19));
        assert_eq!(h.num_terms(), 147);
        assert_eq!(base.mul(&h), det);
    }

    #[test]
    fn row_swap_negates() {
        let mut m = power_matrix(&V, &[1, 3, 5]);
        let d = sym_det(&m).unwrap();
        m.swap(0, 2);
        assert_eq!(sym_det(&m).unwrap(), d.neg());
    }

    #[test]
    fn products_and_equality() {
        let vars = ["a", "b"];
        let a = MPoly::var(&vars, 0);
        let b = MPoly::var(&vars, 1);
        let p = mpoly_product(&vars, &[a.sub(&b), a.add(&b)]);
        assert_eq!(p, a.pow(2).sub(&b.pow(2)));
        assert_eq!(mpoly_product(&vars, &[]), MPoly::one(&vars));
        assert!(mpoly_equal(&a.add(&b), &b.add(&a)));
        let with_zero = a.add(&MPoly::monomial(&vars, vec![0, 1], int(0)));
        assert!(mpoly_equal(&a, &with_zero));
    }

    #[test]
    fn inexact_division_reported() {
        let vars = ["a", "b"];
        let a = MPoly::var(&vars, 0);
        let b = MPoly::var(&vars, 1);
        assert_eq!(a.pow(2).add(&b).div_exact(&a).unwrap_err(), Error::NotExactlyDivisible);
    }

    #[test]
    fn non_square_rejected() {
        let row = vec![MPoly::var(&V, 0), MPoly::var(&V, 1)];
        assert!(matches!(sym_det(&[row]), Err(Error::NonSquareMatrix { .. })));
    }

    #[test]
    fn json_roundtrip() {
        let det = sym_det(&power_matrix(&V, &[1, 2, 4])).unwrap();
        let js = det.to_json();
        assert_eq!(MPoly::from_json(&V, &js).unwrap(), det);
    }
}

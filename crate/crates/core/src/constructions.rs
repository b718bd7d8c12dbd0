//! Explicit example families: the sextic point with two exceptional lines,
//! cyclotomic points with many exceptional hyperplanes, and the quadric
//! relation case.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::field::{cyclotomic, field_make, monicize, rational_from_i64, Field, FieldSpec, FieldValue, Rational};
use crate::linalg::{determinant, super_rank, Matrix, Subspace};
use crate::numtheory::{is_prime, multiplicative_order};
use crate::orbit::{iterate, iterate_matrix, ExpTuple, ExponentBudget, ProjPoint};
use crate::perm::{all_perms, Perm};
use crate::relations::{lattice_contains, relation_lattice, RelLattice};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn push(&mut self, name: &str, pass: bool, detail: impl Into<String>) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }
}

/// Whether `d` generates `(Z/l)^*`.
pub fn is_primitive_root(d: u64, ell: u64) -> Result<bool> {
    if ell < 3 || !is_prime(ell) {
        return Err(Error::NonPrime(ell));
    }
    if d % ell == 0 {
        return Err(Error::DegenerateModulus { d, ell });
    }
    Ok(multiplicative_order(d, ell) == Some(ell - 1))
}

/// `P = [1, zeta_l, tail...]` together with the hyperplanes
/// `H_i = {x_1 = zeta^i x_0}` for `0 < i < l`.
#[derive(Clone, Debug)]
pub struct CyclotomicFamily {
    pub ell: u64,
    pub d: u64,
    pub tail: Vec<Rational>,
    pub point: ProjPoint,
    /// `hyperplanes[i - 1]` is `H_i`.
    pub hyperplanes: Vec<Subspace>,
    pub warnings: Vec<String>,
}

pub fn cyclotomic_family(d: u64, ell: u64, tail: &[Rational]) -> Result<CyclotomicFamily> {
    if !is_primitive_root(d, ell)? {
        return Err(Error::NotPrimitiveRoot { d, ell });
    }
    if let Some(i) = tail.iter().position(Zero::is_zero) {
        return Err(Error::ZeroTail(i + 2));
    }
    let k = cyclotomic(ell)?;
    let zeta = FieldValue::generator(&k);
    let mut coords = vec![FieldValue::one(&k), zeta.clone()];
    coords.extend(tail.iter().map(|q| FieldValue::from_rational(&k, q.clone())));
    let point = ProjPoint::new(&k, coords)?;
    let n1 = point.coords().len();

    let mut hyperplanes = Vec::new();
    for i in 1..ell {
        let mut rows: Matrix = Vec::new();
        let mut first = vec![FieldValue::zero(&k); n1];
        first[0] = FieldValue::one(&k);
        first[1] = zeta.pow_u64(i)?;
        rows.push(first);
        for j in 2..n1 {
            let mut e = vec![FieldValue::zero(&k); n1];
            e[j] = FieldValue::one(&k);
            rows.push(e);
        }
        hyperplanes.push(Subspace::from_rows(&k, rows)?);
    }

    let mut warnings = Vec::new();
    // only the torsion relation (l, -l, 0, ...) is expected
    match relation_lattice(&point) {
        Ok(l) if l.rank() == 1 => {}
        Ok(l) => warnings.push(format!("tail is multiplicatively dependent: relation lattice has rank {}", l.rank())),
        Err(e) => warnings.push(format!("independence of the tail not checked: {e}")),
    }
    Ok(CyclotomicFamily {
        ell,
        d,
        tail: tail.to_vec(),
        point,
        hyperplanes,
        warnings,
    })
}

impl CyclotomicFamily {
    pub fn field(&self) -> &Field {
        self.point.field()
    }

    /// Least `n >= 0` with `d^n = i (mod l)`.
    pub fn base_index(&self, i: u64) -> u64 {
        let mut x = 1 % self.ell;
        for n in 0..self.ell {
            if x == i % self.ell {
                return n;
            }
            x = x * self.d % self.ell;
        }
        unreachable!("d is a primitive root")
    }

    /// Exact membership of `phi^n(P)` in each `H_i`, for `0 <= n <= max`.
    pub fn membership_table(&self, max: u64, budget: ExponentBudget) -> Result<Vec<Vec<bool>>> {
        (0..=max)
            .map(|n| {
                let q = iterate(&self.point, self.d, n, budget)?;
                self.hyperplanes.iter().map(|h| h.contains(&q)).collect()
            })
            .collect()
    }

    /// The `n + 1` iterate indices `n_i, n_i + (l-1), ...` of the orbit
    /// points expected to super-span `H_i`.
    pub fn spanning_tuple(&self, i: u64) -> Result<ExpTuple> {
        let base = self.base_index(i);
        ExpTuple::new((0..=self.point.dim() as u64).map(|j| base + j * (self.ell - 1)).collect())
    }

    /// Checks that those `n + 1` orbit points lie on `H_i` and that every
    /// `n` of them span it.
    pub fn super_spans(&self, i: u64, budget: ExponentBudget) -> Result<bool> {
        let m = self.spanning_tuple(i)?;
        let a = iterate_matrix(&self.point, self.d, &m, budget)?;
        let h = &self.hyperplanes[(i - 1) as usize];
        for row in 0..a.rows() {
            if !h.contains(&a.row_point(row)?)? {
                return Ok(false);
            }
        }
        super_rank(&a.materialize()?)
    }
}

/// Coefficients (constant first) of `2x^6 + 6x^5 + 5x^4 + 5x^2 + 6x + 2`.
pub const SEXTIC: [i64; 7] = [2, 6, 5, 0, 5, 6, 2];

/// `K = Q[x]/(g)` for the monicized sextic.
pub fn sextic_field() -> Result<Field> {
    let g: Vec<Rational> = SEXTIC.iter().map(|&c| rational_from_i64(c)).collect();
    field_make(FieldSpec::NumberField(monicize(&g)?))
}

/// `[alpha, -1 - alpha, 1]` with `alpha` the class of `x` in [`sextic_field`].
pub fn sextic_point() -> Result<ProjPoint> {
    let k = sextic_field()?;
    let (a, b, c) = sextic_coords(&k);
    ProjPoint::new(&k, vec![a, b, c])
}

fn sextic_coords(k: &Field) -> (FieldValue, FieldValue, FieldValue) {
    let alpha = FieldValue::generator(k);
    let beta = &FieldValue::from_int(k, -1) - &alpha;
    (alpha, beta, FieldValue::one(k))
}

/// `g(-1 - x)` for a dense univariate polynomial.
fn compose_reflection(g: &[Rational]) -> Vec<Rational> {
    // Horner with the linear polynomial -1 - x
    let mut acc: Vec<Rational> = vec![Rational::zero(); g.len()];
    for c in g.iter().rev() {
        let mut next = vec![Rational::zero(); g.len()];
        for (i, a) in acc.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            next[i] -= a;
            if i + 1 < next.len() {
                next[i + 1] -= a;
            }
        }
        next[0] += c;
        acc = next;
    }
    acc
}

fn power_rows(vals: &[FieldValue], exps: &[u64]) -> Result<Matrix> {
    exps.iter().map(|&e| vals.iter().map(|v| v.pow_u64(e)).collect()).collect()
}

/// Exact checks of the sextic example.
pub fn verify_sextic_example() -> VerificationReport {
    let mut rep = VerificationReport::default();
    let g: Vec<Rational> = SEXTIC.iter().map(|&c| rational_from_i64(c)).collect();
    let reflected = compose_reflection(&g);
    rep.push(
        "beta_root_closure",
        reflected == g,
        format!("g(-1-x) coefficients {:?}", reflected.iter().map(|q| q.to_string()).collect::<Vec<_>>()),
    );

    let k = match sextic_field() {
        Ok(k) => k,
        Err(e) => {
            rep.push("field", false, e.to_string());
            return rep;
        }
    };
    let (a, b, c) = sextic_coords(&k);
    let sum = &(&a + &b) + &c;
    let low = power_rows(&[a.clone(), b.clone(), c.clone()], &[1, 2, 4]).and_then(|m| determinant(&m));
    rep.push(
        "linear_factor_vanishes",
        sum.is_zero() && low.as_ref().is_ok_and(FieldValue::is_zero),
        format!("alpha+beta+gamma = {sum}; det(1,2,4) = {}", low.map_or_else(|e| e.to_string(), |v| v.to_string())),
    );
    let high = power_rows(&[a.clone(), b.clone(), c.clone()], &[1, 8, 16]).and_then(|m| determinant(&m));
    rep.push(
        "high_determinant_vanishes",
        high.as_ref().map_or(false, FieldValue::is_zero),
        format!("det(1,8,16) = {}", high.map_or_else(|e| e.to_string(), |v| v.to_string())),
    );
    let vals = [&a, &b, &c];
    let nonzero = vals.iter().all(|v| !v.is_zero());
    let distinct = a != b && b != c && a != c;
    rep.push(
        "distinct_nonzero",
        nonzero && distinct,
        format!("alpha = {a}, beta = {b}, gamma = {c}"),
    );
    rep
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadricCounterexample {
    pub m: Vec<u64>,
    pub m_tilde: Vec<u64>,
    pub sigma: Vec<usize>,
    pub tau: Vec<usize>,
    pub v: Vec<i64>,
    pub case: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadricReport {
    pub tuple_pairs: u64,
    pub derangement_cases: u64,
    pub double_transposition_shapes: u64,
    pub fixed_point_cases: u64,
    pub counterexamples: Vec<QuadricCounterexample>,
}

impl QuadricReport {
    pub fn passed(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

/// `v_{sigma,tau}` with entries `k_{sigma(i)} + k~_{tau(i)} - k_{tau(i)} - k~_{sigma(i)}`.
pub fn relation_vector(k: &[i64], kt: &[i64], sigma: &Perm, tau: &Perm) -> Vec<i64> {
    (0..k.len())
        .map(|i| k[sigma.apply(i)] + kt[tau.apply(i)] - k[tau.apply(i)] - kt[sigma.apply(i)])
        .collect()
}

fn quadric_lattice(p: &ProjPoint) -> Result<RelLattice> {
    if p.dim() != 3 {
        return Err(Error::DimensionMismatch { expected: 4, found: p.dim() + 1 });
    }
    let l = relation_lattice(p)?;
    if l.rank() != 1 {
        return Err(Error::WrongRelationRank(format!("rank {} instead of 1", l.rank())));
    }
    let c = p.coords();
    if &c[0] * &c[1] != &c[2] * &c[3] {
        return Err(Error::OffQuadric);
    }
    let g: Vec<BigInt> = [1, 1, -1, -1].iter().map(|&x| BigInt::from(x)).collect();
    if l.basis()[0] != g {
        return Err(Error::WrongRelationRank(format!("generator {:?}", l.basis()[0])));
    }
    Ok(l)
}

/// Exhaustive check of the quadric case analysis over increasing 4-tuples
/// with entries at most `bound`.
pub fn quadric_case_probe(p: &ProjPoint, d: u64, bound: u64) -> Result<QuadricReport> {
    crate::orbit::check_degree(d)?;
    let lattice = quadric_lattice(p)?;
    let tuples = crate::orbit::increasing_tuples(4, bound);
    let kvec = |m: &ExpTuple| -> Result<Vec<i64>> {
        m.entries()
            .iter()
            .map(|&e| {
                u32::try_from(e)
                    .ok()
                    .and_then(|e| (d as i64).checked_pow(e))
                    .ok_or(Error::ExponentBudgetExceeded { degree: d, iterate: e, budget: i64::MAX as u64 })
            })
            .collect()
    };
    let perms = all_perms(4);
    let double_transposition = Perm(vec![1, 0, 3, 2]);
    let mut rep = QuadricReport {
        tuple_pairs: 0,
        derangement_cases: 0,
        double_transposition_shapes: 0,
        fixed_point_cases: 0,
        counterexamples: Vec::new(),
    };
    let in_lattice = |v: &[i64]| lattice_contains(&lattice, &v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>());
    for m in &tuples {
        let k = kvec(m)?;
        for mt in &tuples {
            if m == mt {
                continue;
            }
            rep.tuple_pairs += 1;
            let kt = kvec(mt)?;
            for sigma in &perms {
                for tau in &perms {
                    let v = relation_vector(&k, &kt, sigma, tau);
                    let rel = sigma.inverse().compose(tau);
                    let mut fail = None;
                    if rel.is_derangement() {
                        rep.derangement_cases += 1;
                        if tau.inverse().compose(sigma) == double_transposition {
                            rep.double_transposition_shapes += 1;
                            if v[1] != -v[0] || v[3] != -v[2] {
                                fail = Some("shape (X,-X,Y,-Y) violated");
                            }
                        }
                        if fail.is_none() && in_lattice(&v)? {
                            fail = Some("relation without m = m~");
                        }
                    } else {
                        rep.fixed_point_cases += 1;
                        if v.iter().any(|&x| x != 0) && in_lattice(&v)? {
                            fail = Some("nonzero relation with a common fixed point");
                        }
                    }
                    if let Some(case) = fail {
                        rep.counterexamples.push(QuadricCounterexample {
                            m: m.entries().to_vec(),
                            m_tilde: mt.entries().to_vec(),
                            sigma: sigma.0.clone(),
                            tau: tau.0.clone(),
                            v,
                            case: case.to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(rep)
}

/// Convenience for `[1, 6, 2, 3]`.
pub fn standard_quadric_point() -> ProjPoint {
    ProjPoint::from_ints(&crate::field::rationals(), &[1, 6, 2, 3]).expect("valid point")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::rationals;

    #[test]
    fn primitive_roots() {
        assert!(is_primitive_root(2, 5).unwrap());
        assert!(!is_primitive_root(2, 7).unwrap());
        assert!(!is_primitive_root(1, 7).unwrap());
        assert!(is_primitive_root(3, 7).unwrap());
        assert_eq!(is_primitive_root(2, 9), Err(Error::NonPrime(9)));
        assert_eq!(is_primitive_root(10, 5), Err(Error::DegenerateModulus { d: 10, ell: 5 }));
    }

    fn tail23() -> Vec<Rational> {
        vec![rational_from_i64(2), rational_from_i64(3)]
    }

    #[test]
    fn cyclotomic_membership_pattern() {
        let fam = cyclotomic_family(2, 5, &tail23()).unwrap();
        assert_eq!(fam.hyperplanes.len(), 4);
        assert!(fam.warnings.is_empty(), "{:?}", fam.warnings);
        let table = fam.membership_table(12, ExponentBudget::default()).unwrap();
        for (n, row) in table.iter().enumerate() {
            let res = crate::numtheory::pow_mod(2, n as u64, 5);
            for i in 1..5u64 {
                assert_eq!(row[(i - 1) as usize], res == i, "n = {n}, i = {i}");
            }
        }
        assert!(matches!(cyclotomic_family(2, 7, &tail23()), Err(Error::NotPrimitiveRoot { .. })));
        let zero_tail = vec![rational_from_i64(2), Rational::zero()];
        assert_eq!(cyclotomic_family(2, 5, &zero_tail).unwrap_err(), Error::ZeroTail(3));
    }

    #[test]
    fn cyclotomic_super_span() {
        let fam = cyclotomic_family(2, 5, &tail23()).unwrap();
        assert_eq!(fam.base_index(1), 0);
        assert_eq!(fam.base_index(3), 3);
        assert_eq!(fam.spanning_tuple(2).unwrap().entries(), &[1, 5, 9, 13]);
        assert!(fam.super_spans(2, ExponentBudget::default()).unwrap());
    }

    #[test]
    fn reflection() {
        let g: Vec<Rational> = SEXTIC.iter().map(|&c| rational_from_i64(c)).collect();
        assert_eq!(compose_reflection(&g), g);
        let lin = vec![rational_from_i64(0), rational_from_i64(1)];
        assert_eq!(compose_reflection(&lin), vec![rational_from_i64(-1), rational_from_i64(-1)]);
    }

    #[test]
    fn sextic_checks() {
        let rep = verify_sextic_example();
        assert_eq!(rep.checks.len(), 4);
        assert!(rep.passed(), "{rep:?}");
    }

    #[test]
    fn quadric_probe_small() {
        let rep = quadric_case_probe(&standard_quadric_point(), 2, 5).unwrap();
        assert!(rep.passed(), "{:?}", &rep.counterexamples[..rep.counterexamples.len().min(3)]);
        assert!(rep.double_transposition_shapes > 0);
        let f = rationals();
        let p = ProjPoint::from_ints(&f, &[1, 2, 3, 5]).unwrap();
        assert!(matches!(quadric_case_probe(&p, 2, 4), Err(Error::WrongRelationRank(_))));
        let p = ProjPoint::from_ints(&f, &[1, 2, 3, 6]).unwrap();
        assert_eq!(quadric_case_probe(&p, 2, 4).unwrap_err(), Error::OffQuadric);
    }

    #[test]
    fn relation_vector_shape() {
        let k = [1, 2, 4, 8];
        let kt = [1, 4, 8, 16];
        let tau = Perm(vec![2, 0, 3, 1]);
        let sigma = tau.compose(&Perm(vec![1, 0, 3, 2]));
        let v = relation_vector(&k, &kt, &sigma, &tau);
        assert_eq!(v[0], -v[1]);
        assert_eq!(v[2], -v[3]);
    }
}

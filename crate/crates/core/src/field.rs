//! Exact arithmetic over explicitly presented fields.
//!
//! Three ambients are supported: the rationals, a number field `Q[x]/(f)`
//! for a monic `f` with rational coefficients, and the cyclotomic field
//! `Q(zeta_l)` for an odd prime `l`. Elements are stored as the unique
//! representative polynomial of degree below `deg f`, constant term first.
//!
//! Reduction modulo a word-size prime maps an element into
//! `F_p[x]/(f mod p)`; [`ModRing`] carries that quotient ring.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numtheory::{inv_mod, is_prime, mul_mod, pow_mod_big};

pub type Rational = BigRational;

/// Formats a rational as `p/q`, or `p` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q` or a plain decimal integer into a reduced rational.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(n).map_err(|_| bad())?;
    let d = BigInt::from_str(d).map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

pub fn rational_from_i64(v: i64) -> Rational {
    Rational::from_integer(BigInt::from(v))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum FieldKind {
    Rational,
    NumberField,
    Cyclotomic(u64),
}

/// A request for an ambient field, validated by [`field_make`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum FieldSpec {
    Rational,
    /// Coefficients of the minimal polynomial, constant term first.
    NumberField(Vec<Rational>),
    Cyclotomic(u64),
}

/// A validated ambient field.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FieldDesc {
    kind: FieldKind,
    min_poly: Option<Vec<Rational>>,
}

/// Shared handle to an ambient field.
pub type Field = Arc<FieldDesc>;

/// Divides a polynomial through by its leading coefficient.
pub fn monicize(coeffs: &[Rational]) -> Result<Vec<Rational>> {
    let trimmed = trim(coeffs.to_vec());
    let lead = trimmed.last().cloned().ok_or(Error::ZeroDegree)?;
    Ok(trimmed.into_iter().map(|c| c / &lead).collect())
}

/// Validates a field description.
pub fn field_make(spec: FieldSpec) -> Result<Field> {
    let desc = match spec {
        FieldSpec::Rational => FieldDesc {
            kind: FieldKind::Rational,
            min_poly: None,
        },
        FieldSpec::NumberField(coeffs) => {
            let f = trim(coeffs);
            if f.len() < 2 {
                return Err(Error::ZeroDegree);
            }
            if !f.last().unwrap().is_one() {
                return Err(Error::NonMonicPolynomial);
            }
            FieldDesc {
                kind: FieldKind::NumberField,
                min_poly: Some(f),
            }
        }
        FieldSpec::Cyclotomic(ell) => {
            if ell < 3 || !is_prime(ell) {
                return Err(Error::NonPrimeCyclotomicOrder(ell));
            }
            FieldDesc {
                kind: FieldKind::Cyclotomic(ell),
                min_poly: Some(vec![Rational::one(); ell as usize]),
            }
        }
    };
    Ok(Arc::new(desc))
}

pub fn rationals() -> Field {
    field_make(FieldSpec::Rational).expect("rationals are always valid")
}

pub fn cyclotomic(ell: u64) -> Result<Field> {
    field_make(FieldSpec::Cyclotomic(ell))
}

impl FieldDesc {
    pub fn kind(&self) -> &FieldKind {
        &self.kind
    }

    pub fn degree(&self) -> usize {
        self.min_poly.as_ref().map_or(1, |f| f.len() - 1)
    }

    pub fn min_poly(&self) -> Option<&[Rational]> {
        self.min_poly.as_deref()
    }

    pub fn is_rational(&self) -> bool {
        self.kind == FieldKind::Rational
    }

    pub fn cyclotomic_order(&self) -> Option<u64> {
        match self.kind {
            FieldKind::Cyclotomic(l) => Some(l),
            _ => None,
        }
    }

    /// Reduction of the ambient modulo `p`, or [`Error::BadPrime`] when `p`
    /// meets a denominator of the minimal polynomial or the reduction is
    /// not squarefree.
    pub fn mod_ring(&self, p: u64) -> Result<Arc<ModRing>> {
        if p < 2 || !is_prime(p) {
            return Err(Error::BadPrime(p));
        }
        let modulus = match &self.min_poly {
            None => None,
            Some(f) => {
                let fp = f
                    .iter()
                    .map(|c| reduce_rational(c, p))
                    .collect::<Option<Vec<u64>>>()
                    .ok_or(Error::BadPrime(p))?;
                let deriv = fp_trim(
                    fp.iter()
                        .enumerate()
                        .skip(1)
                        .map(|(i, &c)| mul_mod(c, i as u64 % p, p))
                        .collect(),
                );
                let g = fp_gcd(fp.clone(), deriv, p);
                if g.len() != 1 {
                    return Err(Error::BadPrime(p));
                }
                Some(fp)
            }
        };
        Ok(Arc::new(ModRing { p, modulus }))
    }
}

impl fmt::Display for FieldDesc {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            FieldKind::Rational => write!(f, "rational"),
            FieldKind::Cyclotomic(l) => write!(f, "cyclotomic:{l}"),
            FieldKind::NumberField => {
                let cs: Vec<String> = self.min_poly.as_ref().unwrap().iter().map(fmt_rational).collect();
                write!(f, "numberfield:{}", cs.join(","))
            }
        }
    }
}

fn same_field(a: &Field, b: &Field) -> bool {
    Arc::ptr_eq(a, b) || **a == **b
}

fn trim(mut v: Vec<Rational>) -> Vec<Rational> {
    while v.last().is_some_and(|c| c.is_zero()) {
        v.pop();
    }
    v
}

// num-rational reduces every result with a binary gcd, which is quadratic
// when one operand is a huge integer and the other is tiny. Orbit entries
// are exactly that, so the hot paths below reduce by hand.

fn fast_gcd(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut x, mut y) = (a.magnitude().clone(), b.magnitude().clone());
    if x < y {
        std::mem::swap(&mut x, &mut y);
    }
    if y.is_zero() {
        return BigInt::from(x);
    }
    x %= &y;
    BigInt::from(x.gcd(&y))
}

pub(crate) fn q_new(n: BigInt, d: BigInt) -> Rational {
    if d.is_one() {
        return Rational::new_raw(n, d);
    }
    if n.is_zero() {
        return Rational::zero();
    }
    let g = fast_gcd(&n, &d);
    let (n, d) = if g.is_one() { (n, d) } else { (n / &g, d / &g) };
    if d.is_negative() {
        Rational::new_raw(-n, -d)
    } else {
        Rational::new_raw(n, d)
    }
}

pub(crate) fn q_add(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() {
        return b.clone();
    }
    if b.is_zero() {
        return a.clone();
    }
    if a.denom() == b.denom() {
        return q_new(a.numer() + b.numer(), a.denom().clone());
    }
    q_new(a.numer() * b.denom() + b.numer() * a.denom(), a.denom() * b.denom())
}

pub(crate) fn q_sub(a: &Rational, b: &Rational) -> Rational {
    if b.is_zero() {
        return a.clone();
    }
    if a.denom() == b.denom() {
        return q_new(a.numer() - b.numer(), a.denom().clone());
    }
    q_new(a.numer() * b.denom() - b.numer() * a.denom(), a.denom() * b.denom())
}

pub(crate) fn q_mul(a: &Rational, b: &Rational) -> Rational {
    if a.is_zero() || b.is_zero() {
        return Rational::zero();
    }
    if a.is_one() {
        return b.clone();
    }
    if b.is_one() {
        return a.clone();
    }
    if a.denom().is_one() && b.denom().is_one() {
        return Rational::new_raw(a.numer() * b.numer(), BigInt::one());
    }
    let g1 = fast_gcd(a.numer(), b.denom());
    let g2 = fast_gcd(b.numer(), a.denom());
    Rational::new_raw(
        (a.numer() / &g1) * (b.numer() / &g2),
        (a.denom() / &g2) * (b.denom() / &g1),
    )
}

fn poly_mul(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Rational::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            if !y.is_zero() {
                out[i + j] = q_add(&out[i + j], &q_mul(x, y));
            }
        }
    }
    out
}

/// Remainder of `a` modulo the monic `f`.
fn poly_rem_monic(mut a: Vec<Rational>, f: &[Rational]) -> Vec<Rational> {
    let df = f.len() - 1;
    while a.len() > df {
        let lead = a.pop().unwrap();
        if lead.is_zero() {
            continue;
        }
        let shift = a.len() - df;
        for (k, c) in f[..df].iter().enumerate() {
            if !c.is_zero() {
                a[shift + k] = q_sub(&a[shift + k], &q_mul(&lead, c));
            }
        }
    }
    a
}

/// Quotient and remainder for a nonzero divisor over Q.
fn poly_divrem(a: &[Rational], b: &[Rational]) -> (Vec<Rational>, Vec<Rational>) {
    let b = trim(b.to_vec());
    let mut r = trim(a.to_vec());
    let db = b.len() - 1;
    let lead = b[db].clone();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![Rational::zero(); r.len() - db];
    while r.len() >= b.len() {
        let c = r.last().unwrap() / &lead;
        let shift = r.len() - b.len();
        for (k, bc) in b.iter().enumerate() {
            r[shift + k] -= &c * bc;
        }
        q[shift] = c;
        r.pop();
        r = trim(r);
    }
    (q, r)
}

fn poly_sub(a: &[Rational], b: &[Rational]) -> Vec<Rational> {
    let n = a.len().max(b.len());
    let z = Rational::zero();
    trim(
        (0..n)
            .map(|i| a.get(i).unwrap_or(&z) - b.get(i).unwrap_or(&z))
            .collect(),
    )
}

/// An exact element of an ambient field.
#[derive(Clone)]
pub struct FieldValue {
    field: Field,
    coeffs: Vec<Rational>,
}

impl FieldValue {
    /// Builds an element from a representative polynomial of any degree.
    pub fn from_coeffs(field: &Field, coeffs: Vec<Rational>) -> FieldValue {
        let deg = field.degree();
        let mut coeffs = match &field.min_poly {
            Some(f) if coeffs.len() > deg => poly_rem_monic(coeffs, f),
            _ => coeffs,
        };
        coeffs.resize(deg, Rational::zero());
        FieldValue {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_rational(field: &Field, q: Rational) -> FieldValue {
        let mut coeffs = vec![Rational::zero(); field.degree()];
        coeffs[0] = q;
        FieldValue {
            field: field.clone(),
            coeffs,
        }
    }

    pub fn from_int(field: &Field, v: i64) -> FieldValue {
        Self::from_rational(field, rational_from_i64(v))
    }

    pub fn zero(field: &Field) -> FieldValue {
        Self::from_int(field, 0)
    }

    pub fn one(field: &Field) -> FieldValue {
        Self::from_int(field, 1)
    }

    /// The class of `x`, i.e. the root of the minimal polynomial (or
    /// `zeta_l` in a cyclotomic field).
    pub fn generator(field: &Field) -> FieldValue {
        Self::from_coeffs(field, vec![Rational::zero(), Rational::one()])
    }

    pub fn field(&self) -> &Field {
        &self.field
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn is_one(&self) -> bool {
        self.coeffs[0].is_one() && self.coeffs[1..].iter().all(Zero::is_zero)
    }

    /// The value as a rational, if it lies in the prime field.
    pub fn as_rational(&self) -> Option<&Rational> {
        if self.coeffs[1..].iter().all(Zero::is_zero) {
            Some(&self.coeffs[0])
        } else {
            None
        }
    }

    /// Writes a cyclotomic element as `q * zeta^j` with `0 <= j < l`, when
    /// it has that shape.
    pub fn as_scaled_root_of_unity(&self) -> Option<(Rational, u64)> {
        let ell = self.field.cyclotomic_order()?;
        let nonzero: Vec<usize> = (0..self.coeffs.len()).filter(|&i| !self.coeffs[i].is_zero()).collect();
        match nonzero.as_slice() {
            [j] => Some((self.coeffs[*j].clone(), *j as u64)),
            _ if !nonzero.is_empty() && self.coeffs.iter().all(|c| *c == self.coeffs[0]) => {
                Some((-self.coeffs[0].clone(), ell - 1))
            }
            _ => None,
        }
    }

    fn check(&self, other: &FieldValue) -> Result<()> {
        if same_field(&self.field, &other.field) {
            Ok(())
        } else {
            Err(Error::MixedAmbients)
        }
    }

    pub fn try_add(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.add_unchecked(other))
    }

    pub fn try_sub(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.sub_unchecked(other))
    }

    pub fn try_mul(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.mul_unchecked(other))
    }

    pub fn try_div(&self, other: &FieldValue) -> Result<FieldValue> {
        self.check(other)?;
        Ok(self.mul_unchecked(&other.inverse()?))
    }

    fn add_unchecked(&self, other: &FieldValue) -> FieldValue {
        FieldValue {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| q_add(a, b)).collect(),
        }
    }

    fn sub_unchecked(&self, other: &FieldValue) -> FieldValue {
        FieldValue {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| q_sub(a, b)).collect(),
        }
    }

    fn mul_unchecked(&self, other: &FieldValue) -> FieldValue {
        if let Some(q) = other.as_rational() {
            return self.scale(q);
        }
        if let Some(q) = self.as_rational() {
            return other.scale(q);
        }
        Self::from_coeffs(&self.field, poly_mul(&self.coeffs, &other.coeffs))
    }

    pub fn scale(&self, q: &Rational) -> FieldValue {
        FieldValue {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| q_mul(c, q)).collect(),
        }
    }

    /// Multiplicative inverse, via the extended Euclidean algorithm in the
    /// quotient ring.
    pub fn inverse(&self) -> Result<FieldValue> {
        if self.is_zero() {
            return Err(Error::DivisionByZero);
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(&self.field, q.recip()));
        }
        let f = self.field.min_poly.as_ref().expect("non-rational element in rational field");
        // invariant: s * a == r (mod f)
        let (mut r0, mut r1) = (f.clone(), trim(self.coeffs.clone()));
        let (mut s0, mut s1): (Vec<Rational>, Vec<Rational>) = (Vec::new(), vec![Rational::one()]);
        while r1.len() > 1 {
            let (q, r) = poly_divrem(&r0, &r1);
            let s = poly_sub(&s0, &poly_mul(&q, &s1));
            (r0, r1) = (r1, r);
            (s0, s1) = (s1, s);
        }
        if r1.is_empty() {
            return Err(Error::NonInvertible);
        }
        let c = r1[0].recip();
        Ok(Self::from_coeffs(&self.field, s1.into_iter().map(|x| x * &c).collect()))
    }

    /// `self^e` by square-and-multiply with reduction after every product.
    ///
    /// Prime-field values and scaled roots of unity take closed-form paths;
    /// the size of an exact result grows linearly in `e`.
    pub fn pow(&self, e: &BigUint) -> Result<FieldValue> {
        if e.is_zero() {
            if self.is_zero() {
                return Err(Error::ZeroToZeroPower);
            }
            return Ok(Self::one(&self.field));
        }
        if let Some(q) = self.as_rational() {
            return Ok(Self::from_rational(&self.field, rational_pow(q, e)));
        }
        if let (Some(ell), Some((q, j))) = (self.field.cyclotomic_order(), self.as_scaled_root_of_unity()) {
            let k = ((BigUint::from(j) * e) % BigUint::from(ell)).to_u64().unwrap();
            let c = rational_pow(&q, e);
            return Ok(Self::zeta_power(&self.field, ell, k).scale(&c));
        }
        let mut acc = Self::one(&self.field);
        for i in (0..e.bits()).rev() {
            acc = acc.mul_unchecked(&acc);
            if e.bit(i) {
                acc = acc.mul_unchecked(self);
            }
        }
        Ok(acc)
    }

    pub fn pow_u64(&self, e: u64) -> Result<FieldValue> {
        self.pow(&BigUint::from(e))
    }

    fn zeta_power(field: &Field, ell: u64, k: u64) -> FieldValue {
        let mut coeffs = vec![Rational::zero(); ell as usize];
        coeffs[k as usize] = Rational::one();
        Self::from_coeffs(field, coeffs)
    }

    /// Image in `F_p[x]/(f mod p)`.
    pub fn reduce_mod(&self, ring: &Arc<ModRing>) -> Result<ModularResidue> {
        let coeffs = self
            .coeffs
            .iter()
            .map(|c| reduce_rational(c, ring.p))
            .collect::<Option<Vec<u64>>>()
            .ok_or(Error::BadPrime(ring.p))?;
        Ok(ModularResidue {
            ring: ring.clone(),
            coeffs,
        })
    }

    /// Least common multiple of the coefficient denominators.
    pub fn denominator_lcm(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::one(), |acc, c| acc.lcm(c.denom()))
    }

    /// Coefficients as canonical rational strings, constant term first.
    pub fn to_strings(&self) -> Vec<String> {
        self.coeffs.iter().map(fmt_rational).collect()
    }

    /// Parses an element from rational strings (constant term first).
    /// Shorter vectors are zero-padded, longer ones reduced.
    pub fn parse(field: &Field, coeffs: &[String]) -> Result<FieldValue> {
        let cs = coeffs.iter().map(|s| parse_rational(s)).collect::<Result<Vec<_>>>()?;
        if cs.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        Ok(Self::from_coeffs(field, cs))
    }
}

fn rational_pow(q: &Rational, e: &BigUint) -> Rational {
    let n = big_pow(q.numer(), e);
    let d = big_pow(q.denom(), e);
    // coprime bases give coprime powers
    Rational::new_raw(n, d)
}

fn big_pow(b: &BigInt, e: &BigUint) -> BigInt {
    if let Some(small) = e.to_u32() {
        return num_traits::Pow::pow(b, small);
    }
    let mut acc = BigInt::one();
    for i in (0..e.bits()).rev() {
        acc = &acc * &acc;
        if e.bit(i) {
            acc *= b;
        }
    }
    acc
}

/// Applies one of the four field operations, reporting errors instead of panicking.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ArithOp {
    Add,
    Sub,
    Mul,
    Div,
}

pub fn elem_arith(a: &FieldValue, b: &FieldValue, op: ArithOp) -> Result<FieldValue> {
    match op {
        ArithOp::Add => a.try_add(b),
        ArithOp::Sub => a.try_sub(b),
        ArithOp::Mul => a.try_mul(b),
        ArithOp::Div => a.try_div(b),
    }
}

pub fn elem_pow(a: &FieldValue, e: &BigUint) -> Result<FieldValue> {
    a.pow(e)
}

pub fn elem_mod_prime(a: &FieldValue, p: u64) -> Result<ModularResidue> {
    let ring = a.field.mod_ring(p)?;
    a.reduce_mod(&ring)
}

impl PartialEq for FieldValue {
    fn eq(&self, other: &Self) -> bool {
        same_field(&self.field, &other.field) && self.coeffs == other.coeffs
    }
}

impl Eq for FieldValue {}

impl Hash for FieldValue {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.coeffs.hash(state);
    }
}

impl fmt::Debug for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for FieldValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(q) = self.as_rational() {
            return write!(f, "{}", fmt_rational(q));
        }
        let terms: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| match i {
                0 => fmt_rational(c),
                1 => format!("({})*x", fmt_rational(c)),
                _ => format!("({})*x^{i}", fmt_rational(c)),
            })
            .collect();
        write!(f, "{}", terms.join(" + "))
    }
}

// Operator forms panic on mixed ambients; the `try_*` methods report it.
macro_rules! forward_binop {
    ($tr:ident, $method:ident, $inner:ident) => {
        impl $tr<&FieldValue> for &FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: &FieldValue) -> FieldValue {
                self.check(rhs).expect("mixed ambients");
                self.$inner(rhs)
            }
        }
        impl $tr<FieldValue> for FieldValue {
            type Output = FieldValue;
            fn $method(self, rhs: FieldValue) -> FieldValue {
                (&self).$method(&rhs)
            }
        }
    };
}

forward_binop!(Add, add, add_unchecked);
forward_binop!(Sub, sub, sub_unchecked);
forward_binop!(Mul, mul, mul_unchecked);

impl Neg for &FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        FieldValue {
            field: self.field.clone(),
            coeffs: self.coeffs.iter().map(|c| -c).collect(),
        }
    }
}

impl Neg for FieldValue {
    type Output = FieldValue;
    fn neg(self) -> FieldValue {
        -&self
    }
}

fn reduce_rational(q: &Rational, p: u64) -> Option<u64> {
    let bp = BigInt::from(p);
    let d = q.denom().mod_floor(&bp).to_u64().unwrap();
    let n = q.numer().mod_floor(&bp).to_u64().unwrap();
    let dinv = inv_mod(d, p)?;
    Some(mul_mod(n, dinv, p))
}

/// Signed image of a nonnegative or negative big integer in `F_p`.
pub fn reduce_bigint(v: &BigInt, p: u64) -> u64 {
    let r = v.magnitude() % BigUint::from(p);
    let r = r.to_u64().unwrap();
    if v.sign() == Sign::Minus && r != 0 {
        p - r
    } else {
        r
    }
}

// ---- F_p[x] helpers ----

fn fp_trim(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn fp_rem(mut a: Vec<u64>, b: &[u64], p: u64) -> Vec<u64> {
    let db = b.len() - 1;
    let inv_lead = inv_mod(b[db], p).unwrap();
    a = fp_trim(a);
    while a.len() > db {
        let c = mul_mod(*a.last().unwrap(), inv_lead, p);
        let shift = a.len() - 1 - db;
        for (k, &bc) in b.iter().enumerate() {
            a[shift + k] = (a[shift + k] + p - mul_mod(c, bc, p)) % p;
        }
        a = fp_trim(a);
    }
    a
}

fn fp_gcd(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let (mut a, mut b) = (fp_trim(a), fp_trim(b));
    while !b.is_empty() {
        let r = fp_rem(a, &b, p);
        a = b;
        b = r;
    }
    a
}

/// `F_p[x]/(f mod p)` for a squarefree reduction (or `F_p` itself).
#[derive(Debug, PartialEq, Eq)]
pub struct ModRing {
    p: u64,
    modulus: Option<Vec<u64>>,
}

impl ModRing {
    pub fn prime_field(p: u64) -> Arc<ModRing> {
        Arc::new(ModRing { p, modulus: None })
    }

    pub fn prime(&self) -> u64 {
        self.p
    }

    pub fn degree(&self) -> usize {
        self.modulus.as_ref().map_or(1, |f| f.len() - 1)
    }

    pub fn is_prime_field(&self) -> bool {
        self.modulus.is_none()
    }

    pub fn zero(&self) -> Vec<u64> {
        vec![0; self.degree()]
    }

    pub fn add(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + y) % self.p).collect()
    }

    pub fn sub(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        a.iter().zip(b).map(|(x, y)| (x + self.p - y) % self.p).collect()
    }

    pub fn mul(&self, a: &[u64], b: &[u64]) -> Vec<u64> {
        let p = self.p;
        match &self.modulus {
            None => vec![mul_mod(a[0], b[0], p)],
            Some(f) => {
                let mut prod = vec![0u64; a.len() + b.len() - 1];
                for (i, &x) in a.iter().enumerate() {
                    if x == 0 {
                        continue;
                    }
                    for (j, &y) in b.iter().enumerate() {
                        prod[i + j] = (prod[i + j] + mul_mod(x, y, p)) % p;
                    }
                }
                let mut r = fp_rem(prod, f, p);
                r.resize(self.degree(), 0);
                r
            }
        }
    }

    pub fn pow(&self, a: &[u64], e: &BigUint) -> Vec<u64> {
        if self.modulus.is_none() {
            return vec![pow_mod_big(a[0], e, self.p)];
        }
        let mut acc = self.zero();
        acc[0] = 1;
        for i in (0..e.bits()).rev() {
            acc = self.mul(&acc, &acc);
            if e.bit(i) {
                acc = self.mul(&acc, a);
            }
        }
        acc
    }

    /// `a^(d^m)` by `m` successive `d`-th powers, so cost is linear in `m`.
    pub fn iterated_pow(&self, a: &[u64], d: u64, m: u64) -> Vec<u64> {
        let de = BigUint::from(d);
        let mut acc = a.to_vec();
        for _ in 0..m {
            acc = self.pow(&acc, &de);
        }
        acc
    }

    pub fn is_zero(&self, a: &[u64]) -> bool {
        a.iter().all(|&c| c == 0)
    }

    /// Inverse when `a` is a unit of the quotient ring.
    pub fn inverse(&self, a: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        match &self.modulus {
            None => inv_mod(a[0], p).map(|v| vec![v]),
            Some(f) => {
                let (mut r0, mut r1) = (f.clone(), fp_trim(a.to_vec()));
                let (mut s0, mut s1): (Vec<u64>, Vec<u64>) = (Vec::new(), vec![1]);
                while r1.len() > 1 {
                    let (q, r) = fp_divrem(&r0, &r1, p);
                    let qs = fp_mul(&q, &s1, p);
                    let n = s0.len().max(qs.len());
                    let s: Vec<u64> = (0..n)
                        .map(|i| (s0.get(i).copied().unwrap_or(0) + p - qs.get(i).copied().unwrap_or(0)) % p)
                        .collect();
                    (r0, r1) = (r1, r);
                    (s0, s1) = (s1, fp_trim(s));
                }
                if r1.is_empty() {
                    return None;
                }
                let c = inv_mod(r1[0], p)?;
                let mut out = fp_rem(s1.iter().map(|&x| mul_mod(x, c, p)).collect(), f, p);
                out.resize(self.degree(), 0);
                Some(out)
            }
        }
    }
}

fn fp_mul(a: &[u64], b: &[u64], p: u64) -> Vec<u64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0u64; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = (out[i + j] + mul_mod(x, y, p)) % p;
        }
    }
    fp_trim(out)
}

fn fp_divrem(a: &[u64], b: &[u64], p: u64) -> (Vec<u64>, Vec<u64>) {
    let mut r = fp_trim(a.to_vec());
    let db = b.len() - 1;
    let inv_lead = inv_mod(b[db], p).unwrap();
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let mut q = vec![0u64; r.len() - db];
    while r.len() >= b.len() {
        let c = mul_mod(*r.last().unwrap(), inv_lead, p);
        let shift = r.len() - b.len();
        for (k, &bc) in b.iter().enumerate() {
            r[shift + k] = (r[shift + k] + p - mul_mod(c, bc, p)) % p;
        }
        q[shift] = c;
        r.pop();
        r = fp_trim(r);
    }
    (q, r)
}

/// The image of a field element modulo a prime.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ModularResidue {
    ring: Arc<ModRing>,
    coeffs: Vec<u64>,
}

impl ModularResidue {
    pub fn prime(&self) -> u64 {
        self.ring.p
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn ring(&self) -> &Arc<ModRing> {
        &self.ring
    }

    pub fn mul(&self, other: &ModularResidue) -> ModularResidue {
        ModularResidue {
            ring: self.ring.clone(),
            coeffs: self.ring.mul(&self.coeffs, &other.coeffs),
        }
    }

    pub fn into_coeffs(self) -> Vec<u64> {
        self.coeffs
    }
}

//! Word-size modular arithmetic and integer factoring helpers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// `base^exp mod m` for an arbitrary-precision exponent.
pub fn pow_mod_big(base: u64, exp: &BigUint, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let base = base % m;
    for i in (0..exp.bits()).rev() {
        acc = mul_mod(acc, acc, m);
        if exp.bit(i) {
            acc = mul_mod(acc, base, m);
        }
    }
    acc
}

/// Inverse of `a` modulo `m`, if it exists.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (a as i128 % m as i128, m as i128);
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(m as i128) as u64)
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Multiplicative order of `d` modulo `m`; `None` when `gcd(d, m) != 1`.
pub fn multiplicative_order(d: u64, m: u64) -> Option<u64> {
    if m < 2 || d.gcd(&m) != 1 {
        return None;
    }
    let mut x = d % m;
    let mut k = 1;
    while x != 1 {
        x = mul_mod(x, d, m);
        k += 1;
    }
    Some(k)
}

const TRIAL_LIMIT: u64 = 100_000;

/// Splits `n` into (small prime, exponent) pairs found by trial division and
/// the remaining cofactor, which has no prime factor below the trial limit.
fn trial_divide(n: &BigUint) -> (Vec<(BigUint, u32)>, BigUint) {
    let mut n = n.clone();
    let mut found = Vec::new();
    let mut p = 2u64;
    while p <= TRIAL_LIMIT {
        let bp = BigUint::from(p);
        if &bp * &bp > n {
            break;
        }
        let mut e = 0;
        loop {
            let (q, r) = n.div_rem(&bp);
            if !r.is_zero() {
                break;
            }
            n = q;
            e += 1;
        }
        if e > 0 {
            found.push((bp, e));
        }
        p += if p == 2 { 1 } else { 2 };
    }
    if n > BigUint::one() && n.to_u64().is_some_and(|v| v <= TRIAL_LIMIT * TRIAL_LIMIT) {
        found.push((n, 1));
        n = BigUint::one();
    }
    (found, n)
}

/// A pairwise coprime base such that every input is a product of powers of
/// base elements. Elements are primes whenever the inputs factor by trial
/// division; otherwise large cofactors are refined by gcd splitting.
pub fn coprime_base(values: &[BigUint]) -> Vec<BigUint> {
    let mut base: Vec<BigUint> = Vec::new();
    let mut leftovers: Vec<BigUint> = Vec::new();
    for v in values {
        if v.is_zero() {
            continue;
        }
        let (small, rest) = trial_divide(v);
        for (p, _) in small {
            if !base.contains(&p) {
                base.push(p);
            }
        }
        if rest > BigUint::one() {
            leftovers.push(rest);
        }
    }
    loop {
        leftovers.sort();
        leftovers.dedup();
        let mut split = None;
        'search: for i in 0..leftovers.len() {
            for j in i + 1..leftovers.len() {
                let g = leftovers[i].gcd(&leftovers[j]);
                if !g.is_one() {
                    split = Some((i, j, g));
                    break 'search;
                }
            }
        }
        match split {
            None => break,
            Some((i, j, g)) => {
                let a = &leftovers[i] / &g;
                let b = &leftovers[j] / &g;
                leftovers.remove(j);
                leftovers.remove(i);
                for x in [a, b, g] {
                    if !x.is_one() {
                        leftovers.push(x);
                    }
                }
            }
        }
    }
    base.extend(leftovers);
    base.sort();
    base
}

/// Exponent of `q` in `n`, where `q > 1`.
pub fn valuation(n: &BigUint, q: &BigUint) -> u32 {
    let mut n = n.clone();
    let mut e = 0;
    loop {
        let (quot, r) = n.div_rem(q);
        if !r.is_zero() || n.is_zero() {
            return e;
        }
        n = quot;
        e += 1;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_small() {
        let primes: Vec<u64> = (0..60).filter(|&n| is_prime(n)).collect();
        assert_eq!(
            primes,
            vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59]
        );
        assert!(is_prime(1_000_000_007));
        assert!(!is_prime(1_000_000_007 * 3));
        assert!(is_prime(10007));
    }

    #[test]
    fn orders() {
        assert_eq!(multiplicative_order(2, 5), Some(4));
        assert_eq!(multiplicative_order(2, 7), Some(3));
        assert_eq!(multiplicative_order(1, 7), Some(1));
        assert_eq!(multiplicative_order(5, 5), None);
    }

    #[test]
    fn inverse_and_pow() {
        assert_eq!(inv_mod(2, 7), Some(4));
        assert_eq!(inv_mod(7, 7), None);
        assert_eq!(pow_mod(3, 4, 7), 81 % 7);
        assert_eq!(pow_mod_big(2, &BigUint::from(10u32), 1000), 24);
    }

    #[test]
    fn coprime_base_splits_shared_factors() {
        let big = BigUint::from(1_000_003u64) * BigUint::from(1_000_033u64);
        let other = BigUint::from(1_000_003u64) * BigUint::from(1_000_037u64);
        let base = coprime_base(&[big.clone(), other.clone(), BigUint::from(12u32)]);
        for (i, a) in base.iter().enumerate() {
            for b in &base[i + 1..] {
                assert!(a.gcd(b).is_one());
            }
        }
        assert!(base.contains(&BigUint::from(2u32)));
        assert!(base.contains(&BigUint::from(1_000_003u64)));
    }
}

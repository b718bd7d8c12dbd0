use num_bigint::{BigInt, BigUint};
use proptest::prelude::*;
use superspan::field::{cyclotomic, elem_mod_prime, field_make, rationals, Field, FieldSpec, FieldValue, ModRing, Rational};
use superspan::linalg::{bareiss_rank, int_matrix_mod, mod_rank, span_canonical};
use superspan::orbit::{iterate, ExponentBudget, ProjPoint};
use superspan::subsum::{bullet_partition, fingerprint_from_matrix, rows_for, uniform_family, TermPartition};

const BUDGET: ExponentBudget = ExponentBudget(1 << 40);

fn q(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

fn fields() -> Vec<Field> {
    let cubic = field_make(FieldSpec::NumberField(vec![q(-2, 1), q(0, 1), q(0, 1), q(1, 1)])).unwrap();
    vec![rationals(), cyclotomic(5).unwrap(), cubic]
}

fn coeffs() -> impl Strategy<Value = Vec<(i64, i64)>> {
    prop::collection::vec((-9i64..10, 1i64..5), 4)
}

fn elem(f: &Field, cs: &[(i64, i64)]) -> FieldValue {
    FieldValue::from_coeffs(f, cs[..f.degree()].iter().map(|&(n, d)| q(n, d)).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn ring_axioms(fi in 0usize..3, a in coeffs(), b in coeffs(), c in coeffs()) {
        let f = &fields()[fi];
        let (a, b, c) = (elem(f, &a), elem(f, &b), elem(f, &c));
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        prop_assert_eq!(&(&a - &b) + &b, a.clone());
        if !a.is_zero() {
            prop_assert!((&a * &a.inverse().unwrap()).is_one());
        }
    }

    #[test]
    fn pow_is_additive(fi in 0usize..3, a in coeffs(), e1 in 0u32..12, e2 in 0u32..12) {
        let f = &fields()[fi];
        let a = elem(f, &a);
        prop_assume!(!a.is_zero());
        let lhs = a.pow(&BigUint::from(e1 + e2)).unwrap();
        let rhs = &a.pow(&BigUint::from(e1)).unwrap() * &a.pow(&BigUint::from(e2)).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn reduction_mod_p_is_multiplicative(fi in 0usize..3, a in coeffs(), b in coeffs()) {
        let f = &fields()[fi];
        let p = 1_000_003;
        prop_assume!(f.mod_ring(p).is_ok());
        let (a, b) = (elem(f, &a), elem(f, &b));
        let lhs = elem_mod_prime(&(&a * &b), p).unwrap();
        let rhs = elem_mod_prime(&a, p).unwrap().mul(&elem_mod_prime(&b, p).unwrap());
        prop_assert_eq!(lhs.coeffs(), rhs.coeffs());
    }

    #[test]
    fn iterates_compose(
        v in prop::collection::vec(prop_oneof![-7i64..-1, 1i64..8], 3),
        d in 2u64..4,
        m1 in 0u64..4,
        m2 in 0u64..4,
    ) {
        let p = ProjPoint::from_ints(&rationals(), &v).unwrap();
        let two_steps = iterate(&iterate(&p, d, m1, BUDGET).unwrap(), d, m2, BUDGET).unwrap();
        prop_assert_eq!(two_steps, iterate(&p, d, m1 + m2, BUDGET).unwrap());
    }

    #[test]
    fn span_ignores_choice_of_spanning_set(
        a in prop::collection::vec(-5i64..6, 4),
        b in prop::collection::vec(-5i64..6, 4),
        c in prop_oneof![-4i64..0, 1i64..5],
    ) {
        let f = rationals();
        let mixed: Vec<i64> = a.iter().zip(&b).map(|(x, y)| x + c * y).collect();
        prop_assume!(a.iter().any(|&x| x != 0) && b.iter().any(|&x| x != 0) && mixed.iter().any(|&x| x != 0));
        let pa = ProjPoint::from_ints(&f, &a).unwrap();
        let pb = ProjPoint::from_ints(&f, &b).unwrap();
        let pm = ProjPoint::from_ints(&f, &mixed).unwrap();
        let s1 = span_canonical(&[pa.clone(), pb.clone()]).unwrap();
        let s2 = span_canonical(&[pm, pa]).unwrap();
        let s3 = span_canonical(&[pb.clone(), ProjPoint::from_ints(&f, &a).unwrap()]).unwrap();
        prop_assert_eq!(s1.key(), s3.key());
        if s1.rank() == 2 {
            prop_assert_eq!(s1.key(), s2.key());
            prop_assert!(s1.contains(&pb).unwrap());
        }
    }

    #[test]
    fn modular_rank_bounds_exact_rank(
        rows in prop::collection::vec(prop::collection::vec(-3i64..4, 4), 1..5),
        p in prop::sample::select(vec![2u64, 3, 5, 7, 1_000_003]),
    ) {
        let m: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        let exact = bareiss_rank(m.clone());
        let modular = mod_rank(&ModRing::prime_field(p), int_matrix_mod(&m, p));
        prop_assert!(modular <= exact);
        if p == 1_000_003 {
            // entries are far too small for this prime to divide a minor
            prop_assert_eq!(modular, exact);
        }
    }

    #[test]
    fn fingerprint_agreement_passes_to_refinements(
        tail in prop::collection::vec(0u64..6, 2),
        t in 0usize..3,
    ) {
        // rows differing only at row t agree on the bullet family at t
        let f = rationals();
        let p = ProjPoint::from_ints(&f, &[1, 2, 3, 5]).unwrap();
        let mut m1 = vec![0u64; 3];
        let mut m2 = vec![0u64; 3];
        let mut others = tail.into_iter();
        for j in 0..3 {
            if j == t {
                m1[j] = 6;
                m2[j] = 7;
            } else {
                let v = others.next().unwrap();
                m1[j] = v;
                m2[j] = v;
            }
        }
        let coarse = uniform_family(2, 3, &bullet_partition(2, t).unwrap());
        let a1 = rows_for(&p, 2, &m1, BUDGET).unwrap();
        let a2 = rows_for(&p, 2, &m2, BUDGET).unwrap();
        prop_assert_eq!(fingerprint_from_matrix(&a1, &coarse).unwrap(), fingerprint_from_matrix(&a2, &coarse).unwrap());
        for fine in [TermPartition::singletons(2), split_first_block(&bullet_partition(2, t).unwrap())] {
            prop_assert!(fine.refines(&bullet_partition(2, t).unwrap()));
            let fam = uniform_family(2, 3, &fine);
            prop_assert_eq!(fingerprint_from_matrix(&a1, &fam).unwrap(), fingerprint_from_matrix(&a2, &fam).unwrap());
        }
    }
}

fn split_first_block(part: &TermPartition) -> TermPartition {
    let mut blocks = part.index_blocks();
    let first = blocks.remove(0);
    let (x, y) = first.split_at(1);
    blocks.push(x.to_vec());
    blocks.push(y.to_vec());
    TermPartition::from_indices(part.r(), &blocks).unwrap()
}

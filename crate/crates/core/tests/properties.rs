use std::collections::BTreeSet;

use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;
use vexp_core::field::is_prime;
use vexp_core::{
    deserialize_table, eval_power, par_tree_reduce, serialize_table, tree_reduce, AnyTable, Field,
    FieldDescriptor, NodeTable, PrimeField, RationalField,
};

const P: u64 = 2305843009213693951;

fn mulmod(x: u64, y: u64, p: u64) -> u64 {
    (x as u128 * y as u128 % p as u128) as u64
}

fn distinct(max: u64, len: std::ops::RangeInclusive<usize>) -> impl Strategy<Value = Vec<u64>> {
    prop::collection::btree_set(0..max, len).prop_map(|s: BTreeSet<u64>| s.into_iter().collect())
}

proptest! {
    #[test]
    fn prime_field_axioms(x in 0..P, y in 0..P, z in 0..P) {
        let f = PrimeField::new(P).unwrap();
        prop_assert_eq!(f.add(&x, &y), ((x as u128 + y as u128) % P as u128) as u64);
        prop_assert_eq!(f.mul(&x, &y), mulmod(x, y, P));
        prop_assert_eq!(f.mul(&x, &f.add(&y, &z)), f.add(&f.mul(&x, &y), &f.mul(&x, &z)));
        prop_assert_eq!(f.add(&f.sub(&x, &y), &y), x);
        if x != 0 {
            prop_assert_eq!(f.mul(&x, &f.inverse(&x).unwrap()), 1);
        }
    }

    #[test]
    fn pow_matches_repeated_multiplication(a in 0..P, n in 0u64..200) {
        let f = PrimeField::new(P).unwrap();
        let want = (0..n).fold(1u64, |acc, _| mulmod(acc, a, P));
        prop_assert_eq!(f.pow(&a, n), want);
    }

    #[test]
    fn tree_reduce_matches_fold(xs in prop::collection::vec(0..P, 1..600)) {
        let f = PrimeField::new(P).unwrap();
        let folded = xs.iter().fold(0u64, |acc, x| ((acc as u128 + *x as u128) % P as u128) as u64);
        let (s, d) = tree_reduce(&f, &xs);
        let (ps, pd) = par_tree_reduce(&f, &xs);
        prop_assert_eq!(s, folded);
        prop_assert_eq!((ps, pd), (s, d));
        prop_assert!(1usize << d >= xs.len() && (d == 0 || 1usize << (d - 1) < xs.len()));
    }

    #[test]
    fn central_identity_prime(nodes in distinct(P, 2..=40), a in 0..P) {
        prop_assume!(!nodes.contains(&a));
        let k = nodes.len();
        let t = NodeTable::build(PrimeField::new(P).unwrap(), nodes).unwrap();
        let mut want = 1u64;
        for n in 0..k {
            prop_assert_eq!(eval_power(&t, &a, n).unwrap().value, want);
            want = mulmod(want, a, P);
        }
    }

    #[test]
    fn central_identity_rational(
        nums in prop::collection::btree_set(-50i64..50, 2..=8),
        den in 1i64..7,
        a in -80i64..80,
    ) {
        let r = |v: i64| BigRational::new(BigInt::from(v), BigInt::from(den));
        let nodes: Vec<BigRational> = nums.iter().map(|&v| r(v)).collect();
        let a = BigRational::from_integer(BigInt::from(a));
        prop_assume!(!nodes.contains(&a));
        let k = nodes.len();
        let t = NodeTable::build(RationalField, nodes).unwrap();
        let mut want = BigRational::from_integer(BigInt::from(1));
        for n in 0..k {
            prop_assert_eq!(&eval_power(&t, &a, n).unwrap().value, &want);
            want = &want * &a;
        }
    }

    #[test]
    fn coefficients_sum_to_zero(nodes in distinct(1_000_003, 2..=30)) {
        let f = PrimeField::new(1_000_003).unwrap();
        let t = NodeTable::build(f, nodes).unwrap();
        prop_assert_eq!(f.sum(t.coeffs()), 0);
    }

    #[test]
    fn table_text_round_trip(nodes in distinct(P, 2..=20)) {
        let t = NodeTable::build(PrimeField::new(P).unwrap(), nodes).unwrap();
        let text = serialize_table(&t);
        prop_assert_eq!(deserialize_table(&text).unwrap(), AnyTable::Prime(t));
    }

    #[test]
    fn descriptor_text_round_trip(start in 3u64..1 << 61) {
        let p = (start..).find(|&q| is_prime(q)).unwrap();
        let d = FieldDescriptor::Prime { p };
        prop_assert_eq!(d.to_string().parse::<FieldDescriptor>().unwrap(), d);
    }
}

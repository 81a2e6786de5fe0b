use std::sync::Arc;

use dsrg_core::algebra::{is_prime, ChainRing, Elem};
use dsrg_core::Spread;
use proptest::prelude::*;

fn rings_up_to(limit: u64) -> Vec<ChainRing> {
    let mut out = Vec::new();
    for p in (2..=limit).filter(|&p| is_prime(p)) {
        let mut k = 1;
        while p.pow(k) <= limit {
            for d in (1..=k).filter(|d| k % d == 0) {
                out.push(ChainRing::new(p, k / d, d).unwrap());
            }
            k += 1;
        }
    }
    out
}

#[test]
fn unit_counts() {
    for r in rings_up_to(1024) {
        let units = r.elements().filter(|&a| r.is_unit(a)).count() as u64;
        let ideal = r.p().pow((r.s() - 1) * r.d());
        assert_eq!(
            units,
            r.order() - ideal,
            "p={} s={} d={}",
            r.p(),
            r.s(),
            r.d()
        );
    }
}

#[test]
fn coset_representatives_differ_by_units() {
    for r in rings_up_to(10_000) {
        let reps = r.coset_reps();
        assert_eq!(reps.len() as u64, r.residue_order());
        assert_eq!(reps[0], Elem::ZERO);
        if reps.len() > 128 {
            continue;
        }
        for (i, &a) in reps.iter().enumerate() {
            for &b in &reps[i + 1..] {
                assert!(r.is_unit(r.sub(a, b)));
            }
        }
    }
}

#[test]
fn top_ideal_power_annihilates_the_ideal() {
    for r in rings_up_to(256).into_iter().filter(|r| r.s() > 1) {
        let top: Vec<Elem> = r
            .elements()
            .filter(|&a| r.in_ideal_power(a, r.s() - 1))
            .collect();
        assert!(top.iter().any(|&a| a != Elem::ZERO));
        for &a in &top {
            for b in r.elements().filter(|&b| r.in_ideal(b)) {
                assert_eq!(r.mul(a, b), Elem::ZERO);
            }
        }
    }
}

#[test]
fn spreads_partition_only_over_fields() {
    for r in rings_up_to(64) {
        let field = r.is_field();
        let (q, n) = (r.residue_order(), r.order());
        let sp = Spread::build(Arc::new(r)).unwrap();
        assert!(sp.lines_are_subgroups());
        assert!(sp.pairwise_trivial());
        assert_eq!(sp.covered_count() as u64 == n * n, field);
        let labels: Vec<_> = sp.labels().collect();
        for (i, &a) in labels.iter().enumerate() {
            for &b in &labels[i + 1..] {
                assert!(sp.product_is_g(a, b).unwrap());
            }
        }
        for pos in 0..=q as usize {
            assert_eq!(
                sp.line_cosets(sp.line_at(pos).label).unwrap().len() as u64,
                n
            );
        }
    }
}

fn ring_strategy() -> impl Strategy<Value = ChainRing> {
    prop::sample::select(vec![
        (2, 3, 1),
        (2, 2, 2),
        (3, 2, 2),
        (2, 1, 5),
        (5, 1, 2),
        (7, 2, 1),
        (2, 3, 2),
    ])
    .prop_map(|(p, s, d)| ChainRing::new(p, s, d).unwrap())
}

proptest! {
    #[test]
    fn ring_axioms(r in ring_strategy(), a in 0u32..4096, b in 0u32..4096, c in 0u32..4096) {
        let n = r.order() as u32;
        let (a, b, c) = (Elem(a % n), Elem(b % n), Elem(c % n));
        prop_assert_eq!(r.mul(a, b), r.mul(b, a));
        prop_assert_eq!(r.mul(r.mul(a, b), c), r.mul(a, r.mul(b, c)));
        prop_assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
        prop_assert_eq!(r.add(a, r.neg(a)), Elem::ZERO);
        prop_assert_eq!(r.mul(a, Elem::ONE), a);
        prop_assert_eq!(r.from_coeffs(&r.coeffs(a)).unwrap(), a);
    }

    #[test]
    fn units_have_inverses(r in ring_strategy(), a in 0u32..4096) {
        let a = Elem(a % r.order() as u32);
        let has_inverse = r.elements().any(|b| r.mul(a, b) == Elem::ONE);
        prop_assert_eq!(has_inverse, r.is_unit(a));
    }
}

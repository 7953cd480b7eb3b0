use std::collections::BTreeMap;

use bh_core::intersection::{
    admissible_c1, graph_degree_recurrence, mf_upper_bound, siu_bigness_check_rational, MultiClass, MultiProjSpace,
};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn space_and_bundles() -> impl Strategy<Value = (Vec<u32>, Vec<Vec<i64>>)> {
    prop::collection::vec(1u32..=3, 1..=3).prop_flat_map(|dims| {
        let r = dims.len();
        let total: u32 = dims.iter().sum();
        (
            Just(dims),
            prop::collection::vec(prop::collection::vec(-4i64..=4, r), total as usize),
        )
    })
}

/// Top-degree coefficient of `prod_k (sum_i a_ki x_i)` by assigning each
/// bundle to a factor, independent of the class arithmetic.
fn assignment_oracle(dims: &[u32], bundles: &[Vec<i64>]) -> BigInt {
    fn go(k: usize, left: &mut Vec<u32>, bundles: &[Vec<i64>], acc: BigInt) -> BigInt {
        if k == bundles.len() {
            return if left.iter().all(|&x| x == 0) {
                acc
            } else {
                BigInt::from(0)
            };
        }
        let mut total = BigInt::from(0);
        for i in 0..left.len() {
            if left[i] > 0 && bundles[k][i] != 0 {
                left[i] -= 1;
                total += go(k + 1, left, bundles, &acc * bundles[k][i]);
                left[i] += 1;
            }
        }
        total
    }
    go(0, &mut dims.to_vec(), bundles, BigInt::from(1))
}

fn class(space: &MultiProjSpace, a: &[i64]) -> MultiClass {
    MultiClass::line_bundle(space, a).unwrap()
}

proptest! {
    #[test]
    fn intersection_number_matches_assignment_count((dims, bundles) in space_and_bundles()) {
        let space = MultiProjSpace::new(dims.clone()).unwrap();
        let mut c = MultiClass::one(&space);
        for b in &bundles {
            c = c.mul(&class(&space, b)).unwrap();
        }
        prop_assert_eq!(c.intersection_number(), assignment_oracle(&dims, &bundles));
    }

    #[test]
    fn class_ring_laws((dims, bundles) in space_and_bundles(), k in -5i64..5) {
        prop_assume!(bundles.len() >= 3);
        let space = MultiProjSpace::new(dims).unwrap();
        let [a, b, c] = [0, 1, 2].map(|i| class(&space, &bundles[i]));
        prop_assert_eq!(a.mul(&b).unwrap(), b.mul(&a).unwrap());
        prop_assert_eq!(a.mul(&b).unwrap().mul(&c).unwrap(), a.mul(&b.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&b.add(&c).unwrap()).unwrap(), a.mul(&b).unwrap().add(&a.mul(&c).unwrap()).unwrap());
        prop_assert_eq!(a.mul(&MultiClass::one(&space)).unwrap(), a.clone());
        prop_assert!(a.mul(&MultiClass::zero(&space)).unwrap().is_zero());
        let kb = BigInt::from(k);
        prop_assert_eq!(a.scale(&kb).mul(&b).unwrap(), a.mul(&b).unwrap().scale(&kb));
        prop_assert_eq!(a.pow(2), a.mul(&a).unwrap());
    }

    #[test]
    fn classes_above_top_degree_vanish(dims in prop::collection::vec(1u32..=3, 1..=3), i in 0usize..3) {
        let space = MultiProjSpace::new(dims.clone()).unwrap();
        let i = i % dims.len();
        let h = MultiClass::hyperplane(&space, i).unwrap();
        prop_assert!(!h.pow(dims[i]).is_zero());
        prop_assert!(h.pow(dims[i] + 1).is_zero());
    }

    #[test]
    fn recurrence_has_closed_form(l in 1u32..40, dprime in 0i64..1000) {
        let dp = BigInt::from(dprime);
        let (d, dl) = graph_degree_recurrence(l, &dp).unwrap();
        let p = num_traits::pow(BigInt::from(4), l as usize);
        prop_assert_eq!(&d, &p);
        prop_assert_eq!(dl * 3, (p - 1) * dp);
    }

    #[test]
    fn mf_exact_sum_is_below_simplified_bound(
        d in 1u32..=4,
        n in 1u32..=4,
        extra in 0u32..=4,
        l in 1u32..=4,
        dprime in 1i64..=20,
        coeffs in prop::collection::vec(0i64..=50, 12),
    ) {
        let m = d + extra;
        let total = n + m - d;
        let mut a = BTreeMap::new();
        for (i, c) in (0..=total).zip(coeffs) {
            a.insert((i, total - i), BigInt::from(c));
        }
        let r = mf_upper_bound(d, n, m, l, &BigInt::from(dprime), &a).unwrap();
        prop_assert!(r.exact_sum <= r.simplified, "{} > {}", r.exact_sum, r.simplified);
    }

    #[test]
    fn admissible_c1_passes_and_boundary_fails(kn in 1i64..1000, kd in 1i64..50, cn in 1i64..1000, cd in 1i64..50, d in 1u32..8) {
        let kappa = BigRational::new(kn.into(), kd.into());
        let c = BigRational::new(cn.into(), cd.into());
        let c1 = admissible_c1(&kappa, &c, d).unwrap();
        prop_assert!(siu_bigness_check_rational(&kappa, &c, d, &c1, 1));
        let edge = &c1 * BigRational::from_integer(2.into());
        prop_assert!(!siu_bigness_check_rational(&kappa, &c, d, &edge, 1));
    }
}

#[test]
fn known_intersection_numbers() {
    let p2 = MultiProjSpace::new(vec![2]).unwrap();
    assert_eq!(class(&p2, &[3]).pow(2).intersection_number(), BigInt::from(9));
    let p1p1 = MultiProjSpace::new(vec![1, 1]).unwrap();
    // (1,1)^2 = 2 on P^1 x P^1.
    assert_eq!(class(&p1p1, &[1, 1]).pow(2).intersection_number(), BigInt::from(2));
    let p1p2 = MultiProjSpace::new(vec![1, 2]).unwrap();
    assert_eq!(class(&p1p2, &[1, 1]).pow(3).intersection_number(), BigInt::from(3));
}

use bh_core::counting::{
    alon_bound, alon_test, covering_bound, greedy_cover, nt_distance, nt_norm, split_small_large, MWLattice, MultiPoly,
};
use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn gram_strategy(rho: usize) -> impl Strategy<Value = DMatrix<f64>> {
    prop::collection::vec(-1.0f64..1.0, rho * rho).prop_map(move |v| {
        let a = DMatrix::from_vec(rho, rho, v);
        &a * a.transpose() + DMatrix::identity(rho, rho) * 0.25
    })
}

fn lattice_and_points() -> impl Strategy<Value = (MWLattice, Vec<Vec<f64>>)> {
    (1usize..=3).prop_flat_map(|rho| {
        (
            gram_strategy(rho).prop_map(|g| MWLattice::new(g).unwrap()),
            prop::collection::vec(prop::collection::vec(-3.0f64..3.0, rho), 1..60),
        )
    })
}

proptest! {
    #[test]
    fn greedy_cover_is_sound_and_within_bound((lat, pts) in lattice_and_points(), r in 0.3f64..3.0) {
        let centers = greedy_cover(&pts, &lat, r).unwrap();
        for p in &pts {
            let near = centers.iter().any(|&c| nt_distance(&lat, p, &pts[c]).unwrap() <= r);
            prop_assert!(near);
        }
        // Centers are pairwise more than r apart, so the packing count applies.
        for (i, &a) in centers.iter().enumerate() {
            for &b in &centers[i + 1..] {
                prop_assert!(nt_distance(&lat, &pts[a], &pts[b]).unwrap() > r);
            }
        }
        let big_r = pts.iter().map(|p| nt_norm(&lat, p).unwrap()).fold(0.0, f64::max).max(1e-9);
        let bound = covering_bound(big_r, r, lat.rank() as u32).unwrap();
        prop_assert!(centers.len() as f64 <= bound, "{} centers, bound {bound}", centers.len());
    }

    #[test]
    fn norm_is_homogeneous_and_subadditive((lat, pts) in lattice_and_points(), s in -4.0f64..4.0) {
        let x = &pts[0];
        let y = pts.last().unwrap();
        let nx = nt_norm(&lat, x).unwrap();
        let sx: Vec<f64> = x.iter().map(|v| v * s).collect();
        prop_assert!((nt_norm(&lat, &sx).unwrap() - s.abs() * nx).abs() <= 1e-9 * (1.0 + nx));
        let sum: Vec<f64> = x.iter().zip(y).map(|(a, b)| a + b).collect();
        prop_assert!(nt_norm(&lat, &sum).unwrap() <= nx + nt_norm(&lat, y).unwrap() + 1e-9);
        prop_assert!((nt_distance(&lat, x, y).unwrap() - nt_distance(&lat, y, x).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn partition_is_total_and_ordered(hs in prop::collection::vec(0.0f64..10.0, 0..50), b in 0.0f64..10.0) {
        let tagged: Vec<(usize, f64)> = hs.iter().copied().enumerate().collect();
        let p = split_small_large(&tagged, b).unwrap();
        prop_assert_eq!(p.small.len() + p.large.len(), hs.len());
        prop_assert!(p.small.iter().all(|&i| hs[i] <= b));
        prop_assert!(p.large.iter().all(|&i| hs[i] > b));
        prop_assert!(p.small.windows(2).all(|w| w[0] < w[1]));
        prop_assert!(p.large.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn single_factor_test_is_pointwise(
        roots in prop::collection::btree_set(-6i64..6, 1..4),
        sigma in prop::collection::btree_set(-8i64..8, 1..10),
    ) {
        // prod (X1 - r X0) on P^1 vanishes exactly at the points [1 : r].
        let q = |v: i64| BigRational::from_integer(v.into());
        let mut f = MultiPoly::in_factor(1, 1, 0, vec![(q(1), vec![0, 0])]).unwrap();
        for &r in &roots {
            f = f.product(&MultiPoly::in_factor(1, 1, 0, vec![(q(1), vec![0, 1]), (q(-r), vec![1, 0])]).unwrap()).unwrap();
        }
        let pts: Vec<Vec<BigRational>> = sigma.iter().map(|&t| vec![q(1), q(t)]).collect();
        let outside = alon_test(&pts, &[f], 1, 1000).unwrap();
        prop_assert_eq!(outside, sigma.iter().any(|t| !roots.contains(t)));
    }

    #[test]
    fn alon_bound_is_monotone(m in 1u32..5, c in 1u32..5, d in 1u32..5) {
        let b = alon_bound(m, c, d).unwrap();
        prop_assert!(b > BigInt::from(c * d));
        prop_assert!(alon_bound(m, c, d + 1).unwrap() >= b);
        prop_assert!(alon_bound(m, c + 1, d).unwrap() >= b);
        prop_assert!(alon_bound(m + 1, c, d).unwrap() >= b);
    }
}

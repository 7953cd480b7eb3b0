mod common;

use bh_core::siegel::{
    betti_coordinates, betti_form, betti_form_flat_polarized, betti_form_hermitian, betti_to_fiber,
    hermitian_eigen_range, hermitian_gram, kernel_directions, pullback_scaling, tangent_to_real, PolarizationType,
    SiegelPoint, TangentVector, C64,
};
use common::{random_siegel, random_tangent, random_vector};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(1e-300)
}

/// `(a, b)` differential by central differences of `betti_coordinates`,
/// independent of the closed-form tangent map.
fn fd_tangent(z: &SiegelPoint, w: &DVector<C64>, d: &PolarizationType, xi: &TangentVector, h: f64) -> DVector<f64> {
    let shift = |s: f64| {
        let zs = SiegelPoint::new(z.z() + &xi.z * C64::new(s, 0.0)).expect("small step stays in H_g");
        let ws = w + &xi.w * C64::new(s, 0.0);
        betti_coordinates(&zs, &ws, d).expect("solvable").raw()
    };
    (shift(h) - shift(-h)) / (2.0 * h)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn hermitian_form_is_sesquilinear_and_hermitian(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g);
        let xi = random_tangent(&mut rng, g);
        let eta = random_tangent(&mut rng, g);
        let h1 = betti_form_hermitian(&z, &w, &xi, &eta).unwrap();
        let h2 = betti_form_hermitian(&z, &w, &eta, &xi).unwrap();
        prop_assert!((h1 - h2.conj()).norm() <= 1e-12 * (1.0 + h1.norm()));
        let c = C64::new(0.3, -1.7);
        let scaled = TangentVector { w: &xi.w * c, z: &xi.z * c };
        let h3 = betti_form_hermitian(&z, &w, &scaled, &eta).unwrap();
        prop_assert!((h3 - c * h1).norm() <= 1e-12 * (1.0 + h3.norm()));
    }

    #[test]
    fn omega_matches_finite_difference_flat_form(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g);
        let xi = random_tangent(&mut rng, g);
        let eta = random_tangent(&mut rng, g);
        let d = PolarizationType::principal(g);
        let omega = betti_form(&z, &w, &xi, &eta).unwrap();
        let fd = betti_form_flat_polarized(&d, &fd_tangent(&z, &w, &d, &xi, 1e-5), &fd_tangent(&z, &w, &d, &eta, 1e-5)).unwrap();
        let closed = betti_form_flat_polarized(
            &d,
            &tangent_to_real(&z, &w, &d, &xi).unwrap(),
            &tangent_to_real(&z, &w, &d, &eta).unwrap(),
        ).unwrap();
        prop_assert!(rel(omega, closed) < 1e-9 || (omega - closed).abs() < 1e-12, "{omega} vs {closed}");
        prop_assert!((omega - fd).abs() < 1e-6 * (1.0 + omega.abs()), "{omega} vs {fd}");
    }

    #[test]
    fn omega_is_antisymmetric(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g);
        let xi = random_tangent(&mut rng, g);
        let eta = random_tangent(&mut rng, g);
        let a = betti_form(&z, &w, &xi, &eta).unwrap();
        let b = betti_form(&z, &w, &eta, &xi).unwrap();
        prop_assert!((a + b).abs() <= 1e-12 * (1.0 + a.abs()));
        prop_assert!(betti_form(&z, &w, &xi, &xi).unwrap().abs() <= 1e-12 * (1.0 + a.abs()));
    }

    #[test]
    fn gram_is_semi_positive(seed in any::<u64>(), g in 1usize..=3, k in 1usize..6) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g);
        let mut frame: Vec<TangentVector> = (0..k).map(|_| random_tangent(&mut rng, g)).collect();
        frame.extend(kernel_directions(&z, &w).unwrap());
        let (lo, hi) = hermitian_eigen_range(&hermitian_gram(&z, &w, &frame).unwrap());
        prop_assert!(lo >= -1e-10 * hi.max(0.0), "min eigenvalue {lo}, max {hi}");
    }

    #[test]
    fn kernel_directions_are_null(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g);
        let other = random_tangent(&mut rng, g);
        for k in kernel_directions(&z, &w).unwrap() {
            prop_assert!(betti_form_hermitian(&z, &w, &k, &other).unwrap().norm() < 1e-12);
            // The Betti coordinates do not move along a kernel direction.
            let d = PolarizationType::principal(g);
            prop_assert!(tangent_to_real(&z, &w, &d, &k).unwrap().amax() < 1e-12);
        }
    }

    #[test]
    fn pullback_scales_quadratically(seed in any::<u64>(), g in 1usize..=3, n in prop::sample::select(vec![2i64, 3, 5, -4])) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g);
        let xi = random_tangent(&mut rng, g);
        let r = pullback_scaling(&z, &w, &xi, n).unwrap();
        prop_assert!(rel(r, (n * n) as f64) < 1e-10, "ratio {r} for N = {n}");
    }

    #[test]
    fn coordinates_round_trip(seed in any::<u64>(), g in 1usize..=3, scale in 1u64..4) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let w = random_vector(&mut rng, g) * C64::new(3.0, 0.0);
        let d = PolarizationType::new((0..g).map(|i| scale.pow(i as u32)).collect()).unwrap();
        let c = betti_coordinates(&z, &w, &d).unwrap();
        let back = betti_to_fiber(&z, &c, &d).unwrap();
        prop_assert!((back - &w).iter().all(|x| x.norm() < 1e-12 * (1.0 + w.norm())));
        for x in c.a.iter().chain(c.b.iter()) {
            prop_assert!((0.0..1.0).contains(x));
        }
    }

    #[test]
    fn coordinates_are_additive(seed in any::<u64>(), g in 1usize..=3) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let z = random_siegel(&mut rng, g);
        let d = PolarizationType::principal(g);
        let u = random_vector(&mut rng, g);
        let v = random_vector(&mut rng, g);
        let cu = betti_coordinates(&z, &u, &d).unwrap();
        let cv = betti_coordinates(&z, &v, &d).unwrap();
        let cs = betti_coordinates(&z, &(&u + &v), &d).unwrap();
        prop_assert!((cs.raw() - cu.raw() - cv.raw()).amax() < 1e-12);
    }
}

#[test]
fn lattice_vectors_have_integral_coordinates() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for d in [vec![1, 2], vec![2, 4]] {
        let z = random_siegel(&mut rng, 2);
        let pol = PolarizationType::new(d.clone()).unwrap();
        // D e_1 * 3 + Z e_2 * (-2)
        let mut w = z.z().column(1).into_owned() * C64::new(-2.0, 0.0);
        w[0] += C64::new(3.0 * d[0] as f64, 0.0);
        let c = betti_coordinates(&z, &w, &pol).unwrap();
        let expect = DVector::from_vec(vec![3.0, 0.0, 0.0, -2.0]);
        assert!((c.raw() - expect).amax() < 1e-12);
    }
}

#[test]
fn rejects_degenerate_period_matrix() {
    let z = DMatrix::from_row_slice(
        2,
        2,
        &[
            C64::new(0.0, 1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 1.0),
            C64::new(0.0, 1.0),
        ],
    );
    assert!(SiegelPoint::new(z).is_err());
}

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use qfilter::io::{state_from_json, state_to_json};
use qfilter::linalg::{svd, CMatrix};
use qfilter::measure::{build_projector, postselect_diag};
use qfilter::qstate::partial_transpose_b_matrix;
use qfilter::random::{random_density_matrix, random_matrix, random_state};
use qfilter::witness::{choi_phi, choi_psi};

fn diagonal(max_len: usize) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(1e-6f64..=1.0, 1..=max_len)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn projector_is_idempotent(d in diagonal(5)) {
        let p = build_projector(&d).unwrap();
        let m = p.matrix();
        prop_assert!((m * m).approx_eq(m, 1e-10));
        prop_assert!((m.trace().re - d.len() as f64).abs() < 1e-10);
        prop_assert!(p.system_block().approx_eq(&CMatrix::diag(&d), 0.0));
    }

    #[test]
    fn postselection_is_diagonal_sandwich(d in diagonal(4), seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_density_matrix(&mut rng, d.len());
        let (out, prob) = postselect_diag(&d, &rho).unwrap();
        let dm = CMatrix::diag(&d);
        prop_assert!(out.approx_eq(&(&(&dm * &rho) * &dm), 1e-12));
        prop_assert!(prob > 0.0 && prob <= 1.0 + 1e-12);
    }

    #[test]
    fn partial_transpose_is_involution(da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let m = random_matrix(&mut rng, da * db, da * db);
        let twice = partial_transpose_b_matrix(&partial_transpose_b_matrix(&m, da, db), da, db);
        prop_assert!(twice.approx_eq(&m, 0.0));
    }

    #[test]
    fn svd_reconstructs(n in 1usize..6, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, n, n);
        let s = svd(&a).unwrap();
        prop_assert!(s.reconstruct().approx_eq(&a, 1e-10));
        prop_assert!(s.d.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn choi_maps_preserve_trace(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_density_matrix(&mut rng, 3);
        for img in [choi_phi(&a).unwrap(), choi_psi(&a).unwrap()] {
            prop_assert!((img.trace() - a.trace()).norm() < 1e-12);
        }
    }

    #[test]
    fn state_json_round_trip(da in 1usize..4, db in 1usize..4, seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let rho = random_state(&mut rng, da, db);
        let back = state_from_json(&state_to_json(&rho).to_string()).unwrap();
        prop_assert_eq!(back.dims(), rho.dims());
        prop_assert!(back.matrix().approx_eq(rho.matrix(), 0.0));
    }
}

mod common;

use common::{gauss_jordan_inverse, matmul, random_hermitian, taylor_expm};
use markov_elim::numkernel::{
    herm_eig, herm_inv_sqrt, herm_inverse, spectral_norms, unitary_propagator, ComplexMatrix, Propagator,
};
use markov_elim::Error;
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn eigendecomposition_reconstructs(seed in any::<u64>(), d in 1usize..=8) {
        let a = random_hermitian(&mut rng(seed), d, 1.0);
        let eig = herm_eig(&a).unwrap();
        let v = &eig.vectors;
        let rebuilt = matmul(&matmul(v, &ComplexMatrix::from_real_diagonal(&eig.values)), &v.adjoint());
        prop_assert!(rebuilt.max_abs_diff(&a) < 1e-10);
        prop_assert!(matmul(&v.adjoint(), v).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
        prop_assert!(eig.values.windows(2).all(|w| w[0] <= w[1]));
        let tr: f64 = eig.values.iter().sum();
        prop_assert!((tr - a.trace().re).abs() < 1e-12);
    }

    #[test]
    fn propagator_matches_taylor_series(seed in any::<u64>(), d in 1usize..=6, t in -5.0f64..5.0) {
        let h = random_hermitian(&mut rng(seed), d, 1.0);
        let u = unitary_propagator(&h, t).unwrap();
        prop_assert!(u.max_abs_diff(&taylor_expm(&h, t)) < 1e-10);
    }

    #[test]
    fn propagator_is_unitary_group(seed in any::<u64>(), d in 1usize..=6, t1 in -1e3f64..1e3, t2 in -1e3f64..1e3) {
        let h = random_hermitian(&mut rng(seed), d, 1.0);
        let p = Propagator::new(&h).unwrap();
        let id = ComplexMatrix::identity(d);
        prop_assert!(matmul(&p.matrix(t1), &p.matrix(-t1)).max_abs_diff(&id) < 1e-10);
        prop_assert!(matmul(&p.matrix(t1), &p.matrix(t2)).max_abs_diff(&p.matrix(t1 + t2)) < 1e-9);
    }

    #[test]
    fn inverse_matches_gauss_jordan(seed in any::<u64>(), d in 1usize..=6) {
        // Spectrum bounded away from zero keeps the comparison well conditioned.
        let a = random_hermitian(&mut rng(seed), d, 0.3).add_scalar_identity(2.0);
        let inv = herm_inverse(&a).unwrap();
        prop_assert!(inv.max_abs_diff(&gauss_jordan_inverse(&a)) < 1e-12);
    }

    #[test]
    fn square_roots_of_positive_matrix(seed in any::<u64>(), d in 1usize..=5) {
        let b = random_hermitian(&mut rng(seed), d, 0.5);
        let p = matmul(&b, &b).add_scalar_identity(1.0);
        let roots = herm_inv_sqrt(&p).unwrap();
        prop_assert!(matmul(&roots.sqrt, &roots.sqrt).max_abs_diff(&p) < 1e-12);
        prop_assert!(matmul(&matmul(&roots.inv_sqrt, &roots.inv_sqrt), &p).max_abs_diff(&ComplexMatrix::identity(d)) < 1e-12);
        prop_assert!(roots.inv_sqrt.hermiticity_defect() < 1e-14);
    }

    #[test]
    fn norm_duality(seed in any::<u64>(), d in 1usize..=8) {
        let a = random_hermitian(&mut rng(seed), d, 1.0);
        let n = spectral_norms(&a).unwrap();
        prop_assert!(n.op <= n.trace + 1e-14);
        prop_assert!(n.trace <= d as f64 * n.op + 1e-14);
    }
}

#[test]
fn rejects_non_hermitian_input() {
    let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
    assert!(matches!(herm_eig(&a), Err(Error::NotHermitian { .. })));
}

#[test]
fn singular_inverse_is_reported() {
    let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
    assert!(matches!(herm_inverse(&a), Err(Error::SingularBlock { .. })));
}

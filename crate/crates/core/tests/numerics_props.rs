use carlab::covariance::{random_covariance, validate};
use carlab::numerics::{herm_eig, ComplexMatrix, C64};
use carlab::Involution;
use proptest::prelude::*;

fn complex() -> impl Strategy<Value = C64> {
    (-2.0..2.0f64, -2.0..2.0f64).prop_map(|(re, im)| C64::new(re, im))
}

fn sized(n: usize) -> impl Strategy<Value = ComplexMatrix> {
    prop::collection::vec(complex(), n * n).prop_map(move |d| ComplexMatrix::new(n, n, d).unwrap())
}

fn square(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max).prop_flat_map(sized)
}

/// Two pairs of same-sized square matrices.
fn two_pairs() -> impl Strategy<Value = (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix)> {
    (1usize..=3, 1usize..=3).prop_flat_map(|(p, q)| (sized(p), sized(q), sized(p), sized(q)))
}

fn hermitian(max: usize) -> impl Strategy<Value = ComplexMatrix> {
    square(max).prop_map(|m| (&m + &m.adjoint()).scale_real(0.5))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn trace_of_kron_factors(a in square(4), b in square(4)) {
        let lhs = a.kron(&b).trace();
        let rhs = a.trace() * b.trace();
        prop_assert!((lhs - rhs).norm() <= 1e-12 * (1.0 + rhs.norm()));
    }

    #[test]
    fn adjoint_twice_is_identity(m in square(5)) {
        prop_assert_eq!(m.adjoint().adjoint(), m);
    }

    #[test]
    fn kron_mixed_product((a, b, c, d) in two_pairs()) {
        let lhs = &a.kron(&b) * &c.kron(&d);
        let rhs = (&a * &c).kron(&(&b * &d));
        prop_assert!(lhs.max_abs_diff(&rhs) <= 1e-11);
    }

    #[test]
    fn eigendecomposition_reconstructs(m in hermitian(6)) {
        let e = herm_eig(&m).unwrap();
        prop_assert!(e.reconstruct().max_abs_diff(&m) <= 1e-11);
        prop_assert!(e.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
        let v = &e.eigenvectors;
        prop_assert!((&v.adjoint() * v).max_abs_diff(&ComplexMatrix::identity(m.rows())) <= 1e-11);
    }

    #[test]
    fn valid_spectrum_in_unit_interval(k in 2usize..=7, seed in any::<u64>(), scale in 0.0..=1.0f64) {
        let gamma = Involution::swap_conjugation(k);
        let s = random_covariance(k, &gamma, scale, seed).unwrap();
        let s = validate(s.matrix().clone(), &gamma).unwrap();
        let tol = 1e-9 * k as f64;
        for w in herm_eig(s.matrix()).unwrap().eigenvalues {
            prop_assert!((-tol..=1.0 + tol).contains(&w));
        }
    }
}

use carlab::car_rep::{build_rep, majorana_basis, verify_car};
use carlab::numerics::{ComplexMatrix, C64};
use carlab::{AlgebraElement, JordanWignerRep, Parity};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn shape(max_n: usize) -> impl Strategy<Value = (usize, Parity)> {
    (0..=max_n, prop::bool::ANY).prop_map(|(n, odd)| (n, if odd || n == 0 { Parity::Odd } else { Parity::Even }))
}

/// A random element of the represented algebra: a random combination of
/// monomials.
fn random_element(rep: &JordanWignerRep, rng: &mut impl Rng) -> AlgebraElement {
    let basis = majorana_basis(rep).unwrap();
    let d = rep.rep_dim();
    let mut m = ComplexMatrix::zeros(d, d);
    for mono in basis.monomials() {
        let g = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        m = &m + &mono.matrix.scale(g);
    }
    rep.element(m).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn car_holds_on_small_reps((n, parity) in shape(4), seed in any::<u64>()) {
        let rep = build_rep(n, parity).unwrap();
        let r = verify_car(&rep, 20, seed);
        prop_assert!(r.passed, "{r:?}");
    }

    #[test]
    fn expand_then_reconstruct((n, parity) in shape(3), seed in any::<u64>()) {
        let rep = build_rep(n, parity).unwrap();
        let basis = majorana_basis(&rep).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_element(&rep, &mut rng);
        let back = basis.reconstruct(&basis.expand(&a).unwrap());
        prop_assert!(back.max_abs_diff(&a.matrix) <= 1e-10 * rep.rep_dim() as f64);
    }
}

#[test]
fn monomials_are_trace_orthonormal() {
    for n in 0..=3 {
        for parity in [Parity::Even, Parity::Odd] {
            if n == 0 && parity == Parity::Even {
                continue;
            }
            let rep = build_rep(n, parity).unwrap();
            let basis = majorana_basis(&rep).unwrap();
            let m = basis.monomials();
            for (i, a) in m.iter().enumerate() {
                for (j, b) in m.iter().enumerate() {
                    let g = a.matrix.normalized_inner(&b.matrix);
                    let expected = if i == j { 1.0 } else { 0.0 };
                    assert!((g - C64::new(expected, 0.0)).norm() <= 1e-12, "n={n} {parity:?} ({i},{j}) = {g}");
                }
            }
        }
    }
}

#[test]
fn distinct_majoranas_anticommute() {
    for n in 1..=4 {
        for parity in [Parity::Even, Parity::Odd] {
            let rep = build_rep(n, parity).unwrap();
            let labels: Vec<usize> = rep.shape().majorana_labels().collect();
            for &a in &labels {
                for &b in &labels {
                    let ac = rep.majorana(a).anticommutator(rep.majorana(b));
                    let expected = if a == b {
                        ComplexMatrix::identity(rep.rep_dim()).scale_real(2.0)
                    } else {
                        ComplexMatrix::zeros(rep.rep_dim(), rep.rep_dim())
                    };
                    assert!(ac.max_abs_diff(&expected) <= 1e-12, "n={n} {parity:?} c{a} c{b}");
                }
            }
        }
    }
}

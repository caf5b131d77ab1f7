use carlab::affine::{
    decide_commuting, default_lambda_grid, explore_conjecture, mixture, necessary_check, numeric_test,
    numeric_test_default, sample_pair, trial_rng, CampaignConfig, DiscrepancyProbe, SamplingMode,
};
use carlab::car_rep::build_rep;
use carlab::covariance::{adapted_diagonalize, random_adapted_frame, GammaAdaptedBasis};
use carlab::numerics::{blocks, ONE, ZERO};
use carlab::quasifree::evaluate;
use carlab::{AffineOptions, Involution, Parity, Verdict};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn mode() -> impl Strategy<Value = SamplingMode> {
    prop::sample::select(SamplingMode::ALL.to_vec())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn low_degree_discrepancy_vanishes(k in 2usize..=7, m in mode(), seed in any::<u64>()) {
        let gamma = Involution::swap_conjugation(k);
        let (s, s2) = sample_pair(&gamma, m, &mut trial_rng(seed, 0)).unwrap();
        let frame = adapted_diagonalize(&s).unwrap();
        let probe = DiscrepancyProbe::new(&s, &s2, &frame).unwrap();
        for lambda in [0.2, 0.5, 0.9] {
            for (mask, d) in probe.at(lambda).unwrap() {
                if mask.count_ones() <= 2 {
                    prop_assert!(d.norm() <= 1e-12, "mask {mask:b} λ {lambda} D {d}");
                }
            }
        }
    }

    #[test]
    fn affine_pairs_pass_necessary_check(k in 2usize..=6, m in mode(), seed in any::<u64>()) {
        let gamma = Involution::swap_conjugation(k);
        let (s, s2) = sample_pair(&gamma, m, &mut trial_rng(seed, 1)).unwrap();
        if numeric_test_default(&s, &s2).unwrap().verdict == Verdict::Affine {
            prop_assert!(necessary_check(&s, &s2).unwrap().holds);
        }
    }

    #[test]
    fn verdict_is_symmetric(k in 2usize..=6, m in mode(), seed in any::<u64>()) {
        let gamma = Involution::swap_conjugation(k);
        let (s, s2) = sample_pair(&gamma, m, &mut trial_rng(seed, 2)).unwrap();
        let ab = numeric_test_default(&s, &s2).unwrap();
        let ba = numeric_test_default(&s2, &s).unwrap();
        prop_assert_eq!(ab.verdict, ba.verdict);
        prop_assert_eq!(ab.diff_rank, ba.diff_rank);
    }

    #[test]
    fn one_interior_lambda_decides_commuting_pairs(k in 2usize..=7, seed in any::<u64>(), lambda in 0.05..0.95f64) {
        let gamma = Involution::swap_conjugation(k);
        let (s, s2) = sample_pair(&gamma, SamplingMode::Commuting, &mut trial_rng(seed, 3)).unwrap();
        let frame = adapted_diagonalize(&s).unwrap();
        let single = numeric_test(&s, &s2, Some(&[lambda]), &frame).unwrap();
        let full = numeric_test(&s, &s2, None, &frame).unwrap();
        prop_assert_eq!(single.verdict, full.verdict);
    }

    #[test]
    fn concordance_with_closed_form(k in 2usize..=7, seed in any::<u64>()) {
        let gamma = Involution::swap_conjugation(k);
        let (s, s2) = sample_pair(&gamma, SamplingMode::Commuting, &mut trial_rng(seed, 4)).unwrap();
        prop_assert_eq!(decide_commuting(&s, &s2).unwrap().verdict, numeric_test_default(&s, &s2).unwrap().verdict);
    }

    // In a commuting frame the discrepancy on `Z_i Z_j` (the product of the
    // Majorana pairs of modes i and j) is `-4λ(1-λ)Δ_iΔ_j`.
    #[test]
    fn mode_pair_discrepancy(k in 4usize..=7, seed in any::<u64>(), lambda in 0.05..0.95f64) {
        let gamma = Involution::swap_conjugation(k);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let frame = random_adapted_frame(&gamma, &mut rng).unwrap();
        let n = frame.n();
        let a: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let b: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
        let frame = frame.with_alphas(a.clone()).unwrap();
        let s = frame.operator().unwrap();
        let s2 = frame.with_alphas(b.clone()).unwrap().operator().unwrap();
        let probe = DiscrepancyProbe::new(&s, &s2, &frame).unwrap();
        let d = probe.at(lambda).unwrap();
        for i in 0..n {
            for j in i + 1..n {
                let mask = (0b11u32 << (2 * i + 1)) | (0b11u32 << (2 * j + 1));
                let got = d.iter().find(|(m, _)| *m == mask).unwrap().1;
                let expected = -4.0 * lambda * (1.0 - lambda) * (a[i] - b[i]) * (a[j] - b[j]);
                prop_assert!((got.re - expected).abs() <= 1e-12 && got.im.abs() <= 1e-12);
            }
        }
    }
}

/// `diag(1,0) ⊗ diag(0,1)` reads `α₁(1 - α₂)` under a product state, and the
/// discrepancy of a product of two affine functions of λ is
/// `λ(1-λ)` times the product of their increments: `-λ(1-λ)Δ₁Δ₂`.
#[test]
fn two_mode_closed_form_sign() {
    let gamma = Involution::swap_conjugation(4);
    let unit = |p: usize| {
        let mut v = vec![ZERO; 4];
        v[p] = ONE;
        v
    };
    let rep = build_rep(2, Parity::Even).unwrap();
    let element = rep.element(blocks::diag2(1.0, 0.0).kron(&blocks::diag2(0.0, 1.0))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for _ in 0..50 {
        let a = [rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)];
        let b = [rng.random_range(0.0..=1.0), rng.random_range(0.0..=1.0)];
        let frame = GammaAdaptedBasis::from_frame(&gamma, vec![unit(0), unit(2)], None, a.to_vec()).unwrap();
        let s = frame.operator().unwrap();
        let s2 = frame.with_alphas(b.to_vec()).unwrap().operator().unwrap();
        for j in 1..=9 {
            let l = j as f64 / 10.0;
            let mix = mixture(&s, &s2, l).unwrap();
            let phi = |x| evaluate(x, &frame, &element).unwrap();
            assert!((phi(&s).re - a[0] * (1.0 - a[1])).abs() < 1e-12);
            let d = phi(&s) * l + phi(&s2) * (1.0 - l) - phi(&mix);
            let closed = -l * (1.0 - l) * (a[0] - b[0]) * (a[1] - b[1]);
            assert!((d.re - closed).abs() <= 1e-12 && d.im.abs() <= 1e-12);
        }
    }
}

#[test]
fn grid_points_are_interior() {
    for k in 1..=7 {
        let g = default_lambda_grid(k);
        assert_eq!(g.len(), k / 2 + 1);
        assert!(g.iter().all(|&l| l > 0.0 && l < 1.0));
    }
}

#[test]
fn single_index_changes_give_affine_rank_two() {
    let gamma = Involution::swap_conjugation(6);
    let mut rng = ChaCha8Rng::seed_from_u64(36);
    for _ in 0..30 {
        let frame = random_adapted_frame(&gamma, &mut rng).unwrap();
        let a: Vec<f64> = (0..3).map(|_| rng.random_range(0.0..=1.0)).collect();
        let mut b = a.clone();
        let i = rng.random_range(0..3);
        b[i] = (a[i] + rng.random_range(0.1..0.9)) % 1.0;
        let s = frame.with_alphas(a).unwrap().operator().unwrap();
        let s2 = frame.with_alphas(b).unwrap().operator().unwrap();
        let r = numeric_test_default(&s, &s2).unwrap();
        assert_eq!(r.verdict, Verdict::Affine);
        assert_eq!(r.diff_rank, 2);
    }
}

#[test]
fn small_campaign_has_no_rank_one_and_round_trips() {
    let cfg = CampaignConfig {
        gamma: Involution::swap_conjugation(4),
        trials: 40,
        seed: 7,
        modes: SamplingMode::ALL.to_vec(),
        options: AffineOptions::default(),
    };
    let report = explore_conjecture(&cfg).unwrap().report;
    assert!(report.violations.is_empty());
    assert!(report.histogram.iter().all(|h| h.rank != 1));
    assert_eq!(report.pairs_tested, 120);
    let json = serde_json::to_string(&report).unwrap();
    let back: carlab::CampaignReport = serde_json::from_str(&json).unwrap();
    assert_eq!(back, report);
}

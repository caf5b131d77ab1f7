//! Acceptance gate. Runs every criterion at its stated tolerance, prints one
//! line per criterion and exits non-zero if any of them fails.

use std::time::{Duration, Instant};

use carlab::affine::{
    decide_commuting, explore_conjecture, mixture, necessary_check, numeric_test_default, sample_pair, trial_rng,
    CampaignConfig, SamplingMode,
};
use carlab::car_rep::{build_rep, mask_to_labels, monomial_masks, verify_car, ModeCoords};
use carlab::covariance::{
    gamma_form, random_adapted_frame, random_covariance_with, random_hermitian, symmetrized_gamma_form, validate,
    GammaAdaptedBasis,
};
use carlab::golden;
use carlab::numerics::{blocks, inner, ONE, ZERO};
use carlab::quasifree::{evaluate, trace_eval};
use carlab::{AffineOptions, Involution, Parity, Verdict, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome { passed, detail: detail.into() }
}

fn shapes(max_n: usize) -> Vec<(usize, Parity)> {
    let mut v = vec![(0, Parity::Odd)];
    for n in 1..=max_n {
        v.push((n, Parity::Even));
        v.push((n, Parity::Odd));
    }
    v
}

fn dim_of(n: usize, parity: Parity) -> usize {
    2 * n + usize::from(parity == Parity::Odd)
}

fn random_alphas(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(0.0..=1.0)).collect()
}

fn car_relations() -> Outcome {
    let mut worst: f64 = 0.0;
    let mut failed = Vec::new();
    for (i, (n, parity)) in shapes(4).into_iter().enumerate() {
        let rep = build_rep(n, parity).unwrap();
        let r = verify_car(&rep, 100, 1000 + i as u64);
        worst = worst.max(r.max_anticommutator_residual.max(r.max_adjoint_residual) / rep.rep_dim() as f64);
        if !r.passed {
            failed.push(format!("n={n} {parity:?}"));
        }
    }
    outcome(failed.is_empty(), format!("max residual/rep_dim {worst:.2e}; failing shapes {failed:?}"))
}

fn wick_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    let mut checked = 0usize;
    for (n, parity) in shapes(3) {
        let k = dim_of(n, parity);
        let gamma = Involution::swap_conjugation(k);
        let rep = build_rep(n, parity).unwrap();
        for _ in 0..20 {
            let frame = random_adapted_frame(&gamma, &mut rng).unwrap();
            let frame = frame.with_alphas(random_alphas(n, &mut rng)).unwrap();
            let s = frame.operator().unwrap();
            for mask in monomial_masks(rep.shape()) {
                let a = rep.element(rep.monomial_matrix(&mask_to_labels(mask))).unwrap();
                let wick = evaluate(&s, &frame, &a).unwrap();
                let trace = trace_eval(&frame, &a);
                worst = worst.max((wick - trace).norm());
                checked += 1;
            }
        }
    }
    outcome(worst <= 1e-10, format!("{checked} monomial evaluations, max |wick - trace| {worst:.2e}"))
}

fn golden_example() -> Outcome {
    let r = golden::reproduce().unwrap();
    let reference = golden::reference();
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12);
    let eig_ok = close(&r.eigenvalues_s, &reference.eigenvalues_s)
        && close(&r.eigenvalues_s_prime, &reference.eigenvalues_s_prime);
    let values = [r.own_frame.s, r.own_frame.s_prime, r.own_frame.mixture];
    let values_ok = close(&values, &reference.values);
    let expected = (0.5 - (3f64.sqrt() + 2f64.sqrt()) / 6.0).abs();
    let verdict_ok = r.affine.verdict == Verdict::NotAffine;
    let witness_ok = r.affine.witness_discrepancy.is_some_and(|d| (d.norm() - expected).abs() <= 1e-12);
    let rank_ok = r.diff_rank == 2;
    outcome(
        eig_ok && values_ok && verdict_ok && witness_ok && rank_ok,
        format!(
            "eigenvalues {}, state values {}, verdict {:?} (max |D| {:.2e}, expected witness {expected:.7}), diff_rank {}",
            ok(eig_ok),
            ok(values_ok),
            r.affine.verdict,
            r.affine.max_discrepancy,
            r.diff_rank
        ),
    )
}

fn ok(b: bool) -> &'static str {
    if b {
        "ok"
    } else {
        "MISMATCH"
    }
}

fn concordance() -> Outcome {
    let mut disagreements = 0usize;
    let mut total = 0usize;
    let mut not_affine = 0usize;
    for k in 2..=7 {
        let gamma = Involution::swap_conjugation(k);
        for t in 0..100 {
            let mut rng = trial_rng(40 + k as u64, t);
            let (s, s2) = sample_pair(&gamma, SamplingMode::Commuting, &mut rng).unwrap();
            let a = decide_commuting(&s, &s2).unwrap();
            let b = numeric_test_default(&s, &s2).unwrap();
            total += 1;
            not_affine += usize::from(a.verdict == Verdict::NotAffine);
            disagreements += usize::from(a.verdict != b.verdict);
        }
    }
    outcome(
        disagreements == 0,
        format!("{total} commuting pairs ({not_affine} not affine), {disagreements} disagreements"),
    )
}

/// `b ⊗ b'` with `b = diag(1,0)`, `b' = diag(0,1)` on two modes, evaluated in
/// the frame `ε₁ = e₁`, `ε₂ = e₃` of the standard involution on `C⁴`.
fn closed_form() -> Outcome {
    let gamma = Involution::swap_conjugation(4);
    let unit = |p: usize| {
        let mut v = vec![ZERO; 4];
        v[p] = ONE;
        v
    };
    let rep = build_rep(2, Parity::Even).unwrap();
    let element = rep.element(blocks::diag2(1.0, 0.0).kron(&blocks::diag2(0.0, 1.0))).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    let mut worst_negated: f64 = 0.0;
    for _ in 0..50 {
        let a = random_alphas(2, &mut rng);
        let a2 = random_alphas(2, &mut rng);
        let frame = GammaAdaptedBasis::from_frame(&gamma, vec![unit(0), unit(2)], None, a.clone()).unwrap();
        let s = frame.operator().unwrap();
        let s2 = frame.with_alphas(a2.clone()).unwrap().operator().unwrap();
        for j in 1..=9 {
            let lambda = j as f64 / 10.0;
            let mix = mixture(&s, &s2, lambda).unwrap();
            let d = evaluate(&s, &frame, &element).unwrap() * lambda
                + evaluate(&s2, &frame, &element).unwrap() * (1.0 - lambda)
                - evaluate(&mix, &frame, &element).unwrap();
            let closed = lambda * (1.0 - lambda) * (a[0] - a2[0]) * (a[1] - a2[1]);
            worst = worst.max((d - closed).norm());
            worst_negated = worst_negated.max((d + closed).norm());
        }
    }
    outcome(
        worst <= 1e-10,
        format!("max |D - λ(1-λ)Δ₁Δ₂| = {worst:.2e} over 450 cases; max |D + λ(1-λ)Δ₁Δ₂| = {worst_negated:.2e}"),
    )
}

fn two_dimensional() -> Outcome {
    let gamma = Involution::swap_conjugation(2);
    let mut worst: f64 = 0.0;
    let mut non_affine = 0usize;
    for t in 0..200 {
        let mut rng = trial_rng(6, t);
        let (s, s2) = sample_pair(&gamma, SamplingMode::Random, &mut rng).unwrap();
        let r = numeric_test_default(&s, &s2).unwrap();
        worst = worst.max(r.max_discrepancy);
        non_affine += usize::from(r.verdict != Verdict::Affine);
    }
    outcome(non_affine == 0 && worst <= 1e-11, format!("200 pairs, {non_affine} not affine, max |D| {worst:.2e}"))
}

fn no_rank_one() -> Outcome {
    let mut pairs = 0usize;
    let mut rank_one = 0usize;
    for k in 2..=7 {
        let cfg = CampaignConfig {
            gamma: Involution::swap_conjugation(k),
            trials: 112,
            seed: 70 + k as u64,
            modes: SamplingMode::ALL.to_vec(),
            options: AffineOptions::default(),
        };
        let report = explore_conjecture(&cfg).unwrap().report;
        pairs += report.pairs_tested;
        rank_one += report.histogram.iter().filter(|h| h.rank == 1).map(|h| h.count).sum::<usize>();
        rank_one += report.violations.len();
    }
    outcome(pairs >= 2000 && rank_one == 0, format!("{pairs} pairs, {rank_one} with difference rank 1"))
}

fn linear_form() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut worst: f64 = 0.0;
    let mut spread: f64 = 0.0;
    for op in 0..50 {
        let k = 2 * (1 + op % 3);
        let n = k / 2;
        let gamma = Involution::swap_conjugation(k);
        let frame = random_adapted_frame(&gamma, &mut rng).unwrap();
        let basis = frame.with_alphas(random_alphas(n, &mut rng)).unwrap();
        let other = frame.with_alphas(random_alphas(n, &mut rng)).unwrap();
        let s = basis.operator().unwrap();
        let s_other = other.operator().unwrap();
        for _ in 0..50 {
            let mut c = ModeCoords::zero(basis.shape());
            for i in 0..n {
                c.x[i] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
                c.y[i] = C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
            }
            let xi = basis.vector(&c);
            let expected: C64 = c.x.iter().zip(&c.y).map(|(x, y)| x * y).sum();
            let b = gamma_form(&s, &xi, &xi);
            worst = worst.max((b - expected).norm());
            spread = spread.max((b - gamma_form(&s_other, &xi, &xi)).norm());
        }
    }
    outcome(
        worst <= 1e-10 && spread <= 1e-10,
        format!("2500 vectors, max |B(ξ,ξ) - Σ x_i y_i| {worst:.2e}, max change under new α's {spread:.2e}"),
    )
}

/// Tries to build valid pairs whose symmetrized Γ-forms differ by perturbing
/// the Γ-odd part of `S` with weights that break the `ΓHΓ = -H` symmetry by
/// varying amounts.
fn contrapositive() -> Outcome {
    const WANTED: usize = 50;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut constructed = Vec::new();
    let mut attempts = 0usize;
    let mut invalid = 0usize;
    let mut equal_forms = 0usize;
    let mut form_identity: f64 = 0.0;
    while constructed.len() < WANTED && attempts < 5000 {
        attempts += 1;
        let k = 2 + attempts % 5;
        let gamma = Involution::swap_conjugation(k);
        let s = random_covariance_with(&gamma, rng.random_range(0.2..0.8), &mut rng).unwrap();
        let t = random_hermitian(k, &mut rng);
        let t_conj = gamma.conjugate_operator(&t);
        let odd = (&t - &t_conj).scale_real(0.5);
        let even = (&t + &t_conj).scale_real(0.5);
        let skew: f64 = [0.0, 1e-6, 1e-3, 0.1, 1.0][attempts % 5];
        let h = &odd + &even.scale_real(skew);
        let size = rng.random_range(0.01..0.2);
        let candidate = s.matrix() + &h.scale_real(size);
        let form = {
            let id_half = symmetrized_gamma_form(&s);
            let mut r: f64 = 0.0;
            for p in 0..k {
                for q in 0..k {
                    let mut ep = vec![ZERO; k];
                    ep[p] = ONE;
                    let mut eq = vec![ZERO; k];
                    eq[q] = ONE;
                    let target = inner(&ep, &gamma.apply(&eq));
                    r = r.max((id_half[(p, q)] - target).norm());
                }
            }
            r
        };
        form_identity = form_identity.max(form);
        match validate(candidate, &gamma) {
            Err(_) => invalid += 1,
            Ok(s2) => {
                if necessary_check(&s, &s2).unwrap().holds {
                    equal_forms += 1;
                } else {
                    constructed.push((s, s2));
                }
            }
        }
    }
    let verdicts_ok =
        constructed.iter().all(|(s, s2)| numeric_test_default(s, s2).unwrap().verdict == Verdict::NotAffine);
    outcome(
        constructed.len() == WANTED && verdicts_ok,
        format!(
            "constructed {}/{WANTED} valid pairs with unequal forms in {attempts} attempts \
             ({invalid} candidates invalid, {equal_forms} valid with equal forms); \
             max |B_S(e_p,e_q) + B_S(e_q,e_p) - (e_p, Γe_q)| over all valid S drawn = {form_identity:.2e}",
            constructed.len()
        ),
    )
}

fn determinism() -> Outcome {
    let mut identical = true;
    let mut sizes = Vec::new();
    for k in [3, 4, 6] {
        let cfg = CampaignConfig {
            gamma: Involution::swap_conjugation(k),
            trials: 60,
            seed: 10,
            modes: SamplingMode::ALL.to_vec(),
            options: AffineOptions::default(),
        };
        let a = serde_json::to_string_pretty(&explore_conjecture(&cfg).unwrap().report).unwrap();
        let b = serde_json::to_string_pretty(&explore_conjecture(&cfg).unwrap().report).unwrap();
        let single = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = single.install(|| serde_json::to_string_pretty(&explore_conjecture(&cfg).unwrap().report).unwrap());
        identical &= a == b && a == c;
        sizes.push(a.len());
    }
    outcome(
        identical,
        format!("three campaigns run three times each (one single-threaded), report sizes {sizes:?} bytes"),
    )
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome, Option<Duration>);
    let criteria: [Criterion; 10] = [
        ("CAR relations", car_relations, Some(Duration::from_secs(10))),
        ("Wick oracle", wick_oracle, Some(Duration::from_secs(60))),
        ("golden example", golden_example, Some(Duration::from_secs(1))),
        ("commuting concordance", concordance, Some(Duration::from_secs(300))),
        ("two-mode closed form", closed_form, None),
        ("dimension two always affine", two_dimensional, None),
        ("difference rank never 1", no_rank_one, None),
        ("Γ-form is Σ x_i y_i", linear_form, None),
        ("unequal forms imply not affine", contrapositive, None),
        ("campaign determinism", determinism, None),
    ];
    let mut failures = 0;
    for (i, (name, run, budget)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let mut o = run();
        let elapsed = start.elapsed();
        if let Some(b) = budget {
            if elapsed > *b {
                o.passed = false;
                o.detail.push_str(&format!("; over the {:.0?} budget", b));
            }
        }
        failures += usize::from(!o.passed);
        println!(
            "criterion {:>2} {:<32} {} ({:.2?}) {}",
            i + 1,
            name,
            if o.passed { "PASS" } else { "FAIL" },
            elapsed,
            o.detail
        );
    }
    println!("{} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures > 0 {
        std::process::exit(1);
    }
}

//! Deciding whether `λ ↦ φ_{λS + (1-λ)S'}` is affine.
//!
//! For each Majorana monomial `A` of a reference frame the discrepancy
//!
//! ```text
//! D(A, λ) = λ φ_S(A) + (1-λ) φ_S'(A) - φ_{λS + (1-λ)S'}(A)
//! ```
//!
//! is a polynomial in `λ` of degree at most `⌊k/2⌋` that vanishes at 0 and 1,
//! so checking `⌊k/2⌋ + 1` interior points decides whether it vanishes
//! identically. Commuting pairs can also be decided from their joint
//! eigenvalues: the pair is affine iff at most one `α_i` differs.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::car_rep::{mask_to_labels, MonomialMask};
use crate::covariance::{
    adapted_diagonalize, difference_rank, random_adapted_frame, random_covariance_with,
    simultaneous_adapted_diagonalize_with, symmetrized_gamma_form, validate, CovarianceOperator, GammaAdaptedBasis,
    Involution, DEFAULT_COMMUTE_TOL,
};
use crate::error::{Error, Result};
use crate::numerics::{ComplexMatrix, C64};
use crate::quasifree::MonomialEvaluator;

pub const DECISION_TOL: f64 = 1e-8;
pub const ALPHA_TOL: f64 = 1e-8;
/// Tolerance of [`necessary_check`].
pub const FORM_TOL: f64 = 1e-10;
/// Largest dimension accepted by the numeric test and the explorer.
pub const NUMERIC_MAX_DIM: usize = 7;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Affine,
    NotAffine,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Analytic,
    Numeric,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AffineReport {
    pub verdict: Verdict,
    pub method: Method,
    /// Majorana labels of the monomial with the largest discrepancy.
    pub witness_monomial: Option<Vec<usize>>,
    pub witness_lambda: Option<f64>,
    /// Signed discrepancy `D(A, λ)` at the witness.
    pub witness_discrepancy: Option<C64>,
    pub max_discrepancy: f64,
    pub diff_rank: usize,
    pub commuting: bool,
    pub joint_alphas: Option<Vec<(f64, f64)>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineOptions {
    pub decision_tol: f64,
    pub alpha_tol: f64,
    pub commute_tol: f64,
}

impl Default for AffineOptions {
    fn default() -> Self {
        Self { decision_tol: DECISION_TOL, alpha_tol: ALPHA_TOL, commute_tol: DEFAULT_COMMUTE_TOL }
    }
}

/// `λS + (1-λ)S2`, revalidated.
pub fn mixture(s: &CovarianceOperator, s2: &CovarianceOperator, lambda: f64) -> Result<CovarianceOperator> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(Error::Validation(format!("mixing weight {lambda} outside [0, 1]")));
    }
    s.same_space(s2)?;
    let m = &s.matrix().scale_real(lambda) + &s2.matrix().scale_real(1.0 - lambda);
    validate(m, s.gamma())
}

/// `⌊k/2⌋ + 1` equally spaced interior points `j / (⌊k/2⌋ + 2)`.
pub fn default_lambda_grid(k: usize) -> Vec<f64> {
    let m = k / 2 + 1;
    (1..=m).map(|j| j as f64 / (m + 1) as f64).collect()
}

/// Evaluators for `φ_S` and `φ_S2` on a shared reference frame, from which
/// discrepancies at any `λ` are computed.
pub struct DiscrepancyProbe<'a> {
    s: &'a CovarianceOperator,
    s2: &'a CovarianceOperator,
    frame: &'a GammaAdaptedBasis,
    first: Vec<(MonomialMask, C64)>,
    second: Vec<(MonomialMask, C64)>,
}

impl<'a> DiscrepancyProbe<'a> {
    pub fn new(s: &'a CovarianceOperator, s2: &'a CovarianceOperator, frame: &'a GammaAdaptedBasis) -> Result<Self> {
        s.same_space(s2)?;
        let first = MonomialEvaluator::new(s, frame)?.all_monomials();
        let second = MonomialEvaluator::new(s2, frame)?.all_monomials();
        Ok(Self { s, s2, frame, first, second })
    }

    /// `D(A, λ)` for every monomial `A`, in mask order.
    pub fn at(&self, lambda: f64) -> Result<Vec<(MonomialMask, C64)>> {
        let mix = mixture(self.s, self.s2, lambda)?;
        let mixed = MonomialEvaluator::new(&mix, self.frame)?;
        Ok(self
            .first
            .iter()
            .zip(&self.second)
            .map(|(&(m, a), &(_, b))| (m, a * lambda + b * (1.0 - lambda) - mixed.monomial(m)))
            .collect())
    }
}

/// Numeric decision over every Majorana monomial of `ref_basis` and every
/// `λ` in the grid (default [`default_lambda_grid`]).
pub fn numeric_test(
    s: &CovarianceOperator,
    s2: &CovarianceOperator,
    lambdas: Option<&[f64]>,
    ref_basis: &GammaAdaptedBasis,
) -> Result<AffineReport> {
    numeric_test_with(s, s2, lambdas, ref_basis, AffineOptions::default())
}

pub fn numeric_test_with(
    s: &CovarianceOperator,
    s2: &CovarianceOperator,
    lambdas: Option<&[f64]>,
    ref_basis: &GammaAdaptedBasis,
    opts: AffineOptions,
) -> Result<AffineReport> {
    let k = s.dim();
    if k > NUMERIC_MAX_DIM {
        return Err(Error::Resource(format!("numeric affine test supports k <= {NUMERIC_MAX_DIM}, got {k}")));
    }
    let grid = match lambdas {
        Some(l) if !l.is_empty() => l.to_vec(),
        _ => default_lambda_grid(k),
    };
    let probe = DiscrepancyProbe::new(s, s2, ref_basis)?;
    let mut best: Option<(f64, MonomialMask, f64, C64)> = None;
    for &lambda in &grid {
        for (mask, d) in probe.at(lambda)? {
            if best.is_none_or(|(b, ..)| d.norm() > b) {
                best = Some((d.norm(), mask, lambda, d));
            }
        }
    }
    let (max, mask, lambda, value) = best.expect("the monomial basis always contains the identity");
    let verdict = if max <= opts.decision_tol { Verdict::Affine } else { Verdict::NotAffine };
    let witness = verdict == Verdict::NotAffine;
    Ok(AffineReport {
        verdict,
        method: Method::Numeric,
        witness_monomial: witness.then(|| mask_to_labels(mask)),
        witness_lambda: witness.then_some(lambda),
        witness_discrepancy: witness.then_some(value),
        max_discrepancy: max,
        diff_rank: difference_rank(s, s2, None)?,
        commuting: s.commutator_norm(s2) <= opts.commute_tol,
        joint_alphas: None,
    })
}

/// Numeric test in the adapted frame of `s` with the default grid.
pub fn numeric_test_default(s: &CovarianceOperator, s2: &CovarianceOperator) -> Result<AffineReport> {
    let frame = adapted_diagonalize(s)?;
    numeric_test(s, s2, None, &frame)
}

/// Closed-form decision for commuting pairs: affine iff at most one joint
/// eigenvalue pair `(α_i, α_i')` differs.
pub fn decide_commuting(s: &CovarianceOperator, s2: &CovarianceOperator) -> Result<AffineReport> {
    decide_commuting_with(s, s2, AffineOptions::default())
}

pub fn decide_commuting_with(
    s: &CovarianceOperator,
    s2: &CovarianceOperator,
    opts: AffineOptions,
) -> Result<AffineReport> {
    let joint = simultaneous_adapted_diagonalize_with(s, s2, opts.commute_tol)?;
    let pairs = joint.joint_alphas();
    let deltas: Vec<f64> = pairs.iter().map(|(a, b)| a - b).collect();
    let differing: Vec<usize> = (0..deltas.len()).filter(|&i| deltas[i].abs() > opts.alpha_tol).collect();

    // On the monomial c_{2i-1}c_{2i}c_{2j-1}c_{2j} = -Z_i Z_j the discrepancy
    // is -4λ(1-λ)Δ_iΔ_j; report the largest such pair at λ = ½.
    let mut witness: Option<(f64, usize, usize)> = None;
    for (a, &i) in differing.iter().enumerate() {
        for &j in &differing[a + 1..] {
            let v = -deltas[i] * deltas[j];
            if witness.is_none_or(|(w, ..)| v.abs() > w.abs()) {
                witness = Some((v, i, j));
            }
        }
    }
    let verdict = if differing.len() <= 1 { Verdict::Affine } else { Verdict::NotAffine };
    Ok(AffineReport {
        verdict,
        method: Method::Analytic,
        witness_monomial: witness.map(|(_, i, j)| vec![2 * i + 1, 2 * i + 2, 2 * j + 1, 2 * j + 2]),
        witness_lambda: witness.map(|_| 0.5),
        witness_discrepancy: witness.map(|(v, ..)| C64::new(v, 0.0)),
        max_discrepancy: witness.map_or(0.0, |(v, ..)| v.abs()),
        diff_rank: difference_rank(s, s2, None)?,
        commuting: true,
        joint_alphas: Some(pairs),
    })
}

/// Analytic path when the pair commutes, numeric otherwise.
pub fn decide(s: &CovarianceOperator, s2: &CovarianceOperator, opts: AffineOptions) -> Result<AffineReport> {
    s.same_space(s2)?;
    if s.commutator_norm(s2) <= opts.commute_tol {
        decide_commuting_with(s, s2, opts)
    } else {
        let frame = adapted_diagonalize(s)?;
        numeric_test_with(s, s2, None, &frame, opts)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessaryCheck {
    pub holds: bool,
    pub residual: f64,
}

/// Whether `(Sξ, Γξ) = (S'ξ, Γξ)` for all `ξ`, tested through the
/// symmetrized bilinear forms on the standard basis.
pub fn necessary_check(s: &CovarianceOperator, s2: &CovarianceOperator) -> Result<NecessaryCheck> {
    s.same_space(s2)?;
    let a = symmetrized_gamma_form(s);
    let b = symmetrized_gamma_form(s2);
    let k = s.dim();
    let mut residual: f64 = 0.0;
    for p in 0..k {
        for q in p..k {
            residual = residual.max((a[(p, q)] - b[(p, q)]).norm());
        }
    }
    Ok(NecessaryCheck { holds: residual <= FORM_TOL, residual })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SamplingMode {
    /// Two independent random covariance operators.
    Random,
    /// Shared random frame; `α'` redrawn on a random nonempty set of modes.
    Commuting,
    /// `S' = S + t(vv† - Γv(Γv)†)` with `t` shrunk until `S'` is valid.
    #[serde(rename = "rank2-perturbation")]
    Rank2Perturbation,
}

impl SamplingMode {
    pub const ALL: [SamplingMode; 3] = [SamplingMode::Random, SamplingMode::Commuting, SamplingMode::Rank2Perturbation];
}

impl std::str::FromStr for SamplingMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "random" => Ok(Self::Random),
            "commuting" => Ok(Self::Commuting),
            "rank2-perturbation" | "rank2" => Ok(Self::Rank2Perturbation),
            other => Err(Error::Validation(format!("unknown sampling mode '{other}'"))),
        }
    }
}

#[derive(Clone, Debug)]
pub struct CampaignConfig {
    pub gamma: Involution,
    pub trials: usize,
    pub seed: u64,
    pub modes: Vec<SamplingMode>,
    pub options: AffineOptions,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HistogramEntry {
    pub verdict: Verdict,
    pub rank: usize,
    pub count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CounterexampleRecord {
    pub trial: usize,
    pub mode: SamplingMode,
    pub rank: usize,
    pub max_discrepancy: f64,
    /// Where the pair was written, when the caller saved it.
    pub file: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub trial: usize,
    pub mode: SamplingMode,
    pub rank: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CampaignReport {
    pub schema: String,
    pub k: usize,
    pub trials: usize,
    pub seed: u64,
    pub modes: Vec<SamplingMode>,
    pub pairs_tested: usize,
    pub histogram: Vec<HistogramEntry>,
    pub counterexamples: Vec<CounterexampleRecord>,
    pub violations: Vec<ViolationRecord>,
    /// `COUNTEREXAMPLE` and/or `VIOLATION` when either occurred.
    pub flags: Vec<String>,
}

impl CampaignReport {
    pub fn has_counterexample(&self) -> bool {
        !self.counterexamples.is_empty()
    }

    pub fn has_violation(&self) -> bool {
        !self.violations.is_empty()
    }
}

#[derive(Clone, Debug)]
pub struct Campaign {
    pub report: CampaignReport,
    /// Operator pairs matching `report.counterexamples`, in the same order.
    pub counterexample_pairs: Vec<(CovarianceOperator, CovarianceOperator)>,
}

/// Generator for one trial; independent of scheduling.
pub fn trial_rng(seed: u64, trial: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial as u64);
    rng
}

/// Samples one pair for `mode`.
pub fn sample_pair(
    gamma: &Involution,
    mode: SamplingMode,
    rng: &mut impl Rng,
) -> Result<(CovarianceOperator, CovarianceOperator)> {
    match mode {
        SamplingMode::Random => {
            let a = random_covariance_with(gamma, rng.random_range(0.2..0.9), rng)?;
            let b = random_covariance_with(gamma, rng.random_range(0.2..0.9), rng)?;
            Ok((a, b))
        }
        SamplingMode::Commuting => {
            let frame = random_adapted_frame(gamma, rng)?;
            let n = frame.n();
            let alphas: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..=1.0)).collect();
            let mut alphas2 = alphas.clone();
            let mut modes: Vec<usize> = (0..n).collect();
            modes.shuffle(rng);
            let d = if n == 0 { 0 } else { rng.random_range(1..=n) };
            for &i in &modes[..d] {
                alphas2[i] = loop {
                    let a: f64 = rng.random_range(0.0..=1.0);
                    if (a - alphas[i]).abs() >= 0.05 {
                        break a;
                    }
                };
            }
            Ok((frame.with_alphas(alphas)?.operator()?, frame.with_alphas(alphas2)?.operator()?))
        }
        SamplingMode::Rank2Perturbation => {
            let s = random_covariance_with(gamma, rng.random_range(0.2..0.9), rng)?;
            let k = gamma.dim();
            let v: Vec<C64> =
                (0..k).map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))).collect();
            let nv = crate::numerics::norm(&v);
            let v: Vec<C64> = v.iter().map(|z| z / nv).collect();
            let gv = gamma.apply(&v);
            let bump = &ComplexMatrix::outer(&v, &v) - &ComplexMatrix::outer(&gv, &gv);
            let mut t: f64 = rng.random_range(0.05..0.5);
            for _ in 0..60 {
                if let Ok(s2) = validate(&s.matrix().clone() + &bump.scale_real(t), gamma) {
                    return Ok((s, s2));
                }
                t *= 0.5;
            }
            Ok((s.clone(), s))
        }
    }
}

struct TrialOutcome {
    trial: usize,
    mode: SamplingMode,
    verdict: Verdict,
    rank: usize,
    distinct: bool,
    max_discrepancy: f64,
    pair: (CovarianceOperator, CovarianceOperator),
}

fn run_trial(cfg: &CampaignConfig, trial: usize) -> Result<Vec<TrialOutcome>> {
    let mut rng = trial_rng(cfg.seed, trial);
    let mut out = Vec::with_capacity(cfg.modes.len());
    for &mode in &cfg.modes {
        let (s, s2) = sample_pair(&cfg.gamma, mode, &mut rng)?;
        let frame = adapted_diagonalize(&s)?;
        let report = numeric_test_with(&s, &s2, None, &frame, cfg.options)?;
        let distinct = s.matrix().max_abs_diff(s2.matrix()) > crate::numerics::default_tol(s.dim());
        out.push(TrialOutcome {
            trial,
            mode,
            verdict: report.verdict,
            rank: report.diff_rank,
            distinct,
            max_discrepancy: report.max_discrepancy,
            pair: (s, s2),
        });
    }
    Ok(out)
}

/// Randomized search for affine pairs whose difference does not have rank 2.
pub fn explore_conjecture(cfg: &CampaignConfig) -> Result<Campaign> {
    let k = cfg.gamma.dim();
    if k > NUMERIC_MAX_DIM {
        return Err(Error::Resource(format!("exploration supports k <= {NUMERIC_MAX_DIM}, got {k}")));
    }
    let outcomes: Vec<TrialOutcome> = (0..cfg.trials)
        .into_par_iter()
        .map(|t| run_trial(cfg, t))
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut hist = std::collections::BTreeMap::<(Verdict, usize), usize>::new();
    let mut counterexamples = Vec::new();
    let mut pairs = Vec::new();
    let mut violations = Vec::new();
    for o in &outcomes {
        *hist.entry((o.verdict, o.rank)).or_default() += 1;
        if o.verdict == Verdict::Affine && o.distinct && o.rank != 2 {
            counterexamples.push(CounterexampleRecord {
                trial: o.trial,
                mode: o.mode,
                rank: o.rank,
                max_discrepancy: o.max_discrepancy,
                file: None,
            });
            pairs.push(o.pair.clone());
        }
        if o.rank == 1 {
            violations.push(ViolationRecord { trial: o.trial, mode: o.mode, rank: o.rank });
        }
    }
    let mut flags = Vec::new();
    if !counterexamples.is_empty() {
        flags.push("COUNTEREXAMPLE".to_string());
    }
    if !violations.is_empty() {
        flags.push("VIOLATION".to_string());
    }
    let report = CampaignReport {
        schema: "1".into(),
        k,
        trials: cfg.trials,
        seed: cfg.seed,
        modes: cfg.modes.clone(),
        pairs_tested: outcomes.len(),
        histogram: hist.into_iter().map(|((verdict, rank), count)| HistogramEntry { verdict, rank, count }).collect(),
        counterexamples,
        violations,
        flags,
    };
    Ok(Campaign { report, counterexample_pairs: pairs })
}

//! Quasi-free states.
//!
//! Two independent evaluation routes are provided:
//!
//! * [`wick_eval`]: the signed sum over pair partitions of products of
//!   two-point functions `φ(b(ξ)b(η)) = (Sη, Γξ)`;
//! * [`density_matrix`] / [`trace_eval`]: `Tr(ρ A)` with the product density
//!   `ρ = ⊗ diag(α_i, 1-α_i)` (`⊗ diag(½, ½)` in odd dimension), valid when
//!   `S` is diagonal in the reference frame.
//!
//! [`evaluate`] handles arbitrary algebra elements by expanding them over the
//! Majorana monomials and applying the Wick rule to each monomial.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use serde::{Deserialize, Serialize};

use crate::car_rep::{
    build_rep, majorana_basis, mask_to_labels, monomial_masks, AlgebraElement, MajoranaBasis, ModeCoords, MonomialMask,
    Parity, RepShape,
};
use crate::covariance::{CovarianceOperator, GammaAdaptedBasis};
use crate::error::{Error, Result};
use crate::numerics::{blocks, inner, kron_all, ComplexMatrix, C64, ZERO};

/// Largest number of operators accepted by the pair-partition sum.
pub const WICK_MAX_ARGS: usize = 16;

/// A perfect matching of `{0, …, 2n-1}` written as pairs `(p_j, q_j)` with
/// `p_j < q_j` and `p_1 < p_2 < …`. Indices are zero-based.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairPartition {
    pub pairs: Vec<(usize, usize)>,
    /// Sign of the permutation `(p_1, …, p_n, q_1, …, q_n)`.
    pub sign: i8,
}

/// Sign of a permutation given as a sequence, by counting inversions.
pub fn permutation_sign(seq: &[usize]) -> i8 {
    let mut inversions = 0usize;
    for i in 0..seq.len() {
        for j in i + 1..seq.len() {
            if seq[i] > seq[j] {
                inversions += 1;
            }
        }
    }
    if inversions.is_multiple_of(2) {
        1
    } else {
        -1
    }
}

/// All `(2n-1)!!` pair partitions of `2n` points.
pub fn pair_partitions(points: usize) -> Vec<PairPartition> {
    assert!(points.is_multiple_of(2), "pair partitions need an even number of points");
    let mut out = Vec::new();
    let mut used = vec![false; points];
    let mut current = Vec::with_capacity(points / 2);
    collect_partitions(&mut used, &mut current, &mut out);
    out
}

fn collect_partitions(used: &mut [bool], current: &mut Vec<(usize, usize)>, out: &mut Vec<PairPartition>) {
    let Some(p) = used.iter().position(|u| !u) else {
        let mut seq: Vec<usize> = current.iter().map(|&(p, _)| p).collect();
        seq.extend(current.iter().map(|&(_, q)| q));
        out.push(PairPartition { pairs: current.clone(), sign: permutation_sign(&seq) });
        return;
    };
    used[p] = true;
    for q in p + 1..used.len() {
        if used[q] {
            continue;
        }
        used[q] = true;
        current.push((p, q));
        collect_partitions(used, current, out);
        current.pop();
        used[q] = false;
    }
    used[p] = false;
}

/// `(-1)^{n(n-1)/2}`.
fn wick_prefactor(n: usize) -> f64 {
    if (n * n.saturating_sub(1) / 2).is_multiple_of(2) {
        1.0
    } else {
        -1.0
    }
}

/// `φ_S(b(ξ)b(η)) = (Sη, Γξ)`.
pub fn two_point(s: &CovarianceOperator, xi: &[C64], eta: &[C64]) -> C64 {
    inner(&s.apply(eta), &s.gamma().apply(xi))
}

/// Wick sum for a word of `len` operators given its two-point function.
fn wick_sum(len: usize, partitions: &[PairPartition], two: impl Fn(usize, usize) -> C64) -> C64 {
    if len % 2 == 1 {
        return ZERO;
    }
    let n = len / 2;
    let total: C64 = partitions
        .iter()
        .map(|p| {
            let prod: C64 = p.pairs.iter().map(|&(a, b)| two(a, b)).product();
            prod * f64::from(p.sign)
        })
        .sum();
    total * wick_prefactor(n)
}

/// `φ_S(b(ξ_1)⋯b(ξ_k))` by the pair-partition sum; zero for odd `k`.
pub fn wick_eval(s: &CovarianceOperator, xis: &[Vec<C64>]) -> Result<C64> {
    if xis.len() > WICK_MAX_ARGS {
        return Err(Error::Resource(format!(
            "{} operators exceed the pair-partition enumeration cap of {WICK_MAX_ARGS}",
            xis.len()
        )));
    }
    if let Some(v) = xis.iter().find(|v| v.len() != s.dim()) {
        return Err(Error::Dimension(format!("vector of length {} for operator of dimension {}", v.len(), s.dim())));
    }
    if xis.len() % 2 == 1 {
        return Ok(ZERO);
    }
    let parts = pair_partitions(xis.len());
    Ok(wick_sum(xis.len(), &parts, |a, b| two_point(s, &xis[a], &xis[b])))
}

/// `⊗_i diag(α_i, 1-α_i)`, tensored with `diag(½, ½)` in odd dimension.
pub fn density_matrix(basis: &GammaAdaptedBasis) -> ComplexMatrix {
    density_from_alphas(basis.alphas(), basis.parity())
}

pub fn density_from_alphas(alphas: &[f64], parity: Parity) -> ComplexMatrix {
    let mut factors: Vec<ComplexMatrix> = alphas.iter().map(|&a| blocks::diag2(a, 1.0 - a)).collect();
    if parity == Parity::Odd {
        factors.push(blocks::diag2(0.5, 0.5));
    }
    if factors.is_empty() {
        return ComplexMatrix::identity(1);
    }
    kron_all(&factors)
}

/// `Tr(ρ A)` with `ρ` the product density of `basis`.
pub fn trace_eval(basis: &GammaAdaptedBasis, a: &AlgebraElement) -> C64 {
    (&density_matrix(basis) * &a.matrix).trace()
}

/// Precomputed evaluator of `φ_S` on the Majorana monomials of a reference
/// frame. Two-point values of the Majorana vectors are cached.
#[derive(Clone, Debug)]
pub struct MonomialEvaluator {
    shape: RepShape,
    /// `table[a][b] = φ(c_a c_b)`, indexed by Majorana label.
    table: Vec<Vec<C64>>,
    /// `partitions[m]` holds the partitions of `m` points (even `m`).
    partitions: Vec<Vec<PairPartition>>,
}

impl MonomialEvaluator {
    pub fn new(s: &CovarianceOperator, ref_basis: &GammaAdaptedBasis) -> Result<Self> {
        if s.dim() != ref_basis.dim() {
            return Err(Error::Dimension(format!(
                "operator of dimension {} with a frame of dimension {}",
                s.dim(),
                ref_basis.dim()
            )));
        }
        let shape = ref_basis.shape();
        let labels = 2 * shape.n + 1;
        if shape.majorana_count() > WICK_MAX_ARGS {
            return Err(Error::Resource(format!("{} Majoranas exceed the Wick cap", shape.majorana_count())));
        }
        let vectors: Vec<Option<Vec<C64>>> = (0..labels)
            .map(|l| (l > 0 || shape.parity == Parity::Odd).then(|| ref_basis.vector(&ModeCoords::majorana(shape, l))))
            .collect();
        let table = (0..labels)
            .map(|a| {
                (0..labels)
                    .map(|b| match (&vectors[a], &vectors[b]) {
                        (Some(u), Some(v)) => two_point(s, u, v),
                        _ => ZERO,
                    })
                    .collect()
            })
            .collect();
        let max = shape.majorana_count();
        let partitions = (0..=max).map(|m| if m % 2 == 0 { pair_partitions(m) } else { Vec::new() }).collect();
        Ok(Self { shape, table, partitions })
    }

    pub fn shape(&self) -> RepShape {
        self.shape
    }

    /// `φ(c_a c_b)`.
    pub fn majorana_two_point(&self, a: usize, b: usize) -> C64 {
        self.table[a][b]
    }

    pub fn monomial(&self, mask: MonomialMask) -> C64 {
        let labels = mask_to_labels(mask);
        self.monomial_labels(&labels)
    }

    pub fn monomial_labels(&self, labels: &[usize]) -> C64 {
        if labels.len() % 2 == 1 {
            return ZERO;
        }
        wick_sum(labels.len(), &self.partitions[labels.len()], |a, b| self.table[labels[a]][labels[b]])
    }

    /// Values on every monomial, in [`monomial_masks`] order.
    pub fn all_monomials(&self) -> Vec<(MonomialMask, C64)> {
        monomial_masks(self.shape).into_iter().map(|m| (m, self.monomial(m))).collect()
    }
}

/// Monomial bases are immutable per shape, so they are built once.
fn cached_basis(shape: RepShape) -> Result<Arc<MajoranaBasis>> {
    static CACHE: OnceLock<Mutex<HashMap<RepShape, Arc<MajoranaBasis>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    if let Some(b) = cache.lock().expect("basis cache poisoned").get(&shape) {
        return Ok(Arc::clone(b));
    }
    let basis = Arc::new(majorana_basis(&build_rep(shape.n, shape.parity)?)?);
    cache.lock().expect("basis cache poisoned").insert(shape, Arc::clone(&basis));
    Ok(basis)
}

/// `φ_S(A)` for an element of the representation attached to `ref_basis`.
pub fn evaluate(s: &CovarianceOperator, ref_basis: &GammaAdaptedBasis, a: &AlgebraElement) -> Result<C64> {
    if a.shape != ref_basis.shape() {
        return Err(Error::Validation(format!(
            "element lives in a representation with {} modes ({:?}), frame has {} ({:?})",
            a.shape.n,
            a.shape.parity,
            ref_basis.n(),
            ref_basis.parity()
        )));
    }
    let coeffs = cached_basis(a.shape)?.expand(a)?;
    let ev = MonomialEvaluator::new(s, ref_basis)?;
    // BTreeMap iteration is ordered by index set, so summation order is fixed.
    Ok(coeffs.iter().filter(|(_, g)| **g != ZERO).map(|(set, g)| g * ev.monomial_labels(set)).sum())
}

/// A quasi-free state with its reference frame.
#[derive(Clone, Debug)]
pub struct QuasiFreeState {
    pub covariance: CovarianceOperator,
    pub frame: GammaAdaptedBasis,
}

impl QuasiFreeState {
    /// State of `S` with its own adapted frame as reference.
    pub fn new(covariance: CovarianceOperator) -> Result<Self> {
        let frame = crate::covariance::adapted_diagonalize(&covariance)?;
        Ok(Self { covariance, frame })
    }

    pub fn with_frame(covariance: CovarianceOperator, frame: GammaAdaptedBasis) -> Self {
        Self { covariance, frame }
    }

    pub fn evaluate(&self, a: &AlgebraElement) -> Result<C64> {
        evaluate(&self.covariance, &self.frame, a)
    }

    pub fn normalization(&self) -> Result<C64> {
        let shape = self.frame.shape();
        let id = AlgebraElement { shape, matrix: ComplexMatrix::identity(shape.rep_dim()) };
        self.evaluate(&id)
    }
}

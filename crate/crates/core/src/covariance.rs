//! Anti-unitary involutions, covariance operators and their Γ-adapted normal
//! form.
//!
//! An involution Γ is stored as a unitary `G` with `Γξ = G·conj(ξ)`. For a
//! matrix `S` the operator `ΓSΓ` is then `G·conj(S)·G†`, so the covariance
//! condition `ΓSΓ = 1 - S` is checked in exactly that form.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::car_rep::{ModeCoords, Parity, RepShape};
use crate::error::{Condition, Error, Result, Violation};
use crate::numerics::{
    axpy, default_tol, fix_phase, herm_eig, inner, norm, scaled, spectral_norm_hermitian, ComplexMatrix, MatrixFile,
    C64, I, ZERO,
};

/// Tolerance on `G·conj(G) = 1` and `G†G = 1`.
pub const INVOLUTION_TOL: f64 = 1e-10;
/// Eigenvalues closer than this to ½ are treated as exactly ½ when pairing.
pub const PAIR_TOL: f64 = 1e-8;
pub const DEFAULT_COMMUTE_TOL: f64 = 1e-10;

#[derive(Clone, Debug, PartialEq)]
pub struct Involution {
    g: ComplexMatrix,
}

impl Involution {
    pub fn new(g: ComplexMatrix) -> Result<Self> {
        if !g.is_square() {
            return Err(Error::Dimension(format!("involution matrix must be square, got {}x{}", g.rows(), g.cols())));
        }
        let id = ComplexMatrix::identity(g.rows());
        let invol = (&g * &g.conj()).max_abs_diff(&id);
        let unit = (&g.adjoint() * &g).max_abs_diff(&id);
        if invol > INVOLUTION_TOL || unit > INVOLUTION_TOL {
            return Err(Error::Validation(format!(
                "not an anti-unitary involution: |G conj(G) - 1| = {invol:.3e}, |G*G - 1| = {unit:.3e}"
            )));
        }
        Ok(Self { g })
    }

    /// `(x₁, x₂, x₃, x₄, …) ↦ (conj x₂, conj x₁, conj x₄, conj x₃, …)`, with
    /// the last coordinate conjugated in place when `k` is odd.
    pub fn swap_conjugation(k: usize) -> Self {
        let mut g = ComplexMatrix::zeros(k, k);
        for p in 0..k / 2 {
            g[(2 * p, 2 * p + 1)] = C64::new(1.0, 0.0);
            g[(2 * p + 1, 2 * p)] = C64::new(1.0, 0.0);
        }
        if k % 2 == 1 {
            g[(k - 1, k - 1)] = C64::new(1.0, 0.0);
        }
        Self { g }
    }

    /// Plain entrywise conjugation (`G = 1`).
    pub fn complex_conjugation(k: usize) -> Self {
        Self { g: ComplexMatrix::identity(k) }
    }

    pub fn dim(&self) -> usize {
        self.g.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.g
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        let c: Vec<C64> = v.iter().map(|z| z.conj()).collect();
        self.g.mat_vec(&c)
    }

    /// Matrix of `ΓMΓ`.
    pub fn conjugate_operator(&self, m: &ComplexMatrix) -> ComplexMatrix {
        &(&self.g * &m.conj()) * &self.g.adjoint()
    }
}

/// On-disk form of an involution: `{"k": k, "G": <matrix>}`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct InvolutionFile {
    pub k: usize,
    #[serde(rename = "G")]
    pub g: MatrixFile,
}

impl InvolutionFile {
    pub fn from_involution(gamma: &Involution) -> Self {
        Self { k: gamma.dim(), g: MatrixFile::from(gamma.matrix()) }
    }

    pub fn into_involution(self) -> Result<Involution> {
        let g = ComplexMatrix::try_from(self.g)?;
        if g.rows() != self.k {
            return Err(Error::Dimension(format!(
                "involution declares k = {} but G is {}x{}",
                self.k,
                g.rows(),
                g.cols()
            )));
        }
        Involution::new(g)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    pub hermitian: f64,
    pub spectral: f64,
    pub gamma: f64,
}

impl Tolerances {
    pub fn for_dim(k: usize) -> Self {
        Self { hermitian: default_tol(k), spectral: default_tol(k), gamma: 1e-10 }
    }
}

/// A validated covariance operator: `S = S†`, `0 <= S <= 1`, `ΓSΓ = 1 - S`.
#[derive(Clone, Debug)]
pub struct CovarianceOperator {
    s: ComplexMatrix,
    gamma: Involution,
}

pub fn validate(s: ComplexMatrix, gamma: &Involution) -> Result<CovarianceOperator> {
    let tol = Tolerances::for_dim(s.rows());
    validate_with(s, gamma, tol)
}

/// Residuals of each covariance condition. Shape problems short-circuit.
pub fn residuals(s: &ComplexMatrix, gamma: &Involution) -> Vec<Violation> {
    let k = gamma.dim();
    if !s.is_square() || s.rows() != k {
        return vec![Violation { condition: Condition::Shape, residual: f64::INFINITY }];
    }
    let herm = s.hermitian_residual();
    let sym = &(s + &s.adjoint()).scale_real(0.5);
    let spectral = match herm_eig(sym) {
        Ok(e) => {
            let lo = e.eigenvalues[0];
            let hi = e.eigenvalues[k - 1];
            (-lo).max(hi - 1.0).max(0.0)
        }
        Err(_) => f64::INFINITY,
    };
    let id = ComplexMatrix::identity(k);
    let rel = gamma.conjugate_operator(s).max_abs_diff(&(&id - s));
    vec![
        Violation { condition: Condition::Hermiticity, residual: herm },
        Violation { condition: Condition::SpectralRange, residual: spectral },
        Violation { condition: Condition::GammaRelation, residual: rel },
    ]
}

pub fn validate_with(s: ComplexMatrix, gamma: &Involution, tol: Tolerances) -> Result<CovarianceOperator> {
    if !s.is_finite() {
        return Err(Error::Validation("matrix has non-finite entries".into()));
    }
    let failed: Vec<Violation> = residuals(&s, gamma)
        .into_iter()
        .filter(|v| {
            let limit = match v.condition {
                Condition::Shape => 0.0,
                Condition::Hermiticity => tol.hermitian,
                Condition::SpectralRange => tol.spectral,
                Condition::GammaRelation => tol.gamma,
            };
            v.residual.is_nan() || v.residual > limit
        })
        .collect();
    if failed.is_empty() {
        Ok(CovarianceOperator { s, gamma: gamma.clone() })
    } else {
        Err(Error::InvalidCovariance(failed))
    }
}

impl CovarianceOperator {
    pub fn matrix(&self) -> &ComplexMatrix {
        &self.s
    }

    pub fn gamma(&self) -> &Involution {
        &self.gamma
    }

    pub fn dim(&self) -> usize {
        self.s.rows()
    }

    pub fn apply(&self, v: &[C64]) -> Vec<C64> {
        self.s.mat_vec(v)
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        herm_eig(&self.s).expect("validated operators are Hermitian").eigenvalues
    }

    /// `max |SS' - S'S|`.
    pub fn commutator_norm(&self, other: &Self) -> f64 {
        self.s.commutator(&other.s).max_abs()
    }

    pub fn same_space(&self, other: &Self) -> Result<()> {
        if self.dim() != other.dim() {
            return Err(Error::Dimension(format!("operators act on dimensions {} and {}", self.dim(), other.dim())));
        }
        if self.gamma.matrix().max_abs_diff(other.gamma.matrix()) > INVOLUTION_TOL {
            return Err(Error::Validation("operators are defined with respect to different involutions".into()));
        }
        Ok(())
    }
}

/// Orthonormal frame `{ε_i, Γε_i} (∪ {ε₀})` together with the eigenvalues
/// `α_i` of `S` on `ε_i`.
#[derive(Clone, Debug)]
pub struct GammaAdaptedBasis {
    gamma: Involution,
    epsilons: Vec<Vec<C64>>,
    alphas: Vec<f64>,
    zero_vector: Option<Vec<C64>>,
}

impl GammaAdaptedBasis {
    /// Builds a basis from explicit frame vectors, checking orthonormality of
    /// `{ε_i, Γε_i, ε₀}` and `Γε₀ = ε₀`.
    pub fn from_frame(
        gamma: &Involution,
        epsilons: Vec<Vec<C64>>,
        zero_vector: Option<Vec<C64>>,
        alphas: Vec<f64>,
    ) -> Result<Self> {
        let k = gamma.dim();
        if 2 * epsilons.len() + usize::from(zero_vector.is_some()) != k || alphas.len() != epsilons.len() {
            return Err(Error::Dimension(format!(
                "frame with {} pairs{} and {} alphas does not fit dimension {k}",
                epsilons.len(),
                if zero_vector.is_some() { " plus a zero mode" } else { "" },
                alphas.len()
            )));
        }
        if let Some(a) = alphas.iter().find(|a| !(0.0..=1.0).contains(*a)) {
            return Err(Error::Validation(format!("alpha {a} outside [0, 1]")));
        }
        let basis = Self { gamma: gamma.clone(), epsilons, alphas, zero_vector };
        let r = basis.orthonormality_residual();
        if r > 1e-10 {
            return Err(Error::Validation(format!("frame is not orthonormal: residual {r:.3e}")));
        }
        if let Some(e0) = &basis.zero_vector {
            let r = crate::numerics::max_abs_vec_diff(&gamma.apply(e0), e0);
            if r > 1e-10 {
                return Err(Error::Validation(format!("zero vector is not Γ-fixed: residual {r:.3e}")));
            }
        }
        Ok(basis)
    }

    pub fn gamma(&self) -> &Involution {
        &self.gamma
    }

    pub fn n(&self) -> usize {
        self.epsilons.len()
    }

    pub fn dim(&self) -> usize {
        self.gamma.dim()
    }

    pub fn parity(&self) -> Parity {
        if self.zero_vector.is_some() {
            Parity::Odd
        } else {
            Parity::Even
        }
    }

    pub fn shape(&self) -> RepShape {
        RepShape { n: self.n(), parity: self.parity() }
    }

    pub fn epsilons(&self) -> &[Vec<C64>] {
        &self.epsilons
    }

    pub fn epsilon(&self, i: usize) -> &[C64] {
        &self.epsilons[i]
    }

    pub fn gamma_epsilon(&self, i: usize) -> Vec<C64> {
        self.gamma.apply(&self.epsilons[i])
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn zero_vector(&self) -> Option<&[C64]> {
        self.zero_vector.as_deref()
    }

    /// Same frame, different eigenvalues.
    pub fn with_alphas(&self, alphas: Vec<f64>) -> Result<Self> {
        Self::from_frame(&self.gamma, self.epsilons.clone(), self.zero_vector.clone(), alphas)
    }

    /// All frame vectors in the order `ε₁, Γε₁, …, ε_n, Γε_n, ε₀`.
    pub fn frame_vectors(&self) -> Vec<Vec<C64>> {
        let mut out = Vec::with_capacity(self.dim());
        for i in 0..self.n() {
            out.push(self.epsilons[i].clone());
            out.push(self.gamma_epsilon(i));
        }
        out.extend(self.zero_vector.clone());
        out
    }

    pub fn orthonormality_residual(&self) -> f64 {
        let f = self.frame_vectors();
        let mut r: f64 = 0.0;
        for (a, u) in f.iter().enumerate() {
            for (b, v) in f.iter().enumerate() {
                let target = if a == b { 1.0 } else { 0.0 };
                r = r.max((inner(u, v) - C64::new(target, 0.0)).norm());
            }
        }
        r
    }

    /// Concrete vector for frame coordinates.
    pub fn vector(&self, c: &ModeCoords) -> Vec<C64> {
        assert_eq!(c.shape(), self.shape(), "coordinate shape does not match the basis");
        let mut v = vec![ZERO; self.dim()];
        for i in 0..self.n() {
            axpy(c.x[i], &self.epsilons[i], &mut v);
            axpy(c.y[i], &self.gamma_epsilon(i), &mut v);
        }
        if let (Some(x0), Some(e0)) = (c.x0, &self.zero_vector) {
            axpy(x0, e0, &mut v);
        }
        v
    }

    /// Frame coordinates of a concrete vector.
    pub fn coords(&self, v: &[C64]) -> ModeCoords {
        ModeCoords {
            x: self.epsilons.iter().map(|e| inner(v, e)).collect(),
            y: (0..self.n()).map(|i| inner(v, &self.gamma_epsilon(i))).collect(),
            x0: self.zero_vector.as_ref().map(|e0| inner(v, e0)),
        }
    }

    /// `Σ α_i ε_iε_i† + Σ (1-α_i) Γε_i(Γε_i)† (+ ½ ε₀ε₀†)`.
    pub fn operator_matrix(&self) -> ComplexMatrix {
        let k = self.dim();
        let mut s = ComplexMatrix::zeros(k, k);
        for (i, &a) in self.alphas.iter().enumerate() {
            let e = &self.epsilons[i];
            let ge = self.gamma_epsilon(i);
            s = &s + &ComplexMatrix::outer(e, e).scale_real(a);
            s = &s + &ComplexMatrix::outer(&ge, &ge).scale_real(1.0 - a);
        }
        if let Some(e0) = &self.zero_vector {
            s = &s + &ComplexMatrix::outer(e0, e0).scale_real(0.5);
        }
        s
    }

    /// The covariance operator that this basis diagonalizes.
    pub fn operator(&self) -> Result<CovarianceOperator> {
        validate(self.operator_matrix(), &self.gamma)
    }

    /// Largest eigen-equation residual of `S` against this frame.
    pub fn eigen_residual(&self, s: &CovarianceOperator) -> f64 {
        let mut r: f64 = 0.0;
        for (i, &a) in self.alphas.iter().enumerate() {
            let e = &self.epsilons[i];
            let ge = self.gamma_epsilon(i);
            r = r.max(crate::numerics::max_abs_vec_diff(&s.apply(e), &scaled(e, C64::new(a, 0.0))));
            r = r.max(crate::numerics::max_abs_vec_diff(&s.apply(&ge), &scaled(&ge, C64::new(1.0 - a, 0.0))));
        }
        if let Some(e0) = &self.zero_vector {
            r = r.max(crate::numerics::max_abs_vec_diff(&s.apply(e0), &scaled(e0, C64::new(0.5, 0.0))));
        }
        r
    }
}

/// Γ-adapted basis valid for two commuting operators, with the eigenvalues
/// of each on every `ε_i`.
#[derive(Clone, Debug)]
pub struct JointBasis {
    /// Carries the eigenvalues of the first operator.
    pub basis: GammaAdaptedBasis,
    /// Eigenvalues of the second operator on the same `ε_i`.
    pub alphas2: Vec<f64>,
}

impl JointBasis {
    pub fn joint_alphas(&self) -> Vec<(f64, f64)> {
        self.basis.alphas().iter().copied().zip(self.alphas2.iter().copied()).collect()
    }

    pub fn second_basis(&self) -> Result<GammaAdaptedBasis> {
        self.basis.with_alphas(self.alphas2.clone())
    }
}

/// Eigenspace of one or two commuting operators, labelled by its eigenvalues.
struct Block {
    key: (f64, f64),
    vectors: Vec<Vec<C64>>,
}

#[derive(PartialEq)]
enum Side {
    Upper,
    Lower,
    Center,
}

fn side_of((a, b): (f64, f64)) -> Side {
    let classify = |x: f64| {
        if x > 0.5 + PAIR_TOL {
            Some(Side::Upper)
        } else if x < 0.5 - PAIR_TOL {
            Some(Side::Lower)
        } else {
            None
        }
    };
    classify(a).or_else(|| classify(b)).unwrap_or(Side::Center)
}

/// Γ-real (`Γu = u`) orthonormal basis of the span of `vectors`, which must
/// be a Γ-invariant subspace of dimension `dim`. Pivoted Gram–Schmidt over
/// the candidates `v + Γv` and `i(v - Γv)`; inner products of Γ-real vectors
/// are real, so the result stays Γ-real.
fn gamma_real_basis(gamma: &Involution, vectors: &[Vec<C64>], dim: usize) -> Result<Vec<Vec<C64>>> {
    let mut candidates = Vec::with_capacity(2 * vectors.len());
    for v in vectors {
        let gv = gamma.apply(v);
        candidates.push(v.iter().zip(&gv).map(|(a, b)| a + b).collect::<Vec<_>>());
        candidates.push(v.iter().zip(&gv).map(|(a, b)| I * (a - b)).collect::<Vec<_>>());
    }
    let mut accepted: Vec<Vec<C64>> = Vec::with_capacity(dim);
    while accepted.len() < dim {
        let mut best: Option<(f64, Vec<C64>)> = None;
        for c in &candidates {
            let mut r = c.clone();
            for a in &accepted {
                let coef = inner(&r, a).re;
                axpy(C64::new(-coef, 0.0), a, &mut r);
            }
            let nr = norm(&r);
            if best.as_ref().is_none_or(|(bn, _)| nr > *bn + 1e-14) {
                best = Some((nr, r));
            }
        }
        let (nr, r) = best.ok_or_else(|| Error::Consistency("empty Γ-invariant subspace".into()))?;
        if nr < 1e-6 {
            return Err(Error::Consistency(format!(
                "Γ-real basis construction stalled at {} of {dim} vectors",
                accepted.len()
            )));
        }
        let mut u = scaled(&r, C64::new(1.0 / nr, 0.0));
        // Re-project onto the Γ-real subspace to remove drift.
        let gu = gamma.apply(&u);
        u = u.iter().zip(&gu).map(|(a, b)| (a + b) * 0.5).collect();
        let nu = norm(&u);
        u = scaled(&u, C64::new(1.0 / nu, 0.0));
        accepted.push(u);
    }
    Ok(accepted)
}

/// Splits the Γ-real vectors into `ε = (u₁ + i u₂)/√2` pairs and an optional
/// leftover `ε₀`.
fn pair_real_vectors(reals: Vec<Vec<C64>>) -> (Vec<Vec<C64>>, Option<Vec<C64>>) {
    let h = std::f64::consts::FRAC_1_SQRT_2;
    let mut eps = Vec::new();
    let mut it = reals.chunks_exact(2);
    for pair in it.by_ref() {
        eps.push(pair[0].iter().zip(&pair[1]).map(|(a, b)| (a + I * b) * h).collect());
    }
    let zero = it.remainder().first().cloned();
    (eps, zero)
}

/// `ε_i`, optional `ε₀`, and the eigenvalue pair on each `ε_i`.
type AdaptedFrame = (Vec<Vec<C64>>, Option<Vec<C64>>, Vec<(f64, f64)>);

/// Assembles a Γ-adapted frame from labelled eigenspaces.
fn adapt_blocks(gamma: &Involution, s: &ComplexMatrix, s2: &ComplexMatrix, blocks: Vec<Block>) -> Result<AdaptedFrame> {
    let k = gamma.dim();
    let mut upper: Vec<Vec<C64>> = Vec::new();
    let mut lower_count = 0;
    let mut center: Vec<Vec<C64>> = Vec::new();
    for b in blocks {
        match side_of(b.key) {
            Side::Upper => upper.extend(b.vectors),
            Side::Lower => lower_count += b.vectors.len(),
            Side::Center => center.extend(b.vectors),
        }
    }
    if upper.len() != lower_count || center.len() % 2 != k % 2 {
        return Err(Error::Consistency(format!(
            "eigenvalue pairing failed: {} vectors above ½, {} below, {} at ½ in dimension {k}",
            upper.len(),
            lower_count,
            center.len()
        )));
    }
    let reals = gamma_real_basis(gamma, &center, center.len())?;
    let (mut paired, zero) = pair_real_vectors(reals);
    let mut eps = upper;
    eps.append(&mut paired);
    for e in eps.iter_mut() {
        fix_phase(e);
    }
    let rayleigh = |m: &ComplexMatrix, v: &[C64]| inner(&m.mat_vec(v), v).re;
    let mut labelled: Vec<(Vec<C64>, (f64, f64))> = eps
        .into_iter()
        .map(|e| {
            let key = (rayleigh(s, &e).clamp(0.0, 1.0), rayleigh(s2, &e).clamp(0.0, 1.0));
            (e, key)
        })
        .collect();
    // Descending by (α, α'); the sort is stable so equal keys keep their order.
    labelled.sort_by(|a, b| b.1 .0.total_cmp(&a.1 .0).then(b.1 .1.total_cmp(&a.1 .1)));
    let keys = labelled.iter().map(|(_, k)| *k).collect();
    let eps = labelled.into_iter().map(|(e, _)| e).collect();
    Ok((eps, zero, keys))
}

/// Γ-adapted normal form of `S`: `Sε_i = α_iε_i`, `SΓε_i = (1-α_i)Γε_i`,
/// `α_i ≥ ½` descending, plus `ε₀` with `Sε₀ = ½ε₀` in odd dimension.
pub fn adapted_diagonalize(s: &CovarianceOperator) -> Result<GammaAdaptedBasis> {
    let k = s.dim();
    let e = herm_eig(s.matrix())?;
    let blocks = e
        .groups(default_tol(k))
        .into_iter()
        .map(|g| {
            let mean = e.eigenvalues[g.clone()].iter().sum::<f64>() / g.len() as f64;
            Block { key: (mean, mean), vectors: g.map(|j| e.vector(j)).collect() }
        })
        .collect();
    let (eps, zero, keys) = adapt_blocks(s.gamma(), s.matrix(), s.matrix(), blocks)?;
    let alphas = keys.iter().map(|&(a, _)| a).collect();
    let basis = GammaAdaptedBasis::from_frame(s.gamma(), eps, zero, alphas)?;
    check_eigen(&basis, s)?;
    Ok(basis)
}

fn check_eigen(basis: &GammaAdaptedBasis, s: &CovarianceOperator) -> Result<()> {
    let r = basis.eigen_residual(s);
    if r > 1e-8 {
        return Err(Error::Consistency(format!("adapted frame does not diagonalize the operator: residual {r:.3e}")));
    }
    Ok(())
}

/// Joint Γ-adapted frame of two commuting covariance operators.
///
/// Diagonalizes `S`, then the compression of `S2` to each eigenspace of `S`,
/// then Γ-adapts the joint eigenframe.
pub fn simultaneous_adapted_diagonalize(s: &CovarianceOperator, s2: &CovarianceOperator) -> Result<JointBasis> {
    simultaneous_adapted_diagonalize_with(s, s2, DEFAULT_COMMUTE_TOL)
}

pub fn simultaneous_adapted_diagonalize_with(
    s: &CovarianceOperator,
    s2: &CovarianceOperator,
    commute_tol: f64,
) -> Result<JointBasis> {
    s.same_space(s2)?;
    let c = s.commutator_norm(s2);
    if c > commute_tol {
        return Err(Error::NotCommuting { norm: c, tol: commute_tol });
    }
    let k = s.dim();
    let tol = default_tol(k);
    let e = herm_eig(s.matrix())?;
    let mut blocks = Vec::new();
    for g in e.groups(tol) {
        let a = e.eigenvalues[g.clone()].iter().sum::<f64>() / g.len() as f64;
        let v = ComplexMatrix::from_columns(&g.clone().map(|j| e.vector(j)).collect::<Vec<_>>());
        let compressed = &(&v.adjoint() * s2.matrix()) * &v;
        let inner_eig = herm_eig(&compressed)?;
        for h in inner_eig.groups(tol) {
            let b = inner_eig.eigenvalues[h.clone()].iter().sum::<f64>() / h.len() as f64;
            let vectors = h.map(|j| v.mat_vec(&inner_eig.vector(j))).collect();
            blocks.push(Block { key: (a, b), vectors });
        }
    }
    let (eps, zero, keys) = adapt_blocks(s.gamma(), s.matrix(), s2.matrix(), blocks)?;
    let alphas = keys.iter().map(|&(a, _)| a).collect();
    let alphas2: Vec<f64> = keys.iter().map(|&(_, b)| b).collect();
    let basis = GammaAdaptedBasis::from_frame(s.gamma(), eps, zero, alphas)?;
    check_eigen(&basis, s)?;
    check_eigen(&basis.with_alphas(alphas2.clone())?, s2)?;
    Ok(JointBasis { basis, alphas2 })
}

fn random_complex(rng: &mut impl Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}

/// Random Hermitian matrix with entries drawn uniformly from the unit box.
pub fn random_hermitian(k: usize, rng: &mut impl Rng) -> ComplexMatrix {
    let mut t = ComplexMatrix::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = C64::new(rng.random_range(-1.0..1.0), 0.0);
        for j in i + 1..k {
            let z = random_complex(rng);
            t[(i, j)] = z;
            t[(j, i)] = z.conj();
        }
    }
    t
}

/// `S = ½(1 + D)` with `D = scale·A / max(1, ‖A‖)` and
/// `A = (T - ΓTΓ)/2` for a random Hermitian `T`. Deterministic per seed.
pub fn random_covariance(k: usize, gamma: &Involution, scale: f64, seed: u64) -> Result<CovarianceOperator> {
    if k != gamma.dim() {
        return Err(Error::Dimension(format!("k = {k} but the involution acts on dimension {}", gamma.dim())));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    random_covariance_with(gamma, scale, &mut rng)
}

pub fn random_covariance_with(gamma: &Involution, scale: f64, rng: &mut impl Rng) -> Result<CovarianceOperator> {
    if !(0.0..=1.0).contains(&scale) {
        return Err(Error::Validation(format!("scale {scale} outside [0, 1]")));
    }
    let k = gamma.dim();
    let t = random_hermitian(k, rng);
    let a = (&t - &gamma.conjugate_operator(&t)).scale_real(0.5);
    let a = (&a + &a.adjoint()).scale_real(0.5);
    let nrm = spectral_norm_hermitian(&a)?;
    let d = a.scale_real(scale / nrm.max(1.0));
    let s = (&ComplexMatrix::identity(k) + &d).scale_real(0.5);
    validate(s, gamma)
}

/// A uniformly random Γ-adapted frame with all `α_i = ½`.
pub fn random_adapted_frame(gamma: &Involution, rng: &mut impl Rng) -> Result<GammaAdaptedBasis> {
    let k = gamma.dim();
    let seeds: Vec<Vec<C64>> = (0..k).map(|_| (0..k).map(|_| random_complex(rng)).collect()).collect();
    let reals = gamma_real_basis(gamma, &seeds, k)?;
    let (eps, zero) = pair_real_vectors(reals);
    let n = eps.len();
    GammaAdaptedBasis::from_frame(gamma, eps, zero, vec![0.5; n])
}

/// Number of eigenvalues of `S - S2` with modulus above `tol`
/// (default `1e-9·k`).
pub fn difference_rank(s: &CovarianceOperator, s2: &CovarianceOperator, tol: Option<f64>) -> Result<usize> {
    s.same_space(s2)?;
    let tol = tol.unwrap_or_else(|| default_tol(s.dim()));
    let d = s.matrix() - s2.matrix();
    let e = herm_eig(&d)?;
    Ok(e.eigenvalues.iter().filter(|w| w.abs() > tol).count())
}

/// `B(ξ, η) = (Sξ, Γη)`, complex-bilinear in `(ξ, η)`.
pub fn gamma_form(s: &CovarianceOperator, xi: &[C64], eta: &[C64]) -> C64 {
    inner(&s.apply(xi), &s.gamma().apply(eta))
}

/// Coefficient matrix of the symmetrized form: entry `(p, q)` is
/// `B(e_p, e_q) + B(e_q, e_p)` on the standard basis.
pub fn symmetrized_gamma_form(s: &CovarianceOperator) -> ComplexMatrix {
    let k = s.dim();
    let unit = |p: usize| {
        let mut v = vec![ZERO; k];
        v[p] = C64::new(1.0, 0.0);
        v
    };
    let mut m = ComplexMatrix::zeros(k, k);
    for p in 0..k {
        for q in 0..k {
            m[(p, q)] = gamma_form(s, &unit(p), &unit(q)) + gamma_form(s, &unit(q), &unit(p));
        }
    }
    m
}

//! Jordan–Wigner matrix representation of a finite-dimensional self-dual CAR
//! algebra.
//!
//! For `k = 2n` the algebra is `M(2,C)^{⊗n}` and
//! `b(ε_i) = Z^{⊗(i-1)} ⊗ [[0,0],[1,0]] ⊗ I^{⊗(n-i)}` with `Z = diag(1,-1)`.
//! For `k = 2n + 1` a diagonal factor `C ⊕ C` is appended: every `b(ε_i)`
//! carries an identity there and the Γ-fixed mode is
//! `b(ε₀) = Z^{⊗n} ⊗ Z / √2`.
//!
//! Vectors of `H` are addressed here by their coordinates in an abstract
//! Γ-adapted frame, `ξ = Σ x_i ε_i + Σ y_i Γε_i + x₀ ε₀`. Mapping those
//! coordinates to concrete vectors is the job of
//! [`GammaAdaptedBasis`](crate::covariance::GammaAdaptedBasis).

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{blocks, kron_all, ComplexMatrix, C64, I, ONE, ZERO};

pub const DEFAULT_REP_DIM_CAP: usize = 1 << 13;

/// Cap on `monomials × rep_dim²` stored by [`majorana_basis`].
pub const MONOMIAL_STORAGE_CAP: usize = 1 << 22;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Parity {
    pub fn of_dim(k: usize) -> Self {
        if k.is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

/// Number of paired modes and parity; identifies a representation.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct RepShape {
    pub n: usize,
    pub parity: Parity,
}

impl RepShape {
    pub fn for_dim(k: usize) -> Self {
        Self { n: k / 2, parity: Parity::of_dim(k) }
    }

    /// Dimension of the underlying Hilbert space `H`.
    pub fn hilbert_dim(&self) -> usize {
        2 * self.n + usize::from(self.parity == Parity::Odd)
    }

    pub fn rep_dim(&self) -> usize {
        match self.parity {
            Parity::Even => 1 << self.n,
            Parity::Odd => 1 << (self.n + 1),
        }
    }

    /// Majorana labels in increasing order. Label 0 is `c₀` (odd parity
    /// only); labels `2i-1`, `2i` belong to mode `i`.
    pub fn majorana_labels(&self) -> std::ops::RangeInclusive<usize> {
        let first = if self.parity == Parity::Odd { 0 } else { 1 };
        first..=2 * self.n
    }

    pub fn majorana_count(&self) -> usize {
        self.hilbert_dim()
    }
}

/// Coordinates of a vector of `H` in a Γ-adapted frame.
#[derive(Clone, Debug, PartialEq)]
pub struct ModeCoords {
    pub x: Vec<C64>,
    pub y: Vec<C64>,
    pub x0: Option<C64>,
}

impl ModeCoords {
    pub fn zero(shape: RepShape) -> Self {
        Self { x: vec![ZERO; shape.n], y: vec![ZERO; shape.n], x0: (shape.parity == Parity::Odd).then_some(ZERO) }
    }

    pub fn shape(&self) -> RepShape {
        RepShape { n: self.x.len(), parity: if self.x0.is_some() { Parity::Odd } else { Parity::Even } }
    }

    /// `(ξ, η)` computed from coordinates in an orthonormal frame.
    pub fn inner(&self, other: &Self) -> C64 {
        let dot = |a: &[C64], b: &[C64]| a.iter().zip(b).map(|(p, q)| p * q.conj()).sum::<C64>();
        dot(&self.x, &other.x) + dot(&self.y, &other.y) + self.x0.zip(other.x0).map_or(ZERO, |(a, b)| a * b.conj())
    }

    /// Coordinates of `Γξ`: `(conj y, conj x, conj x₀)`.
    pub fn gamma(&self) -> Self {
        Self {
            x: self.y.iter().map(|z| z.conj()).collect(),
            y: self.x.iter().map(|z| z.conj()).collect(),
            x0: self.x0.map(|z| z.conj()),
        }
    }

    /// The frame vectors `ε_i`, `Γε_i` and `ε₀`.
    pub fn frame(shape: RepShape) -> Vec<Self> {
        let mut out = Vec::new();
        for i in 0..shape.n {
            let mut e = Self::zero(shape);
            e.x[i] = ONE;
            out.push(e.clone());
            out.push(e.gamma());
        }
        if shape.parity == Parity::Odd {
            let mut e = Self::zero(shape);
            e.x0 = Some(ONE);
            out.push(e);
        }
        out
    }

    /// The Γ-fixed vector `v` with `b(v) = c_label`.
    pub fn majorana(shape: RepShape, label: usize) -> Self {
        let mut v = Self::zero(shape);
        if label == 0 {
            assert_eq!(shape.parity, Parity::Odd, "c0 exists only for odd parity");
            v.x0 = Some(C64::new(std::f64::consts::SQRT_2, 0.0));
        } else {
            let i = (label - 1) / 2;
            if label % 2 == 1 {
                v.x[i] = ONE;
                v.y[i] = ONE;
            } else {
                v.x[i] = I;
                v.y[i] = -I;
            }
        }
        v
    }

    fn random(shape: RepShape, rng: &mut impl Rng) -> Self {
        let mut draw = || C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
        Self {
            x: (0..shape.n).map(|_| draw()).collect(),
            y: (0..shape.n).map(|_| draw()).collect(),
            x0: (shape.parity == Parity::Odd).then(&mut draw),
        }
    }
}

#[derive(Clone, Debug)]
pub struct JordanWignerRep {
    shape: RepShape,
    generators: Vec<ComplexMatrix>,
    zero_mode: Option<ComplexMatrix>,
    /// Indexed by position in `shape.majorana_labels()`.
    majoranas: Vec<ComplexMatrix>,
}

pub fn build_rep(n: usize, parity: Parity) -> Result<JordanWignerRep> {
    build_rep_with_cap(n, parity, DEFAULT_REP_DIM_CAP)
}

pub fn build_rep_with_cap(n: usize, parity: Parity, rep_dim_cap: usize) -> Result<JordanWignerRep> {
    if n == 0 && parity == Parity::Even {
        return Err(Error::Validation("an even representation needs at least one mode".into()));
    }
    let shape = RepShape { n, parity };
    if n >= 30 || shape.rep_dim() > rep_dim_cap {
        return Err(Error::Resource(format!(
            "representation of {n} modes ({parity:?}) exceeds the dimension cap {rep_dim_cap}"
        )));
    }
    let tail = (parity == Parity::Odd).then(blocks::id2);

    let generators = (0..n)
        .map(|i| {
            let mut factors: Vec<ComplexMatrix> = Vec::with_capacity(n + 1);
            factors.extend((0..i).map(|_| blocks::z()));
            factors.push(blocks::lower());
            factors.extend((i + 1..n).map(|_| blocks::id2()));
            factors.extend(tail.clone());
            kron_all(&factors)
        })
        .collect::<Vec<_>>();

    let zero_mode = (parity == Parity::Odd).then(|| {
        let factors: Vec<ComplexMatrix> = (0..=n).map(|_| blocks::z()).collect();
        kron_all(&factors).scale_real(std::f64::consts::FRAC_1_SQRT_2)
    });

    let mut majoranas = Vec::with_capacity(shape.majorana_count());
    if let Some(z0) = &zero_mode {
        majoranas.push(z0.scale_real(std::f64::consts::SQRT_2));
    }
    for b in &generators {
        let bd = b.adjoint();
        majoranas.push(b + &bd);
        majoranas.push((b - &bd).scale(I));
    }

    Ok(JordanWignerRep { shape, generators, zero_mode, majoranas })
}

impl JordanWignerRep {
    pub fn shape(&self) -> RepShape {
        self.shape
    }

    pub fn n(&self) -> usize {
        self.shape.n
    }

    pub fn parity(&self) -> Parity {
        self.shape.parity
    }

    pub fn rep_dim(&self) -> usize {
        self.shape.rep_dim()
    }

    /// `b(ε_1), …, b(ε_n)`.
    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    /// `b(ε₀)` for odd parity.
    pub fn zero_mode(&self) -> Option<&ComplexMatrix> {
        self.zero_mode.as_ref()
    }

    pub fn majorana(&self, label: usize) -> &ComplexMatrix {
        let offset = if self.shape.parity == Parity::Odd { 0 } else { 1 };
        &self.majoranas[label - offset]
    }

    pub fn identity(&self) -> AlgebraElement {
        AlgebraElement { shape: self.shape, matrix: ComplexMatrix::identity(self.rep_dim()) }
    }

    /// `b(ξ)` for `ξ = Σ x_i ε_i + Σ y_i Γε_i + x₀ ε₀`.
    pub fn generator(&self, x: &[C64], y: &[C64], x0: Option<C64>) -> Result<AlgebraElement> {
        if x.len() != self.shape.n || y.len() != self.shape.n {
            return Err(Error::Validation(format!(
                "expected {} x and y coordinates, got {} and {}",
                self.shape.n,
                x.len(),
                y.len()
            )));
        }
        if x0.is_some() != (self.shape.parity == Parity::Odd) {
            return Err(Error::Validation("zero-mode coordinate must be given exactly when parity is odd".into()));
        }
        let d = self.rep_dim();
        let mut m = ComplexMatrix::zeros(d, d);
        for (i, b) in self.generators.iter().enumerate() {
            if x[i] != ZERO {
                m = &m + &b.scale(x[i]);
            }
            if y[i] != ZERO {
                m = &m + &b.adjoint().scale(y[i]);
            }
        }
        if let (Some(c), Some(z0)) = (x0, &self.zero_mode) {
            m = &m + &z0.scale(c);
        }
        Ok(AlgebraElement { shape: self.shape, matrix: m })
    }

    pub fn generator_at(&self, xi: &ModeCoords) -> Result<AlgebraElement> {
        self.generator(&xi.x, &xi.y, xi.x0)
    }

    /// Matrix of the ordered Majorana product over `index_set`.
    pub fn monomial_matrix(&self, index_set: &[usize]) -> ComplexMatrix {
        let mut m = ComplexMatrix::identity(self.rep_dim());
        for &l in index_set {
            m = &m * self.majorana(l);
        }
        m
    }

    /// Matrix that every algebra element must commute with (odd parity).
    fn parity_witness(&self) -> Option<ComplexMatrix> {
        (self.shape.parity == Parity::Odd).then(|| ComplexMatrix::identity(1 << self.shape.n).kron(&blocks::z()))
    }

    /// Wraps a matrix, checking it lies in the represented algebra.
    pub fn element(&self, matrix: ComplexMatrix) -> Result<AlgebraElement> {
        let d = self.rep_dim();
        if matrix.rows() != d || matrix.cols() != d {
            return Err(Error::Dimension(format!("element must be {d}x{d}, got {}x{}", matrix.rows(), matrix.cols())));
        }
        if let Some(w) = self.parity_witness() {
            let r = matrix.commutator(&w).max_abs();
            if r > 1e-10 {
                return Err(Error::Validation(format!(
                    "matrix is not in M(2,C)^n ⊗ (C ⊕ C): commutator with the parity witness is {r:.3e}"
                )));
            }
        }
        Ok(AlgebraElement { shape: self.shape, matrix })
    }
}

/// An element of the represented algebra.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraElement {
    pub shape: RepShape,
    pub matrix: ComplexMatrix,
}

impl AlgebraElement {
    pub fn adjoint(&self) -> Self {
        Self { shape: self.shape, matrix: self.matrix.adjoint() }
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.shape, other.shape, "elements of different representations");
        Self { shape: self.shape, matrix: &self.matrix * &other.matrix }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CarReport {
    pub pairs_checked: usize,
    pub max_anticommutator_residual: f64,
    pub max_adjoint_residual: f64,
    pub tolerance: f64,
    pub passed: bool,
}

/// Checks `b(ξ)b(η)* + b(η)*b(ξ) = (ξ,η)·1` and `b(Γξ) = b(ξ)*` on every
/// pair of frame vectors and on `trials` random pairs.
pub fn verify_car(rep: &JordanWignerRep, trials: usize, seed: u64) -> CarReport {
    let shape = rep.shape();
    let d = rep.rep_dim();
    let id = ComplexMatrix::identity(d);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let frame = ModeCoords::frame(shape);
    let mut pairs: Vec<(ModeCoords, ModeCoords)> = Vec::new();
    for a in &frame {
        for b in &frame {
            pairs.push((a.clone(), b.clone()));
        }
    }
    for _ in 0..trials {
        pairs.push((ModeCoords::random(shape, &mut rng), ModeCoords::random(shape, &mut rng)));
    }

    let mut anti: f64 = 0.0;
    let mut adj: f64 = 0.0;
    for (xi, eta) in &pairs {
        let bx = rep.generator_at(xi).expect("frame coordinates match the rep").matrix;
        let be = rep.generator_at(eta).expect("frame coordinates match the rep").matrix;
        let bed = be.adjoint();
        let lhs = &(&bx * &bed) + &(&bed * &bx);
        anti = anti.max(lhs.max_abs_diff(&id.scale(xi.inner(eta))));
        let bg = rep.generator_at(&xi.gamma()).expect("frame coordinates match the rep").matrix;
        adj = adj.max(bg.max_abs_diff(&bx.adjoint()));
    }
    let tolerance = 1e-12 * d as f64;
    CarReport {
        pairs_checked: pairs.len(),
        max_anticommutator_residual: anti,
        max_adjoint_residual: adj,
        tolerance,
        passed: anti <= tolerance && adj <= tolerance,
    }
}

/// Ordered product of distinct Majoranas.
#[derive(Clone, Debug)]
pub struct MajoranaMonomial {
    /// Strictly increasing labels.
    pub index_set: Vec<usize>,
    pub matrix: ComplexMatrix,
    /// `vectors[j]` is the Γ-fixed vector whose generator is the j-th factor.
    pub vectors: Vec<ModeCoords>,
}

/// Bit `l` set means label `l` is present.
pub type MonomialMask = u32;

pub fn mask_to_labels(mask: MonomialMask) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).collect()
}

pub fn labels_to_mask(labels: &[usize]) -> MonomialMask {
    labels.iter().fold(0, |m, &l| m | (1 << l))
}

/// All monomial masks of a representation, in increasing mask order.
pub fn monomial_masks(shape: RepShape) -> Vec<MonomialMask> {
    let labels: Vec<usize> = shape.majorana_labels().collect();
    (0u32..(1u32 << labels.len()))
        .map(|bits| labels.iter().enumerate().filter(|(j, _)| bits & (1 << j) != 0).fold(0, |m, (_, &l)| m | (1 << l)))
        .collect::<std::collections::BTreeSet<_>>()
        .into_iter()
        .collect()
}

pub type Expansion = BTreeMap<Vec<usize>, C64>;

/// The full Majorana monomial basis of a representation.
#[derive(Clone, Debug)]
pub struct MajoranaBasis {
    shape: RepShape,
    monomials: Vec<MajoranaMonomial>,
    parity_witness: Option<ComplexMatrix>,
}

pub fn majorana_basis(rep: &JordanWignerRep) -> Result<MajoranaBasis> {
    let shape = rep.shape();
    let count = 1usize << shape.majorana_count();
    let d = rep.rep_dim();
    if count.saturating_mul(d * d) > MONOMIAL_STORAGE_CAP {
        return Err(Error::Resource(format!(
            "{count} monomials of size {d}x{d} exceed the storage cap of {MONOMIAL_STORAGE_CAP} entries"
        )));
    }
    let monomials = monomial_masks(shape)
        .into_iter()
        .map(|mask| {
            let index_set = mask_to_labels(mask);
            MajoranaMonomial {
                matrix: rep.monomial_matrix(&index_set),
                vectors: index_set.iter().map(|&l| ModeCoords::majorana(shape, l)).collect(),
                index_set,
            }
        })
        .collect();
    Ok(MajoranaBasis { shape, monomials, parity_witness: rep.parity_witness() })
}

impl MajoranaBasis {
    pub fn shape(&self) -> RepShape {
        self.shape
    }

    pub fn monomials(&self) -> &[MajoranaMonomial] {
        &self.monomials
    }

    /// Coefficients `γ_I = τ(m_I† A)` with `τ = Tr / rep_dim`.
    pub fn expand(&self, a: &AlgebraElement) -> Result<Expansion> {
        if a.shape != self.shape {
            return Err(Error::Validation("element belongs to a different representation".into()));
        }
        if let Some(w) = &self.parity_witness {
            let r = a.matrix.commutator(w).max_abs();
            if r > 1e-10 {
                return Err(Error::Validation(format!(
                    "element is not in M(2,C)^n ⊗ (C ⊕ C): commutator with the parity witness is {r:.3e}"
                )));
            }
        }
        Ok(self.monomials.iter().map(|m| (m.index_set.clone(), m.matrix.normalized_inner(&a.matrix))).collect())
    }

    pub fn reconstruct(&self, coeffs: &Expansion) -> ComplexMatrix {
        let d = self.shape.rep_dim();
        let mut out = ComplexMatrix::zeros(d, d);
        for m in &self.monomials {
            if let Some(&g) = coeffs.get(&m.index_set) {
                if g != ZERO {
                    out = &out + &m.matrix.scale(g);
                }
            }
        }
        out
    }
}

pub fn expand(rep: &JordanWignerRep, a: &AlgebraElement) -> Result<Expansion> {
    majorana_basis(rep)?.expand(a)
}

//! Built-in three-dimensional example: `Γ(x, y, z) = (ȳ, x̄, z̄)` with
//!
//! ```text
//! S  = 1/6 [[2, 0, 1], [0, 4, -1], [1, -1, 3]]
//! S' = 1/6 [[3, 0, 1], [0, 3, -1], [1, -1, 3]]
//! ```
//!
//! and the element `b = diag(-1, 1) ⊗ 1` of `M(2,C) ⊗ (C ⊕ C)`.
//!
//! `b` is a fixed matrix, but which algebra element it stands for depends
//! on the Γ-adapted frame used to build the representation. The report
//! therefore records two sets of values: each state evaluated in its own
//! adapted frame (three different algebra elements), and all three states
//! evaluated on the same element in the frame of `S`. Only the second set
//! says anything about the affine property.

use serde::{Deserialize, Serialize};

use crate::affine::{mixture, necessary_check, numeric_test, AffineReport, NecessaryCheck, Verdict};
use crate::car_rep::{build_rep, AlgebraElement, Parity};
use crate::covariance::{adapted_diagonalize, difference_rank, validate, CovarianceOperator, Involution};
use crate::error::Result;
use crate::numerics::{blocks, ComplexMatrix};
use crate::quasifree::{evaluate, trace_eval};

pub const GOLDEN_TOL: f64 = 1e-12;

pub fn gamma() -> Involution {
    Involution::swap_conjugation(3)
}

fn sixths(rows: [[f64; 3]; 3]) -> ComplexMatrix {
    let r: Vec<&[f64]> = rows.iter().map(|r| r.as_slice()).collect();
    ComplexMatrix::from_real_rows(&r).scale_real(1.0 / 6.0)
}

pub fn s_matrix() -> ComplexMatrix {
    sixths([[2.0, 0.0, 1.0], [0.0, 4.0, -1.0], [1.0, -1.0, 3.0]])
}

pub fn s_prime_matrix() -> ComplexMatrix {
    sixths([[3.0, 0.0, 1.0], [0.0, 3.0, -1.0], [1.0, -1.0, 3.0]])
}

pub fn s() -> CovarianceOperator {
    validate(s_matrix(), &gamma()).expect("built-in operator is valid")
}

pub fn s_prime() -> CovarianceOperator {
    validate(s_prime_matrix(), &gamma()).expect("built-in operator is valid")
}

/// `diag(-1, 1) ⊗ 1` in the odd one-mode representation.
pub fn element() -> AlgebraElement {
    let rep = build_rep(1, Parity::Odd).expect("one odd mode fits");
    rep.element(blocks::diag2(-1.0, 1.0).kron(&blocks::id2())).expect("diagonal element is in the algebra")
}

/// Reference values: eigenvalues of `S`, `S'` (ascending) and the state
/// values `-√3/3`, `-√2/3`, `-½`.
pub struct Reference {
    pub eigenvalues_s: [f64; 3],
    pub eigenvalues_s_prime: [f64; 3],
    pub values: [f64; 3],
}

pub fn reference() -> Reference {
    let r3 = 3f64.sqrt();
    let r2 = 2f64.sqrt();
    Reference {
        eigenvalues_s: [(3.0 - r3) / 6.0, 0.5, (3.0 + r3) / 6.0],
        eigenvalues_s_prime: [(3.0 - r2) / 6.0, 0.5, (3.0 + r2) / 6.0],
        values: [-r3 / 3.0, -r2 / 3.0, -0.5],
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StateValues {
    pub s: f64,
    pub s_prime: f64,
    pub mixture: f64,
    /// `½ φ_S + ½ φ_S' - φ_{(S+S')/2}`.
    pub discrepancy: f64,
}

impl StateValues {
    fn new(s: f64, s_prime: f64, mixture: f64) -> Self {
        Self { s, s_prime, mixture, discrepancy: 0.5 * s + 0.5 * s_prime - mixture }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub schema: String,
    pub eigenvalues_s: Vec<f64>,
    pub eigenvalues_s_prime: Vec<f64>,
    pub eigenvalues_mixture: Vec<f64>,
    /// Each state evaluated on `b` in its own adapted frame.
    pub own_frame: StateValues,
    /// All states evaluated on the same element, in the frame of `S`.
    pub common_frame: StateValues,
    pub commutator_norm: f64,
    pub diff_rank: usize,
    pub necessary_check: NecessaryCheck,
    pub affine: AffineReport,
    /// Eigenvalues and own-frame values agree with the reference within 1e-12.
    pub reference_values_match: bool,
}

impl GoldenReport {
    /// Reference values reproduced and the pair judged not affine.
    pub fn passed(&self) -> bool {
        self.reference_values_match && self.affine.verdict == Verdict::NotAffine
    }
}

fn real_value(z: crate::numerics::C64) -> f64 {
    debug_assert!(z.im.abs() < 1e-10, "state value on a self-adjoint element has imaginary part {}", z.im);
    z.re
}

/// `φ_X(b)` with `b` read in the adapted frame of `X`. Evaluated by both the
/// Wick route and the density-matrix trace; returns the Wick value and the
/// gap between the two.
pub fn own_frame_value(x: &CovarianceOperator) -> Result<(f64, f64)> {
    let frame = adapted_diagonalize(x)?;
    let b = element();
    let wick = evaluate(x, &frame, &b)?;
    let trace = trace_eval(&frame, &b);
    Ok((real_value(wick), (wick - trace).norm()))
}

pub fn reproduce() -> Result<GoldenReport> {
    let s = s();
    let sp = s_prime();
    let mix = mixture(&s, &sp, 0.5)?;
    let reference = reference();

    let (own_s, _) = own_frame_value(&s)?;
    let (own_sp, _) = own_frame_value(&sp)?;
    let (own_mix, _) = own_frame_value(&mix)?;

    let frame = adapted_diagonalize(&s)?;
    let b = element();
    let common = StateValues::new(
        real_value(evaluate(&s, &frame, &b)?),
        real_value(evaluate(&sp, &frame, &b)?),
        real_value(evaluate(&mix, &frame, &b)?),
    );

    let eig_s = s.eigenvalues();
    let eig_sp = sp.eigenvalues();
    let close = |a: &[f64], b: &[f64]| a.iter().zip(b).all(|(x, y)| (x - y).abs() <= GOLDEN_TOL);
    let own = StateValues::new(own_s, own_sp, own_mix);
    let reference_values_match = close(&eig_s, &reference.eigenvalues_s)
        && close(&eig_sp, &reference.eigenvalues_s_prime)
        && close(&[own.s, own.s_prime, own.mixture], &reference.values);

    Ok(GoldenReport {
        schema: "1".into(),
        eigenvalues_s: eig_s,
        eigenvalues_s_prime: eig_sp,
        eigenvalues_mixture: mix.eigenvalues(),
        own_frame: own,
        common_frame: common,
        commutator_norm: s.commutator_norm(&sp),
        diff_rank: difference_rank(&s, &sp, None)?,
        necessary_check: necessary_check(&s, &sp)?,
        affine: numeric_test(&s, &sp, None, &frame)?,
        reference_values_match,
    })
}

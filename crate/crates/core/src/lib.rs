//! Numerical laboratory for quasi-free states on finite-dimensional self-dual
//! CAR algebras.
//!
//! * [`numerics`]: dense complex matrices and Hermitian eigendecomposition.
//! * [`car_rep`]: Jordan–Wigner matrices, Majorana monomials, CAR checks.
//! * [`covariance`]: involutions, covariance operators, Γ-adapted frames.
//! * [`quasifree`]: Wick (pair-partition) and density-matrix evaluation.
//! * [`affine`]: affine-property decisions and the randomized explorer.
//! * [`golden`]: the built-in three-dimensional non-commuting example.

pub mod affine;
pub mod car_rep;
pub mod covariance;
pub mod error;
pub mod golden;
pub mod numerics;
pub mod quasifree;

pub use affine::{AffineOptions, AffineReport, CampaignReport, Method, SamplingMode, Verdict};
pub use car_rep::{build_rep, AlgebraElement, JordanWignerRep, ModeCoords, Parity, RepShape};
pub use covariance::{validate, CovarianceOperator, GammaAdaptedBasis, Involution};
pub use error::{Error, Result};
pub use numerics::{ComplexMatrix, C64};

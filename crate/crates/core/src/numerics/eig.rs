//! Hermitian eigendecomposition.
//!
//! The solver itself is nalgebra's symmetric QR iteration (it handles complex
//! Hermitian input). This module adds the conventions the rest of the crate
//! relies on: ascending eigenvalues, a fixed eigenvector phase, and grouping
//! of (near-)degenerate eigenvalues.

use std::ops::Range;

use nalgebra::DMatrix;

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

/// Default tolerance for Hermiticity checks and eigen residuals on a `k x k` matrix.
pub fn default_tol(k: usize) -> f64 {
    1e-9 * k as f64
}

#[derive(Clone, Debug)]
pub struct EigenDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Column `j` pairs with `eigenvalues[j]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn vector(&self, j: usize) -> Vec<C64> {
        self.eigenvectors.column(j)
    }

    /// Splits the ascending spectrum into runs whose consecutive gaps are at
    /// most `tol`.
    pub fn groups(&self, tol: f64) -> Vec<Range<usize>> {
        let mut out = Vec::new();
        let mut start = 0;
        for j in 1..=self.eigenvalues.len() {
            if j == self.eigenvalues.len() || self.eigenvalues[j] - self.eigenvalues[j - 1] > tol {
                out.push(start..j);
                start = j;
            }
        }
        out
    }

    /// `V diag(w) V†`.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let v = &self.eigenvectors;
        let n = self.dim();
        let mut m = ComplexMatrix::zeros(n, n);
        for (j, &w) in self.eigenvalues.iter().enumerate() {
            for r in 0..n {
                let a = v[(r, j)] * w;
                for c in 0..n {
                    m[(r, c)] += a * v[(c, j)].conj();
                }
            }
        }
        m
    }
}

/// Eigendecomposition of a Hermitian matrix, checked against `default_tol(k)`.
pub fn herm_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    herm_eig_with_tol(m, default_tol(m.rows()))
}

pub fn herm_eig_with_tol(m: &ComplexMatrix, herm_tol: f64) -> Result<EigenDecomposition> {
    if !m.is_square() {
        return Err(Error::Dimension(format!(
            "eigendecomposition needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let asym = m.hermitian_residual();
    if asym > herm_tol || asym.is_nan() {
        return Err(Error::NotHermitian { asymmetry: asym, tol: herm_tol });
    }
    let n = m.rows();
    // Symmetrize so the solver sees an exactly Hermitian input.
    let sym = DMatrix::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5);
    let eig = sym.symmetric_eigen();

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

    let eigenvalues = order.iter().map(|&j| eig.eigenvalues[j]).collect();
    let columns: Vec<Vec<C64>> = order
        .iter()
        .map(|&j| {
            let mut col: Vec<C64> = eig.eigenvectors.column(j).iter().copied().collect();
            fix_phase(&mut col);
            col
        })
        .collect();
    Ok(EigenDecomposition { eigenvalues, eigenvectors: ComplexMatrix::from_columns(&columns) })
}

/// Rotates `v` so its largest-magnitude entry is real and positive. Ties
/// within 1e-12 go to the lowest index.
pub fn fix_phase(v: &mut [C64]) {
    let max = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    if max == 0.0 {
        return;
    }
    let pivot = v.iter().position(|z| z.norm() >= max - 1e-12).unwrap();
    let phase = v[pivot].conj() / v[pivot].norm();
    for z in v.iter_mut() {
        *z *= phase;
    }
    v[pivot] = C64::new(v[pivot].re, 0.0);
}

/// Largest eigenvalue magnitude of a Hermitian matrix.
pub fn spectral_norm_hermitian(m: &ComplexMatrix) -> Result<f64> {
    let e = herm_eig(m)?;
    Ok(e.eigenvalues.iter().map(|w| w.abs()).fold(0.0, f64::max))
}

//! Dense complex linear algebra used throughout the crate.

mod eig;
mod io;
mod matrix;

pub use eig::{default_tol, fix_phase, herm_eig, herm_eig_with_tol, spectral_norm_hermitian, EigenDecomposition};
pub use io::{matrix_from_json, matrix_to_json, MatrixFile};
pub use matrix::{axpy, inner, kron_all, max_abs_vec_diff, norm, scaled, ComplexMatrix, C64, I, ONE, ZERO};

/// Pauli-style 2x2 building blocks.
pub mod blocks {
    use super::{ComplexMatrix, C64};

    pub fn id2() -> ComplexMatrix {
        ComplexMatrix::identity(2)
    }

    /// diag(1, -1)
    pub fn z() -> ComplexMatrix {
        ComplexMatrix::from_real_diag(&[1.0, -1.0])
    }

    /// [[0, 0], [1, 0]]
    pub fn lower() -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]])
    }

    pub fn diag2(a: f64, b: f64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[C64::new(a, 0.0), C64::new(b, 0.0)])
    }
}

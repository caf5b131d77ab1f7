use std::fmt;

/// A single violated condition found while validating a covariance operator.
#[derive(Debug, Clone, PartialEq)]
pub struct Violation {
    pub condition: Condition,
    pub residual: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Condition {
    /// Matrix is not square or does not match the involution's dimension.
    Shape,
    /// `S = S†` fails.
    Hermiticity,
    /// `0 <= S <= 1` fails.
    SpectralRange,
    /// `ΓSΓ = 1 - S` fails.
    GammaRelation,
}

impl fmt::Display for Condition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Condition::Shape => "shape",
            Condition::Hermiticity => "hermiticity (S = S*)",
            Condition::SpectralRange => "spectral range (0 <= S <= 1)",
            Condition::GammaRelation => "involution relation (GSG = 1 - S)",
        };
        f.write_str(s)
    }
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} violated, residual {:.3e}", self.condition, self.residual)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),

    #[error("matrix is not Hermitian: max |M - M*| = {asymmetry:.3e} (tolerance {tol:.3e})")]
    NotHermitian { asymmetry: f64, tol: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid covariance operator: {}", format_violations(.0))]
    InvalidCovariance(Vec<Violation>),

    #[error("resource limit exceeded: {0}")]
    Resource(String),

    #[error(
        "operators do not commute: max |SS' - S'S| = {norm:.3e} (tolerance {tol:.3e}); use the numeric test instead"
    )]
    NotCommuting { norm: f64, tol: f64 },

    #[error("internal consistency error: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),
}

fn format_violations(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

//! JSON file format for matrices: `{"rows": r, "cols": c, "entries": [[re, im], ...]}`
//! with entries in row-major order.

use serde::{Deserialize, Serialize};

use super::matrix::{ComplexMatrix, C64};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixFile {
    pub rows: usize,
    pub cols: usize,
    pub entries: Vec<[f64; 2]>,
}

impl From<&ComplexMatrix> for MatrixFile {
    fn from(m: &ComplexMatrix) -> Self {
        Self { rows: m.rows(), cols: m.cols(), entries: m.entries().iter().map(|z| [z.re, z.im]).collect() }
    }
}

impl TryFrom<MatrixFile> for ComplexMatrix {
    type Error = Error;

    fn try_from(f: MatrixFile) -> Result<Self> {
        if let Some(pos) = f.entries.iter().position(|[re, im]| !re.is_finite() || !im.is_finite()) {
            return Err(Error::Parse(format!("non-finite entry at index {pos}")));
        }
        ComplexMatrix::new(f.rows, f.cols, f.entries.into_iter().map(|[re, im]| C64::new(re, im)).collect())
    }
}

pub fn matrix_from_json(text: &str) -> Result<ComplexMatrix> {
    let file: MatrixFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    file.try_into()
}

pub fn matrix_to_json(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(&MatrixFile::from(m)).expect("matrix serialization cannot fail")
}

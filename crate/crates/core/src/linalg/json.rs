use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::hermitian::HermitianOperator;
use super::matrix::{CMatrix, ComplexMatrix};
use crate::error::{Error, Result};

/// Row-major matrix encoding: `{"dim": n, "entries": [[[re, im], ...], ...]}`.
///
/// Rectangular matrices (Kraus operators between different dimensions) use
/// `"rows"` and `"cols"` in place of `"dim"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixJson {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rows: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cols: Option<usize>,
    pub entries: Vec<Vec<[f64; 2]>>,
}

impl MatrixJson {
    pub fn from_matrix(m: &CMatrix) -> Self {
        let entries = (0..m.nrows())
            .map(|r| (0..m.ncols()).map(|c| [m[(r, c)].re, m[(r, c)].im]).collect())
            .collect();
        if m.is_square() {
            Self {
                dim: Some(m.nrows()),
                rows: None,
                cols: None,
                entries,
            }
        } else {
            Self {
                dim: None,
                rows: Some(m.nrows()),
                cols: Some(m.ncols()),
                entries,
            }
        }
    }

    pub fn from_hermitian(h: &HermitianOperator) -> Self {
        Self::from_matrix(h.matrix())
    }

    /// Decodes and validates shape and finiteness; `path` prefixes error locations.
    pub fn to_complex_matrix(&self, path: &str) -> Result<ComplexMatrix> {
        let (rows, cols) = match (self.dim, self.rows, self.cols) {
            (Some(n), None, None) => (n, n),
            (None, Some(r), Some(c)) => (r, c),
            _ => {
                return Err(Error::schema(
                    path,
                    "matrix needs either \"dim\" or both \"rows\" and \"cols\"",
                ))
            }
        };
        if rows == 0 || cols == 0 {
            return Err(Error::schema(path, "matrix dimensions must be positive"));
        }
        if self.entries.len() != rows {
            return Err(Error::schema(
                format!("{path}.entries"),
                format!("expected {rows} rows, found {}", self.entries.len()),
            ));
        }
        let mut data = CMatrix::zeros(rows, cols);
        for (r, row) in self.entries.iter().enumerate() {
            if row.len() != cols {
                return Err(Error::schema(
                    format!("{path}.entries[{r}]"),
                    format!("expected {cols} entries, found {}", row.len()),
                ));
            }
            for (c, z) in row.iter().enumerate() {
                if !z[0].is_finite() || !z[1].is_finite() {
                    return Err(Error::schema(format!("{path}.entries[{r}][{c}]"), "entry is not finite"));
                }
                data[(r, c)] = Complex64::new(z[0], z[1]);
            }
        }
        ComplexMatrix::new(data)
    }

    pub fn to_hermitian(&self, path: &str) -> Result<HermitianOperator> {
        let m = self.to_complex_matrix(path)?;
        HermitianOperator::new(m).map_err(|e| Error::schema(path, e))
    }
}

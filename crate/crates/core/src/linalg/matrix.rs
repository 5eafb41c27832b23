use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense complex matrix backing every operator type in the crate.
pub type CMatrix = DMatrix<Complex64>;

pub(crate) const ZERO: Complex64 = Complex64::new(0.0, 0.0);
#[cfg(test)]
pub(crate) const I: Complex64 = Complex64::new(0.0, 1.0);

/// A general complex matrix with finite entries.
///
/// Square matrices are the common case (operators on one Hilbert space), but
/// Kraus operators of dimension-changing channels are rectangular, so squareness
/// is checked by the operator types built on top of this one.
#[derive(Clone, Debug, PartialEq)]
pub struct ComplexMatrix {
    data: CMatrix,
}

impl ComplexMatrix {
    pub fn new(data: CMatrix) -> Result<Self> {
        for c in 0..data.ncols() {
            for r in 0..data.nrows() {
                let z = data[(r, c)];
                if !z.re.is_finite() || !z.im.is_finite() {
                    return Err(Error::NonFinite { row: r, col: c });
                }
            }
        }
        Ok(Self { data })
    }

    /// Builds a matrix from row-major rows.
    pub fn from_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let nrows = rows.len();
        let ncols = rows.first().map_or(0, Vec::len);
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != ncols) {
            return Err(Error::dims(
                format!("{ncols} columns"),
                format!("{} columns in row {i}", r.len()),
            ));
        }
        Self::new(CMatrix::from_fn(nrows, ncols, |r, c| rows[r][c]))
    }

    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let rows: Vec<Vec<Complex64>> = rows
            .iter()
            .map(|r| r.iter().map(|&x| Complex64::new(x, 0.0)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            data: CMatrix::zeros(rows, cols),
        }
    }

    pub(crate) fn from_raw(data: CMatrix) -> Self {
        debug_assert!(data.iter().all(|z| z.re.is_finite() && z.im.is_finite()));
        Self { data }
    }

    pub fn nrows(&self) -> usize {
        self.data.nrows()
    }

    pub fn ncols(&self) -> usize {
        self.data.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.data.is_square()
    }

    pub fn as_matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn into_matrix(self) -> CMatrix {
        self.data
    }

    pub fn adjoint(&self) -> Self {
        Self {
            data: self.data.adjoint(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// Largest entrywise modulus of `A - A^dagger`.
    pub fn hermitian_deviation(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let n = self.data.nrows();
        let mut dev = 0.0_f64;
        for r in 0..n {
            for c in r..n {
                dev = dev.max((self.data[(r, c)] - self.data[(c, r)].conj()).norm());
            }
        }
        dev
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
        }
    }
}

pub(crate) fn frobenius(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `(A + A^dagger) / 2`.
pub(crate) fn symmetrize(m: &CMatrix) -> CMatrix {
    let n = m.nrows();
    CMatrix::from_fn(n, n, |r, c| {
        if r == c {
            Complex64::new(m[(r, r)].re, 0.0)
        } else {
            (m[(r, c)] + m[(c, r)].conj()) * 0.5
        }
    })
}

/// `tr(AB)` without forming the product.
pub(crate) fn trace_product(a: &CMatrix, b: &CMatrix) -> Complex64 {
    let n = a.nrows();
    let mut acc = ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Kronecker product `A ⊗ B`.
pub fn kron(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_non_finite_entries() {
        let mut m = CMatrix::identity(2, 2);
        m[(1, 0)] = Complex64::new(f64::NAN, 0.0);
        assert!(matches!(
            ComplexMatrix::new(m),
            Err(Error::NonFinite { row: 1, col: 0 })
        ));
    }

    #[test]
    fn ragged_rows_are_rejected() {
        let rows = vec![vec![1.0, 0.0], vec![0.0]];
        assert!(ComplexMatrix::from_real_rows(&rows).is_err());
    }

    #[test]
    fn hermitian_deviation_of_sigma_y_is_zero() {
        let y = ComplexMatrix::from_rows(&[vec![ZERO, -I], vec![I, ZERO]]).unwrap();
        assert_eq!(y.hermitian_deviation(), 0.0);
        let bad = ComplexMatrix::from_rows(&[vec![ZERO, I], vec![I, ZERO]]).unwrap();
        assert!((bad.hermitian_deviation() - 2.0).abs() < 1e-15);
    }
}

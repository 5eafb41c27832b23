use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;

use super::functions::{Elementary, ScalarFunction};
use super::matrix::{frobenius, symmetrize, trace_product, CMatrix, ComplexMatrix};
use super::spectral::{spectral_decompose, spectral_decompose_snapped, SpectralDecomposition, DEFAULT_CLUSTER_TOL};
use crate::error::{Error, Result};

pub const DEFAULT_HERM_TOL: f64 = 1e-10;
pub const DEFAULT_ZERO_TOL: f64 = 1e-10;

/// A Hermitian operator, stored in symmetrized form.
#[derive(Clone, Debug, PartialEq)]
pub struct HermitianOperator {
    data: CMatrix,
}

impl HermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        Self::with_tolerance(m, DEFAULT_HERM_TOL)
    }

    /// Accepts `m` when `max |m - m^dagger| <= tol` and stores `(m + m^dagger) / 2`.
    pub fn with_tolerance(m: ComplexMatrix, tol: f64) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        let deviation = m.hermitian_deviation();
        if deviation > tol {
            return Err(Error::NotHermitian { deviation, tol });
        }
        Ok(Self {
            data: symmetrize(m.as_matrix()),
        })
    }

    /// Symmetrizes a matrix that is Hermitian up to rounding by construction.
    pub(crate) fn from_computed(m: &CMatrix) -> Self {
        debug_assert!(m.is_square());
        Self { data: symmetrize(m) }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            data: CMatrix::identity(n, n),
        }
    }

    pub fn zeros(n: usize) -> Self {
        Self {
            data: CMatrix::zeros(n, n),
        }
    }

    pub fn diagonal(values: &[f64]) -> Self {
        let n = values.len();
        Self {
            data: CMatrix::from_fn(n, n, |r, c| {
                if r == c {
                    Complex64::new(values[r], 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            }),
        }
    }

    pub fn dim(&self) -> usize {
        self.data.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.data
    }

    pub fn to_complex_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_raw(self.data.clone())
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim()).map(|i| self.data[(i, i)].re).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        frobenius(&self.data)
    }

    /// Largest eigenvalue modulus.
    pub fn operator_norm(&self) -> Result<f64> {
        Ok(self.spectral()?.max_abs_eigenvalue())
    }

    pub fn spectral(&self) -> Result<SpectralDecomposition> {
        spectral_decompose(self, DEFAULT_CLUSTER_TOL)
    }

    /// `f(self)` through a fresh spectral decomposition.
    pub fn apply(&self, f: &dyn ScalarFunction) -> Result<HermitianOperator> {
        super::matrix_function(&self.spectral()?, f)
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            data: self.data.map(|z| z * s),
        }
    }

    /// `outer · self · outer`.
    pub fn sandwich(&self, outer: &HermitianOperator) -> Self {
        Self::from_computed(&(&outer.data * &self.data * &outer.data))
    }

    /// `k · self · k^dagger` for any (possibly rectangular) `k`.
    pub fn conjugate_by(&self, k: &CMatrix) -> Self {
        Self::from_computed(&(k * &self.data * k.adjoint()))
    }

    pub fn matmul(&self, other: &HermitianOperator) -> CMatrix {
        &self.data * &other.data
    }

    /// `{A, B} = AB + BA`.
    pub fn anticommutator(&self, other: &HermitianOperator) -> Self {
        let ab = &self.data * &other.data;
        Self::from_computed(&(&ab + ab.adjoint()))
    }

    /// `‖AB − BA‖_F`.
    pub fn commutator_norm(&self, other: &HermitianOperator) -> f64 {
        let ab = &self.data * &other.data;
        frobenius(&(&ab - ab.adjoint()))
    }

    /// `‖self − other‖_F`.
    pub fn distance(&self, other: &HermitianOperator) -> f64 {
        frobenius(&(&self.data - &other.data))
    }

    /// `tr(self · other)` without the imaginary-part check of [`super::hs_inner`].
    pub(crate) fn trace_with(&self, other: &HermitianOperator) -> f64 {
        trace_product(&self.data, &other.data).re
    }

    pub fn to_psd(&self) -> Result<PsdOperator> {
        PsdOperator::new(self.clone())
    }

    pub fn to_positive(&self) -> Result<PositiveOperator> {
        PositiveOperator::new(self.clone())
    }
}

impl Add for &HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in Hermitian addition");
        HermitianOperator {
            data: &self.data + &rhs.data,
        }
    }
}

impl Sub for &HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: &HermitianOperator) -> HermitianOperator {
        assert_eq!(self.dim(), rhs.dim(), "dimension mismatch in Hermitian subtraction");
        HermitianOperator {
            data: &self.data - &rhs.data,
        }
    }
}

impl Add for HermitianOperator {
    type Output = HermitianOperator;
    fn add(self, rhs: HermitianOperator) -> HermitianOperator {
        &self + &rhs
    }
}

impl Sub for HermitianOperator {
    type Output = HermitianOperator;
    fn sub(self, rhs: HermitianOperator) -> HermitianOperator {
        &self - &rhs
    }
}

impl Neg for &HermitianOperator {
    type Output = HermitianOperator;
    fn neg(self) -> HermitianOperator {
        self.scale(-1.0)
    }
}

impl Mul<f64> for &HermitianOperator {
    type Output = HermitianOperator;
    fn mul(self, s: f64) -> HermitianOperator {
        self.scale(s)
    }
}

/// Access to an operator together with its cached spectral decomposition.
pub trait SpectralOperator {
    fn operator(&self) -> &HermitianOperator;
    fn spectrum(&self) -> &SpectralDecomposition;

    fn dim(&self) -> usize {
        self.operator().dim()
    }

    fn apply(&self, f: &dyn ScalarFunction) -> Result<HermitianOperator> {
        super::matrix_function(self.spectrum(), f)
    }

    fn power(&self, p: f64) -> Result<HermitianOperator> {
        self.apply(&Elementary::Power(p))
    }
}

/// A strictly positive definite operator (every eigenvalue above the zero threshold).
#[derive(Clone, Debug)]
pub struct PositiveOperator {
    op: HermitianOperator,
    spectral: SpectralDecomposition,
    min_eigenvalue: f64,
}

impl PositiveOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        let spectral = spectral_decompose(&op, DEFAULT_CLUSTER_TOL)?;
        let min_eigenvalue = spectral.raw_eigenvalues().first().copied().unwrap_or(0.0);
        if !(min_eigenvalue > DEFAULT_ZERO_TOL) {
            return Err(Error::NotPositive { min_eigenvalue });
        }
        Ok(Self {
            op,
            spectral,
            min_eigenvalue,
        })
    }

    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        Self::new(HermitianOperator::new(m)?)
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diagonal(values))
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.min_eigenvalue
    }

    pub fn trace(&self) -> f64 {
        self.op.trace()
    }

    /// `k · self` for `k > 0`.
    pub fn scaled(&self, k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::InvalidParameter(format!("scale factor must be positive, got {k}")));
        }
        Self::new(self.op.scale(k))
    }

    pub fn log(&self) -> HermitianOperator {
        self.apply(&Elementary::Log).expect("log is defined on positive spectra")
    }

    pub fn into_psd(self) -> PsdOperator {
        PsdOperator {
            rank: self.op.dim(),
            op: self.op,
            spectral: self.spectral,
            zero_tol: DEFAULT_ZERO_TOL,
        }
    }

    pub fn to_psd(&self) -> PsdOperator {
        self.clone().into_psd()
    }
}

impl SpectralOperator for PositiveOperator {
    fn operator(&self) -> &HermitianOperator {
        &self.op
    }
    fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectral
    }
}

/// A positive semidefinite operator. Eigenvalues within `±zero_tol` are exactly zero.
#[derive(Clone, Debug)]
pub struct PsdOperator {
    op: HermitianOperator,
    spectral: SpectralDecomposition,
    rank: usize,
    zero_tol: f64,
}

impl PsdOperator {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Self::with_zero_tol(op, DEFAULT_ZERO_TOL)
    }

    pub fn with_zero_tol(op: HermitianOperator, zero_tol: f64) -> Result<Self> {
        let spectral = spectral_decompose_snapped(&op, DEFAULT_CLUSTER_TOL, zero_tol)?;
        if let Some(&lowest) = spectral.raw_eigenvalues().first() {
            if lowest < -zero_tol {
                return Err(Error::NegativeEigenvalue {
                    eigenvalue: lowest,
                    tol: zero_tol,
                });
            }
        }
        let rank = spectral.raw_eigenvalues().iter().filter(|&&v| v > zero_tol).count();
        Ok(Self {
            op,
            spectral,
            rank,
            zero_tol,
        })
    }

    pub fn diagonal(values: &[f64]) -> Result<Self> {
        Self::new(HermitianOperator::diagonal(values))
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn kernel_dim(&self) -> usize {
        self.op.dim() - self.rank
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank == self.op.dim()
    }

    pub fn zero_tol(&self) -> f64 {
        self.zero_tol
    }

    pub fn to_positive(&self) -> Result<PositiveOperator> {
        PositiveOperator::new(self.op.clone())
    }

    /// Columns of the eigenvector matrix spanning the zero eigenspace.
    pub(crate) fn kernel_columns(&self) -> Vec<usize> {
        (0..self.op.dim())
            .filter(|&c| self.spectral.column_eigenvalue(c) == 0.0)
            .collect()
    }
}

impl SpectralOperator for PsdOperator {
    fn operator(&self) -> &HermitianOperator {
        &self.op
    }
    fn spectrum(&self) -> &SpectralDecomposition {
        &self.spectral
    }
}

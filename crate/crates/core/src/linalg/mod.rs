//! Validated Hermitian operator types, clustered spectral decompositions and
//! functional calculus.

mod functions;
mod hermitian;
mod json;
mod matrix;
mod spectral;

pub use functions::{Elementary, Interval, ScalarFunction};
pub use hermitian::{
    HermitianOperator, PositiveOperator, PsdOperator, SpectralOperator, DEFAULT_HERM_TOL, DEFAULT_ZERO_TOL,
};
pub use json::MatrixJson;
pub use matrix::{kron, CMatrix, ComplexMatrix};
pub use spectral::{spectral_decompose, SpectralDecomposition, DEFAULT_CLUSTER_TOL};

pub(crate) use matrix::{frobenius, trace_product};

use crate::error::{Error, Result};

/// `Σ_j f(λ_j) Π_j`.
pub fn matrix_function(spec: &SpectralDecomposition, f: &dyn ScalarFunction) -> Result<HermitianOperator> {
    let values = spec
        .eigenvalues()
        .iter()
        .map(|&lambda| {
            f.value(lambda).ok_or_else(|| Error::Domain {
                function: f.name(),
                eigenvalue: lambda,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(spec.diagonal_function(|col| values[spec.cluster_of()[col]]))
}

/// Logarithm on the support, zero on the kernel.
pub fn log_cross(a: &PsdOperator) -> HermitianOperator {
    let spec = a.spectrum();
    spec.diagonal_function(|col| {
        let v = spec.column_eigenvalue(col);
        if v > 0.0 {
            v.ln()
        } else {
            0.0
        }
    })
}

/// Orthogonal projector onto the support (nonzero eigenspaces).
pub fn zeroth_power(a: &PsdOperator) -> HermitianOperator {
    let spec = a.spectrum();
    spec.diagonal_function(|col| if spec.column_eigenvalue(col) > 0.0 { 1.0 } else { 0.0 })
}

/// Orthogonal projector onto the zero eigenspace, `I − ρ⁰`.
pub fn kernel_projector(a: &PsdOperator) -> HermitianOperator {
    let spec = a.spectrum();
    spec.diagonal_function(|col| if spec.column_eigenvalue(col) > 0.0 { 0.0 } else { 1.0 })
}

/// Moore–Penrose pseudo-inverse of a PSD operator.
pub fn pseudo_inverse(a: &PsdOperator) -> HermitianOperator {
    let spec = a.spectrum();
    spec.diagonal_function(|col| {
        let v = spec.column_eigenvalue(col);
        if v > 0.0 {
            1.0 / v
        } else {
            0.0
        }
    })
}

/// Hilbert–Schmidt inner product `tr(AB)`.
pub fn hs_inner(a: &HermitianOperator, b: &HermitianOperator) -> Result<f64> {
    if a.dim() != b.dim() {
        return Err(Error::dims(a.dim(), b.dim()));
    }
    let t = trace_product(a.matrix(), b.matrix());
    let scale = 1.0_f64.max(a.frobenius_norm() * b.frobenius_norm());
    debug_assert!(t.im.abs() <= 1e-12 * scale, "tr(AB) has imaginary part {}", t.im);
    if t.im.abs() > 1e-12 * scale {
        return Err(Error::InvalidParameter(format!(
            "tr(AB) has imaginary part {:e}; inputs are not Hermitian",
            t.im
        )));
    }
    Ok(t.re)
}

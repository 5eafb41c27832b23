use serde::{Deserialize, Serialize};

use super::{dpi_gap, normalized_residual, petz_recovery_errors, residual1, residual2, Tolerances};
use crate::channels::KrausChannel;
use crate::divergences::{GradientMethod, MeasureJson, MeasureSpec};
use crate::error::Result;
use crate::linalg::{MatrixJson, PositiveOperator, SpectralOperator};

pub const SCHEMA_VERSION: &str = "v1";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SaturationReport {
    pub schema_version: String,
    pub measure: MeasureJson,
    /// Sign-adjusted `B(ρ, σ) − B(Λρ, Λσ)`.
    pub gap: f64,
    pub residual1_frobenius: f64,
    pub residual1_operator_norm: f64,
    pub residual2_frobenius: f64,
    pub residual2_operator_norm: f64,
    pub residual2_method: GradientMethod,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual1: Option<MatrixJson>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub residual2: Option<MatrixJson>,
    /// `|gap|` and both residual norms within tolerance.
    pub saturated: bool,
    pub petz_recovery_error_rho: f64,
    pub petz_recovery_error_sigma: f64,
    /// Prefactor-free Rényi residual; present only when the gap already vanishes.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized_residual_frobenius: Option<f64>,
    pub tolerances: Tolerances,
}

/// Computes the full report; `dump_matrices` adds both residual operators.
pub fn analyze(
    m: &MeasureSpec,
    ch: &KrausChannel,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    tol: &Tolerances,
    dump_matrices: bool,
) -> Result<SaturationReport> {
    let gap = dpi_gap(m, ch, rho, sigma)?;
    let r1 = residual1(m, ch, rho, sigma)?;
    let (r2, method) = residual2(m, ch, rho, sigma)?;
    let petz = petz_recovery_errors(ch, rho.operator(), sigma)?;
    let normalized = if m.is_renyi() {
        normalized_residual(m, ch, rho, sigma, tol)?.map(|r| r.frobenius)
    } else {
        None
    };
    let saturated = gap.abs() <= tol.gap_tol && r1.frobenius <= tol.residual_tol && r2.frobenius <= tol.residual_tol;
    Ok(SaturationReport {
        schema_version: SCHEMA_VERSION.to_string(),
        measure: m.to_json(),
        gap,
        residual1_frobenius: r1.frobenius,
        residual1_operator_norm: r1.operator_norm,
        residual2_frobenius: r2.frobenius,
        residual2_operator_norm: r2.operator_norm,
        residual2_method: method,
        residual1: dump_matrices.then(|| MatrixJson::from_hermitian(&r1.op)),
        residual2: dump_matrices.then(|| MatrixJson::from_hermitian(&r2.op)),
        saturated,
        petz_recovery_error_rho: petz.rho_error,
        petz_recovery_error_sigma: petz.sigma_error,
        normalized_residual_frobenius: normalized,
        tolerances: *tol,
    })
}

//! Vanishing-gradient residuals for data-processing saturation, boundary
//! residuals for rank-deficient states, and Petz recovery.

mod boundary;
mod petz;
mod report;

pub use boundary::{
    boundary_gradient, boundary_residual_general, boundary_residual_relent, extended_gradient_relent,
    generator_tangent, hiai_residual, tangent_dimension, tangent_membership, tangent_project, HiaiResidual,
};
pub use petz::{
    alpha2_petz_residual, alpha_z_crosscheck, petz_map, petz_recovery_errors, AlphaZCrosscheck, PetzErrors,
};
pub use report::{analyze, SaturationReport, SCHEMA_VERSION};

use serde::{Deserialize, Serialize};

use crate::channels::KrausChannel;
use crate::divergences::{alpha_z_grad1_unnormalized, evaluate, grad1, grad2, scaling_check, GradientMethod, Measure, MeasureSpec};
use crate::error::{Error, Result};
use crate::linalg::{HermitianOperator, PositiveOperator, SpectralOperator};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub gap_tol: f64,
    pub residual_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gap_tol: 1e-8,
            residual_tol: 1e-8,
        }
    }
}

/// A residual operator with its Frobenius and operator norms.
#[derive(Clone, Debug)]
pub struct Residual {
    pub op: HermitianOperator,
    pub frobenius: f64,
    pub operator_norm: f64,
}

impl Residual {
    pub fn new(op: HermitianOperator) -> Result<Self> {
        Ok(Self {
            frobenius: op.frobenius_norm(),
            operator_norm: op.operator_norm()?,
            op,
        })
    }
}

fn check_channel_input(ch: &KrausChannel, dim: usize) -> Result<()> {
    if ch.dim_in() != dim {
        return Err(Error::dims(format!("channel input dimension {}", ch.dim_in()), dim));
    }
    Ok(())
}

fn positive_image(ch: &KrausChannel, a: &HermitianOperator, which: &'static str) -> Result<PositiveOperator> {
    PositiveOperator::new(ch.apply(a)?).map_err(|e| match e {
        Error::NotPositive { min_eigenvalue } => Error::OutputNotPositive { which, min_eigenvalue },
        other => other,
    })
}

/// `(Λ(ρ), Λ(σ))`, both required strictly positive.
pub fn channel_images(
    ch: &KrausChannel,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<(PositiveOperator, PositiveOperator)> {
    check_channel_input(ch, rho.dim())?;
    check_channel_input(ch, sigma.dim())?;
    Ok((
        positive_image(ch, rho.operator(), "rho")?,
        positive_image(ch, sigma.operator(), "sigma")?,
    ))
}

/// Sign-adjusted `B(ρ, σ) − B(Λρ, Λσ)`; non-negative whenever the measure satisfies DPI.
pub fn dpi_gap(m: &MeasureSpec, ch: &KrausChannel, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<f64> {
    let (lr, ls) = channel_images(ch, rho, sigma)?;
    Ok(m.sign().value() * (evaluate(m, rho, sigma)? - evaluate(m, &lr, &ls)?))
}

/// `∇₁B|_{ρ,σ} − Λ*(∇₁B|_{Λρ,Λσ})`.
pub fn residual1(m: &MeasureSpec, ch: &KrausChannel, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<Residual> {
    let (lr, ls) = channel_images(ch, rho, sigma)?;
    let here = grad1(m, rho, sigma)?.op;
    let there = grad1(m, &lr, &ls)?.op;
    Residual::new(&here - &ch.adjoint_apply(&there)?)
}

/// `∇₂B|_{ρ,σ} − Λ*(∇₂B|_{Λρ,Λσ})`, with the method used for the gradients.
pub fn residual2(
    m: &MeasureSpec,
    ch: &KrausChannel,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<(Residual, GradientMethod)> {
    let (lr, ls) = channel_images(ch, rho, sigma)?;
    let here = grad2(m, rho, sigma)?;
    let there = grad2(m, &lr, &ls)?;
    let method = if here.method == GradientMethod::Numeric || there.method == GradientMethod::Numeric {
        GradientMethod::Numeric
    } else {
        GradientMethod::ClosedForm
    };
    Ok((Residual::new(&here.op - &ch.adjoint_apply(&there.op)?)?, method))
}

/// The prefactor-free first-gradient residual of the Rényi families. Dropping the
/// prefactor presumes equal values, so this returns `None` unless `|gap| ≤ gap_tol`.
pub fn normalized_residual(
    m: &MeasureSpec,
    ch: &KrausChannel,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    tol: &Tolerances,
) -> Result<Option<Residual>> {
    let (alpha, z) = match m.measure() {
        Measure::SandwichedRenyi { alpha } => (*alpha, *alpha),
        Measure::AlphaZ { alpha, z } => (*alpha, *z),
        _ => {
            return Err(Error::Unsupported {
                operation: "normalized_residual",
                family: m.family().to_string(),
            })
        }
    };
    if dpi_gap(m, ch, rho, sigma)?.abs() > tol.gap_tol {
        return Ok(None);
    }
    let (lr, ls) = channel_images(ch, rho, sigma)?;
    let here = alpha_z_grad1_unnormalized(alpha, z, rho, sigma)?;
    let there = alpha_z_grad1_unnormalized(alpha, z, &lr, &ls)?;
    Ok(Some(Residual::new(&here - &ch.adjoint_apply(&there)?)?))
}

/// Outcome of the converse check: when the first residual vanishes the gap must too.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConverseCertificate {
    pub residual1_norm: f64,
    pub gap: f64,
    /// The residual is below tolerance, so a vanishing gap is asserted.
    pub implied_gap_zero: bool,
    /// A vanishing residual with a gap above tolerance.
    pub violation: bool,
}

/// Relative agreement demanded of the scaling law before the converse is applied.
const SCALING_TOL: f64 = 1e-10;

pub fn converse_certificate(
    m: &MeasureSpec,
    ch: &KrausChannel,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    tol: &Tolerances,
) -> Result<ConverseCertificate> {
    if !m.has_scaling_law() {
        return Err(Error::Unsupported {
            operation: "converse_certificate (no verified scaling law; check the gap directly)",
            family: m.family().to_string(),
        });
    }
    if m.is_renyi() {
        for (k, kp) in [(2.0, 3.0), (0.5, 0.25)] {
            let s = scaling_check(m, rho, sigma, k, kp)?;
            if s.discrepancy() > SCALING_TOL * s.lhs.abs().max(1.0) {
                return Err(Error::InvalidParameter(format!(
                    "scaling law failed for {m}: lhs {} vs rhs {}",
                    s.lhs, s.rhs
                )));
            }
        }
    }
    let r = residual1(m, ch, rho, sigma)?.frobenius;
    let gap = dpi_gap(m, ch, rho, sigma)?;
    let implied = r <= tol.residual_tol;
    Ok(ConverseCertificate {
        residual1_norm: r,
        gap,
        implied_gap_zero: implied,
        violation: implied && gap.abs() > tol.gap_tol,
    })
}

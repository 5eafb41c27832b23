//! Petz recovery and the α = 2 and α-z saturation conditions built from it.

use serde::{Deserialize, Serialize};

use super::{channel_images, check_channel_input, positive_image, residual1};
use crate::channels::KrausChannel;
use crate::divergences::MeasureSpec;
use crate::error::Result;
use crate::linalg::{HermitianOperator, PositiveOperator, SpectralOperator};

const PETZ_TP_TOL: f64 = 1e-9;

/// The Petz recovery channel `X ↦ σ^{1/2} Λ*[Λ(σ)^{−1/2} X Λ(σ)^{−1/2}] σ^{1/2}`,
/// with Kraus operators `σ^{1/2} K_i† Λ(σ)^{−1/2}`.
pub fn petz_map(sigma: &PositiveOperator, ch: &KrausChannel) -> Result<KrausChannel> {
    check_channel_input(ch, sigma.dim())?;
    let l_sigma = positive_image(ch, sigma.operator(), "sigma")?;
    let s_half = sigma.power(0.5)?;
    let l_inv_half = l_sigma.power(-0.5)?;
    let kraus = ch
        .kraus()
        .iter()
        .map(|k| s_half.matrix() * k.adjoint() * l_inv_half.matrix())
        .collect();
    KrausChannel::from_matrices(kraus, PETZ_TP_TOL)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PetzErrors {
    /// `‖R_σ(Λρ) − ρ‖_F`.
    pub rho_error: f64,
    /// `‖R_σ(Λσ) − σ‖_F`.
    pub sigma_error: f64,
}

pub fn petz_recovery_errors(ch: &KrausChannel, rho: &HermitianOperator, sigma: &PositiveOperator) -> Result<PetzErrors> {
    check_channel_input(ch, rho.dim())?;
    let r = petz_map(sigma, ch)?;
    Ok(PetzErrors {
        rho_error: r.apply(&ch.apply(rho)?)?.distance(rho),
        sigma_error: r.apply(&ch.apply(sigma.operator())?)?.distance(sigma.operator()),
    })
}

/// `σ^{−1/2} ρ σ^{−1/2} − Λ*[Λ(σ)^{−1/2} Λ(ρ) Λ(σ)^{−1/2}]`.
pub fn alpha2_petz_residual(ch: &KrausChannel, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<HermitianOperator> {
    let (l_rho, l_sigma) = channel_images(ch, rho, sigma)?;
    let lhs = rho.operator().sandwich(&sigma.power(-0.5)?);
    let inner = l_rho.operator().sandwich(&l_sigma.power(-0.5)?);
    Ok(&lhs - &ch.adjoint_apply(&inner)?)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlphaZCrosscheck {
    /// Norm of the first α-z gradient residual.
    pub gradient_residual: f64,
    /// Norm of `f − Λ*(f∘Λ)` for `f = σ^{(1−z)/2z} Q^{z−1} σ^{(1−z)/2z}`.
    pub chehade_residual: f64,
    /// Norm of `f − Λ*(f∘Λ)` for `f = σ^γ Q^{α−1} σ^γ`.
    pub zhang_residual: f64,
}

/// `(σ^{(1−z)/2z} Q^{z−1} σ^{(1−z)/2z}, σ^γ Q^{α−1} σ^γ)` with
/// `Q = σ^γ ρ^{α/z} σ^γ`, `γ = (1−α)/2z`.
fn crosscheck_operators(
    alpha: f64,
    z: f64,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<(HermitianOperator, HermitianOperator)> {
    let gamma = (1.0 - alpha) / (2.0 * z);
    let s = sigma.power(gamma)?;
    let q = PositiveOperator::new(rho.power(alpha / z)?.sandwich(&s))?;
    let chehade = q.power(z - 1.0)?.sandwich(&sigma.power((1.0 - z) / (2.0 * z))?);
    let zhang = q.power(alpha - 1.0)?.sandwich(&s);
    Ok((chehade, zhang))
}

pub fn alpha_z_crosscheck(
    ch: &KrausChannel,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    alpha: f64,
    z: f64,
) -> Result<AlphaZCrosscheck> {
    let m = MeasureSpec::alpha_z(alpha, z)?;
    let (l_rho, l_sigma) = channel_images(ch, rho, sigma)?;
    let (c, zh) = crosscheck_operators(alpha, z, rho, sigma)?;
    let (lc, lzh) = crosscheck_operators(alpha, z, &l_rho, &l_sigma)?;
    let residual = |a: &HermitianOperator, b: &HermitianOperator| -> Result<f64> {
        Ok((a - &ch.adjoint_apply(b)?).frobenius_norm())
    };
    Ok(AlphaZCrosscheck {
        gradient_residual: residual1(&m, ch, rho, sigma)?.frobenius,
        chehade_residual: residual(&c, &lc)?,
        zhang_residual: residual(&zh, &lzh)?,
    })
}

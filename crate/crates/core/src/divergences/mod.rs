//! Distinguishability measures and their first and second matrix gradients.

mod measure;

pub use measure::{
    alpha_z_in_dpi_region, sandwiched_in_dpi_region, FFunction, FName, Family, Measure, MeasureJson, MeasureSpec, Sign,
};

use serde::{Deserialize, Serialize};

use crate::calculus::{apply_divided_differences, divided_differences, frechet_derivative_spectral, ScalarFunctionPair};
use crate::error::{Error, Result};
use crate::linalg::{CMatrix, Elementary, HermitianOperator, PositiveOperator, PsdOperator, ScalarFunction, SpectralOperator};

/// How a gradient was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GradientMethod {
    ClosedForm,
    Numeric,
}

#[derive(Clone, Debug)]
pub struct Gradient {
    pub op: HermitianOperator,
    pub method: GradientMethod,
}

impl Gradient {
    fn closed(op: HermitianOperator) -> Self {
        Self {
            op,
            method: GradientMethod::ClosedForm,
        }
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::dims(a, b));
    }
    Ok(())
}

/// `h^p` for an operator that is PSD up to rounding: eigenvalues with
/// `|λ| ≤ 1e-12 · max|λ|` are treated as zero, so rounding noise on an exact
/// kernel does not leak through fractional powers.
fn psd_power(h: &HermitianOperator, p: f64) -> Result<HermitianOperator> {
    let spec = h.spectral()?;
    let floor = 1e-12 * spec.max_abs_eigenvalue();
    let lowest = spec.min_eigenvalue();
    if lowest < -floor {
        return Err(Error::NegativeEigenvalue {
            eigenvalue: lowest,
            tol: floor,
        });
    }
    let f = Elementary::Power(p);
    let values = spec
        .eigenvalues()
        .iter()
        .map(|&v| {
            let v = if v.abs() <= floor { 0.0 } else { v };
            f.value(v).ok_or_else(|| Error::Domain {
                function: f.to_string(),
                eigenvalue: v,
            })
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(spec.diagonal_function(|col| values[spec.cluster_of()[col]]))
}

/// `tr ρ log ρ − tr ρ log σ`, `tr √(σ^{1/2} ρ σ^{1/2})`, `ln T / (α − 1)` for the Rényi
/// families, or the spectral double sum `Σ_{jk} μ_k f(p_j / μ_k) tr(Π_j Φ_k)`.
pub fn evaluate(m: &MeasureSpec, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    value(m, rho, sigma)
}

/// As [`evaluate`], allowing a rank-deficient first argument.
pub fn evaluate_psd(m: &MeasureSpec, rho: &PsdOperator, sigma: &PositiveOperator) -> Result<f64> {
    check_dims(rho.dim(), sigma.dim())?;
    value(m, rho, sigma)
}

fn value(m: &MeasureSpec, rho: &dyn SpectralOperator, sigma: &PositiveOperator) -> Result<f64> {
    match m.measure() {
        Measure::RelativeEntropy => {
            let xlogx = rho.apply(&Elementary::XLogX)?.trace();
            Ok(xlogx - rho.operator().trace_with(&sigma.log()))
        }
        Measure::Fidelity => {
            let s = sigma.power(0.5)?;
            Ok(psd_power(&rho.operator().sandwich(&s), 0.5)?.trace())
        }
        Measure::SandwichedRenyi { alpha } => {
            let alpha = *alpha;
            let s = sigma.power((1.0 - alpha) / (2.0 * alpha))?;
            let t = psd_power(&rho.operator().sandwich(&s), alpha)?.trace();
            renyi_log(t, alpha)
        }
        Measure::AlphaZ { alpha, z } => {
            let (alpha, z) = (*alpha, *z);
            let s = sigma.power((1.0 - alpha) / (2.0 * z))?;
            let q = rho.power(alpha / z)?.sandwich(&s);
            let t = psd_power(&q, z)?.trace();
            renyi_log(t, alpha)
        }
        Measure::FDivergence(f) => {
            let pair = f.pair();
            let rs = rho.spectrum();
            let ss = sigma.spectrum();
            let overlap = rs.eigenvectors().adjoint() * ss.eigenvectors();
            let mut total = 0.0;
            for a in 0..rs.dim() {
                let p = rs.column_eigenvalue(a);
                for b in 0..ss.dim() {
                    let mu = ss.column_eigenvalue(b);
                    let fx = pair.value(p / mu).ok_or_else(|| Error::Domain {
                        function: pair.name().to_string(),
                        eigenvalue: p / mu,
                    })?;
                    total += mu * fx * overlap[(a, b)].norm_sqr();
                }
            }
            Ok(total)
        }
    }
}

fn renyi_log(t: f64, alpha: f64) -> Result<f64> {
    if !(t > 0.0) || !t.is_finite() {
        return Err(Error::InvalidParameter(format!("Rényi trace functional is {t}, not positive")));
    }
    Ok(t.ln() / (alpha - 1.0))
}

/// Pieces shared by the α-z gradients: `σ^γ`, `Q = σ^γ ρ^{α/z} σ^γ` and `T = tr Q^z`.
struct AlphaZParts {
    alpha: f64,
    z: f64,
    gamma: f64,
    q: PositiveOperator,
    t: f64,
}

impl AlphaZParts {
    fn new(alpha: f64, z: f64, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<(Self, HermitianOperator)> {
        let gamma = (1.0 - alpha) / (2.0 * z);
        let s = sigma.power(gamma)?;
        let q = PositiveOperator::new(rho.power(alpha / z)?.sandwich(&s))?;
        let t = q.power(z)?.trace();
        Ok((
            Self {
                alpha,
                z,
                gamma,
                q,
                t,
            },
            s,
        ))
    }

    fn prefactor(&self) -> f64 {
        self.z / ((self.alpha - 1.0) * self.t)
    }
}

/// `D(x^{α/z})|_ρ(σ^γ Q^{z−1} σ^γ)` and the prefactor `z / ((α − 1) T)`.
fn alpha_z_grad1_parts(
    alpha: f64,
    z: f64,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<(HermitianOperator, f64)> {
    let (parts, s) = AlphaZParts::new(alpha, z, rho, sigma)?;
    let x = parts.q.power(z - 1.0)?.sandwich(&s);
    let pair = ScalarFunctionPair::from_elementary(Elementary::Power(alpha / z));
    let d = frechet_derivative_spectral(rho.spectrum(), x.matrix(), &pair)?;
    Ok((HermitianOperator::from_computed(&d), parts.prefactor()))
}

fn alpha_z_grad1(alpha: f64, z: f64, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<HermitianOperator> {
    let (op, c) = alpha_z_grad1_parts(alpha, z, rho, sigma)?;
    Ok(op.scale(c))
}

/// The first α-z gradient with the scalar prefactor dropped.
pub(crate) fn alpha_z_grad1_unnormalized(
    alpha: f64,
    z: f64,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<HermitianOperator> {
    Ok(alpha_z_grad1_parts(alpha, z, rho, sigma)?.0)
}

fn alpha_z_grad2(alpha: f64, z: f64, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<HermitianOperator> {
    let (parts, _) = AlphaZParts::new(alpha, z, rho, sigma)?;
    let qz = parts.q.power(z)?;
    let s_inv = sigma.power(-parts.gamma)?;
    let anti = qz.anticommutator(&s_inv);
    let pair = ScalarFunctionPair::from_elementary(Elementary::Power(parts.gamma));
    let d = frechet_derivative_spectral(sigma.spectrum(), anti.matrix(), &pair)?;
    Ok(HermitianOperator::from_computed(&d).scale(parts.prefactor()))
}

/// Gradient of `ρ ↦ B(ρ, σ)`.
pub fn grad1(m: &MeasureSpec, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<Gradient> {
    check_dims(rho.dim(), sigma.dim())?;
    let n = rho.dim();
    let op = match m.measure() {
        Measure::RelativeEntropy => &(&rho.log() - &sigma.log()) + &HermitianOperator::identity(n),
        Measure::Fidelity => fidelity_grad1(rho, sigma)?,
        Measure::SandwichedRenyi { alpha } => {
            let alpha = *alpha;
            let s = sigma.power((1.0 - alpha) / (2.0 * alpha))?;
            let q = PositiveOperator::new(rho.operator().sandwich(&s))?;
            let t = q.power(alpha)?.trace();
            q.power(alpha - 1.0)?.sandwich(&s).scale(alpha / ((alpha - 1.0) * t))
        }
        Measure::AlphaZ { alpha, z } => alpha_z_grad1(*alpha, *z, rho, sigma)?,
        Measure::FDivergence(f) => f_divergence_grad1(&f.pair(), rho, sigma)?,
    };
    Ok(Gradient::closed(op))
}

/// `½ σ^{1/2} (σ^{1/2} ρ σ^{1/2})^{−1/2} σ^{1/2}`.
fn fidelity_grad1(rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<HermitianOperator> {
    let s = sigma.power(0.5)?;
    let inner = PositiveOperator::new(rho.operator().sandwich(&s))?;
    Ok(inner.power(-0.5)?.sandwich(&s).scale(0.5))
}

/// `Σ_k D g_k|_ρ(Φ_k)` with `g_k(x) = μ_k f(x / μ_k)`, i.e. `f'(p_j/μ_k)` on the
/// diagonal blocks and `μ_k`-weighted divided differences off the diagonal.
fn f_divergence_grad1(
    pair: &ScalarFunctionPair,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<HermitianOperator> {
    let rs = rho.spectrum();
    let ss = sigma.spectrum();
    let mut total = CMatrix::zeros(rho.dim(), rho.dim());
    for (k, &mu) in ss.eigenvalues().iter().enumerate() {
        let phi = ss.projector(k);
        let gamma = divided_differences(
            rs,
            pair.name(),
            |x| pair.value(x / mu).map(|v| mu * v),
            |x| pair.derivative(x / mu),
        )?;
        total += apply_divided_differences(rs, &gamma, phi.matrix());
    }
    Ok(HermitianOperator::from_computed(&total))
}

/// `Σ_j D h_j|_σ(Π_j)` with `h_j(x) = x f(p_j / x)` over the eigenprojectors `Π_j`
/// of `ρ`; the value is `Σ_j tr(h_j(σ) Π_j)`, so this mirrors the first gradient.
fn f_divergence_grad2(
    pair: &ScalarFunctionPair,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
) -> Result<HermitianOperator> {
    let rs = rho.spectrum();
    let ss = sigma.spectrum();
    let mut total = CMatrix::zeros(rho.dim(), rho.dim());
    for (j, &p) in rs.eigenvalues().iter().enumerate() {
        let pi = rs.projector(j);
        let gamma = divided_differences(
            ss,
            pair.name(),
            |x| pair.value(p / x).map(|v| x * v),
            |x| Some(pair.value(p / x)? - (p / x) * pair.derivative(p / x)?),
        )?;
        total += apply_divided_differences(ss, &gamma, pi.matrix());
    }
    Ok(HermitianOperator::from_computed(&total))
}

/// Gradient of `σ ↦ B(ρ, σ)`.
pub fn grad2(m: &MeasureSpec, rho: &PositiveOperator, sigma: &PositiveOperator) -> Result<Gradient> {
    check_dims(rho.dim(), sigma.dim())?;
    let op = match m.measure() {
        Measure::RelativeEntropy => {
            let pair = ScalarFunctionPair::from_elementary(Elementary::Log);
            let d = frechet_derivative_spectral(sigma.spectrum(), rho.operator().matrix(), &pair)?;
            HermitianOperator::from_computed(&d).scale(-1.0)
        }
        Measure::Fidelity => fidelity_grad1(sigma, rho)?,
        Measure::SandwichedRenyi { alpha } => alpha_z_grad2(*alpha, *alpha, rho, sigma)?,
        Measure::AlphaZ { alpha, z } => alpha_z_grad2(*alpha, *z, rho, sigma)?,
        Measure::FDivergence(f) => f_divergence_grad2(&f.pair(), rho, sigma)?,
    };
    Ok(Gradient::closed(op))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScalingCheck {
    pub lhs: f64,
    pub rhs: f64,
}

impl ScalingCheck {
    pub fn discrepancy(&self) -> f64 {
        (self.lhs - self.rhs).abs()
    }
}

/// `D(kρ, k′σ)` against `D(ρ, σ) + α/(α − 1) ln k − ln k′` for the Rényi families.
pub fn scaling_check(
    m: &MeasureSpec,
    rho: &PositiveOperator,
    sigma: &PositiveOperator,
    k: f64,
    k_prime: f64,
) -> Result<ScalingCheck> {
    let Some(alpha) = m.alpha() else {
        return Err(Error::Unsupported {
            operation: "scaling_check",
            family: m.family().to_string(),
        });
    };
    let lhs = evaluate(m, &rho.scaled(k)?, &sigma.scaled(k_prime)?)?;
    let rhs = evaluate(m, rho, sigma)? + alpha / (alpha - 1.0) * k.ln() - k_prime.ln();
    Ok(ScalingCheck { lhs, rhs })
}

#[cfg(test)]
mod tests;

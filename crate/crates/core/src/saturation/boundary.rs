//! Rank-deficient first arguments: the tangent space of the PSD cone, extended
//! gradients along it, and the boundary saturation residuals.

use nalgebra::DMatrix;
use num_complex::Complex64;

use super::{check_channel_input, positive_image, residual1, Residual};
use crate::calculus::{dualize, hermitian_basis, LinearFunctionalSample};
use crate::channels::KrausChannel;
use crate::divergences::{evaluate_psd, grad1, GradientMethod, Measure, MeasureSpec};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{
    frobenius, kernel_projector, log_cross, pseudo_inverse, zeroth_power, CMatrix, ComplexMatrix, HermitianOperator,
    PositiveOperator, PsdOperator, SpectralOperator,
};

const MEMBERSHIP_TOL: f64 = 1e-10;
const RANK_TOL: f64 = 1e-8;

fn check_dim(rho: &PsdOperator, m: &HermitianOperator) -> Result<()> {
    if rho.dim() != m.dim() {
        return Err(Error::dims(rho.dim(), m.dim()));
    }
    Ok(())
}

/// `A − K A K` with `K = I − ρ⁰`.
fn project_with(kernel: &HermitianOperator, m: &HermitianOperator) -> HermitianOperator {
    m - &m.sandwich(kernel)
}

/// Projection of `m` onto the tangent space of the PSD cone at `rho`.
pub fn tangent_project(rho: &PsdOperator, m: &HermitianOperator) -> Result<HermitianOperator> {
    check_dim(rho, m)?;
    Ok(project_with(&kernel_projector(rho), m))
}

/// Whether `m` is Hilbert–Schmidt orthogonal to every Hermitian operator
/// supported on the kernel of `rho`.
pub fn tangent_membership(rho: &PsdOperator, m: &HermitianOperator) -> Result<bool> {
    check_dim(rho, m)?;
    let cols = rho.kernel_columns();
    let v = rho.spectrum().eigenvectors();
    let s = std::f64::consts::SQRT_2;
    for (i, &a) in cols.iter().enumerate() {
        let va = v.column(a);
        let maa = (va.adjoint() * m.matrix() * va)[(0, 0)];
        if maa.re.abs() > MEMBERSHIP_TOL {
            return Ok(false);
        }
        for &b in &cols[i + 1..] {
            let x = (va.adjoint() * m.matrix() * v.column(b))[(0, 0)];
            if s * x.re.abs() > MEMBERSHIP_TOL || s * x.im.abs() > MEMBERSHIP_TOL {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Numerical rank of `{tangent_project(ρ, B_i)}` over the canonical basis.
pub fn tangent_dimension(rho: &PsdOperator) -> usize {
    let n = rho.dim();
    let basis = hermitian_basis(n);
    let kernel = kernel_projector(rho);
    let mut coords = DMatrix::<f64>::zeros(basis.len(), basis.len());
    for (j, b) in basis.iter().enumerate() {
        let p = project_with(&kernel, &b.operator(n));
        for (i, c) in basis.iter().enumerate() {
            coords[(i, j)] = c.coordinate(p.matrix());
        }
    }
    coords.singular_values().iter().filter(|&&s| s > RANK_TOL).count()
}

/// `Δρ + ρΔ†`, a tangent vector for any square `Δ`.
pub fn generator_tangent(rho: &PsdOperator, delta: &ComplexMatrix) -> Result<HermitianOperator> {
    let n = rho.dim();
    if delta.nrows() != n || delta.ncols() != n {
        return Err(Error::dims(format!("{n}x{n}"), format!("{}x{}", delta.nrows(), delta.ncols())));
    }
    let dr = delta.as_matrix() * rho.operator().matrix();
    Ok(HermitianOperator::from_computed(&(&dr + dr.adjoint())))
}

/// `log×ρ + ρ⁰ − log σ + K log σ K`: the relative-entropy gradient restricted to
/// the tangent space at a possibly rank-deficient `rho`.
pub fn extended_gradient_relent(rho: &PsdOperator, sigma: &PositiveOperator) -> Result<HermitianOperator> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(rho.dim(), sigma.dim()));
    }
    let kernel = kernel_projector(rho);
    let log_sigma = sigma.log();
    Ok(&(&log_cross(rho) + &zeroth_power(rho)) - &project_with(&kernel, &log_sigma))
}

/// Step for the tangent curve, relative to the generator size.
fn curve_step(delta: &CMatrix) -> f64 {
    1e-5 / frobenius(delta).max(1.0)
}

/// Derivative of `ε ↦ B((I + εΔ)ρ(I + εΔ)†, σ)` at zero, where `Δ` generates the
/// tangent vector `t`. The curve keeps the rank of `rho` fixed.
fn tangent_directional(
    m: &MeasureSpec,
    rho: &PsdOperator,
    sigma: &PositiveOperator,
    t: &HermitianOperator,
) -> Result<f64> {
    let n = rho.dim();
    let support = zeroth_power(rho);
    let half = CMatrix::identity(n, n) - support.matrix() * Complex64::new(0.5, 0.0);
    let delta = half * t.matrix() * pseudo_inverse(rho).matrix();
    let h = curve_step(&delta);
    let at = |eps: f64| -> Result<f64> {
        let g = CMatrix::identity(n, n) + &delta * Complex64::new(eps, 0.0);
        let curve = HermitianOperator::from_computed(&(&g * rho.operator().matrix() * g.adjoint()));
        evaluate_psd(m, &PsdOperator::new(curve)?, sigma)
    };
    let central = |h: f64| -> Result<f64> { Ok((at(h)? - at(-h)?) / (2.0 * h)) };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    Ok((4.0 * fine - coarse) / 3.0)
}

/// The gradient of `B(·, σ)` at `rho` extended to the PSD boundary: the Hermitian
/// `G` in the tangent space with `tr(G M) = dB_σ|_ρ(tangent_project(ρ, M))`.
/// Full rank uses the closed form, relative entropy its boundary closed form, and
/// other families a Richardson-extrapolated derivative along rank-preserving curves.
pub fn boundary_gradient(
    m: &MeasureSpec,
    rho: &PsdOperator,
    sigma: &PositiveOperator,
) -> Result<(HermitianOperator, GradientMethod)> {
    if rho.dim() != sigma.dim() {
        return Err(Error::dims(rho.dim(), sigma.dim()));
    }
    if rho.is_full_rank() {
        return Ok((grad1(m, &rho.to_positive()?, sigma)?.op, GradientMethod::ClosedForm));
    }
    if let Measure::RelativeEntropy = m.measure() {
        return Ok((extended_gradient_relent(rho, sigma)?, GradientMethod::ClosedForm));
    }
    let n = rho.dim();
    let kernel = kernel_projector(rho);
    let basis = hermitian_basis(n);
    let values = Execution::default().map(&basis, |b| {
        let t = project_with(&kernel, &b.operator(n));
        if t.frobenius_norm() == 0.0 {
            return Ok(0.0);
        }
        tangent_directional(m, rho, sigma, &t).map_err(|e| Error::ProbeFailed {
            direction: b.to_string(),
            source: Box::new(e),
        })
    });
    let mut sample = LinearFunctionalSample::new(n);
    for (b, v) in basis.into_iter().zip(values) {
        sample.insert(b, v?);
    }
    Ok((dualize(&sample)?, GradientMethod::Numeric))
}

/// `LHS − RHS` of the boundary relative-entropy condition
/// `log×ρ − [log σ]_ρ = [Λ*(log×Λρ − [log Λσ]_{Λρ})]_ρ`, where
/// `[A]_ρ = A − (I − ρ⁰)A(I − ρ⁰)`.
pub fn boundary_residual_relent(ch: &KrausChannel, rho: &PsdOperator, sigma: &PositiveOperator) -> Result<Residual> {
    check_channel_input(ch, rho.dim())?;
    check_channel_input(ch, sigma.dim())?;
    let l_sigma = positive_image(ch, sigma.operator(), "sigma")?;
    let l_rho = PsdOperator::new(ch.apply(rho.operator())?)?;
    let k = kernel_projector(rho);
    let lk = kernel_projector(&l_rho);
    let lhs = &log_cross(rho) - &project_with(&k, &sigma.log());
    let inner = &log_cross(&l_rho) - &project_with(&lk, &l_sigma.log());
    let rhs = project_with(&k, &ch.adjoint_apply(&inner)?);
    Residual::new(&lhs - &rhs)
}

/// `G_{ρ,σ} − [Λ*(G_{Λρ,Λσ})]_ρ` with extended gradients. At full rank with
/// strictly positive images this is exactly the first saturation residual.
pub fn boundary_residual_general(
    m: &MeasureSpec,
    ch: &KrausChannel,
    rho: &PsdOperator,
    sigma: &PositiveOperator,
) -> Result<(Residual, GradientMethod)> {
    check_channel_input(ch, rho.dim())?;
    check_channel_input(ch, sigma.dim())?;
    let l_sigma = positive_image(ch, sigma.operator(), "sigma")?;
    let l_rho = PsdOperator::new(ch.apply(rho.operator())?)?;
    if rho.is_full_rank() && l_rho.is_full_rank() {
        let rho = rho.to_positive()?;
        return Ok((residual1(m, ch, &rho, sigma)?, GradientMethod::ClosedForm));
    }
    let (here, m1) = boundary_gradient(m, rho, sigma)?;
    let (there, m2) = boundary_gradient(m, &l_rho, &l_sigma)?;
    let pulled = project_with(&kernel_projector(rho), &ch.adjoint_apply(&there)?);
    let method = if m1 == GradientMethod::Numeric || m2 == GradientMethod::Numeric {
        GradientMethod::Numeric
    } else {
        GradientMethod::ClosedForm
    };
    Ok((Residual::new(&here - &pulled)?, method))
}

/// The asymmetric boundary condition
/// `log×ρ − log(σ)ρ⁰ − Λ*(log×Λρ − log(Λσ)Λ(ρ)⁰)`; not Hermitian in general.
#[derive(Clone, Debug)]
pub struct HiaiResidual {
    pub op: ComplexMatrix,
    pub frobenius: f64,
}

pub fn hiai_residual(ch: &KrausChannel, rho: &PsdOperator, sigma: &PositiveOperator) -> Result<HiaiResidual> {
    check_channel_input(ch, rho.dim())?;
    check_channel_input(ch, sigma.dim())?;
    let l_sigma = positive_image(ch, sigma.operator(), "sigma")?;
    let l_rho = PsdOperator::new(ch.apply(rho.operator())?)?;
    let here = log_cross(rho).matrix() - sigma.log().matrix() * zeroth_power(rho).matrix();
    let there = log_cross(&l_rho).matrix() - l_sigma.log().matrix() * zeroth_power(&l_rho).matrix();
    let op = here - ch.adjoint_apply_matrix(&there);
    Ok(HiaiResidual {
        frobenius: frobenius(&op),
        op: ComplexMatrix::from_raw(op),
    })
}

//! Fréchet derivatives of matrix functions, gradient dualization over the
//! Hilbert–Schmidt basis, and finite-difference oracles.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::linalg::{CMatrix, Elementary, HermitianOperator, Interval, ScalarFunction, SpectralDecomposition};

type RealFn = Arc<dyn Fn(f64) -> Option<f64> + Send + Sync>;

/// A scalar function together with its analytic derivative.
#[derive(Clone)]
pub struct ScalarFunctionPair {
    name: String,
    f: RealFn,
    df: RealFn,
    domain: Interval,
}

impl fmt::Debug for ScalarFunctionPair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFunctionPair")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .finish()
    }
}

impl ScalarFunctionPair {
    pub fn from_elementary(e: Elementary) -> Self {
        Self {
            name: e.to_string(),
            f: Arc::new(move |x| e.value(x)),
            df: Arc::new(move |x| e.derivative(x)),
            domain: e.domain(),
        }
    }

    /// Registers a caller-supplied pair after checking `df` against central
    /// differences of `f` at 20 points inside `domain`.
    pub fn custom<F, D>(name: impl Into<String>, f: F, df: D, domain: Interval) -> Result<Self>
    where
        F: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        let pair = Self {
            name: name.into(),
            f: Arc::new(move |x| Some(f(x)).filter(|v| v.is_finite())),
            df: Arc::new(move |x| Some(df(x)).filter(|v| v.is_finite())),
            domain,
        };
        pair.self_check()?;
        Ok(pair)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> Interval {
        self.domain
    }

    pub fn value(&self, x: f64) -> Option<f64> {
        (self.f)(x)
    }

    pub fn derivative(&self, x: f64) -> Option<f64> {
        (self.df)(x)
    }

    /// The 20 probe points used by [`Self::self_check`].
    pub fn sample_points(domain: Interval) -> Vec<f64> {
        const N: usize = 20;
        let (lo, hi) = (domain.lo, domain.hi);
        match (lo.is_finite(), hi.is_finite()) {
            (false, false) => (0..N).map(|i| -3.0 + 6.0 * (i as f64 + 0.5) / N as f64).collect(),
            (true, false) => (0..N)
                .map(|i| lo + (0.05_f64.ln() + (100.0_f64).ln() * i as f64 / (N - 1) as f64).exp())
                .collect(),
            (false, true) => (0..N)
                .map(|i| hi - (0.05_f64.ln() + (100.0_f64).ln() * i as f64 / (N - 1) as f64).exp())
                .collect(),
            (true, true) => {
                let margin = 0.02 * (hi - lo);
                (0..N)
                    .map(|i| lo + margin + (hi - lo - 2.0 * margin) * i as f64 / (N - 1) as f64)
                    .collect()
            }
        }
    }

    /// `|fd - f'| <= 1e-6 * max(1, |f'|)` with `h = 1e-6 * max(1, |x|)`.
    pub fn self_check(&self) -> Result<()> {
        for x in Self::sample_points(self.domain) {
            let h = 1e-6 * x.abs().max(1.0);
            let missing = || Error::InvalidParameter(format!("{} is not finite at {x} inside its declared domain", self.name));
            let fp = self.value(x + h).ok_or_else(missing)?;
            let fm = self.value(x - h).ok_or_else(missing)?;
            let analytic = self.derivative(x).ok_or_else(missing)?;
            let fd = (fp - fm) / (2.0 * h);
            if (fd - analytic).abs() > 1e-6 * analytic.abs().max(1.0) {
                return Err(Error::DerivativeMismatch {
                    name: self.name.clone(),
                    x,
                    fd,
                    analytic,
                });
            }
        }
        Ok(())
    }
}

impl ScalarFunction for ScalarFunctionPair {
    fn name(&self) -> String {
        self.name.clone()
    }

    fn value(&self, x: f64) -> Option<f64> {
        (self.f)(x)
    }
}

/// First divided differences of `f` over the clusters of `spec`, with `f'` on the diagonal.
pub(crate) fn divided_differences(
    spec: &SpectralDecomposition,
    name: &str,
    f: impl Fn(f64) -> Option<f64>,
    df: impl Fn(f64) -> Option<f64>,
) -> Result<Vec<Vec<f64>>> {
    let lambdas = spec.eigenvalues();
    let domain = |lambda: f64| Error::Domain {
        function: name.to_string(),
        eigenvalue: lambda,
    };
    let values = lambdas
        .iter()
        .map(|&l| f(l).ok_or_else(|| domain(l)))
        .collect::<Result<Vec<_>>>()?;
    let slopes = lambdas
        .iter()
        .map(|&l| df(l).ok_or_else(|| domain(l)))
        .collect::<Result<Vec<_>>>()?;
    let k = lambdas.len();
    Ok((0..k)
        .map(|j| {
            (0..k)
                .map(|l| {
                    if j == l {
                        slopes[j]
                    } else {
                        (values[j] - values[l]) / (lambdas[j] - lambdas[l])
                    }
                })
                .collect()
        })
        .collect())
}

/// `Σ_{jk} Γ_jk Π_j M Π_k` for cluster-level weights `Γ`.
pub(crate) fn apply_divided_differences(spec: &SpectralDecomposition, gamma: &[Vec<f64>], m: &CMatrix) -> CMatrix {
    let cluster = spec.cluster_of();
    spec.hadamard_in_eigenbasis(m, |a, b| gamma[cluster[a]][cluster[b]])
}

/// Fréchet derivative of `f` at the operator whose spectrum is `spec`, in the
/// direction `m` (any square matrix; Hermitian in gives Hermitian out).
pub fn frechet_derivative_spectral(spec: &SpectralDecomposition, m: &CMatrix, fp: &ScalarFunctionPair) -> Result<CMatrix> {
    if m.nrows() != spec.dim() || m.ncols() != spec.dim() {
        return Err(Error::dims(spec.dim(), format!("{}x{}", m.nrows(), m.ncols())));
    }
    let gamma = divided_differences(spec, fp.name(), |x| fp.value(x), |x| fp.derivative(x))?;
    Ok(apply_divided_differences(spec, &gamma, m))
}

/// `d f|_A(M) = Σ_j f'(λ_j) Π_j M Π_j + Σ_{j≠k} (f(λ_j) − f(λ_k)) / (λ_j − λ_k) Π_j M Π_k`.
pub fn frechet_derivative(a: &HermitianOperator, m: &HermitianOperator, fp: &ScalarFunctionPair) -> Result<HermitianOperator> {
    if a.dim() != m.dim() {
        return Err(Error::dims(a.dim(), m.dim()));
    }
    let spec = a.spectral()?;
    Ok(HermitianOperator::from_computed(&frechet_derivative_spectral(&spec, m.matrix(), fp)?))
}

/// `(f(A + hM) − f(A − hM)) / 2h`.
pub fn finite_difference_frechet(
    a: &HermitianOperator,
    m: &HermitianOperator,
    f: &dyn ScalarFunction,
    h: f64,
) -> Result<HermitianOperator> {
    if a.dim() != m.dim() {
        return Err(Error::dims(a.dim(), m.dim()));
    }
    let plus = (a + &m.scale(h)).apply(f)?;
    let minus = (a - &m.scale(h)).apply(f)?;
    Ok((&plus - &minus).scale(0.5 / h))
}

/// Label of an element of the orthonormal Hermitian basis
/// `{E_kk; (E_kl + E_lk)/√2; i(E_kl − E_lk)/√2}` with `k < l`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BasisElement {
    Diagonal(usize),
    Symmetric(usize, usize),
    Antisymmetric(usize, usize),
}

impl fmt::Display for BasisElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisElement::Diagonal(k) => write!(f, "E[{k},{k}]"),
            BasisElement::Symmetric(k, l) => write!(f, "sym[{k},{l}]"),
            BasisElement::Antisymmetric(k, l) => write!(f, "asym[{k},{l}]"),
        }
    }
}

impl BasisElement {
    pub fn operator(&self, n: usize) -> HermitianOperator {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let mut m = CMatrix::zeros(n, n);
        match *self {
            BasisElement::Diagonal(k) => m[(k, k)] = Complex64::new(1.0, 0.0),
            BasisElement::Symmetric(k, l) => {
                m[(k, l)] = Complex64::new(s, 0.0);
                m[(l, k)] = Complex64::new(s, 0.0);
            }
            BasisElement::Antisymmetric(k, l) => {
                m[(k, l)] = Complex64::new(0.0, s);
                m[(l, k)] = Complex64::new(0.0, -s);
            }
        }
        HermitianOperator::from_computed(&m)
    }

    /// Coordinate of `a` along this element, `tr(B A)`.
    pub fn coordinate(&self, a: &CMatrix) -> f64 {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            BasisElement::Diagonal(k) => a[(k, k)].re,
            BasisElement::Symmetric(k, l) => s * (a[(l, k)].re + a[(k, l)].re),
            BasisElement::Antisymmetric(k, l) => s * (a[(k, l)].im - a[(l, k)].im),
        }
    }
}

/// The `n²` labels of the canonical Hermitian basis in a fixed order.
pub fn hermitian_basis(n: usize) -> Vec<BasisElement> {
    let mut basis: Vec<BasisElement> = (0..n).map(BasisElement::Diagonal).collect();
    for k in 0..n {
        for l in k + 1..n {
            basis.push(BasisElement::Symmetric(k, l));
            basis.push(BasisElement::Antisymmetric(k, l));
        }
    }
    basis
}

/// Values of a real linear functional on the canonical Hermitian basis.
#[derive(Clone, Debug, PartialEq)]
pub struct LinearFunctionalSample {
    dim: usize,
    values: BTreeMap<BasisElement, f64>,
}

impl LinearFunctionalSample {
    pub fn new(dim: usize) -> Self {
        Self {
            dim,
            values: BTreeMap::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn insert(&mut self, element: BasisElement, value: f64) {
        self.values.insert(element, value);
    }

    pub fn get(&self, element: &BasisElement) -> Option<f64> {
        self.values.get(element).copied()
    }

    /// Evaluates `functional` on every basis element.
    pub fn sample(dim: usize, functional: impl Fn(&HermitianOperator) -> Result<f64>) -> Result<Self> {
        let mut s = Self::new(dim);
        for b in hermitian_basis(dim) {
            let v = functional(&b.operator(dim)).map_err(|e| Error::ProbeFailed {
                direction: b.to_string(),
                source: Box::new(e),
            })?;
            s.insert(b, v);
        }
        Ok(s)
    }

    /// Exact sample of `M ↦ tr(C M)`.
    pub fn of_operator(c: &HermitianOperator) -> Self {
        let n = c.dim();
        let values = hermitian_basis(n).into_iter().map(|b| (b, b.coordinate(c.matrix()))).collect();
        Self { dim: n, values }
    }
}

/// The unique Hermitian `G` with `tr(G B_i) = values[B_i]`: `G = Σ_i values[B_i] B_i`.
pub fn dualize(sample: &LinearFunctionalSample) -> Result<HermitianOperator> {
    let n = sample.dim;
    let missing: Vec<String> = hermitian_basis(n)
        .into_iter()
        .filter(|b| !sample.values.contains_key(b))
        .map(|b| b.to_string())
        .collect();
    if !missing.is_empty() {
        return Err(Error::IncompleteSample(format!("missing {}", missing.join(", "))));
    }
    if let Some(extra) = sample.values.keys().find(|b| match **b {
        BasisElement::Diagonal(k) => k >= n,
        BasisElement::Symmetric(k, l) | BasisElement::Antisymmetric(k, l) => k >= l || l >= n,
    }) {
        return Err(Error::IncompleteSample(format!("element {extra} is outside dimension {n}")));
    }
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let mut g = CMatrix::zeros(n, n);
    for (b, &v) in &sample.values {
        match *b {
            BasisElement::Diagonal(k) => g[(k, k)] += Complex64::new(v, 0.0),
            BasisElement::Symmetric(k, l) => {
                g[(k, l)] += Complex64::new(s * v, 0.0);
                g[(l, k)] += Complex64::new(s * v, 0.0);
            }
            BasisElement::Antisymmetric(k, l) => {
                g[(k, l)] += Complex64::new(0.0, s * v);
                g[(l, k)] += Complex64::new(0.0, -s * v);
            }
        }
    }
    Ok(HermitianOperator::from_computed(&g))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum FdScheme {
    /// `(φ(x + h) − φ(x − h)) / 2h`, bias `O(h²)`.
    #[default]
    Central,
    /// Richardson extrapolation of two central differences, bias `O(h⁴)`.
    Richardson,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct FdOptions {
    /// Step; `None` means `1e-5 · max(1, ‖at‖_F)`.
    pub step: Option<f64>,
    pub scheme: FdScheme,
    pub execution: Execution,
}

pub type ScalarMap<'a> = dyn Fn(&HermitianOperator) -> Result<f64> + Sync + 'a;

pub fn default_step(at: &HermitianOperator) -> f64 {
    1e-5 * at.frobenius_norm().max(1.0)
}

/// Finite-difference gradient of `scalar_map` at `at` with default options.
pub fn numeric_gradient(scalar_map: &ScalarMap<'_>, at: &HermitianOperator) -> Result<HermitianOperator> {
    numeric_gradient_with(scalar_map, at, &FdOptions::default())
}

/// Central directional derivative `(φ(at + hM) − φ(at − hM)) / 2h`.
fn central(scalar_map: &ScalarMap<'_>, at: &HermitianOperator, m: &HermitianOperator, h: f64) -> Result<f64> {
    let plus = scalar_map(&(at + &m.scale(h)))?;
    let minus = scalar_map(&(at - &m.scale(h)))?;
    Ok((plus - minus) / (2.0 * h))
}

pub fn directional_derivative(
    scalar_map: &ScalarMap<'_>,
    at: &HermitianOperator,
    m: &HermitianOperator,
    h: f64,
    scheme: FdScheme,
) -> Result<f64> {
    match scheme {
        FdScheme::Central => central(scalar_map, at, m, h),
        FdScheme::Richardson => {
            let coarse = central(scalar_map, at, m, h)?;
            let fine = central(scalar_map, at, m, 0.5 * h)?;
            Ok((4.0 * fine - coarse) / 3.0)
        }
    }
}

pub fn numeric_gradient_with(
    scalar_map: &ScalarMap<'_>,
    at: &HermitianOperator,
    options: &FdOptions,
) -> Result<HermitianOperator> {
    let n = at.dim();
    let h = options.step.unwrap_or_else(|| default_step(at));
    let basis = hermitian_basis(n);
    let values = options.execution.map(&basis, |b| {
        directional_derivative(scalar_map, at, &b.operator(n), h, options.scheme).map_err(|e| Error::ProbeFailed {
            direction: b.to_string(),
            source: Box::new(e),
        })
    });
    let mut sample = LinearFunctionalSample::new(n);
    for (b, v) in basis.into_iter().zip(values) {
        sample.insert(b, v?);
    }
    dualize(&sample)
}

//! CPTP maps in Kraus form.

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{
    frobenius, CMatrix, ComplexMatrix, Elementary, HermitianOperator, MatrixJson, PsdOperator, SpectralOperator,
};
use crate::random::{ginibre, seeded};

pub const DEFAULT_TP_TOL: f64 = 1e-10;

/// A channel `A ↦ Σ_i K_i A K_i†` from `dim_in`- to `dim_out`-dimensional operators.
#[derive(Clone, Debug)]
pub struct KrausChannel {
    dim_in: usize,
    dim_out: usize,
    kraus: Vec<CMatrix>,
    tp_tol: f64,
}

/// Diagnostics from [`verify_cptp`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CptpReport {
    /// `‖Σ K_i† K_i − I‖_F`.
    pub tp_error: f64,
    /// Smallest eigenvalue of the Choi matrix.
    pub choi_min_eig: f64,
}

fn check_shapes(kraus: &[CMatrix]) -> Result<(usize, usize)> {
    let first = kraus
        .first()
        .ok_or_else(|| Error::InvalidParameter("a channel needs at least one Kraus operator".into()))?;
    let (m, n) = first.shape();
    if m == 0 || n == 0 {
        return Err(Error::InvalidParameter("Kraus operators must be non-empty".into()));
    }
    for (i, k) in kraus.iter().enumerate() {
        if k.shape() != (m, n) {
            return Err(Error::dims(
                format!("{m}x{n} Kraus operators"),
                format!("{}x{} at index {i}", k.nrows(), k.ncols()),
            ));
        }
    }
    Ok((m, n))
}

fn tp_error(kraus: &[CMatrix], n: usize) -> f64 {
    let mut s = CMatrix::zeros(n, n);
    for k in kraus {
        s += k.adjoint() * k;
    }
    frobenius(&(s - CMatrix::identity(n, n)))
}

/// `Σ_i K_i A K_i†` with no validation of the Kraus family.
pub fn apply_raw(kraus: &[ComplexMatrix], a: &CMatrix) -> CMatrix {
    let m = kraus.first().map_or(0, ComplexMatrix::nrows);
    let mut out = CMatrix::zeros(m, m);
    for k in kraus {
        let k = k.as_matrix();
        out += k * a * k.adjoint();
    }
    out
}

/// `Σ_i K_i† A K_i` with no validation of the Kraus family.
pub fn adjoint_apply_raw(kraus: &[ComplexMatrix], a: &CMatrix) -> CMatrix {
    let n = kraus.first().map_or(0, ComplexMatrix::ncols);
    let mut out = CMatrix::zeros(n, n);
    for k in kraus {
        let k = k.as_matrix();
        out += k.adjoint() * a * k;
    }
    out
}

fn choi(kraus: &[CMatrix], n: usize, m: usize) -> CMatrix {
    // C = Σ_ij |i⟩⟨j| ⊗ Λ(|i⟩⟨j|) = Σ_k vec(K_k) vec(K_k)† with row index (i, out)
    let mut c = CMatrix::zeros(n * m, n * m);
    for k in kraus {
        let v = CMatrix::from_fn(n * m, 1, |r, _| k[(r % m, r / m)]);
        c += &v * v.adjoint();
    }
    c
}

/// CPTP diagnostics for an arbitrary Kraus family (which need not be trace preserving).
pub fn verify_cptp(kraus: &[ComplexMatrix]) -> Result<CptpReport> {
    let kraus: Vec<CMatrix> = kraus.iter().map(|k| k.as_matrix().clone()).collect();
    let (m, n) = check_shapes(&kraus)?;
    let c = HermitianOperator::from_computed(&choi(&kraus, n, m));
    Ok(CptpReport {
        tp_error: tp_error(&kraus, n),
        choi_min_eig: c.spectral()?.raw_eigenvalues()[0],
    })
}

impl KrausChannel {
    pub fn new(kraus: Vec<ComplexMatrix>) -> Result<Self> {
        Self::with_tolerance(kraus, DEFAULT_TP_TOL)
    }

    pub fn with_tolerance(kraus: Vec<ComplexMatrix>, tp_tol: f64) -> Result<Self> {
        Self::from_matrices(kraus.into_iter().map(ComplexMatrix::into_matrix).collect(), tp_tol)
    }

    pub(crate) fn from_matrices(kraus: Vec<CMatrix>, tp_tol: f64) -> Result<Self> {
        let (m, n) = check_shapes(&kraus)?;
        let error = tp_error(&kraus, n);
        if !(error <= tp_tol) {
            return Err(Error::NotTracePreserving { error, tol: tp_tol });
        }
        Ok(Self {
            dim_in: n,
            dim_out: m,
            kraus,
            tp_tol,
        })
    }

    pub fn dim_in(&self) -> usize {
        self.dim_in
    }

    pub fn dim_out(&self) -> usize {
        self.dim_out
    }

    pub fn tp_tol(&self) -> f64 {
        self.tp_tol
    }

    pub fn kraus(&self) -> &[CMatrix] {
        &self.kraus
    }

    pub fn num_kraus(&self) -> usize {
        self.kraus.len()
    }

    /// `Λ(A) = Σ_i K_i A K_i†`.
    pub fn apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if a.dim() != self.dim_in {
            return Err(Error::dims(self.dim_in, a.dim()));
        }
        Ok(HermitianOperator::from_computed(&self.apply_matrix(a.matrix())))
    }

    /// `Λ*(A) = Σ_i K_i† A K_i`, the Hilbert–Schmidt adjoint.
    pub fn adjoint_apply(&self, a: &HermitianOperator) -> Result<HermitianOperator> {
        if a.dim() != self.dim_out {
            return Err(Error::dims(self.dim_out, a.dim()));
        }
        Ok(HermitianOperator::from_computed(&self.adjoint_apply_matrix(a.matrix())))
    }

    /// `Λ` on an arbitrary (not necessarily Hermitian) input.
    pub(crate) fn apply_matrix(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_out, self.dim_out);
        for k in &self.kraus {
            out += k * a * k.adjoint();
        }
        out
    }

    /// `Λ*` on an arbitrary (not necessarily Hermitian) input.
    pub(crate) fn adjoint_apply_matrix(&self, a: &CMatrix) -> CMatrix {
        let mut out = CMatrix::zeros(self.dim_in, self.dim_in);
        for k in &self.kraus {
            out += k.adjoint() * a * k;
        }
        out
    }

    pub fn choi_matrix(&self) -> HermitianOperator {
        HermitianOperator::from_computed(&choi(&self.kraus, self.dim_in, self.dim_out))
    }

    pub fn verify(&self) -> Result<CptpReport> {
        Ok(CptpReport {
            tp_error: tp_error(&self.kraus, self.dim_in),
            choi_min_eig: self.choi_matrix().spectral()?.raw_eigenvalues()[0],
        })
    }

    /// `self ∘ first`: apply `first`, then `self`.
    pub fn compose(&self, first: &KrausChannel) -> Result<KrausChannel> {
        if first.dim_out != self.dim_in {
            return Err(Error::dims(self.dim_in, first.dim_out));
        }
        let kraus = self
            .kraus
            .iter()
            .flat_map(|b| first.kraus.iter().map(move |a| b * a))
            .collect();
        Self::from_matrices(kraus, self.tp_tol + first.tp_tol)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            dim_in: n,
            dim_out: n,
            kraus: vec![CMatrix::identity(n, n)],
            tp_tol: DEFAULT_TP_TOL,
        }
    }

    /// `A ↦ U A U†`; `U` must be unitary to `1e-10` (Frobenius).
    pub fn unitary(u: &ComplexMatrix) -> Result<Self> {
        if !u.is_square() {
            return Err(Error::NotSquare {
                rows: u.nrows(),
                cols: u.ncols(),
            });
        }
        let n = u.nrows();
        let dev = frobenius(&(u.as_matrix().adjoint() * u.as_matrix() - CMatrix::identity(n, n)));
        if dev > 1e-10 {
            return Err(Error::InvalidParameter(format!("U is not unitary: ‖U†U − I‖_F = {dev:e}")));
        }
        Self::from_matrices(vec![u.as_matrix().clone()], DEFAULT_TP_TOL)
    }

    fn check_probability(p: f64) -> Result<()> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!("p must lie in [0, 1], got {p}")));
        }
        Ok(())
    }

    /// `A ↦ (1 − p) A + p tr(A) I / n`.
    pub fn depolarizing(n: usize, p: f64) -> Result<Self> {
        Self::check_probability(p)?;
        check_dim(n)?;
        let mut kraus = vec![CMatrix::identity(n, n) * Complex64::new((1.0 - p).sqrt(), 0.0)];
        let w = Complex64::new((p / n as f64).sqrt(), 0.0);
        if p > 0.0 {
            for i in 0..n {
                for j in 0..n {
                    let mut k = CMatrix::zeros(n, n);
                    k[(i, j)] = w;
                    kraus.push(k);
                }
            }
        }
        Self::from_matrices(kraus, DEFAULT_TP_TOL)
    }

    /// `A ↦ (1 − p) A + p Σ_i |i⟩⟨i| A |i⟩⟨i|` in the computational basis.
    pub fn dephasing(n: usize, p: f64) -> Result<Self> {
        Self::check_probability(p)?;
        check_dim(n)?;
        let mut kraus = vec![CMatrix::identity(n, n) * Complex64::new((1.0 - p).sqrt(), 0.0)];
        if p > 0.0 {
            for i in 0..n {
                let mut k = CMatrix::zeros(n, n);
                k[(i, i)] = Complex64::new(p.sqrt(), 0.0);
                kraus.push(k);
            }
        }
        Self::from_matrices(kraus, DEFAULT_TP_TOL)
    }

    /// Pinching in the computational basis: deletes every off-diagonal entry.
    pub fn pinching(n: usize) -> Result<Self> {
        Self::dephasing(n, 1.0)
    }

    /// Pinching onto the orthonormal basis given by the columns of `basis`.
    pub fn pinching_in_basis(basis: &ComplexMatrix) -> Result<Self> {
        Self::unitary(basis)?;
        let b = basis.as_matrix();
        let kraus = (0..b.ncols())
            .map(|c| {
                let v = b.column(c);
                v * v.adjoint()
            })
            .collect();
        Self::from_matrices(kraus, DEFAULT_TP_TOL)
    }

    /// Partial trace on `H_A ⊗ H_B`, keeping the named subsystem.
    pub fn partial_trace(n_a: usize, n_b: usize, keep: Subsystem) -> Result<Self> {
        check_dim(n_a)?;
        check_dim(n_b)?;
        let kraus = match keep {
            Subsystem::A => (0..n_b)
                .map(|k| {
                    let mut bra = CMatrix::zeros(1, n_b);
                    bra[(0, k)] = Complex64::new(1.0, 0.0);
                    CMatrix::identity(n_a, n_a).kronecker(&bra)
                })
                .collect(),
            Subsystem::B => (0..n_a)
                .map(|k| {
                    let mut bra = CMatrix::zeros(1, n_a);
                    bra[(0, k)] = Complex64::new(1.0, 0.0);
                    bra.kronecker(&CMatrix::identity(n_b, n_b))
                })
                .collect(),
        };
        Self::from_matrices(kraus, DEFAULT_TP_TOL)
    }

    /// `A ↦ Σ_i tr(E_i A) ω_i` for a POVM `{E_i}` and states `ω_i` (unit trace).
    pub fn measure_prepare(povm: &[HermitianOperator], states: &[HermitianOperator]) -> Result<Self> {
        if povm.is_empty() || povm.len() != states.len() {
            return Err(Error::InvalidParameter(format!(
                "need one prepared state per POVM element, got {} elements and {} states",
                povm.len(),
                states.len()
            )));
        }
        let n = povm[0].dim();
        let m = states[0].dim();
        let mut total = HermitianOperator::zeros(n);
        let mut kraus = Vec::new();
        for (i, (e, w)) in povm.iter().zip(states).enumerate() {
            if e.dim() != n {
                return Err(Error::dims(n, format!("{} for POVM element {i}", e.dim())));
            }
            if w.dim() != m {
                return Err(Error::dims(m, format!("{} for state {i}", w.dim())));
            }
            let e_psd = PsdOperator::new(e.clone())
                .map_err(|err| Error::InvalidParameter(format!("POVM element {i}: {err}")))?;
            let w_psd = PsdOperator::new(w.clone())
                .map_err(|err| Error::InvalidParameter(format!("prepared state {i}: {err}")))?;
            if (w.trace() - 1.0).abs() > 1e-10 {
                return Err(Error::InvalidParameter(format!(
                    "prepared state {i} has trace {}, expected 1",
                    w.trace()
                )));
            }
            total = &total + e;
            let sqrt_e = e_psd.power(0.5)?;
            let spec = w_psd.spectrum();
            for col in 0..m {
                let weight = spec.column_eigenvalue(col);
                if weight <= 0.0 {
                    continue;
                }
                let phi = spec.eigenvectors().column(col);
                for a in 0..n {
                    // √w |φ⟩⟨a| √E
                    let row = sqrt_e.matrix().row(a);
                    kraus.push(phi * row * Complex64::new(weight.sqrt(), 0.0));
                }
            }
        }
        let dev = total.distance(&HermitianOperator::identity(n));
        if dev > 1e-10 {
            return Err(Error::InvalidParameter(format!(
                "POVM elements sum to I only within {dev:e} (Frobenius)"
            )));
        }
        Self::from_matrices(kraus, 1e-9)
    }

    /// Random channel with `num_kraus` Kraus operators `G_i S^{-1/2}`, `S = Σ G_i† G_i`.
    pub fn random<R: Rng + ?Sized>(dim_in: usize, dim_out: usize, num_kraus: usize, rng: &mut R) -> Result<Self> {
        check_dim(dim_in)?;
        check_dim(dim_out)?;
        if num_kraus * dim_out < dim_in {
            return Err(Error::InvalidParameter(format!(
                "a trace-preserving map from dimension {dim_in} to {dim_out} needs at least {} Kraus operators, got {num_kraus}",
                dim_in.div_ceil(dim_out)
            )));
        }
        let gs: Vec<CMatrix> = (0..num_kraus).map(|_| ginibre(dim_out, dim_in, rng)).collect();
        let mut s = CMatrix::zeros(dim_in, dim_in);
        for g in &gs {
            s += g.adjoint() * g;
        }
        let s_inv_sqrt = HermitianOperator::from_computed(&s).apply(&Elementary::Power(-0.5))?;
        let kraus = gs.into_iter().map(|g| g * s_inv_sqrt.matrix()).collect();
        Self::from_matrices(kraus, 1e-9)
    }
}

fn check_dim(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::InvalidParameter("dimension must be positive".into()));
    }
    Ok(())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Subsystem {
    A,
    B,
}

/// Channel encoding: an explicit Kraus list or a named builder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ChannelJson {
    Builder(ChannelBuilder),
    Kraus(KrausJson),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KrausJson {
    pub dim_in: usize,
    pub dim_out: usize,
    pub kraus: Vec<MatrixJson>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum ChannelBuilder {
    Identity {
        dim: usize,
    },
    Unitary {
        matrix: MatrixJson,
    },
    Depolarizing {
        dim: usize,
        p: f64,
    },
    Dephasing {
        dim: usize,
        p: f64,
    },
    Pinching {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        dim: Option<usize>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        basis: Option<MatrixJson>,
    },
    PartialTrace {
        dim_a: usize,
        dim_b: usize,
        keep: Subsystem,
    },
    MeasurePrepare {
        povm: Vec<MatrixJson>,
        states: Vec<MatrixJson>,
    },
    Random {
        dim_in: usize,
        dim_out: usize,
        num_kraus: usize,
        seed: u64,
    },
}

impl ChannelJson {
    /// Parses a JSON value, reporting errors with `path` as the location prefix.
    pub fn from_value(value: &serde_json::Value, path: &str) -> Result<Self> {
        let is_builder = value.get("builder").is_some();
        let result = if is_builder {
            serde_path_to_error::deserialize::<_, ChannelBuilder>(value).map(ChannelJson::Builder)
        } else {
            serde_path_to_error::deserialize::<_, KrausJson>(value).map(ChannelJson::Kraus)
        };
        result.map_err(|e| {
            let inner = e.path().to_string();
            let location = if inner == "." { path.to_string() } else { format!("{path}.{inner}") };
            Error::schema(location, e.into_inner())
        })
    }

    /// Builds the channel; `seed_map` rewrites seeds of random builders.
    pub fn build(&self, path: &str, seed_map: &dyn Fn(u64) -> u64) -> Result<KrausChannel> {
        let wrap = |e: Error| match e {
            Error::Schema { .. } => e,
            other => Error::schema(path, other),
        };
        match self {
            ChannelJson::Kraus(k) => {
                let kraus = k
                    .kraus
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_complex_matrix(&format!("{path}.kraus[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let ch = KrausChannel::new(kraus).map_err(wrap)?;
                if ch.dim_in() != k.dim_in || ch.dim_out() != k.dim_out {
                    return Err(Error::schema(
                        path,
                        format!(
                            "declared {}→{} but Kraus operators are {}→{}",
                            k.dim_in,
                            k.dim_out,
                            ch.dim_in(),
                            ch.dim_out()
                        ),
                    ));
                }
                Ok(ch)
            }
            ChannelJson::Builder(b) => b.build(path, seed_map).map_err(wrap),
        }
    }
}

impl ChannelBuilder {
    fn build(&self, path: &str, seed_map: &dyn Fn(u64) -> u64) -> Result<KrausChannel> {
        match self {
            ChannelBuilder::Identity { dim } => {
                check_dim(*dim)?;
                Ok(KrausChannel::identity(*dim))
            }
            ChannelBuilder::Unitary { matrix } => {
                KrausChannel::unitary(&matrix.to_complex_matrix(&format!("{path}.matrix"))?)
            }
            ChannelBuilder::Depolarizing { dim, p } => KrausChannel::depolarizing(*dim, *p),
            ChannelBuilder::Dephasing { dim, p } => KrausChannel::dephasing(*dim, *p),
            ChannelBuilder::Pinching { dim, basis } => match (dim, basis) {
                (Some(n), None) => KrausChannel::pinching(*n),
                (_, Some(b)) => {
                    let b = b.to_complex_matrix(&format!("{path}.basis"))?;
                    if let Some(n) = dim {
                        if *n != b.nrows() {
                            return Err(Error::dims(n, b.nrows()));
                        }
                    }
                    KrausChannel::pinching_in_basis(&b)
                }
                (None, None) => Err(Error::InvalidParameter("pinching needs \"dim\" or \"basis\"".into())),
            },
            ChannelBuilder::PartialTrace { dim_a, dim_b, keep } => KrausChannel::partial_trace(*dim_a, *dim_b, *keep),
            ChannelBuilder::MeasurePrepare { povm, states } => {
                let povm = povm
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_hermitian(&format!("{path}.povm[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                let states = states
                    .iter()
                    .enumerate()
                    .map(|(i, m)| m.to_hermitian(&format!("{path}.states[{i}]")))
                    .collect::<Result<Vec<_>>>()?;
                KrausChannel::measure_prepare(&povm, &states)
            }
            ChannelBuilder::Random {
                dim_in,
                dim_out,
                num_kraus,
                seed,
            } => KrausChannel::random(*dim_in, *dim_out, *num_kraus, &mut seeded(seed_map(*seed))),
        }
    }
}

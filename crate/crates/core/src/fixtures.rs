//! Reproducible channel/state triples: structurally recoverable (saturating)
//! classes, their rank-deficient variants, and non-saturating references.

use rand::Rng;

use crate::channels::{KrausChannel, Subsystem};
use crate::divergences::{FFunction, MeasureSpec};
use crate::error::Result;
use crate::linalg::{kron, ComplexMatrix, HermitianOperator, PositiveOperator, PsdOperator, SpectralOperator};
use crate::random::{random_positive, random_psd, random_unitary};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FixtureClass {
    Unitary,
    PinchingDiagonal,
    PartialTraceProduct,
    MeasurePrepare,
}

impl FixtureClass {
    pub const ALL: [FixtureClass; 4] = [
        FixtureClass::Unitary,
        FixtureClass::PinchingDiagonal,
        FixtureClass::PartialTraceProduct,
        FixtureClass::MeasurePrepare,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FixtureClass::Unitary => "unitary",
            FixtureClass::PinchingDiagonal => "pinching_diagonal",
            FixtureClass::PartialTraceProduct => "partial_trace_product",
            FixtureClass::MeasurePrepare => "measure_prepare",
        }
    }
}

/// Full-rank pair with a channel.
#[derive(Clone, Debug)]
pub struct Fixture {
    pub name: String,
    pub channel: KrausChannel,
    pub rho: PositiveOperator,
    pub sigma: PositiveOperator,
}

/// Rank-deficient first argument with a full-rank second.
#[derive(Clone, Debug)]
pub struct BoundaryFixture {
    pub name: String,
    pub channel: KrausChannel,
    pub rho: PsdOperator,
    pub sigma: PositiveOperator,
}

/// Probability vector with entries proportional to draws from `[0.1, 1]`.
pub fn random_probabilities<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.random_range(0.1..1.0)).collect();
    let total: f64 = v.iter().sum();
    v.into_iter().map(|x| x / total).collect()
}

fn diagonal_state<R: Rng + ?Sized>(n: usize, rng: &mut R) -> PositiveOperator {
    PositiveOperator::diagonal(&random_probabilities(n, rng)).expect("probabilities are positive")
}

/// `n` prepared states on `C^{2n}`, the `i`-th a random full-rank state on
/// `span{|2i⟩, |2i+1⟩}`; their supports are mutually orthogonal.
fn orthogonal_block_states<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Vec<HermitianOperator> {
    (0..n)
        .map(|i| {
            let block = random_positive(2, rng);
            let mut m = crate::linalg::CMatrix::zeros(2 * n, 2 * n);
            m.view_mut((2 * i, 2 * i), (2, 2)).copy_from(block.operator().matrix());
            HermitianOperator::from_computed(&m)
        })
        .collect()
}

fn computational_povm(n: usize) -> Vec<HermitianOperator> {
    (0..n)
        .map(|i| {
            let mut d = vec![0.0; n];
            d[i] = 1.0;
            HermitianOperator::diagonal(&d)
        })
        .collect()
}

fn measure_prepare_channel<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<KrausChannel> {
    KrausChannel::measure_prepare(&computational_povm(n), &orthogonal_block_states(n, rng))
}

fn product(a: &HermitianOperator, b: &HermitianOperator) -> HermitianOperator {
    HermitianOperator::from_computed(&kron(a.matrix(), b.matrix()))
}

/// A saturating fixture of the given class; `n` is the input dimension, or the
/// dimension of the kept factor for the partial trace.
pub fn saturating<R: Rng + ?Sized>(class: FixtureClass, n: usize, rng: &mut R) -> Result<Fixture> {
    let (channel, rho, sigma) = match class {
        FixtureClass::Unitary => {
            let u = ComplexMatrix::from_raw(random_unitary(n, rng));
            (KrausChannel::unitary(&u)?, random_positive(n, rng), random_positive(n, rng))
        }
        FixtureClass::PinchingDiagonal => (KrausChannel::pinching(n)?, diagonal_state(n, rng), diagonal_state(n, rng)),
        FixtureClass::PartialTraceProduct => {
            let n_b = 2;
            let tau = random_positive(n_b, rng);
            let rho_a = random_positive(n, rng);
            let sigma_a = random_positive(n, rng);
            (
                KrausChannel::partial_trace(n, n_b, Subsystem::A)?,
                PositiveOperator::new(product(rho_a.operator(), tau.operator()))?,
                PositiveOperator::new(product(sigma_a.operator(), tau.operator()))?,
            )
        }
        FixtureClass::MeasurePrepare => (measure_prepare_channel(n, rng)?, diagonal_state(n, rng), diagonal_state(n, rng)),
    };
    Ok(Fixture {
        name: format!("{}(n={n})", class.name()),
        channel,
        rho,
        sigma,
    })
}

/// One fixture per class at each dimension in `dims`.
pub fn saturating_suite<R: Rng + ?Sized>(dims: &[usize], rng: &mut R) -> Result<Vec<Fixture>> {
    let mut out = Vec::new();
    for &n in dims {
        for class in FixtureClass::ALL {
            out.push(saturating(class, n, rng)?);
        }
    }
    Ok(out)
}

/// Rank-`n − k` variant of a saturating class. The channel images of `sigma`
/// stay strictly positive.
pub fn saturating_boundary<R: Rng + ?Sized>(
    class: FixtureClass,
    n: usize,
    k: usize,
    rng: &mut R,
) -> Result<BoundaryFixture> {
    assert!(k < n, "kernel dimension {k} must be below {n}");
    let diag_deficient = |rng: &mut R| {
        let mut p = random_probabilities(n - k, rng);
        p.resize(n, 0.0);
        PsdOperator::diagonal(&p).expect("probabilities are non-negative")
    };
    let (channel, rho, sigma) = match class {
        FixtureClass::Unitary => {
            let u = ComplexMatrix::from_raw(random_unitary(n, rng));
            (KrausChannel::unitary(&u)?, random_psd(n, n - k, rng), random_positive(n, rng))
        }
        FixtureClass::PinchingDiagonal => (KrausChannel::pinching(n)?, diag_deficient(rng), diagonal_state(n, rng)),
        FixtureClass::PartialTraceProduct => {
            let n_b = 2;
            let tau = random_positive(n_b, rng);
            let rho_a = random_psd(n, n - k, rng);
            let sigma_a = random_positive(n, rng);
            (
                KrausChannel::partial_trace(n, n_b, Subsystem::A)?,
                PsdOperator::new(product(rho_a.operator(), tau.operator()))?,
                PositiveOperator::new(product(sigma_a.operator(), tau.operator()))?,
            )
        }
        FixtureClass::MeasurePrepare => (measure_prepare_channel(n, rng)?, diag_deficient(rng), diagonal_state(n, rng)),
    };
    Ok(BoundaryFixture {
        name: format!("{}(n={n}, k={k})", class.name()),
        channel,
        rho,
        sigma,
    })
}

/// `depolarizing(2, 0.5)` with `ρ = diag(0.9, 0.1)` and `σ = I/2`; the relative
/// entropy gap is `(0.9 ln 1.8 + 0.1 ln 0.2) − (0.7 ln 1.4 + 0.3 ln 0.6)`.
pub fn depolarizing_reference() -> Fixture {
    Fixture {
        name: "depolarizing(2, 0.5)".into(),
        channel: KrausChannel::depolarizing(2, 0.5).expect("valid depolarizing parameters"),
        rho: PositiveOperator::diagonal(&[0.9, 0.1]).expect("positive"),
        sigma: PositiveOperator::diagonal(&[0.5, 0.5]).expect("positive"),
    }
}

/// Random channel (dimension `n` to `m`) with random full-rank states. The
/// Kraus count is large enough for trace preservation and full-rank images.
pub fn random_generic<R: Rng + ?Sized>(n: usize, m: usize, rng: &mut R) -> Result<Fixture> {
    let min = n.div_ceil(m).max(m.div_ceil(n));
    let num_kraus = rng.random_range(min..=min + 2);
    Ok(Fixture {
        name: format!("random({n}->{m}, {num_kraus} kraus)"),
        channel: KrausChannel::random(n, m, num_kraus, rng)?,
        rho: random_positive(n, rng),
        sigma: random_positive(n, rng),
    })
}

/// Mixture of `a` and `b` with weight `t` on `b`.
pub fn mix(a: &PositiveOperator, b: &PositiveOperator, t: f64) -> Result<PositiveOperator> {
    PositiveOperator::new(&a.operator().scale(1.0 - t) + &b.operator().scale(t))
}

/// A fixed set of measures covering every family, with parameters inside the
/// data-processing regions.
pub fn representative_measures() -> Vec<MeasureSpec> {
    let ok = |m: Result<MeasureSpec>| m.expect("parameters are inside the DPI region");
    vec![
        MeasureSpec::relative_entropy(),
        MeasureSpec::fidelity(),
        ok(MeasureSpec::sandwiched_renyi(0.75)),
        ok(MeasureSpec::sandwiched_renyi(2.0)),
        ok(MeasureSpec::alpha_z(0.6, 0.8)),
        ok(MeasureSpec::alpha_z(1.5, 1.2)),
        ok(MeasureSpec::alpha_z(3.0, 2.5)),
        ok(MeasureSpec::f_divergence(FFunction::XLogX)),
        ok(MeasureSpec::f_divergence(FFunction::NegLog)),
        ok(MeasureSpec::f_divergence(FFunction::Power(0.5))),
        ok(MeasureSpec::f_divergence(FFunction::Power(1.5))),
        ok(MeasureSpec::f_divergence(FFunction::SquaredDeviation)),
    ]
}

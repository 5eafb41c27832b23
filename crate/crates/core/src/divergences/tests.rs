use super::*;
use crate::calculus::{numeric_gradient, numeric_gradient_with, FdOptions, FdScheme};
use crate::linalg::hs_inner;
use crate::random::{random_hermitian, random_positive, seeded};

fn diag(v: &[f64]) -> PositiveOperator {
    PositiveOperator::diagonal(v).unwrap()
}

fn rel(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.distance(b) / b.frobenius_norm()
}

fn fd_grad1(m: &MeasureSpec, rho: &PositiveOperator, sigma: &PositiveOperator) -> HermitianOperator {
    numeric_gradient(&|r: &HermitianOperator| evaluate(m, &PositiveOperator::new(r.clone())?, sigma), rho.operator()).unwrap()
}

fn fd_grad2(m: &MeasureSpec, rho: &PositiveOperator, sigma: &PositiveOperator) -> HermitianOperator {
    numeric_gradient(&|s: &HermitianOperator| evaluate(m, rho, &PositiveOperator::new(s.clone())?), sigma.operator()).unwrap()
}

#[test]
fn relative_entropy_values() {
    let mut rng = seeded(1);
    let rho = random_positive(3, &mut rng).scaled(2.7).unwrap();
    assert!(evaluate(&MeasureSpec::relative_entropy(), &rho, &rho).unwrap().abs() < 1e-13);
    let d = evaluate(&MeasureSpec::relative_entropy(), &diag(&[0.5, 0.5]), &diag(&[0.75, 0.25])).unwrap();
    // classical KL: 0.5 ln(0.5/0.75) + 0.5 ln(0.5/0.25)
    let kl = 0.5 * (0.5f64 / 0.75).ln() + 0.5 * (0.5f64 / 0.25).ln();
    assert!((d - kl).abs() < 1e-14);
    assert!((d - 0.5 * (4.0f64 / 3.0).ln()).abs() < 1e-14);
}

#[test]
fn fidelity_value_is_bhattacharyya() {
    let f = evaluate(&MeasureSpec::fidelity(), &diag(&[0.5, 0.5]), &diag(&[0.75, 0.25])).unwrap();
    assert!((f - (0.375f64.sqrt() + 0.125f64.sqrt())).abs() < 1e-14);
    assert!((f - 0.96593).abs() < 1e-5);
}

#[test]
fn sandwiched_renyi_two_commuting() {
    let m = MeasureSpec::sandwiched_renyi(2.0).unwrap();
    let d = evaluate(&m, &diag(&[0.5, 0.5]), &diag(&[0.75, 0.25])).unwrap();
    assert!((d - (0.25f64 / 0.75 + 0.25 / 0.25).ln()).abs() < 1e-14);
}

#[test]
fn f_divergence_x_log_x_is_relative_entropy() {
    let mut rng = seeded(2);
    let rho = random_positive(4, &mut rng);
    let sigma = random_positive(4, &mut rng);
    let f = evaluate(&MeasureSpec::f_divergence(FFunction::XLogX).unwrap(), &rho, &sigma).unwrap();
    let d = evaluate(&MeasureSpec::relative_entropy(), &rho, &sigma).unwrap();
    assert!((f - d).abs() < 1e-10);
}

#[test]
fn f_divergence_power_is_petz_trace() {
    let mut rng = seeded(3);
    let rho = random_positive(3, &mut rng);
    let sigma = random_positive(3, &mut rng);
    for a in [0.3, 1.5] {
        let f = evaluate(&MeasureSpec::f_divergence(FFunction::Power(a)).unwrap(), &rho, &sigma).unwrap();
        let petz = rho.power(a).unwrap().trace_with(&sigma.power(1.0 - a).unwrap());
        assert!((f - petz).abs() < 1e-10);
    }
}

#[test]
fn commuting_states_reduce_to_classical_formulas() {
    let p = [0.5, 0.3, 0.2];
    let q = [0.2, 0.2, 0.6];
    let (rho, sigma) = (diag(&p), diag(&q));
    let classical = |g: &dyn Fn(f64, f64) -> f64| p.iter().zip(&q).map(|(&a, &b)| g(a, b)).sum::<f64>();
    let kl = classical(&|a, b| a * (a / b).ln());
    assert!((evaluate(&MeasureSpec::relative_entropy(), &rho, &sigma).unwrap() - kl).abs() < 1e-10);
    let bc = classical(&|a, b| (a * b).sqrt());
    assert!((evaluate(&MeasureSpec::fidelity(), &rho, &sigma).unwrap() - bc).abs() < 1e-10);
    for (alpha, z) in [(0.7, 0.9), (1.5, 1.2), (3.0, 2.5)] {
        let renyi = classical(&|a, b| a.powf(alpha) * b.powf(1.0 - alpha)).ln() / (alpha - 1.0);
        let m = MeasureSpec::alpha_z(alpha, z).unwrap();
        assert!((evaluate(&m, &rho, &sigma).unwrap() - renyi).abs() < 1e-10);
    }
}

#[test]
fn relative_entropy_gradients_at_equal_states() {
    let mut rng = seeded(4);
    let rho = random_positive(3, &mut rng);
    let g = grad1(&MeasureSpec::relative_entropy(), &rho, &rho).unwrap();
    assert!(g.op.distance(&HermitianOperator::identity(3)) < 1e-12);
    let d = diag(&[0.6, 0.3, 0.1]);
    let g2 = grad2(&MeasureSpec::relative_entropy(), &d, &d).unwrap();
    assert!(g2.op.distance(&HermitianOperator::identity(3).scale(-1.0)) < 1e-12);
}

#[test]
fn fidelity_gradient_at_equal_states_and_symmetry() {
    let mut rng = seeded(5);
    let rho = random_positive(3, &mut rng);
    let g = grad1(&MeasureSpec::fidelity(), &rho, &rho).unwrap();
    assert!(g.op.distance(&HermitianOperator::identity(3).scale(0.5)) < 1e-10);
    let sigma = random_positive(3, &mut rng);
    let g2 = grad2(&MeasureSpec::fidelity(), &rho, &sigma).unwrap();
    let swapped = grad1(&MeasureSpec::fidelity(), &sigma, &rho).unwrap();
    assert_eq!(g2.op, swapped.op);
}

#[test]
fn closed_forms_match_finite_differences() {
    let mut rng = seeded(6);
    let measures = [
        MeasureSpec::relative_entropy(),
        MeasureSpec::fidelity(),
        MeasureSpec::sandwiched_renyi(2.0).unwrap(),
        MeasureSpec::sandwiched_renyi(0.75).unwrap(),
        MeasureSpec::alpha_z(1.5, 1.5).unwrap(),
        MeasureSpec::alpha_z(0.6, 0.8).unwrap(),
        MeasureSpec::alpha_z(3.0, 2.5).unwrap(),
        MeasureSpec::f_divergence(FFunction::XLogX).unwrap(),
        MeasureSpec::f_divergence(FFunction::Power(0.5)).unwrap(),
        MeasureSpec::f_divergence(FFunction::NegLog).unwrap(),
        MeasureSpec::f_divergence(FFunction::SquaredDeviation).unwrap(),
    ];
    for m in &measures {
        let rho = random_positive(3, &mut rng);
        let sigma = random_positive(3, &mut rng);
        let g1 = grad1(m, &rho, &sigma).unwrap();
        assert!(rel(&g1.op, &fd_grad1(m, &rho, &sigma)) < 1e-5, "grad1 {m}");
        let g2 = grad2(m, &rho, &sigma).unwrap();
        assert!(rel(&g2.op, &fd_grad2(m, &rho, &sigma)) < 1e-5, "grad2 {m}");
        assert_eq!(g2.method, GradientMethod::ClosedForm);
    }
}

#[test]
fn f_divergence_grad2_matches_richardson_tightly() {
    let mut rng = seeded(61);
    let options = FdOptions {
        scheme: FdScheme::Richardson,
        step: Some(2e-4),
        ..FdOptions::default()
    };
    for f in [FFunction::XLogX, FFunction::Power(1.5), FFunction::SquaredDeviation] {
        let m = MeasureSpec::f_divergence(f).unwrap();
        let rho = random_positive(4, &mut rng);
        let sigma = random_positive(4, &mut rng);
        let map = |s: &HermitianOperator| evaluate(&m, &rho, &PositiveOperator::new(s.clone())?);
        let fd = numeric_gradient_with(&map, sigma.operator(), &options).unwrap();
        let e = rel(&grad2(&m, &rho, &sigma).unwrap().op, &fd);
        assert!(e < 1e-8, "{m}: {e}");
    }
}

#[test]
fn sandwiched_equals_alpha_z_on_the_diagonal() {
    let mut rng = seeded(7);
    for alpha in [0.5, 0.8, 1.7, 2.0, 4.0] {
        let rho = random_positive(3, &mut rng);
        let sigma = random_positive(3, &mut rng);
        let s = MeasureSpec::sandwiched_renyi(alpha).unwrap();
        let az = MeasureSpec::alpha_z(alpha, alpha).unwrap();
        assert!((evaluate(&s, &rho, &sigma).unwrap() - evaluate(&az, &rho, &sigma).unwrap()).abs() < 1e-10);
        let g = grad1(&s, &rho, &sigma).unwrap().op;
        let h = grad1(&az, &rho, &sigma).unwrap().op;
        assert!(g.distance(&h) < 1e-10);
    }
}

#[test]
fn relative_entropy_gradient_pairs_with_directional_derivative() {
    let mut rng = seeded(8);
    let rho = random_positive(3, &mut rng);
    let sigma = random_positive(3, &mut rng);
    let m = random_hermitian(3, &mut rng);
    let spec = MeasureSpec::relative_entropy();
    let g = grad1(&spec, &rho, &sigma).unwrap().op;
    let h = 1e-5;
    let plus = PositiveOperator::new(rho.operator() + &m.scale(h)).unwrap();
    let minus = PositiveOperator::new(rho.operator() - &m.scale(h)).unwrap();
    let fd = (evaluate(&spec, &plus, &sigma).unwrap() - evaluate(&spec, &minus, &sigma).unwrap()) / (2.0 * h);
    assert!((hs_inner(&g, &m).unwrap() - fd).abs() < 1e-5 * fd.abs().max(1.0));
}

#[test]
fn scaling_law_examples() {
    let mut rng = seeded(9);
    let rho = random_positive(3, &mut rng);
    let sigma = random_positive(3, &mut rng);
    let m = MeasureSpec::alpha_z(2.0, 2.0).unwrap();
    let s = scaling_check(&m, &rho, &sigma, 1.0, 1.0).unwrap();
    assert_eq!(s.lhs, s.rhs);
    let s = scaling_check(&m, &rho, &sigma, 2.0, 1.0).unwrap();
    assert!(s.discrepancy() < 1e-10);
    let m = MeasureSpec::alpha_z(0.7, 0.9).unwrap();
    let s = scaling_check(&m, &rho, &sigma, 0.5, 3.0).unwrap();
    assert!(s.discrepancy() < 1e-10);
    assert!(matches!(
        scaling_check(&MeasureSpec::fidelity(), &rho, &sigma, 2.0, 1.0),
        Err(Error::Unsupported { .. })
    ));
}

#[test]
fn psd_first_argument() {
    let rho = PsdOperator::diagonal(&[0.7, 0.3, 0.0]).unwrap();
    let sigma = diag(&[0.5, 0.3, 0.2]);
    let d = evaluate_psd(&MeasureSpec::relative_entropy(), &rho, &sigma).unwrap();
    let kl = 0.7 * (0.7f64 / 0.5).ln() + 0.3 * (0.3f64 / 0.3).ln();
    assert!((d - kl).abs() < 1e-14);
    assert!(evaluate_psd(&MeasureSpec::f_divergence(FFunction::NegLog).unwrap(), &rho, &sigma).is_err());
}

#[test]
fn dimension_mismatch_is_reported() {
    let r = evaluate(&MeasureSpec::relative_entropy(), &diag(&[0.5, 0.5]), &diag(&[0.2, 0.3, 0.5]));
    assert!(matches!(r, Err(Error::DimensionMismatch { .. })));
}

//! Acceptance suite. Each criterion prints one PASS/FAIL line; the process
//! exits non-zero if any criterion fails.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::{Duration, Instant};

use dpisat_core::calculus::{finite_difference_frechet, frechet_derivative, numeric_gradient, ScalarFunctionPair};
use dpisat_core::channels::{KrausChannel, Subsystem};
use dpisat_core::divergences::{
    alpha_z_in_dpi_region, evaluate, grad1, grad2, scaling_check, FFunction, MeasureSpec,
};
use dpisat_core::fixtures::{
    depolarizing_reference, random_generic, representative_measures, saturating, saturating_boundary,
    saturating_suite, Fixture, FixtureClass,
};
use dpisat_core::linalg::{ComplexMatrix, Elementary, HermitianOperator, PositiveOperator, SpectralOperator};
use dpisat_core::random::{random_hermitian, random_positive, random_psd, random_unitary, seeded, SplitMix64};
use dpisat_core::saturation::{
    alpha2_petz_residual, boundary_residual_general, boundary_residual_relent, converse_certificate, dpi_gap,
    hiai_residual, petz_recovery_errors, residual1, residual2, tangent_dimension, Tolerances,
};
use rand::Rng;
use serde_json::{json, Value};

type Outcome = Result<String, String>;
type Criterion = fn() -> Outcome;

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        if !$cond {
            return Err(format!($($fmt)+));
        }
    };
}

fn ok<T, E: std::fmt::Display>(r: Result<T, E>, what: &str) -> Result<T, String> {
    r.map_err(|e| format!("{what}: {e}"))
}

fn within(elapsed: Duration, limit_secs: u64) -> Result<(), String> {
    if elapsed > Duration::from_secs(limit_secs) {
        Err(format!("runtime {:.1}s exceeds {limit_secs}s", elapsed.as_secs_f64()))
    } else {
        Ok(())
    }
}

fn rel_error(a: &HermitianOperator, b: &HermitianOperator) -> f64 {
    a.distance(b) / b.frobenius_norm().max(1e-300)
}

fn unit_direction(n: usize, rng: &mut SplitMix64) -> HermitianOperator {
    let m = random_hermitian(n, rng);
    let norm = m.frobenius_norm();
    m.scale(1.0 / norm)
}

/// A measure of the given family with parameters drawn inside its data-processing region.
fn random_measure(family: usize, rng: &mut SplitMix64) -> MeasureSpec {
    match family {
        0 => MeasureSpec::relative_entropy(),
        1 => MeasureSpec::fidelity(),
        2 => loop {
            let alpha = rng.random_range(0.5..3.5);
            if (alpha - 1.0f64).abs() > 0.05 {
                break MeasureSpec::sandwiched_renyi(alpha).unwrap();
            }
        },
        3 => loop {
            let alpha = rng.random_range(0.1..3.5);
            let z = rng.random_range(0.1..3.5);
            if (alpha - 1.0f64).abs() > 0.05 && alpha_z_in_dpi_region(alpha, z) {
                break MeasureSpec::alpha_z(alpha, z).unwrap();
            }
        },
        _ => {
            let f = match rng.random_range(0..4) {
                0 => FFunction::XLogX,
                1 => FFunction::NegLog,
                2 => FFunction::SquaredDeviation,
                _ => {
                    if rng.random_bool(0.5) {
                        FFunction::Power(rng.random_range(0.05..0.95))
                    } else {
                        FFunction::Power(rng.random_range(1.05..2.0))
                    }
                }
            };
            MeasureSpec::f_divergence(f).unwrap()
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let functions = [
        ("log", Elementary::Log),
        ("exp", Elementary::Exp),
        ("x^0.5", Elementary::Power(0.5)),
        ("x^1.7", Elementary::Power(1.7)),
        ("x log x", Elementary::XLogX),
    ];
    let mut rng = seeded(101);
    let mut worst = 0.0f64;
    let mut count = 0;
    for (name, f) in functions {
        let pair = ScalarFunctionPair::from_elementary(f);
        for n in 2..=6 {
            for _ in 0..50 {
                let a = random_positive(n, &mut rng);
                let m = unit_direction(n, &mut rng);
                let formula = ok(frechet_derivative(a.operator(), &m, &pair), name)?;
                // Central differences with a step well inside the positive cone.
                let h = 1e-3 * a.min_eigenvalue();
                let fd = ok(finite_difference_frechet(a.operator(), &m, &f, h), name)?;
                let err = rel_error(&formula, &fd);
                ensure!(err <= 1e-5, "{name}, n={n}: relative error {err:e}");
                worst = worst.max(err);
                count += 1;
            }
        }
    }
    within(start.elapsed(), 10)?;
    Ok(format!("{count} cases, worst relative error {worst:.2e}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let names = ["relative_entropy", "fidelity", "sandwiched_renyi", "alpha_z", "f_divergence"];
    let mut rng = seeded(202);
    let mut worst = 0.0f64;
    for (family, name) in names.iter().enumerate() {
        for i in 0..50 {
            let n = 2 + i % 3;
            let m = random_measure(family, &mut rng);
            let rho = random_positive(n, &mut rng);
            let sigma = random_positive(n, &mut rng);
            let g1 = ok(grad1(&m, &rho, &sigma), name)?.op;
            let f1 = |r: &HermitianOperator| evaluate(&m, &PositiveOperator::new(r.clone())?, &sigma);
            let fd1 = ok(numeric_gradient(&f1, rho.operator()), name)?;
            let e1 = rel_error(&g1, &fd1);
            let g2 = ok(grad2(&m, &rho, &sigma), name)?.op;
            let f2 = |s: &HermitianOperator| evaluate(&m, &rho, &PositiveOperator::new(s.clone())?);
            let fd2 = ok(numeric_gradient(&f2, sigma.operator()), name)?;
            let e2 = rel_error(&g2, &fd2);
            ensure!(e1 <= 1e-5 && e2 <= 1e-5, "{m}, n={n}: grad1 {e1:e}, grad2 {e2:e}");
            worst = worst.max(e1).max(e2);
        }
    }
    within(start.elapsed(), 60)?;
    Ok(format!(
        "5 families x 50 pairs, worst relative error {worst:.2e}, {:.2}s",
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_3() -> Outcome {
    let start = Instant::now();
    let suite = ok(saturating_suite(&[2, 3], &mut seeded(303)), "fixtures")?;
    let measures = representative_measures();
    let mut worst = 0.0f64;
    for f in &suite {
        for m in &measures {
            let gap = ok(dpi_gap(m, &f.channel, &f.rho, &f.sigma), &f.name)?;
            let r1 = ok(residual1(m, &f.channel, &f.rho, &f.sigma), &f.name)?.frobenius;
            let (r2, _) = ok(residual2(m, &f.channel, &f.rho, &f.sigma), &f.name)?;
            ensure!(
                gap.abs() <= 1e-8 && r1 <= 1e-8 && r2.frobenius <= 1e-8,
                "{} / {m}: gap {gap:e}, residual1 {r1:e}, residual2 {:e}",
                f.name,
                r2.frobenius
            );
            worst = worst.max(gap.abs()).max(r1).max(r2.frobenius);
        }
    }
    within(start.elapsed(), 30)?;
    Ok(format!(
        "{} fixtures x {} measures, worst {worst:.2e}, {:.2}s",
        suite.len(),
        measures.len(),
        start.elapsed().as_secs_f64()
    ))
}

fn criterion_4() -> Outcome {
    let mut rng = seeded(404);
    let mut worst = 0.0f64;
    for i in 0..20 {
        let k = rng.random_range(0.1..10.0);
        let kp = rng.random_range(0.1..10.0);
        let m = if i % 2 == 0 { random_measure(3, &mut rng) } else { random_measure(2, &mut rng) };
        let rho = random_positive(3, &mut rng);
        let sigma = random_positive(3, &mut rng);
        let s = ok(scaling_check(&m, &rho, &sigma, k, kp), "scaling")?;
        ensure!(s.discrepancy() <= 1e-10, "{m}, k={k}, k'={kp}: discrepancy {:e}", s.discrepancy());
        worst = worst.max(s.discrepancy());
    }

    let mut fixtures = ok(saturating_suite(&[2, 3], &mut rng), "fixtures")?;
    fixtures.push(depolarizing_reference());
    for _ in 0..8 {
        fixtures.push(ok(random_generic(3, 2, &mut rng), "fixtures")?);
    }
    let tol = Tolerances::default();
    let (mut implied, mut total) = (0, 0);
    for f in &fixtures {
        for m in representative_measures().iter().filter(|m| m.has_scaling_law()) {
            let c = ok(converse_certificate(m, &f.channel, &f.rho, &f.sigma, &tol), &f.name)?;
            total += 1;
            if c.residual1_norm <= 1e-8 {
                implied += 1;
                ensure!(c.gap.abs() <= 1e-8, "{} / {m}: residual1 {:e} but gap {:e}", f.name, c.residual1_norm, c.gap);
            }
        }
    }
    ensure!(implied > 0, "no fixture had a vanishing residual");
    Ok(format!(
        "scaling worst {worst:.2e}; {implied}/{total} (fixture, measure) pairs with vanishing residual all have zero gap"
    ))
}

fn criterion_5() -> Outcome {
    let f = depolarizing_reference();
    let m = MeasureSpec::relative_entropy();
    let gap = ok(dpi_gap(&m, &f.channel, &f.rho, &f.sigma), "gap")?;
    let kl = |p: [f64; 2], q: [f64; 2]| p[0] * (p[0] / q[0]).ln() + p[1] * (p[1] / q[1]).ln();
    let expected = kl([0.9, 0.1], [0.5, 0.5]) - kl([0.7, 0.3], [0.5, 0.5]);
    let r1 = ok(residual1(&m, &f.channel, &f.rho, &f.sigma), "residual1")?.frobenius;
    ensure!((gap - expected).abs() <= 1e-6, "gap {gap} vs {expected}");
    ensure!((gap - 0.286).abs() < 5e-4, "gap {gap} is not about 0.286");
    ensure!(r1 > 1e-3, "residual1 {r1:e} too small");
    Ok(format!("gap {gap:.9} (classical {expected:.9}), residual1 {r1:.3e}"))
}

fn criterion_6() -> Outcome {
    let mut rng = seeded(606);
    let saturating_set = ok(saturating_suite(&[2, 3, 4], &mut rng), "fixtures")?;
    let mut others = vec![depolarizing_reference()];
    for (n, m) in [(2, 2), (3, 2), (3, 3), (4, 2), (2, 3)] {
        others.push(ok(random_generic(n, m, &mut rng), "fixtures")?);
    }
    let (mut worst_sigma, mut worst_rho) = (0.0f64, 0.0f64);
    let classify = |f: &Fixture| -> Result<(f64, f64, f64), String> {
        let e = ok(petz_recovery_errors(&f.channel, f.rho.operator(), &f.sigma), &f.name)?;
        let a2 = ok(alpha2_petz_residual(&f.channel, &f.rho, &f.sigma), &f.name)?.frobenius_norm();
        Ok((e.sigma_error, e.rho_error, a2))
    };
    for f in &saturating_set {
        let (s, r, a2) = classify(f)?;
        ensure!(s <= 1e-9, "{}: sigma recovery error {s:e}", f.name);
        ensure!(r <= 1e-7, "{}: rho recovery error {r:e}", f.name);
        ensure!(a2 <= 1e-8, "{}: alpha=2 residual {a2:e} on a recoverable fixture", f.name);
        worst_sigma = worst_sigma.max(s);
        worst_rho = worst_rho.max(r);
    }
    for f in &others {
        let (s, r, a2) = classify(f)?;
        ensure!(s <= 1e-9, "{}: sigma recovery error {s:e}", f.name);
        ensure!(
            (a2 <= 1e-8) == (r <= 1e-7),
            "{}: alpha=2 residual {a2:e} and rho recovery error {r:e} disagree",
            f.name
        );
        worst_sigma = worst_sigma.max(s);
    }
    Ok(format!(
        "{} recoverable + {} generic fixtures; worst sigma error {worst_sigma:.2e}, worst rho error {worst_rho:.2e}",
        saturating_set.len(),
        others.len()
    ))
}

fn criterion_7() -> Outcome {
    let mut rng = seeded(707);
    for n in [3, 4] {
        for k in [1, 2] {
            let rho = random_psd(n, n - k, &mut rng);
            let d = tangent_dimension(&rho);
            ensure!(d == n * n - k * k, "n={n}, k={k}: tangent dimension {d}");
        }
    }
    let mut worst = 0.0f64;
    let mut count = 0;
    for class in FixtureClass::ALL {
        for n in [3, 4] {
            for k in [1, 2] {
                let f = ok(saturating_boundary(class, n, k, &mut rng), "fixture")?;
                let z = ok(boundary_residual_relent(&f.channel, &f.rho, &f.sigma), &f.name)?.frobenius;
                let h = ok(hiai_residual(&f.channel, &f.rho, &f.sigma), &f.name)?.frobenius;
                ensure!(z <= 1e-8 && h <= 1e-8, "{}: relative-entropy residual {z:e}, Hiai residual {h:e}", f.name);
                worst = worst.max(z).max(h);
                count += 1;
            }
        }
    }
    let mut fulls = ok(saturating_suite(&[2, 3], &mut rng), "fixtures")?;
    fulls.push(depolarizing_reference());
    fulls.push(ok(random_generic(3, 2, &mut rng), "fixtures")?);
    let mut worst_full = 0.0f64;
    for f in &fulls {
        let psd = f.rho.to_psd();
        for m in representative_measures() {
            let (g, _) = ok(boundary_residual_general(&m, &f.channel, &psd, &f.sigma), &f.name)?;
            let r = ok(residual1(&m, &f.channel, &f.rho, &f.sigma), &f.name)?;
            let d = g.op.distance(&r.op);
            ensure!(d <= 1e-9, "{} / {m}: general boundary residual differs from residual1 by {d:e}", f.name);
            worst_full = worst_full.max(d);
        }
    }
    Ok(format!(
        "tangent dimensions ok; {count} rank-deficient fixtures, worst residual {worst:.2e}; full-rank agreement {worst_full:.2e}"
    ))
}

fn criterion_8() -> Outcome {
    let mut rng = seeded(808);
    let (mut worst_v, mut worst_g) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let alpha = loop {
            let a = rng.random_range(0.5..4.0);
            if (a - 1.0f64).abs() > 0.05 {
                break a;
            }
        };
        let n = rng.random_range(2..=4);
        let rho = random_positive(n, &mut rng);
        let sigma = random_positive(n, &mut rng);
        let sr = MeasureSpec::sandwiched_renyi(alpha).unwrap();
        let az = MeasureSpec::alpha_z(alpha, alpha).unwrap();
        let dv = (ok(evaluate(&sr, &rho, &sigma), "sr")? - ok(evaluate(&az, &rho, &sigma), "az")?).abs();
        let dg = ok(grad1(&sr, &rho, &sigma), "sr")?.op.distance(&ok(grad1(&az, &rho, &sigma), "az")?.op);
        ensure!(dv <= 1e-10 && dg <= 1e-10, "alpha={alpha}, n={n}: value {dv:e}, grad1 {dg:e}");
        worst_v = worst_v.max(dv);
        worst_g = worst_g.max(dg);
    }
    let xlogx = MeasureSpec::f_divergence(FFunction::XLogX).unwrap();
    let relent = MeasureSpec::relative_entropy();
    let mut worst_f = 0.0f64;
    for _ in 0..20 {
        let n = rng.random_range(2..=4);
        let rho = random_positive(n, &mut rng);
        let sigma = random_positive(n, &mut rng);
        let d = (ok(evaluate(&xlogx, &rho, &sigma), "f")? - ok(evaluate(&relent, &rho, &sigma), "relent")?).abs();
        ensure!(d <= 1e-10, "n={n}: x log x vs relative entropy {d:e}");
        worst_f = worst_f.max(d);
    }
    Ok(format!(
        "alpha-z vs sandwiched: value {worst_v:.2e}, grad1 {worst_g:.2e}; x log x vs relative entropy {worst_f:.2e}"
    ))
}

fn random_channel_fixture(rng: &mut SplitMix64) -> Result<Fixture, String> {
    let kind = rng.random_range(0..6);
    let f = match kind {
        0 => ok(random_generic(rng.random_range(2..=3), rng.random_range(2..=3), rng), "random")?,
        1 => {
            let n = rng.random_range(2..=3);
            Fixture {
                name: "depolarizing".into(),
                channel: ok(KrausChannel::depolarizing(n, rng.random_range(0.05..1.0)), "depolarizing")?,
                rho: random_positive(n, rng),
                sigma: random_positive(n, rng),
            }
        }
        2 => {
            let n = rng.random_range(2..=3);
            Fixture {
                name: "dephasing".into(),
                channel: ok(KrausChannel::dephasing(n, rng.random_range(0.0..1.0)), "dephasing")?,
                rho: random_positive(n, rng),
                sigma: random_positive(n, rng),
            }
        }
        3 => {
            let n = 2;
            Fixture {
                name: "partial trace".into(),
                channel: ok(KrausChannel::partial_trace(n, 2, Subsystem::B), "partial trace")?,
                rho: random_positive(n * 2, rng),
                sigma: random_positive(n * 2, rng),
            }
        }
        4 => {
            let n = rng.random_range(2..=3);
            let u = ok(ComplexMatrix::new(random_unitary(n, rng)), "unitary")?;
            let ch = ok(KrausChannel::pinching(n), "pinching")?;
            let ch = ok(ch.compose(&ok(KrausChannel::unitary(&u), "unitary")?), "compose")?;
            Fixture {
                name: "rotated pinching".into(),
                channel: ch,
                rho: random_positive(n, rng),
                sigma: random_positive(n, rng),
            }
        }
        _ => ok(saturating(FixtureClass::ALL[rng.random_range(0..4)], rng.random_range(2..=3), rng), "saturating")?,
    };
    Ok(f)
}

fn criterion_9() -> Outcome {
    let start = Instant::now();
    let mut rng = seeded(909);
    let mut worst = f64::INFINITY;
    for i in 0..500 {
        let m = random_measure(rng.random_range(0..5), &mut rng);
        let f = random_channel_fixture(&mut rng)?;
        let gap = ok(dpi_gap(&m, &f.channel, &f.rho, &f.sigma), &format!("draw {i}: {} / {m}", f.name))?;
        ensure!(gap >= -1e-9, "draw {i}: {} / {m}: gap {gap:e}", f.name);
        worst = worst.min(gap);
    }
    within(start.elapsed(), 120)?;
    Ok(format!("500 draws, smallest gap {worst:.2e}, {:.2}s", start.elapsed().as_secs_f64()))
}

fn dpisat(args: &[&str]) -> Result<(i32, String), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_dpisat"))
        .args(args)
        .env_remove("DPISAT_SEED")
        .output()
        .map_err(|e| format!("spawning dpisat: {e}"))?;
    let text = format!("{}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr));
    Ok((out.status.code().unwrap_or(-1), text))
}

fn reports_without_timestamp(dir: &Path) -> Result<Vec<(String, Value)>, String> {
    let mut entries: Vec<_> = ok(std::fs::read_dir(dir), "read_dir")?.filter_map(|e| e.ok()).map(|e| e.path()).collect();
    entries.sort();
    entries
        .into_iter()
        .map(|p| {
            let text = ok(std::fs::read_to_string(&p), "read report")?;
            let mut v: Value = ok(serde_json::from_str(&text), "parse report")?;
            ensure!(v.get("timestamp").is_some(), "{} has no timestamp", p.display());
            v.as_object_mut().unwrap().remove("timestamp");
            Ok((p.file_name().unwrap().to_string_lossy().into_owned(), v))
        })
        .collect()
}

fn criterion_10() -> Outcome {
    let dir = ok(tempfile::tempdir(), "tempdir")?;
    let write = |name: &str, v: &Value| -> Result<String, String> {
        let p = dir.path().join(name);
        ok(std::fs::write(&p, v.to_string()), "write scenario")?;
        Ok(p.to_string_lossy().into_owned())
    };
    let diag3 = |v: [f64; 3]| json!({"builder": "diag", "values": v});
    let passing = json!([{
        "name": "pinching diagonal",
        "measure": {"family": "relative_entropy"},
        "channel": {"builder": "pinching", "dim": 3},
        "rho": diag3([0.5, 0.3, 0.2]),
        "sigma": diag3([0.2, 0.3, 0.5]),
        "checks": ["gap", "residual1", "petz"]
    }, {
        "name": "seeded unitary",
        "measure": {"family": "sandwiched_renyi", "alpha": 1.5},
        "channel": {"builder": "random", "dim_in": 3, "dim_out": 3, "num_kraus": 1, "seed": 5},
        "rho": {"builder": "random_pos", "dim": 3, "seed": 11},
        "sigma": {"builder": "random_pos", "dim": 3, "seed": 12},
        "checks": ["gap", "residual1", "residual2", "converse"]
    }]);
    let pass_file = write("pass.json", &passing)?;
    let mut runs = Vec::new();
    for i in 0..2 {
        let out = dir.path().join(format!("out{i}"));
        let (code, text) = dpisat(&["run", &pass_file, "--out", out.to_str().unwrap()])?;
        ensure!(code == 0, "passing scenarios exited {code}: {text}");
        runs.push(reports_without_timestamp(&out)?);
    }
    ensure!(runs[0].len() == 2, "expected 2 reports, found {}", runs[0].len());
    ensure!(runs[0] == runs[1], "repeated runs differ");

    let failing = json!({
        "name": "depolarizing",
        "measure": {"family": "relative_entropy"},
        "channel": {"builder": "depolarizing", "dim": 2, "p": 0.5},
        "rho": {"builder": "diag", "values": [0.9, 0.1]},
        "sigma": {"builder": "maximally_mixed", "dim": 2},
        "checks": ["gap", "residual1"]
    });
    let fail_file = write("fail.json", &failing)?;
    let fail_out = dir.path().join("fail_out");
    let (code, text) = dpisat(&["run", &fail_file, "--out", fail_out.to_str().unwrap()])?;
    ensure!(code == 1, "failing scenario exited {code}: {text}");
    let report = &reports_without_timestamp(&fail_out)?[0].1;
    let gap = report["checks"][0]["metrics"]["gap"].as_f64().unwrap_or(f64::NAN);
    ensure!((gap - 0.2857813286634451).abs() < 1e-6, "report gap {gap}");

    let mut malformed = failing.clone();
    malformed["rho"] = json!({"dim": 2, "entries": [[[0.5, 0.0], [0.3, 0.0]], [[0.1, 0.0], [0.5, 0.0]]]});
    let bad_file = write("bad.json", &json!([passing[0].clone(), malformed]))?;
    let bad_out = dir.path().join("bad_out");
    let (code, text) = dpisat(&["run", &bad_file, "--out", bad_out.to_str().unwrap()])?;
    ensure!(code == 2, "malformed scenario exited {code}: {text}");
    ensure!(text.contains("[1].rho"), "field path missing from: {text}");
    ensure!(!bad_out.exists(), "reports written despite a schema error");
    let (code, _) = dpisat(&["validate", &bad_file])?;
    ensure!(code == 2, "validate exited {code} on a malformed file");
    let (code, _) = dpisat(&["validate", &pass_file])?;
    ensure!(code == 0, "validate exited {code} on a valid file");

    Ok("identical reports across runs; exit codes 0/1/2 on pass/fail/schema error".into())
}

fn main() {
    let criteria: [(&str, Criterion); 10] = [
        ("Frechet derivative vs finite differences", criterion_1),
        ("closed-form gradients vs numeric gradients", criterion_2),
        ("saturating fixtures have vanishing residuals and gaps", criterion_3),
        ("converse for scaling-law families", criterion_4),
        ("non-saturation detected on the depolarizing fixture", criterion_5),
        ("Petz recovery suite", criterion_6),
        ("boundary suite", criterion_7),
        ("family coincidences", criterion_8),
        ("DPI across parameter regions", criterion_9),
        ("CLI determinism and exit codes", criterion_10),
    ];
    let filter: Vec<String> = std::env::args().skip(1).filter(|a| !a.starts_with('-')).collect();
    let mut failures = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let label = format!("criterion {}", i + 1);
        if !filter.is_empty() && !filter.iter().any(|f| label.contains(f.as_str()) || name.contains(f.as_str())) {
            continue;
        }
        let result = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panic".into());
            Err(format!("panicked: {msg}"))
        });
        match result {
            Ok(detail) => println!("{label:>12}: PASS  {name} ({detail})"),
            Err(why) => {
                failures += 1;
                println!("{label:>12}: FAIL  {name} ({why})");
            }
        }
    }
    if failures > 0 {
        println!("{failures} acceptance criterion(s) failed");
        std::process::exit(1);
    }
}

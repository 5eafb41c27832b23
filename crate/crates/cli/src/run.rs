//! The `run` command: evaluate scenarios and write one report per scenario.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use dpisat_core::divergences::{Measure, MeasureJson};
use dpisat_core::exec::{sequential_scope, Execution};
use dpisat_core::linalg::SpectralOperator;
use dpisat_core::saturation::{
    alpha2_petz_residual, alpha_z_crosscheck, analyze, boundary_residual_general, boundary_residual_relent,
    converse_certificate, hiai_residual, tangent_dimension, SaturationReport, SCHEMA_VERSION,
};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::scenario::{check_name, Check, Scenario};

/// Slack allowed below zero for the sign-adjusted gap.
pub const DPI_SLACK: f64 = 1e-9;
/// Required accuracy of `R_σ(Λσ) = σ`.
pub const PETZ_SIGMA_TOL: f64 = 1e-9;
/// Required accuracy of `R_σ(Λρ) = ρ`.
pub const PETZ_RHO_TOL: f64 = 1e-7;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub check: Check,
    pub passed: bool,
    pub metrics: BTreeMap<String, Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioReport {
    pub schema_version: String,
    pub scenario: String,
    /// Seconds since the Unix epoch; the only field that varies between runs.
    pub timestamp: u64,
    pub measure: MeasureJson,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
    pub checks: Vec<CheckOutcome>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub saturation: Option<SaturationReport>,
}

fn now() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn outcome(check: Check, passed: bool, metrics: Value, note: Option<String>) -> CheckOutcome {
    let metrics = match metrics {
        Value::Object(map) => map.into_iter().collect(),
        _ => BTreeMap::new(),
    };
    CheckOutcome {
        check,
        passed,
        metrics,
        note,
    }
}

fn evaluate_checks(s: &Scenario) -> dpisat_core::Result<(Vec<CheckOutcome>, Option<SaturationReport>)> {
    let tol = &s.tolerances;
    let rho_positive = if s.rho.is_full_rank() { Some(s.rho.to_positive()?) } else { None };
    let saturation = match &rho_positive {
        Some(rho) => Some(analyze(&s.measure, &s.channel, rho, &s.sigma, tol, false)?),
        None => None,
    };
    let mut out = Vec::new();
    for &check in &s.checks {
        let o = match check {
            Check::Gap => {
                let r = saturation.as_ref().expect("validated full rank");
                outcome(check, r.gap >= -DPI_SLACK, json!({ "gap": r.gap }), None)
            }
            Check::Residual1 => {
                let r = saturation.as_ref().expect("validated full rank");
                outcome(
                    check,
                    r.residual1_frobenius <= tol.residual_tol,
                    json!({ "frobenius": r.residual1_frobenius, "operator_norm": r.residual1_operator_norm }),
                    None,
                )
            }
            Check::Residual2 => {
                let r = saturation.as_ref().expect("validated full rank");
                outcome(
                    check,
                    r.residual2_frobenius <= tol.residual_tol,
                    json!({
                        "frobenius": r.residual2_frobenius,
                        "operator_norm": r.residual2_operator_norm,
                        "method": r.residual2_method,
                    }),
                    None,
                )
            }
            Check::Converse => {
                let rho = rho_positive.as_ref().expect("validated full rank");
                let c = converse_certificate(&s.measure, &s.channel, rho, &s.sigma, tol)?;
                outcome(
                    check,
                    !c.violation,
                    json!({
                        "residual1_norm": c.residual1_norm,
                        "gap": c.gap,
                        "implied_gap_zero": c.implied_gap_zero,
                        "violation": c.violation,
                    }),
                    None,
                )
            }
            Check::Boundary => {
                let (general, method) = boundary_residual_general(&s.measure, &s.channel, &s.rho, &s.sigma)?;
                let mut metrics = json!({
                    "residual_frobenius": general.frobenius,
                    "residual_operator_norm": general.operator_norm,
                    "method": method,
                    "rank": s.rho.rank(),
                });
                let mut passed = general.frobenius <= tol.residual_tol;
                if let Measure::RelativeEntropy = s.measure.measure() {
                    let relent = boundary_residual_relent(&s.channel, &s.rho, &s.sigma)?;
                    let hiai = hiai_residual(&s.channel, &s.rho, &s.sigma)?;
                    metrics["relent_residual_frobenius"] = json!(relent.frobenius);
                    metrics["hiai_residual_frobenius"] = json!(hiai.frobenius);
                    passed = passed && relent.frobenius <= tol.residual_tol && hiai.frobenius <= tol.residual_tol;
                }
                outcome(check, passed, metrics, None)
            }
            Check::Petz => {
                let rho = rho_positive.as_ref().expect("validated full rank");
                let r = saturation.as_ref().expect("validated full rank");
                let alpha2 = alpha2_petz_residual(&s.channel, rho, &s.sigma)?.frobenius_norm();
                let passed =
                    r.petz_recovery_error_sigma <= PETZ_SIGMA_TOL && r.petz_recovery_error_rho <= PETZ_RHO_TOL;
                outcome(
                    check,
                    passed,
                    json!({
                        "rho_error": r.petz_recovery_error_rho,
                        "sigma_error": r.petz_recovery_error_sigma,
                        "alpha2_residual_frobenius": alpha2,
                    }),
                    None,
                )
            }
            Check::AlphaZCrosscheck => {
                let rho = rho_positive.as_ref().expect("validated full rank");
                let alpha = s.measure.alpha().expect("validated Rényi family");
                let z = s.measure.z().expect("validated Rényi family");
                let c = alpha_z_crosscheck(&s.channel, rho, &s.sigma, alpha, z)?;
                let flags = [c.gradient_residual, c.chehade_residual, c.zhang_residual].map(|v| v <= tol.residual_tol);
                let agree = flags.iter().all(|&f| f) || flags.iter().all(|&f| !f);
                outcome(
                    check,
                    agree,
                    json!({
                        "gradient_residual": c.gradient_residual,
                        "chehade_residual": c.chehade_residual,
                        "zhang_residual": c.zhang_residual,
                        "all_saturated": flags.iter().all(|&f| f),
                    }),
                    (!agree).then(|| "the three saturation conditions disagree".to_string()),
                )
            }
            Check::Tangent => {
                let n = s.rho.dim();
                let k = s.rho.kernel_dim();
                let dim = tangent_dimension(&s.rho);
                let expected = n * n - k * k;
                outcome(
                    check,
                    dim == expected,
                    json!({ "dimension": dim, "expected": expected, "kernel_dim": k }),
                    None,
                )
            }
        };
        out.push(o);
    }
    Ok((out, saturation))
}

/// Runs one scenario on the calling thread.
pub fn run_scenario(s: &Scenario) -> ScenarioReport {
    let (checks, saturation, error) = match sequential_scope(|| evaluate_checks(s)) {
        Ok((c, sat)) => (c, sat, None),
        Err(e) => (Vec::new(), None, Some(e.to_string())),
    };
    ScenarioReport {
        schema_version: SCHEMA_VERSION.to_string(),
        scenario: s.name.clone(),
        timestamp: now(),
        measure: s.measure.to_json(),
        passed: error.is_none() && checks.iter().all(|c| c.passed),
        error,
        checks,
        saturation,
    }
}

/// Runs the batch; scenarios are spread across threads, reports keep input order.
pub fn run_all(scenarios: &[Scenario]) -> Vec<ScenarioReport> {
    Execution::default().map(scenarios, run_scenario)
}

fn file_stem(index: usize, name: &str) -> String {
    let clean: String = name
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' { c } else { '_' })
        .take(64)
        .collect();
    format!("{index:03}-{clean}")
}

/// Writes `bytes` to `path` through a temporary file in the same directory.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> std::io::Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(bytes)?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Writes each report as pretty JSON; returns the paths in input order.
pub fn write_reports(out_dir: &Path, reports: &[ScenarioReport]) -> std::io::Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut paths = Vec::new();
    for (i, r) in reports.iter().enumerate() {
        let path = out_dir.join(format!("{}.json", file_stem(i, &r.scenario)));
        let mut text = serde_json::to_string_pretty(r).map_err(std::io::Error::other)?;
        text.push('\n');
        write_atomic(&path, text.as_bytes())?;
        paths.push(path);
    }
    Ok(paths)
}

/// One line per scenario for the terminal.
pub fn summary_line(r: &ScenarioReport) -> String {
    let status = if r.passed { "PASS" } else { "FAIL" };
    let mut parts: Vec<String> = r
        .checks
        .iter()
        .map(|c| format!("{}={}", check_name(c.check), if c.passed { "ok" } else { "FAILED" }))
        .collect();
    if let Some(e) = &r.error {
        parts.push(format!("error: {e}"));
    }
    format!("{status} {}: {}", r.scenario, parts.join(" "))
}

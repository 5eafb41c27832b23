//! Scenario files: parsing, validation and resolution into numerical objects.

use std::fmt;

use dpisat_core::channels::{ChannelJson, KrausChannel};
use dpisat_core::divergences::MeasureSpec;
use dpisat_core::linalg::{kron, ComplexMatrix, HermitianOperator, MatrixJson, PositiveOperator, PsdOperator, SpectralOperator};
use dpisat_core::random::{random_positive, random_psd, seeded};
use dpisat_core::saturation::Tolerances;
use dpisat_core::Error;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::seeds::SeedMap;

/// A problem with the input file, reported with its location.
#[derive(Debug, Clone, PartialEq)]
pub struct SchemaError {
    pub location: String,
    pub message: String,
}

impl fmt::Display for SchemaError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.location, self.message)
    }
}

impl std::error::Error for SchemaError {}

impl SchemaError {
    fn new(location: impl Into<String>, message: impl ToString) -> Self {
        Self {
            location: location.into(),
            message: message.to_string(),
        }
    }

    fn from_core(path: &str, e: Error) -> Self {
        match e {
            Error::Schema { path, message } => Self::new(path, message),
            other => Self::new(path, other),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Check {
    Gap,
    Residual1,
    Residual2,
    Converse,
    Boundary,
    Petz,
    AlphaZCrosscheck,
    Tangent,
}

impl Check {
    /// Checks that evaluate the measure at `ρ` itself and so need it full rank.
    fn needs_full_rank(self) -> bool {
        !matches!(self, Check::Boundary | Check::Tangent)
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ToleranceOverrides {
    #[serde(default)]
    pub gap_tol: Option<f64>,
    #[serde(default)]
    pub residual_tol: Option<f64>,
}

/// State encoding: a matrix or a named builder.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "builder", rename_all = "snake_case", deny_unknown_fields)]
pub enum StateBuilder {
    /// Random full-rank unit-trace state.
    RandomPos { dim: usize, seed: u64 },
    /// Random unit-trace state of the given rank.
    RandomPsd { dim: usize, rank: usize, seed: u64 },
    Diag { values: Vec<f64> },
    MaximallyMixed { dim: usize },
    /// Tensor product of the listed states, left to right.
    Product { factors: Vec<Value> },
}

#[derive(Clone, Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawScenario {
    name: String,
    measure: Value,
    channel: Value,
    rho: Value,
    sigma: Value,
    #[serde(default = "default_checks")]
    checks: Vec<Check>,
    #[serde(default)]
    tolerances: ToleranceOverrides,
    #[serde(default)]
    allow_non_dpi: bool,
}

fn default_checks() -> Vec<Check> {
    vec![Check::Gap]
}

/// A validated scenario ready to run.
#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub measure: MeasureSpec,
    pub channel: KrausChannel,
    pub rho: PsdOperator,
    pub sigma: PositiveOperator,
    pub checks: Vec<Check>,
    pub tolerances: Tolerances,
}

/// Settings from the command line that apply to every scenario.
#[derive(Clone, Copy, Debug, Default)]
pub struct Overrides {
    pub allow_non_dpi: bool,
    pub tolerances: ToleranceOverrides,
}

fn serde_location(prefix: &str, inner: &str) -> String {
    if inner == "." || inner.is_empty() {
        prefix.to_string()
    } else {
        format!("{prefix}.{inner}")
    }
}

fn deserialize_at<T: serde::de::DeserializeOwned>(value: &Value, path: &str) -> Result<T, SchemaError> {
    serde_path_to_error::deserialize(value).map_err(|e| {
        let inner = e.path().to_string();
        SchemaError::new(serde_location(path, &inner), e.into_inner())
    })
}

/// Parses the file text into per-scenario JSON values with their paths. The
/// top level may be one scenario, an array, or `{"scenarios": [...]}`.
pub fn split_scenarios(text: &str) -> Result<Vec<(String, Value)>, SchemaError> {
    let root: Value = serde_json::from_str(text).map_err(|e| {
        SchemaError::new(format!("line {}, column {}", e.line(), e.column()), e)
    })?;
    let list = match root {
        Value::Array(items) => items.into_iter().enumerate().map(|(i, v)| (format!("[{i}]"), v)).collect(),
        Value::Object(ref map) if map.contains_key("scenarios") => {
            if map.len() != 1 {
                let extra: Vec<&String> = map.keys().filter(|k| *k != "scenarios").collect();
                return Err(SchemaError::new("$", format!("unknown top-level fields {extra:?}")));
            }
            match root.get("scenarios").cloned() {
                Some(Value::Array(items)) => items
                    .into_iter()
                    .enumerate()
                    .map(|(i, v)| (format!("scenarios[{i}]"), v))
                    .collect(),
                _ => return Err(SchemaError::new("scenarios", "expected an array of scenarios")),
            }
        }
        Value::Object(_) => vec![("$".to_string(), root)],
        _ => return Err(SchemaError::new("$", "expected a scenario object or an array of scenarios")),
    };
    if list.is_empty() {
        return Err(SchemaError::new("$", "no scenarios"));
    }
    Ok(list)
}

fn build_state(value: &Value, path: &str, seeds: &SeedMap) -> Result<HermitianOperator, SchemaError> {
    if value.get("builder").is_none() {
        let m: MatrixJson = deserialize_at(value, path)?;
        return m.to_hermitian(path).map_err(|e| SchemaError::from_core(path, e));
    }
    let builder: StateBuilder = deserialize_at(value, path)?;
    let positive_dim = |dim: usize| {
        if dim == 0 {
            Err(SchemaError::new(format!("{path}.dim"), "dimension must be positive"))
        } else {
            Ok(dim)
        }
    };
    Ok(match builder {
        StateBuilder::RandomPos { dim, seed } => {
            random_positive(positive_dim(dim)?, &mut seeded(seeds.map(seed))).operator().clone()
        }
        StateBuilder::RandomPsd { dim, rank, seed } => {
            let dim = positive_dim(dim)?;
            if rank == 0 || rank > dim {
                return Err(SchemaError::new(format!("{path}.rank"), format!("rank must lie in 1..={dim}")));
            }
            random_psd(dim, rank, &mut seeded(seeds.map(seed))).operator().clone()
        }
        StateBuilder::Diag { values } => {
            if values.is_empty() {
                return Err(SchemaError::new(format!("{path}.values"), "empty diagonal"));
            }
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(SchemaError::new(format!("{path}.values[{i}]"), "non-finite value"));
            }
            HermitianOperator::diagonal(&values)
        }
        StateBuilder::MaximallyMixed { dim } => {
            let dim = positive_dim(dim)?;
            HermitianOperator::identity(dim).scale(1.0 / dim as f64)
        }
        StateBuilder::Product { factors } => {
            if factors.is_empty() {
                return Err(SchemaError::new(format!("{path}.factors"), "empty product"));
            }
            let mut acc: Option<HermitianOperator> = None;
            for (i, f) in factors.iter().enumerate() {
                let op = build_state(f, &format!("{path}.factors[{i}]"), seeds)?;
                acc = Some(match acc {
                    None => op,
                    Some(a) => ComplexMatrix::new(kron(a.matrix(), op.matrix()))
                        .and_then(HermitianOperator::new)
                        .map_err(|e| SchemaError::from_core(path, e))?,
                });
            }
            acc.expect("at least one factor")
        }
    })
}

/// Resolves one scenario value into numerical objects.
pub fn resolve(value: &Value, path: &str, seeds: &SeedMap, overrides: &Overrides) -> Result<Scenario, SchemaError> {
    let raw: RawScenario = deserialize_at(value, path)?;
    let allow = raw.allow_non_dpi || overrides.allow_non_dpi;
    let measure = MeasureSpec::from_value(&raw.measure, &format!("{path}.measure"), allow)
        .map_err(|e| SchemaError::from_core(&format!("{path}.measure"), e))?;
    let channel_path = format!("{path}.channel");
    let channel = ChannelJson::from_value(&raw.channel, &channel_path)
        .and_then(|c| c.build(&channel_path, &|s| seeds.map(s)))
        .map_err(|e| SchemaError::from_core(&channel_path, e))?;

    let rho_path = format!("{path}.rho");
    let rho = build_state(&raw.rho, &rho_path, seeds)?;
    let rho = PsdOperator::new(rho).map_err(|e| SchemaError::new(&rho_path, e))?;
    let sigma_path = format!("{path}.sigma");
    let sigma = build_state(&raw.sigma, &sigma_path, seeds)?;
    let sigma = PositiveOperator::new(sigma)
        .map_err(|e| SchemaError::new(&sigma_path, format!("sigma must be strictly positive: {e}")))?;

    for (what, p, dim) in [("rho", &rho_path, rho.dim()), ("sigma", &sigma_path, sigma.dim())] {
        if dim != channel.dim_in() {
            return Err(SchemaError::new(
                p.as_str(),
                format!("{what} has dimension {dim} but the channel acts on dimension {}", channel.dim_in()),
            ));
        }
    }

    let mut checks = raw.checks.clone();
    checks.sort();
    checks.dedup();
    for check in &checks {
        let location = format!("{path}.checks");
        if check.needs_full_rank() && !rho.is_full_rank() {
            return Err(SchemaError::new(
                location,
                format!(
                    "check {} needs a full-rank rho (rank {} of {}); use boundary or tangent",
                    check_name(*check),
                    rho.rank(),
                    rho.dim()
                ),
            ));
        }
        if *check == Check::Converse && !measure.has_scaling_law() {
            return Err(SchemaError::new(
                location,
                format!("converse needs a family with a verified scaling law, not {}", measure.family()),
            ));
        }
        if *check == Check::AlphaZCrosscheck && !measure.is_renyi() {
            return Err(SchemaError::new(
                location,
                format!("alpha_z_crosscheck needs a Rényi family, not {}", measure.family()),
            ));
        }
    }

    let pick = |cli: Option<f64>, file: Option<f64>, default: f64, field: &str| -> Result<f64, SchemaError> {
        let v = cli.or(file).unwrap_or(default);
        if !(v.is_finite() && v > 0.0) {
            return Err(SchemaError::new(format!("{path}.tolerances.{field}"), "tolerance must be positive"));
        }
        Ok(v)
    };
    let defaults = Tolerances::default();
    let tolerances = Tolerances {
        gap_tol: pick(overrides.tolerances.gap_tol, raw.tolerances.gap_tol, defaults.gap_tol, "gap_tol")?,
        residual_tol: pick(
            overrides.tolerances.residual_tol,
            raw.tolerances.residual_tol,
            defaults.residual_tol,
            "residual_tol",
        )?,
    };

    Ok(Scenario {
        name: raw.name,
        measure,
        channel,
        rho,
        sigma,
        checks,
        tolerances,
    })
}

pub fn check_name(c: Check) -> String {
    serde_json::to_value(c)
        .ok()
        .and_then(|v| v.as_str().map(str::to_string))
        .unwrap_or_default()
}

/// Parses and resolves every scenario in `text`.
pub fn load(text: &str, seeds: &SeedMap, overrides: &Overrides) -> Result<Vec<Scenario>, SchemaError> {
    split_scenarios(text)?
        .iter()
        .map(|(path, v)| resolve(v, path, seeds, overrides))
        .collect()
}

/// A channel with a full-rank state pair, as used by `sweep`.
#[derive(Clone, Debug)]
pub struct FixtureInput {
    pub channel: KrausChannel,
    pub rho: PositiveOperator,
    pub sigma: PositiveOperator,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFixture {
    channel: Value,
    rho: Value,
    sigma: Value,
}

/// Parses `{"channel": ..., "rho": ..., "sigma": ...}`; both states must be full rank.
pub fn load_fixture(text: &str, seeds: &SeedMap) -> Result<FixtureInput, SchemaError> {
    let root: Value = serde_json::from_str(text)
        .map_err(|e| SchemaError::new(format!("line {}, column {}", e.line(), e.column()), e))?;
    let raw: RawFixture = deserialize_at(&root, "$")?;
    let channel = ChannelJson::from_value(&raw.channel, "channel")
        .and_then(|c| c.build("channel", &|s| seeds.map(s)))
        .map_err(|e| SchemaError::from_core("channel", e))?;
    let mut states = Vec::new();
    for (what, v) in [("rho", &raw.rho), ("sigma", &raw.sigma)] {
        let op = build_state(v, what, seeds)?;
        if op.dim() != channel.dim_in() {
            return Err(SchemaError::new(
                what,
                format!("dimension {} does not match the channel input {}", op.dim(), channel.dim_in()),
            ));
        }
        states.push(
            PositiveOperator::new(op).map_err(|e| SchemaError::new(what, format!("must be strictly positive: {e}")))?,
        );
    }
    let sigma = states.pop().expect("two states");
    let rho = states.pop().expect("two states");
    Ok(FixtureInput { channel, rho, sigma })
}

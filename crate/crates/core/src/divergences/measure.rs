use std::fmt;

use serde::{Deserialize, Serialize};

use crate::calculus::ScalarFunctionPair;
use crate::error::{Error, Result};
use crate::linalg::Elementary;

/// Direction of the data-processing inequality: `+1` when the measure decreases
/// under channels, `−1` when it increases (fidelity).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Family {
    RelativeEntropy,
    Fidelity,
    SandwichedRenyi,
    AlphaZ,
    FDivergence,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Family::RelativeEntropy => "relative_entropy",
            Family::Fidelity => "fidelity",
            Family::SandwichedRenyi => "sandwiched_renyi",
            Family::AlphaZ => "alpha_z",
            Family::FDivergence => "f_divergence",
        };
        f.write_str(s)
    }
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "relative_entropy" => Ok(Family::RelativeEntropy),
            "fidelity" => Ok(Family::Fidelity),
            "sandwiched_renyi" => Ok(Family::SandwichedRenyi),
            "alpha_z" => Ok(Family::AlphaZ),
            "f_divergence" => Ok(Family::FDivergence),
            other => Err(Error::InvalidParameter(format!("unknown measure family {other:?}"))),
        }
    }
}

/// Generator `f` of a quantum f-divergence.
#[derive(Clone, Debug)]
pub enum FFunction {
    XLogX,
    NegLog,
    /// `x^a`; operator convex for `a ∈ (1, 2]`, operator concave for `a ∈ (0, 1)`.
    Power(f64),
    /// `(x − 1)²`.
    SquaredDeviation,
    /// A caller-supplied pair whose operator convexity (or concavity, with
    /// `Sign::Minus`) is asserted, not checked.
    Custom { pair: ScalarFunctionPair, sign: Sign },
}

impl FFunction {
    pub fn pair(&self) -> ScalarFunctionPair {
        match self {
            FFunction::XLogX => ScalarFunctionPair::from_elementary(Elementary::XLogX),
            FFunction::NegLog => ScalarFunctionPair::from_elementary(Elementary::NegLog),
            FFunction::Power(a) => ScalarFunctionPair::from_elementary(Elementary::Power(*a)),
            FFunction::SquaredDeviation => ScalarFunctionPair::from_elementary(Elementary::SquaredDeviation),
            FFunction::Custom { pair, .. } => pair.clone(),
        }
    }

    pub fn sign(&self) -> Sign {
        match self {
            FFunction::Power(a) if *a > 0.0 && *a < 1.0 => Sign::Minus,
            FFunction::Custom { sign, .. } => *sign,
            _ => Sign::Plus,
        }
    }

    /// Whether `f` is in the registry of operator convex (or concave) generators.
    pub fn in_registry(&self) -> bool {
        match self {
            FFunction::Power(a) => (*a > 0.0 && *a < 1.0) || (*a > 1.0 && *a <= 2.0),
            _ => true,
        }
    }

    pub fn name(&self) -> String {
        match self {
            FFunction::XLogX => "x_log_x".into(),
            FFunction::NegLog => "neg_log".into(),
            FFunction::Power(a) => format!("power({a})"),
            FFunction::SquaredDeviation => "squared_deviation".into(),
            FFunction::Custom { pair, .. } => format!("custom({})", pair.name()),
        }
    }
}

#[derive(Clone, Debug)]
pub enum Measure {
    RelativeEntropy,
    Fidelity,
    SandwichedRenyi { alpha: f64 },
    AlphaZ { alpha: f64, z: f64 },
    FDivergence(FFunction),
}

/// A distinguishability measure with validated parameters.
#[derive(Clone, Debug)]
pub struct MeasureSpec {
    measure: Measure,
    allow_non_dpi: bool,
}

/// Whether `(α, z)` lies in the region where the α-z Rényi divergence satisfies DPI.
pub fn alpha_z_in_dpi_region(alpha: f64, z: f64) -> bool {
    (alpha > 0.0 && alpha < 1.0 && z >= alpha.max(1.0 - alpha))
        || (alpha > 1.0 && alpha <= 2.0 && z >= alpha / 2.0 && z <= alpha)
        || (alpha >= 2.0 && alpha.is_finite() && z >= alpha - 1.0 && z <= alpha)
}

pub fn sandwiched_in_dpi_region(alpha: f64) -> bool {
    alpha >= 0.5 && alpha != 1.0 && alpha.is_finite()
}

fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 {
        return Err(Error::InvalidParameter(format!("alpha must be positive and finite, got {alpha}")));
    }
    if alpha == 1.0 {
        return Err(Error::InvalidParameter(
            "alpha = 1 is a pole of the Rényi families; use relative_entropy".into(),
        ));
    }
    Ok(())
}

impl MeasureSpec {
    /// Validates `measure`. Parameters outside the data-processing region are
    /// rejected unless `allow_non_dpi` is set; malformed parameters always are.
    pub fn new(measure: Measure, allow_non_dpi: bool) -> Result<Self> {
        let spec = Self { measure, allow_non_dpi };
        match &spec.measure {
            Measure::RelativeEntropy | Measure::Fidelity => {}
            Measure::SandwichedRenyi { alpha } => {
                check_alpha(*alpha)?;
                if !allow_non_dpi && !sandwiched_in_dpi_region(*alpha) {
                    return Err(Error::OutsideDpiRegion(format!(
                        "sandwiched Rényi needs alpha >= 1/2, got {alpha}"
                    )));
                }
            }
            Measure::AlphaZ { alpha, z } => {
                check_alpha(*alpha)?;
                if !z.is_finite() || *z <= 0.0 {
                    return Err(Error::InvalidParameter(format!("z must be positive and finite, got {z}")));
                }
                if !allow_non_dpi && !alpha_z_in_dpi_region(*alpha, *z) {
                    return Err(Error::OutsideDpiRegion(format!("(alpha, z) = ({alpha}, {z})")));
                }
            }
            Measure::FDivergence(f) => {
                if let FFunction::Power(a) = f {
                    if !a.is_finite() || *a == 0.0 || *a == 1.0 {
                        return Err(Error::InvalidParameter(format!("exponent {a} gives a trivial f-divergence")));
                    }
                }
                if !allow_non_dpi && !f.in_registry() {
                    return Err(Error::OutsideDpiRegion(format!(
                        "f = {} is not a registered operator convex function",
                        f.name()
                    )));
                }
            }
        }
        Ok(spec)
    }

    pub fn relative_entropy() -> Self {
        Self {
            measure: Measure::RelativeEntropy,
            allow_non_dpi: false,
        }
    }

    pub fn fidelity() -> Self {
        Self {
            measure: Measure::Fidelity,
            allow_non_dpi: false,
        }
    }

    pub fn sandwiched_renyi(alpha: f64) -> Result<Self> {
        Self::new(Measure::SandwichedRenyi { alpha }, false)
    }

    pub fn alpha_z(alpha: f64, z: f64) -> Result<Self> {
        Self::new(Measure::AlphaZ { alpha, z }, false)
    }

    pub fn f_divergence(f: FFunction) -> Result<Self> {
        Self::new(Measure::FDivergence(f), false)
    }

    pub fn measure(&self) -> &Measure {
        &self.measure
    }

    pub fn allows_non_dpi(&self) -> bool {
        self.allow_non_dpi
    }

    pub fn family(&self) -> Family {
        match self.measure {
            Measure::RelativeEntropy => Family::RelativeEntropy,
            Measure::Fidelity => Family::Fidelity,
            Measure::SandwichedRenyi { .. } => Family::SandwichedRenyi,
            Measure::AlphaZ { .. } => Family::AlphaZ,
            Measure::FDivergence(_) => Family::FDivergence,
        }
    }

    pub fn alpha(&self) -> Option<f64> {
        match self.measure {
            Measure::SandwichedRenyi { alpha } | Measure::AlphaZ { alpha, .. } => Some(alpha),
            _ => None,
        }
    }

    /// `z`; equal to `α` for the sandwiched family.
    pub fn z(&self) -> Option<f64> {
        match self.measure {
            Measure::SandwichedRenyi { alpha } => Some(alpha),
            Measure::AlphaZ { z, .. } => Some(z),
            _ => None,
        }
    }

    /// `γ = (1 − α) / 2z`.
    pub fn gamma(&self) -> Option<f64> {
        Some((1.0 - self.alpha()?) / (2.0 * self.z()?))
    }

    pub fn sign(&self) -> Sign {
        match &self.measure {
            Measure::Fidelity => Sign::Minus,
            Measure::FDivergence(f) => f.sign(),
            _ => Sign::Plus,
        }
    }

    pub fn f_function(&self) -> Option<&FFunction> {
        match &self.measure {
            Measure::FDivergence(f) => Some(f),
            _ => None,
        }
    }

    pub fn in_dpi_region(&self) -> bool {
        match &self.measure {
            Measure::RelativeEntropy | Measure::Fidelity => true,
            Measure::SandwichedRenyi { alpha } => sandwiched_in_dpi_region(*alpha),
            Measure::AlphaZ { alpha, z } => alpha_z_in_dpi_region(*alpha, *z),
            Measure::FDivergence(f) => f.in_registry(),
        }
    }

    /// Families whose value determines the inner product of the first gradient with `ρ`
    /// through an invertible or verified relation.
    pub fn has_scaling_law(&self) -> bool {
        !matches!(self.measure, Measure::FDivergence(_))
    }

    pub fn is_renyi(&self) -> bool {
        matches!(self.measure, Measure::SandwichedRenyi { .. } | Measure::AlphaZ { .. })
    }

    pub fn name(&self) -> String {
        match &self.measure {
            Measure::RelativeEntropy => "relative_entropy".into(),
            Measure::Fidelity => "fidelity".into(),
            Measure::SandwichedRenyi { alpha } => format!("sandwiched_renyi(alpha={alpha})"),
            Measure::AlphaZ { alpha, z } => format!("alpha_z(alpha={alpha}, z={z})"),
            Measure::FDivergence(f) => format!("f_divergence({})", f.name()),
        }
    }

    pub fn to_json(&self) -> MeasureJson {
        match &self.measure {
            Measure::RelativeEntropy => MeasureJson::RelativeEntropy {},
            Measure::Fidelity => MeasureJson::Fidelity {},
            Measure::SandwichedRenyi { alpha } => MeasureJson::SandwichedRenyi { alpha: *alpha },
            Measure::AlphaZ { alpha, z } => MeasureJson::AlphaZ { alpha: *alpha, z: *z },
            Measure::FDivergence(f) => {
                let (name, exponent, custom) = match f {
                    FFunction::XLogX => (FName::XLogX, None, None),
                    FFunction::NegLog => (FName::NegLog, None, None),
                    FFunction::Power(a) => (FName::Power, Some(*a), None),
                    FFunction::SquaredDeviation => (FName::SquaredDeviation, None, None),
                    FFunction::Custom { pair, .. } => (FName::Custom, None, Some(pair.name().to_string())),
                };
                MeasureJson::FDivergence {
                    f: name,
                    exponent,
                    name: custom,
                }
            }
        }
    }

    pub fn from_json(json: &MeasureJson, allow_non_dpi: bool) -> Result<Self> {
        let measure = match json {
            MeasureJson::RelativeEntropy {} => Measure::RelativeEntropy,
            MeasureJson::Fidelity {} => Measure::Fidelity,
            MeasureJson::SandwichedRenyi { alpha } => Measure::SandwichedRenyi { alpha: *alpha },
            MeasureJson::AlphaZ { alpha, z } => Measure::AlphaZ { alpha: *alpha, z: *z },
            MeasureJson::FDivergence { f, exponent, .. } => {
                let needs_exponent = matches!(f, FName::Power);
                if needs_exponent != exponent.is_some() {
                    return Err(Error::InvalidParameter(if needs_exponent {
                        "f = power needs an \"exponent\"".into()
                    } else {
                        "\"exponent\" is only valid with f = power".into()
                    }));
                }
                Measure::FDivergence(match f {
                    FName::XLogX => FFunction::XLogX,
                    FName::NegLog => FFunction::NegLog,
                    FName::Power => FFunction::Power(exponent.unwrap_or_default()),
                    FName::SquaredDeviation => FFunction::SquaredDeviation,
                    FName::Custom => {
                        return Err(Error::InvalidParameter(
                            "custom f-divergence generators can only be registered from code".into(),
                        ))
                    }
                })
            }
        };
        Self::new(measure, allow_non_dpi)
    }

    /// Parses a JSON value, reporting errors with `path` as the location prefix.
    pub fn from_value(value: &serde_json::Value, path: &str, allow_non_dpi: bool) -> Result<Self> {
        let json: MeasureJson = serde_path_to_error::deserialize(value).map_err(|e| {
            let inner = e.path().to_string();
            let location = if inner == "." { path.to_string() } else { format!("{path}.{inner}") };
            Error::schema(location, e.into_inner())
        })?;
        Self::from_json(&json, allow_non_dpi).map_err(|e| Error::schema(path, e))
    }
}

impl fmt::Display for MeasureSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FName {
    XLogX,
    NegLog,
    Power,
    SquaredDeviation,
    Custom,
}

/// `{"family": "alpha_z", "alpha": 1.5, "z": 1.2}`, `{"family": "f_divergence", "f": "x_log_x"}`, ...
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case", deny_unknown_fields)]
pub enum MeasureJson {
    RelativeEntropy {},
    Fidelity {},
    SandwichedRenyi {
        alpha: f64,
    },
    AlphaZ {
        alpha: f64,
        z: f64,
    },
    FDivergence {
        f: FName,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        exponent: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        name: Option<String>,
    },
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dpi_regions() {
        assert!(alpha_z_in_dpi_region(0.6, 0.8));
        assert!(!alpha_z_in_dpi_region(0.6, 0.5));
        assert!(alpha_z_in_dpi_region(1.5, 1.2));
        assert!(!alpha_z_in_dpi_region(1.5, 0.7));
        assert!(alpha_z_in_dpi_region(3.0, 2.5));
        assert!(!alpha_z_in_dpi_region(3.0, 1.5));
        assert!(MeasureSpec::sandwiched_renyi(0.4).is_err());
        assert!(MeasureSpec::new(Measure::SandwichedRenyi { alpha: 0.4 }, true).is_ok());
        assert!(MeasureSpec::new(Measure::SandwichedRenyi { alpha: 1.0 }, true).is_err());
        assert!(MeasureSpec::new(Measure::AlphaZ { alpha: 2.0, z: -1.0 }, true).is_err());
    }

    #[test]
    fn gamma_and_sign() {
        let s = MeasureSpec::sandwiched_renyi(2.0).unwrap();
        assert_eq!(s.gamma(), Some(-0.25));
        let az = MeasureSpec::alpha_z(0.6, 0.8).unwrap();
        assert!((az.gamma().unwrap() - 0.25).abs() < 1e-15);
        assert_eq!(MeasureSpec::fidelity().sign(), Sign::Minus);
        assert_eq!(MeasureSpec::f_divergence(FFunction::Power(0.5)).unwrap().sign(), Sign::Minus);
        assert_eq!(MeasureSpec::f_divergence(FFunction::Power(1.5)).unwrap().sign(), Sign::Plus);
        assert!(MeasureSpec::f_divergence(FFunction::Power(3.0)).is_err());
    }

    #[test]
    fn json_round_trip_and_unknown_fields() {
        for text in [
            r#"{"family": "alpha_z", "alpha": 1.5, "z": 1.2}"#,
            r#"{"family": "f_divergence", "f": "x_log_x"}"#,
            r#"{"family": "f_divergence", "f": "power", "exponent": 0.5}"#,
            r#"{"family": "relative_entropy"}"#,
        ] {
            let v: serde_json::Value = serde_json::from_str(text).unwrap();
            let m = MeasureSpec::from_value(&v, "measure", false).unwrap();
            assert_eq!(serde_json::to_value(m.to_json()).unwrap(), v);
        }
        let bad: serde_json::Value = serde_json::from_str(r#"{"family": "fidelity", "alpha": 2}"#).unwrap();
        assert!(matches!(MeasureSpec::from_value(&bad, "m", false), Err(Error::Schema { .. })));
        let outside: serde_json::Value = serde_json::from_str(r#"{"family": "alpha_z", "alpha": 3, "z": 1}"#).unwrap();
        assert!(MeasureSpec::from_value(&outside, "m", false).is_err());
        assert!(MeasureSpec::from_value(&outside, "m", true).is_ok());
    }
}

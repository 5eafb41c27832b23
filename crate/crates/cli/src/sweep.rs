//! The `sweep` command: one measure family over a parameter grid.

use std::path::Path;

use dpisat_core::divergences::{Family, FFunction, Measure, MeasureSpec};
use dpisat_core::exec::Execution;
use dpisat_core::saturation::{dpi_gap, residual1, residual2};
use dpisat_core::Error;

use crate::scenario::FixtureInput;

/// Grid values are rounded to 12 decimals so `0.1 + 0.2` lands on `0.3`.
const GRID_SCALE: f64 = 1e12;

#[derive(Clone, Debug, PartialEq)]
pub struct Grid {
    pub names: Vec<String>,
    pub axes: Vec<Vec<f64>>,
}

fn round_grid(v: f64) -> f64 {
    let r = (v * GRID_SCALE).round() / GRID_SCALE;
    if r == 0.0 {
        0.0
    } else {
        r
    }
}

fn parse_number(s: &str, item: &str) -> Result<f64, String> {
    let v: f64 = s.trim().parse().map_err(|_| format!("{item}: '{}' is not a number", s.trim()))?;
    if !v.is_finite() {
        return Err(format!("{item}: non-finite value"));
    }
    Ok(v)
}

fn parse_axis(spec: &str, item: &str) -> Result<Vec<f64>, String> {
    if spec.contains(':') {
        let parts: Vec<&str> = spec.split(':').collect();
        if parts.len() != 3 {
            return Err(format!("{item}: ranges are start:stop:step"));
        }
        let start = parse_number(parts[0], item)?;
        let stop = parse_number(parts[1], item)?;
        let step = parse_number(parts[2], item)?;
        if step <= 0.0 {
            return Err(format!("{item}: step must be positive"));
        }
        if stop < start {
            return Err(format!("{item}: stop is below start"));
        }
        let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
        if count > 100_000 {
            return Err(format!("{item}: {count} points is too many"));
        }
        Ok((0..count).map(|i| round_grid(start + i as f64 * step)).collect())
    } else {
        spec.split(',').map(|s| parse_number(s, item).map(round_grid)).collect()
    }
}

/// Parses `"alpha=0.5:3:0.25;z=1,1.5,2"`. Axes vary fastest from the right.
pub fn parse_grid(text: &str) -> Result<Grid, String> {
    let mut grid = Grid {
        names: Vec::new(),
        axes: Vec::new(),
    };
    for item in text.split(';').map(str::trim).filter(|s| !s.is_empty()) {
        let (name, spec) = item.split_once('=').ok_or_else(|| format!("'{item}': expected name=values"))?;
        let name = name.trim().to_string();
        if grid.names.contains(&name) {
            return Err(format!("parameter {name} given twice"));
        }
        grid.axes.push(parse_axis(spec, item)?);
        grid.names.push(name);
    }
    Ok(grid)
}

impl Grid {
    /// Cartesian product in lexicographic order.
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new()];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|p| {
                    axis.iter().map(move |&v| {
                        let mut q = p.clone();
                        q.push(v);
                        q
                    })
                })
                .collect();
        }
        out
    }
}

fn expected_params(family: Family) -> &'static [&'static str] {
    match family {
        Family::RelativeEntropy | Family::Fidelity => &[],
        Family::SandwichedRenyi => &["alpha"],
        Family::AlphaZ => &["alpha", "z"],
        Family::FDivergence => &["exponent"],
    }
}

fn measure_at(family: Family, names: &[String], point: &[f64]) -> Measure {
    let get = |n: &str| names.iter().position(|x| x == n).map(|i| point[i]).unwrap_or(f64::NAN);
    match family {
        Family::RelativeEntropy => Measure::RelativeEntropy,
        Family::Fidelity => Measure::Fidelity,
        Family::SandwichedRenyi => Measure::SandwichedRenyi { alpha: get("alpha") },
        Family::AlphaZ => Measure::AlphaZ {
            alpha: get("alpha"),
            z: get("z"),
        },
        Family::FDivergence => Measure::FDivergence(FFunction::Power(get("exponent"))),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepRow {
    pub params: Vec<f64>,
    pub gap: f64,
    pub residual1_norm: f64,
    pub residual2_norm: f64,
}

#[derive(Clone, Debug, Default)]
pub struct SweepOutput {
    pub names: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub warnings: Vec<String>,
}

/// Evaluates every admissible grid point; rows come back in grid order.
/// `f_divergence` sweeps the exponent of `x^a`.
pub fn sweep(
    family: Family,
    grid: &Grid,
    fixture: &FixtureInput,
    allow_non_dpi: bool,
) -> Result<SweepOutput, SweepError> {
    let expected = expected_params(family);
    for name in &grid.names {
        if !expected.contains(&name.as_str()) {
            return Err(SweepError::Usage(format!("{family} has no parameter {name}; expected {expected:?}")));
        }
    }
    if let Some(missing) = expected.iter().find(|n| !grid.names.iter().any(|g| g == *n)) {
        return Err(SweepError::Usage(format!("grid is missing parameter {missing}")));
    }

    let mut warnings = Vec::new();
    let mut admitted = Vec::new();
    for point in grid.points() {
        let label = grid
            .names
            .iter()
            .zip(&point)
            .map(|(n, v)| format!("{n}={v}"))
            .collect::<Vec<_>>()
            .join(", ");
        let alpha_index = grid.names.iter().position(|n| n == "alpha");
        if alpha_index.is_some_and(|i| point[i] == 1.0) {
            warnings.push(format!("skipping {label}: alpha = 1 is the relative entropy limit"));
            continue;
        }
        match MeasureSpec::new(measure_at(family, &grid.names, &point), allow_non_dpi) {
            Ok(m) => admitted.push((point, m)),
            Err(e @ (Error::OutsideDpiRegion(_) | Error::InvalidParameter(_))) => {
                warnings.push(format!("skipping {label}: {e}"));
            }
            Err(e) => return Err(SweepError::Numerical(format!("{label}: {e}"))),
        }
    }

    let results = Execution::default().map(&admitted, |(point, m)| -> Result<SweepRow, Error> {
        let gap = dpi_gap(m, &fixture.channel, &fixture.rho, &fixture.sigma)?;
        let r1 = residual1(m, &fixture.channel, &fixture.rho, &fixture.sigma)?;
        let (r2, _) = residual2(m, &fixture.channel, &fixture.rho, &fixture.sigma)?;
        Ok(SweepRow {
            params: point.clone(),
            gap,
            residual1_norm: r1.frobenius,
            residual2_norm: r2.frobenius,
        })
    });
    let mut rows = Vec::with_capacity(results.len());
    for (r, (_, m)) in results.into_iter().zip(&admitted) {
        match r {
            Ok(row) => rows.push(row),
            // Points admitted only by the override may be numerically out of reach.
            Err(e) if !m.in_dpi_region() => warnings.push(format!("skipping {m}: {e}")),
            Err(e) => return Err(SweepError::Numerical(format!("{m}: {e}"))),
        }
    }
    Ok(SweepOutput {
        names: grid.names.clone(),
        rows,
        warnings,
    })
}

#[derive(Debug)]
pub enum SweepError {
    /// Bad grid or parameter names.
    Usage(String),
    Numerical(String),
}

impl std::fmt::Display for SweepError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            SweepError::Usage(m) | SweepError::Numerical(m) => f.write_str(m),
        }
    }
}

pub fn to_csv(out: &SweepOutput) -> Result<Vec<u8>, csv::Error> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = out.names.clone();
    header.extend(["gap", "residual1_norm", "residual2_norm"].map(String::from));
    w.write_record(&header)?;
    for row in &out.rows {
        let mut rec: Vec<String> = row.params.iter().map(|v| v.to_string()).collect();
        rec.extend([row.gap, row.residual1_norm, row.residual2_norm].map(|v| format!("{v:e}")));
        w.write_record(&rec)?;
    }
    w.into_inner().map_err(|e| csv::Error::from(e.into_error()))
}

pub fn write_csv(path: &Path, out: &SweepOutput) -> std::io::Result<()> {
    let bytes = to_csv(out).map_err(std::io::Error::other)?;
    crate::run::write_atomic(path, &bytes)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ranges_round_to_the_grid() {
        let g = parse_grid("alpha=0.5:3.0:0.25").unwrap();
        assert_eq!(g.axes[0].len(), 11);
        assert_eq!(g.axes[0][3], 1.25);
        assert_eq!(parse_grid("x=0.1:0.3:0.1").unwrap().axes[0], vec![0.1, 0.2, 0.3]);
    }

    #[test]
    fn cartesian_order() {
        let g = parse_grid("alpha=1.5,2; z=1,2,3").unwrap();
        let p = g.points();
        assert_eq!(p.len(), 6);
        assert_eq!(p[0], vec![1.5, 1.0]);
        assert_eq!(p[1], vec![1.5, 2.0]);
        assert_eq!(p[3], vec![2.0, 1.0]);
    }

    #[test]
    fn bad_grids() {
        assert!(parse_grid("alpha").is_err());
        assert!(parse_grid("alpha=1:2").is_err());
        assert!(parse_grid("alpha=2:1:0.1").is_err());
        assert!(parse_grid("alpha=1:2:0").is_err());
        assert!(parse_grid("alpha=1;alpha=2").is_err());
        assert!(parse_grid("alpha=x").is_err());
    }
}

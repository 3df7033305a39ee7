//! One-parameter design sweeps over a base geometry.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{extension_total, ActuatorGeometry};
use crate::par::{self, Execution};
use crate::statics::{blocked_force, max_extension};
use crate::stiffness::StiffnessCubic;
use crate::units::deg_to_rad;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepParam {
    /// Degrees.
    FoldAngle,
    /// mm
    FoldWidth,
    FoldCount,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepMetric {
    /// Geometric stroke `N δ`, mm.
    Extension,
    /// N
    BlockedForce,
    /// mm
    MaxExtension,
}

impl FromStr for SweepParam {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fold_angle" => Ok(Self::FoldAngle),
            "fold_width" => Ok(Self::FoldWidth),
            "fold_count" => Ok(Self::FoldCount),
            _ => Err(Error::validation(
                "param",
                format!("expected fold_angle, fold_width or fold_count, got `{s}`"),
            )),
        }
    }
}

impl fmt::Display for SweepParam {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::FoldAngle => "fold_angle_deg",
            Self::FoldWidth => "fold_width_mm",
            Self::FoldCount => "fold_count",
        })
    }
}

impl FromStr for SweepMetric {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "extension" => Ok(Self::Extension),
            "blocked_force" => Ok(Self::BlockedForce),
            "max_extension" => Ok(Self::MaxExtension),
            _ => Err(Error::validation(
                "metric",
                format!("expected extension, blocked_force or max_extension, got `{s}`"),
            )),
        }
    }
}

impl fmt::Display for SweepMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Extension => "extension_mm",
            Self::BlockedForce => "blocked_force_n",
            Self::MaxExtension => "max_extension_mm",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub value: f64,
    pub metric: f64,
}

/// `START:STOP:STEP` (inclusive) or a single value.
pub fn parse_range(s: &str) -> Result<Vec<f64>> {
    let nums = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|_| Error::validation("range", format!("`{p}` is not a number")))
        })
        .collect::<Result<Vec<f64>>>()?;
    match nums.as_slice() {
        [v] if v.is_finite() => Ok(vec![*v]),
        [start, stop, step]
            if start.is_finite() && stop.is_finite() && *step > 0.0 && stop >= start =>
        {
            let n = ((stop - start) / step + 1e-9).floor() as usize;
            Ok((0..=n).map(|i| start + i as f64 * step).collect())
        }
        _ => Err(Error::validation(
            "range",
            format!("expected VALUE or START:STOP:STEP with STEP > 0 and STOP >= START, got `{s}`"),
        )),
    }
}

/// Geometry with one parameter replaced.
///
/// Angle and width sweeps keep the base fold count so the stroke is not
/// quantised by the pitch estimate; both recompute `S = fw / cos θ`.
pub fn vary(base: &ActuatorGeometry, param: SweepParam, value: f64) -> Result<ActuatorGeometry> {
    let mut g = base.clone();
    match param {
        SweepParam::FoldAngle | SweepParam::FoldWidth => {
            let n = base.fold_spec()?.fold_count();
            g.fold_count_override = Some(n);
            g.fold_length_override = None;
            if param == SweepParam::FoldAngle {
                g.fold_angle = deg_to_rad(value);
            } else {
                g.fold_width = value;
            }
        }
        SweepParam::FoldCount => {
            if !(value >= 1.0 && value.fract() == 0.0 && value <= f64::from(u32::MAX)) {
                return Err(Error::validation(
                    "fold_count",
                    format!("sweep values must be positive integers, got {value}"),
                ));
            }
            g.fold_count_override = Some(value as u32);
        }
    }
    g.validate()?;
    Ok(g)
}

fn evaluate(
    geom: &ActuatorGeometry,
    poly: &StiffnessCubic,
    pressure: f64,
    metric: SweepMetric,
) -> Result<f64> {
    match metric {
        SweepMetric::Extension => Ok(extension_total(&geom.fold_spec()?)),
        SweepMetric::BlockedForce => blocked_force(geom, poly, pressure),
        SweepMetric::MaxExtension => max_extension(geom, poly, pressure),
    }
}

/// One row per value, in input order. `pressure` is MPa and only used by force metrics.
pub fn sweep(
    base: &ActuatorGeometry,
    poly: &StiffnessCubic,
    pressure: f64,
    param: SweepParam,
    values: &[f64],
    metric: SweepMetric,
) -> Result<Vec<SweepRow>> {
    sweep_with(Execution::Auto, base, poly, pressure, param, values, metric)
}

pub fn sweep_with(
    exec: Execution,
    base: &ActuatorGeometry,
    poly: &StiffnessCubic,
    pressure: f64,
    param: SweepParam,
    values: &[f64],
    metric: SweepMetric,
) -> Result<Vec<SweepRow>> {
    par::map_with(exec, values, |&value| {
        let g = vary(base, param, value)?;
        Ok(SweepRow {
            value,
            metric: evaluate(&g, poly, pressure, metric)?,
        })
    })
    .into_iter()
    .collect()
}

//! Quasi-static pressure-to-force model of the linear sleeve actuator.
//!
//! `Fy = P (A1 + A2 − A3) − FK(y)` with `P` in MPa, areas in mm², forces in N.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::geometry::{extension_total, ActuatorGeometry, FoldSpec};
use crate::roots::bisect;
use crate::stiffness::StiffnessCubic;

/// Bisection tolerance for [`max_extension`], mm.
pub const MAX_EXTENSION_TOL_MM: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectedAreas {
    pub a1: f64,
    pub a2: f64,
    pub a3: f64,
}

impl ProjectedAreas {
    /// `A1 + A2 − A3`, the net area pressure acts on (mm²).
    pub fn effective(&self) -> f64 {
        self.a1 + self.a2 - self.a3
    }
}

/// How projected areas respond to extension.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum AreaMode {
    /// Areas frozen at the rest geometry.
    #[default]
    Constant,
    /// Recompute the fold angle from the extension shared evenly over the folds,
    /// `sin θ(y) = sin θ0 + y / (2 S N)`, and the areas from it. Not part of the
    /// reference model; off unless requested.
    FoldUpdate,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StaticState {
    /// MPa
    pub pressure: f64,
    /// mm
    pub displacement: f64,
    pub net_force: f64,
    pub f1: f64,
    pub f2y: f64,
    pub f3y: f64,
    pub fk: f64,
    /// `y` is outside the stiffness fit range.
    pub extrapolated: bool,
}

impl StaticState {
    /// `F1 + F2y − F3y − FK − Fy`; zero up to rounding.
    pub fn decomposition_residual(&self) -> f64 {
        self.f1 + self.f2y - self.f3y - self.fk - self.net_force
    }
}

/// Annular cap, `π (R1o² − R1i²)`.
pub fn area_cap(r1o: f64, r1i: f64) -> Result<f64> {
    if !(r1i >= 0.0 && r1o >= r1i) {
        return Err(Error::domain(format!(
            "cap radii must satisfy R1o >= R1i >= 0, got {r1o} / {r1i}"
        )));
    }
    Ok(PI * (r1o * r1o - r1i * r1i))
}

fn annulus_growth(r: f64, s: f64, theta: f64) -> f64 {
    let reach = s * theta.cos();
    PI * (r + reach).powi(2) - PI * r * r
}

/// External wall, `π (R2i + S cos θ)² − π R2i²` (θ in radians).
pub fn area_external(r2i: f64, s: f64, theta: f64) -> f64 {
    annulus_growth(r2i, s, theta)
}

/// Internal wall, `π (R3i + S cos θ)² − π R3i²` (θ in radians).
pub fn area_internal(r3i: f64, s: f64, theta: f64) -> f64 {
    annulus_growth(r3i, s, theta)
}

/// Rest-geometry projected areas.
pub fn projected_areas(geom: &ActuatorGeometry) -> Result<ProjectedAreas> {
    let s = geom.fold_length()?;
    areas_at_angle(geom, s, geom.fold_angle)
}

fn areas_at_angle(geom: &ActuatorGeometry, s: f64, theta: f64) -> Result<ProjectedAreas> {
    let r = &geom.radii;
    Ok(ProjectedAreas {
        a1: area_cap(r.cap_outer, r.cap_inner)?,
        a2: area_external(r.external_wall_inner, s, theta),
        a3: area_internal(r.internal_wall_outer, s, theta),
    })
}

/// Fold angle after an extension `y` spread evenly over every fold.
pub fn fold_angle_at(spec: &FoldSpec, y: f64) -> f64 {
    let s = spec.fold_angle().sin() + y / (2.0 * spec.fold_length() * f64::from(spec.fold_count()));
    s.clamp(-1.0, 1.0).asin()
}

fn check_pressure(p: f64) -> Result<()> {
    if !p.is_finite() {
        return Err(Error::domain("pressure must be finite"));
    }
    if p < 0.0 {
        return Err(Error::domain(format!(
            "negative pressure {p} MPa: the static model covers extension only"
        )));
    }
    Ok(())
}

/// Net axial force at pressure `p` (MPa) and displacement `y` (mm), rest-geometry areas.
pub fn net_force(
    geom: &ActuatorGeometry,
    poly: &StiffnessCubic,
    p: f64,
    y: f64,
) -> Result<StaticState> {
    net_force_with(geom, poly, p, y, AreaMode::Constant)
}

pub fn net_force_with(
    geom: &ActuatorGeometry,
    poly: &StiffnessCubic,
    p: f64,
    y: f64,
    mode: AreaMode,
) -> Result<StaticState> {
    check_pressure(p)?;
    let areas = match mode {
        AreaMode::Constant => projected_areas(geom)?,
        AreaMode::FoldUpdate => {
            let spec = geom.fold_spec()?;
            areas_at_angle(geom, spec.fold_length(), fold_angle_at(&spec, y))?
        }
    };
    Ok(state_from_areas(&areas, poly, p, y))
}

fn state_from_areas(areas: &ProjectedAreas, poly: &StiffnessCubic, p: f64, y: f64) -> StaticState {
    let f1 = p * areas.a1;
    let f2y = p * areas.a2;
    let f3y = p * areas.a3;
    let fk = poly.force(y);
    StaticState {
        pressure: p,
        displacement: y,
        net_force: f1 + f2y - f3y - fk,
        f1,
        f2y,
        f3y,
        fk,
        extrapolated: poly.is_extrapolated(y),
    }
}

/// Net force at zero displacement.
pub fn blocked_force(geom: &ActuatorGeometry, poly: &StiffnessCubic, p: f64) -> Result<f64> {
    Ok(net_force(geom, poly, p, 0.0)?.net_force)
}

/// Displacement at which the net force vanishes for pressure `p` (MPa).
///
/// Bisection on `[0, 1.5 × geometric extension]`.
pub fn max_extension(geom: &ActuatorGeometry, poly: &StiffnessCubic, p: f64) -> Result<f64> {
    max_extension_with(geom, poly, p, AreaMode::Constant)
}

pub fn max_extension_with(
    geom: &ActuatorGeometry,
    poly: &StiffnessCubic,
    p: f64,
    mode: AreaMode,
) -> Result<f64> {
    check_pressure(p)?;
    if p == 0.0 {
        return Err(Error::domain("max extension needs P > 0"));
    }
    let spec = geom.fold_spec()?;
    let y_hi = 1.5 * extension_total(&spec);
    let f = |y: f64| {
        net_force_with(geom, poly, p, y, mode)
            .map(|s| s.net_force)
            .unwrap_or(f64::NAN)
    };
    bisect(f, 0.0, y_hi, MAX_EXTENSION_TOL_MM).map_err(|e| match e {
        Error::NoRoot(msg) => Error::NoRoot(format!(
            "net force does not reach zero within [0, {y_hi:.3}] mm at {:.1} kPa: {msg}",
            p * 1000.0
        )),
        other => other,
    })
}

/// Static states along a displacement grid.
pub fn force_displacement_curve(
    geom: &ActuatorGeometry,
    poly: &StiffnessCubic,
    p: f64,
    y_grid: &[f64],
) -> Result<Vec<StaticState>> {
    check_pressure(p)?;
    let areas = projected_areas(geom)?;
    Ok(y_grid
        .iter()
        .map(|&y| state_from_areas(&areas, poly, p, y))
        .collect())
}

use crate::error::{Error, Result};
use crate::roots::bisect;
use crate::stiffness::StiffnessCubic;

/// Default viscous damping, N·s/mm.
pub const DEFAULT_DAMPING: f64 = 0.05;
/// Default moving mass, kg.
pub const DEFAULT_MASS: f64 = 2.0;
/// Default supply limit, MPa (200 kPa).
pub const DEFAULT_PRESSURE_MAX: f64 = 0.2;
/// Fill and vent time constants matching a 0.8 s rise and a 0.73 s decay
/// (10–90 % of a first-order lag is `τ ln 9`).
pub const DEFAULT_FILL_TAU: f64 = 0.8 / 2.197_224_577_336_219_6;
pub const DEFAULT_VENT_TAU: f64 = 0.73 / 2.197_224_577_336_219_6;

/// First-order pressure response, `dP/dt = (P_cmd − P) / τ`, with `τ` picked by the
/// direction of flow.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PressureLag {
    pub fill_tau: f64,
    pub vent_tau: f64,
}

impl Default for PressureLag {
    fn default() -> Self {
        Self {
            fill_tau: DEFAULT_FILL_TAU,
            vent_tau: DEFAULT_VENT_TAU,
        }
    }
}

impl PressureLag {
    #[inline]
    pub fn rate(&self, commanded: f64, pressure: f64) -> f64 {
        let tau = if commanded > pressure {
            self.fill_tau
        } else {
            self.vent_tau
        };
        (commanded - pressure) / tau
    }
}

/// Extra axial force switched on at `start_time` (N, positive extends).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Disturbance {
    pub start_time: f64,
    pub force: f64,
}

impl Disturbance {
    #[inline]
    pub fn force_at(&self, t: f64) -> f64 {
        if t >= self.start_time {
            self.force
        } else {
            0.0
        }
    }
}

/// Constants of `M ÿ = A_eff P − b ẏ − FK(y)`.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantParams {
    /// kg
    pub mass: f64,
    /// N·s/mm
    pub damping: f64,
    /// `A1 + A2 − A3`, mm²
    pub effective_area: f64,
    pub stiffness: StiffnessCubic,
    pub pressure_lag: Option<PressureLag>,
    /// Commanded pressure is clamped to `[0, pressure_max]` MPa.
    pub pressure_max: f64,
}

impl PlantParams {
    pub fn new(effective_area: f64, stiffness: StiffnessCubic) -> Self {
        Self {
            mass: DEFAULT_MASS,
            damping: DEFAULT_DAMPING,
            effective_area,
            stiffness,
            pressure_lag: None,
            pressure_max: DEFAULT_PRESSURE_MAX,
        }
    }

    pub fn with_lag(mut self, lag: PressureLag) -> Self {
        self.pressure_lag = Some(lag);
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.mass.is_finite() && self.mass > 0.0) {
            return Err(Error::validation("mass_kg", "must be > 0"));
        }
        if !(self.damping.is_finite() && self.damping >= 0.0) {
            return Err(Error::validation("damping_n_s_per_mm", "must be >= 0"));
        }
        if !(self.effective_area.is_finite() && self.effective_area > 0.0) {
            return Err(Error::validation("effective_area", "must be > 0 mm²"));
        }
        if !(self.pressure_max.is_finite() && self.pressure_max > 0.0) {
            return Err(Error::validation("pressure_max_kpa", "must be > 0"));
        }
        if let Some(lag) = self.pressure_lag {
            if !(lag.fill_tau > 0.0 && lag.vent_tau > 0.0) {
                return Err(Error::validation(
                    "pressure_lag",
                    "time constants must be > 0",
                ));
            }
        }
        Ok(())
    }

    #[inline]
    pub fn clamp_pressure(&self, p: f64) -> f64 {
        p.clamp(0.0, self.pressure_max)
    }

    /// Displacement where `A_eff p = FK(y)`.
    pub fn equilibrium(&self, p: f64) -> Result<f64> {
        let target = self.effective_area * p;
        let f = |y: f64| self.stiffness.force(y) - target;
        let (mut lo, mut hi) = (-1.0, 1.0);
        for _ in 0..60 {
            if f(lo) <= 0.0 && f(hi) >= 0.0 {
                return bisect(f, lo, hi, 1e-13);
            }
            lo *= 2.0;
            hi *= 2.0;
        }
        Err(Error::NoRoot(format!(
            "no equilibrium displacement for P = {p} MPa"
        )))
    }
}

/// `(dy/dt, dv/dt)` in mm/s and mm/s². The factor 1000 turns N/kg (m/s²) into mm/s².
pub fn plant_derivatives(params: &PlantParams, y: f64, v: f64, p: f64) -> Result<(f64, f64)> {
    if !(y.is_finite() && v.is_finite() && p.is_finite()) {
        return Err(Error::domain("plant state must be finite"));
    }
    Ok(derivatives(params, y, v, p, 0.0))
}

#[inline]
pub(crate) fn derivatives(params: &PlantParams, y: f64, v: f64, p: f64, load: f64) -> (f64, f64) {
    let force = params.effective_area * p - params.damping * v - params.stiffness.force(y) + load;
    (v, 1000.0 / params.mass * force)
}

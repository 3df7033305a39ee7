use super::plant::{derivatives, Disturbance, PlantParams};
use crate::error::{Error, Result};

/// Default plant step, s.
pub const DEFAULT_DT: f64 = 1e-3;
/// `|y|` or `|v|` beyond this aborts the run.
pub const DIVERGENCE_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PlantState {
    /// mm
    pub y: f64,
    /// mm/s
    pub v: f64,
    /// Actual chamber pressure, MPa.
    pub p: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    pub t: f64,
    pub setpoint: f64,
    pub y: f64,
    pub v: f64,
    pub p: f64,
    pub u: f64,
    pub e: f64,
}

/// Uniformly sampled simulation record.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimTrace {
    pub dt: f64,
    pub samples: Vec<TraceSample>,
}

impl SimTrace {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn last(&self) -> Option<&TraceSample> {
        self.samples.last()
    }

    pub fn times(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.t).collect()
    }

    pub fn displacements(&self) -> Vec<f64> {
        self.samples.iter().map(|s| s.y).collect()
    }
}

/// One classical RK4 step with the pressure command held over the step.
#[inline]
pub(crate) fn rk4_step(
    params: &PlantParams,
    s: PlantState,
    command: f64,
    load: f64,
    dt: f64,
) -> PlantState {
    match params.pressure_lag {
        None => {
            let p = command;
            let f = |y: f64, v: f64| derivatives(params, y, v, p, load);
            let (k1y, k1v) = f(s.y, s.v);
            let (k2y, k2v) = f(s.y + 0.5 * dt * k1y, s.v + 0.5 * dt * k1v);
            let (k3y, k3v) = f(s.y + 0.5 * dt * k2y, s.v + 0.5 * dt * k2v);
            let (k4y, k4v) = f(s.y + dt * k3y, s.v + dt * k3v);
            PlantState {
                y: s.y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                v: s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
                p,
            }
        }
        Some(lag) => {
            let f = |y: f64, v: f64, p: f64| {
                let (dy, dv) = derivatives(params, y, v, p, load);
                (dy, dv, lag.rate(command, p))
            };
            let (k1y, k1v, k1p) = f(s.y, s.v, s.p);
            let (k2y, k2v, k2p) = f(
                s.y + 0.5 * dt * k1y,
                s.v + 0.5 * dt * k1v,
                s.p + 0.5 * dt * k1p,
            );
            let (k3y, k3v, k3p) = f(
                s.y + 0.5 * dt * k2y,
                s.v + 0.5 * dt * k2v,
                s.p + 0.5 * dt * k2p,
            );
            let (k4y, k4v, k4p) = f(s.y + dt * k3y, s.v + dt * k3v, s.p + dt * k3p);
            PlantState {
                y: s.y + dt / 6.0 * (k1y + 2.0 * k2y + 2.0 * k3y + k4y),
                v: s.v + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v),
                p: s.p + dt / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p),
            }
        }
    }
}

pub(crate) fn check_finite(s: &PlantState, t: f64) -> Result<()> {
    let ok = s.y.is_finite()
        && s.v.is_finite()
        && s.y.abs() <= DIVERGENCE_LIMIT
        && s.v.abs() <= DIVERGENCE_LIMIT;
    if ok {
        Ok(())
    } else {
        Err(Error::Divergence {
            time: t,
            y: s.y.abs(),
            v: s.v.abs(),
        })
    }
}

pub(crate) fn step_count(dt: f64, duration: f64) -> Result<usize> {
    if !(dt.is_finite() && dt > 0.0) {
        return Err(Error::domain(format!("time step must be > 0, got {dt}")));
    }
    if !(duration.is_finite() && duration >= 0.0) {
        return Err(Error::domain(format!(
            "duration must be >= 0, got {duration}"
        )));
    }
    Ok((duration / dt).round() as usize)
}

/// Open-loop fixed-step RK4 run driven by a commanded pressure signal (MPa).
///
/// The command is sampled at the start of each step and clamped to the supply range.
/// Without a pressure lag the chamber pressure equals the command.
pub fn integrate_rk4<F>(
    params: &PlantParams,
    initial: PlantState,
    pressure_signal: F,
    dt: f64,
    duration: f64,
) -> Result<SimTrace>
where
    F: Fn(f64) -> f64,
{
    integrate_rk4_loaded(params, initial, pressure_signal, None, dt, duration)
}

pub fn integrate_rk4_loaded<F>(
    params: &PlantParams,
    initial: PlantState,
    pressure_signal: F,
    disturbance: Option<Disturbance>,
    dt: f64,
    duration: f64,
) -> Result<SimTrace>
where
    F: Fn(f64) -> f64,
{
    params.validate()?;
    let n = step_count(dt, duration)?;
    let mut samples = Vec::with_capacity(n + 1);
    let mut s = initial;
    check_finite(&s, 0.0)?;
    for i in 0..=n {
        let t = i as f64 * dt;
        let u = params.clamp_pressure(pressure_signal(t));
        if params.pressure_lag.is_none() {
            s.p = u;
        }
        samples.push(TraceSample {
            t,
            setpoint: 0.0,
            y: s.y,
            v: s.v,
            p: s.p,
            u,
            e: 0.0,
        });
        if i == n {
            break;
        }
        let load = disturbance.map_or(0.0, |d| d.force_at(t));
        s = rk4_step(params, s, u, load, dt);
        check_finite(&s, t + dt)?;
    }
    Ok(SimTrace { dt, samples })
}

/// Final state of an open-loop run without keeping the trace.
pub fn terminal_state<F>(
    params: &PlantParams,
    initial: PlantState,
    pressure_signal: F,
    dt: f64,
    duration: f64,
) -> Result<PlantState>
where
    F: Fn(f64) -> f64,
{
    params.validate()?;
    let n = step_count(dt, duration)?;
    let mut s = initial;
    for i in 0..n {
        let t = i as f64 * dt;
        let u = params.clamp_pressure(pressure_signal(t));
        s = rk4_step(params, s, u, 0.0, dt);
        check_finite(&s, t + dt)?;
    }
    if params.pressure_lag.is_none() {
        s.p = params.clamp_pressure(pressure_signal(n as f64 * dt));
    }
    Ok(s)
}

//! Tracking and transient metrics computed from a [`SimTrace`].

use std::f64::consts::TAU;

use nalgebra::{Matrix3, Vector3};
use serde::Serialize;

use super::integrate::SimTrace;
use super::trajectory::{TrajectoryKind, TrajectorySpec};
use crate::error::{Error, Result};

/// Half-width of the settling band as a fraction of the total change.
pub const SETTLING_BAND: f64 = 0.02;
/// Cycles used for sinusoid amplitude/phase estimation.
pub const SINE_FIT_CYCLES: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Default)]
pub struct ResponseMetrics {
    pub rise_time_10_90: f64,
    pub settling_time: f64,
    /// Percent of the total change.
    pub overshoot: f64,
    /// `setpoint − y` (signed), mm.
    pub steady_state_error: f64,
    pub rmse: f64,
    pub amplitude_ratio: Option<f64>,
    /// Degrees; positive when the output lags the command.
    pub phase_lag: Option<f64>,
}

/// Transient figures of a response that moves from `ys[0]` to `ys[last]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepFigures {
    pub rise_time: f64,
    pub settling_time: f64,
    pub overshoot: f64,
    pub final_value: f64,
}

/// Rise (10→90 %), settling (±2 %) and overshoot, relative to the first and last samples.
///
/// Thresholds use the first sample at or past each level; no interpolation.
pub fn step_figures(times: &[f64], ys: &[f64]) -> Result<StepFigures> {
    if times.len() != ys.len() || times.len() < 2 {
        return Err(Error::domain("need at least two aligned samples"));
    }
    let y0 = ys[0];
    let y_final = *ys.last().expect("len >= 2");
    let change = y_final - y0;
    if change == 0.0 {
        return Ok(StepFigures {
            rise_time: 0.0,
            settling_time: 0.0,
            overshoot: 0.0,
            final_value: y_final,
        });
    }
    let frac = |y: f64| (y - y0) / change;
    let first_at = |level: f64| {
        ys.iter()
            .position(|&y| frac(y) >= level)
            .map(|i| times[i])
            .unwrap_or(*times.last().expect("len >= 2"))
    };
    let rise_time = first_at(0.9) - first_at(0.1);

    let band = SETTLING_BAND * change.abs();
    let settling_time = match ys.iter().rposition(|&y| (y - y_final).abs() > band) {
        Some(i) if i + 1 < times.len() => times[i + 1] - times[0],
        Some(_) => times[times.len() - 1] - times[0],
        None => 0.0,
    };

    let peak = ys
        .iter()
        .map(|&y| frac(y))
        .fold(f64::NEG_INFINITY, f64::max);
    let overshoot = ((peak - 1.0) * 100.0).max(0.0);
    Ok(StepFigures {
        rise_time,
        settling_time,
        overshoot,
        final_value: y_final,
    })
}

/// Least-squares fit `x ≈ c + a sin ωt + b cos ωt`; returns `(c, amplitude, phase rad)`
/// with `x ≈ c + amplitude · sin(ωt + phase)`.
pub fn fit_sinusoid(times: &[f64], xs: &[f64], frequency: f64) -> Result<(f64, f64, f64)> {
    if times.len() != xs.len() || times.len() < 3 {
        return Err(Error::domain("need at least three aligned samples"));
    }
    let w = TAU * frequency;
    let mut ata = Matrix3::<f64>::zeros();
    let mut atb = Vector3::<f64>::zeros();
    for (&t, &x) in times.iter().zip(xs) {
        let row = Vector3::new(1.0, (w * t).sin(), (w * t).cos());
        ata += row * row.transpose();
        atb += row * x;
    }
    let sol = ata
        .lu()
        .solve(&atb)
        .ok_or_else(|| Error::domain("sinusoid fit is singular (window too short)"))?;
    let (c, a, b) = (sol[0], sol[1], sol[2]);
    Ok((c, a.hypot(b), b.atan2(a)))
}

fn wrap_degrees(mut d: f64) -> f64 {
    while d > 180.0 {
        d -= 360.0;
    }
    while d <= -180.0 {
        d += 360.0;
    }
    d
}

/// Amplitude ratio and phase lag (degrees) of `output` against `command` at `frequency`.
pub fn amplitude_and_phase(
    times: &[f64],
    command: &[f64],
    output: &[f64],
    frequency: f64,
) -> Result<(f64, f64)> {
    let (_, a_cmd, ph_cmd) = fit_sinusoid(times, command, frequency)?;
    let (_, a_out, ph_out) = fit_sinusoid(times, output, frequency)?;
    if a_cmd == 0.0 {
        return Err(Error::domain("command has zero amplitude"));
    }
    Ok((a_out / a_cmd, wrap_degrees((ph_cmd - ph_out).to_degrees())))
}

fn rms(xs: impl Iterator<Item = f64>) -> f64 {
    let (sum, n) = xs.fold((0.0, 0usize), |(s, n), x| (s + x * x, n + 1));
    if n == 0 {
        0.0
    } else {
        (sum / n as f64).sqrt()
    }
}

/// Metrics appropriate to the trajectory kind.
///
/// - step: transient figures, error at the end, RMSE after settling
/// - ramp: transient figures of the whole run, error at the end of the ramp
///   segment, RMSE over the run
/// - sinusoid: amplitude ratio, phase lag, mean error and RMSE over the last three
///   command cycles
pub fn response_metrics(trace: &SimTrace, trajectory: &TrajectorySpec) -> Result<ResponseMetrics> {
    if trace.len() < 2 {
        return Err(Error::domain("trace too short for metrics"));
    }
    let times = trace.times();
    let ys = trace.displacements();
    let last = trace.last().expect("len >= 2");

    match trajectory.kind {
        TrajectoryKind::Step { .. } => {
            let fig = step_figures(&times, &ys)?;
            let t_settle = times[0] + fig.settling_time;
            let rmse = rms(trace
                .samples
                .iter()
                .filter(|s| s.t >= t_settle)
                .map(|s| s.e));
            Ok(ResponseMetrics {
                rise_time_10_90: fig.rise_time,
                settling_time: fig.settling_time,
                overshoot: fig.overshoot,
                steady_state_error: last.e,
                rmse,
                amplitude_ratio: None,
                phase_lag: None,
            })
        }
        TrajectoryKind::Ramp { ramp_duration, .. } => {
            let fig = step_figures(&times, &ys)?;
            let end = ramp_duration.min(last.t);
            let idx = trace
                .samples
                .iter()
                .rposition(|s| s.t <= end + 1e-12)
                .unwrap_or(0);
            Ok(ResponseMetrics {
                rise_time_10_90: fig.rise_time,
                settling_time: fig.settling_time,
                overshoot: fig.overshoot,
                steady_state_error: trace.samples[idx].e,
                rmse: rms(trace.samples.iter().map(|s| s.e)),
                amplitude_ratio: None,
                phase_lag: None,
            })
        }
        TrajectoryKind::Sinusoid { frequency, .. } => {
            let window = SINE_FIT_CYCLES / frequency;
            let start = last.t - window;
            if start < times[0] - 1e-12 {
                return Err(Error::domain(format!(
                    "trace shorter than {SINE_FIT_CYCLES} command cycles"
                )));
            }
            let tail: Vec<_> = trace.samples.iter().filter(|s| s.t >= start).collect();
            let t: Vec<f64> = tail.iter().map(|s| s.t).collect();
            let r: Vec<f64> = tail.iter().map(|s| s.setpoint).collect();
            let y: Vec<f64> = tail.iter().map(|s| s.y).collect();
            let (ratio, lag) = amplitude_and_phase(&t, &r, &y, frequency)?;
            let mean_err = tail.iter().map(|s| s.e).sum::<f64>() / tail.len() as f64;
            Ok(ResponseMetrics {
                rise_time_10_90: 0.0,
                settling_time: 0.0,
                overshoot: 0.0,
                steady_state_error: mean_err,
                rmse: rms(tail.iter().map(|s| s.e)),
                amplitude_ratio: Some(ratio),
                phase_lag: Some(lag),
            })
        }
    }
}

//! Square-wave frequency sweeps and −3 dB bandwidth.

use serde::Serialize;

use super::integrate::{check_finite, rk4_step, PlantState};
use super::plant::PlantParams;
use crate::error::{Error, Result};
use crate::par::{self, Execution};

/// `20 log10(1/√2)`.
pub const MINUS_3DB: f64 = -3.010_299_956_639_812;
/// Fewer plant steps than this per drive period is rejected.
pub const MIN_STEPS_PER_CYCLE: usize = 20;

/// Square-wave pressure drive, low for the first half of each period.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DriveSpec {
    /// MPa
    pub pressure_low: f64,
    /// MPa
    pub pressure_high: f64,
    pub transient_cycles: usize,
    pub measured_cycles: usize,
}

impl DriveSpec {
    pub fn square(pressure_high: f64) -> Self {
        Self {
            pressure_low: 0.0,
            pressure_high,
            transient_cycles: 5,
            measured_cycles: 3,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.pressure_low.is_finite()
            && self.pressure_high.is_finite()
            && self.pressure_low >= 0.0
            && self.pressure_high > self.pressure_low)
        {
            return Err(Error::validation(
                "drive",
                "need 0 <= pressure_low < pressure_high",
            ));
        }
        if self.measured_cycles == 0 {
            return Err(Error::validation("drive.measured_cycles", "must be >= 1"));
        }
        Ok(())
    }

    #[inline]
    fn command(&self, t: f64, frequency: f64) -> f64 {
        if (t * frequency).fract() < 0.5 {
            self.pressure_low
        } else {
            self.pressure_high
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FrequencyPoint {
    /// Hz
    pub frequency: f64,
    /// Half peak-to-peak displacement, mm.
    pub amplitude: f64,
    /// Relative to the largest amplitude in the sweep.
    pub amplitude_db: f64,
}

/// Half peak-to-peak displacement over the measured cycles at one frequency.
pub fn response_amplitude(
    params: &PlantParams,
    drive: &DriveSpec,
    frequency: f64,
    dt: f64,
) -> Result<f64> {
    if !(frequency.is_finite() && frequency > 0.0) {
        return Err(Error::domain(format!(
            "frequency must be > 0, got {frequency}"
        )));
    }
    let per_cycle = (1.0 / (frequency * dt)).floor() as usize;
    if per_cycle < MIN_STEPS_PER_CYCLE {
        return Err(Error::domain(format!(
            "dt = {dt} s resolves {frequency} Hz with only {per_cycle} steps per cycle"
        )));
    }
    let total = (drive.transient_cycles + drive.measured_cycles) as f64 / frequency;
    let start = drive.transient_cycles as f64 / frequency;
    let n = (total / dt).round() as usize;

    let mut s = PlantState {
        y: params.equilibrium(drive.pressure_low)?,
        v: 0.0,
        p: drive.pressure_low,
    };
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for i in 0..n {
        let t = i as f64 * dt;
        if t >= start {
            lo = lo.min(s.y);
            hi = hi.max(s.y);
        }
        let u = params.clamp_pressure(drive.command(t, frequency));
        s = rk4_step(params, s, u, 0.0, dt);
        check_finite(&s, t + dt)?;
    }
    lo = lo.min(s.y);
    hi = hi.max(s.y);
    Ok(0.5 * (hi - lo))
}

/// Inclusive frequency grid `f_min, f_min + df, …, ≤ f_max`.
pub fn frequency_grid(f_min: f64, f_max: f64, df: f64) -> Result<Vec<f64>> {
    if !(f_min > 0.0 && f_max >= f_min && df > 0.0 && f_max.is_finite()) {
        return Err(Error::validation(
            "frequency range",
            format!("need 0 < fmin <= fmax and df > 0, got {f_min}..{f_max} step {df}"),
        ));
    }
    let n = ((f_max - f_min) / df + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| f_min + i as f64 * df).collect())
}

pub fn frequency_response(
    params: &PlantParams,
    drive: &DriveSpec,
    f_min: f64,
    f_max: f64,
    df: f64,
    dt: f64,
) -> Result<Vec<FrequencyPoint>> {
    frequency_response_with(Execution::Auto, params, drive, f_min, f_max, df, dt)
}

pub fn frequency_response_with(
    exec: Execution,
    params: &PlantParams,
    drive: &DriveSpec,
    f_min: f64,
    f_max: f64,
    df: f64,
    dt: f64,
) -> Result<Vec<FrequencyPoint>> {
    params.validate()?;
    drive.validate()?;
    let grid = frequency_grid(f_min, f_max, df)?;
    let amplitudes = par::map_with(exec, &grid, |&f| response_amplitude(params, drive, f, dt))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    to_db(&grid, &amplitudes)
}

/// Builds a response curve from raw amplitudes, normalised to the largest one.
pub fn to_db(frequencies: &[f64], amplitudes: &[f64]) -> Result<Vec<FrequencyPoint>> {
    if frequencies.len() != amplitudes.len() {
        return Err(Error::domain("frequency and amplitude lengths differ"));
    }
    let peak = amplitudes.iter().copied().fold(0.0, f64::max);
    if !(peak > 0.0) {
        return Err(Error::domain("response amplitude is zero everywhere"));
    }
    Ok(frequencies
        .iter()
        .zip(amplitudes)
        .map(|(&frequency, &amplitude)| FrequencyPoint {
            frequency,
            amplitude,
            amplitude_db: 20.0 * (amplitude / peak).log10(),
        })
        .collect())
}

/// Number of downward −3 dB crossings in the curve.
pub fn crossing_count(curve: &[FrequencyPoint]) -> usize {
    curve
        .windows(2)
        .filter(|w| w[0].amplitude_db > MINUS_3DB && w[1].amplitude_db <= MINUS_3DB)
        .count()
}

/// First −3 dB crossing, linearly interpolated in dB between grid points.
pub fn bandwidth(curve: &[FrequencyPoint]) -> Result<f64> {
    for w in curve.windows(2) {
        let (a, b) = (w[0], w[1]);
        if a.amplitude_db > MINUS_3DB && b.amplitude_db <= MINUS_3DB {
            if b.amplitude_db == MINUS_3DB {
                return Ok(b.frequency);
            }
            let t = (a.amplitude_db - MINUS_3DB) / (a.amplitude_db - b.amplitude_db);
            return Ok(a.frequency + t * (b.frequency - a.frequency));
        }
    }
    Err(Error::NoCrossing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::plant::PressureLag;
    use crate::stiffness::L13;

    /// dB against the DC gain, as the analytic corner is defined.
    fn first_order(fc: f64, grid: &[f64]) -> Vec<FrequencyPoint> {
        grid.iter()
            .map(|&f| {
                let amplitude = 1.0 / (1.0 + (f / fc).powi(2)).sqrt();
                FrequencyPoint {
                    frequency: f,
                    amplitude,
                    amplitude_db: 20.0 * amplitude.log10(),
                }
            })
            .collect()
    }

    #[test]
    fn synthetic_corner() {
        let grid = frequency_grid(0.1, 5.0, 0.1).unwrap();
        let fc = 0.65;
        let bw = bandwidth(&first_order(fc, &grid)).unwrap();
        assert!((bw - fc).abs() / fc < 0.02, "{bw}");
    }

    #[test]
    fn flat_curve_has_no_crossing() {
        let grid = [0.1, 0.2, 0.3];
        let curve = to_db(&grid, &[1.0, 1.0, 1.0]).unwrap();
        assert!(matches!(bandwidth(&curve), Err(Error::NoCrossing)));
    }

    #[test]
    fn crossing_on_grid_point() {
        let grid = [1.0, 2.0, 3.0];
        let curve = vec![
            FrequencyPoint {
                frequency: 1.0,
                amplitude: 1.0,
                amplitude_db: 0.0,
            },
            FrequencyPoint {
                frequency: 2.0,
                amplitude: 0.0,
                amplitude_db: MINUS_3DB,
            },
            FrequencyPoint {
                frequency: 3.0,
                amplitude: 0.0,
                amplitude_db: -6.0,
            },
        ];
        assert_eq!(bandwidth(&curve).unwrap(), grid[1]);
    }

    #[test]
    fn grid_is_inclusive() {
        let g = frequency_grid(0.1, 1.0, 0.1).unwrap();
        assert_eq!(g.len(), 10);
        assert_eq!(frequency_grid(2.0, 2.0, 0.5).unwrap(), vec![2.0]);
        assert!(frequency_grid(0.0, 1.0, 0.1).is_err());
    }

    #[test]
    fn quasi_static_amplitude_without_lag() {
        let mut params = PlantParams::new(486.0, L13);
        params.damping = 0.5;
        let drive = DriveSpec::square(0.1);
        let stroke = params.equilibrium(0.1).unwrap() - params.equilibrium(0.0).unwrap();
        let a = response_amplitude(&params, &drive, 0.05, 1e-3).unwrap();
        assert!(
            (a - 0.5 * stroke).abs() / (0.5 * stroke) < 1e-3,
            "{a} vs {stroke}"
        );
    }

    #[test]
    fn lagged_sweep_rolls_off() {
        let params = PlantParams::new(486.0, L13).with_lag(PressureLag::default());
        let curve =
            frequency_response(&params, &DriveSpec::square(0.1), 0.1, 2.0, 0.1, 1e-3).unwrap();
        assert!(curve.windows(2).all(|w| w[1].amplitude <= w[0].amplitude));
        assert_eq!(crossing_count(&curve), 1);
        assert!(bandwidth(&curve).is_ok());
    }

    #[test]
    fn coarse_dt_is_rejected() {
        let params = PlantParams::new(486.0, L13);
        assert!(response_amplitude(&params, &DriveSpec::square(0.1), 100.0, 1e-3).is_err());
    }
}

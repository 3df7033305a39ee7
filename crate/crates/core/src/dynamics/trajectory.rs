use std::f64::consts::TAU;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TrajectoryKind {
    /// Setpoint jumps to `amplitude` mm at t = 0.
    Step { amplitude: f64 },
    /// Setpoint rises at `slope` mm/s for `ramp_duration` s, then holds.
    Ramp { slope: f64, ramp_duration: f64 },
    /// `offset + amplitude sin(2π f t)`, mm.
    Sinusoid {
        amplitude: f64,
        offset: f64,
        frequency: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectorySpec {
    pub kind: TrajectoryKind,
    /// Total simulated time, s.
    pub duration: f64,
}

impl TrajectorySpec {
    pub fn step(amplitude: f64, duration: f64) -> Self {
        Self {
            kind: TrajectoryKind::Step { amplitude },
            duration,
        }
    }

    pub fn ramp(slope: f64, ramp_duration: f64, duration: f64) -> Self {
        Self {
            kind: TrajectoryKind::Ramp {
                slope,
                ramp_duration,
            },
            duration,
        }
    }

    pub fn sinusoid(amplitude: f64, offset: f64, frequency: f64, duration: f64) -> Self {
        Self {
            kind: TrajectoryKind::Sinusoid {
                amplitude,
                offset,
                frequency,
            },
            duration,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.duration.is_finite() && self.duration > 0.0) {
            return Err(Error::validation("trajectory.duration", "must be > 0 s"));
        }
        let finite = match self.kind {
            TrajectoryKind::Step { amplitude } => amplitude.is_finite(),
            TrajectoryKind::Ramp {
                slope,
                ramp_duration,
            } => slope.is_finite() && ramp_duration.is_finite() && ramp_duration >= 0.0,
            TrajectoryKind::Sinusoid {
                amplitude,
                offset,
                frequency,
            } => {
                amplitude.is_finite()
                    && offset.is_finite()
                    && frequency.is_finite()
                    && frequency > 0.0
            }
        };
        if !finite {
            return Err(Error::validation("trajectory", "parameters out of range"));
        }
        Ok(())
    }

    /// Setpoint in mm at time `t`.
    pub fn setpoint(&self, t: f64) -> f64 {
        match self.kind {
            TrajectoryKind::Step { amplitude } => amplitude,
            TrajectoryKind::Ramp {
                slope,
                ramp_duration,
            } => slope * t.clamp(0.0, ramp_duration),
            TrajectoryKind::Sinusoid {
                amplitude,
                offset,
                frequency,
            } => offset + amplitude * (TAU * frequency * t).sin(),
        }
    }

    /// Largest setpoint over the run.
    pub fn max_setpoint(&self) -> f64 {
        match self.kind {
            TrajectoryKind::Step { amplitude } => amplitude,
            TrajectoryKind::Ramp {
                slope,
                ramp_duration,
            } => (slope * ramp_duration.min(self.duration)).max(0.0),
            TrajectoryKind::Sinusoid {
                amplitude, offset, ..
            } => offset + amplitude.abs(),
        }
    }

    /// Warning text when the setpoint exceeds the reachable stroke.
    pub fn reachability_warning(&self, max_stroke: f64) -> Option<String> {
        let peak = self.max_setpoint();
        (peak > max_stroke).then(|| {
            format!("setpoint peak {peak:.3} mm exceeds the reachable stroke {max_stroke:.3} mm")
        })
    }
}

impl std::str::FromStr for TrajectorySpec {
    type Err = Error;

    /// `step:AMP:DUR`, `ramp:SLOPE:RAMP_DUR:DUR`, `sine:AMP:OFFSET:FREQ:DUR`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(':').collect();
        let nums = parts[1..]
            .iter()
            .map(|p| {
                p.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::validation("trajectory", format!("`{p}` is not a number")))
            })
            .collect::<Result<Vec<f64>>>()?;
        let spec = match (parts[0], nums.as_slice()) {
            ("step", [a, d]) => Self::step(*a, *d),
            ("ramp", [k, r, d]) => Self::ramp(*k, *r, *d),
            ("sine" | "sinusoid", [a, o, f, d]) => Self::sinusoid(*a, *o, *f, *d),
            _ => {
                return Err(Error::validation(
                    "trajectory",
                    format!(
                        "expected step:AMP:DUR, ramp:SLOPE:RAMP_DUR:DUR or sine:AMP:OFFSET:FREQ:DUR, got `{s}`"
                    ),
                ))
            }
        };
        spec.validate()?;
        Ok(spec)
    }
}

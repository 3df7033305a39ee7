//! Discrete PID on displacement error with pressure output.
//!
//! - integral: trapezoidal, with clamping anti-windup at the output limits
//! - derivative: on the measurement (no kick on setpoint steps), one-sample backward
//!   difference

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PidGains {
    /// MPa/mm
    pub kp: f64,
    /// MPa/(mm·s)
    pub ki: f64,
    /// MPa·s/mm
    pub kd: f64,
    /// `(u_min, u_max)`, MPa
    pub output_limits: (f64, f64),
    /// s
    pub sample_time: f64,
    /// Freeze the integrator while the output is clamped.
    pub anti_windup: bool,
}

impl PidGains {
    pub fn new(
        kp: f64,
        ki: f64,
        kd: f64,
        output_limits: (f64, f64),
        sample_time: f64,
    ) -> Result<Self> {
        let g = Self {
            kp,
            ki,
            kd,
            output_limits,
            sample_time,
            anti_windup: true,
        };
        g.validate()?;
        Ok(g)
    }

    /// Gains tuned on the L13 plant with the default pressure lag: about 1 s rise,
    /// 2 s settling and no overshoot on mid-stroke steps. Output spans `[0, pressure_max]`.
    pub fn suggested(pressure_max: f64) -> Self {
        Self {
            kp: 3.4e-3,
            ki: 9.4e-3,
            kd: 2.0e-4,
            output_limits: (0.0, pressure_max),
            sample_time: 0.01,
            anti_windup: true,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if ![self.kp, self.ki, self.kd].iter().all(|g| g.is_finite()) {
            return Err(Error::validation("pid", "gains must be finite"));
        }
        if !(self.sample_time.is_finite() && self.sample_time > 0.0) {
            return Err(Error::validation("pid.sample_time_s", "must be > 0"));
        }
        let (lo, hi) = self.output_limits;
        if !(lo < hi) {
            return Err(Error::validation(
                "pid.output_limits_kpa",
                format!("need u_min < u_max, got [{lo}, {hi}]"),
            ));
        }
        Ok(())
    }
}

/// Controller memory between samples.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PidState {
    /// Integral term already multiplied by `ki`, MPa.
    pub integral: f64,
    pub prev_error: Option<f64>,
    pub prev_measurement: Option<f64>,
    /// Output was clamped on the last step.
    pub saturated: bool,
}

/// One controller update. Returns the clamped command and the new state.
pub fn pid_step(
    gains: &PidGains,
    state: &PidState,
    setpoint: f64,
    measurement: f64,
    dt: f64,
) -> (f64, PidState) {
    let error = setpoint - measurement;
    let (u_min, u_max) = gains.output_limits;

    let derivative = match state.prev_measurement {
        Some(prev) => -gains.kd * (measurement - prev) / dt,
        None => 0.0,
    };
    let candidate = match state.prev_error {
        Some(prev) => state.integral + gains.ki * dt * 0.5 * (error + prev),
        None => state.integral,
    };

    let proportional = gains.kp * error;
    let unclamped = proportional + candidate + derivative;
    let mut integral = candidate;
    if gains.anti_windup {
        let pushing_up = unclamped > u_max && candidate > state.integral;
        let pushing_down = unclamped < u_min && candidate < state.integral;
        if pushing_up || pushing_down {
            integral = state.integral;
        }
    }
    let raw = proportional + integral + derivative;
    let u = raw.clamp(u_min, u_max);
    (
        u,
        PidState {
            integral,
            prev_error: Some(error),
            prev_measurement: Some(measurement),
            saturated: u != raw,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gains(kp: f64, ki: f64, kd: f64) -> PidGains {
        PidGains::new(kp, ki, kd, (-100.0, 100.0), 0.01).unwrap()
    }

    #[test]
    fn proportional_only() {
        let (u, _) = pid_step(&gains(2.0, 0.0, 0.0), &PidState::default(), 1.0, 0.0, 0.01);
        assert_eq!(u, 2.0);
    }

    #[test]
    fn derivative_vanishes_for_constant_error() {
        let g = gains(0.0, 0.0, 5.0);
        let mut st = PidState::default();
        for _ in 0..5 {
            let (u, next) = pid_step(&g, &st, 3.0, 1.0, 0.01);
            assert_eq!(u, 0.0);
            st = next;
        }
    }

    #[test]
    fn derivative_acts_on_measurement() {
        let g = gains(0.0, 0.0, 1.0);
        let (_, st) = pid_step(&g, &PidState::default(), 0.0, 0.0, 0.1);
        // Setpoint jump: no kick.
        let (u, st) = pid_step(&g, &st, 10.0, 0.0, 0.1);
        assert_eq!(u, 0.0);
        let (u, _) = pid_step(&g, &st, 10.0, 0.5, 0.1);
        assert!((u + 5.0).abs() < 1e-12);
    }

    #[test]
    fn trapezoidal_integral() {
        let g = gains(0.0, 2.0, 0.0);
        let (_, st) = pid_step(&g, &PidState::default(), 1.0, 0.0, 0.5);
        let (u, _) = pid_step(&g, &st, 3.0, 0.0, 0.5);
        // 2 * 0.5 * (1 + 3) / 2
        assert!((u - 2.0).abs() < 1e-12);
    }

    #[test]
    fn clamping_freezes_the_integrator() {
        let g = PidGains::new(1.0, 10.0, 0.0, (0.0, 2.0), 0.01).unwrap();
        let mut st = PidState::default();
        for _ in 0..200 {
            let (u, next) = pid_step(&g, &st, 5.0, 0.0, 0.01);
            assert!(u <= 2.0);
            st = next;
        }
        // Kp e = 5 alone saturates, so the integrator never charges.
        assert_eq!(st.integral, 0.0);
        assert!(st.saturated);

        let free = PidGains {
            anti_windup: false,
            ..g
        };
        let mut st = PidState::default();
        for _ in 0..200 {
            st = pid_step(&free, &st, 5.0, 0.0, 0.01).1;
        }
        assert!(st.integral > 90.0);
    }

    #[test]
    fn integrator_may_unwind_while_clamped() {
        let g = PidGains::new(1.0, 10.0, 0.0, (0.0, 2.0), 0.01).unwrap();
        let st = PidState {
            integral: 5.0,
            prev_error: Some(-1.0),
            prev_measurement: Some(1.0),
            saturated: true,
        };
        let (_, next) = pid_step(&g, &st, 0.0, 1.0, 0.01);
        assert!(next.integral < 5.0);
    }

    #[test]
    fn rejects_bad_gains() {
        assert!(PidGains::new(1.0, 0.0, 0.0, (1.0, 1.0), 0.01).is_err());
        assert!(PidGains::new(1.0, 0.0, 0.0, (0.0, 1.0), 0.0).is_err());
    }
}

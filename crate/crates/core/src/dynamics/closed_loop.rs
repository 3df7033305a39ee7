use super::integrate::{check_finite, rk4_step, step_count, PlantState, SimTrace, TraceSample};
use super::pid::{pid_step, PidGains, PidState};
use super::plant::{Disturbance, PlantParams};
use super::trajectory::TrajectorySpec;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ClosedLoopOptions {
    /// Starting state; defaults to rest at zero pressure.
    pub initial: Option<PlantState>,
    pub disturbance: Option<Disturbance>,
}

/// How many plant steps fit in one controller period; errors unless `dt` divides it.
pub fn substeps(sample_time: f64, dt: f64) -> Result<usize> {
    if !(dt > 0.0 && dt <= sample_time * (1.0 + 1e-12)) {
        return Err(Error::validation(
            "dt",
            format!("plant step {dt} s must be positive and no larger than the controller period {sample_time} s"),
        ));
    }
    let ratio = sample_time / dt;
    let n = ratio.round();
    if (ratio - n).abs() > 1e-9 * ratio {
        return Err(Error::validation(
            "dt",
            format!("plant step {dt} s does not divide the controller period {sample_time} s"),
        ));
    }
    Ok(n as usize)
}

/// PID regulation of displacement along a trajectory.
pub fn simulate_closed_loop(
    params: &PlantParams,
    gains: &PidGains,
    trajectory: &TrajectorySpec,
    dt: f64,
) -> Result<SimTrace> {
    simulate_closed_loop_with(params, gains, trajectory, dt, &ClosedLoopOptions::default())
}

pub fn simulate_closed_loop_with(
    params: &PlantParams,
    gains: &PidGains,
    trajectory: &TrajectorySpec,
    dt: f64,
    opts: &ClosedLoopOptions,
) -> Result<SimTrace> {
    params.validate()?;
    gains.validate()?;
    trajectory.validate()?;
    let per_sample = substeps(gains.sample_time, dt)?;
    let n = step_count(dt, trajectory.duration)?;

    let mut s = match opts.initial {
        Some(s) => s,
        None => PlantState {
            y: params.equilibrium(0.0)?,
            v: 0.0,
            p: 0.0,
        },
    };
    check_finite(&s, 0.0)?;
    let mut pid = PidState::default();
    let mut u = 0.0;
    let mut samples = Vec::with_capacity(n + 1);

    for i in 0..=n {
        let t = i as f64 * dt;
        let r = trajectory.setpoint(t);
        if i % per_sample == 0 {
            let (cmd, next) = pid_step(gains, &pid, r, s.y, gains.sample_time);
            u = params.clamp_pressure(cmd);
            pid = next;
        }
        if params.pressure_lag.is_none() {
            s.p = u;
        }
        samples.push(TraceSample {
            t,
            setpoint: r,
            y: s.y,
            v: s.v,
            p: s.p,
            u,
            e: r - s.y,
        });
        if i == n {
            break;
        }
        let load = opts.disturbance.map_or(0.0, |d| d.force_at(t));
        s = rk4_step(params, s, u, load, dt);
        check_finite(&s, t + dt)?;
    }
    Ok(SimTrace { dt, samples })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stiffness::L13;

    #[test]
    fn substep_ratio() {
        assert_eq!(substeps(0.01, 1e-3).unwrap(), 10);
        assert_eq!(substeps(0.01, 0.01).unwrap(), 1);
        assert!(substeps(0.01, 3e-3).is_err());
        assert!(substeps(0.01, 0.02).is_err());
    }

    #[test]
    fn zero_amplitude_stays_at_rest() {
        let params = PlantParams::new(486.0, L13);
        let gains = PidGains::new(0.01, 0.02, 0.0005, (0.0, 0.2), 0.01).unwrap();
        let traj = TrajectorySpec::step(0.0, 3.0);
        let trace = simulate_closed_loop(&params, &gains, &traj, 1e-3).unwrap();
        let y0 = params.equilibrium(0.0).unwrap();
        for s in &trace.samples {
            assert!((s.y - y0).abs() < 1e-9, "{} drifted to {}", s.t, s.y);
        }
    }

    #[test]
    fn trace_covers_duration() {
        let params = PlantParams::new(486.0, L13);
        let gains = PidGains::new(0.01, 0.02, 0.0, (0.0, 0.2), 0.01).unwrap();
        let trace =
            simulate_closed_loop(&params, &gains, &TrajectorySpec::step(10.0, 2.0), 1e-3).unwrap();
        assert_eq!(trace.len(), 2001);
        assert!((trace.last().unwrap().t - 2.0).abs() < 1e-12);
        assert!(trace.samples.windows(2).all(|w| w[1].t > w[0].t));
    }
}

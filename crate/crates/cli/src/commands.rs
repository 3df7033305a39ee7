use std::io::{self, Write};
use std::path::Path;

use anyhow::{Context, Result};
use log::warn;

use sleeve_core::dynamics::{
    bandwidth, frequency_response, response_metrics, simulate_closed_loop, DriveSpec, PidGains,
    PlantParams, TrajectorySpec,
};
use sleeve_core::geometry::{
    bend_report, contraction_total, extension_single_fold, extension_total, BendReport,
};
use sleeve_core::hyperelastic::{fit_linear_family, Family};
use sleeve_core::io::{
    load_force_displacement, load_geometry_config_with, load_stress_strain, open_output,
    write_report, write_table, write_trace, write_trace_to, GeometryConfig, LoadMode, Report,
};
use sleeve_core::statics::{
    force_displacement_curve, max_extension_with, net_force_with, projected_areas, AreaMode,
};
use sleeve_core::stiffness::{fit_cubic, interval_stiffness, stiffness_increases_with_pressure};
use sleeve_core::sweep::{parse_range, sweep, SweepMetric, SweepParam};
use sleeve_core::units::{kpa_to_mpa, mpa_to_kpa};
use sleeve_core::Error;

use crate::{AreaModeArg, Command, ConfigArg, KinematicsMode, Output};

pub fn run(cmd: Command) -> Result<()> {
    match cmd {
        Command::Kinematics {
            config,
            mode,
            extension_mm,
            out,
        } => kinematics(&config, mode, extension_mm, &out),
        Command::FitMaterial { data, family, out } => fit_material(&data, &family, &out),
        Command::FitStiffness {
            data,
            bin_width_mm,
            out,
        } => fit_stiffness(&data, bin_width_mm, &out),
        Command::Statics {
            config,
            pressure_kpa,
            sweep_y,
            area_mode,
            out,
        } => statics(&config, pressure_kpa, sweep_y.as_deref(), area_mode, &out),
        Command::Simulate {
            config,
            trajectory,
            dt,
            no_lag,
            out,
        } => simulate(&config, &trajectory, dt, no_lag, &out),
        Command::Freq {
            config,
            fmin,
            fmax,
            df,
            pressure_kpa,
            dt,
            no_lag,
            out,
        } => freq(&config, fmin, fmax, df, pressure_kpa, dt, no_lag, &out),
        Command::Sweep {
            config,
            param,
            range,
            metric,
            pressure_kpa,
            out,
        } => run_sweep(&config, &param, &range, &metric, pressure_kpa, &out),
    }
}

fn load(arg: &ConfigArg) -> Result<GeometryConfig> {
    let mode = if arg.lenient {
        LoadMode::Lenient
    } else {
        LoadMode::Strict
    };
    // Warnings are already logged by the loader.
    let loaded = load_geometry_config_with(&arg.config, mode)
        .with_context(|| format!("config {}", arg.config.display()))?;
    Ok(loaded.value)
}

fn finish(report: &Report, out: &Output) -> Result<()> {
    print!("{}", report.to_text());
    io::stdout().flush()?;
    if let Some(path) = &out.report {
        write_report(report, path, out.force)?;
    }
    Ok(())
}

fn emit_table(out: &Output, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    match &out.output {
        Some(path) => {
            let mut f = open_output(path, out.force)?;
            write_table(&mut f, header, rows)?;
        }
        None => write_table(&mut io::stdout().lock(), header, rows)?,
    }
    Ok(())
}

fn pressure_arg(kpa: f64) -> Result<f64> {
    if !kpa.is_finite() || kpa < 0.0 {
        return Err(Error::Validation {
            field: "pressure_kpa".into(),
            reason: format!("must be a finite value >= 0, got {kpa}"),
        }
        .into());
    }
    Ok(kpa_to_mpa(kpa))
}

fn kinematics(
    arg: &ConfigArg,
    mode: KinematicsMode,
    extension_mm: Option<f64>,
    out: &Output,
) -> Result<()> {
    let cfg = load(arg)?;
    let g = &cfg.geometry;
    let spec = g.fold_spec()?;
    let mut report = Report::new()
        .text("mode", format!("{mode:?}").to_lowercase())
        .num("fold_length_mm", spec.fold_length())
        .num("fold_angle_deg", spec.fold_angle_deg())
        .int("fold_count", i64::from(spec.fold_count()))
        .num("extension_single_fold_mm", extension_single_fold(&spec))
        .num("extension_total_mm", extension_total(&spec))
        .num("contraction_total_mm", contraction_total(&spec));
    if mode == KinematicsMode::Bending {
        let n = spec.fold_count();
        let free_side = extension_mm.unwrap_or_else(|| extension_total(&spec));
        if !(free_side.is_finite() && free_side >= 0.0) {
            return Err(Error::Validation {
                field: "extension_mm".into(),
                reason: format!("must be >= 0, got {free_side}"),
            }
            .into());
        }
        let delta = free_side / f64::from(n);
        match bend_report(
            g.actuator_length,
            n,
            delta,
            g.sleeve_radius,
            g.bending_offset(),
        )? {
            BendReport::Straight => {
                report = report.text("bend", "straight");
            }
            BendReport::Bent {
                curvature_radius,
                angle_per_fold_deg,
                angle_consistent_deg,
                per_fold_residual,
            } => {
                report = report
                    .text("bend", "bent")
                    .num("curvature_radius_mm", curvature_radius)
                    .num("bend_angle_per_fold_deg", angle_per_fold_deg)
                    .num("bend_angle_consistent_deg", angle_consistent_deg)
                    .num("bend_per_fold_residual_mm", per_fold_residual);
            }
        }
    }
    finish(&report, out)
}

fn fit_material(data: &Path, family: &str, out: &Output) -> Result<()> {
    let family: Family = family.parse()?;
    let dataset =
        load_stress_strain(data).with_context(|| format!("dataset {}", data.display()))?;
    let fit = fit_linear_family(&dataset, family)?;
    let mut report = Report::new()
        .text("family", family.to_string())
        .int("samples", fit.samples as i64);
    for (name, v) in fit.model.named_coefficients() {
        report = report.num(&format!("{name}_mpa"), v);
    }
    let report = report
        .num("rms_residual_mpa", fit.rms_residual_mpa)
        .num(
            "rms_residual_rel_peak",
            fit.rms_residual_mpa / dataset.peak_stress(),
        )
        .num("residual_norm_mpa", fit.residual_norm)
        .num("condition", fit.condition);
    finish(&report, out)
}

fn fit_stiffness(data: &Path, bin_width: f64, out: &Output) -> Result<()> {
    let loaded =
        load_force_displacement(data).with_context(|| format!("dataset {}", data.display()))?;
    let mut report = Report::new().int("datasets", loaded.value.len() as i64);
    let mut rows = Vec::new();
    for (i, ds) in loaded.value.iter().enumerate() {
        let prefix = match ds.pressure_kpa {
            Some(p) => format!("p{p}kpa_"),
            None if loaded.value.len() == 1 => String::new(),
            None => format!("set{i}_"),
        };
        let fit = fit_cubic(ds)?;
        report = report
            .num(&format!("{prefix}a_n_per_mm3"), fit.poly.a)
            .num(&format!("{prefix}b_n_per_mm2"), fit.poly.b)
            .num(&format!("{prefix}c_n_per_mm"), fit.poly.c)
            .num(&format!("{prefix}d_n"), fit.poly.d)
            .num(&format!("{prefix}valid_from_mm"), fit.poly.valid_range.0)
            .num(&format!("{prefix}valid_to_mm"), fit.poly.valid_range.1)
            .num(&format!("{prefix}rms_residual_n"), fit.rms_residual_n)
            .num(&format!("{prefix}condition"), fit.condition);
        for iv in interval_stiffness(ds, bin_width)?.intervals {
            rows.push(vec![
                ds.pressure_kpa.unwrap_or(f64::NAN),
                iv.interval.0,
                iv.interval.1,
                iv.stiffness,
            ]);
        }
    }
    if let Some(up) = stiffness_increases_with_pressure(&loaded.value, bin_width)? {
        report = report.flag("stiffness_increases_with_pressure", up);
    }
    if out.output.is_some() {
        emit_table(out, "pressure_kpa,from_mm,to_mm,stiffness_n_per_m", &rows)?;
    }
    finish(&report, out)
}

fn statics(
    arg: &ConfigArg,
    pressure_kpa: f64,
    sweep_y: Option<&str>,
    area_mode: AreaModeArg,
    out: &Output,
) -> Result<()> {
    let cfg = load(arg)?;
    let p = pressure_arg(pressure_kpa)?;
    let poly = cfg.stiffness_or_default();
    let mode = match area_mode {
        AreaModeArg::Constant => AreaMode::Constant,
        AreaModeArg::FoldUpdate => AreaMode::FoldUpdate,
    };
    let areas = projected_areas(&cfg.geometry)?;
    let blocked = net_force_with(&cfg.geometry, &poly, p, 0.0, mode)?;
    let mut report = Report::new()
        .num("pressure_kpa", pressure_kpa)
        .num("a1_mm2", areas.a1)
        .num("a2_mm2", areas.a2)
        .num("a3_mm2", areas.a3)
        .num("effective_area_mm2", areas.effective())
        .num("blocked_force_n", blocked.net_force);
    if p > 0.0 {
        let y = max_extension_with(&cfg.geometry, &poly, p, mode)?;
        report = report
            .num("max_extension_mm", y)
            .flag("max_extension_extrapolated", poly.is_extrapolated(y));
    }
    if let Some(spec) = sweep_y {
        let grid = parse_range(spec).map_err(|e| match e {
            Error::Validation { reason, .. } => Error::Validation {
                field: "sweep_y".into(),
                reason,
            },
            other => other,
        })?;
        let states = match mode {
            AreaMode::Constant => force_displacement_curve(&cfg.geometry, &poly, p, &grid)?,
            AreaMode::FoldUpdate => grid
                .iter()
                .map(|&y| net_force_with(&cfg.geometry, &poly, p, y, mode))
                .collect::<sleeve_core::Result<Vec<_>>>()?,
        };
        let rows: Vec<Vec<f64>> = states
            .iter()
            .map(|s| vec![s.displacement, s.net_force, s.f1, s.f2y, s.f3y, s.fk])
            .collect();
        if out.output.is_none() {
            // Keep stdout a single CSV document.
            emit_table(
                out,
                "displacement_mm,net_force_n,f1_n,f2y_n,f3y_n,fk_n",
                &rows,
            )?;
            if let Some(path) = &out.report {
                write_report(&report, path, out.force)?;
            }
            return Ok(());
        }
        emit_table(
            out,
            "displacement_mm,net_force_n,f1_n,f2y_n,f3y_n,fk_n",
            &rows,
        )?;
    }
    finish(&report, out)
}

fn plant(cfg: &GeometryConfig, no_lag: bool) -> Result<PlantParams> {
    let mut params = cfg.plant_params()?;
    if no_lag {
        params.pressure_lag = None;
    }
    Ok(params)
}

fn simulate(arg: &ConfigArg, trajectory: &str, dt: f64, no_lag: bool, out: &Output) -> Result<()> {
    let cfg = load(arg)?;
    let traj: TrajectorySpec = trajectory.parse()?;
    let params = plant(&cfg, no_lag)?;
    let gains = match cfg.pid {
        Some(g) => g,
        None => {
            warn!("config has no `pid` section; using the suggested gains");
            PidGains::suggested(params.pressure_max)
        }
    };
    let stroke = params.equilibrium(params.pressure_max)?;
    if let Some(msg) = traj.reachability_warning(stroke) {
        warn!("{msg}");
    }
    let trace = simulate_closed_loop(&params, &gains, &traj, dt)?;
    let m = response_metrics(&trace, &traj)?;
    let mut report = Report::new()
        .text("trajectory", trajectory)
        .int("samples", trace.len() as i64)
        .num("rise_time_10_90_s", m.rise_time_10_90)
        .num("settling_time_s", m.settling_time)
        .num("overshoot_pct", m.overshoot)
        .num("steady_state_error_mm", m.steady_state_error)
        .num("rmse_mm", m.rmse);
    if let Some(r) = m.amplitude_ratio {
        report = report.num("amplitude_ratio", r);
    }
    if let Some(l) = m.phase_lag {
        report = report.num("phase_lag_deg", l);
    }
    match &out.output {
        Some(path) => write_trace(&trace, path, out.force)?,
        None => {
            write_trace_to(&trace, &mut io::stdout().lock())?;
            if let Some(path) = &out.report {
                write_report(&report, path, out.force)?;
            } else {
                eprint!("{}", report.to_text());
            }
            return Ok(());
        }
    }
    finish(&report, out)
}

#[allow(clippy::too_many_arguments)]
fn freq(
    arg: &ConfigArg,
    fmin: f64,
    fmax: f64,
    df: f64,
    pressure_kpa: Option<f64>,
    dt: f64,
    no_lag: bool,
    out: &Output,
) -> Result<()> {
    let cfg = load(arg)?;
    let params = plant(&cfg, no_lag)?;
    let high = match pressure_kpa {
        Some(k) => pressure_arg(k)?,
        None => 0.5 * params.pressure_max,
    };
    let curve = frequency_response(&params, &DriveSpec::square(high), fmin, fmax, df, dt)?;
    let rows: Vec<Vec<f64>> = curve
        .iter()
        .map(|p| vec![p.frequency, p.amplitude, p.amplitude_db])
        .collect();
    emit_table(out, "frequency_hz,amplitude_mm,amplitude_db", &rows)?;
    let bw = bandwidth(&curve)?;
    let report = Report::new()
        .num("pressure_high_kpa", mpa_to_kpa(high))
        .num("bandwidth_hz", bw);
    if out.output.is_none() {
        eprint!("{}", report.to_text());
        if let Some(path) = &out.report {
            write_report(&report, path, out.force)?;
        }
        return Ok(());
    }
    finish(&report, out)
}

fn run_sweep(
    arg: &ConfigArg,
    param: &str,
    range: &str,
    metric: &str,
    pressure_kpa: f64,
    out: &Output,
) -> Result<()> {
    let cfg = load(arg)?;
    let param: SweepParam = param.parse()?;
    let metric: SweepMetric = metric.parse()?;
    let values = parse_range(range)?;
    let p = pressure_arg(pressure_kpa)?;
    let rows = sweep(
        &cfg.geometry,
        &cfg.stiffness_or_default(),
        p,
        param,
        &values,
        metric,
    )?;
    let table: Vec<Vec<f64>> = rows.iter().map(|r| vec![r.value, r.metric]).collect();
    emit_table(out, &format!("{param},{metric}"), &table)
}

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn sleeve(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sleeve"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn config(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn report_value(text: &str, key: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing from:\n{text}"))
        .parse()
        .unwrap()
}

fn csv_column(text: &str, col: usize) -> Vec<f64> {
    text.lines()
        .skip(1)
        .map(|l| l.split(',').nth(col).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn kinematics_report() {
    let o = sleeve(&["kinematics", "-c", &config("l13.json")]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(report_value(&text, "fold_count"), 4.0);
    assert!((report_value(&text, "extension_total_mm") - 73.9008).abs() < 1e-3);
}

#[test]
fn zero_extension_bend_is_straight() {
    let o = sleeve(&[
        "kinematics",
        "-c",
        &config("l13_bending.json"),
        "--mode",
        "bending",
        "--extension-mm",
        "0",
    ]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("bend=straight"));
}

#[test]
fn statics_matches_equilibrium() {
    let o = sleeve(&[
        "statics",
        "-c",
        &config("l13.json"),
        "--pressure-kpa",
        "100",
    ]);
    assert!(o.status.success());
    let y = report_value(&stdout(&o), "max_extension_mm");
    assert!((y - 19.606315952).abs() < 1e-6, "{y}");
}

#[test]
fn statics_curve_decreases() {
    let o = sleeve(&[
        "statics",
        "-c",
        &config("l13.json"),
        "--pressure-kpa",
        "100",
        "--sweep-y",
        "0:30:1",
    ]);
    assert!(o.status.success());
    let net = csv_column(&stdout(&o), 1);
    assert_eq!(net.len(), 31);
    assert!(net.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn sweep_trends_and_single_point() {
    let o = sleeve(&[
        "sweep",
        "-c",
        &config("l13.json"),
        "--param",
        "fold_angle",
        "--range",
        "30:40:1",
        "--metric",
        "extension",
    ]);
    assert!(o.status.success());
    let ext = csv_column(&stdout(&o), 1);
    assert_eq!(ext.len(), 11);
    assert!(ext.windows(2).all(|w| w[1] < w[0]));

    let o = sleeve(&[
        "sweep",
        "-c",
        &config("l13.json"),
        "--param",
        "fold_width",
        "--range",
        "12",
        "--metric",
        "blocked_force",
    ]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).lines().count(), 2);
}

fn simulate_to(path: &Path, force: bool) -> Output {
    let (cfg, path) = (config("l13.json"), path.to_string_lossy());
    let mut args = vec!["simulate", "-c", &cfg, "-t", "step:20:3", "-o", &path];
    if force {
        args.push("--force");
    }
    sleeve(&args)
}

#[test]
fn simulate_is_deterministic_and_guards_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    assert!(simulate_to(&a, false).status.success());
    assert!(simulate_to(&b, false).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let again = simulate_to(&a, false);
    assert_eq!(again.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&again.stderr).contains("--force"));
    assert!(simulate_to(&a, true).status.success());
}

#[test]
fn simulate_report_json() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("r.json");
    let o = sleeve(&[
        "simulate",
        "-c",
        &config("l13.json"),
        "-t",
        "step:20:6",
        "-o",
        &dir.path().join("t.csv").to_string_lossy(),
        "--report",
        &report.to_string_lossy(),
    ]);
    assert!(o.status.success());
    let body = std::fs::read_to_string(&report).unwrap();
    assert!(body.trim_start().starts_with('{'));
    assert!(body.contains("\"rise_time_10_90_s\""));
}

#[test]
fn exit_codes() {
    let missing = sleeve(&["kinematics", "-c", "/nonexistent/x.json"]);
    assert_eq!(missing.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\"sleeve_radius_mm\": 30,\n  \"oops\": }").unwrap();
    let o = sleeve(&["kinematics", "-c", &bad.to_string_lossy()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let bad_traj = sleeve(&["simulate", "-c", &config("l13.json"), "-t", "zigzag:1"]);
    assert_eq!(bad_traj.status.code(), Some(2));

    let no_crossing = sleeve(&[
        "freq",
        "-c",
        &config("l13.json"),
        "--fmin",
        "0.1",
        "--fmax",
        "0.3",
        "--df",
        "0.1",
    ]);
    assert_eq!(no_crossing.status.code(), Some(1));
}

#[test]
fn freq_reports_bandwidth() {
    let o = sleeve(&[
        "freq",
        "-c",
        &config("l13.json"),
        "--fmin",
        "0.1",
        "--fmax",
        "2",
        "--df",
        "0.1",
        "--pressure-kpa",
        "100",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = String::from_utf8_lossy(&o.stderr).into_owned() + &stdout(&o);
    let bw = report_value(&text, "bandwidth_hz");
    assert!(bw > 0.5 && bw < 1.2, "{bw}");
}

#[test]
fn fit_material_recovers_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("tpu85.csv");
    let model = neo_hookean_samples();
    let mut body = String::from("strain,stress_mpa\n");
    for (e, s) in model {
        body.push_str(&format!("{e:?},{s:?}\n"));
    }
    std::fs::write(&data, body).unwrap();
    let o = sleeve(&[
        "fit-material",
        "-d",
        &data.to_string_lossy(),
        "--family",
        "neo-hookean",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let c10 = report_value(&stdout(&o), "C10_mpa");
    assert!((c10 - 0.5).abs() < 1e-9, "{c10}");
}

/// Neo-Hookean uniaxial data with C10 = 0.5 MPa.
fn neo_hookean_samples() -> Vec<(f64, f64)> {
    (1..=30)
        .map(|i| {
            let l = 1.0 + 0.1 * f64::from(i);
            (l - 1.0, 2.0 * 0.5 * (l - l.powi(-2)))
        })
        .collect()
}

#[test]
fn fit_stiffness_reports_cubic() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("fd.csv");
    let mut body = String::from("displacement_mm,force_n\n");
    for i in 0..=40 {
        let y = f64::from(i);
        body.push_str(&format!(
            "{y},{:?}\n",
            4.1481e-4 * y.powi(3) + 1.2865e-2 * y * y + 2.0789 * y - 0.2246
        ));
    }
    std::fs::write(&data, body).unwrap();
    let o = sleeve(&["fit-stiffness", "-d", &data.to_string_lossy()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!((report_value(&text, "c_n_per_mm") - 2.0789).abs() < 1e-8);
}

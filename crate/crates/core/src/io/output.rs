//! Deterministic writers for traces, tables and reports.

use std::fs::{File, OpenOptions};
use std::io::{BufWriter, Write};
use std::path::Path;

use serde_json::{Map, Value};

use super::datasets::{read_table, STRESS_STRAIN_HEADER};
use crate::dynamics::{SimTrace, TraceSample};
use crate::error::{Error, Result};
use crate::hyperelastic::StressStrainDataset;

pub const TRACE_HEADER: &str = "t_s,setpoint_mm,y_mm,v_mm_s,p_mpa,u_mpa,e_mm";

/// Nine significant digits, fixed exponent layout.
pub fn fmt_num(x: f64) -> String {
    format!("{x:.8e}")
}

/// Opens `path` for writing; an existing file is an error unless `overwrite` is set.
pub fn open_output(path: &Path, overwrite: bool) -> Result<BufWriter<File>> {
    let mut opts = OpenOptions::new();
    opts.write(true);
    if overwrite {
        opts.create(true).truncate(true);
    } else {
        opts.create_new(true);
    }
    match opts.open(path) {
        Ok(f) => Ok(BufWriter::new(f)),
        Err(e) if e.kind() == std::io::ErrorKind::AlreadyExists => Err(Error::validation(
            "output",
            format!("{} exists; pass --force to overwrite", path.display()),
        )),
        Err(e) => Err(e.into()),
    }
}

/// Writes a header and rows of numbers formatted by [`fmt_num`].
pub fn write_table<W: Write>(out: &mut W, header: &str, rows: &[Vec<f64>]) -> Result<()> {
    writeln!(out, "{header}")?;
    for row in rows {
        let line: Vec<String> = row.iter().map(|&v| fmt_num(v)).collect();
        writeln!(out, "{}", line.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn trace_row(s: &TraceSample) -> Vec<f64> {
    vec![s.t, s.setpoint, s.y, s.v, s.p, s.u, s.e]
}

pub fn write_trace_to<W: Write>(trace: &SimTrace, out: &mut W) -> Result<()> {
    let rows: Vec<Vec<f64>> = trace.samples.iter().map(trace_row).collect();
    write_table(out, TRACE_HEADER, &rows)
}

pub fn write_trace(trace: &SimTrace, path: impl AsRef<Path>, overwrite: bool) -> Result<()> {
    let mut out = open_output(path.as_ref(), overwrite)?;
    write_trace_to(trace, &mut out)
}

pub fn read_trace(path: impl AsRef<Path>) -> Result<SimTrace> {
    let cols: Vec<&str> = TRACE_HEADER.split(',').collect();
    let t = read_table(path.as_ref(), &cols, &[])?;
    let idx: Vec<usize> = cols
        .iter()
        .map(|c| t.columns.iter().position(|x| x == c).expect("required"))
        .collect();
    let samples: Vec<TraceSample> = t
        .rows
        .iter()
        .map(|(_, v)| TraceSample {
            t: v[idx[0]],
            setpoint: v[idx[1]],
            y: v[idx[2]],
            v: v[idx[3]],
            p: v[idx[4]],
            u: v[idx[5]],
            e: v[idx[6]],
        })
        .collect();
    let dt = if samples.len() > 1 {
        samples[1].t - samples[0].t
    } else {
        0.0
    };
    Ok(SimTrace { dt, samples })
}

/// Writes tensile data with shortest round-trip formatting, so reloading is exact.
pub fn write_stress_strain(
    data: &StressStrainDataset,
    path: impl AsRef<Path>,
    overwrite: bool,
) -> Result<()> {
    let mut out = open_output(path.as_ref(), overwrite)?;
    writeln!(out, "{}", STRESS_STRAIN_HEADER.join(","))?;
    for (e, s) in data.samples() {
        writeln!(out, "{e:?},{s:?}")?;
    }
    out.flush()?;
    Ok(())
}

/// Flat report: ordered key/value pairs rendered as `key=value` text or a JSON object.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Report {
    entries: Vec<(String, Value)>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn num(mut self, key: &str, v: f64) -> Self {
        self.push(key, Value::from(v));
        self
    }

    pub fn int(mut self, key: &str, v: i64) -> Self {
        self.push(key, Value::from(v));
        self
    }

    pub fn text(mut self, key: &str, v: impl Into<String>) -> Self {
        self.push(key, Value::String(v.into()));
        self
    }

    pub fn flag(mut self, key: &str, v: bool) -> Self {
        self.push(key, Value::Bool(v));
        self
    }

    pub fn push(&mut self, key: &str, v: Value) {
        self.entries.push((key.to_string(), v));
    }

    pub fn entries(&self) -> &[(String, Value)] {
        &self.entries
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.entries.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.entries {
            let rendered = match v {
                Value::Number(n) if n.is_f64() => n.as_f64().map_or_else(|| n.to_string(), fmt_num),
                Value::String(t) => t.clone(),
                other => other.to_string(),
            };
            s.push_str(k);
            s.push('=');
            s.push_str(&rendered);
            s.push('\n');
        }
        s
    }

    /// Keys keep report order. Non-finite numbers become `null`.
    pub fn to_json(&self) -> String {
        let mut obj = Map::new();
        for (k, v) in &self.entries {
            obj.insert(k.clone(), v.clone());
        }
        let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("plain values");
        s.push('\n');
        s
    }
}

/// `.json` paths get the structured form, anything else the text form.
pub fn write_report(report: &Report, path: impl AsRef<Path>, overwrite: bool) -> Result<()> {
    let path = path.as_ref();
    let body = if path.extension().is_some_and(|e| e == "json") {
        report.to_json()
    } else {
        report.to_text()
    };
    let mut out = open_output(path, overwrite)?;
    out.write_all(body.as_bytes())?;
    out.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample_trace() -> SimTrace {
        let samples = (0..5)
            .map(|i| {
                let t = i as f64 * 0.001;
                TraceSample {
                    t,
                    setpoint: 10.0,
                    y: 1.0 / 3.0 + t,
                    v: -2.5e-7,
                    p: 0.123456789123,
                    u: 0.2,
                    e: 10.0 - (1.0 / 3.0 + t),
                }
            })
            .collect();
        SimTrace { dt: 0.001, samples }
    }

    #[test]
    fn trace_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        let trace = sample_trace();
        write_trace(&trace, &p, false).unwrap();
        let back = read_trace(&p).unwrap();
        assert_eq!(back.len(), trace.len());
        for (a, b) in trace.samples.iter().zip(&back.samples) {
            for (x, y) in trace_row(a).into_iter().zip(trace_row(b)) {
                assert!((x - y).abs() <= 5e-9 * x.abs().max(1e-300), "{x} vs {y}");
            }
        }
    }

    #[test]
    fn empty_trace_is_header_only() {
        let mut buf = Vec::new();
        write_trace_to(&SimTrace::default(), &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), format!("{TRACE_HEADER}\n"));
    }

    #[test]
    fn byte_identical_output() {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        write_trace_to(&sample_trace(), &mut a).unwrap();
        write_trace_to(&sample_trace(), &mut b).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn refuses_to_overwrite() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.csv");
        write_trace(&sample_trace(), &p, false).unwrap();
        assert!(matches!(
            write_trace(&sample_trace(), &p, false),
            Err(Error::Validation { .. })
        ));
        write_trace(&sample_trace(), &p, true).unwrap();
    }

    #[test]
    fn report_forms() {
        let r = Report::new()
            .num("rise_time_s", 1.25)
            .text("family", "mr5")
            .flag("ok", true)
            .int("samples", 50);
        assert_eq!(
            r.to_text(),
            "rise_time_s=1.25000000e0\nfamily=mr5\nok=true\nsamples=50\n"
        );
        let v: Value = serde_json::from_str(&r.to_json()).unwrap();
        assert_eq!(v["rise_time_s"], 1.25);
        assert_eq!(v["family"], "mr5");
    }

    #[test]
    fn stress_strain_is_lossless() {
        let model = crate::hyperelastic::tpu85_mr5();
        let data =
            crate::hyperelastic::synthesize_uniaxial(&model, 1.05, 6.0, 50, "tpu85").unwrap();
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("tpu85.csv");
        write_stress_strain(&data, &p, false).unwrap();
        let back = super::super::load_stress_strain(&p).unwrap();
        assert_eq!(back.samples(), data.samples());
    }
}

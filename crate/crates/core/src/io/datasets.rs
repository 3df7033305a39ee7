//! CSV readers for tensile and force–displacement data.
//!
//! Dialect: comma separated, `.` decimal point, UTF-8, header row required.

use std::path::Path;

use super::Loaded;
use crate::error::{Error, Result};
use crate::hyperelastic::StressStrainDataset;
use crate::stiffness::ForceDisplacementDataset;

pub const STRESS_STRAIN_HEADER: [&str; 2] = ["strain", "stress_mpa"];
pub const FORCE_DISPLACEMENT_HEADER: [&str; 3] = ["displacement_mm", "force_n", "pressure_kpa"];

/// Numeric rows of a CSV file with their 1-based line numbers.
pub(crate) struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(usize, Vec<f64>)>,
}

pub(crate) fn read_table(path: &Path, required: &[&str], optional: &[&str]) -> Result<Table> {
    let origin = path.display().to_string();
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| csv_error(&origin, e))?;
    let columns: Vec<String> = reader
        .headers()
        .map_err(|e| csv_error(&origin, e))?
        .iter()
        .map(str::to_string)
        .collect();
    for name in required {
        if !columns.iter().any(|c| c == name) {
            return Err(Error::Parse {
                path: origin,
                line: 1,
                message: format!("missing column `{name}` (header: {})", columns.join(",")),
            });
        }
    }
    if let Some(extra) = columns
        .iter()
        .find(|c| !required.contains(&c.as_str()) && !optional.contains(&c.as_str()))
    {
        return Err(Error::Parse {
            path: origin,
            line: 1,
            message: format!("unexpected column `{extra}`"),
        });
    }

    let mut rows = Vec::new();
    for record in reader.records() {
        let record = record.map_err(|e| csv_error(&origin, e))?;
        let line = record.position().map_or(0, |p| p.line() as usize);
        let mut values = Vec::with_capacity(columns.len());
        for (cell, name) in record.iter().zip(&columns) {
            let v: f64 = cell.parse().map_err(|_| Error::Row {
                path: origin.clone(),
                row: line,
                message: format!("`{cell}` in column `{name}` is not a number"),
            })?;
            if !v.is_finite() {
                return Err(Error::Row {
                    path: origin.clone(),
                    row: line,
                    message: format!("non-finite value `{cell}` in column `{name}`"),
                });
            }
            values.push(v);
        }
        rows.push((line, values));
    }
    Ok(Table { columns, rows })
}

fn csv_error(origin: &str, e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line() as usize);
    match e.kind() {
        csv::ErrorKind::Io(_) => match e.into_kind() {
            csv::ErrorKind::Io(io) => Error::Io(io),
            _ => unreachable!(),
        },
        _ => Error::Parse {
            path: origin.to_string(),
            line,
            message: e.to_string(),
        },
    }
}

fn column(t: &Table, name: &str) -> Option<usize> {
    t.columns.iter().position(|c| c == name)
}

/// Tensile data with header `strain,stress_mpa`; strain must strictly increase.
pub fn load_stress_strain(path: impl AsRef<Path>) -> Result<StressStrainDataset> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let t = read_table(path, &STRESS_STRAIN_HEADER, &[])?;
    let (ie, is) = (
        column(&t, "strain").unwrap(),
        column(&t, "stress_mpa").unwrap(),
    );
    if t.rows.is_empty() {
        return Err(Error::Parse {
            path: origin,
            line: 1,
            message: "no data rows".into(),
        });
    }
    let mut samples = Vec::with_capacity(t.rows.len());
    let mut prev: Option<f64> = None;
    for (line, v) in &t.rows {
        let (e, s) = (v[ie], v[is]);
        if let Some(p) = prev {
            if e <= p {
                return Err(Error::Row {
                    path: origin,
                    row: *line,
                    message: format!("strain {e} does not increase on the previous row ({p})"),
                });
            }
        }
        prev = Some(e);
        samples.push((e, s));
    }
    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    StressStrainDataset::new(samples, label)
}

/// Rows sharing one pressure value (or the single unlabelled set).
type Group = (Option<f64>, Vec<(f64, f64)>);

/// Force–displacement data with header `displacement_mm,force_n[,pressure_kpa]`.
///
/// With a pressure column the rows are grouped into one dataset per pressure, in
/// ascending pressure order. Rows out of displacement order are sorted with a warning.
pub fn load_force_displacement(
    path: impl AsRef<Path>,
) -> Result<Loaded<Vec<ForceDisplacementDataset>>> {
    let path = path.as_ref();
    let origin = path.display().to_string();
    let t = read_table(
        path,
        &FORCE_DISPLACEMENT_HEADER[..2],
        &FORCE_DISPLACEMENT_HEADER[2..],
    )?;
    if t.rows.is_empty() {
        return Err(Error::Parse {
            path: origin,
            line: 1,
            message: "no data rows".into(),
        });
    }
    let iy = column(&t, "displacement_mm").unwrap();
    let iff = column(&t, "force_n").unwrap();
    let ip = column(&t, "pressure_kpa");

    let mut groups: Vec<Group> = Vec::new();
    for (_, v) in &t.rows {
        let key = ip.map(|i| v[i]);
        let sample = (v[iy], v[iff]);
        match groups.iter_mut().find(|(k, _)| *k == key) {
            Some((_, s)) => s.push(sample),
            None => groups.push((key, vec![sample])),
        }
    }
    groups.sort_by(|a, b| a.0.unwrap_or(0.0).total_cmp(&b.0.unwrap_or(0.0)));

    let label = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let mut warnings = Vec::new();
    let mut out = Vec::with_capacity(groups.len());
    for (pressure, mut samples) in groups {
        if samples.windows(2).any(|w| w[1].0 < w[0].0) {
            let which = pressure.map_or(String::new(), |p| format!(" at {p} kPa"));
            let msg = format!(
                "{origin}: displacement rows{which} were out of order and have been sorted"
            );
            log::warn!("{msg}");
            warnings.push(msg);
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
        }
        out.push(ForceDisplacementDataset::new(
            samples,
            pressure,
            label.clone(),
        )?);
    }
    Ok(Loaded {
        value: out,
        warnings,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::fs;

    fn file(dir: &tempfile::TempDir, name: &str, body: &str) -> std::path::PathBuf {
        let p = dir.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }

    #[test]
    fn minimal_stress_strain() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "a.csv", "strain,stress_mpa\n0.0,0.0\n0.5,1.2\n");
        assert_eq!(load_stress_strain(&p).unwrap().len(), 2);
    }

    #[test]
    fn duplicate_strain_names_the_row() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(
            &dir,
            "a.csv",
            "strain,stress_mpa\n0.0,0.0\n0.5,1.2\n0.5,1.3\n",
        );
        match load_stress_strain(&p) {
            Err(Error::Row { row, .. }) => assert_eq!(row, 4),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn bad_cells() {
        let dir = tempfile::tempdir().unwrap();
        let p = file(&dir, "a.csv", "strain,stress_mpa\n0.0,0.0\n0.5,abc\n");
        assert!(matches!(
            load_stress_strain(&p),
            Err(Error::Row { row: 3, .. })
        ));
        let p = file(&dir, "b.csv", "strain,stress_mpa\n0.0,NaN\n");
        assert!(matches!(
            load_stress_strain(&p),
            Err(Error::Row { row: 2, .. })
        ));
        let p = file(&dir, "c.csv", "strain,stress_mpa\n0.0,inf\n");
        assert!(matches!(load_stress_strain(&p), Err(Error::Row { .. })));
        let p = file(&dir, "d.csv", "strain,stress\n0.0,0.0\n");
        assert!(matches!(
            load_stress_strain(&p),
            Err(Error::Parse { line: 1, .. })
        ));
        let p = file(&dir, "e.csv", "strain,stress_mpa\n0.0\n");
        assert!(load_stress_strain(&p).is_err());
    }

    #[test]
    fn grouped_pressures() {
        let dir = tempfile::tempdir().unwrap();
        let mut body = String::from("displacement_mm,force_n,pressure_kpa\n");
        for p in [125, 25, 75, 50, 100] {
            for y in 0..5 {
                body.push_str(&format!(
                    "{y},{},{p}\n",
                    f64::from(y) * 2.0 + f64::from(p) / 100.0
                ));
            }
        }
        let loaded = load_force_displacement(file(&dir, "fd.csv", &body)).unwrap();
        let pressures: Vec<f64> = loaded
            .value
            .iter()
            .map(|d| d.pressure_kpa.unwrap())
            .collect();
        assert_eq!(pressures, vec![25.0, 50.0, 75.0, 100.0, 125.0]);
        assert!(loaded.value.iter().all(|d| d.len() == 5));
        assert!(loaded.warnings.is_empty());
    }

    #[test]
    fn single_unlabelled_group_and_sorting() {
        let dir = tempfile::tempdir().unwrap();
        let body = "displacement_mm,force_n\n2,4\n0,0\n1,2\n";
        let loaded = load_force_displacement(file(&dir, "fd.csv", body)).unwrap();
        assert_eq!(loaded.value.len(), 1);
        assert_eq!(loaded.value[0].pressure_kpa, None);
        assert_eq!(
            loaded.value[0].samples(),
            &[(0.0, 0.0), (1.0, 2.0), (2.0, 4.0)]
        );
        assert_eq!(loaded.warnings.len(), 1);
    }
}

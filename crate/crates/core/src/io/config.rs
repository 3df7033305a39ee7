//! JSON actuator configs in boundary units (mm, kPa, degrees, kg, s).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use super::Loaded;
use crate::dynamics::{PidGains, PlantParams, PressureLag, DEFAULT_DAMPING, DEFAULT_MASS};
use crate::error::{Error, Result};
use crate::geometry::{ActuatorGeometry, Radii, DEFAULT_CAP_RIM_MM, DEFAULT_WALL_GAP_MM};
use crate::statics::projected_areas;
use crate::stiffness::{StiffnessCubic, L13};
use crate::units::{deg_to_rad, kpa_to_mpa, mpa_to_kpa, rad_to_deg};

/// How unknown keys are treated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LoadMode {
    #[default]
    Strict,
    Lenient,
}

/// Mechanical and supply constants of the dynamic model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PlantSettings {
    /// kg
    pub mass: f64,
    /// N·s/mm
    pub damping: f64,
    /// MPa
    pub pressure_max: f64,
    pub pressure_lag: Option<PressureLag>,
}

impl Default for PlantSettings {
    fn default() -> Self {
        Self {
            mass: DEFAULT_MASS,
            damping: DEFAULT_DAMPING,
            pressure_max: crate::dynamics::DEFAULT_PRESSURE_MAX,
            pressure_lag: Some(PressureLag::default()),
        }
    }
}

/// Validated config in internal units.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub name: Option<String>,
    pub geometry: ActuatorGeometry,
    pub stiffness: Option<StiffnessCubic>,
    pub plant: Option<PlantSettings>,
    pub pid: Option<PidGains>,
}

impl GeometryConfig {
    /// Configured cubic, or the L13 fit when none is given.
    pub fn stiffness_or_default(&self) -> StiffnessCubic {
        self.stiffness.unwrap_or(L13)
    }

    /// Plant constants with the effective area taken from the rest geometry.
    pub fn plant_params(&self) -> Result<PlantParams> {
        let area = projected_areas(&self.geometry)?.effective();
        let settings = self.plant.unwrap_or_default();
        let params = PlantParams {
            mass: settings.mass,
            damping: settings.damping,
            effective_area: area,
            stiffness: self.stiffness_or_default(),
            pressure_lag: settings.pressure_lag,
            pressure_max: settings.pressure_max,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn warnings(&self) -> Vec<String> {
        let mut out = self.geometry.warnings();
        if self.stiffness.is_none() {
            out.push("no `stiffness` section; using the L13 cubic".to_string());
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        let raw = RawConfig::from(self);
        serde_json::to_string_pretty(&raw)
            .map(|mut s| {
                s.push('\n');
                s
            })
            .map_err(|e| Error::domain(format!("config serialisation failed: {e}")))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawRadii {
    cap_inner_radius_mm: f64,
    cap_outer_radius_mm: f64,
    external_wall_inner_radius_mm: f64,
    internal_wall_outer_radius_mm: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawStiffness {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
    valid_range_mm: (f64, f64),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawLag {
    fill_tau_s: f64,
    vent_tau_s: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawPlant {
    #[serde(default = "default_mass")]
    mass_kg: f64,
    #[serde(default = "default_damping")]
    damping_n_s_per_mm: f64,
    #[serde(default = "default_pressure_max_kpa")]
    pressure_max_kpa: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pressure_lag: Option<RawLag>,
}

fn default_mass() -> f64 {
    DEFAULT_MASS
}

fn default_damping() -> f64 {
    DEFAULT_DAMPING
}

fn default_pressure_max_kpa() -> f64 {
    mpa_to_kpa(crate::dynamics::DEFAULT_PRESSURE_MAX)
}

fn default_true() -> bool {
    true
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawPid {
    kp_kpa_per_mm: f64,
    ki_kpa_per_mm_s: f64,
    kd_kpa_s_per_mm: f64,
    output_limits_kpa: (f64, f64),
    sample_time_s: f64,
    #[serde(default = "default_true")]
    anti_windup: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    name: Option<String>,
    sleeve_radius_mm: f64,
    actuator_length_mm: f64,
    fold_width_mm: f64,
    fold_angle_deg: f64,
    restraining_layer_thickness_mm: f64,
    restraining_layer_count: u32,
    wall_thickness_mm: f64,
    shore_hardness: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    constraining_layer_thickness_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fold_count: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    fold_length_mm: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    radii_mm: Option<RawRadii>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stiffness: Option<RawStiffness>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    plant: Option<RawPlant>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pid: Option<RawPid>,
}

const REQUIRED: &[&str] = &[
    "sleeve_radius_mm",
    "actuator_length_mm",
    "fold_width_mm",
    "fold_angle_deg",
    "restraining_layer_thickness_mm",
    "restraining_layer_count",
    "wall_thickness_mm",
    "shore_hardness",
];

const TOP_OPTIONAL: &[&str] = &[
    "name",
    "constraining_layer_thickness_mm",
    "fold_count",
    "fold_length_mm",
    "radii_mm",
    "stiffness",
    "plant",
    "pid",
];

const SECTIONS: &[(&str, &[&str])] = &[
    (
        "radii_mm",
        &[
            "cap_inner_radius_mm",
            "cap_outer_radius_mm",
            "external_wall_inner_radius_mm",
            "internal_wall_outer_radius_mm",
        ],
    ),
    ("stiffness", &["a", "b", "c", "d", "valid_range_mm"]),
    (
        "plant",
        &[
            "mass_kg",
            "damping_n_s_per_mm",
            "pressure_max_kpa",
            "pressure_lag",
        ],
    ),
    (
        "pid",
        &[
            "kp_kpa_per_mm",
            "ki_kpa_per_mm_s",
            "kd_kpa_s_per_mm",
            "output_limits_kpa",
            "sample_time_s",
            "anti_windup",
        ],
    ),
];

const LAG_KEYS: &[&str] = &["fill_tau_s", "vent_tau_s"];

fn check_keys(
    obj: &Map<String, Value>,
    known: &[&str],
    prefix: &str,
    mode: LoadMode,
    warnings: &mut Vec<String>,
) -> Result<()> {
    for key in obj.keys() {
        if !known.contains(&key.as_str()) {
            let field = format!("{prefix}{key}");
            match mode {
                LoadMode::Strict => {
                    return Err(Error::validation(field, "unknown key"));
                }
                LoadMode::Lenient => warnings.push(format!("ignoring unknown key `{field}`")),
            }
        }
    }
    Ok(())
}

fn check_structure(root: &Value, mode: LoadMode, warnings: &mut Vec<String>) -> Result<()> {
    let obj = root
        .as_object()
        .ok_or_else(|| Error::validation("config", "top level must be a JSON object"))?;
    for key in REQUIRED {
        if !obj.contains_key(*key) {
            return Err(Error::validation(*key, "required field is missing"));
        }
    }
    let known: Vec<&str> = REQUIRED.iter().chain(TOP_OPTIONAL).copied().collect();
    check_keys(obj, &known, "", mode, warnings)?;
    for (section, keys) in SECTIONS {
        if let Some(v) = obj.get(*section) {
            let inner = v
                .as_object()
                .ok_or_else(|| Error::validation(*section, "must be a JSON object"))?;
            check_keys(inner, keys, &format!("{section}."), mode, warnings)?;
            if *section == "plant" {
                if let Some(lag) = inner.get("pressure_lag") {
                    let lag = lag.as_object().ok_or_else(|| {
                        Error::validation("plant.pressure_lag", "must be a JSON object")
                    })?;
                    check_keys(lag, LAG_KEYS, "plant.pressure_lag.", mode, warnings)?;
                }
            }
        }
    }
    Ok(())
}

/// Names the offending field in a serde type error when the message carries one.
fn field_error(section: &str, e: serde_json::Error) -> Error {
    let msg = e.to_string();
    let field = msg
        .split('`')
        .nth(1)
        .filter(|_| msg.starts_with("missing field"))
        .map(|f| {
            if section.is_empty() {
                f.to_string()
            } else {
                format!("{section}.{f}")
            }
        })
        .unwrap_or_else(|| {
            if section.is_empty() {
                "config".into()
            } else {
                section.into()
            }
        });
    Error::validation(field, msg)
}

fn typed<T: for<'de> Deserialize<'de>>(obj: &Map<String, Value>, key: &str) -> Result<()> {
    if let Some(v) = obj.get(key) {
        serde_json::from_value::<T>(v.clone()).map_err(|e| field_error(key, e))?;
    }
    Ok(())
}

fn decode(root: Value) -> Result<RawConfig> {
    let obj = root.as_object().expect("checked by check_structure");
    for key in REQUIRED
        .iter()
        .copied()
        .filter(|k| *k != "restraining_layer_count")
    {
        typed::<f64>(obj, key)?;
    }
    typed::<u32>(obj, "restraining_layer_count")?;
    typed::<Option<f64>>(obj, "constraining_layer_thickness_mm")?;
    typed::<Option<u32>>(obj, "fold_count")?;
    typed::<Option<f64>>(obj, "fold_length_mm")?;
    typed::<Option<String>>(obj, "name")?;
    typed::<RawRadii>(obj, "radii_mm")?;
    typed::<RawStiffness>(obj, "stiffness")?;
    typed::<RawPlant>(obj, "plant")?;
    typed::<RawPid>(obj, "pid")?;
    serde_json::from_value(root).map_err(|e| field_error("", e))
}

fn finite(field: &str, v: f64) -> Result<f64> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(Error::validation(field, "must be finite"))
    }
}

impl TryFrom<RawConfig> for GeometryConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        let deg = finite("fold_angle_deg", raw.fold_angle_deg)?;
        let radii = match raw.radii_mm {
            Some(r) => Radii {
                cap_inner: r.cap_inner_radius_mm,
                cap_outer: r.cap_outer_radius_mm,
                external_wall_inner: r.external_wall_inner_radius_mm,
                internal_wall_outer: r.internal_wall_outer_radius_mm,
            },
            None => Radii::derived(
                raw.sleeve_radius_mm,
                raw.wall_thickness_mm,
                DEFAULT_WALL_GAP_MM,
                DEFAULT_CAP_RIM_MM,
            ),
        };
        let geometry = ActuatorGeometry {
            sleeve_radius: raw.sleeve_radius_mm,
            actuator_length: raw.actuator_length_mm,
            fold_width: raw.fold_width_mm,
            fold_angle: deg_to_rad(deg),
            restraining_layer_thickness: raw.restraining_layer_thickness_mm,
            restraining_layer_count: raw.restraining_layer_count,
            wall_thickness: raw.wall_thickness_mm,
            constraining_layer_thickness: raw.constraining_layer_thickness_mm,
            shore_hardness: finite("shore_hardness", raw.shore_hardness)?,
            radii,
            fold_length_override: raw.fold_length_mm,
            fold_count_override: raw.fold_count,
        };
        geometry.validate()?;
        // Surfaces fold-count or pitch problems at load time.
        geometry.fold_spec()?;

        let stiffness = raw
            .stiffness
            .map(|s| StiffnessCubic::new(s.a, s.b, s.c, s.d, s.valid_range_mm))
            .transpose()?;

        let plant = raw.plant.map(|p| PlantSettings {
            mass: p.mass_kg,
            damping: p.damping_n_s_per_mm,
            pressure_max: kpa_to_mpa(p.pressure_max_kpa),
            pressure_lag: p.pressure_lag.map(|l| PressureLag {
                fill_tau: l.fill_tau_s,
                vent_tau: l.vent_tau_s,
            }),
        });
        if let Some(p) = plant {
            PlantParams {
                mass: p.mass,
                damping: p.damping,
                effective_area: 1.0,
                stiffness: stiffness.unwrap_or(L13),
                pressure_lag: p.pressure_lag,
                pressure_max: p.pressure_max,
            }
            .validate()
            .map_err(|e| match e {
                Error::Validation { field, reason } => Error::Validation {
                    field: format!("plant.{field}"),
                    reason,
                },
                other => other,
            })?;
        }

        let pid = raw
            .pid
            .map(|g| {
                let gains = PidGains {
                    kp: kpa_to_mpa(g.kp_kpa_per_mm),
                    ki: kpa_to_mpa(g.ki_kpa_per_mm_s),
                    kd: kpa_to_mpa(g.kd_kpa_s_per_mm),
                    output_limits: (
                        kpa_to_mpa(g.output_limits_kpa.0),
                        kpa_to_mpa(g.output_limits_kpa.1),
                    ),
                    sample_time: g.sample_time_s,
                    anti_windup: g.anti_windup,
                };
                gains.validate().map(|_| gains)
            })
            .transpose()?;

        Ok(Self {
            name: raw.name,
            geometry,
            stiffness,
            plant,
            pid,
        })
    }
}

impl From<&GeometryConfig> for RawConfig {
    fn from(c: &GeometryConfig) -> Self {
        let g = &c.geometry;
        Self {
            name: c.name.clone(),
            sleeve_radius_mm: g.sleeve_radius,
            actuator_length_mm: g.actuator_length,
            fold_width_mm: g.fold_width,
            fold_angle_deg: rad_to_deg(g.fold_angle),
            restraining_layer_thickness_mm: g.restraining_layer_thickness,
            restraining_layer_count: g.restraining_layer_count,
            wall_thickness_mm: g.wall_thickness,
            shore_hardness: g.shore_hardness,
            constraining_layer_thickness_mm: g.constraining_layer_thickness,
            fold_count: g.fold_count_override,
            fold_length_mm: g.fold_length_override,
            radii_mm: Some(RawRadii {
                cap_inner_radius_mm: g.radii.cap_inner,
                cap_outer_radius_mm: g.radii.cap_outer,
                external_wall_inner_radius_mm: g.radii.external_wall_inner,
                internal_wall_outer_radius_mm: g.radii.internal_wall_outer,
            }),
            stiffness: c.stiffness.map(|s| RawStiffness {
                a: s.a,
                b: s.b,
                c: s.c,
                d: s.d,
                valid_range_mm: s.valid_range,
            }),
            plant: c.plant.map(|p| RawPlant {
                mass_kg: p.mass,
                damping_n_s_per_mm: p.damping,
                pressure_max_kpa: mpa_to_kpa(p.pressure_max),
                pressure_lag: p.pressure_lag.map(|l| RawLag {
                    fill_tau_s: l.fill_tau,
                    vent_tau_s: l.vent_tau,
                }),
            }),
            pid: c.pid.map(|g| RawPid {
                kp_kpa_per_mm: mpa_to_kpa(g.kp),
                ki_kpa_per_mm_s: mpa_to_kpa(g.ki),
                kd_kpa_s_per_mm: mpa_to_kpa(g.kd),
                output_limits_kpa: (mpa_to_kpa(g.output_limits.0), mpa_to_kpa(g.output_limits.1)),
                sample_time_s: g.sample_time,
                anti_windup: g.anti_windup,
            }),
        }
    }
}

/// Parses a config document; `origin` labels parse errors.
pub fn parse_geometry_config(
    text: &str,
    origin: &str,
    mode: LoadMode,
) -> Result<Loaded<GeometryConfig>> {
    let root: Value = serde_json::from_str(text).map_err(|e| Error::Parse {
        path: origin.to_string(),
        line: e.line(),
        message: e.to_string(),
    })?;
    let mut warnings = Vec::new();
    check_structure(&root, mode, &mut warnings)?;
    let config = GeometryConfig::try_from(decode(root)?)?;
    warnings.extend(config.warnings());
    for w in &warnings {
        log::warn!("{origin}: {w}");
    }
    Ok(Loaded {
        value: config,
        warnings,
    })
}

/// Strict-mode load.
pub fn load_geometry_config(path: impl AsRef<Path>) -> Result<Loaded<GeometryConfig>> {
    load_geometry_config_with(path, LoadMode::Strict)
}

pub fn load_geometry_config_with(
    path: impl AsRef<Path>,
    mode: LoadMode,
) -> Result<Loaded<GeometryConfig>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_geometry_config(&text, &path.display().to_string(), mode)
}

#[cfg(test)]
mod tests {
    use super::*;

    pub(crate) const L13_JSON: &str = r#"{
  "name": "L13",
  "sleeve_radius_mm": 30,
  "actuator_length_mm": 80,
  "fold_width_mm": 16,
  "fold_angle_deg": 30,
  "restraining_layer_thickness_mm": 0.8,
  "restraining_layer_count": 12,
  "wall_thickness_mm": 0.96,
  "shore_hardness": 85,
  "stiffness": { "a": 4.1481e-4, "b": 1.2865e-2, "c": 2.0789, "d": -0.2246, "valid_range_mm": [0, 40] },
  "plant": { "mass_kg": 2, "damping_n_s_per_mm": 0.05, "pressure_max_kpa": 200,
             "pressure_lag": { "fill_tau_s": 0.3641, "vent_tau_s": 0.3322 } },
  "pid": { "kp_kpa_per_mm": 3.4, "ki_kpa_per_mm_s": 9.4, "kd_kpa_s_per_mm": 0.2,
           "output_limits_kpa": [0, 200], "sample_time_s": 0.01 }
}"#;

    fn parse(text: &str) -> Result<Loaded<GeometryConfig>> {
        parse_geometry_config(text, "test.json", LoadMode::Strict)
    }

    fn rel(a: f64, b: f64) -> bool {
        (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300)
    }

    #[test]
    fn l13_loads_in_internal_units() {
        let c = parse(L13_JSON).unwrap().value;
        assert!(rel(c.geometry.fold_angle, std::f64::consts::PI / 6.0));
        assert_eq!(c.geometry.radii.internal_wall_outer, 30.0 - 0.96);
        assert_eq!(c.pid.unwrap().kp, 0.0034);
        assert_eq!(c.plant.unwrap().pressure_max, 0.2);
        assert_eq!(c.stiffness.unwrap(), L13);
    }

    #[test]
    fn round_trip() {
        let a = parse(L13_JSON).unwrap().value;
        let b = parse(&a.to_json().unwrap()).unwrap().value;
        assert!(rel(a.geometry.fold_angle, b.geometry.fold_angle));
        let ga = a.pid.unwrap();
        let gb = b.pid.unwrap();
        for (x, y) in [
            (ga.kp, gb.kp),
            (ga.ki, gb.ki),
            (ga.kd, gb.kd),
            (ga.output_limits.1, gb.output_limits.1),
        ] {
            assert!(rel(x, y));
        }
        assert_eq!(a.geometry.radii, b.geometry.radii);
        assert_eq!(a.stiffness, b.stiffness);
        // Second trip is byte-stable.
        assert_eq!(
            b.to_json().unwrap(),
            parse(&b.to_json().unwrap())
                .unwrap()
                .value
                .to_json()
                .unwrap()
        );
    }

    #[test]
    fn missing_field_is_named() {
        let text = L13_JSON.replace("\"fold_angle_deg\": 30,", "");
        match parse(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "fold_angle_deg"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn wrong_type_names_the_field() {
        let text = L13_JSON.replace("\"fold_width_mm\": 16", "\"fold_width_mm\": \"wide\"");
        match parse(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "fold_width_mm"),
            other => panic!("{other:?}"),
        }
        let text = L13_JSON.replace("\"sample_time_s\": 0.01", "\"sample_time_s\": 0.0");
        assert!(matches!(parse(&text), Err(Error::Validation { .. })));
    }

    #[test]
    fn untested_angle_warns() {
        let text = L13_JSON.replace("\"fold_angle_deg\": 30", "\"fold_angle_deg\": 10");
        let loaded = parse(&text).unwrap();
        assert!(loaded.warnings.iter().any(|w| w.contains("[25°, 45°]")));
    }

    #[test]
    fn unknown_keys() {
        let text = L13_JSON.replace(
            "\"name\": \"L13\",",
            "\"name\": \"L13\", \"colour\": \"red\",",
        );
        match parse(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "colour"),
            other => panic!("{other:?}"),
        }
        let loaded = parse_geometry_config(&text, "t", LoadMode::Lenient).unwrap();
        assert!(loaded.warnings.iter().any(|w| w.contains("colour")));

        let text = L13_JSON.replace("\"mass_kg\": 2,", "\"mass_kg\": 2, \"spring\": 1,");
        match parse(&text) {
            Err(Error::Validation { field, .. }) => assert_eq!(field, "plant.spring"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn syntax_error_has_line() {
        let text = L13_JSON.replace("\"fold_width_mm\": 16,", "\"fold_width_mm\": 16,,");
        match parse(&text) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 5),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn minimal_config_uses_defaults() {
        let text = r#"{"sleeve_radius_mm": 30, "actuator_length_mm": 80, "fold_width_mm": 16,
            "fold_angle_deg": 30, "restraining_layer_thickness_mm": 0.8,
            "restraining_layer_count": 12, "wall_thickness_mm": 0.96, "shore_hardness": 85}"#;
        let loaded = parse(text).unwrap();
        assert!(loaded.warnings.iter().any(|w| w.contains("L13")));
        let params = loaded.value.plant_params().unwrap();
        assert!((params.effective_area - 486.067_215_363_412_8).abs() < 1e-9);
        assert_eq!(params.pressure_lag, Some(PressureLag::default()));
    }
}

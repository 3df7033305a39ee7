//! File boundary: configs, datasets, traces and reports.

mod config;
mod datasets;
mod output;

pub use config::{
    load_geometry_config, load_geometry_config_with, parse_geometry_config, GeometryConfig,
    LoadMode, PlantSettings,
};
pub use datasets::{
    load_force_displacement, load_stress_strain, FORCE_DISPLACEMENT_HEADER, STRESS_STRAIN_HEADER,
};
pub use output::{
    fmt_num, open_output, read_trace, write_report, write_stress_strain, write_table, write_trace,
    write_trace_to, Report, TRACE_HEADER,
};

/// A loaded value with the non-fatal diagnostics raised while loading it.
#[derive(Debug, Clone, PartialEq)]
pub struct Loaded<T> {
    pub value: T,
    pub warnings: Vec<String>,
}

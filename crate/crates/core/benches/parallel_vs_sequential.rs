use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use sleeve_core::dynamics::{frequency_response_with, DriveSpec, PlantParams, PressureLag};
use sleeve_core::geometry::{ActuatorGeometry, Radii};
use sleeve_core::par::Execution;
use sleeve_core::statics::projected_areas;
use sleeve_core::stiffness::L13;
use sleeve_core::sweep::{parse_range, sweep_with, SweepMetric, SweepParam};

fn l13() -> ActuatorGeometry {
    ActuatorGeometry {
        sleeve_radius: 30.0,
        actuator_length: 80.0,
        fold_width: 16.0,
        fold_angle: 30f64.to_radians(),
        restraining_layer_thickness: 0.8,
        restraining_layer_count: 12,
        wall_thickness: 0.96,
        constraining_layer_thickness: None,
        shore_hardness: 85.0,
        radii: Radii::derived(30.0, 0.96, 0.0, 2.0),
        fold_length_override: None,
        fold_count_override: None,
    }
}

const PATHS: [(&str, Execution); 2] = [
    ("parallel", Execution::Auto),
    ("sequential", Execution::Sequential),
];

fn frequency_sweep(c: &mut Criterion) {
    let area = projected_areas(&l13()).unwrap().effective();
    let plant = PlantParams::new(area, L13).with_lag(PressureLag::default());
    let drive = DriveSpec::square(0.1);
    let mut group = c.benchmark_group("frequency_response");
    group.sample_size(10);
    for (name, exec) in PATHS {
        group.bench_function(BenchmarkId::new(name, "0.1..3Hz"), |b| {
            b.iter(|| {
                frequency_response_with(exec, black_box(&plant), &drive, 0.1, 3.0, 0.1, 1e-3)
                    .unwrap()
            })
        });
    }
    group.finish();
}

fn design_sweep(c: &mut Criterion) {
    let base = l13();
    let angles = parse_range("20:45:0.05").unwrap();
    let mut group = c.benchmark_group("max_extension_sweep");
    for (name, exec) in PATHS {
        group.bench_with_input(
            BenchmarkId::new(name, angles.len()),
            &angles,
            |b, values| {
                b.iter(|| {
                    sweep_with(
                        exec,
                        black_box(&base),
                        &L13,
                        0.1,
                        SweepParam::FoldAngle,
                        values,
                        SweepMetric::MaxExtension,
                    )
                    .unwrap()
                })
            },
        );
    }
    group.finish();
}

criterion_group!(benches, frequency_sweep, design_sweep);
criterion_main!(benches);

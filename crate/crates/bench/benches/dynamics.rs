use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};

use curvkep::curvature::curvature_bracket_table;
use curvkep::flows::integrate;
use curvkep::kepler::kepler_bracket_table;
use curvkep::maps::natural_to_transformed;
use curvkep::phase::{symplectic_check, JACOBIAN_STEP};
use curvkep::{Chart, ChartedGeodesicState, IntegratorConfig, KeplerParams, PhasePoint, System};

fn brackets(c: &mut Criterion) {
    let z = PhasePoint::from_arrays([0.7, -0.3, 0.4], [0.2, 0.9, -0.5]);
    let alpha = KeplerParams::new(1.0).unwrap();
    c.bench_function("kepler_bracket_table", |b| b.iter(|| kepler_bracket_table(black_box(&z), &alpha).unwrap()));
    let st = ChartedGeodesicState::new(z, Chart::Transformed, 1.0).unwrap();
    c.bench_function("curvature_bracket_table", |b| b.iter(|| curvature_bracket_table(black_box(&st)).unwrap()));
}

fn integration(c: &mut Criterion) {
    let cfg = IntegratorConfig::default();
    let orbit = PhasePoint::from_arrays([1.0, 0.0, 0.0], [0.15, 1.06, 0.1]);
    let kepler = System::Kepler(KeplerParams::new(1.0).unwrap());
    c.bench_function("integrate_kepler_orbit", |b| b.iter(|| integrate(kepler, black_box(&orbit), 6.0, &cfg).unwrap()));
    let geodesic = System::Geodesic { k: 1.0, chart: Chart::Natural };
    let start = PhasePoint::from_arrays([0.2, -0.1, 0.3], [0.5, 0.6, -0.2]);
    c.bench_function("integrate_sphere_geodesic", |b| {
        b.iter(|| integrate(geodesic, black_box(&start), 6.0, &cfg).unwrap())
    });
}

fn symplectic(c: &mut Criterion) {
    let z = PhasePoint::from_arrays([0.4, 0.1, -0.2], [0.3, -0.6, 0.5]);
    c.bench_function("symplectic_check", |b| {
        b.iter(|| symplectic_check(&natural_to_transformed, black_box(&z), JACOBIAN_STEP).unwrap())
    });
}

criterion_group!(benches, brackets, integration, symplectic);
criterion_main!(benches);

use criterion::{black_box, criterion_group, criterion_main, Criterion};

use kerrlab::analytic::{self, SecSolutionParams};
use kerrlab::glassey::{self, GlasseyData};
use kerrlab::integrate::{integrate, InitialConditions, IntegratorConfig};
use kerrlab::profile::{ProfileSpec, SlabProfile};
use num_complex::Complex64;

fn secant_profile() -> SlabProfile {
    SlabProfile::new(
        ProfileSpec::constant(1.0, 0.0),
        ProfileSpec::constant(-1.0, 0.0),
        2.0,
    )
    .unwrap()
}

fn secant_ic() -> InitialConditions {
    InitialConditions {
        c0: Complex64::new(2.0, 0.0),
        c1: Complex64::new(2.0, 0.0),
    }
}

fn bench_integrate(c: &mut Criterion) {
    let profile = secant_profile();
    let lossy = SlabProfile::new(
        ProfileSpec::constant(1.0, 0.1),
        ProfileSpec::constant(-1.0, 0.2),
        10.0,
    )
    .unwrap();
    let ic = secant_ic();
    let config = IntegratorConfig::default();

    c.bench_function("integrate_secant_benchmark", |b| {
        b.iter(|| integrate(black_box(&profile), black_box(&ic), black_box(&config)).unwrap())
    });
    c.bench_function("integrate_lossy_slab", |b| {
        b.iter(|| integrate(black_box(&lossy), black_box(&ic), black_box(&config)).unwrap())
    });
}

fn bench_bounds(c: &mut Criterion) {
    let data = GlasseyData::new(2.0, 4.0, 1.0, -1.0).unwrap();
    c.bench_function("gamma_quadrature_benchmark_data", |b| {
        b.iter(|| glassey::gamma_quadrature(black_box(&data)).unwrap())
    });
    c.bench_function("comparison_time_mid_intensity", |b| {
        b.iter(|| glassey::comparison_time(black_box(100.0), black_box(&data)).unwrap())
    });
}

fn bench_analytic(c: &mut Criterion) {
    let params = SecSolutionParams {
        eps_l: 1.0,
        theta: 0.0,
        sigma: -1.0,
        k: 1.0,
        phase: 0.0,
    };
    let z_pole = analytic::z_star(&params).unwrap();
    c.bench_function("sec_solution_1000_samples", |b| {
        b.iter(|| {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..1000 {
                let z = 0.999 * z_pole * (i as f64) / 999.0;
                acc += analytic::sec_solution(black_box(&params), z).unwrap();
            }
            acc
        })
    });
}

criterion_group!(benches, bench_integrate, bench_bounds, bench_analytic);
criterion_main!(benches);

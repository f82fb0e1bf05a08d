use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use num_complex::Complex64;
use resonance_core::closed_form::{closed_form_w, ClosedFormState};
use resonance_core::ode_oracle::{integrate, wkb_initial_data, Frame, IntegratorConfig};
use resonance_core::special_fn::{pcf_d, PcfOrder};
use resonance_core::verify::{verify_connection, verify_connection_with, VerifyOptions};

fn pcf(c: &mut Criterion) {
    let nu = PcfOrder::new(Complex64::new(-1.0, 0.5)).unwrap();
    let mut g = c.benchmark_group("pcf_d");
    for (name, z) in [
        ("series", Complex64::new(1.0, 1.0)),
        ("near_crossover", Complex64::new(5.5, 5.5)),
        ("asymptotic", Complex64::new(20.0, 20.0)),
    ] {
        g.bench_with_input(BenchmarkId::from_parameter(name), &z, |b, &z| {
            b.iter(|| pcf_d(nu, black_box(z)).unwrap())
        });
    }
    g.finish();
}

fn closed_form(c: &mut Criterion) {
    let s = ClosedFormState::new(1.0, Complex64::new(1.0, 0.0)).unwrap();
    c.bench_function("closed_form_w/t=2.5", |b| {
        b.iter(|| closed_form_w(s, black_box(2.5)).unwrap())
    });
}

fn integrator(c: &mut Criterion) {
    let a = 1.0;
    let w0 = wkb_initial_data(a, -20.0, Complex64::new(1.0, 0.0)).unwrap();
    let mut g = c.benchmark_group("integrate_-20_20");
    for frame in [Frame::Lab, Frame::Rotating] {
        let cfg = IntegratorConfig::default().with_frame(frame);
        g.bench_function(format!("{frame:?}"), |b| {
            b.iter(|| integrate(a, -20.0, 20.0, black_box(w0), cfg).unwrap())
        });
    }
    g.finish();
}

fn connection(c: &mut Criterion) {
    let mut g = c.benchmark_group("verify_connection");
    g.sample_size(10);
    let v = Complex64::new(1.0, 0.0);
    let cfg = IntegratorConfig::default();
    g.bench_function("T=40", |b| {
        b.iter(|| verify_connection(1.0, v, 40.0, cfg).unwrap())
    });
    let opts = VerifyOptions::with_richardson();
    g.bench_function("T=40+80", |b| {
        b.iter(|| verify_connection_with(1.0, v, 40.0, cfg, &opts).unwrap())
    });
    g.finish();
}

criterion_group!(benches, pcf, closed_form, integrator, connection);
criterion_main!(benches);

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sparsir_bench::sir_fixture;
use sparsir_core::{
    default_lambda, dt_sir, generate_beta, project_spectraplex, sample_sim, sdp_solve, sir_matrix, slice_data,
    BetaScheme, Link, ModelSpec, SdpBackend, SdpConfig, SirMode,
};

fn bench_sir(c: &mut Criterion) {
    let mut g = c.benchmark_group("sir_matrix");
    for p in [50, 200] {
        let beta = generate_beta(p, 7, BetaScheme::Fixed, 0).unwrap();
        let data = sample_sim(&ModelSpec::named(Link::Atan2), &beta, 2000, 1).unwrap();
        g.bench_with_input(BenchmarkId::new("slice+centered", p), &data, |b, d| {
            b.iter(|| sir_matrix(&slice_data(d, 10, 0).unwrap(), SirMode::Centered).unwrap())
        });
    }
    g.finish();
}

fn bench_dt(c: &mut Criterion) {
    let mut g = c.benchmark_group("dt_sir");
    for p in [100, 400] {
        let v = sir_fixture(p, 2);
        let s = (p as f64).sqrt().round() as usize;
        g.bench_with_input(BenchmarkId::from_parameter(p), &v, |b, v| b.iter(|| dt_sir(v, s).unwrap()));
    }
    g.finish();
}

fn bench_sdp(c: &mut Criterion) {
    let mut g = c.benchmark_group("sdp_solve");
    g.sample_size(10);
    for p in [30, 100] {
        let v = sir_fixture(p, 3);
        let s = (p as f64).sqrt().round() as usize;
        let lambda = default_lambda(&v, s).unwrap();
        for backend in [SdpBackend::Splitting, SdpBackend::ConditionalGradient] {
            let cfg = SdpConfig::with_lambda(lambda).backend(backend);
            g.bench_with_input(BenchmarkId::new(backend.name(), p), &v, |b, v| b.iter(|| sdp_solve(v, &cfg).unwrap()));
        }
    }
    g.finish();
}

fn bench_projection(c: &mut Criterion) {
    let mut g = c.benchmark_group("project_spectraplex");
    for p in [10, 100] {
        let m = sir_fixture(p.max(20), 4).matrix().clone();
        let m = m.view((0, 0), (p, p)).into_owned();
        g.bench_with_input(BenchmarkId::from_parameter(p), &m, |b, m| b.iter(|| project_spectraplex(m).unwrap()));
    }
    g.finish();
}

criterion_group!(benches, bench_sir, bench_dt, bench_sdp, bench_projection);
criterion_main!(benches);

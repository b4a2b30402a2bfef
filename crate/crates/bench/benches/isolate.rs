use certiroot::{isolate, Dyadic, FunctionSystem, JacobianMode, Roi, SolverConfig};
use criterion::{criterion_group, criterion_main, Criterion};

fn roi(lo: &[i64], width: i64) -> Roi {
    Roi::new(
        lo.iter().map(|&v| Dyadic::from_i64(v)).collect(),
        Dyadic::from_i64(width),
    )
    .unwrap()
}

fn bench_isolate(c: &mut Criterion) {
    let cases = [
        ("sqrt2", "vars x; f1 = x^2 - 2", roi(&[0], 2)),
        (
            "circle_line",
            "vars x,y; f1 = x^2 + y^2 - 1; f2 = x - y",
            roi(&[-2, -2], 4),
        ),
        (
            "sine_circle",
            "vars x,y; f1 = sin(x) - y; f2 = x^2 + y^2 - 1",
            roi(&[-2, -2], 4),
        ),
    ];
    for (name, src, roi) in &cases {
        let sys = FunctionSystem::parse(src).unwrap();
        for mode in [JacobianMode::Jc, JacobianMode::Jcs] {
            let cfg = SolverConfig {
                jacobian_mode: mode,
                ..SolverConfig::default()
            };
            c.bench_function(&format!("isolate/{name}/{mode}"), |b| {
                b.iter(|| isolate(&sys, roi, &cfg).unwrap())
            });
        }
    }
}

criterion_group!(benches, bench_isolate);
criterion_main!(benches);

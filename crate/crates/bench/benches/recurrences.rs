use criterion::{black_box, criterion_group, criterion_main, Criterion};
use recur_core::bound::phi_numeric;
use recur_core::model::{parse_spec, Perturbation, PerturbationSpec};
use recur_core::perturbation::{build_counterexample, CounterexampleParams};
use recur_core::simulator::{evaluate_integer, evaluate_real};
use recur_core::{solve_p, AtomicMeasure, DrivingFunction, Envelope, PolyLog, RecurrenceSpec};

fn exponent(c: &mut Criterion) {
    let m = AtomicMeasure::from_pairs(&[(1.0, 2.0), (1.0, 4.0), (0.5, 3.0), (2.0, 7.0)]);
    c.bench_function("solve_p/4 terms", |b| b.iter(|| solve_p(black_box(&m)).unwrap()));
}

fn phi(c: &mut Criterion) {
    let spec = parse_spec(r#"{"terms":[{"a":7,"b":2}],"g":{"c":1,"alpha":2,"beta":1},"base":{"const":1}}"#).unwrap();
    let p = solve_p(&spec.measure).unwrap().p;
    c.bench_function("phi_numeric/x=1e9", |b| b.iter(|| phi_numeric(&spec, p, black_box(1e9)).unwrap()));
}

fn simulate(c: &mut Criterion) {
    let floors = RecurrenceSpec::simple(&[(2.0, 2.0)], DrivingFunction::PolyLog(PolyLog::power(1.0)))
        .with_perturbation(PerturbationSpec::uniform(Perturbation::Floor, 1));
    c.bench_function("evaluate_integer/merge sort 2^20", |b| {
        b.iter(|| evaluate_integer(&floors, black_box(1 << 20)).unwrap())
    });
    let two = RecurrenceSpec::simple(&[(1.0, 2.0), (1.0, 4.0)], DrivingFunction::PolyLog(PolyLog::power(1.0)));
    c.bench_function("evaluate_real/two-term 1e12", |b| b.iter(|| evaluate_real(&two, black_box(1e12), 64).unwrap()));
    let x0 = 15f64.exp();
    c.bench_function("build_counterexample/64 doublings", |b| {
        b.iter(|| {
            build_counterexample(&Envelope::InverseLogPow(1.0), x0, x0 * 2f64.powi(64), CounterexampleParams::default())
                .unwrap()
        })
    });
}

criterion_group!(benches, exponent, phi, simulate);
criterion_main!(benches);

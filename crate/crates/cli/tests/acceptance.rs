//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! failure.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use recur_core::bound::{classify_master_theorem, classify_theta, phi_numeric, GrowthClass, MasterCaseKind};
use recur_core::exponent::solve_p;
use recur_core::model::{
    parse_spec, AtomicMeasure, BaseCase, DrivingFunction, Envelope, Perturbation, PerturbationSpec, PolyLog,
    RecurrenceSpec,
};
use recur_core::or_variation::{
    check_pairs, empirical_check, estimate_star, sample_pairs, shrink_c, square_stretch, OrCheck, OrWitness,
};
use recur_core::perturbation::{build_counterexample, check_admissibility, Admissibility, CounterexampleParams};
use recur_core::simulator::{
    empirical_t_in_or, evaluate_integer, evaluate_real, sandwich_integrals, sweep_g_integral_bounds, theta_band,
    DEFAULT_MAX_SPREAD,
};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn load(name: &str) -> RecurrenceSpec {
    parse_spec(&std::fs::read_to_string(fixture(name)).unwrap()).unwrap()
}

fn bisection_oracle(m: &AtomicMeasure) -> f64 {
    let f = |p: f64| -> f64 { m.terms().iter().map(|t| t.weight * (-p * t.divisor.ln()).exp()).sum::<f64>() - 1.0 };
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    while f(hi) > 0.0 {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if f(mid) > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

fn random_measure(rng: &mut ChaCha8Rng) -> AtomicMeasure {
    loop {
        let k = rng.gen_range(1..=5);
        let pairs: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(0.1..6.0), rng.gen_range(1.05..20.0))).collect();
        if pairs.iter().map(|p| p.0).sum::<f64>() >= 1.0 {
            return AtomicMeasure::from_pairs(&pairs);
        }
    }
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let e = solve_p(&AtomicMeasure::from_pairs(&[(2.0, 2.0)])).map_err(|e| e.to_string())?;
    ensure(e.p == 1.0 && e.residual.abs() < 1e-12, || format!("merge sort p = {}", e.p))?;
    let e = solve_p(&AtomicMeasure::from_pairs(&[(7.0, 2.0)])).map_err(|e| e.to_string())?;
    ensure((e.p - 7f64.log2()).abs() < 1e-10, || format!("Strassen p = {}", e.p))?;
    let m = AtomicMeasure::from_pairs(&[(1.0, 2.0), (1.0, 4.0)]);
    let e = solve_p(&m).map_err(|e| e.to_string())?;
    ensure((e.p - bisection_oracle(&m)).abs() < 1e-10, || format!("two-term p = {}", e.p))?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    let mut solve_time = Duration::ZERO;
    for _ in 0..1000 {
        let m = random_measure(&mut rng);
        let t = Instant::now();
        let p = solve_p(&m).map_err(|e| e.to_string())?.p;
        solve_time += t.elapsed();
        worst = worst.max((p - bisection_oracle(&m)).abs());
    }
    ensure(worst < 1e-10, || format!("max oracle disagreement {worst:e}"))?;
    ensure(solve_time < Duration::from_secs(1), || format!("1000 solves took {solve_time:?}"))?;
    Ok(format!(
        "max |p - oracle| = {worst:.1e} over 1000 measures; solver time {solve_time:.1?} (total {:.1?})",
        start.elapsed()
    ))
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let offsets = [-1.5, -1.0, -0.3, 0.0, 0.0, 0.3, 1.0, 2.0];
    let betas = [-2.0, -1.5, -1.0, -0.5, 0.0, 0.5, 1.0, 2.0];
    let (mut cases, mut gaps, mut disagreements) = ([0usize; 3], [0usize; 3], Vec::new());
    for i in 0..500 {
        let a = if i % 3 == 0 { rng.gen_range(1..=9) as f64 } else { rng.gen_range(1.0..10.0) };
        let b = if i % 2 == 0 { rng.gen_range(2..=5) as f64 } else { rng.gen_range(1.2..6.0) };
        let crit = a.ln() / b.ln();
        let alpha = (crit + offsets[rng.gen_range(0..offsets.len())]).max(0.0);
        let beta = betas[rng.gen_range(0..betas.len())];
        let g = DrivingFunction::PolyLog(PolyLog::new(1.0, alpha, beta));
        let measure = AtomicMeasure::from_pairs(&[(a, b)]);
        let p = solve_p(&measure).map_err(|e| e.to_string())?.p;
        let class = classify_theta(&measure, &g, p).map_err(|e| e.to_string())?;
        let master = classify_master_theorem(a, b, &g, &recur_core::bound::DEFAULT_EPSILON_GRID);
        let expected = match &master.case {
            MasterCaseKind::Case1 | MasterCaseKind::Case2 | MasterCaseKind::Case3 => {
                let k = match master.case {
                    MasterCaseKind::Case1 => 0,
                    MasterCaseKind::Case2 => 1,
                    _ => 2,
                };
                cases[k] += 1;
                master.predicted_class(a, b, &g)
            }
            MasterCaseKind::NotApplicable(reason) if reason == "gap" => {
                // independent statement of the gap classes
                let (k, c) = if beta > -1.0 {
                    (0, GrowthClass::new(p, beta + 1.0, 0.0))
                } else if beta == -1.0 {
                    (1, GrowthClass::new(p, 0.0, 1.0))
                } else {
                    (2, GrowthClass::power(p))
                };
                gaps[k] += 1;
                Some(c)
            }
            MasterCaseKind::NotApplicable(r) => return Err(format!("unexpected inapplicability: {r}")),
        };
        if expected.as_ref() != Some(&class) {
            disagreements.push(format!("a={a}, b={b}, alpha={alpha}, beta={beta}: {class} vs {expected:?}"));
        }
    }
    ensure(disagreements.is_empty(), || format!("{} disagreements, first: {}", disagreements.len(), disagreements[0]))?;
    ensure(cases.iter().all(|&c| c > 0), || format!("case coverage {cases:?}"))?;
    ensure(gaps[0] > 0 && gaps[1] + gaps[2] > 0, || format!("gap coverage {gaps:?}"))?;
    Ok(format!(
        "0 disagreements; cases 1/2/3 = {:?}, gaps beta>-1 / beta=-1 / beta<-1 = {:?}",
        cases, gaps
    ))
}

fn criterion_3() -> Outcome {
    let xs: Vec<f64> = (0..=120).map(|i| 10f64.powf(1.0 + 6.0 * i as f64 / 120.0)).collect();
    let mut report = Vec::new();
    for (name, spec, closed) in [
        (
            "merge sort",
            load("merge_sort.json"),
            Box::new(|x: f64, x0: f64, _p: f64| x * (1.0 + (x / x0).ln())) as Box<dyn Fn(f64, f64, f64) -> f64>,
        ),
        (
            "Strassen",
            load("strassen.json"),
            Box::new(|x: f64, x0: f64, p: f64| x.powf(p) * (1.0 + (x.powf(2.0 - p) - x0.powf(2.0 - p)) / (2.0 - p))),
        ),
    ] {
        let p = solve_p(&spec.measure).map_err(|e| e.to_string())?.p;
        let x0 = spec.effective_x0().map_err(|e| e.to_string())?;
        let start = Instant::now();
        let mut worst = 0.0f64;
        for &x in &xs {
            let v = phi_numeric(&spec, p, x).map_err(|e| e.to_string())?;
            worst = worst.max((v / closed(x, x0, p) - 1.0).abs());
        }
        let took = start.elapsed();
        ensure(worst < 1e-8, || format!("{name}: relative error {worst:e}"))?;
        ensure(took < Duration::from_secs(1), || format!("{name}: curve took {took:?}"))?;
        report.push(format!("{name} max rel err {worst:.1e} in {took:.1?}"));
    }
    Ok(report.join("; "))
}

fn tail_ratios(spec: &RecurrenceSpec, n_max: u64) -> Result<(f64, f64, f64), String> {
    let p = solve_p(&spec.measure).map_err(|e| e.to_string())?.p;
    let grid = evaluate_integer(spec, n_max).map_err(|e| e.to_string())?;
    let band = theta_band(spec, p, &grid).map_err(|e| e.to_string())?;
    Ok((band.band_low, band.band_high, band.spread))
}

fn criterion_4() -> Outcome {
    let start = Instant::now();
    let (_, _, s_int) = tail_ratios(&load("merge_sort.json"), 1 << 20)?;
    let t_int = start.elapsed();
    ensure(s_int <= 4.0, || format!("integer merge sort spread {s_int}"))?;
    ensure(t_int < Duration::from_secs(10), || format!("integer merge sort took {t_int:?}"))?;

    let start = Instant::now();
    let spec = load("two_term.json");
    let p = solve_p(&spec.measure).map_err(|e| e.to_string())?.p;
    let grid = evaluate_real(&spec, 1e7, 64).map_err(|e| e.to_string())?;
    let band = theta_band(&spec, p, &grid).map_err(|e| e.to_string())?;
    let t_real = start.elapsed();
    ensure(band.spread <= 2.0, || format!("two-term spread {}", band.spread))?;
    ensure(t_real < Duration::from_secs(10), || format!("two-term took {t_real:?}"))?;
    Ok(format!(
        "integer merge sort to 2^20 spread {s_int:.4} ({t_int:.1?}); two-term real to 1e7 spread {:.4} ({t_real:.1?})",
        band.spread
    ))
}

fn criterion_5() -> Outcome {
    let (lo_f, hi_f, _) = tail_ratios(&load("merge_sort.json"), 1 << 20)?;
    let (lo_c, hi_c, _) = tail_ratios(&load("merge_sort_ceil.json"), 1 << 20)?;
    let merged = hi_f.max(hi_c) / lo_f.min(lo_c);
    ensure(merged <= 4.0, || format!("merged spread {merged}"))?;
    Ok(format!(
        "floor band [{lo_f:.4}, {hi_f:.4}], ceiling band [{lo_c:.4}, {hi_c:.4}], merged spread {merged:.4}"
    ))
}

fn canonical(env: Envelope) -> RecurrenceSpec {
    RecurrenceSpec::simple(&[(3.0, 3.0)], DrivingFunction::Zero)
        .with_x0(15f64.exp())
        .with_perturbation(PerturbationSpec::uniform(Perturbation::Bounded { lambda: env.clone(), mu: env }, 1))
}

fn criterion_6() -> Outcome {
    let x0 = 15f64.exp();
    let x_max = x0 * 2f64.powi(64);

    let good = canonical(Envelope::InverseLogPow(2.0));
    let verdict = check_admissibility(&good.perturbation);
    ensure(verdict.verdict() == Admissibility::Admissible, || format!("1/(ln x)^2 verdict {:?}", verdict.verdict()))?;
    let grid = evaluate_real(&good, x_max, 64).map_err(|e| e.to_string())?;
    let band = theta_band(&good, 1.0, &grid).map_err(|e| e.to_string())?;
    ensure(band.passes(DEFAULT_MAX_SPREAD), || format!("1/(ln x)^2 band spread {}", band.spread))?;

    let bad = canonical(Envelope::InverseLogPow(1.0));
    let verdict = check_admissibility(&bad.perturbation);
    ensure(verdict.verdict() == Admissibility::Inadmissible, || format!("1/ln x verdict {:?}", verdict.verdict()))?;
    let trace = build_counterexample(&Envelope::InverseLogPow(1.0), x0, x_max, CounterexampleParams::default())
        .map_err(|e| e.to_string())?;
    ensure(trace.growth() >= 10.0, || format!("counterexample growth {}", trace.growth()))?;
    ensure(trace.theta_seq.windows(2).all(|w| w[1].theta > w[0].theta), || "theta product not increasing".into())?;
    let theta0 = (1.0 / x0).min(3.0 / (2.0 * x0));
    let mut worst = 0.0f64;
    for e in &trace.theta_seq {
        let product: f64 = (1..=e.j + 1).map(|k| 1.0 + 3.0 / (x0 * 2f64.powi(k as i32)).ln()).product();
        worst = worst.max((e.theta / (theta0 * product) - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("theta product off by {worst:e}"))?;
    Ok(format!(
        "1/(ln x)^2: admissible, band spread {:.3}; 1/ln x: inadmissible, growth {:.1}x over 64 doublings, \
         theta rel err {worst:.1e}",
        band.spread,
        trace.growth()
    ))
}

fn random_function(rng: &mut ChaCha8Rng) -> (String, Box<dyn Fn(f64) -> f64>) {
    match rng.gen_range(0..4) {
        0 => {
            let k = rng.gen_range(-2.0..3.0);
            (format!("x^{k:.3}"), Box::new(move |x: f64| x.powf(k)))
        }
        1 => {
            let (k, b) = (rng.gen_range(0.0..3.0), rng.gen_range(-2.0..2.0));
            (format!("x^{k:.3} ln^{b:.3}"), Box::new(move |x: f64| x.powf(k) * x.ln().powf(b)))
        }
        2 => {
            let e = rng.gen_range(0.05..0.5);
            (format!("x^(1+{e:.3} sin ln x)"), Box::new(move |x: f64| x.powf(1.0 + e * x.ln().sin())))
        }
        _ => {
            let w = rng.gen_range(0.1..0.9);
            (format!("x (2 + sin({w:.3} ln x))"), Box::new(move |x: f64| x * (2.0 + (w * x.ln()).sin())))
        }
    }
}

fn criterion_7() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut violations, mut passes, mut stretched_checked) = (Vec::new(), 0, 0);
    for i in 0..100 {
        let (name, f) = random_function(&mut rng);
        let c = rng.gen_range(1.2..4.0);
        let w = OrWitness::new(rng.gen_range(0.01..1.0), rng.gen_range(1.0..50.0), c, 3.0).map_err(|e| e.to_string())?;
        let seed = i as u64;
        let fr = |x: f64| Ok(f(x));
        let base = empirical_check(fr, &w, 1e8, 100, seed).map_err(|e| e.to_string())?;

        // stretched witness: a pass for (A, B, c) forces one for (A^2, B^2, c^2)
        let sq = square_stretch(&w);
        let stretched = empirical_check(fr, &sq, 1e8, 100, seed).map_err(|e| e.to_string())?;
        if base.passed() {
            passes += 1;
            stretched_checked += 1;
            if !stretched.passed() {
                violations.push(format!("{name}: square_stretch lost a pass for {w:?}"));
            }
        }

        // shrunk witness: every sampled pair is a window pair of the original,
        // so any counterexample also refutes the original witness
        let shrunk = shrink_c(&w, rng.gen_range(1.0..c).max(1.0 + 1e-9)).map_err(|e| e.to_string())?;
        let pairs = sample_pairs(&shrunk, 1e8, 100, seed);
        if pairs.iter().any(|&(x, t)| !(t >= x / w.c && t <= x && t >= w.valid_from)) {
            violations.push(format!("{name}: shrink_c produced a pair outside the original windows"));
        }
        let on_shrunk = check_pairs(fr, &shrunk, &pairs).map_err(|e| e.to_string())?;
        let on_original = check_pairs(fr, &w, &pairs).map_err(|e| e.to_string())?;
        if on_shrunk.passed() != on_original.passed() {
            violations.push(format!("{name}: shrink_c verdict differs from the original witness"));
        }
    }
    ensure(violations.is_empty(), || format!("{} violations, first: {}", violations.len(), violations[0]))?;

    let grid: Vec<f64> = (0..400).map(|i| 10f64.powf(1.0 + i as f64 / 40.0)).collect();
    let mut worst = 0.0f64;
    for &(p, lambda) in &[(1.0, 2.0), (2.807354922057604, 2.0), (0.5, 3.7), (-1.0, 0.25), (3.0, 10.0)] {
        let est = estimate_star(|x: f64| Ok(x.powf(p)), lambda, &grid).map_err(|e| e.to_string())?;
        let target = lambda.powf(p);
        worst = worst.max((est.f_star / target - 1.0).abs()).max((est.f_lower / target - 1.0).abs());
    }
    ensure(worst <= 1e-12, || format!("estimate_star off by {worst:e}"))?;
    Ok(format!(
        "0 violations over 100 pairs ({passes} base passes, {stretched_checked} stretch implications); \
         estimate_star rel err {worst:.1e}"
    ))
}

fn random_spec(rng: &mut ChaCha8Rng) -> RecurrenceSpec {
    loop {
        let k = rng.gen_range(1..=3);
        let pairs: Vec<(f64, f64)> = (0..k).map(|_| (rng.gen_range(0.3..4.0), rng.gen_range(1.5..6.0))).collect();
        if pairs.iter().map(|p| p.0).sum::<f64>() < 1.0 {
            continue;
        }
        let term = |rng: &mut ChaCha8Rng| {
            PolyLog::new(rng.gen_range(0.5..3.0), rng.gen_range(0.0..3.0), [0.0, 1.0, -1.0, 0.5, 2.0][rng.gen_range(0..5)])
        };
        let g = match rng.gen_range(0..4) {
            0 => DrivingFunction::Zero,
            1 => DrivingFunction::Sum(vec![term(rng), term(rng)]),
            _ => DrivingFunction::PolyLog(term(rng)),
        };
        return RecurrenceSpec::simple(&pairs, g).with_base(BaseCase::Const(rng.gen_range(0.5..5.0)));
    }
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut failures = Vec::new();
    let mut widest = (1.0f64, 1.0f64);
    for i in 0..20 {
        let spec = random_spec(&mut rng);
        let grid = evaluate_real(&spec, 1e8, 64).map_err(|e| e.to_string())?;
        let r = empirical_t_in_or(&spec, &grid, 300, i).map_err(|e| e.to_string())?;
        widest = (widest.0.min(r.witness.lower), widest.1.max(r.witness.upper));
        if let OrCheck::Counterexample(ce) = r.check {
            failures.push(format!("spec {i} ({:?}, {:?}): {ce:?} vs {:?}", spec.measure, spec.g, r.witness));
        }
    }
    ensure(failures.is_empty(), || format!("{} failures, first: {}", failures.len(), failures[0]))?;
    Ok(format!("20/20 specs pass with window m; widest witness A = {:.3e}, B = {:.3e}", widest.0, widest.1))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut report = Vec::new();
    for name in ["merge_sort.json", "strassen.json", "two_term.json", "gap.json"] {
        let spec = load(name);
        let p = solve_p(&spec.measure).map_err(|e| e.to_string())?.p;
        let big_m0 = spec.measure.max_divisor().powi(2);
        let lo = big_m0 * spec.effective_x0().map_err(|e| e.to_string())?;
        let hi = 1e9;
        let b = sweep_g_integral_bounds(&spec, lo, hi, 2000).map_err(|e| e.to_string())?;
        for _ in 0..100 {
            let x = rng.gen_range(lo.ln()..hi.ln()).exp();
            let gx = spec.g.eval(x).map_err(|e| e.to_string())?;
            let (inner, outer) = sandwich_integrals(&spec.g, p, x, b.m0, b.big_m0).map_err(|e| e.to_string())?;
            ensure(b.c * gx <= inner, || format!("{name}: C g(x) > inner integral at x = {x}"))?;
            ensure(inner <= outer, || format!("{name}: middle inequality fails at x = {x}"))?;
            ensure(outer <= b.d * gx, || format!("{name}: outer integral > D g(x) at x = {x}"))?;
        }
        report.push(format!("{} C={:.4} D={:.4}", name.trim_end_matches(".json"), b.c, b.d));
    }
    Ok(format!("100 samples each hold; {}", report.join(", ")))
}

fn cli(args: &[&str]) -> (i32, Vec<u8>, Vec<u8>) {
    let out = Command::new(env!("CARGO_BIN_EXE_recur")).args(args).output().expect("run recur");
    (out.status.code().unwrap_or(-1), out.stdout, out.stderr)
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let f = |n: &str| fixture(n).to_string_lossy().into_owned();
    let csv1 = dir.path().join("a.csv").to_string_lossy().into_owned();
    let csv2 = dir.path().join("b.csv").to_string_lossy().into_owned();
    let cases: Vec<(Vec<String>, i32)> = vec![
        (vec!["solve".into(), f("merge_sort.json")], 0),
        (vec!["solve".into(), f("two_term.json")], 0),
        (vec!["classify".into(), f("strassen.json")], 0),
        (vec!["classify".into(), f("gap.json")], 0),
        (vec!["classify".into(), f("tabulated_g.json")], 3),
        (vec!["verify".into(), f("merge_sort.json"), "--xmax".into(), "65536".into(), "--integer".into()], 0),
        (vec!["verify".into(), f("two_term.json"), "--xmax".into(), "1e6".into(), "--refine".into()], 0),
        (vec!["verify".into(), f("two_term.json"), "--xmax".into(), "1e6".into(), "--max-spread".into(), "1.01".into()], 4),
        (vec!["check-or".into(), f("merge_sort.json"), "--witness".into(), "0.5,1,2".into()], 0),
        (vec!["check-or".into(), f("merge_sort.json"), "--witness".into(), "0.9,1,2".into()], 5),
        (vec!["admissible".into(), f("leighton_alpha1.json")], 6),
        (vec!["admissible".into(), f("leighton_alpha2.json")], 0),
        (vec!["admissible".into(), f("tabulated_envelope.json")], 7),
        (
            vec!["counterexample", "--mu", "invlog:1", "--x0", "3269017", "--doublings", "64"]
                .into_iter()
                .map(String::from)
                .collect(),
            0,
        ),
        (vec!["solve".into(), f("malformed.json")], 2),
        (vec!["verify".into(), f("invalid.json")], 2),
        (vec!["frobnicate".into()], 2),
        (vec!["solve".into(), f("merge_sort.json"), "--bogus".into()], 2),
    ];
    for (args, expected) in &cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        let first = cli(&argv);
        let second = cli(&argv);
        ensure(first == second, || format!("{argv:?} is not deterministic"))?;
        ensure(first.0 == *expected, || {
            format!("{argv:?} exited {} (want {expected}): {}", first.0, String::from_utf8_lossy(&first.2))
        })?;
    }

    for out in [&csv1, &csv2] {
        let (code, ..) = cli(&["verify", &f("merge_sort.json"), "--xmax", "1e5", "--out", out]);
        ensure(code == 0, || format!("verify --out exited {code}"))?;
    }
    let (a, b) = (std::fs::read(&csv1).unwrap(), std::fs::read(&csv2).unwrap());
    ensure(a == b && a.starts_with(b"x,T,phi,ratio\n"), || "band CSV differs between runs".into())?;

    let (_, stdout, _) = cli(&["solve", &f("merge_sort.json")]);
    let text = String::from_utf8_lossy(&stdout);
    ensure(text.contains("p = 1.000000000000, residual 0e0"), || format!("solve output: {text}"))?;
    let (_, stdout, _) = cli(&["classify", &f("strassen.json")]);
    let text = String::from_utf8_lossy(&stdout);
    ensure(text.contains("Theta(x^2.807355); Master Theorem: Case 1"), || format!("classify output: {text}"))?;
    let (_, stdout, _) = cli(&["admissible", &f("leighton_alpha1.json")]);
    let text = String::from_utf8_lossy(&stdout);
    ensure(text.contains("∫ λ(t)/t dt diverges (λ = 1/log x)"), || format!("admissible output: {text}"))?;

    // the CLI adds no numerics of its own
    let spec = load("two_term.json");
    let p = solve_p(&spec.measure).map_err(|e| e.to_string())?.p;
    let (_, stdout, _) = cli(&["solve", &f("two_term.json")]);
    ensure(String::from_utf8_lossy(&stdout).contains(&format!("p = {p:.12},")), || "solve disagrees with library".into())?;
    Ok(format!("{} invocations byte-identical across runs with expected exit codes", cases.len() + 2))
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("exponent correctness", criterion_1),
        ("Master Theorem and Theta-class consistency", criterion_2),
        ("quadrature fidelity", criterion_3),
        ("Theta-band verification", criterion_4),
        ("floor/ceiling benignity", criterion_5),
        ("admissibility iff at desk scale", criterion_6),
        ("OR witness round trips", criterion_7),
        ("T in OR empirically", criterion_8),
        ("g-integral sandwich", criterion_9),
        ("CLI determinism and exit codes", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}

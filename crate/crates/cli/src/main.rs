//! `recur`: command-line front end for `recur-core`.
//!
//! Exit statuses: 0 success, 1 runtime failure, 2 malformed input or usage,
//! 3 unsupported symbolic classification, 4 Theta-band spread over the
//! threshold, 5 OR counterexample, 6 inadmissible, 7 admissibility unknown.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use recur_core::bound::{classify_master_theorem, classify_theta, DEFAULT_EPSILON_GRID};
use recur_core::exponent::{solve_p, RESIDUAL_TOL};
use recur_core::model::{parse_envelope, parse_spec, validate, RecurrenceSpec, Side, DEFAULT_X0_MARGIN};
use recur_core::or_variation::{empirical_check, OrCheck, OrWitness, DEFAULT_SEED};
use recur_core::perturbation::{
    build_counterexample, check_admissibility, check_leighton, Admissibility, CounterexampleParams, Method,
};
use recur_core::simulator::{
    evaluate_integer, evaluate_real_with, refine, theta_band, DEFAULT_MAX_SPREAD, DEFAULT_POINTS_PER_DECADE,
};
use recur_core::Error;

#[derive(Parser)]
#[command(name = "recur", version, about = "Tight bounds for divide-and-conquer recurrences")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum SideArg {
    Upper,
    Lower,
}

#[derive(Clone, Copy, ValueEnum)]
enum Target {
    /// The driving function g
    G,
    /// The solution T on a real grid
    T,
}

#[derive(Subcommand)]
enum Command {
    /// Solve sum a_i b_i^-p = 1 for the characteristic exponent
    Solve { spec: PathBuf },
    /// Symbolic Theta-class and Master Theorem case
    Classify { spec: PathBuf },
    /// Evaluate the recurrence and measure T / Phi over the tail window
    Verify {
        spec: PathBuf,
        #[arg(long, default_value_t = 1e6)]
        xmax: f64,
        /// Evaluate on the integers (every term needs a floor or ceiling)
        #[arg(long)]
        integer: bool,
        /// Compare against a grid twice as dense
        #[arg(long, conflicts_with = "integer")]
        refine: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_MAX_SPREAD)]
        max_spread: f64,
        #[arg(long, default_value_t = DEFAULT_POINTS_PER_DECADE)]
        ppd: usize,
        /// Extreme at which bounded perturbations are realized
        #[arg(long, value_enum, default_value_t = SideArg::Upper)]
        side: SideArg,
    },
    /// Search for a window pair violating an O-regular variation witness
    CheckOr {
        spec: PathBuf,
        /// A,B,c
        #[arg(long)]
        witness: String,
        #[arg(long, value_enum, default_value_t = Target::G)]
        target: Target,
        #[arg(long, default_value_t = 1e6)]
        xmax: f64,
        #[arg(long, default_value_t = 1000)]
        samples: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Left end of the checked half-line (default: x0)
        #[arg(long)]
        from: Option<f64>,
    },
    /// Decide whether the perturbations preserve the bound
    Admissible { spec: PathBuf },
    /// Trace of T(x) = a T(x/b + x mu(x)) for an envelope with divergent integral
    Counterexample {
        /// Envelope: invlog:A, invx, const:V, or a number
        #[arg(long)]
        mu: String,
        #[arg(long)]
        x0: f64,
        #[arg(long, default_value_t = 64)]
        doublings: u32,
        #[arg(long, default_value_t = 3.0)]
        a: f64,
        #[arg(long, default_value_t = 3.0)]
        b: f64,
        #[arg(long, default_value_t = 16)]
        points: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// A failed command: exit status and message for stderr.
struct Failure(u8, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Parse(_) => 2,
            Error::UnsupportedSymbolic(_) => 3,
            _ => 1,
        };
        Failure(code, e.to_string())
    }
}

type Outcome = Result<(u8, String), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok((code, out)) => {
            print!("{out}");
            ExitCode::from(code)
        }
        Err(Failure(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}

fn load(path: &Path) -> Result<RecurrenceSpec, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Failure(2, format!("cannot read {}: {e}", path.display())))?;
    let spec = parse_spec(&text).map_err(|e| Failure(2, format!("{}: {e}", path.display())))?;
    let violations = validate(&spec);
    if !violations.is_empty() {
        let mut msg = format!("{}: invalid recurrence", path.display());
        for v in &violations {
            let _ = write!(msg, "\n  {}: {}", v.code, v.message);
        }
        return Err(Failure(2, msg));
    }
    Ok(spec)
}

fn x0_line(spec: &RecurrenceSpec) -> Result<String, Failure> {
    let x0 = spec.effective_x0()?;
    let rule = if spec.x0.is_some() {
        "explicit".to_string()
    } else {
        format!("default: smallest x >= max(M (1 + {DEFAULT_X0_MARGIN:e}), e^2) with all arguments in [1, x)")
    };
    Ok(format!("# x0 = {x0} ({rule})\n"))
}

fn write_file(path: &Path, text: &str) -> Result<(), Failure> {
    std::fs::write(path, text).map_err(|e| Failure(1, format!("cannot write {}: {e}", path.display())))
}

fn run(command: Command) -> Outcome {
    match command {
        Command::Solve { spec } => solve(&load(&spec)?),
        Command::Classify { spec } => classify(&load(&spec)?),
        Command::Verify {
            spec,
            xmax,
            integer,
            refine,
            out,
            max_spread,
            ppd,
            side,
        } => verify(&load(&spec)?, xmax, integer, refine, out.as_deref(), max_spread, ppd, side),
        Command::CheckOr {
            spec,
            witness,
            target,
            xmax,
            samples,
            seed,
            from,
        } => check_or(&load(&spec)?, &witness, target, xmax, samples, seed, from),
        Command::Admissible { spec } => admissible(&load(&spec)?),
        Command::Counterexample {
            mu,
            x0,
            doublings,
            a,
            b,
            points,
            out,
        } => counterexample(&mu, x0, doublings, a, b, points, out.as_deref()),
    }
}

fn solve(spec: &RecurrenceSpec) -> Outcome {
    let e = solve_p(&spec.measure)?;
    let mut out = format!("# solve: bisection to width 1e-6, Newton polish, residual tolerance {RESIDUAL_TOL:e}\n");
    let _ = writeln!(out, "p = {:.12}, residual {:e}", e.p, e.residual);
    let _ = writeln!(out, "iterations = {}", e.iterations);
    let _ = writeln!(out, "bracket = [{}, {}]", e.bracket.0, e.bracket.1);
    Ok((0, out))
}

fn classify(spec: &RecurrenceSpec) -> Outcome {
    let p = solve_p(&spec.measure)?.p;
    let class = classify_theta(&spec.measure, &spec.g, p)?;
    let master = match spec.measure.terms() {
        [t] => classify_master_theorem(t.weight, t.divisor, &spec.g, &DEFAULT_EPSILON_GRID).describe(),
        _ => "not applicable (more than one recursive term)".into(),
    };
    let mut out = format!("# classify: natural logarithms, epsilon grid {DEFAULT_EPSILON_GRID:?}\n");
    let _ = writeln!(out, "{class}; Master Theorem: {master}");
    Ok((0, out))
}

#[allow(clippy::too_many_arguments)]
fn verify(
    spec: &RecurrenceSpec,
    xmax: f64,
    integer: bool,
    do_refine: bool,
    out_path: Option<&Path>,
    max_spread: f64,
    ppd: usize,
    side: SideArg,
) -> Outcome {
    let side = match side {
        SideArg::Upper => Side::Upper,
        SideArg::Lower => Side::Lower,
    };
    let p = solve_p(&spec.measure)?.p;
    let mut out = x0_line(spec)?;
    let grid = if integer {
        if !(xmax >= 1.0 && xmax <= u32::MAX as f64) {
            return Err(Failure(2, format!("--xmax {xmax} is not a usable integer bound")));
        }
        let g = evaluate_integer(spec, xmax as u64)?;
        let _ = writeln!(out, "# grid: integers 1..={}, base case up to n = {}", xmax as u64, g.base_end());
        g
    } else {
        let g = evaluate_real_with(spec, xmax, ppd, side)?;
        let _ = writeln!(
            out,
            "# grid: geometric, {ppd} points per decade from the base end {}, log-log interpolation, perturbation side {}",
            g.base_end(),
            match side {
                Side::Upper => "upper",
                Side::Lower => "lower",
            }
        );
        g
    };
    let band = theta_band(spec, p, &grid)?;
    let _ = writeln!(out, "# tail window: x >= sqrt(x_max) = {}", band.tail_start);
    let _ = writeln!(out, "# spread threshold: {max_spread}");
    let _ = writeln!(out, "p = {:.12}", p);
    let _ = writeln!(out, "band = [{:.9e}, {:.9e}]", band.band_low, band.band_high);
    let _ = writeln!(out, "spread = {:.9}", band.spread);
    let _ = writeln!(out, "growth over all samples = {:.9}", band.growth());
    if do_refine {
        let r = refine(spec, xmax, ppd, side)?;
        let _ = writeln!(
            out,
            "refine: max relative difference vs {} points per decade = {:.3e} at x = {:.9e} (tail {:.3e}, {} nodes)",
            2 * ppd,
            r.max_relative_difference,
            r.worst_x,
            r.tail_max_relative_difference,
            r.compared
        );
    }
    if let Some(path) = out_path {
        write_file(path, &band.to_csv())?;
        let _ = writeln!(out, "wrote {} rows to {}", band.samples.len(), path.display());
    }
    if band.passes(max_spread) {
        out.push_str("verdict: PASS\n");
        Ok((0, out))
    } else {
        out.push_str("verdict: FAIL (spread above threshold)\n");
        Ok((4, out))
    }
}

fn parse_witness(s: &str) -> Result<(f64, f64, f64), Failure> {
    let parts: Vec<f64> = s
        .split(',')
        .map(|v| v.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|e| Failure(2, format!("--witness {s}: {e}")))?;
    match parts[..] {
        [a, b, c] => Ok((a, b, c)),
        _ => Err(Failure(2, format!("--witness needs A,B,c; got {s}"))),
    }
}

fn check_or(
    spec: &RecurrenceSpec,
    witness: &str,
    target: Target,
    xmax: f64,
    samples: usize,
    seed: u64,
    from: Option<f64>,
) -> Outcome {
    let (a, b, c) = parse_witness(witness)?;
    let from = match from {
        Some(v) => v,
        None => spec.effective_x0()?,
    };
    let w = OrWitness::new(a, b, c, from).map_err(|e| Failure(2, e.to_string()))?;
    let mut out = x0_line(spec)?;
    let _ = writeln!(
        out,
        "# check-or: {samples} chains, seed {seed}, pairs in [{from}, {xmax}], step exponent uniform in [1/2, 1]"
    );
    let check = match target {
        Target::G => {
            let _ = writeln!(out, "# target: g");
            empirical_check(|x| spec.g.eval(x), &w, xmax, samples, seed)?
        }
        Target::T => {
            let grid = evaluate_real_with(spec, xmax, DEFAULT_POINTS_PER_DECADE, Side::Upper)?;
            let _ = writeln!(out, "# target: T on a {DEFAULT_POINTS_PER_DECADE} points per decade grid");
            empirical_check(|x| grid.value_at(x), &w, grid.x_max(), samples, seed)?
        }
    };
    let _ = writeln!(out, "witness: A = {a}, B = {b}, c = {c}");
    match check {
        OrCheck::Pass => {
            out.push_str("no counterexample found\n");
            Ok((0, out))
        }
        OrCheck::Counterexample(ce) => {
            let _ = writeln!(
                out,
                "counterexample: x = {:.17e}, t = {:.17e}, f(t)/f(x) = {:.17e} outside [{a}, {b}]",
                ce.x, ce.t, ce.ratio
            );
            Ok((5, out))
        }
    }
}

fn admissible(spec: &RecurrenceSpec) -> Outcome {
    let verdict = check_admissibility(&spec.perturbation);
    let mut out = String::from(
        "# admissible: symbolic verdicts for constant, 1/x and 1/(log x)^a envelopes; \
         tabulated envelopes use 64 doublings with a 16-increment tail\n",
    );
    let _ = writeln!(
        out,
        "# method: {}",
        match verdict.method {
            Method::Symbolic => "symbolic",
            Method::NumericExtrapolation => "numeric extrapolation",
        }
    );
    for line in &verdict.detail {
        let _ = writeln!(out, "{line}");
    }
    for (i, p) in spec.perturbation.terms.iter().enumerate() {
        let (l, m) = p.envelopes();
        let leighton = match (check_leighton(&l), check_leighton(&m)) {
            (Ok(true), Ok(true)) => "holds",
            (Ok(_), Ok(_)) => "fails",
            _ => "undecided",
        };
        let _ = writeln!(out, "term {i}: Leighton condition {leighton}");
    }
    let (code, word) = match verdict.verdict() {
        Admissibility::Admissible => (0, "admissible"),
        Admissibility::Inadmissible => (6, "inadmissible"),
        Admissibility::Unknown => (7, "unknown"),
    };
    let _ = writeln!(out, "verdict: {word}");
    Ok((code, out))
}

fn counterexample(mu: &str, x0: f64, doublings: u32, a: f64, b: f64, points: usize, out_path: Option<&Path>) -> Outcome {
    let env = parse_envelope(mu).map_err(|e| Failure(2, e.to_string()))?;
    let params = CounterexampleParams {
        a,
        b,
        points_per_interval: points,
        ..CounterexampleParams::default()
    };
    let x_max = x0 * 2f64.powi(doublings as i32);
    let trace = build_counterexample(&env, x0, x_max, params)?;
    let csv = trace.to_csv();
    let mut summary = format!(
        "# counterexample: T = 1 on [1, x0], T(x) = a T(x/b + x mu(x)); a = {a}, b = {b}, p = {}, m0 = {}, \
         {points} points per interval, mu = {}\n",
        trace.p,
        params.grid_base,
        env.describe()
    );
    let _ = writeln!(summary, "# x0 = {x0}, x_max = x0 2^{doublings}");
    let _ = writeln!(summary, "# max T(x)/x^p over T(x0)/x0^p = {:.9}", trace.growth());
    match out_path {
        Some(path) => {
            write_file(path, &csv)?;
            let _ = writeln!(summary, "wrote {} rows to {}", trace.x_samples.len(), path.display());
            Ok((0, summary))
        }
        None => {
            eprint!("{summary}");
            Ok((0, csv))
        }
    }
}

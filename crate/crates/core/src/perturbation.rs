//! Admissibility of perturbations `h` with `-lambda(x) <= h(x)/x <= mu(x)`.
//!
//! The bound survives every such perturbation exactly when both
//! `int lambda(t)/t dt` and `int mu(t)/t dt` converge. When the `mu` integral
//! diverges, [`build_counterexample`] constructs a recurrence whose growth
//! escapes the bound.

use std::collections::HashMap;
use std::f64::consts::LN_2;

use crate::error::{Error, Result};
use crate::model::{Envelope, PerturbationSpec};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Convergence {
    Converges,
    Diverges,
    Unknown,
}

impl Convergence {
    /// Worst of two verdicts: divergence beats unknown beats convergence.
    fn and(self, other: Self) -> Self {
        use Convergence::*;
        match (self, other) {
            (Diverges, _) | (_, Diverges) => Diverges,
            (Unknown, _) | (_, Unknown) => Unknown,
            _ => Converges,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Symbolic,
    NumericExtrapolation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Admissibility {
    Admissible,
    Inadmissible,
    Unknown,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AdmissibilityVerdict {
    pub lambda: Convergence,
    pub mu: Convergence,
    pub method: Method,
    /// One line of evidence per envelope.
    pub detail: Vec<String>,
}

impl AdmissibilityVerdict {
    pub fn verdict(&self) -> Admissibility {
        match self.lambda.and(self.mu) {
            Convergence::Converges => Admissibility::Admissible,
            Convergence::Diverges => Admissibility::Inadmissible,
            Convergence::Unknown => Admissibility::Unknown,
        }
    }

    pub fn is_admissible(&self) -> bool {
        self.verdict() == Admissibility::Admissible
    }
}

/// Doublings inspected for tabulated envelopes.
pub const NUMERIC_DOUBLINGS: usize = 64;
/// Increments inspected at the end of the partial-sum sequence.
const TAIL_WINDOW: usize = 16;
/// Increments above this floor across the tail count as divergence.
pub const DIVERGENCE_FLOOR: f64 = 1e-3;
/// Consecutive increment ratios at most this count as geometric decay.
pub const GEOMETRIC_RATIO: f64 = 0.9;

/// Convergence of `int^inf env(t)/t dt` with one line of evidence.
pub fn envelope_convergence(env: &Envelope) -> (Convergence, Method, String) {
    let name = env.describe();
    match env {
        Envelope::Const(v) if *v == 0.0 => (
            Convergence::Converges,
            Method::Symbolic,
            "integral vanishes (envelope is 0)".into(),
        ),
        Envelope::Const(_) => (
            Convergence::Diverges,
            Method::Symbolic,
            format!("integral of {name}/t diverges like log x"),
        ),
        Envelope::InverseX => (
            Convergence::Converges,
            Method::Symbolic,
            "integral of dt/t^2 converges, tail 1/x".into(),
        ),
        Envelope::InverseLogPow(a) if *a > 1.0 => (
            Convergence::Converges,
            Method::Symbolic,
            format!("integral of dt/(t (log t)^{a}) converges, tail (log x)^(1-a)/(a-1) with a = {a}"),
        ),
        Envelope::InverseLogPow(a) if *a == 1.0 => (
            Convergence::Diverges,
            Method::Symbolic,
            format!("integral of dt/(t log t) diverges like log log x ({name})"),
        ),
        Envelope::InverseLogPow(a) => (
            Convergence::Diverges,
            Method::Symbolic,
            format!("integral of dt/(t (log t)^{a}) diverges like (log x)^{}", 1.0 - a),
        ),
        Envelope::Tabulated(points) => {
            let (c, why) = tabulated_convergence(points);
            (c, Method::NumericExtrapolation, why)
        }
    }
}

/// Partial sums `S_n = sum_j env(x0 2^j) ln 2` over the sampled range,
/// `x0` being the first sample.
fn tabulated_convergence(points: &[(f64, f64)]) -> (Convergence, String) {
    let Some(&(x0, _)) = points.first() else {
        return (Convergence::Unknown, "no samples".into());
    };
    let x_end = points.last().map(|p| p.0).unwrap_or(x0);
    let env = Envelope::Tabulated(points.to_vec());
    let incs: Vec<f64> = (0..NUMERIC_DOUBLINGS)
        .map(|j| x0 * 2f64.powi(j as i32))
        .take_while(|&x| x <= x_end)
        .map(|x| env.eval(x) * LN_2)
        .collect();
    if incs.len() < TAIL_WINDOW + 1 {
        return (
            Convergence::Unknown,
            format!("only {} doublings sampled; need {}", incs.len(), TAIL_WINDOW + 1),
        );
    }
    let sum: f64 = incs.iter().sum();
    let tail = &incs[incs.len() - TAIL_WINDOW..];
    if tail.iter().all(|&d| d == 0.0) {
        return (Convergence::Converges, format!("partial sum {sum:.6} with zero tail"));
    }
    if tail.windows(2).all(|w| w[1] <= GEOMETRIC_RATIO * w[0]) {
        return (
            Convergence::Converges,
            format!("partial sum {sum:.6}; tail increments decay at ratio <= {GEOMETRIC_RATIO}"),
        );
    }
    if tail.iter().all(|&d| d >= DIVERGENCE_FLOOR) {
        return (
            Convergence::Diverges,
            format!("partial sum {sum:.6}; tail increments stay above {DIVERGENCE_FLOOR}"),
        );
    }
    (
        Convergence::Unknown,
        format!("partial sum {sum:.6}; tail trend inconclusive"),
    )
}

/// Decides whether the bound survives the given perturbations.
pub fn check_admissibility(spec: &PerturbationSpec) -> AdmissibilityVerdict {
    let mut lambda = Convergence::Converges;
    let mut mu = Convergence::Converges;
    let mut method = Method::Symbolic;
    let mut detail = Vec::new();
    for (i, p) in spec.terms.iter().enumerate() {
        let (l_env, m_env) = p.envelopes();
        for (sym, env, acc) in [("λ", &l_env, &mut lambda), ("μ", &m_env, &mut mu)] {
            let (c, m, why) = envelope_convergence(env);
            *acc = acc.and(c);
            if m == Method::NumericExtrapolation {
                method = Method::NumericExtrapolation;
            }
            let verb = match c {
                Convergence::Converges => "converges",
                Convergence::Diverges => "diverges",
                Convergence::Unknown => "undecided",
            };
            detail.push(format!(
                "term {i}: ∫ {sym}(t)/t dt {verb} ({sym} = {}); {why}",
                env.describe()
            ));
        }
    }
    AdmissibilityVerdict {
        lambda,
        mu,
        method,
        detail,
    }
}

/// Whether `|h(x)|/x <= env(x)` implies the classical sufficient condition
/// `|h(x)| <= x / (ln x)^alpha` for some `alpha > 1`.
///
/// Passing implies admissibility; the converse fails (e.g. for
/// `1 / (ln x (ln ln x)^2)`).
pub fn check_leighton(env: &Envelope) -> Result<bool> {
    match env {
        Envelope::Const(v) => Ok(*v == 0.0),
        Envelope::InverseX => Ok(true),
        Envelope::InverseLogPow(a) => Ok(*a > 1.0),
        Envelope::Tabulated(_) => Err(Error::Unknown(
            "tabulated envelopes cannot be compared symbolically".into(),
        )),
    }
}

/// Whether `env` is eventually dominated by `C / (ln x)^alpha` for the given
/// `alpha`.
pub fn leighton_dominates(env: &Envelope, alpha: f64) -> Result<bool> {
    if !(alpha > 1.0) {
        return Ok(false);
    }
    match env {
        Envelope::InverseLogPow(a) => Ok(*a >= alpha),
        other => check_leighton(other),
    }
}

/// Parameters of the single-term counterexample recurrence
/// `T(x) = a T(x/b + x mu(x))`, `T = 1` on `[1, x0]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CounterexampleParams {
    pub a: f64,
    pub b: f64,
    /// Grid base for the doubling intervals `[x0 m0^j, x0 m0^{j+1})`.
    pub grid_base: f64,
    /// Evaluation points per doubling interval.
    pub points_per_interval: usize,
}

impl Default for CounterexampleParams {
    fn default() -> Self {
        Self {
            a: 3.0,
            b: 3.0,
            grid_base: 2.0,
            points_per_interval: 16,
        }
    }
}

impl CounterexampleParams {
    /// `p = log_b a`.
    pub fn p(&self) -> f64 {
        self.a.ln() / self.b.ln()
    }

    /// Largest `mu(x0)` keeping `x/b + x mu(x)` inside `[x/(b+1), x/(b-1))`.
    /// For `b = 3` this is `1/12`.
    pub fn guard(&self) -> f64 {
        1.0 / (self.b * (self.b + 1.0))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaEntry {
    pub j: usize,
    /// `theta_0 prod_{k=1}^{j+1} (1 + b mu(x0 m0^k))^p`
    pub theta: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TraceSample {
    /// Doubling interval containing `x`.
    pub j: usize,
    pub x: f64,
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleTrace {
    pub a: f64,
    pub b: f64,
    pub p: f64,
    pub x0: f64,
    pub theta_seq: Vec<ThetaEntry>,
    pub x_samples: Vec<TraceSample>,
}

impl CounterexampleTrace {
    /// `T(x0) / x0^p`.
    pub fn initial_ratio(&self) -> f64 {
        self.x0.powf(-self.p)
    }

    pub fn max_ratio(&self) -> f64 {
        self.x_samples.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    /// `max T(x)/x^p` over the samples relative to its value at `x0`.
    pub fn growth(&self) -> f64 {
        self.max_ratio() / self.initial_ratio()
    }

    /// Smallest and largest `T(x)/x^p` over samples in interval `j`.
    pub fn interval_band(&self, j: usize) -> Option<(f64, f64)> {
        self.x_samples
            .iter()
            .filter(|s| s.j == j)
            .fold(None, |acc, s| match acc {
                None => Some((s.ratio, s.ratio)),
                Some((lo, hi)) => Some((lo.min(s.ratio), hi.max(s.ratio))),
            })
    }

    /// CSV with header `j,theta_lower,x,T,ratio`, one row per sample.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("j,theta_lower,x,T,ratio\n");
        for s in &self.x_samples {
            let theta = self.theta_seq.get(s.j).map_or(f64::NAN, |e| e.theta);
            out.push_str(&format!(
                "{},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                s.j, theta, s.x, s.t, s.ratio
            ));
        }
        out
    }
}

/// Builds the counterexample for an envelope whose integral diverges.
///
/// `T` is evaluated exactly by following the single recursive chain down to
/// `[1, x0]`; chain points are memoized for the duration of the call.
/// `theta_seq` is the divergence product `theta_0 prod (1 + b mu(x0 m0^k))^p`
/// with `theta_0 = min T(x)/x^p` over the first interval.
pub fn build_counterexample(
    mu: &Envelope,
    x0: f64,
    x_max: f64,
    params: CounterexampleParams,
) -> Result<CounterexampleTrace> {
    let (conv, _, why) = envelope_convergence(mu);
    if conv == Convergence::Converges {
        return Err(Error::Precondition(format!(
            "integral of mu(t)/t converges ({why}); no counterexample exists"
        )));
    }
    let CounterexampleParams {
        a,
        b,
        grid_base,
        points_per_interval,
    } = params;
    if !(a > 1.0 && b > 1.0 && grid_base > 1.0 && points_per_interval > 0) {
        return Err(Error::Precondition(
            "counterexample needs a > 1, b > 1, m0 > 1".into(),
        ));
    }
    if !(x0 > 1.0 && x_max > x0) {
        return Err(Error::Domain(format!("need 1 < x0 < x_max, got x0 = {x0}, x_max = {x_max}")));
    }
    let guard = params.guard();
    if !(mu.eval(x0) < guard) {
        return Err(Error::Precondition(format!(
            "mu(x0) = {} must be below {guard} so arguments stay in [x/(b+1), x/(b-1))",
            mu.eval(x0)
        )));
    }
    let p = params.p();

    let mut memo: HashMap<u64, f64> = HashMap::new();
    let mut eval_t = |x: f64| -> f64 {
        let mut chain = Vec::new();
        let mut cur = x;
        let mut value = loop {
            if cur <= x0 {
                break 1.0;
            }
            if let Some(&v) = memo.get(&cur.to_bits()) {
                break v;
            }
            chain.push(cur);
            cur = cur / b + cur * mu.eval(cur);
        };
        for &y in chain.iter().rev() {
            value *= a;
            memo.insert(y.to_bits(), value);
        }
        value
    };

    let intervals = ((x_max / x0).ln() / grid_base.ln()).floor() as usize;
    let mut x_samples = Vec::new();
    for j in 0..=intervals {
        let left = x0 * grid_base.powi(j as i32);
        for i in 0..points_per_interval {
            let x = left * grid_base.powf(i as f64 / points_per_interval as f64);
            if x > x_max {
                break;
            }
            let t = eval_t(x);
            x_samples.push(TraceSample {
                j,
                x,
                t,
                ratio: t / x.powf(p),
            });
        }
    }

    // T = 1 at x0 and T = a just above it, so the infimum over the first
    // interval is min(x0^-p, a (m0 x0)^-p).
    let theta0 = x0.powf(-p).min(a * (grid_base * x0).powf(-p));
    let mut theta = theta0;
    let mut theta_seq = Vec::with_capacity(intervals + 1);
    for j in 0..=intervals {
        if j == 0 {
            theta = theta0 * (1.0 + b * mu.eval(x0 * grid_base)).powf(p);
        } else {
            theta *= (1.0 + b * mu.eval(x0 * grid_base.powi(j as i32 + 1))).powf(p);
        }
        theta_seq.push(ThetaEntry { j, theta });
    }

    Ok(CounterexampleTrace {
        a,
        b,
        p,
        x0,
        theta_seq,
        x_samples,
    })
}

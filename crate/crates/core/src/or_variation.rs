//! Functions of O-regular variation.
//!
//! `f` belongs to `S(A, B, c)` on `[x0, inf)` when
//! `A f(x) <= f(t) <= B f(x)` for all `x >= x0` and `t >= x0` with
//! `x / c <= t <= x`. The sampling checks here can only ever falsify
//! membership; a pass proves nothing about the tail beyond the samples.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::model::{DrivingFunction, PolyLog};

/// Constants `(A, B, c)` and the left end of the half-line they cover.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrWitness {
    pub lower: f64,
    pub upper: f64,
    pub c: f64,
    pub valid_from: f64,
}

impl OrWitness {
    pub fn new(lower: f64, upper: f64, c: f64, valid_from: f64) -> Result<Self> {
        if !(lower > 0.0 && lower <= 1.0 && upper >= 1.0 && upper.is_finite() && c > 1.0 && c.is_finite())
            || !(valid_from >= 0.0)
        {
            return Err(Error::Domain(format!(
                "witness needs 0 < A <= 1 <= B < inf and c > 1; got A = {lower}, B = {upper}, c = {c}"
            )));
        }
        Ok(Self {
            lower,
            upper,
            c,
            valid_from,
        })
    }
}

/// Narrows the window to `c_new`, keeping `A` and `B`.
pub fn shrink_c(w: &OrWitness, c_new: f64) -> Result<OrWitness> {
    if !(c_new > 1.0 && c_new <= w.c) {
        return Err(Error::Domain(format!(
            "shrink_c needs 1 < c_new <= {}, got {c_new}",
            w.c
        )));
    }
    Ok(OrWitness { c: c_new, ..*w })
}

/// `S(A, B, c)` is contained in `S(A^2, B^2, c^2)`.
pub fn square_stretch(w: &OrWitness) -> OrWitness {
    OrWitness {
        lower: w.lower * w.lower,
        upper: w.upper * w.upper,
        c: w.c * w.c,
        valid_from: w.valid_from,
    }
}

/// Squares until the window reaches `c_target`, then shrinks to exactly
/// `c_target`.
pub fn widen_to(w: &OrWitness, c_target: f64) -> Result<OrWitness> {
    if !(c_target > 1.0 && c_target.is_finite()) {
        return Err(Error::Domain(format!("target window {c_target} must exceed 1")));
    }
    let mut cur = *w;
    while cur.c < c_target {
        cur = square_stretch(&cur);
    }
    shrink_c(&cur, c_target)
}

/// Witness for `coeff x^alpha (ln x)^beta` with window `c`.
///
/// For `t` in `[x/c, x]` the ratio `g(t)/g(x)` splits into `(t/x)^alpha`,
/// which lies between `1` and `c^-alpha`, and `(ln t / ln x)^beta`, whose base
/// lies in `[rho, 1]` with `rho = ln v / ln(c v)` for `v = valid_from`.
/// `valid_from` is raised to at least `e` so that `ln t >= 1`.
pub fn polylog_witness(g: &DrivingFunction, c: f64, valid_from: Option<f64>) -> Result<OrWitness> {
    let term = match g {
        DrivingFunction::PolyLog(t) => *t,
        _ => {
            return Err(Error::UnsupportedSymbolic(
                "polylog_witness needs a single poly-log driving function".into(),
            ))
        }
    };
    polylog_term_witness(&term, c, valid_from)
}

pub(crate) fn polylog_term_witness(term: &PolyLog, c: f64, valid_from: Option<f64>) -> Result<OrWitness> {
    if !(term.coeff > 0.0) {
        return Err(Error::Precondition("poly-log coefficient must be positive".into()));
    }
    if !(c > 1.0) {
        return Err(Error::Domain(format!("window c = {c} must exceed 1")));
    }
    let v = valid_from.unwrap_or(std::f64::consts::E).max(std::f64::consts::E);
    let power = c.powf(-term.alpha);
    let (mut lower, mut upper) = (power.min(1.0), power.max(1.0));
    if term.beta != 0.0 {
        let rho = v.ln() / (c * v).ln();
        let log_factor = rho.powf(term.beta);
        lower *= log_factor.min(1.0);
        upper *= log_factor.max(1.0);
    }
    OrWitness::new(lower, upper, c, v)
}

/// Witness for a sum of non-negative functions: the loosest of the parts.
pub fn driving_function_witness(g: &DrivingFunction, c: f64, valid_from: Option<f64>) -> Result<OrWitness> {
    let v = valid_from.unwrap_or(std::f64::consts::E);
    match g {
        DrivingFunction::Zero => OrWitness::new(1.0, 1.0, c, v),
        DrivingFunction::PolyLog(t) => polylog_term_witness(t, c, valid_from),
        DrivingFunction::Sum(ts) => {
            let parts: Vec<OrWitness> = ts
                .iter()
                .map(|t| polylog_term_witness(t, c, valid_from))
                .collect::<Result<_>>()?;
            let lower = parts.iter().map(|w| w.lower).fold(1.0, f64::min);
            let upper = parts.iter().map(|w| w.upper).fold(1.0, f64::max);
            let from = parts.iter().map(|w| w.valid_from).fold(v, f64::max);
            OrWitness::new(lower, upper, c, from)
        }
        DrivingFunction::Tabulated(_) => Err(Error::UnsupportedSymbolic(
            "tabulated driving functions have no analytic witness".into(),
        )),
    }
}

/// A violated pair: `f(t) / f(x)` left `[A, B]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Counterexample {
    pub x: f64,
    pub t: f64,
    pub ratio: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum OrCheck {
    Pass,
    Counterexample(Counterexample),
}

impl OrCheck {
    pub fn passed(&self) -> bool {
        matches!(self, OrCheck::Pass)
    }
}

/// Pairs `(x, t)` examined by [`empirical_check`].
///
/// Each sample draws an anchor `x` log-uniformly in `[valid_from, x_max]` and
/// a step exponent `u` uniformly in `[1/2, 1]`, then walks the chain
/// `x, x c^-u, x c^-2u, ...` down to `valid_from`, yielding every consecutive
/// pair. Squaring `c` keeps the anchors and `u`, and the squared chain is every
/// other point of the original, so a pass for `(A, B, c)` forces a pass for
/// `(A^2, B^2, c^2)` on the same seed.
pub fn sample_pairs(w: &OrWitness, x_max: f64, samples: usize, seed: u64) -> Vec<(f64, f64)> {
    let lo = w.valid_from.max(f64::MIN_POSITIVE);
    if !(x_max > lo) {
        return Vec::new();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (llo, lhi) = (lo.ln(), x_max.ln());
    let mut pairs = Vec::new();
    for _ in 0..samples {
        let x = rng.gen_range(llo..=lhi).exp();
        let u: f64 = rng.gen_range(0.5..=1.0);
        let step = w.c.powf(-u);
        let mut cur = x;
        loop {
            let next = cur * step;
            if next < lo {
                break;
            }
            pairs.push((cur, next));
            cur = next;
        }
    }
    pairs
}

/// Checks `A f(x) <= f(t) <= B f(x)` on explicit pairs.
pub fn check_pairs<F>(f: F, w: &OrWitness, pairs: &[(f64, f64)]) -> Result<OrCheck>
where
    F: Fn(f64) -> Result<f64>,
{
    for &(x, t) in pairs {
        let fx = f(x)?;
        let ft = f(t)?;
        if !(w.lower * fx <= ft && ft <= w.upper * fx) {
            return Ok(OrCheck::Counterexample(Counterexample {
                x,
                t,
                ratio: ft / fx,
            }));
        }
    }
    Ok(OrCheck::Pass)
}

/// Default seed for the falsification sampler.
pub const DEFAULT_SEED: u64 = 0;

/// Searches for a window pair violating the witness. A pass is not a proof.
pub fn empirical_check<F>(f: F, w: &OrWitness, x_max: f64, samples: usize, seed: u64) -> Result<OrCheck>
where
    F: Fn(f64) -> Result<f64>,
{
    check_pairs(f, w, &sample_pairs(w, x_max, samples, seed))
}

/// Finite-sample proxies for `f*(lambda) = limsup f(lambda x)/f(x)` and the
/// matching liminf.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StarEstimate {
    pub lambda: f64,
    pub f_star: f64,
    pub f_lower: f64,
    pub window_count: usize,
}

/// Max and min of `f(lambda x) / f(x)` over the upper half of `x_grid`.
pub fn estimate_star<F>(f: F, lambda: f64, x_grid: &[f64]) -> Result<StarEstimate>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(lambda > 0.0) {
        return Err(Error::Domain(format!("lambda = {lambda} must be positive")));
    }
    let tail = &x_grid[x_grid.len() / 2..];
    if tail.is_empty() {
        return Err(Error::Precondition("empty grid".into()));
    }
    let mut f_star = f64::NEG_INFINITY;
    let mut f_lower = f64::INFINITY;
    for &x in tail {
        let r = f(lambda * x)? / f(x)?;
        f_star = f_star.max(r);
        f_lower = f_lower.min(r);
    }
    Ok(StarEstimate {
        lambda,
        f_star,
        f_lower,
        window_count: tail.len(),
    })
}

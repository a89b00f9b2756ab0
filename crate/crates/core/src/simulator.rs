//! Direct evaluation of recurrences and empirical Theta-bands.
//!
//! Integer recurrences with floors or ceilings are filled bottom-up. Real
//! recurrences live on a geometric grid starting at the end of the base
//! interval; recursive arguments between grid nodes are interpolated in
//! log-log space, which is exact for power functions. The interpolation error
//! for other solutions is measured by [`refine`] rather than estimated.

use crate::bound::phi_numeric_many;
use crate::error::{Error, Result};
use crate::exponent::solve_p;
use crate::model::{ensure_valid, loglog_interp, BaseCase, DrivingFunction, Perturbation, RecurrenceSpec, Side};
use crate::or_variation::{check_pairs, driving_function_witness, sample_pairs, OrCheck, OrWitness};
use crate::quadrature::{integrate, Tolerance};

pub const DEFAULT_POINTS_PER_DECADE: usize = 64;
/// Default limit on `max/min` of `T/Phi` over the tail window.
pub const DEFAULT_MAX_SPREAD: f64 = 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GridDomain {
    Integer { n_max: u64 },
    /// Nodes `start * ratio^k` for `k < count`.
    RealGeometric { start: f64, ratio: f64, count: usize },
}

/// Filled values of `T`, ascending in `x`. Filled grids are never mutated by
/// this module.
#[derive(Debug, Clone, PartialEq)]
pub struct EvaluationGrid {
    pub domain: GridDomain,
    points: Vec<(f64, f64)>,
    base: BaseCase,
    base_end: f64,
}

impl EvaluationGrid {
    /// `(x, T(x))` pairs in ascending order.
    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    /// Right end of the interval where `T` is given by the base case.
    pub fn base_end(&self) -> f64 {
        self.base_end
    }

    pub fn x_max(&self) -> f64 {
        self.points.last().map_or(0.0, |p| p.0)
    }

    /// `T(y)` for `1 <= y <= x_max`, interpolating between nodes in log-log
    /// space.
    pub fn value_at(&self, y: f64) -> Result<f64> {
        if !(y >= 1.0) {
            return Err(Error::Domain(format!("T is defined for x >= 1, got {y}")));
        }
        if y > self.x_max() {
            return Err(Error::Domain(format!("{y} lies beyond the grid end {}", self.x_max())));
        }
        if let GridDomain::RealGeometric { .. } = self.domain {
            if y <= self.base_end {
                return Ok(self.base.eval(y));
            }
        }
        loglog_interp(&self.points, y).ok_or_else(|| Error::Domain("empty grid".into()))
    }

    /// Test hook: multiplies the node nearest `x` by `factor`.
    #[doc(hidden)]
    pub fn corrupt_node(&mut self, x: f64, factor: f64) {
        let i = self
            .points
            .iter()
            .enumerate()
            .min_by(|a, b| (a.1 .0.ln() - x.ln()).abs().total_cmp(&(b.1 .0.ln() - x.ln()).abs()))
            .map(|(i, _)| i)
            .unwrap_or(0);
        if let Some(p) = self.points.get_mut(i) {
            p.1 *= factor;
        }
    }
}

/// Last integer given by the base case in integer mode: the table end, or
/// `floor(x0 m)` for a constant base.
pub fn integer_base_end(spec: &RecurrenceSpec) -> Result<u64> {
    match spec.base.table_end() {
        Some(k) => Ok(k),
        None => Ok((spec.effective_x0()? * spec.measure.min_divisor()).floor().max(1.0) as u64),
    }
}

/// Fills `T(n)` for `1 <= n <= n_max` bottom-up. Every term must carry a
/// floor or ceiling.
pub fn evaluate_integer(spec: &RecurrenceSpec, n_max: u64) -> Result<EvaluationGrid> {
    ensure_valid(spec)?;
    for (i, p) in spec.perturbation_iter().enumerate() {
        if !matches!(p, Perturbation::Floor | Perturbation::Ceil) {
            return Err(Error::Precondition(format!(
                "integer evaluation needs a floor or ceiling on every term; term {i} has {p:?}"
            )));
        }
    }
    let k = integer_base_end(spec)?;
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let terms: Vec<_> = spec
        .measure
        .terms()
        .iter()
        .zip(spec.perturbation_iter())
        .map(|(t, p)| (t.weight, t.divisor, p.clone()))
        .collect();
    let mut values = Vec::with_capacity(n_max as usize);
    for n in 1..=n_max {
        if n <= k {
            values.push(spec.base.eval(n as f64));
            continue;
        }
        let x = n as f64;
        let mut sum = spec.g.eval(x)?;
        for (a, b, p) in &terms {
            let arg = p.argument(x, *b, Side::Upper);
            if arg < 1.0 {
                return Err(Error::Domain(format!("argument {arg} of T at n = {n} escapes below 1")));
            }
            if arg >= x {
                return Err(Error::Model {
                    x,
                    divisor: *b,
                    message: format!("argument {arg} does not shrink"),
                });
            }
            sum += a * values[arg as usize - 1];
        }
        values.push(sum);
    }
    Ok(EvaluationGrid {
        domain: GridDomain::Integer { n_max },
        points: values.into_iter().enumerate().map(|(i, v)| ((i + 1) as f64, v)).collect(),
        base: spec.base.clone(),
        base_end: k as f64,
    })
}

/// Right end `x0 * m` of the base interval in real mode.
pub fn real_base_end(spec: &RecurrenceSpec) -> Result<f64> {
    Ok(spec.effective_x0()? * spec.measure.min_divisor())
}

/// [`evaluate_real_with`] at the upper perturbation extreme.
pub fn evaluate_real(spec: &RecurrenceSpec, x_max: f64, points_per_decade: usize) -> Result<EvaluationGrid> {
    evaluate_real_with(spec, x_max, points_per_decade, Side::Upper)
}

/// Fills `T` on the nodes `S 10^(k/ppd) <= x_max`, `S = x0 m`, with `T` equal
/// to the base case on `[1, S]`. Bounded perturbations are realized at the
/// chosen extreme.
pub fn evaluate_real_with(
    spec: &RecurrenceSpec,
    x_max: f64,
    points_per_decade: usize,
    side: Side,
) -> Result<EvaluationGrid> {
    ensure_valid(spec)?;
    if points_per_decade == 0 {
        return Err(Error::Domain("points per decade must be positive".into()));
    }
    let start = real_base_end(spec)?;
    if !(x_max > start) {
        return Err(Error::Domain(format!("x_max = {x_max} must exceed the base end {start}")));
    }
    if let Some(k) = spec.base.table_end() {
        if (k as f64) < start {
            return Err(Error::Precondition(format!(
                "base table ends at {k} but must cover [1, {start}]"
            )));
        }
    }
    let node = |k: usize| start * 10f64.powf(k as f64 / points_per_decade as f64);
    let limit = x_max * (1.0 + 1e-12);
    let terms: Vec<_> = spec
        .measure
        .terms()
        .iter()
        .zip(spec.perturbation_iter())
        .map(|(t, p)| (t.weight, t.divisor, p.clone()))
        .collect();

    let mut points = vec![(start, spec.base.eval(start))];
    let mut k = 1;
    loop {
        let x = node(k);
        if x > limit {
            break;
        }
        let prev = points[points.len() - 1].0;
        let mut sum = spec.g.eval(x)?;
        for (a, b, p) in &terms {
            let arg = p.argument(x, *b, side);
            if !(arg >= 1.0) {
                return Err(Error::Domain(format!("argument {arg} of T at x = {x} escapes below 1")));
            }
            if arg > prev {
                return Err(Error::Model {
                    x,
                    divisor: *b,
                    message: format!("argument {arg} does not shrink below the previous node {prev}"),
                });
            }
            let t = if arg <= start {
                spec.base.eval(arg)
            } else {
                loglog_interp(&points, arg).unwrap_or(f64::NAN)
            };
            sum += a * t;
        }
        if !(sum.is_finite() && sum > 0.0) {
            return Err(Error::Numeric {
                message: format!("T({x}) = {sum} is not a positive finite value"),
                estimate: f64::INFINITY,
            });
        }
        points.push((x, sum));
        k += 1;
    }
    Ok(EvaluationGrid {
        domain: GridDomain::RealGeometric {
            start,
            ratio: 10f64.powf(1.0 / points_per_decade as f64),
            count: points.len(),
        },
        points,
        base: spec.base.clone(),
        base_end: start,
    })
}

/// Largest disagreement between a grid and one twice as dense.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RefineReport {
    pub max_relative_difference: f64,
    pub worst_x: f64,
    /// Largest disagreement over the tail window `x >= sqrt(x_max)`.
    pub tail_max_relative_difference: f64,
    pub compared: usize,
}

/// Compares the grid with `ppd` points per decade against `2 ppd` at the
/// shared nodes.
pub fn refine(spec: &RecurrenceSpec, x_max: f64, points_per_decade: usize, side: Side) -> Result<RefineReport> {
    let coarse = evaluate_real_with(spec, x_max, points_per_decade, side)?;
    let fine = evaluate_real_with(spec, x_max, 2 * points_per_decade, side)?;
    let mut report = RefineReport {
        max_relative_difference: 0.0,
        worst_x: coarse.points[0].0,
        tail_max_relative_difference: 0.0,
        compared: 0,
    };
    let tail_start = coarse.x_max().sqrt();
    for (c, f) in coarse.points.iter().zip(fine.points.iter().step_by(2)) {
        debug_assert_eq!(c.0, f.0);
        let d = (c.1 / f.1 - 1.0).abs();
        if d > report.max_relative_difference {
            report.max_relative_difference = d;
            report.worst_x = c.0;
        }
        if c.0 >= tail_start {
            report.tail_max_relative_difference = report.tail_max_relative_difference.max(d);
        }
        report.compared += 1;
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BandSample {
    pub x: f64,
    pub t: f64,
    pub phi: f64,
    pub ratio: f64,
}

/// Ratios `T/Phi` at every grid point `x >= x0`, with statistics over the
/// tail window `x >= sqrt(x_max)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioBand {
    pub samples: Vec<BandSample>,
    pub tail_start: f64,
    pub band_low: f64,
    pub band_high: f64,
    pub spread: f64,
}

impl RatioBand {
    pub fn tail(&self) -> impl Iterator<Item = &BandSample> + '_ {
        let start = self.tail_start;
        self.samples.iter().filter(move |s| s.x >= start)
    }

    /// `max/min` of the ratio over every sample, not only the tail.
    pub fn full_spread(&self) -> f64 {
        let (lo, hi) = self
            .samples
            .iter()
            .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.ratio), hi.max(s.ratio)));
        hi / lo
    }

    /// Last ratio over first ratio.
    pub fn growth(&self) -> f64 {
        match (self.samples.first(), self.samples.last()) {
            (Some(a), Some(b)) => b.ratio / a.ratio,
            _ => f64::NAN,
        }
    }

    pub fn passes(&self, max_spread: f64) -> bool {
        self.spread <= max_spread
    }

    /// CSV with header `x,T,phi,ratio`, 17 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,T,phi,ratio\n");
        for s in &self.samples {
            out.push_str(&format!("{:.16e},{:.16e},{:.16e},{:.16e}\n", s.x, s.t, s.phi, s.ratio));
        }
        out
    }
}

/// Band of `T(x) / Phi(x)` over the grid.
pub fn theta_band(spec: &RecurrenceSpec, p: f64, grid: &EvaluationGrid) -> Result<RatioBand> {
    let x0 = spec.effective_x0()?;
    let pts: Vec<(f64, f64)> = grid.points.iter().copied().filter(|p| p.0 >= x0).collect();
    if pts.is_empty() {
        return Err(Error::Precondition(format!("no grid point at or above x0 = {x0}")));
    }
    let xs: Vec<f64> = pts.iter().map(|p| p.0).collect();
    let phis = phi_numeric_many(spec, p, &xs)?;
    let samples: Vec<BandSample> = pts
        .iter()
        .zip(&phis)
        .map(|(&(x, t), &phi)| BandSample {
            x,
            t,
            phi,
            ratio: t / phi,
        })
        .collect();
    let tail_start = grid.x_max().sqrt();
    let (band_low, band_high) = samples
        .iter()
        .filter(|s| s.x >= tail_start)
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), s| (lo.min(s.ratio), hi.max(s.ratio)));
    if !(band_low > 0.0 && band_high.is_finite() && band_low <= band_high) {
        return Err(Error::Numeric {
            message: "ratio band is empty or non-positive".into(),
            estimate: f64::NAN,
        });
    }
    Ok(RatioBand {
        samples,
        tail_start,
        band_low,
        band_high,
        spread: band_high / band_low,
    })
}

/// Result of the empirical `T in OR` check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorReport {
    /// `(min(Gamma0, A_g), max(Gamma1, B_g), m)` from `S = x0 m` on.
    pub witness: OrWitness,
    pub check: OrCheck,
}

/// Relative slack for interpolated values in [`empirical_t_in_or`].
pub const INTERPOLATION_SLACK: f64 = 1e-9;
/// Window pairs per sampled `x` on the initial segment.
const INITIAL_SEGMENT_DENSITY: usize = 64;

/// Falsification run for `T in S(A, B, m)` on `[S, inf)`, `S = x0 m`.
///
/// The witness is assembled the way the induction over scales builds it:
/// `Gamma0, Gamma1` are the observed extremes of `T(t)/T(x)` over window
/// pairs with `x <= m S` (where the base case still matters), and
/// `A_g, B_g` bound `g` on windows of width `m` beyond `S`. Every window pair
/// further out must then stay inside `[min(Gamma0, A_g), max(Gamma1, B_g)]`.
pub fn empirical_t_in_or(spec: &RecurrenceSpec, grid: &EvaluationGrid, samples: usize, seed: u64) -> Result<TorReport> {
    if !spec.perturbation.is_unperturbed() {
        return Err(Error::Precondition("T in OR is checked for unperturbed recurrences only".into()));
    }
    if !matches!(grid.domain, GridDomain::RealGeometric { .. }) {
        return Err(Error::Precondition("T in OR is checked on real grids".into()));
    }
    let m = spec.measure.min_divisor();
    let s = grid.base_end;
    let x_max = grid.x_max();
    let t_at = |y: f64| grid.value_at(y);

    let probe = OrWitness::new(1.0, 1.0, m, s)?;
    let mut pairs = sample_pairs(&probe, x_max, samples, seed);
    for w in grid.points.windows(2) {
        pairs.push((w[1].0, w[0].0));
    }
    for &(x, _) in &grid.points {
        if x / m >= s {
            pairs.push((x, x / m));
        }
    }

    let initial_end = (m * s).min(x_max);
    let mut gamma0 = 1.0f64;
    let mut gamma1 = 1.0f64;
    let mut note = |x: f64, t: f64| -> Result<()> {
        let r = t_at(t)? / t_at(x)?;
        gamma0 = gamma0.min(r);
        gamma1 = gamma1.max(r);
        Ok(())
    };
    let n = 8 * INITIAL_SEGMENT_DENSITY;
    for i in 0..=n {
        let x = initial_end.powf(i as f64 / n as f64);
        let lo = (x / m).max(1.0);
        for j in 0..=INITIAL_SEGMENT_DENSITY {
            note(x, (x * (lo / x).powf(j as f64 / INITIAL_SEGMENT_DENSITY as f64)).max(lo))?;
        }
    }
    for &(x, t) in pairs.iter().filter(|p| p.0 <= initial_end) {
        note(x, t)?;
    }

    let (ag, bg) = match &spec.g {
        DrivingFunction::Tabulated(_) => {
            let mut lo = 1.0f64;
            let mut hi = 1.0f64;
            for &(x, t) in &pairs {
                let r = spec.g.eval(t)? / spec.g.eval(x)?;
                lo = lo.min(r);
                hi = hi.max(r);
            }
            (lo, hi)
        }
        g => {
            let w = driving_function_witness(g, m, Some(s))?;
            (w.lower, w.upper)
        }
    };
    let witness = OrWitness::new(
        gamma0.min(ag) * (1.0 - INTERPOLATION_SLACK),
        gamma1.max(bg) * (1.0 + INTERPOLATION_SLACK),
        m,
        s,
    )?;
    let check = check_pairs(t_at, &witness, &pairs)?;
    Ok(TorReport { witness, check })
}

/// Constants of the sandwich
/// `C g(x) <= x^p int_{x/m0}^x t^-p g(t) dt/t <= x^p int_{x/M0}^x ... <= D g(x)`
/// with `m0 = sqrt(m)` and `M0 = M^2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GIntegralBounds {
    pub m0: f64,
    pub big_m0: f64,
    pub c: f64,
    pub d: f64,
    /// Range covered by the sweep.
    pub lo: f64,
    pub hi: f64,
}

/// Relative margin applied to the swept extremes.
pub const SWEEP_MARGIN: f64 = 1e-6;

/// `x^p int_{x/w}^x t^-p g(t) dt/t`, integrated in `s = t/x`.
pub fn scaled_g_integral(g: &DrivingFunction, p: f64, x: f64, w: f64) -> Result<f64> {
    let f = |u: f64| {
        let t = x * u.exp();
        (-p * u).exp() * g.eval(t).unwrap_or(f64::NAN)
    };
    integrate(f, -w.ln(), 0.0, Tolerance::default()).map(|r| r.0)
}

/// `(I(x/m0), I(x/M0))` with the second computed as the first plus the
/// integral over `[x/M0, x/m0]`, so `I(x/m0) <= I(x/M0)` holds exactly.
pub fn sandwich_integrals(g: &DrivingFunction, p: f64, x: f64, m0: f64, big_m0: f64) -> Result<(f64, f64)> {
    if !(1.0 < m0 && m0 <= big_m0) {
        return Err(Error::Domain(format!("need 1 < m0 <= M0, got {m0}, {big_m0}")));
    }
    let inner = scaled_g_integral(g, p, x, m0)?;
    let f = |u: f64| {
        let t = x * u.exp();
        (-p * u).exp() * g.eval(t).unwrap_or(f64::NAN)
    };
    let piece = integrate(f, -big_m0.ln(), -m0.ln(), Tolerance::default())?.0;
    Ok((inner, inner + piece.max(0.0)))
}

/// Sweeps `count` geometric points over `[lo, hi]` for the extremes of
/// `I(x/m0)/g(x)` and `I(x/M0)/g(x)`.
pub fn sweep_g_integral_bounds(spec: &RecurrenceSpec, lo: f64, hi: f64, count: usize) -> Result<GIntegralBounds> {
    let p = solve_p(&spec.measure)?.p;
    let m0 = spec.measure.min_divisor().sqrt();
    let big_m0 = spec.measure.max_divisor().powi(2);
    if !(lo / big_m0 >= spec.g.domain_floor() && hi > lo && count >= 2) {
        return Err(Error::Domain(format!(
            "sweep range [{lo}, {hi}] must start at M0 times the domain floor of g"
        )));
    }
    let mut c = f64::INFINITY;
    let mut d = 0.0f64;
    for x in crate::bound::geometric_points(lo, hi, count) {
        let gx = spec.g.eval(x)?;
        let (inner, outer) = sandwich_integrals(&spec.g, p, x, m0, big_m0)?;
        c = c.min(inner / gx);
        d = d.max(outer / gx);
    }
    Ok(GIntegralBounds {
        m0,
        big_m0,
        c: c * (1.0 - SWEEP_MARGIN),
        d: d * (1.0 + SWEEP_MARGIN),
        lo,
        hi,
    })
}

//! Recurrence data model.
//!
//! A recurrence has the shape
//!
//! ```text
//! T(x) = sum_i a_i * T(x / b_i + h_i(x)) + g(x)
//! ```
//!
//! where the pairs `(a_i, b_i)` form a finite atomic measure, `g` is the
//! driving (combine) cost and `h_i` is a perturbation such as a floor or a
//! ceiling. All types here are immutable values; [`validate`] reports every
//! structural problem as data instead of failing on the first one.

mod file;

use std::f64::consts::E;
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

pub use file::{parse_envelope, parse_spec};

/// One atom `a * delta_b` of the recursion measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasureTerm {
    pub weight: f64,
    pub divisor: f64,
}

impl MeasureTerm {
    pub fn new(weight: f64, divisor: f64) -> Self {
        Self { weight, divisor }
    }
}

/// A finite sum of weighted point masses on `(1, inf)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicMeasure {
    terms: Vec<MeasureTerm>,
}

impl AtomicMeasure {
    /// Builds a measure without checking it; see [`AtomicMeasure::check`].
    pub fn new(terms: Vec<MeasureTerm>) -> Self {
        Self { terms }
    }

    /// Convenience constructor from `(weight, divisor)` pairs.
    pub fn from_pairs(pairs: &[(f64, f64)]) -> Self {
        Self::new(pairs.iter().map(|&(a, b)| MeasureTerm::new(a, b)).collect())
    }

    pub fn terms(&self) -> &[MeasureTerm] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// Total mass, `sum a_i`.
    pub fn total_weight(&self) -> f64 {
        self.terms.iter().map(|t| t.weight).sum()
    }

    /// Smallest divisor (`m`).
    pub fn min_divisor(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.divisor)
            .fold(f64::INFINITY, f64::min)
    }

    /// Largest divisor (`M`).
    pub fn max_divisor(&self) -> f64 {
        self.terms
            .iter()
            .map(|t| t.divisor)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    fn violations(&self, out: &mut Vec<Violation>) {
        if self.terms.is_empty() {
            out.push(Violation::new(ViolationCode::EmptyMeasure, "no terms"));
            return;
        }
        let mut finite = true;
        for (i, t) in self.terms.iter().enumerate() {
            if !t.weight.is_finite() || !t.divisor.is_finite() {
                finite = false;
                out.push(Violation::new(
                    ViolationCode::NonFiniteValue,
                    format!("term {i} has a non-finite weight or divisor"),
                ));
                continue;
            }
            if t.weight <= 0.0 {
                out.push(Violation::new(
                    ViolationCode::NonPositiveWeight,
                    format!("term {i}: weight {} <= 0", t.weight),
                ));
            }
            if t.divisor <= 1.0 {
                out.push(Violation::new(
                    ViolationCode::DivisorNotGreaterThanOne,
                    format!("term {i}: divisor {} <= 1", t.divisor),
                ));
            }
        }
        let total = self.total_weight();
        if finite && total < 1.0 {
            out.push(Violation::new(
                ViolationCode::WeightSumBelowOne,
                format!("sum of weights {total} < 1"),
            ));
        }
    }

    /// Returns `Err(Precondition)` unless the measure is structurally valid.
    pub fn check(&self) -> Result<()> {
        let mut v = Vec::new();
        self.violations(&mut v);
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::Precondition(format!(
                "invalid measure: {}",
                v.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", ")
            )))
        }
    }
}

/// `coeff * x^alpha * (ln x)^beta`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolyLog {
    pub coeff: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl PolyLog {
    pub fn new(coeff: f64, alpha: f64, beta: f64) -> Self {
        Self { coeff, alpha, beta }
    }

    /// Plain power `x^alpha`.
    pub fn power(alpha: f64) -> Self {
        Self::new(1.0, alpha, 0.0)
    }

    /// Smallest admissible argument. The log factor needs `x >= e` so that
    /// `ln x >= 1`; pure powers are defined on all of `(0, inf)`.
    pub fn domain_floor(&self) -> f64 {
        if self.beta == 0.0 {
            0.0
        } else {
            E
        }
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if self.beta == 0.0 {
            if x <= 0.0 {
                return Err(Error::Domain(format!("power function at x = {x} <= 0")));
            }
            return Ok(self.coeff * x.powf(self.alpha));
        }
        if x < E {
            return Err(Error::Domain(format!(
                "poly-log function at x = {x} below its domain floor e"
            )));
        }
        Ok(self.coeff * x.powf(self.alpha) * x.ln().powf(self.beta))
    }

    /// Integrand of the bound functional after substituting `u = ln t`:
    /// `t^-p g(t) dt/t = coeff * e^{(alpha - p) u} u^beta du`.
    pub(crate) fn log_integrand(&self, p: f64, u: f64) -> f64 {
        let base = self.coeff * ((self.alpha - p) * u).exp();
        if self.beta == 0.0 {
            base
        } else {
            base * u.powf(self.beta)
        }
    }

    fn is_valid(&self) -> bool {
        self.coeff.is_finite()
            && self.alpha.is_finite()
            && self.beta.is_finite()
            && self.coeff > 0.0
    }
}

impl fmt::Display for PolyLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*x^{}*ln(x)^{}", self.coeff, self.alpha, self.beta)
    }
}

/// Sampled positive function, interpolated piecewise-linearly in log-log
/// space. Outside the sampled range the end segments are extended.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    points: Vec<(f64, f64)>,
}

impl Table {
    pub fn new(points: Vec<(f64, f64)>) -> Self {
        Self { points }
    }

    pub fn points(&self) -> &[(f64, f64)] {
        &self.points
    }

    fn is_valid(&self) -> bool {
        !self.points.is_empty()
            && self
                .points
                .iter()
                .all(|&(x, v)| x.is_finite() && v.is_finite() && x > 0.0 && v > 0.0)
            && self.points.windows(2).all(|w| w[0].0 < w[1].0)
    }

    pub fn eval(&self, x: f64) -> Result<f64> {
        if x <= 0.0 {
            return Err(Error::Domain(format!("tabulated function at x = {x} <= 0")));
        }
        loglog_interp(&self.points, x)
            .ok_or_else(|| Error::Domain("tabulated function has no samples".into()))
    }
}

/// Log-log linear interpolation through sorted positive samples. The end
/// segments are extrapolated; a single sample is treated as a constant.
pub(crate) fn loglog_interp(points: &[(f64, f64)], x: f64) -> Option<f64> {
    match points.len() {
        0 => None,
        1 => Some(points[0].1),
        n => {
            let i = match points.binary_search_by(|p| p.0.total_cmp(&x)) {
                Ok(i) => return Some(points[i].1),
                Err(i) => i.clamp(1, n - 1),
            };
            let (x0, y0) = points[i - 1];
            let (x1, y1) = points[i];
            let s = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
            Some((y0.ln() + s * (y1.ln() - y0.ln())).exp())
        }
    }
}

/// The non-recursive cost `g`.
#[derive(Debug, Clone, PartialEq)]
pub enum DrivingFunction {
    PolyLog(PolyLog),
    Sum(Vec<PolyLog>),
    Tabulated(Table),
    Zero,
}

impl DrivingFunction {
    pub fn eval(&self, x: f64) -> Result<f64> {
        match self {
            DrivingFunction::PolyLog(g) => g.eval(x),
            DrivingFunction::Sum(gs) => gs.iter().map(|g| g.eval(x)).sum(),
            DrivingFunction::Tabulated(t) => t.eval(x),
            DrivingFunction::Zero => Ok(0.0),
        }
    }

    /// The poly-log components, or `None` for tabulated functions.
    pub fn polylog_terms(&self) -> Option<Vec<PolyLog>> {
        match self {
            DrivingFunction::PolyLog(g) => Some(vec![*g]),
            DrivingFunction::Sum(gs) => Some(gs.clone()),
            DrivingFunction::Zero => Some(Vec::new()),
            DrivingFunction::Tabulated(_) => None,
        }
    }

    pub fn domain_floor(&self) -> f64 {
        match self {
            DrivingFunction::PolyLog(g) => g.domain_floor(),
            DrivingFunction::Sum(gs) => gs.iter().map(|g| g.domain_floor()).fold(0.0, f64::max),
            DrivingFunction::Tabulated(_) | DrivingFunction::Zero => 0.0,
        }
    }

    fn is_valid(&self) -> bool {
        match self {
            DrivingFunction::PolyLog(g) => g.is_valid(),
            DrivingFunction::Sum(gs) => !gs.is_empty() && gs.iter().all(PolyLog::is_valid),
            DrivingFunction::Tabulated(t) => t.is_valid(),
            DrivingFunction::Zero => true,
        }
    }
}

/// Non-increasing, non-negative bound on `|h(x)| / x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Envelope {
    Const(f64),
    /// `1 / (ln x)^alpha`
    InverseLogPow(f64),
    /// `1 / x`
    InverseX,
    /// Samples `(x, v)`, linear in `ln x` between samples and constant
    /// beyond the ends.
    Tabulated(Vec<(f64, f64)>),
}

impl Envelope {
    pub fn zero() -> Self {
        Envelope::Const(0.0)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Envelope::Const(v) => *v,
            Envelope::InverseLogPow(a) => {
                if x <= 1.0 {
                    f64::INFINITY
                } else {
                    x.ln().powf(-a)
                }
            }
            Envelope::InverseX => 1.0 / x,
            Envelope::Tabulated(pts) => loglin_interp(pts, x),
        }
    }

    /// Human-readable formula, used in reports.
    pub fn describe(&self) -> String {
        match self {
            Envelope::Const(v) if *v == 0.0 => "0".into(),
            Envelope::Const(v) => format!("{v}"),
            Envelope::InverseLogPow(a) if *a == 1.0 => "1/log x".into(),
            Envelope::InverseLogPow(a) => format!("1/(log x)^{a}"),
            Envelope::InverseX => "1/x".into(),
            Envelope::Tabulated(pts) => format!("tabulated ({} samples)", pts.len()),
        }
    }

    fn is_valid(&self) -> bool {
        match self {
            Envelope::Const(v) => v.is_finite() && *v >= 0.0,
            Envelope::InverseLogPow(a) => a.is_finite() && *a > 0.0,
            Envelope::InverseX => true,
            Envelope::Tabulated(pts) => {
                !pts.is_empty()
                    && pts
                        .iter()
                        .all(|&(x, v)| x.is_finite() && v.is_finite() && x > 0.0 && v >= 0.0)
                    && pts.windows(2).all(|w| w[0].0 < w[1].0 && w[1].1 <= w[0].1)
            }
        }
    }
}

fn loglin_interp(points: &[(f64, f64)], x: f64) -> f64 {
    let n = points.len();
    if n == 0 {
        return 0.0;
    }
    if x <= points[0].0 {
        return points[0].1;
    }
    if x >= points[n - 1].0 {
        return points[n - 1].1;
    }
    let i = points.partition_point(|p| p.0 <= x);
    let (x0, y0) = points[i - 1];
    let (x1, y1) = points[i];
    let s = (x.ln() - x0.ln()) / (x1.ln() - x0.ln());
    y0 + s * (y1 - y0)
}

/// Which extreme of a bounded perturbation the simulator realizes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Side {
    /// `h(x) = x * mu(x)`
    #[default]
    Upper,
    /// `h(x) = -x * lambda(x)`
    Lower,
}

/// Perturbation applied to one recursive argument.
#[derive(Debug, Clone, PartialEq, Default)]
pub enum Perturbation {
    #[default]
    None,
    Floor,
    Ceil,
    Bounded { lambda: Envelope, mu: Envelope },
}

impl Perturbation {
    /// The `(lambda, mu)` envelopes. Floors and ceilings move the argument by
    /// less than one, so `|h| / x < 1 / x`.
    pub fn envelopes(&self) -> (Envelope, Envelope) {
        match self {
            Perturbation::None => (Envelope::zero(), Envelope::zero()),
            Perturbation::Floor | Perturbation::Ceil => (Envelope::InverseX, Envelope::InverseX),
            Perturbation::Bounded { lambda, mu } => (lambda.clone(), mu.clone()),
        }
    }

    /// The perturbed argument `x / b + h(x)`.
    pub fn argument(&self, x: f64, divisor: f64, side: Side) -> f64 {
        let base = x / divisor;
        match self {
            Perturbation::None => base,
            Perturbation::Floor => base.floor(),
            Perturbation::Ceil => base.ceil(),
            Perturbation::Bounded { lambda, mu } => match side {
                Side::Upper => base + x * mu.eval(x),
                Side::Lower => base - x * lambda.eval(x),
            },
        }
    }
}

/// One perturbation per measure term.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PerturbationSpec {
    pub terms: Vec<Perturbation>,
}

impl PerturbationSpec {
    pub fn new(terms: Vec<Perturbation>) -> Self {
        Self { terms }
    }

    pub fn none(n: usize) -> Self {
        Self::new(vec![Perturbation::None; n])
    }

    pub fn uniform(p: Perturbation, n: usize) -> Self {
        Self::new(vec![p; n])
    }

    pub fn is_unperturbed(&self) -> bool {
        self.terms.iter().all(|p| *p == Perturbation::None)
    }
}

/// Values of `T` below the recursive range.
#[derive(Debug, Clone, PartialEq)]
pub enum BaseCase {
    /// `T = v` on the whole base interval.
    Const(f64),
    /// `T(n)` for `n = 1, 2, ..., K`, interpolated in log-log space for
    /// real arguments.
    Table(Vec<(u64, f64)>),
}

impl BaseCase {
    /// Largest integer covered by a table, `None` for constants.
    pub fn table_end(&self) -> Option<u64> {
        match self {
            BaseCase::Const(_) => None,
            BaseCase::Table(rows) => rows.last().map(|r| r.0),
        }
    }

    /// Base value at a real argument `x >= 1`.
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            BaseCase::Const(v) => *v,
            BaseCase::Table(rows) => {
                let pts: Vec<(f64, f64)> = rows.iter().map(|&(n, v)| (n as f64, v)).collect();
                loglog_interp(&pts, x).unwrap_or(f64::NAN)
            }
        }
    }

    fn violations(&self, out: &mut Vec<Violation>) {
        match self {
            BaseCase::Const(v) => {
                if !(v.is_finite() && *v > 0.0) {
                    out.push(Violation::new(
                        ViolationCode::BaseValueNotPositive,
                        format!("base constant {v} is not in (0, inf)"),
                    ));
                }
            }
            BaseCase::Table(rows) => {
                if rows.is_empty() {
                    out.push(Violation::new(ViolationCode::BaseTableInvalid, "empty base table"));
                    return;
                }
                if rows.iter().enumerate().any(|(i, r)| r.0 != i as u64 + 1) {
                    out.push(Violation::new(
                        ViolationCode::BaseTableInvalid,
                        "base table must list n = 1, 2, ..., K in order",
                    ));
                }
                if rows.iter().any(|r| !(r.1.is_finite() && r.1 > 0.0)) {
                    out.push(Violation::new(
                        ViolationCode::BaseValueNotPositive,
                        "base table has a value outside (0, inf)",
                    ));
                }
            }
        }
    }
}

/// A complete recurrence.
#[derive(Debug, Clone, PartialEq)]
pub struct RecurrenceSpec {
    pub measure: AtomicMeasure,
    pub g: DrivingFunction,
    pub perturbation: PerturbationSpec,
    /// Explicit `x0`; `None` selects [`RecurrenceSpec::effective_x0`]'s rule.
    pub x0: Option<f64>,
    pub base: BaseCase,
}

/// Relative margin above `M` used by the default `x0`.
pub const DEFAULT_X0_MARGIN: f64 = 1e-9;

impl RecurrenceSpec {
    /// Unperturbed recurrence with a constant base case of 1 and default `x0`.
    pub fn simple(pairs: &[(f64, f64)], g: DrivingFunction) -> Self {
        Self {
            measure: AtomicMeasure::from_pairs(pairs),
            g,
            perturbation: PerturbationSpec::none(pairs.len()),
            x0: None,
            base: BaseCase::Const(1.0),
        }
    }

    pub fn with_x0(mut self, x0: f64) -> Self {
        self.x0 = Some(x0);
        self
    }

    pub fn with_base(mut self, base: BaseCase) -> Self {
        self.base = base;
        self
    }

    pub fn with_perturbation(mut self, p: PerturbationSpec) -> Self {
        self.perturbation = p;
        self
    }

    /// The lower integration limit `x0`.
    ///
    /// When not given explicitly this is the smallest `x` with
    /// `x >= max(M (1 + 1e-9), e^2)` such that every perturbed argument at
    /// `x` lies in `[1, x)`.
    pub fn effective_x0(&self) -> Result<f64> {
        if let Some(x0) = self.x0 {
            return Ok(x0);
        }
        let start = (self.measure.max_divisor() * (1.0 + DEFAULT_X0_MARGIN)).max(E * E);
        if !start.is_finite() {
            return Err(Error::Precondition("measure has no finite divisors".into()));
        }
        let mut x = start;
        for _ in 0..100_000 {
            if self.arguments_in_range(x) {
                return Ok(x);
            }
            x *= 1.01;
            if !x.is_finite() {
                break;
            }
        }
        Err(Error::Precondition(
            "no x0 keeps every perturbed argument inside [1, x)".into(),
        ))
    }

    fn arguments_in_range(&self, x: f64) -> bool {
        self.measure
            .terms()
            .iter()
            .zip(self.perturbation_iter())
            .all(|(t, p)| {
                [Side::Upper, Side::Lower].iter().all(|&side| {
                    let y = p.argument(x, t.divisor, side);
                    y >= 1.0 && y < x
                })
            })
    }

    /// Perturbation for each term, padding with `None` if the list is short.
    pub fn perturbation_iter(&self) -> impl Iterator<Item = &Perturbation> + '_ {
        static NONE: Perturbation = Perturbation::None;
        (0..self.measure.len()).map(move |i| self.perturbation.terms.get(i).unwrap_or(&NONE))
    }
}

/// Machine-readable reason a spec fails the theorem's structural hypotheses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub enum ViolationCode {
    EmptyMeasure,
    NonFiniteValue,
    NonPositiveWeight,
    DivisorNotGreaterThanOne,
    WeightSumBelowOne,
    DrivingFunctionInvalid,
    PerturbationArity,
    EnvelopeInvalid,
    X0NotAboveMaxDivisor,
    BaseValueNotPositive,
    BaseTableInvalid,
}

impl ViolationCode {
    pub fn as_str(&self) -> &'static str {
        match self {
            ViolationCode::EmptyMeasure => "EmptyMeasure",
            ViolationCode::NonFiniteValue => "NonFiniteValue",
            ViolationCode::NonPositiveWeight => "NonPositiveWeight",
            ViolationCode::DivisorNotGreaterThanOne => "DivisorNotGreaterThanOne",
            ViolationCode::WeightSumBelowOne => "WeightSumBelowOne",
            ViolationCode::DrivingFunctionInvalid => "DrivingFunctionInvalid",
            ViolationCode::PerturbationArity => "PerturbationArity",
            ViolationCode::EnvelopeInvalid => "EnvelopeInvalid",
            ViolationCode::X0NotAboveMaxDivisor => "X0NotAboveMaxDivisor",
            ViolationCode::BaseValueNotPositive => "BaseValueNotPositive",
            ViolationCode::BaseTableInvalid => "BaseTableInvalid",
        }
    }
}

impl fmt::Display for ViolationCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Violation {
    pub code: ViolationCode,
    pub message: String,
}

impl Violation {
    fn new(code: ViolationCode, message: impl Into<String>) -> Self {
        Self {
            code,
            message: message.into(),
        }
    }
}

/// Every violated structural hypothesis of the spec; empty means valid.
pub fn validate(spec: &RecurrenceSpec) -> Vec<Violation> {
    let mut out = Vec::new();
    spec.measure.violations(&mut out);

    if !spec.g.is_valid() {
        out.push(Violation::new(
            ViolationCode::DrivingFunctionInvalid,
            "driving function must have positive finite coefficients and positive samples",
        ));
    }

    if spec.perturbation.terms.len() != spec.measure.len() {
        out.push(Violation::new(
            ViolationCode::PerturbationArity,
            format!(
                "{} perturbations for {} terms",
                spec.perturbation.terms.len(),
                spec.measure.len()
            ),
        ));
    }
    for (i, p) in spec.perturbation.terms.iter().enumerate() {
        if let Perturbation::Bounded { lambda, mu } = p {
            if !lambda.is_valid() || !mu.is_valid() {
                out.push(Violation::new(
                    ViolationCode::EnvelopeInvalid,
                    format!("term {i}: envelopes must be non-negative and non-increasing"),
                ));
            }
        }
    }

    if let Some(x0) = spec.x0 {
        let big_m = spec.measure.max_divisor();
        if !x0.is_finite() {
            out.push(Violation::new(ViolationCode::NonFiniteValue, "x0 is not finite"));
        } else if !spec.measure.is_empty() && x0 <= big_m {
            out.push(Violation::new(
                ViolationCode::X0NotAboveMaxDivisor,
                format!("x0 = {x0} must exceed the largest divisor {big_m}"),
            ));
        }
    }

    spec.base.violations(&mut out);
    out
}

/// `Ok` when [`validate`] finds nothing, otherwise a precondition error
/// listing the violation codes.
pub fn ensure_valid(spec: &RecurrenceSpec) -> Result<()> {
    let v = validate(spec);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::Precondition(format!(
            "invalid recurrence: {}",
            v.iter().map(|v| v.code.as_str()).collect::<Vec<_>>().join(", ")
        )))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn merge_sort() -> RecurrenceSpec {
        RecurrenceSpec::simple(&[(2.0, 2.0)], DrivingFunction::PolyLog(PolyLog::power(1.0)))
            .with_x0(4.0)
    }

    fn codes(spec: &RecurrenceSpec) -> Vec<ViolationCode> {
        validate(spec).into_iter().map(|v| v.code).collect()
    }

    #[test]
    fn merge_sort_is_valid() {
        assert!(validate(&merge_sort()).is_empty());
    }

    #[test]
    fn light_measure_is_rejected() {
        let mut s = merge_sort();
        s.measure = AtomicMeasure::from_pairs(&[(0.5, 2.0)]);
        assert_eq!(codes(&s), vec![ViolationCode::WeightSumBelowOne]);
    }

    #[test]
    fn unit_divisor_is_rejected() {
        let mut s = merge_sort();
        s.measure = AtomicMeasure::from_pairs(&[(2.0, 1.0)]);
        s.x0 = Some(4.0);
        assert_eq!(codes(&s), vec![ViolationCode::DivisorNotGreaterThanOne]);
    }

    #[test]
    fn x0_must_exceed_max_divisor() {
        let s = merge_sort().with_x0(2.0);
        assert_eq!(codes(&s), vec![ViolationCode::X0NotAboveMaxDivisor]);
    }

    #[test]
    fn all_violations_are_reported() {
        let s = RecurrenceSpec {
            measure: AtomicMeasure::from_pairs(&[(0.2, 0.5), (-1.0, 3.0)]),
            g: DrivingFunction::PolyLog(PolyLog::new(-1.0, 1.0, 0.0)),
            perturbation: PerturbationSpec::none(1),
            x0: None,
            base: BaseCase::Table(vec![(1, 1.0), (3, 2.0)]),
        };
        let c = codes(&s);
        for want in [
            ViolationCode::DivisorNotGreaterThanOne,
            ViolationCode::NonPositiveWeight,
            ViolationCode::WeightSumBelowOne,
            ViolationCode::DrivingFunctionInvalid,
            ViolationCode::PerturbationArity,
            ViolationCode::BaseTableInvalid,
        ] {
            assert!(c.contains(&want), "missing {want}: {c:?}");
        }
        assert_eq!(codes(&s), c, "validate must be deterministic");
    }

    #[test]
    fn increasing_tabulated_envelope_is_rejected() {
        let env = Envelope::Tabulated(vec![(10.0, 0.1), (100.0, 0.2)]);
        let s = merge_sort().with_perturbation(PerturbationSpec::new(vec![Perturbation::Bounded {
            lambda: Envelope::zero(),
            mu: env,
        }]));
        assert_eq!(codes(&s), vec![ViolationCode::EnvelopeInvalid]);
    }

    #[test]
    fn polylog_domain() {
        let g = PolyLog::new(2.0, 1.0, -1.0);
        assert!(g.eval(2.0).is_err());
        assert!((g.eval(E).unwrap() - 2.0 * E).abs() < 1e-12);
        // pure powers are fine below e
        assert_eq!(PolyLog::power(1.0).eval(2.0).unwrap(), 2.0);
    }

    #[test]
    fn floors_normalize_to_inverse_x() {
        assert_eq!(
            Perturbation::Floor.envelopes(),
            (Envelope::InverseX, Envelope::InverseX)
        );
        assert_eq!(Perturbation::Ceil.argument(7.0, 2.0, Side::Upper), 4.0);
        assert_eq!(Perturbation::Floor.argument(7.0, 2.0, Side::Upper), 3.0);
    }

    #[test]
    fn default_x0_rule() {
        let s = RecurrenceSpec::simple(&[(2.0, 2.0)], DrivingFunction::Zero);
        assert_eq!(s.effective_x0().unwrap(), E * E);
        let s = RecurrenceSpec::simple(&[(30.0, 20.0)], DrivingFunction::Zero);
        assert_eq!(s.effective_x0().unwrap(), 20.0 * (1.0 + DEFAULT_X0_MARGIN));
        // a large perturbation pushes x0 out until arguments stay below x
        let p = Perturbation::Bounded {
            lambda: Envelope::zero(),
            mu: Envelope::InverseLogPow(1.0),
        };
        let s = s.with_perturbation(PerturbationSpec::uniform(p, 1));
        let x0 = s.effective_x0().unwrap();
        assert!(x0 / 20.0 + x0 / x0.ln() < x0);
    }

    #[test]
    fn loglog_table_is_exact_on_powers() {
        let t = Table::new((1..=8).map(|n| (n as f64, (n as f64).powi(3))).collect());
        for x in [1.5, 2.25, 7.9, 12.0] {
            let v = t.eval(x).unwrap();
            assert!((v / x.powi(3) - 1.0).abs() < 1e-12);
        }
    }
}

//! The bound functional `Phi(x) = x^p (1 + int_{x0}^x t^-p g(t) dt/t)` and the
//! Theta-classes it induces.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};
use crate::model::{AtomicMeasure, DrivingFunction, PolyLog, RecurrenceSpec};
use crate::quadrature::{self, Tolerance};

/// Exponents closer than this are treated as equal.
pub const CLASS_TOL: f64 = 1e-12;

/// `Theta(x^a (ln x)^b (ln ln x)^c)` with `c` in `{0, 1}`.
#[derive(Debug, Clone, Copy)]
pub struct GrowthClass {
    pub power_of_x: f64,
    pub power_of_log: f64,
    pub power_of_loglog: f64,
}

impl GrowthClass {
    pub fn new(power_of_x: f64, power_of_log: f64, power_of_loglog: f64) -> Self {
        Self {
            power_of_x,
            power_of_log,
            power_of_loglog,
        }
    }

    pub fn power(p: f64) -> Self {
        Self::new(p, 0.0, 0.0)
    }

    fn key(&self) -> [f64; 3] {
        [self.power_of_x, self.power_of_log, self.power_of_loglog]
    }

    /// Asymptotic order: compares exponents lexicographically, treating
    /// differences below [`CLASS_TOL`] as ties.
    pub fn growth_cmp(&self, other: &Self) -> Ordering {
        for (a, b) in self.key().iter().zip(other.key().iter()) {
            if (a - b).abs() > CLASS_TOL {
                return a.total_cmp(b);
            }
        }
        Ordering::Equal
    }

    /// Canonical display string such as `Theta(x^2.807355)`.
    pub fn pretty(&self) -> String {
        self.to_string()
    }
}

impl PartialEq for GrowthClass {
    fn eq(&self, other: &Self) -> bool {
        self.growth_cmp(other) == Ordering::Equal
    }
}

/// Fixed six-decimal rendering with trailing zeros removed.
pub(crate) fn short_number(v: f64) -> String {
    let s = format!("{v:.6}");
    let s = s.trim_end_matches('0').trim_end_matches('.');
    if s == "-0" {
        "0".into()
    } else {
        s.into()
    }
}

fn is_zero(v: f64) -> bool {
    v.abs() <= CLASS_TOL
}

fn is_one(v: f64) -> bool {
    (v - 1.0).abs() <= CLASS_TOL
}

impl fmt::Display for GrowthClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut factors = Vec::new();
        if !is_zero(self.power_of_x) {
            factors.push(if is_one(self.power_of_x) {
                "x".to_string()
            } else {
                format!("x^{}", short_number(self.power_of_x))
            });
        }
        if !is_zero(self.power_of_log) {
            factors.push(if is_one(self.power_of_log) {
                "ln(x)".to_string()
            } else {
                format!("ln(x)^{}", short_number(self.power_of_log))
            });
        }
        if !is_zero(self.power_of_loglog) {
            factors.push("ln(ln(x))".to_string());
        }
        if factors.is_empty() {
            factors.push("1".into());
        }
        write!(f, "Theta({})", factors.join(" * "))
    }
}

/// `int_lo^hi t^-p g(t) dt/t`, integrated in `u = ln t`.
pub fn g_integral(g: &DrivingFunction, p: f64, lo: f64, hi: f64) -> Result<f64> {
    if !(lo > 0.0 && hi >= lo) {
        return Err(Error::Domain(format!("bad integration range [{lo}, {hi}]")));
    }
    if lo < g.domain_floor() {
        return Err(Error::Domain(format!(
            "integration starts at {lo}, below the driving function's domain floor {}",
            g.domain_floor()
        )));
    }
    let (u0, u1) = (lo.ln(), hi.ln());
    let tol = Tolerance::default();
    match g {
        DrivingFunction::Zero => Ok(0.0),
        DrivingFunction::PolyLog(term) => polylog_integral(term, p, u0, u1, tol),
        DrivingFunction::Sum(terms) => terms
            .iter()
            .map(|t| polylog_integral(t, p, u0, u1, tol))
            .sum(),
        DrivingFunction::Tabulated(table) => {
            let f = |u: f64| (-p * u).exp() * table.eval(u.exp()).unwrap_or(f64::NAN);
            quadrature::integrate(f, u0, u1, tol).map(|r| r.0)
        }
    }
}

fn polylog_integral(term: &PolyLog, p: f64, u0: f64, u1: f64, tol: Tolerance) -> Result<f64> {
    quadrature::integrate(|u| term.log_integrand(p, u), u0, u1, tol).map(|r| r.0)
}

/// `Phi(x) = x^p (1 + int_{x0}^x t^-p g(t) dt/t)` for `x >= x0`.
pub fn phi_numeric(spec: &RecurrenceSpec, p: f64, x: f64) -> Result<f64> {
    let x0 = spec.effective_x0()?;
    if !(x >= x0) {
        return Err(Error::Domain(format!("Phi needs x >= x0 = {x0}, got {x}")));
    }
    Ok(x.powf(p) * (1.0 + g_integral(&spec.g, p, x0, x)?))
}

/// [`phi_numeric`] at many ascending points, accumulating the integral
/// segment by segment.
pub fn phi_numeric_many(spec: &RecurrenceSpec, p: f64, xs: &[f64]) -> Result<Vec<f64>> {
    let x0 = spec.effective_x0()?;
    let mut out = Vec::with_capacity(xs.len());
    let mut acc = 0.0;
    let mut prev = x0;
    for &x in xs {
        if !(x >= prev) {
            return Err(Error::Domain(format!(
                "Phi sample points must be ascending and >= x0 = {x0}; got {x} after {prev}"
            )));
        }
        acc += g_integral(&spec.g, p, prev, x)?;
        prev = x;
        out.push(x.powf(p) * (1.0 + acc));
    }
    Ok(out)
}

/// Theta-class of `t^-p g(t)` integrated against `dt/t` for one poly-log.
fn polylog_class(term: &PolyLog, p: f64) -> GrowthClass {
    let (alpha, beta) = (term.alpha, term.beta);
    if (alpha - p).abs() <= CLASS_TOL {
        if (beta + 1.0).abs() <= CLASS_TOL {
            GrowthClass::new(p, 0.0, 1.0)
        } else if beta > -1.0 {
            GrowthClass::new(p, beta + 1.0, 0.0)
        } else {
            GrowthClass::power(p)
        }
    } else if alpha < p {
        GrowthClass::power(p)
    } else {
        GrowthClass::new(alpha, beta, 0.0)
    }
}

/// Symbolic Theta-class of the bound for poly-log driving functions.
///
/// Each poly-log term contributes its own class and the fastest one wins.
pub fn classify_theta(measure: &AtomicMeasure, g: &DrivingFunction, p: f64) -> Result<GrowthClass> {
    measure.check()?;
    let terms = g.polylog_terms().ok_or_else(|| {
        Error::UnsupportedSymbolic("tabulated driving functions have no symbolic class".into())
    })?;
    Ok(terms
        .iter()
        .map(|t| polylog_class(t, p))
        .fold(GrowthClass::power(p), |best, c| {
            if c.growth_cmp(&best) == Ordering::Greater {
                c
            } else {
                best
            }
        }))
}

/// The term of a poly-log sum that dominates as `x -> inf`.
pub fn leading_term(terms: &[PolyLog]) -> Option<PolyLog> {
    terms.iter().copied().reduce(|best, t| {
        let ord = GrowthClass::new(t.alpha, t.beta, 0.0)
            .growth_cmp(&GrowthClass::new(best.alpha, best.beta, 0.0));
        if ord == Ordering::Greater {
            t
        } else {
            best
        }
    })
}

#[derive(Debug, Clone, PartialEq)]
pub enum MasterCaseKind {
    Case1,
    Case2,
    Case3,
    NotApplicable(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct MasterCase {
    pub case: MasterCaseKind,
    pub epsilon_used: Option<f64>,
    pub regularity_holds: Option<bool>,
}

impl MasterCase {
    fn not_applicable(reason: &str) -> Self {
        Self {
            case: MasterCaseKind::NotApplicable(reason.into()),
            epsilon_used: None,
            regularity_holds: None,
        }
    }

    /// The class the Master Theorem asserts, if a case applies.
    pub fn predicted_class(&self, a: f64, b: f64, g: &DrivingFunction) -> Option<GrowthClass> {
        let crit = a.ln() / b.ln();
        match self.case {
            MasterCaseKind::Case1 => Some(GrowthClass::power(crit)),
            MasterCaseKind::Case2 => Some(GrowthClass::new(crit, 1.0, 0.0)),
            MasterCaseKind::Case3 => g
                .polylog_terms()
                .and_then(|t| leading_term(&t))
                .map(|t| GrowthClass::new(t.alpha, t.beta, 0.0)),
            MasterCaseKind::NotApplicable(_) => None,
        }
    }

    pub fn describe(&self) -> String {
        match &self.case {
            MasterCaseKind::Case1 => "Case 1".into(),
            MasterCaseKind::Case2 => "Case 2".into(),
            MasterCaseKind::Case3 => "Case 3".into(),
            MasterCaseKind::NotApplicable(r) => format!("not applicable ({r})"),
        }
    }
}

pub const DEFAULT_EPSILON_GRID: [f64; 6] = [1.0, 0.5, 0.25, 0.1, 0.01, 0.001];

/// Largest `eps` in the grid with `x^alpha (ln x)^beta = O(x^{alpha + gap - eps})`
/// in the appropriate direction; falls back to half the gap.
fn pick_epsilon(gap: f64, beta_ok_at_equality: bool, grid: &[f64]) -> f64 {
    grid.iter()
        .copied()
        .filter(|&e| e > 0.0)
        .filter(|&e| e < gap - CLASS_TOL || ((e - gap).abs() <= CLASS_TOL && beta_ok_at_equality))
        .fold(None, |best: Option<f64>, e| Some(best.map_or(e, |b| b.max(e))))
        .unwrap_or(gap / 2.0)
}

/// Three-case Master Theorem for `T(x) = a T(x/b) + g(x)`.
pub fn classify_master_theorem(
    a: f64,
    b: f64,
    g: &DrivingFunction,
    epsilon_grid: &[f64],
) -> MasterCase {
    if !(a >= 1.0 && b > 1.0) {
        return MasterCase::not_applicable("requires a >= 1 and b > 1");
    }
    let Some(terms) = g.polylog_terms() else {
        return MasterCase::not_applicable("needs a symbolic driving function");
    };
    let crit = a.ln() / b.ln();
    let Some(lead) = leading_term(&terms) else {
        // g = 0 is O(x^{crit - eps}) for every eps.
        return MasterCase {
            case: MasterCaseKind::Case1,
            epsilon_used: epsilon_grid.iter().copied().fold(None, |m: Option<f64>, e| {
                Some(m.map_or(e, |m| m.max(e)))
            }),
            regularity_holds: None,
        };
    };
    let (alpha, beta) = (lead.alpha, lead.beta);

    if (alpha - crit).abs() <= CLASS_TOL {
        if beta.abs() <= CLASS_TOL {
            return MasterCase {
                case: MasterCaseKind::Case2,
                epsilon_used: None,
                regularity_holds: None,
            };
        }
        return MasterCase::not_applicable("gap");
    }
    if alpha < crit {
        return MasterCase {
            case: MasterCaseKind::Case1,
            epsilon_used: Some(pick_epsilon(crit - alpha, beta <= 0.0, epsilon_grid)),
            regularity_holds: None,
        };
    }
    // a g(x/b) / g(x) -> a b^-alpha for poly-logs.
    let regular = a * b.powf(-alpha) < 1.0;
    if !regular {
        return MasterCase {
            case: MasterCaseKind::NotApplicable("regularity condition fails".into()),
            epsilon_used: None,
            regularity_holds: Some(false),
        };
    }
    MasterCase {
        case: MasterCaseKind::Case3,
        epsilon_used: Some(pick_epsilon(alpha - crit, beta >= 0.0, epsilon_grid)),
        regularity_holds: Some(true),
    }
}

/// Comparison of the symbolic class against a regression on sampled `Phi`.
#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub symbolic: GrowthClass,
    /// Coefficient of `ln x` in the fit of `ln Phi`.
    pub fitted_power_of_x: f64,
    /// Coefficient of `ln ln x` in the fit of `ln Phi`.
    pub fitted_power_of_log: f64,
    /// `|fitted_power_of_x - symbolic.power_of_x|`
    pub x_exponent_disagreement: f64,
}

/// Contract on [`CrossCheck::x_exponent_disagreement`] over `[1e3, 1e7]`.
pub const CROSS_CHECK_TOL: f64 = 0.05;

/// Geometric sample points in `[lo, hi]`.
pub fn geometric_points(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    if count < 2 {
        return vec![lo];
    }
    let ratio = (hi / lo).ln() / (count - 1) as f64;
    (0..count).map(|i| lo * (ratio * i as f64).exp()).collect()
}

/// Fits `ln Phi = A ln x + B ln ln x + C` over the sample points and compares
/// `A` with the symbolic class.
pub fn cross_check(spec: &RecurrenceSpec, p: f64, sample_points: &[f64]) -> Result<CrossCheck> {
    let symbolic = classify_theta(&spec.measure, &spec.g, p)?;
    if sample_points.len() < 3 {
        return Err(Error::Precondition("cross_check needs at least three points".into()));
    }
    let mut xs = sample_points.to_vec();
    xs.sort_by(f64::total_cmp);
    if xs[0] <= std::f64::consts::E {
        return Err(Error::Domain("cross_check samples must exceed e".into()));
    }
    let phis = phi_numeric_many(spec, p, &xs)?;
    let rows: Vec<([f64; 3], f64)> = xs
        .iter()
        .zip(&phis)
        .map(|(&x, &f)| ([x.ln(), x.ln().ln(), 1.0], f.ln()))
        .collect();
    let coef = least_squares3(&rows)
        .ok_or_else(|| Error::Numeric {
            message: "degenerate regression in cross_check".into(),
            estimate: f64::NAN,
        })?;
    Ok(CrossCheck {
        symbolic,
        fitted_power_of_x: coef[0],
        fitted_power_of_log: coef[1],
        x_exponent_disagreement: (coef[0] - symbolic.power_of_x).abs(),
    })
}

/// Least squares with three regressors via the normal equations.
fn least_squares3(rows: &[([f64; 3], f64)]) -> Option<[f64; 3]> {
    let mut a = [[0.0f64; 4]; 3];
    for (r, y) in rows {
        for i in 0..3 {
            for j in 0..3 {
                a[i][j] += r[i] * r[j];
            }
            a[i][3] += r[i] * y;
        }
    }
    // Gaussian elimination with partial pivoting.
    for col in 0..3 {
        let piv = (col..3).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[piv][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, piv);
        for row in 0..3 {
            if row != col {
                let pivot_row = a[col];
                let f = a[row][col] / pivot_row[col];
                for (v, p) in a[row].iter_mut().zip(pivot_row).skip(col) {
                    *v -= f * p;
                }
            }
        }
    }
    Some([a[0][3] / a[0][0], a[1][3] / a[1][1], a[2][3] / a[2][2]])
}

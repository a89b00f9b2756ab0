//! Characteristic exponent: the unique `p >= 0` with `sum a_i b_i^-p = 1`.

use crate::error::{Error, Result};
use crate::model::AtomicMeasure;

/// Residual target for the returned root.
pub const RESIDUAL_TOL: f64 = 1e-12;
/// Relative width of the final bracket.
pub const BRACKET_TOL: f64 = 1e-13;
/// Bisection hands over to Newton once the bracket is this narrow.
const BISECTION_HANDOFF: f64 = 1e-6;
const MAX_ITERATIONS: usize = 500;

/// Solved characteristic exponent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Exponent {
    pub p: f64,
    /// `phi(p) - 1`
    pub residual: f64,
    pub iterations: usize,
    /// Final bracket with `phi(lo) >= 1 >= phi(hi)`.
    pub bracket: (f64, f64),
}

/// `phi(p) = sum a_i b_i^-p`.
pub fn phi(measure: &AtomicMeasure, p: f64) -> Result<f64> {
    if !(p >= 0.0) {
        return Err(Error::Domain(format!("phi is defined for p >= 0, got {p}")));
    }
    Ok(phi_unchecked(measure, p))
}

/// `phi'(p) = -sum a_i ln(b_i) b_i^-p`.
pub fn phi_derivative(measure: &AtomicMeasure, p: f64) -> f64 {
    measure
        .terms()
        .iter()
        .map(|t| -t.weight * t.divisor.ln() * t.divisor.powf(-p))
        .sum()
}

fn phi_unchecked(measure: &AtomicMeasure, p: f64) -> f64 {
    measure
        .terms()
        .iter()
        .map(|t| t.weight * t.divisor.powf(-p))
        .sum()
}

/// Upper end of the initial bracket, `log_m(sum a_i) + 1`.
///
/// Every atom has `b_i >= m`, so `phi(P) <= (sum a_i) m^-P = 1/m < 1`.
pub fn initial_upper_bound(measure: &AtomicMeasure) -> f64 {
    measure.total_weight().ln() / measure.min_divisor().ln() + 1.0
}

/// Solves `phi(p) = 1`.
///
/// Bisects `[0, log_m(sum a_i) + 1]` down to width `1e-6`, then polishes with
/// Newton steps, bisecting whenever a step would leave the bracket.
pub fn solve_p(measure: &AtomicMeasure) -> Result<Exponent> {
    measure.check()?;

    let f = |p: f64| phi_unchecked(measure, p) - 1.0;

    let f0 = f(0.0);
    if f0 == 0.0 {
        return Ok(Exponent {
            p: 0.0,
            residual: 0.0,
            iterations: 0,
            bracket: (0.0, 0.0),
        });
    }

    let mut lo = 0.0;
    let mut hi = initial_upper_bound(measure);
    assert!(
        f0 >= 0.0 && f(hi) <= 0.0,
        "initial bracket [0, {hi}] does not straddle the root"
    );

    let mut iterations = 0;
    while hi - lo > BISECTION_HANDOFF && iterations < MAX_ITERATIONS {
        let mid = 0.5 * (lo + hi);
        if f(mid) >= 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        iterations += 1;
    }

    let mut p = 0.5 * (lo + hi);
    loop {
        iterations += 1;
        let r = f(p);
        if r >= 0.0 {
            lo = lo.max(p);
        } else {
            hi = hi.min(p);
        }
        let step = r / phi_derivative(measure, p);
        let mut next = p - step;
        if !(next > lo && next < hi) {
            next = 0.5 * (lo + hi);
        }
        let moved = (next - p).abs();
        p = next;
        if (r.abs() <= RESIDUAL_TOL && moved <= 4.0 * f64::EPSILON * p.max(1.0))
            || iterations >= MAX_ITERATIONS
        {
            break;
        }
    }

    // The last Newton iterate can sit a few ulps from the best float.
    let mut best = p;
    let mut best_r = f(p).abs();
    for _ in 0..64 {
        let Some((cand, r)) = [best.next_down(), best.next_up()]
            .into_iter()
            .map(|c| (c, f(c).abs()))
            .find(|&(_, r)| r < best_r)
        else {
            break;
        };
        best = cand;
        best_r = r;
    }
    let p = best.max(0.0);
    let residual = f(p);
    if residual.abs() > RESIDUAL_TOL {
        return Err(Error::Numeric {
            message: format!("exponent solver stalled at p = {p}"),
            estimate: residual.abs(),
        });
    }

    Ok(Exponent {
        p,
        residual,
        iterations,
        bracket: tight_bracket(&f, p, lo, hi),
    })
}

/// Shrinks the bracket around `p` to relative width below [`BRACKET_TOL`].
fn tight_bracket(f: &impl Fn(f64) -> f64, p: f64, lo: f64, hi: f64) -> (f64, f64) {
    let half = 0.25 * BRACKET_TOL * p.max(1.0);
    let mut lo_c = (p - half).max(0.0);
    let mut hi_c = p + half;
    if f(lo_c) < 0.0 {
        lo_c = lo;
    }
    if f(hi_c) > 0.0 {
        hi_c = hi;
    }
    // Fall back to bisection if rounding spoiled either probe.
    while hi_c - lo_c > BRACKET_TOL * p.max(1.0) {
        let mid = 0.5 * (lo_c + hi_c);
        if mid <= lo_c || mid >= hi_c {
            break;
        }
        if f(mid) >= 0.0 {
            lo_c = mid;
        } else {
            hi_c = mid;
        }
    }
    (lo_c, hi_c)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Plain bisection, independent of the solver under test.
    fn bisection_oracle(m: &AtomicMeasure, steps: usize) -> f64 {
        let g = |p: f64| -> f64 {
            m.terms()
                .iter()
                .map(|t| t.weight * (-p * t.divisor.ln()).exp())
                .sum::<f64>()
                - 1.0
        };
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        while g(hi) > 0.0 {
            hi *= 2.0;
        }
        for _ in 0..steps {
            let mid = 0.5 * (lo + hi);
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn phi_examples() {
        let m = AtomicMeasure::from_pairs(&[(2.0, 2.0)]);
        assert_eq!(phi(&m, 1.0).unwrap(), 1.0);
        let m = AtomicMeasure::from_pairs(&[(7.0, 2.0)]);
        assert_eq!(phi(&m, 0.0).unwrap(), 7.0);
        let m = AtomicMeasure::from_pairs(&[(1.0, 2.0), (1.0, 4.0)]);
        assert_eq!(phi(&m, 1.0).unwrap(), 0.75);
        assert!(matches!(phi(&m, -0.1), Err(Error::Domain(_))));
    }

    #[test]
    fn merge_sort_exponent_is_exact() {
        let e = solve_p(&AtomicMeasure::from_pairs(&[(2.0, 2.0)])).unwrap();
        assert_eq!(e.p, 1.0);
        assert_eq!(e.residual, 0.0);
    }

    #[test]
    fn strassen_exponent() {
        let e = solve_p(&AtomicMeasure::from_pairs(&[(7.0, 2.0)])).unwrap();
        assert!((e.p - 7f64.log2()).abs() < 1e-10);
        assert!((e.p - 2.807354922).abs() < 1e-9);
    }

    #[test]
    fn two_term_exponent_matches_golden_ratio() {
        let m = AtomicMeasure::from_pairs(&[(1.0, 2.0), (1.0, 4.0)]);
        let e = solve_p(&m).unwrap();
        let closed = ((1.0 + 5f64.sqrt()) / 2.0).log2();
        assert!((e.p - bisection_oracle(&m, 200)).abs() < 1e-10);
        assert!((e.p - closed).abs() < 1e-12);
        assert!((e.p - 0.6942419136).abs() < 1e-10);
    }

    #[test]
    fn unit_mass_short_circuits() {
        let e = solve_p(&AtomicMeasure::from_pairs(&[(1.0, 2.0)])).unwrap();
        assert_eq!((e.p, e.residual, e.iterations), (0.0, 0.0, 0));
    }

    #[test]
    fn invalid_measure_is_a_precondition_error() {
        let m = AtomicMeasure::from_pairs(&[(0.5, 2.0)]);
        assert!(matches!(solve_p(&m), Err(Error::Precondition(_))));
        let m = AtomicMeasure::from_pairs(&[(2.0, 1.0)]);
        assert!(matches!(solve_p(&m), Err(Error::Precondition(_))));
    }

    fn measure_strategy() -> impl Strategy<Value = AtomicMeasure> {
        prop::collection::vec((0.2f64..8.0, 1.1f64..16.0), 1..=5)
            .prop_filter("mass >= 1", |v| v.iter().map(|t| t.0).sum::<f64>() >= 1.0)
            .prop_map(|v| AtomicMeasure::from_pairs(&v))
    }

    proptest! {
        #[test]
        fn phi_is_strictly_decreasing(m in measure_strategy(), p1 in 0.0f64..10.0, d in 0.01f64..5.0) {
            prop_assert!(phi(&m, p1).unwrap() > phi(&m, p1 + d).unwrap());
        }

        #[test]
        fn initial_bracket_straddles(m in measure_strategy()) {
            let hi = initial_upper_bound(&m);
            prop_assert!(phi(&m, 0.0).unwrap() >= 1.0);
            prop_assert!(phi(&m, hi).unwrap() <= 1.0);
        }

        #[test]
        fn solver_contract(m in measure_strategy()) {
            let e = solve_p(&m).unwrap();
            prop_assert!(e.residual.abs() <= RESIDUAL_TOL);
            prop_assert!(e.bracket.1 - e.bracket.0 <= BRACKET_TOL * e.p.max(1.0));
            prop_assert!(e.bracket.0 <= e.p && e.p <= e.bracket.1);
            prop_assert!((e.p - bisection_oracle(&m, 200)).abs() < 1e-10);
        }

        #[test]
        fn scale_covariance(m in measure_strategy(), k in 0.25f64..4.0) {
            let scaled = AtomicMeasure::from_pairs(
                &m.terms().iter().map(|t| (t.weight, t.divisor.powf(k))).collect::<Vec<_>>());
            let p = solve_p(&m).unwrap().p;
            let q = solve_p(&scaled).unwrap().p;
            prop_assert!((q - p / k).abs() < 1e-10, "p = {p}, k = {k}, q = {q}");
        }
    }
}

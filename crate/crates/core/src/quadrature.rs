//! Adaptive Gauss-Kronrod (7/15) quadrature.
//!
//! Refinement always bisects the panel with the largest error estimate, with
//! ties broken by position, so results do not depend on evaluation order.

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

/// Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

#[derive(Debug, Clone, Copy)]
pub struct Tolerance {
    pub relative: f64,
    pub absolute: f64,
    pub max_panels: usize,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            relative: 1e-12,
            absolute: 0.0,
            max_panels: 4000,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Panel {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(center);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for (j, (&x, &w)) in XGK.iter().zip(WGK.iter()).take(7).enumerate() {
        let dx = half * x;
        let pair = f(center - dx) + f(center + dx);
        kronrod += w * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// `(value, error estimate)` of the integral of `f` over `[a, b]`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, tol: Tolerance) -> Result<(f64, f64)> {
    if a == b {
        return Ok((0.0, 0.0));
    }
    if !(a.is_finite() && b.is_finite()) {
        return Err(Error::Domain(format!("integration limits [{a}, {b}] not finite")));
    }
    let mut panels = vec![gk15(&f, a, b)];
    loop {
        let value: f64 = panels.iter().map(|p| p.value).sum();
        let error: f64 = panels.iter().map(|p| p.error).sum();
        if !value.is_finite() {
            return Err(Error::Numeric {
                message: "integrand produced a non-finite value".into(),
                estimate: f64::INFINITY,
            });
        }
        if error <= tol.absolute.max(tol.relative * value.abs()) {
            return Ok((value, error));
        }
        if panels.len() >= tol.max_panels {
            return Err(Error::Numeric {
                message: format!("quadrature did not converge within {} panels", tol.max_panels),
                estimate: error / value.abs().max(f64::MIN_POSITIVE),
            });
        }
        let (worst, _) = panels
            .iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |(wi, we), (i, p)| {
                if p.error > we {
                    (i, p.error)
                } else {
                    (wi, we)
                }
            });
        let p = panels.swap_remove(worst);
        let mid = 0.5 * (p.a + p.b);
        if mid <= p.a || mid >= p.b {
            // Panel cannot be split further in floating point.
            return Err(Error::Numeric {
                message: "quadrature panel collapsed".into(),
                estimate: error / value.abs().max(f64::MIN_POSITIVE),
            });
        }
        panels.push(gk15(&f, p.a, mid));
        panels.push(gk15(&f, mid, p.b));
        panels.sort_by(|x, y| x.a.total_cmp(&y.a));
    }
}

//! Adaptive Gauss–Kronrod quadrature.
//!
//! Finite intervals use a globally adaptive 7/15-point Gauss–Kronrod rule
//! (bisect the panel with the largest error estimate). Semi-infinite
//! integrals of decaying integrands are accumulated panel by panel until a
//! panel contributes less than a relative tail tolerance.

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
    0.209_482_141_084_728,
];
// Gauss weights for the odd Kronrod nodes XGK[1], XGK[3], XGK[5], XGK[7].
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// One 15-point Kronrod panel: `(estimate, error estimate)`.
fn kronrod15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut k = fc * WGK[7];
    let mut g = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let s = f(c - dx) + f(c + dx);
        k += WGK[j] * s;
        if j % 2 == 1 {
            g += WG[j / 2] * s;
        }
    }
    (k * h, ((k - g) * h).abs())
}

/// Tolerances and limits for [`integrate`].
#[derive(Debug, Clone, Copy)]
pub struct QuadOptions {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_panels: usize,
}

impl Default for QuadOptions {
    fn default() -> Self {
        QuadOptions {
            abs_tol: 1e-12,
            rel_tol: 1e-10,
            max_panels: 400,
        }
    }
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error: f64,
}

/// Integrates `f` over `[a, b]` to `max(abs_tol, rel_tol·|I|)`.
pub fn integrate<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, opts: QuadOptions) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error: 0.0 });
    }
    let (v, e) = kronrod15(&f, a, b);
    let mut panels = vec![(a, b, v, e)];
    let mut total = v;
    let mut err = e;
    while err > opts.abs_tol.max(opts.rel_tol * total.abs()) {
        if panels.len() >= opts.max_panels {
            return Err(Error::NonConvergence {
                error_estimate: err,
                tolerance: opts.abs_tol.max(opts.rel_tol * total.abs()),
            });
        }
        let (idx, _) = panels
            .iter()
            .enumerate()
            .max_by(|x, y| x.1 .3.total_cmp(&y.1 .3))
            .expect("at least one panel");
        let (lo, hi, pv, pe) = panels.swap_remove(idx);
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            // panel collapsed to machine resolution; accept what we have
            panels.push((lo, hi, pv, 0.0));
            err -= pe;
            continue;
        }
        let (lv, le) = kronrod15(&f, lo, mid);
        let (rv, re) = kronrod15(&f, mid, hi);
        total += lv + rv - pv;
        err += le + re - pe;
        panels.push((lo, mid, lv, le));
        panels.push((mid, hi, rv, re));
    }
    // Re-sum to shed the drift of the running updates.
    let value = panels.iter().map(|p| p.2).sum();
    let error = panels.iter().map(|p| p.3).sum();
    Ok(Integral { value, error })
}

/// Integrates a non-negative, eventually decaying `f` over `[start, ∞)`.
///
/// Panels `[s, s + w]` with geometrically growing width are accumulated
/// until one contributes less than `tail_rel` of the running total. The
/// returned `error` includes the last panel as a bound on the dropped tail.
pub fn integrate_tail<F: Fn(f64) -> f64>(
    f: F,
    start: f64,
    first_width: f64,
    tail_rel: f64,
    opts: QuadOptions,
) -> Result<Integral> {
    let mut lo = start;
    let mut width = first_width;
    let mut value = 0.0;
    let mut error = 0.0;
    for _ in 0..200 {
        let hi = lo + width;
        let piece = integrate(&f, lo, hi, opts)?;
        value += piece.value;
        error += piece.error;
        if piece.value.abs() <= tail_rel * value.abs() || (value == 0.0 && piece.value == 0.0 && lo > start) {
            error += piece.value.abs();
            return Ok(Integral { value, error });
        }
        lo = hi;
        width *= 2.0;
        if !lo.is_finite() {
            break;
        }
    }
    Err(Error::NonConvergence {
        error_estimate: f64::INFINITY,
        tolerance: tail_rel,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn polynomial_exact() {
        let r = integrate(|x| x * x * x - 2.0 * x, 0.0, 3.0, QuadOptions::default()).unwrap();
        assert!((r.value - (81.0 / 4.0 - 9.0)).abs() < 1e-12);
    }

    #[test]
    fn peaked_integrand() {
        // ∫_0^1 1/(1e-4 + x^2) = arctan(100)/1e-2
        let r = integrate(|x| 1.0 / (1e-4 + x * x), 0.0, 1.0, QuadOptions::default()).unwrap();
        let exact = (100f64).atan() / 1e-2;
        assert!(((r.value - exact) / exact).abs() < 1e-10);
    }

    #[test]
    fn sqrt_endpoint() {
        let r = integrate(f64::sqrt, 0.0, 1.0, QuadOptions::default()).unwrap();
        assert!((r.value - 2.0 / 3.0).abs() < 1e-11);
    }

    #[test]
    fn semi_infinite() {
        let r = integrate_tail(|x| (-x).exp(), 0.0, 1.0, 1e-14, QuadOptions::default()).unwrap();
        assert!((r.value - 1.0).abs() < 1e-12);
        // algebraic tail
        let r = integrate_tail(|x| 1.0 / (1.0 + x * x), 0.0, 1.0, 1e-12, QuadOptions::default()).unwrap();
        assert!((r.value - PI / 2.0).abs() < 1e-9);
    }
}

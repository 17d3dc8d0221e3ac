use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quad::{integrate, QuadOptions};

// Beyond this point the tail is summed as an alternating power series.
const SERIES_FROM: f64 = 2.0;

/// The interference tail integral `G_α(x) = ∫_x^∞ dt / (1 + t^{α/2})`.
///
/// For `α = 4` the closed form `arccot(x)` is used unless the quadrature
/// route is forced with [`GFunction::quadrature`]. Otherwise `G_α(0)` is the
/// Beta-function identity `(π/p) / sin(π/p)` with `p = α/2`, the head
/// `∫_0^x` is integrated adaptively for `x ≤ 2`, and the tail for `x > 2`
/// uses the convergent series `Σ (-1)^k x^{1-p(k+1)} / (p(k+1) - 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GFunction {
    alpha: f64,
    p: f64,
    g0: f64,
    closed: bool,
}

impl GFunction {
    pub fn new(alpha: f64) -> Result<Self> {
        let mut g = Self::quadrature(alpha)?;
        g.closed = alpha == 4.0;
        Ok(g)
    }

    /// Always integrates numerically, even when a closed form exists.
    pub fn quadrature(alpha: f64) -> Result<Self> {
        if !(alpha > 2.0) || !alpha.is_finite() {
            return Err(Error::domain(format!(
                "G_alpha diverges for alpha = {alpha}; need alpha > 2"
            )));
        }
        let p = alpha / 2.0;
        Ok(GFunction {
            alpha,
            p,
            g0: (PI / p) / (PI / p).sin(),
            closed: false,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn is_closed_form(&self) -> bool {
        self.closed
    }

    /// `G_α(0) = ∫_0^∞ dt / (1 + t^{α/2})`.
    pub fn at_zero(&self) -> f64 {
        if self.closed {
            PI / 2.0
        } else {
            self.g0
        }
    }

    /// `G_α(x)` for `x ≥ 0` (including `+∞`, where it is 0).
    pub fn eval(&self, x: f64) -> f64 {
        debug_assert!(x >= 0.0, "G_alpha needs x >= 0, got {x}");
        if self.closed {
            return if x == 0.0 { PI / 2.0 } else { (1.0 / x).atan() };
        }
        if x <= SERIES_FROM {
            self.g0 - self.head_quadrature(x)
        } else {
            self.tail_series(x)
        }
    }

    /// `∫_0^y dt / (1 + t^{α/2}) = G_α(0) − G_α(y)`.
    pub fn head(&self, y: f64) -> f64 {
        if self.closed {
            return y.atan();
        }
        if y <= SERIES_FROM {
            self.head_quadrature(y)
        } else {
            self.g0 - self.tail_series(y)
        }
    }

    fn head_quadrature(&self, y: f64) -> f64 {
        if y == 0.0 {
            return 0.0;
        }
        let p = self.p;
        let opts = QuadOptions {
            abs_tol: 1e-14,
            rel_tol: 1e-13,
            max_panels: 2000,
        };
        integrate(|t| 1.0 / (1.0 + t.powf(p)), 0.0, y, opts)
            .expect("bounded smooth integrand on a short interval")
            .value
    }

    fn tail_series(&self, x: f64) -> f64 {
        if x.is_infinite() {
            return 0.0;
        }
        let p = self.p;
        let ratio = x.powf(-p);
        let mut power = x.powf(1.0 - p);
        let mut sum = 0.0;
        for k in 0..400 {
            let term = power / (p * (k + 1) as f64 - 1.0);
            if k % 2 == 0 {
                sum += term;
            } else {
                sum -= term;
            }
            if term < 1e-17 * sum.abs() {
                break;
            }
            power *= ratio;
        }
        sum
    }
}

/// `G_α(x)`; rejects `α ≤ 2` and negative `x`.
pub fn g_alpha(alpha: f64, x: f64) -> Result<f64> {
    if !(x >= 0.0) {
        return Err(Error::domain(format!("G_alpha needs x >= 0, got {x}")));
    }
    Ok(GFunction::new(alpha)?.eval(x))
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Independent oracle: composite Simpson in `w = ln t` on `[max(ln x, -40), 200]`.
    fn simpson_oracle(alpha: f64, x: f64) -> f64 {
        let p = alpha / 2.0;
        let f = |w: f64| w.exp() / (1.0 + (p * w).exp());
        let lo = if x > 0.0 { x.ln().max(-40.0) } else { -40.0 };
        let hi = 200.0;
        let n = 2_000_000;
        let h = (hi - lo) / n as f64;
        let mut s = f(lo) + f(hi);
        for i in 1..n {
            s += f(lo + i as f64 * h) * if i % 2 == 1 { 4.0 } else { 2.0 };
        }
        s * h / 3.0
    }

    #[test]
    fn alpha4_values() {
        assert!((g_alpha(4.0, 0.0).unwrap() - PI / 2.0).abs() < 1e-15);
        assert!((g_alpha(4.0, 1.0).unwrap() - PI / 4.0).abs() < 1e-15);
    }

    #[test]
    fn quadrature_matches_arccot() {
        let g = GFunction::quadrature(4.0).unwrap();
        for x in [0.0, 0.5, 1.0, 2.0, 10.0] {
            let arccot = PI / 2.0 - f64::atan(x);
            assert!((g.eval(x) - arccot).abs() < 1e-10, "x={x}");
            assert!((g.head(x) - x.atan()).abs() < 1e-10, "x={x}");
        }
    }

    #[test]
    fn alpha3_at_zero() {
        let expected = 4.0 * PI / (3.0 * 3f64.sqrt());
        assert!((g_alpha(3.0, 0.0).unwrap() - expected).abs() < 1e-12);
        assert!((simpson_oracle(3.0, 0.0) - 2.4184).abs() < 1e-4);
    }

    #[test]
    fn general_alpha_against_oracle() {
        for alpha in [2.5, 3.0, 3.7, 5.0] {
            let g = GFunction::new(alpha).unwrap();
            for x in [0.0, 0.3, 1.0, 1.99, 2.01, 5.0, 40.0] {
                let oracle = simpson_oracle(alpha, x);
                assert!((g.eval(x) - oracle).abs() < 1e-8, "alpha={alpha} x={x}: {} vs {oracle}", g.eval(x));
            }
        }
    }

    #[test]
    fn continuity_at_series_switch() {
        for alpha in [2.2, 3.0, 6.0] {
            let g = GFunction::new(alpha).unwrap();
            let below = g.eval(SERIES_FROM);
            let above = g.eval(SERIES_FROM * (1.0 + 1e-12));
            assert!((below - above).abs() < 1e-10, "alpha={alpha}");
        }
    }

    #[test]
    fn positive_and_decreasing() {
        for alpha in [2.5, 4.0, 4.5] {
            let g = GFunction::quadrature(alpha).unwrap();
            let xs: Vec<f64> = (0..60).map(|i| 0.1 * i as f64 * (1.0 + 0.1 * i as f64)).collect();
            let v: Vec<f64> = xs.iter().map(|&x| g.eval(x)).collect();
            assert!(v.iter().all(|&y| y > 0.0));
            assert!(v.windows(2).all(|w| w[1] < w[0]), "alpha={alpha}");
            assert_eq!(g.eval(f64::INFINITY), 0.0);
        }
    }

    #[test]
    fn rejects_divergent_exponent() {
        assert!(g_alpha(2.0, 1.0).is_err());
        assert!(g_alpha(1.5, 0.0).is_err());
        assert!(g_alpha(4.0, -1.0).is_err());
    }
}

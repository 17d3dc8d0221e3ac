//! Successful-transmission probabilities and ergodic service rates from
//! stochastic geometry.
//!
//! Three links are modelled for a user at the origin:
//!
//! * the nearest macro BS, interfered by every SBS and every other MBS;
//! * `n₁` cooperating SBSs uniform in the disk of radius `a` (base layer),
//!   interfered by the SBS field outside the disk and by all MBSs;
//! * `n₂` cooperating SBSs uniform in the annulus `(a, b)` (enhancement
//!   layer), interfered by the SBS field inside `a` and beyond `b` and by
//!   all MBSs.
//!
//! Conditioned on the serving geometry, Rayleigh fading makes the success
//! probability a product of PPP Laplace transforms. The
//! macro link is then averaged over the nearest-neighbour distance by
//! deterministic quadrature; the cooperative links are averaged over the
//! `n`-dimensional serving positions by Monte-Carlo integration.

mod gfunc;
mod mbs;
mod sbs;
mod table;

pub use gfunc::{g_alpha, GFunction};
pub use mbs::{ergodic_rate_mbs, ergodic_rate_mbs_with, p_success_mbs, p_success_mbs_closed, p_success_mbs_with};
pub use sbs::{
    ergodic_rate_sbs, p_success_sbs, p_success_sbs_closed, Cluster,
};
pub use table::{build_rate_table, Provenance, RateTable};

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::config::NetworkConfig;
use crate::error::Result;
use crate::quad::{integrate_tail, QuadOptions};

/// How the per-geometry conditional rate is averaged over serving positions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum ConditionalAveraging {
    /// Weight each geometry by its own success probability. This is the
    /// exact conditional mean `E[log₂(1+SIR) | SIR ≥ γ]`.
    #[default]
    SuccessWeighted,
    /// Average the per-geometry conditional mean with the unconditioned
    /// position density. Underestimates the conditional mean because
    /// favourable geometries are over-represented among successes.
    PerPosition,
}

/// Which evaluation route to use for `G_α`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum GRoute {
    /// Closed forms at `α = 4`, quadrature otherwise.
    #[default]
    Auto,
    /// Quadrature even at `α = 4`.
    Quadrature,
}

/// Knobs shared by the position-integrated (cooperative SBS) quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnalyticOptions {
    pub position_samples: usize,
    pub seed: u64,
    pub averaging: ConditionalAveraging,
    pub route: GRoute,
}

impl Default for AnalyticOptions {
    fn default() -> Self {
        AnalyticOptions {
            position_samples: 200_000,
            seed: 1,
            averaging: ConditionalAveraging::default(),
            route: GRoute::default(),
        }
    }
}

/// Radial panels grow from this width (in units of the normalized
/// macro-distance variable `y = πλ_M x²`, or of `ln(t/γ)` for threshold tails).
const FIRST_PANEL: f64 = 1.0;
/// Relative tail tolerance of the outer (position) integrals.
pub const RADIAL_TAIL_REL: f64 = 1e-10;
/// Relative tail tolerance of the inner threshold integrals.
pub const THRESHOLD_TAIL_REL: f64 = 1e-8;

/// Log conditional success probabilities of the three links.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Links {
    lambda_m: f64,
    lambda_s: f64,
    ps_over_pm: f64,
    alpha_m: f64,
    alpha_s: f64,
    a2: f64,
    b2: f64,
    gm: GFunction,
    gs: GFunction,
}

impl Links {
    pub(crate) fn new(cfg: &NetworkConfig, route: GRoute) -> Result<Self> {
        cfg.validate()?;
        let g = |alpha| match route {
            GRoute::Auto => GFunction::new(alpha),
            GRoute::Quadrature => GFunction::quadrature(alpha),
        };
        Ok(Links {
            lambda_m: cfg.lambda_m,
            lambda_s: cfg.lambda_s,
            ps_over_pm: cfg.p_s / cfg.p_m,
            alpha_m: cfg.alpha_m,
            alpha_s: cfg.alpha_s,
            a2: cfg.a * cfg.a,
            b2: cfg.b * cfg.b,
            gm: g(cfg.alpha_m)?,
            gs: g(cfg.alpha_s)?,
        })
    }

    /// `ln P(SIR_M ≥ t | nearest MBS at distance x)`.
    pub(crate) fn log_p_mbs(&self, t: f64, x: f64) -> f64 {
        let tm = t.powf(2.0 / self.alpha_m);
        let macro_term = self.lambda_m * x * x * tm * self.gm.eval(1.0 / tm);
        let small_term = self.lambda_s
            * (t * self.ps_over_pm * x.powf(self.alpha_m)).powf(2.0 / self.alpha_s)
            * self.gs.at_zero();
        -PI * (macro_term + small_term)
    }

    /// `ln P(SIR_BL ≥ t | Σ_k x_k^{-α_S} = s)` for serving SBSs inside `a`.
    pub(crate) fn log_p_bl(&self, t: f64, s: f64) -> f64 {
        let c = t / s;
        let cs = c.powf(2.0 / self.alpha_s);
        let small_term = if cs == 0.0 { 0.0 } else { self.lambda_s * cs * self.gs.eval(self.a2 / cs) };
        let macro_term = self.lambda_m * (c / self.ps_over_pm).powf(2.0 / self.alpha_m) * self.gm.at_zero();
        -PI * (small_term + macro_term)
    }

    /// `ln P(SIR_EL ≥ t | Σ_k x_k^{-α_S} = s)` for serving SBSs in `(a, b)`.
    pub(crate) fn log_p_el(&self, t: f64, s: f64) -> f64 {
        let d = t / s;
        let ds = d.powf(2.0 / self.alpha_s);
        let small_term = if ds == 0.0 {
            0.0
        } else {
            self.lambda_s * ds * (self.gs.head(self.a2 / ds) + self.gs.eval(self.b2 / ds))
        };
        let macro_term = self.lambda_m * (d / self.ps_over_pm).powf(2.0 / self.alpha_m) * self.gm.at_zero();
        -PI * (macro_term + small_term)
    }
}

/// `∫_γ^∞ P(t) / (P(γ) (1 + t)) dt` for a conditional success curve given in
/// log form, integrated in `s = ln(t/γ)`.
pub(crate) fn threshold_excess<F: Fn(f64) -> f64>(log_p: F, gamma: f64) -> Result<f64> {
    let base = log_p(gamma);
    let opts = QuadOptions {
        abs_tol: 1e-14,
        rel_tol: 1e-9,
        max_panels: 400,
    };
    let f = |s: f64| {
        let t = gamma * s.exp();
        let lp = log_p(t);
        if lp == f64::NEG_INFINITY {
            return 0.0;
        }
        (lp - base).exp() / (1.0 + 1.0 / t)
    };
    Ok(integrate_tail(f, 0.0, FIRST_PANEL, THRESHOLD_TAIL_REL, opts)?.value)
}

pub(crate) fn check_threshold(gamma: f64) -> Result<()> {
    if gamma > 0.0 && gamma.is_finite() {
        Ok(())
    } else {
        Err(crate::error::Error::domain(format!("threshold must be positive and finite, got {gamma}")))
    }
}

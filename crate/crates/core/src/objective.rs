//! Sum-rate models and the energy-efficiency objectives of both schemes.
//!
//! Scheme I (fractional caching) and Scheme II (probabilistic caching) share
//! the structure `EE = Σ_f r_f / (Σ_f π_f + P_fix)`, where `r_f` and `π_f`
//! depend only on file `f`'s two policy entries. Gradients exploit this: a
//! finite-difference probe on one entry re-evaluates only that file.

use serde::{Deserialize, Serialize};

use crate::analytic::RateTable;
use crate::config::{CachingPolicy, ContentConfig, ModelOptions, NetworkConfig, PolicyMode, PowerCoefficients, Scenario};
use crate::error::{Error, Result};
use crate::popularity::PopularityProfile;
use crate::power::{PowerModel, L0};

/// Finite-difference step for [`ee_gradient`].
pub const FD_STEP: f64 = 1e-6;

/// Default smoothness of the `l₀` surrogate.
pub const DEFAULT_THETA: f64 = 0.01;

/// `log(x/θ + 1) / log(1/θ + 1)` without argument checks.
#[inline]
pub(crate) fn f_theta(x: f64, theta: f64) -> f64 {
    (x / theta).ln_1p() / (1.0 / theta).ln_1p()
}

/// Smooth surrogate of the `l₀` indicator on `[0, 1]`.
///
/// ```
/// use svc_ee::objective::smooth_l0;
/// let v = smooth_l0(0.5, 0.01).unwrap();
/// assert!((v - 51f64.ln() / 101f64.ln()).abs() < 1e-15);
/// assert_eq!(smooth_l0(1.0, 0.3).unwrap(), 1.0);
/// ```
pub fn smooth_l0(x: f64, theta: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::domain(format!("smooth_l0 argument {x} outside [0, 1]")));
    }
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::domain(format!("theta must be positive, got {theta}")));
    }
    Ok(f_theta(x, theta))
}

/// Which block of the policy a gradient is taken with respect to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Layer {
    /// `q1` (Scheme I) or `t1` (Scheme II).
    Base,
    /// `q2` or `t2`.
    Enhancement,
}

/// Everything the EE objectives depend on besides the policy.
#[derive(Debug, Clone, PartialEq)]
pub struct ObjectiveContext {
    pub rates: RateTable,
    pub profile: PopularityProfile,
    pub net: NetworkConfig,
    pub content: ContentConfig,
    pub coeff: PowerCoefficients,
    pub options: ModelOptions,
    pub theta: f64,
}

impl ObjectiveContext {
    pub fn new(scenario: &Scenario, rates: RateTable, theta: f64) -> Result<Self> {
        scenario.validate()?;
        let ctx = ObjectiveContext {
            profile: PopularityProfile::new(&scenario.content)?,
            rates,
            net: scenario.network.clone(),
            content: scenario.content.clone(),
            coeff: scenario.power.clone(),
            options: scenario.options.clone(),
            theta,
        };
        ctx.check()?;
        Ok(ctx)
    }

    /// Replaces the popularity profile (synthetic catalogs).
    pub fn with_profile(mut self, profile: PopularityProfile) -> Result<Self> {
        self.profile = profile;
        self.check()?;
        Ok(self)
    }

    fn check(&self) -> Result<()> {
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::validation("theta", format!("must be positive, got {}", self.theta)));
        }
        if self.rates.r_s_bl.len() != self.net.n1 || self.rates.r_s_el.len() != self.net.n2 {
            return Err(Error::domain(format!(
                "rate table covers ({}, {}) serving SBSs but the clusters have ({}, {})",
                self.rates.r_s_bl.len(),
                self.rates.r_s_el.len(),
                self.net.n1,
                self.net.n2
            )));
        }
        if self.profile.len() != self.content.f_count {
            return Err(Error::domain("popularity profile length does not match the catalog"));
        }
        Ok(())
    }

    fn power_model(&self) -> PowerModel {
        PowerModel::new(&self.net, &self.content, &self.coeff, &self.options)
    }

    pub fn m_b(&self) -> usize {
        self.content.m_b()
    }

    pub fn m_e(&self) -> usize {
        self.content.m_e()
    }
}

/// `P(Binomial(n_total, t) = n)`.
pub fn binomial_pmf(n_total: usize, n: usize, t: f64) -> f64 {
    if n > n_total {
        return 0.0;
    }
    let mut c = 1.0;
    for k in 0..n {
        c = c * (n_total - k) as f64 / (k + 1) as f64;
    }
    c * t.powi(n as i32) * (1.0 - t).powi((n_total - n) as i32)
}

/// Which objective a per-file evaluation follows.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Model {
    Fractional(L0),
    Random,
}

impl Model {
    fn of(policy: &CachingPolicy, ctx: &ObjectiveContext, exact: bool) -> Self {
        match policy.mode {
            PolicyMode::Fractional if exact => Model::Fractional(L0::Exact),
            PolicyMode::Fractional => Model::Fractional(L0::Smoothed(ctx.theta)),
            PolicyMode::Random => Model::Random,
        }
    }
}

struct Evaluator<'a> {
    ctx: &'a ObjectiveContext,
    power: PowerModel,
    model: Model,
}

impl<'a> Evaluator<'a> {
    fn new(ctx: &'a ObjectiveContext, model: Model) -> Self {
        Evaluator {
            ctx,
            power: ctx.power_model(),
            model,
        }
    }

    fn file_rate(&self, f: usize, x1: f64, x2: f64) -> f64 {
        let r = &self.ctx.rates;
        let (p, g) = (self.ctx.profile.p[f], self.ctx.profile.g_hdv[f]);
        match self.model {
            Model::Fractional(_) => {
                p * ((1.0 - x1) * r.r_m_bl
                    + g * (1.0 - x2) * r.r_m_el
                    + x1 * r.s_bl_full()
                    + g * x2 * r.s_el_full())
            }
            Model::Random => {
                let (n1, n2) = (r.r_s_bl.len(), r.r_s_el.len());
                let bl: f64 = (1..=n1).map(|n| binomial_pmf(n1, n, x1) * r.s_bl(n)).sum();
                let el: f64 = (1..=n2).map(|n| binomial_pmf(n2, n, x2) * r.s_el(n)).sum();
                p * ((1.0 - x1).powi(n1 as i32) * r.r_m_bl + g * (1.0 - x2).powi(n2 as i32) * r.r_m_el + bl + g * el)
            }
        }
    }

    fn file_power(&self, f: usize, x1: f64, x2: f64) -> f64 {
        let (p, g) = (self.ctx.profile.p[f], self.ctx.profile.g_hdv[f]);
        let [tr, ca, bh] = match self.model {
            Model::Fractional(l0) => self.power.fractional(x1, x2, p, g, l0),
            Model::Random => self.power.random(x1, x2, p, g),
        };
        tr + ca + bh
    }

    /// `(Σ r_f, Σ π_f + P_fix)`.
    fn totals(&self, q1: &[f64], q2: &[f64]) -> (f64, f64) {
        let mut rate = 0.0;
        let mut power = self.power.p_fix;
        for f in 0..q1.len() {
            rate += self.file_rate(f, q1[f], q2[f]);
            power += self.file_power(f, q1[f], q2[f]);
        }
        (rate, power)
    }
}

fn check_policy(policy: &CachingPolicy, ctx: &ObjectiveContext) -> Result<()> {
    policy.check_shape(ctx.content.f_count)
}

fn sum_rate(q1: &[f64], q2: &[f64], ctx: &ObjectiveContext, model: Model) -> Result<f64> {
    let mode = match model {
        Model::Fractional(_) => PolicyMode::Fractional,
        Model::Random => PolicyMode::Random,
    };
    check_policy(&CachingPolicy::new(mode, q1.to_vec(), q2.to_vec()), ctx)?;
    let ev = Evaluator::new(ctx, model);
    Ok((0..q1.len()).map(|f| ev.file_rate(f, q1[f], q2[f])).sum())
}

/// Scheme I sum rate in bits/s for per-file cached fractions `q1`, `q2`.
pub fn sum_rate_scheme1(q1: &[f64], q2: &[f64], ctx: &ObjectiveContext) -> Result<f64> {
    sum_rate(q1, q2, ctx, Model::Fractional(L0::Exact))
}

/// Scheme II sum rate in bits/s for per-file caching probabilities `t1`, `t2`.
pub fn sum_rate_scheme2(t1: &[f64], t2: &[f64], ctx: &ObjectiveContext) -> Result<f64> {
    sum_rate(t1, t2, ctx, Model::Random)
}

fn ee_with(policy: &CachingPolicy, ctx: &ObjectiveContext, exact: bool) -> Result<f64> {
    check_policy(policy, ctx)?;
    let (rate, power) = Evaluator::new(ctx, Model::of(policy, ctx, exact)).totals(&policy.q1, &policy.q2);
    if !(power > 0.0) {
        return Err(Error::domain("total power is zero; energy efficiency is undefined"));
    }
    Ok(rate / power)
}

/// Energy efficiency in bits/joule. Fractional policies use the smoothed
/// transmission power, which is the surface the optimizer climbs.
pub fn ee_value(policy: &CachingPolicy, ctx: &ObjectiveContext) -> Result<f64> {
    ee_with(policy, ctx, false)
}

/// Energy efficiency with exact `l₀` counting. Identical to [`ee_value`]
/// for probabilistic policies.
pub fn ee_exact(policy: &CachingPolicy, ctx: &ObjectiveContext) -> Result<f64> {
    ee_with(policy, ctx, true)
}

/// `∂EE/∂x_f` for every entry of one policy block, by central differences
/// with step [`FD_STEP`] (one-sided where the stencil would leave `[0, 1]`).
pub fn ee_gradient(policy: &CachingPolicy, ctx: &ObjectiveContext, layer: Layer) -> Result<Vec<f64>> {
    ee_gradient_step(policy, ctx, layer, FD_STEP)
}

/// [`ee_gradient`] with an explicit step.
pub fn ee_gradient_step(policy: &CachingPolicy, ctx: &ObjectiveContext, layer: Layer, h: f64) -> Result<Vec<f64>> {
    check_policy(policy, ctx)?;
    if !(h > 0.0 && h < 0.5) {
        return Err(Error::domain(format!("finite-difference step {h} outside (0, 0.5)")));
    }
    let ev = Evaluator::new(ctx, Model::of(policy, ctx, false));
    let (q1, q2) = (&policy.q1, &policy.q2);
    let (rate, power) = ev.totals(q1, q2);
    let probe = |f: usize, x: f64| {
        let (x1, x2) = match layer {
            Layer::Base => (x, q2[f]),
            Layer::Enhancement => (q1[f], x),
        };
        let r = rate - ev.file_rate(f, q1[f], q2[f]) + ev.file_rate(f, x1, x2);
        let p = power - ev.file_power(f, q1[f], q2[f]) + ev.file_power(f, x1, x2);
        r / p
    };
    let here = rate / power;
    let block = match layer {
        Layer::Base => q1,
        Layer::Enhancement => q2,
    };
    Ok(block
        .iter()
        .enumerate()
        .map(|(f, &x)| {
            if x - h < 0.0 {
                (probe(f, x + h) - here) / h
            } else if x + h > 1.0 {
                (here - probe(f, x - h)) / h
            } else {
                (probe(f, x + h) - probe(f, x - h)) / (2.0 * h)
            }
        })
        .collect())
}

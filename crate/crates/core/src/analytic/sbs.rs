use std::f64::consts::{LN_2, PI};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{check_threshold, threshold_excess, AnalyticOptions, ConditionalAveraging, Links};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::stats::{batch_rng, batches, Estimate, RatioMoments};

/// Which cooperative cluster serves the layer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Cluster {
    /// SBSs inside the disk of radius `a`; they deliver base layers.
    Inner,
    /// SBSs in the annulus `(a, b)`; they deliver enhancement layers.
    Outer,
}

impl Cluster {
    /// Radius with density `2x/a²` on the disk or `2x/(b²−a²)` on the
    /// annulus, from a uniform variate by inverting the CDF.
    pub fn radius(self, cfg: &NetworkConfig, u: f64) -> f64 {
        match self {
            Cluster::Inner => cfg.a * u.sqrt(),
            Cluster::Outer => (cfg.a * cfg.a + (cfg.b * cfg.b - cfg.a * cfg.a) * u).sqrt(),
        }
    }

    pub fn size(self, cfg: &NetworkConfig) -> usize {
        match self {
            Cluster::Inner => cfg.n1,
            Cluster::Outer => cfg.n2,
        }
    }
}

/// Draws `Σ_k x_k^{-α_S}` for `n` serving SBSs at independent cluster positions.
fn signal_sum<R: Rng>(rng: &mut R, cfg: &NetworkConfig, cluster: Cluster, n: usize) -> f64 {
    (0..n)
        .map(|_| cluster.radius(cfg, rng.random::<f64>()).powf(-cfg.alpha_s))
        .sum()
}

/// Monte-Carlo integration over serving positions. `f` maps the signal sum
/// to a `(numerator, denominator)` pair; batches are reduced in index order.
fn integrate_positions<F>(cfg: &NetworkConfig, cluster: Cluster, n: usize, opts: &AnalyticOptions, f: F) -> RatioMoments
where
    F: Fn(f64) -> (f64, f64) + Sync,
{
    let per_batch: Vec<RatioMoments> = batches(opts.position_samples)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = batch_rng(opts.seed, idx);
            let mut m = RatioMoments::default();
            for _ in 0..len {
                let (num, den) = f(signal_sum(&mut rng, cfg, cluster, n));
                m.push(num, den);
            }
            m
        })
        .collect();
    per_batch.into_iter().fold(RatioMoments::default(), RatioMoments::merge)
}

fn check_serving(n: usize, opts: &AnalyticOptions) -> Result<()> {
    if n == 0 {
        return Err(Error::domain("at least one serving SBS is required"));
    }
    if opts.position_samples < 2 {
        return Err(Error::domain("need at least two position samples"));
    }
    Ok(())
}

fn log_p(links: &Links, cluster: Cluster, t: f64, s: f64) -> f64 {
    match cluster {
        Cluster::Inner => links.log_p_bl(t, s),
        Cluster::Outer => links.log_p_el(t, s),
    }
}

/// `P(SIR ≥ γ)` for a layer served coherently by `n` SBSs of `cluster`,
/// averaged over their positions.
pub fn p_success_sbs(
    cfg: &NetworkConfig,
    cluster: Cluster,
    gamma: f64,
    n: usize,
    opts: &AnalyticOptions,
) -> Result<Estimate> {
    check_threshold(gamma)?;
    check_serving(n, opts)?;
    let links = Links::new(cfg, opts.route)?;
    let m = integrate_positions(cfg, cluster, n, opts, |s| (log_p(&links, cluster, gamma, s).exp(), 1.0));
    Ok(m.num.estimate(opts.seed))
}

/// Same quantity as [`p_success_sbs`] through the `α = 4` arctangent forms
/// (`exp(−π u √c)` for the disk, `exp(−π v √d)` for the annulus), drawing the
/// same position samples.
pub fn p_success_sbs_closed(
    cfg: &NetworkConfig,
    cluster: Cluster,
    gamma: f64,
    n: usize,
    opts: &AnalyticOptions,
) -> Result<Estimate> {
    check_threshold(gamma)?;
    check_serving(n, opts)?;
    cfg.validate()?;
    if !cfg.is_alpha4() {
        return Err(Error::domain("closed form needs alpha_m = alpha_s = 4"));
    }
    let macro_part = PI / 2.0 * cfg.lambda_m * (cfg.p_m / cfg.p_s).sqrt();
    let (a2, b2) = (cfg.a * cfg.a, cfg.b * cfg.b);
    let m = integrate_positions(cfg, cluster, n, opts, |s| {
        let root = (gamma / s).sqrt();
        if root == 0.0 {
            return (1.0, 1.0);
        }
        let arccot = |z: f64| (1.0 / z).atan();
        let coeff = match cluster {
            Cluster::Inner => cfg.lambda_s * arccot(a2 / root) + macro_part,
            Cluster::Outer => cfg.lambda_s * ((a2 / root).atan() + arccot(b2 / root)) + macro_part,
        };
        ((-PI * coeff * root).exp(), 1.0)
    });
    Ok(m.num.estimate(opts.seed))
}

/// Ergodic service rate `W·E[log₂(1+SIR) | SIR ≥ γ]` of `n` cooperating
/// SBSs in `cluster`, in bits/s.
pub fn ergodic_rate_sbs(
    cfg: &NetworkConfig,
    cluster: Cluster,
    gamma: f64,
    n: usize,
    opts: &AnalyticOptions,
) -> Result<Estimate> {
    check_threshold(gamma)?;
    check_serving(n, opts)?;
    if cfg.w == 0.0 {
        return Ok(Estimate {
            mean: 0.0,
            std_error: 0.0,
            n_samples: opts.position_samples,
            seed: opts.seed,
        });
    }
    let links = Links::new(cfg, opts.route)?;
    let failed = std::sync::atomic::AtomicBool::new(false);
    let m = integrate_positions(cfg, cluster, n, opts, |s| {
        let excess = threshold_excess(|t| log_p(&links, cluster, t, s), gamma).unwrap_or_else(|_| {
            failed.store(true, std::sync::atomic::Ordering::Relaxed);
            0.0
        });
        match opts.averaging {
            ConditionalAveraging::PerPosition => (excess, 1.0),
            ConditionalAveraging::SuccessWeighted => {
                let p = log_p(&links, cluster, gamma, s).exp();
                (p * excess, p)
            }
        }
    });
    if failed.into_inner() || !m.ratio().is_finite() {
        return Err(Error::NonConvergence {
            error_estimate: f64::NAN,
            tolerance: super::THRESHOLD_TAIL_REL,
        });
    }
    let scale = cfg.w / LN_2;
    Ok(Estimate {
        mean: cfg.w * (1.0 + gamma).log2() + scale * m.ratio(),
        std_error: scale * m.std_error(),
        n_samples: opts.position_samples,
        seed: opts.seed,
    })
}

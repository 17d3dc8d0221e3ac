//! Network power consumption under both caching schemes.
//!
//! Every quantity is a request-weighted expectation for the designated user:
//! transmission power of the SBSs and MBS that deliver each layer, caching
//! power of the stored bits, backhaul power of the bits fetched from the
//! core, and the fixed site power of the `N₁ + N₂` SBSs and one MBS.

use serde::{Deserialize, Serialize};

use crate::config::{CachingPolicy, ContentConfig, ModelOptions, NetworkConfig, PowerCoefficients};
use crate::error::{Error, Result};
use crate::objective::f_theta;
use crate::popularity::PopularityProfile;

/// Entries at or below this are treated as zero by the exact `l₀` indicator.
pub const L0_TOL: f64 = 1e-12;

/// Power split by consumer, in watts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerBreakdown {
    pub p_tr: f64,
    pub p_ca: f64,
    pub p_bh: f64,
    pub p_fix: f64,
    pub p_total: f64,
}

impl PowerBreakdown {
    fn from_parts(p_tr: f64, p_ca: f64, p_bh: f64, p_fix: f64) -> Self {
        PowerBreakdown {
            p_tr,
            p_ca,
            p_bh,
            p_fix,
            p_total: p_tr + p_ca + p_bh + p_fix,
        }
    }
}

/// How Scheme I counts active transmitters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum L0 {
    /// Indicator of a nonzero entry.
    Exact,
    /// The logarithmic surrogate with smoothness `θ`.
    Smoothed(f64),
}

impl L0 {
    #[inline]
    fn norm(self, x: f64) -> f64 {
        match self {
            L0::Exact => {
                if x > L0_TOL {
                    1.0
                } else {
                    0.0
                }
            }
            L0::Smoothed(theta) => f_theta(x.max(0.0), theta),
        }
    }
}

/// The constants every per-file power term needs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct PowerModel {
    n1: f64,
    n2: f64,
    tx_s: f64,
    tx_m: f64,
    c_ca: f64,
    c_bh: f64,
    l_b: f64,
    l_e: f64,
    /// Size charged for Scheme II enhancement-layer caching.
    l_e_cached_random: f64,
    pub(crate) p_fix: f64,
}

impl PowerModel {
    pub(crate) fn new(net: &NetworkConfig, content: &ContentConfig, coeff: &PowerCoefficients, options: &ModelOptions) -> Self {
        PowerModel {
            n1: net.n1 as f64,
            n2: net.n2 as f64,
            tx_s: coeff.zeta_s * net.p_s,
            tx_m: coeff.zeta_m * net.p_m,
            c_ca: coeff.c_ca,
            c_bh: coeff.c_bh,
            l_b: content.l_b,
            l_e: content.l_e,
            l_e_cached_random: if options.el_caching_uses_bl_size { content.l_b } else { content.l_e },
            p_fix: (net.n1 + net.n2) as f64 * coeff.p_s_fix + coeff.p_m_fix,
        }
    }

    /// `[p_tr, p_ca, p_bh]` contributed by one file under Scheme I.
    #[inline]
    pub(crate) fn fractional(&self, q1: f64, q2: f64, p: f64, g_hdv: f64, l0: L0) -> [f64; 3] {
        let tr = p
            * ((self.n1 * l0.norm(q1) + g_hdv * self.n2 * l0.norm(q2)) * self.tx_s
                + (l0.norm(1.0 - q1) + g_hdv * l0.norm(1.0 - q2)) * self.tx_m);
        let ca = self.c_ca * (q1 * self.l_b * self.n1 + q2 * self.l_e * self.n2);
        let bh = self.c_bh * p * ((1.0 - q1) * self.l_b + g_hdv * (1.0 - q2) * self.l_e);
        [tr, ca, bh]
    }

    /// `[p_tr, p_ca, p_bh]` contributed by one file under Scheme II.
    #[inline]
    pub(crate) fn random(&self, t1: f64, t2: f64, p: f64, g_hdv: f64) -> [f64; 3] {
        let tr = p
            * ((self.n1 * t1 + g_hdv * self.n2 * t2) * self.tx_s + ((1.0 - t1) + g_hdv * (1.0 - t2)) * self.tx_m);
        let ca = self.c_ca * (t1 * self.l_b * self.n1 + t2 * self.l_e_cached_random * self.n2);
        let miss1 = (1.0 - t1).powi(self.n1 as i32);
        let miss2 = (1.0 - t2).powi(self.n2 as i32);
        let bh = self.c_bh * p * (miss1 * self.l_b + g_hdv * miss2 * self.l_e);
        [tr, ca, bh]
    }

    fn total<F: Fn(usize) -> [f64; 3]>(&self, f_count: usize, per_file: F) -> PowerBreakdown {
        let mut acc = [0.0; 3];
        for f in 0..f_count {
            let t = per_file(f);
            for k in 0..3 {
                acc[k] += t[k];
            }
        }
        PowerBreakdown::from_parts(acc[0], acc[1], acc[2], self.p_fix)
    }
}

fn check_inputs(policy: &CachingPolicy, profile: &PopularityProfile, content: &ContentConfig) -> Result<()> {
    if profile.len() != content.f_count {
        return Err(Error::domain(format!(
            "popularity profile has {} files but the catalog has {}",
            profile.len(),
            content.f_count
        )));
    }
    policy.check_shape(content.f_count)
}

/// Scheme I power for a fractional policy. With `smoothing = Some(θ)` every
/// `l₀` indicator in the transmission term is replaced by the surrogate.
pub fn power_scheme1(
    policy: &CachingPolicy,
    profile: &PopularityProfile,
    net: &NetworkConfig,
    content: &ContentConfig,
    coeff: &PowerCoefficients,
    smoothing: Option<f64>,
) -> Result<PowerBreakdown> {
    check_inputs(policy, profile, content)?;
    let l0 = match smoothing {
        None => L0::Exact,
        Some(theta) if theta > 0.0 && theta.is_finite() => L0::Smoothed(theta),
        Some(theta) => return Err(Error::domain(format!("smoothing theta must be positive, got {theta}"))),
    };
    let model = PowerModel::new(net, content, coeff, &ModelOptions::default());
    Ok(model.total(content.f_count, |f| {
        model.fractional(policy.q1[f], policy.q2[f], profile.p[f], profile.g_hdv[f], l0)
    }))
}

/// Scheme II power for a probabilistic policy.
pub fn power_scheme2(
    policy: &CachingPolicy,
    profile: &PopularityProfile,
    net: &NetworkConfig,
    content: &ContentConfig,
    coeff: &PowerCoefficients,
    options: &ModelOptions,
) -> Result<PowerBreakdown> {
    check_inputs(policy, profile, content)?;
    let model = PowerModel::new(net, content, coeff, options);
    Ok(model.total(content.f_count, |f| {
        model.random(policy.q1[f], policy.q2[f], profile.p[f], profile.g_hdv[f])
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::PolicyMode;

    struct Setup {
        net: NetworkConfig,
        content: ContentConfig,
        coeff: PowerCoefficients,
        profile: PopularityProfile,
    }

    fn setup() -> Setup {
        let content = ContentConfig::default();
        Setup {
            net: NetworkConfig::default(),
            profile: PopularityProfile::new(&content).unwrap(),
            content,
            coeff: PowerCoefficients::default(),
        }
    }

    fn s1(s: &Setup, p: &CachingPolicy, theta: Option<f64>) -> PowerBreakdown {
        power_scheme1(p, &s.profile, &s.net, &s.content, &s.coeff, theta).unwrap()
    }

    fn s2(s: &Setup, p: &CachingPolicy) -> PowerBreakdown {
        power_scheme2(p, &s.profile, &s.net, &s.content, &s.coeff, &ModelOptions::default()).unwrap()
    }

    #[test]
    fn nothing_cached() {
        let s = setup();
        let zero = CachingPolicy::zeros(PolicyMode::Fractional, 20);
        let b = s1(&s, &zero, None);
        assert_eq!(b.p_ca, 0.0);
        let (mut tr, mut bh) = (0.0, 0.0);
        for f in 0..20 {
            let (p, g) = (s.profile.p[f], s.profile.g_hdv[f]);
            tr += p * s.coeff.zeta_m * (1.0 + g) * s.net.p_m;
            bh += s.coeff.c_bh * p * (s.content.l_b + g * s.content.l_e);
        }
        assert!((b.p_tr - tr).abs() < 1e-12 * tr);
        assert!((b.p_bh - bh).abs() < 1e-12 * bh);
        assert_eq!(b.p_fix, 8.0 * 6.8 + 130.0);
        assert_eq!(b.p_total, b.p_tr + b.p_ca + b.p_bh + b.p_fix);
        let b2 = s2(&s, &zero.clone().with_mode(PolicyMode::Random));
        assert!((b2.p_total - b.p_total).abs() < 1e-12 * b.p_total);
    }

    #[test]
    fn everything_cached() {
        let s = setup();
        let ones = CachingPolicy::ones(PolicyMode::Fractional, 20);
        let b = s1(&s, &ones, None);
        assert_eq!(b.p_bh, 0.0);
        let ca = s.coeff.c_ca * 20.0 * (s.content.l_b * 4.0 + s.content.l_e * 4.0);
        assert!((b.p_ca - ca).abs() < 1e-12 * ca);
        let b2 = s2(&s, &ones);
        assert_eq!(b2.p_bh, 0.0);
    }

    #[test]
    fn uniform_policy_by_hand() {
        // Q₁ = 1/4, Q₂ = 1/10 for every file: every l₀ term is 1.
        let s = setup();
        let ucp = CachingPolicy::new(PolicyMode::Fractional, vec![0.25; 20], vec![0.1; 20]);
        let b = s1(&s, &ucp, None);
        let (ps, pm) = (0.199_526_231_496_887_9, 19.952_623_149_688_8);
        let h20 = 3.597_739_657_143_682;
        let mut tr = 0.0;
        let mut bh = 0.0;
        let mut g_weighted = 0.0;
        for f in 1..=20 {
            let p = 1.0 / (f as f64 * h20);
            let g = 1.0 - (f - 1) as f64 / 19.0;
            tr += p * 4.7 * ((4.0 + 4.0 * g) * ps + (1.0 + g) * pm);
            bh += 5e-7 * p * (0.75 * 1e8 + g * 0.9 * 2e8);
            g_weighted += p * g;
        }
        let ca = 6.25e-12 * 20.0 * (0.25 * 1e8 * 4.0 + 0.1 * 2e8 * 4.0);
        assert!((b.p_tr - tr).abs() < 1e-9 * tr, "{} vs {tr}", b.p_tr);
        assert!((b.p_ca - ca).abs() < 1e-12 * ca);
        assert!((b.p_bh - bh).abs() < 1e-9 * bh);
        // Σ p_f g_HDV(f) is the expected HD share; sanity-check its range.
        assert!(g_weighted > 0.5 && g_weighted < 1.0);
    }

    #[test]
    fn uniform_random_policy_by_hand() {
        let s = setup();
        let t = CachingPolicy::new(PolicyMode::Random, vec![0.25; 20], vec![0.1; 20]);
        let b = s2(&s, &t);
        let (ps, pm) = (0.199_526_231_496_887_9, 19.952_623_149_688_8);
        let h20 = 3.597_739_657_143_682;
        let (mut tr, mut bh) = (0.0, 0.0);
        for f in 1..=20 {
            let p = 1.0 / (f as f64 * h20);
            let g = 1.0 - (f - 1) as f64 / 19.0;
            tr += p * 4.7 * ((4.0 * 0.25 + g * 4.0 * 0.1) * ps + (0.75 + g * 0.9) * pm);
            bh += 5e-7 * p * (0.75f64.powi(4) * 1e8 + g * 0.9f64.powi(4) * 2e8);
        }
        let ca = 6.25e-12 * 20.0 * (0.25 * 1e8 * 4.0 + 0.1 * 2e8 * 4.0);
        assert!((b.p_tr - tr).abs() < 1e-9 * tr);
        assert!((b.p_ca - ca).abs() < 1e-12 * ca);
        assert!((b.p_bh - bh).abs() < 1e-9 * bh);

        let literal = power_scheme2(
            &t,
            &s.profile,
            &s.net,
            &s.content,
            &s.coeff,
            &ModelOptions {
                el_caching_uses_bl_size: true,
            },
        )
        .unwrap();
        let ca_literal = 6.25e-12 * 20.0 * (0.25 * 1e8 * 4.0 + 0.1 * 1e8 * 4.0);
        assert!((literal.p_ca - ca_literal).abs() < 1e-12 * ca_literal);
    }

    #[test]
    fn full_base_layer_caching_removes_its_backhaul() {
        let s = setup();
        let t = CachingPolicy::new(PolicyMode::Random, vec![1.0; 20], vec![0.0; 20]);
        let b = s2(&s, &t);
        let el_only: f64 = (0..20).map(|f| 5e-7 * s.profile.p[f] * s.profile.g_hdv[f] * 2e8).sum();
        assert!((b.p_bh - el_only).abs() < 1e-9 * el_only);
    }

    #[test]
    fn binary_policies_agree_across_schemes() {
        let s = setup();
        let mut q1 = vec![0.0; 20];
        let mut q2 = vec![0.0; 20];
        for f in [0, 3, 7, 8, 19] {
            q1[f] = 1.0;
        }
        q2[2] = 1.0;
        q2[5] = 1.0;
        let p = CachingPolicy::new(PolicyMode::Fractional, q1, q2);
        let a = s1(&s, &p, None);
        let b = s2(&s, &p);
        for (x, y) in [(a.p_tr, b.p_tr), (a.p_ca, b.p_ca), (a.p_bh, b.p_bh), (a.p_fix, b.p_fix)] {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1.0));
        }
    }

    #[test]
    fn smoothing_converges_on_binary_policies() {
        let s = setup();
        let mut q1 = vec![0.0; 20];
        q1[..5].fill(1.0);
        let mut q2 = vec![0.0; 20];
        q2[..2].fill(1.0);
        let p = CachingPolicy::new(PolicyMode::Fractional, q1, q2);
        let exact = s1(&s, &p, None).p_tr;
        let smooth = s1(&s, &p, Some(1e-8)).p_tr;
        assert!((exact - smooth).abs() < 1e-6 * exact);
    }

    #[test]
    fn caching_trades_backhaul_for_storage() {
        let s = setup();
        let mut p = CachingPolicy::new(PolicyMode::Fractional, vec![0.2; 20], vec![0.3; 20]);
        for scheme in [1, 2] {
            let eval = |p: &CachingPolicy| if scheme == 1 { s1(&s, p, None) } else { s2(&s, p) };
            let before = eval(&p);
            p.q1[4] = 0.6;
            p.q2[0] = 0.9;
            let after = eval(&p);
            assert!(after.p_bh <= before.p_bh);
            assert!(after.p_ca >= before.p_ca);
            p.q1[4] = 0.2;
            p.q2[0] = 0.3;
        }
    }

    #[test]
    fn rejects_bad_shape() {
        let s = setup();
        let short = CachingPolicy::zeros(PolicyMode::Fractional, 19);
        assert!(power_scheme1(&short, &s.profile, &s.net, &s.content, &s.coeff, None).is_err());
        let zero = CachingPolicy::zeros(PolicyMode::Fractional, 20);
        assert!(power_scheme1(&zero, &s.profile, &s.net, &s.content, &s.coeff, Some(0.0)).is_err());
    }
}

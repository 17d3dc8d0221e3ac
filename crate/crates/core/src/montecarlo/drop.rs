use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use serde::{Deserialize, Serialize};

use super::ppp::{sample_ppp_with, Point, Region};
use crate::config::NetworkConfig;

/// One network realization around a user at the origin.
///
/// The PPP fields carry fading *powers* (`|h|² ~ Exp(1)`) because only their
/// aggregate interference matters. Cluster members carry complex gains
/// `h ~ CN(0, 1)` so that cooperative transmissions add coherently.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Drop {
    pub window: f64,
    pub mbs: Vec<Point>,
    pub mbs_fading: Vec<f64>,
    pub sbs: Vec<Point>,
    pub sbs_fading: Vec<f64>,
    /// `N₁` SBSs uniform in the disk of radius `a`.
    pub inner: Vec<Point>,
    pub inner_gain: Vec<(f64, f64)>,
    /// `N₂` SBSs uniform in the annulus `(a, b)`.
    pub outer: Vec<Point>,
    pub outer_gain: Vec<(f64, f64)>,
}

/// Per-drop SIRs: the nearest-MBS link, then base-layer SIRs for
/// `n = 1..=N₁` serving SBSs, then enhancement-layer SIRs for `n = 1..=N₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct DropSirs {
    pub mbs: f64,
    pub bl: Vec<f64>,
    pub el: Vec<f64>,
}

fn complex_gain<R: Rng>(rng: &mut R) -> (f64, f64) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    (s * re, s * im)
}

fn fading<R: Rng>(n: usize, rng: &mut R) -> Vec<f64> {
    (0..n).map(|_| Exp1.sample(rng)).collect()
}

/// `r^{-α}`, avoiding `powf` in the common `α = 4` case.
#[inline]
pub(crate) fn path_gain(r: f64, alpha: f64) -> f64 {
    if alpha == 4.0 {
        let r2 = r * r;
        1.0 / (r2 * r2)
    } else {
        r.powf(-alpha)
    }
}

impl Drop {
    /// Draws both PPP fields on the disk of radius `window` and the two
    /// fixed-size clusters.
    pub fn sample<R: Rng>(cfg: &NetworkConfig, window: f64, rng: &mut R) -> Self {
        let field = Region::disk(window);
        let mbs = sample_ppp_with(cfg.lambda_m, field, rng);
        let mbs_fading = fading(mbs.len(), rng);
        let sbs = sample_ppp_with(cfg.lambda_s, field, rng);
        let sbs_fading = fading(sbs.len(), rng);
        let disk = Region::disk(cfg.a);
        let inner: Vec<Point> = (0..cfg.n1).map(|_| disk.point(rng.random(), rng.random())).collect();
        let inner_gain = (0..cfg.n1).map(|_| complex_gain(rng)).collect();
        let ring = Region::annulus(cfg.a, cfg.b);
        let outer: Vec<Point> = (0..cfg.n2).map(|_| ring.point(rng.random(), rng.random())).collect();
        let outer_gain = (0..cfg.n2).map(|_| complex_gain(rng)).collect();
        Drop {
            window,
            mbs,
            mbs_fading,
            sbs,
            sbs_fading,
            inner,
            inner_gain,
            outer,
            outer_gain,
        }
    }

    /// SIRs of every link in this drop; `None` when there is no MBS to
    /// associate with.
    pub fn sirs(&self, cfg: &NetworkConfig) -> Option<DropSirs> {
        let nearest = (0..self.mbs.len()).min_by(|&i, &j| self.mbs[i].r.total_cmp(&self.mbs[j].r))?;

        let mut macro_total = 0.0;
        let mut macro_serving = 0.0;
        for (i, (p, g)) in self.mbs.iter().zip(&self.mbs_fading).enumerate() {
            let rx = cfg.p_m * g * path_gain(p.r, cfg.alpha_m);
            macro_total += rx;
            if i == nearest {
                macro_serving = rx;
            }
        }

        let (mut small_all, mut small_inside_a, mut small_in_ring) = (0.0, 0.0, 0.0);
        for (p, g) in self.sbs.iter().zip(&self.sbs_fading) {
            let rx = cfg.p_s * g * path_gain(p.r, cfg.alpha_s);
            small_all += rx;
            if p.r < cfg.a {
                small_inside_a += rx;
            } else if p.r < cfg.b {
                small_in_ring += rx;
            }
        }

        let mbs = macro_serving / (macro_total - macro_serving + small_all);
        let bl_interference = macro_total + small_all - small_inside_a;
        let el_interference = macro_total + small_all - small_in_ring;
        Some(DropSirs {
            mbs,
            bl: coherent_sirs(cfg, &self.inner, &self.inner_gain, bl_interference),
            el: coherent_sirs(cfg, &self.outer, &self.outer_gain, el_interference),
        })
    }
}

/// SIR with the first `n` cluster members transmitting, for each `n`.
fn coherent_sirs(cfg: &NetworkConfig, pts: &[Point], gains: &[(f64, f64)], interference: f64) -> Vec<f64> {
    let (mut re, mut im) = (0.0, 0.0);
    pts.iter()
        .zip(gains)
        .map(|(p, &(hr, hi))| {
            let amp = (cfg.p_s * path_gain(p.r, cfg.alpha_s)).sqrt();
            re += amp * hr;
            im += amp * hi;
            (re * re + im * im) / interference
        })
        .collect()
}

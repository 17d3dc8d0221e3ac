//! Monte-Carlo simulation of the two-tier network, used to validate the
//! analytic engine.
//!
//! Each drop samples both PPP fields on a disk of radius
//! [`window_radius`] around the user, plus the two fixed-size cooperative
//! clusters. Cluster members act only as the serving set; the interference
//! seen by each link is the same as in the analytic model:
//!
//! * macro link: every SBS of the field and every MBS except the nearest;
//! * base layer: the SBS field outside `a` and every MBS;
//! * enhancement layer: the SBS field inside `a` and beyond `b` and every MBS.
//!
//! One drop yields the SIR of all `1 + N₁ + N₂` links at once. Drops are
//! grouped into batches with their own ChaCha streams and reduced in batch
//! order, so results are bit-identical for any worker count.

mod drop;
mod ppp;

pub use drop::{Drop, DropSirs};
pub use ppp::{sample_ppp, sample_ppp_with, Point, Region};

use std::f64::consts::PI;
use std::io::Write;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytic::{Cluster, Provenance, RateTable};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::stats::{batch_rng, batches, Estimate, Moments};

/// Fewest conditioning drops accepted by a conditional-rate estimate.
pub const MIN_CONDITIONED: usize = 100;

/// `R = WINDOW_FACTOR / √(πλ)` puts `WINDOW_FACTOR²` points of density `λ`
/// inside the window on average.
const WINDOW_FACTOR: f64 = 30.0;

/// Radius of the simulated disk: large enough that on average 900 MBSs and
/// at least 900 SBSs fall inside, and never smaller than `10 b`.
pub fn window_radius(cfg: &NetworkConfig) -> f64 {
    let sparse = cfg.lambda_m.min(cfg.lambda_s);
    (WINDOW_FACTOR / (PI * sparse).sqrt()).max(10.0 * cfg.b)
}

/// A link whose SIR is recorded per drop.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Link {
    Mbs,
    /// Base layer served by the first `n` inner-cluster SBSs.
    Bl(usize),
    /// Enhancement layer served by the first `n` outer-cluster SBSs.
    El(usize),
}

impl Link {
    pub fn sbs(cluster: Cluster, n: usize) -> Self {
        match cluster {
            Cluster::Inner => Link::Bl(n),
            Cluster::Outer => Link::El(n),
        }
    }
}

/// SIRs of every link for every drop, stored row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SirSamples {
    pub n1: usize,
    pub n2: usize,
    pub seed: u64,
    /// Drops redrawn because the window held no MBS.
    pub resampled: usize,
    values: Vec<f64>,
}

impl SirSamples {
    fn stride(&self) -> usize {
        1 + self.n1 + self.n2
    }

    pub fn n_drops(&self) -> usize {
        self.values.len() / self.stride()
    }

    fn column_index(&self, link: Link) -> Result<usize> {
        match link {
            Link::Mbs => Ok(0),
            Link::Bl(n) if (1..=self.n1).contains(&n) => Ok(n),
            Link::El(n) if (1..=self.n2).contains(&n) => Ok(self.n1 + n),
            _ => Err(Error::domain(format!(
                "{link:?} is outside the simulated clusters (N1 = {}, N2 = {})",
                self.n1, self.n2
            ))),
        }
    }

    /// SIR of `link` in every drop.
    pub fn column(&self, link: Link) -> Result<impl Iterator<Item = f64> + '_> {
        let c = self.column_index(link)?;
        Ok(self.values.chunks_exact(self.stride()).map(move |row| row[c]))
    }

    /// Row of drop `i`: macro SIR, base-layer SIRs, enhancement-layer SIRs.
    pub fn row(&self, i: usize) -> &[f64] {
        let s = self.stride();
        &self.values[i * s..(i + 1) * s]
    }

    /// Fraction of drops with `SIR ≥ γ`, with its binomial standard error.
    pub fn success(&self, link: Link, gamma: f64) -> Result<Estimate> {
        let mut m = Moments::default();
        for sir in self.column(link)? {
            m.push(if sir >= gamma { 1.0 } else { 0.0 });
        }
        Ok(m.estimate(self.seed))
    }

    /// `W·E[log₂(1+SIR) | SIR ≥ γ]` over the drops meeting the threshold.
    pub fn conditional_rate(&self, link: Link, gamma: f64, w: f64) -> Result<Estimate> {
        let mut m = Moments::default();
        for sir in self.column(link)?.filter(|&s| s >= gamma) {
            m.push(w * (1.0 + sir).log2());
        }
        if m.n < MIN_CONDITIONED {
            return Err(Error::TooFewConditioned {
                got: m.n,
                need: MIN_CONDITIONED,
            });
        }
        Ok(m.estimate(self.seed))
    }

    /// Writes one line per drop: index, seed, then every SIR column.
    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        write!(out, "drop,seed,sir_m")?;
        for n in 1..=self.n1 {
            write!(out, ",sir_bl_{n}")?;
        }
        for n in 1..=self.n2 {
            write!(out, ",sir_el_{n}")?;
        }
        writeln!(out)?;
        for i in 0..self.n_drops() {
            write!(out, "{i},{}", self.seed)?;
            for v in self.row(i) {
                write!(out, ",{v:e}")?;
            }
            writeln!(out)?;
        }
        Ok(())
    }
}

/// Runs `n_drops` independent drops and records every link's SIR.
pub fn simulate(cfg: &NetworkConfig, n_drops: usize, seed: u64) -> Result<SirSamples> {
    cfg.validate()?;
    if n_drops == 0 {
        return Err(Error::domain("n_drops must be positive"));
    }
    let window = window_radius(cfg);
    let per_batch: Vec<(Vec<f64>, usize)> = batches(n_drops)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = batch_rng(seed, idx);
            let mut rows = Vec::with_capacity(len * (1 + cfg.n1 + cfg.n2));
            let mut resampled = 0;
            for _ in 0..len {
                let sirs = loop {
                    match Drop::sample(cfg, window, &mut rng).sirs(cfg) {
                        Some(s) => break s,
                        None => resampled += 1,
                    }
                };
                rows.push(sirs.mbs);
                rows.extend_from_slice(&sirs.bl);
                rows.extend_from_slice(&sirs.el);
            }
            (rows, resampled)
        })
        .collect();
    let mut values = Vec::with_capacity(n_drops * (1 + cfg.n1 + cfg.n2));
    let mut resampled = 0;
    for (rows, r) in per_batch {
        values.extend(rows);
        resampled += r;
    }
    if resampled > 0 {
        log::warn!("{resampled} drops had no MBS in the window and were redrawn");
    }
    Ok(SirSamples {
        n1: cfg.n1,
        n2: cfg.n2,
        seed,
        resampled,
        values,
    })
}

pub fn estimate_p_success_mbs(cfg: &NetworkConfig, gamma: f64, n_drops: usize, seed: u64) -> Result<Estimate> {
    simulate(cfg, n_drops, seed)?.success(Link::Mbs, gamma)
}

/// Success probability of a layer served by the first `n` SBSs of `cluster`.
pub fn estimate_p_success_sbs(
    cfg: &NetworkConfig,
    cluster: Cluster,
    gamma: f64,
    n: usize,
    n_drops: usize,
    seed: u64,
) -> Result<Estimate> {
    if n == 0 || n > cluster.size(cfg) {
        return Err(Error::domain(format!("need 1 <= n <= {}, got {n}", cluster.size(cfg))));
    }
    simulate(cfg, n_drops, seed)?.success(Link::sbs(cluster, n), gamma)
}

pub fn estimate_ergodic_rate(cfg: &NetworkConfig, link: Link, gamma: f64, n_drops: usize, seed: u64) -> Result<Estimate> {
    simulate(cfg, n_drops, seed)?.conditional_rate(link, gamma, cfg.w)
}

impl RateTable {
    /// Every conditional rate estimated from one set of drops.
    pub fn from_samples(cfg: &NetworkConfig, samples: &SirSamples) -> Result<Self> {
        let rate = |link, gamma| samples.conditional_rate(link, gamma, cfg.w).map(|e| e.mean);
        Ok(RateTable {
            r_m_bl: rate(Link::Mbs, cfg.gamma_bl)?,
            r_m_el: rate(Link::Mbs, cfg.gamma_el)?,
            r_s_bl: (1..=cfg.n1).map(|n| rate(Link::Bl(n), cfg.gamma_bl)).collect::<Result<_>>()?,
            r_s_el: (1..=cfg.n2).map(|n| rate(Link::El(n), cfg.gamma_el)).collect::<Result<_>>()?,
            provenance: Provenance::MonteCarlo {
                seed: samples.seed,
                n_drops: samples.n_drops(),
            },
        })
    }
}

/// Simulates and builds a [`RateTable`] from the drops.
pub fn rate_table_mc(cfg: &NetworkConfig, n_drops: usize, seed: u64) -> Result<RateTable> {
    RateTable::from_samples(cfg, &simulate(cfg, n_drops, seed)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinism_across_worker_counts() {
        let cfg = NetworkConfig::default();
        let n = 2 * crate::stats::BATCH + 5;
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| simulate(&cfg, n, 17).unwrap())
        };
        let one = run(1);
        let three = run(3);
        assert_eq!(one.values.len(), three.values.len());
        assert!(one.values.iter().zip(&three.values).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn link_bounds() {
        let cfg = NetworkConfig::default();
        let s = simulate(&cfg, 10, 1).unwrap();
        assert_eq!(s.n_drops(), 10);
        assert!(s.success(Link::Bl(0), 1.0).is_err());
        assert!(s.success(Link::El(cfg.n2 + 1), 1.0).is_err());
        assert!(estimate_p_success_sbs(&cfg, Cluster::Inner, 1.0, 5, 10, 1).is_err());
    }

    #[test]
    fn too_few_conditioned() {
        let cfg = NetworkConfig::default();
        let err = estimate_ergodic_rate(&cfg, Link::Mbs, 1e9, 200, 3).unwrap_err();
        assert!(matches!(err, Error::TooFewConditioned { need: MIN_CONDITIONED, .. }));
        assert!(err.is_numeric());
    }

    #[test]
    fn cooperation_raises_success() {
        // Serving sets are nested but phases are random, so the per-drop SIR
        // need not grow; the success rate should.
        let cfg = NetworkConfig::default();
        let s = simulate(&cfg, 4000, 2).unwrap();
        let p1 = s.success(Link::Bl(1), cfg.gamma_bl).unwrap().mean;
        let p4 = s.success(Link::Bl(4), cfg.gamma_bl).unwrap().mean;
        assert!(p4 > p1);
    }

    #[test]
    fn standard_error_shrinks_like_inverse_root() {
        let cfg = NetworkConfig::default();
        let small = estimate_p_success_mbs(&cfg, 1.0, 1000, 4).unwrap();
        let large = estimate_p_success_mbs(&cfg, 1.0, 16000, 4).unwrap();
        let ratio = small.std_error / large.std_error;
        assert!((ratio - 4.0).abs() < 0.6, "{ratio}");
    }

    #[test]
    fn dump_has_one_line_per_drop() {
        let cfg = NetworkConfig::default();
        let s = simulate(&cfg, 7, 5).unwrap();
        let mut buf = Vec::new();
        s.write_dump(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let lines: Vec<_> = text.lines().collect();
        assert_eq!(lines.len(), 8);
        assert_eq!(lines[0].split(',').count(), 3 + cfg.n1 + cfg.n2);
        assert!(lines[1].starts_with("0,5,"));
    }
}

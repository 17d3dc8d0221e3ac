use serde::{Deserialize, Serialize};

use super::{ergodic_rate_mbs_with, ergodic_rate_sbs, AnalyticOptions, Cluster};
use crate::config::NetworkConfig;
use crate::error::Result;

/// Where the rates in a [`RateTable`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum Provenance {
    Analytic {
        seed: u64,
        position_samples: usize,
    },
    MonteCarlo {
        seed: u64,
        n_drops: usize,
    },
    /// Hand-specified rates (tests, what-if studies).
    Manual,
}

/// Ergodic service rates consumed by the sum-rate models, bits/s.
///
/// `r_s_bl[n - 1]` is the base-layer rate with `n` cooperating SBSs, for
/// `n = 1..=N₁`; likewise `r_s_el` for the enhancement layer.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateTable {
    pub r_m_bl: f64,
    pub r_m_el: f64,
    pub r_s_bl: Vec<f64>,
    pub r_s_el: Vec<f64>,
    pub provenance: Provenance,
}

impl RateTable {
    /// Base-layer SBS rate with `n` serving SBSs; zero when `n = 0`.
    pub fn s_bl(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.r_s_bl[n - 1]
        }
    }

    pub fn s_el(&self, n: usize) -> f64 {
        if n == 0 {
            0.0
        } else {
            self.r_s_el[n - 1]
        }
    }

    /// Rate at full cluster cooperation (`N₁` resp. `N₂` serving SBSs).
    pub fn s_bl_full(&self) -> f64 {
        self.s_bl(self.r_s_bl.len())
    }

    pub fn s_el_full(&self) -> f64 {
        self.s_el(self.r_s_el.len())
    }

    pub fn entry_count(&self) -> usize {
        2 + self.r_s_bl.len() + self.r_s_el.len()
    }

    /// A table with the same rate for every source; useful for isolating
    /// the power model.
    pub fn uniform(rate: f64, n1: usize, n2: usize) -> Self {
        RateTable {
            r_m_bl: rate,
            r_m_el: rate,
            r_s_bl: vec![rate; n1],
            r_s_el: vec![rate; n2],
            provenance: Provenance::Manual,
        }
    }

    /// Returns every entry scaled by `k`.
    pub fn scaled(&self, k: f64) -> Self {
        RateTable {
            r_m_bl: k * self.r_m_bl,
            r_m_el: k * self.r_m_el,
            r_s_bl: self.r_s_bl.iter().map(|r| k * r).collect(),
            r_s_el: self.r_s_el.iter().map(|r| k * r).collect(),
            provenance: self.provenance,
        }
    }
}

/// Evaluates every rate the sum-rate models need.
pub fn build_rate_table(cfg: &NetworkConfig, opts: &AnalyticOptions) -> Result<RateTable> {
    let r_m_bl = ergodic_rate_mbs_with(cfg, cfg.gamma_bl, opts.averaging, opts.route)?;
    let r_m_el = ergodic_rate_mbs_with(cfg, cfg.gamma_el, opts.averaging, opts.route)?;
    let r_s_bl = (1..=cfg.n1)
        .map(|n| ergodic_rate_sbs(cfg, Cluster::Inner, cfg.gamma_bl, n, opts).map(|e| e.mean))
        .collect::<Result<Vec<_>>>()?;
    let r_s_el = (1..=cfg.n2)
        .map(|n| ergodic_rate_sbs(cfg, Cluster::Outer, cfg.gamma_el, n, opts).map(|e| e.mean))
        .collect::<Result<Vec<_>>>()?;
    Ok(RateTable {
        r_m_bl,
        r_m_el,
        r_s_bl,
        r_s_el,
        provenance: Provenance::Analytic {
            seed: opts.seed,
            position_samples: opts.position_samples,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_shape_and_determinism() {
        let cfg = NetworkConfig::default();
        let opts = AnalyticOptions {
            position_samples: 3_000,
            ..AnalyticOptions::default()
        };
        let t = build_rate_table(&cfg, &opts).unwrap();
        assert_eq!(t.entry_count(), 10);
        let again = build_rate_table(&cfg, &opts).unwrap();
        assert_eq!(t, again);
        let floor_bl = cfg.w * (1.0 + cfg.gamma_bl).log2();
        let floor_el = cfg.w * (1.0 + cfg.gamma_el).log2();
        assert!(t.r_m_bl >= floor_bl && t.r_s_bl.iter().all(|&r| r >= floor_bl));
        assert!(t.r_m_el >= floor_el && t.r_s_el.iter().all(|&r| r >= floor_el));
        assert_eq!(t.s_bl(0), 0.0);
        assert_eq!(t.s_bl_full(), t.r_s_bl[3]);
    }
}

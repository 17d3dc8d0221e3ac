//! Request popularity (Zipf) and SD/HD viewing preference.

use serde::{Deserialize, Serialize};

use crate::config::ContentConfig;
use crate::error::{Error, Result};

/// Zipf request probabilities for files ranked `1..=f_count`.
///
/// The normalizer is summed from the smallest term upwards.
pub fn zipf(f_count: usize, zipf_alpha: f64) -> Vec<f64> {
    assert!(f_count >= 1, "zipf needs at least one file");
    let weights: Vec<f64> = (1..=f_count).map(|f| (f as f64).powf(-zipf_alpha)).collect();
    let norm: f64 = weights.iter().rev().sum();
    weights.into_iter().map(|w| w / norm).collect()
}

/// `(g_sdv, g_hdv)` for file `f` (1-based) in a catalog of `f_count` files.
pub fn quality_preference(f: usize, f_count: usize) -> Result<(f64, f64)> {
    if f_count < 2 || f == 0 || f > f_count {
        return Err(Error::domain(format!(
            "file index {f} outside 1..={f_count} (catalog needs at least 2 files)"
        )));
    }
    let sdv = (f - 1) as f64 / (f_count - 1) as f64;
    Ok((sdv, 1.0 - sdv))
}

/// Request and quality-preference vectors for one catalog, indexed from 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PopularityProfile {
    pub p: Vec<f64>,
    pub g_sdv: Vec<f64>,
    pub g_hdv: Vec<f64>,
}

impl PopularityProfile {
    pub fn new(content: &ContentConfig) -> Result<Self> {
        content.validate()?;
        let f_count = content.f_count;
        let p = zipf(f_count, content.zipf_alpha);
        let (g_sdv, g_hdv) = (1..=f_count)
            .map(|f| quality_preference(f, f_count))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .unzip();
        Ok(PopularityProfile { p, g_sdv, g_hdv })
    }

    /// A profile from explicit vectors; used for synthetic test catalogs.
    pub fn from_parts(p: Vec<f64>, g_hdv: Vec<f64>) -> Self {
        let g_sdv = g_hdv.iter().map(|g| 1.0 - g).collect();
        PopularityProfile { p, g_sdv, g_hdv }
    }

    pub fn len(&self) -> usize {
        self.p.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p.is_empty()
    }
}

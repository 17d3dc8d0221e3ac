//! Scenario description: physical layer, content catalog, power constants.
//!
//! Everything downstream consumes one immutable [`Scenario`]. Constructors
//! never validate implicitly; call [`Scenario::validate`] (the file loader
//! does) before handing a hand-built scenario to the analytic engine.

mod file;
mod policy;

pub use file::{load_scenario, parse_scenario};
pub use policy::{CachingPolicy, PolicyMode, FEASIBILITY_TOL};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Converts a power in dBm to watts.
pub fn dbm_to_watts(dbm: f64) -> f64 {
    10f64.powf(dbm / 10.0) * 1e-3
}

/// Converts a power in watts to dBm.
pub fn watts_to_dbm(watts: f64) -> f64 {
    10.0 * (watts * 1e3).log10()
}

/// Converts a ratio in dB to a linear ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

/// Physical-layer constants of the two-tier network.
///
/// Densities are in points per m², powers in watts, distances in metres,
/// bandwidth in Hz and thresholds are linear SIR values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NetworkConfig {
    pub lambda_m: f64,
    pub lambda_s: f64,
    pub p_m: f64,
    pub p_s: f64,
    pub alpha_m: f64,
    pub alpha_s: f64,
    /// Radius of the inner (base-layer) cluster disk.
    pub a: f64,
    /// Outer radius of the enhancement-layer cluster annulus.
    pub b: f64,
    pub n1: usize,
    pub n2: usize,
    pub w: f64,
    pub gamma_bl: f64,
    pub gamma_el: f64,
}

impl Default for NetworkConfig {
    fn default() -> Self {
        use std::f64::consts::PI;
        NetworkConfig {
            lambda_m: 1.0 / (250.0 * 250.0 * PI),
            lambda_s: 1.0 / (100.0 * 100.0 * PI),
            p_m: dbm_to_watts(43.0),
            p_s: dbm_to_watts(23.0),
            alpha_m: 4.0,
            alpha_s: 4.0,
            a: 50.0,
            b: 100.0,
            n1: 4,
            n2: 4,
            w: 10e6,
            gamma_bl: db_to_linear(10.0),
            gamma_el: db_to_linear(5.0),
        }
    }
}

impl NetworkConfig {
    pub fn validate(&self) -> Result<()> {
        positive("lambda_m", self.lambda_m)?;
        positive("lambda_s", self.lambda_s)?;
        positive("p_m", self.p_m)?;
        positive("p_s", self.p_s)?;
        if !(self.alpha_m > 2.0) || !self.alpha_m.is_finite() {
            return Err(Error::validation("alpha_m", "path-loss exponent must exceed 2"));
        }
        if !(self.alpha_s > 2.0) || !self.alpha_s.is_finite() {
            return Err(Error::validation("alpha_s", "path-loss exponent must exceed 2"));
        }
        positive("a", self.a)?;
        positive("b", self.b)?;
        if !(self.a < self.b) {
            return Err(Error::validation(
                "a",
                format!("inner radius a={} must be below outer radius b={}", self.a, self.b),
            ));
        }
        positive("bandwidth_hz", self.w)?;
        positive("gamma_bl", self.gamma_bl)?;
        positive("gamma_el", self.gamma_el)?;
        Ok(())
    }

    /// True when both tiers use the path-loss exponent 4, which unlocks the
    /// arccot closed forms.
    pub fn is_alpha4(&self) -> bool {
        self.alpha_m == 4.0 && self.alpha_s == 4.0
    }
}

/// Content catalog and cache dimensions. Sizes are in bits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ContentConfig {
    pub f_count: usize,
    pub l_b: f64,
    pub l_e: f64,
    pub m_cache: f64,
    pub zipf_alpha: f64,
}

impl Default for ContentConfig {
    fn default() -> Self {
        ContentConfig {
            f_count: 20,
            l_b: 100e6,
            l_e: 200e6,
            m_cache: 500e6,
            zipf_alpha: 1.0,
        }
    }
}

impl ContentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.f_count < 2 {
            return Err(Error::validation("f_count", "catalog needs at least 2 files"));
        }
        non_negative("l_b", self.l_b)?;
        non_negative("l_e", self.l_e)?;
        non_negative("m_cache", self.m_cache)?;
        non_negative("zipf_alpha", self.zipf_alpha)?;
        Ok(())
    }

    /// Number of base layers one SBS can hold, clamped to the catalog size.
    pub fn m_b(&self) -> usize {
        layers_in_cache(self.m_cache, self.l_b, self.f_count)
    }

    /// Number of enhancement layers one SBS can hold, clamped to the catalog size.
    pub fn m_e(&self) -> usize {
        layers_in_cache(self.m_cache, self.l_e, self.f_count)
    }
}

fn layers_in_cache(cache: f64, layer: f64, f_count: usize) -> usize {
    if layer <= 0.0 {
        // zero-size layers always fit
        return f_count;
    }
    let n = (cache / layer).floor();
    if n >= f_count as f64 {
        f_count
    } else {
        n as usize
    }
}

/// Power-model constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerCoefficients {
    /// Caching coefficient, W/bit.
    pub c_ca: f64,
    /// Backhaul coefficient, W/bit.
    pub c_bh: f64,
    pub zeta_s: f64,
    pub zeta_m: f64,
    pub p_s_fix: f64,
    pub p_m_fix: f64,
}

impl Default for PowerCoefficients {
    fn default() -> Self {
        PowerCoefficients {
            c_ca: 6.25e-12,
            c_bh: 5e-7,
            zeta_s: 4.7,
            zeta_m: 4.7,
            p_s_fix: 6.8,
            p_m_fix: 130.0,
        }
    }
}

impl PowerCoefficients {
    pub fn validate(&self) -> Result<()> {
        non_negative("c_ca", self.c_ca)?;
        non_negative("c_bh", self.c_bh)?;
        non_negative("zeta_s", self.zeta_s)?;
        non_negative("zeta_m", self.zeta_m)?;
        non_negative("p_s_fix", self.p_s_fix)?;
        non_negative("p_m_fix", self.p_m_fix)?;
        if self.c_ca >= self.c_bh {
            log::warn!(
                "caching coefficient c_ca={} is not below backhaul coefficient c_bh={}",
                self.c_ca,
                self.c_bh
            );
        }
        Ok(())
    }
}

/// Switches for model variants that are not plain constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ModelOptions {
    /// Charge Scheme II enhancement-layer caching power with the base-layer
    /// size instead of the enhancement-layer size.
    pub el_caching_uses_bl_size: bool,
}

/// One complete, validated scenario.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Scenario {
    pub network: NetworkConfig,
    pub content: ContentConfig,
    pub power: PowerCoefficients,
    pub options: ModelOptions,
}

impl Scenario {
    pub fn validate(&self) -> Result<()> {
        self.network.validate()?;
        self.content.validate()?;
        self.power.validate()
    }
}

fn positive(key: &str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(key, format!("must be positive and finite, got {v}")))
    }
}

fn non_negative(key: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::validation(key, format!("must be non-negative and finite, got {v}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn table_defaults() {
        let s = Scenario::default();
        s.validate().unwrap();
        assert!((s.network.p_s - 0.199_526_231).abs() < 1e-8);
        assert!((s.network.p_m - 19.952_623_15).abs() < 1e-7);
        assert_eq!(s.content.m_b(), 5);
        assert_eq!(s.content.m_e(), 2);
    }

    #[test]
    fn cache_counts_clamp_to_catalog() {
        let c = ContentConfig {
            m_cache: 1e12,
            ..ContentConfig::default()
        };
        assert_eq!(c.m_b(), c.f_count);
        assert_eq!(c.m_e(), c.f_count);
        let c = ContentConfig {
            m_cache: 0.0,
            ..ContentConfig::default()
        };
        assert_eq!((c.m_b(), c.m_e()), (0, 0));
    }

    #[test]
    fn radius_order_enforced() {
        let net = NetworkConfig {
            a: 100.0,
            b: 50.0,
            ..NetworkConfig::default()
        };
        match net.validate() {
            Err(Error::Validation { key, .. }) => assert_eq!(key, "a"),
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn exponent_at_two_rejected() {
        let net = NetworkConfig {
            alpha_s: 2.0,
            ..NetworkConfig::default()
        };
        assert!(net.validate().is_err());
    }

    proptest! {
        #[test]
        fn dbm_round_trip(x in 1e-9f64..1e6) {
            let back = dbm_to_watts(watts_to_dbm(x));
            prop_assert!(((back - x) / x).abs() < 1e-12);
        }

        #[test]
        fn floor_definition(m in 0.0f64..5e9, lb in 1e6f64..5e8) {
            let c = ContentConfig { m_cache: m, l_b: lb, f_count: 1000, ..ContentConfig::default() };
            prop_assert_eq!(c.m_b(), ((m / lb).floor() as usize).min(1000));
        }
    }
}

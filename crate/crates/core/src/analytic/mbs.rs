use std::f64::consts::{LN_2, PI};

use super::{check_threshold, threshold_excess, ConditionalAveraging, GRoute, Links, FIRST_PANEL, RADIAL_TAIL_REL};
use crate::config::NetworkConfig;
use crate::error::{Error, Result};
use crate::quad::{integrate_tail, QuadOptions};

const RADIAL: QuadOptions = QuadOptions {
    abs_tol: 1e-13,
    rel_tol: 1e-10,
    max_panels: 400,
};

/// Nearest-MBS distance for the normalized variable `y = πλ_M x²`, under which
/// the distance density becomes `e^{-y}`.
fn distance(cfg: &NetworkConfig, y: f64) -> f64 {
    (y / (PI * cfg.lambda_m)).sqrt()
}

/// `P(SIR_M ≥ γ)` by radial quadrature over the nearest-MBS distance.
pub fn p_success_mbs(cfg: &NetworkConfig, gamma: f64) -> Result<f64> {
    p_success_mbs_with(cfg, gamma, GRoute::Auto)
}

pub fn p_success_mbs_with(cfg: &NetworkConfig, gamma: f64, route: GRoute) -> Result<f64> {
    check_threshold(gamma)?;
    let links = Links::new(cfg, route)?;
    let r = integrate_tail(
        |y| (-y + links.log_p_mbs(gamma, distance(cfg, y))).exp(),
        0.0,
        FIRST_PANEL,
        RADIAL_TAIL_REL,
        RADIAL,
    )?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Closed form of `P(SIR_M ≥ γ)` when both path-loss exponents equal 4.
pub fn p_success_mbs_closed(cfg: &NetworkConfig, gamma: f64) -> Result<f64> {
    check_threshold(gamma)?;
    if !cfg.is_alpha4() {
        return Err(Error::domain(format!(
            "closed form needs alpha_m = alpha_s = 4, got {} and {}",
            cfg.alpha_m, cfg.alpha_s
        )));
    }
    let root = gamma.sqrt();
    let arccot = (root).atan(); // arccot(γ^{-1/2}) = arctan(γ^{1/2})
    let penalty = root * (PI / 2.0 * cfg.lambda_s * (cfg.p_s / cfg.p_m).sqrt() + cfg.lambda_m * arccot);
    Ok(1.0 / (1.0 + penalty / cfg.lambda_m))
}

/// Ergodic service rate of the nearest MBS, `W·E[log₂(1+SIR_M) | SIR_M ≥ γ]`,
/// in bits/s.
pub fn ergodic_rate_mbs(cfg: &NetworkConfig, gamma: f64) -> Result<f64> {
    ergodic_rate_mbs_with(cfg, gamma, ConditionalAveraging::default(), GRoute::Auto)
}

pub fn ergodic_rate_mbs_with(
    cfg: &NetworkConfig,
    gamma: f64,
    averaging: ConditionalAveraging,
    route: GRoute,
) -> Result<f64> {
    check_threshold(gamma)?;
    if cfg.w == 0.0 {
        return Ok(0.0);
    }
    let links = Links::new(cfg, route)?;
    let floor = cfg.w * (1.0 + gamma).log2();
    let excess = |y: f64| {
        let x = distance(cfg, y);
        threshold_excess(|t| links.log_p_mbs(t, x), gamma).unwrap_or(f64::NAN)
    };
    let mean_excess = match averaging {
        ConditionalAveraging::PerPosition => {
            integrate_tail(|y| (-y).exp() * excess(y), 0.0, FIRST_PANEL, RADIAL_TAIL_REL, RADIAL)?.value
        }
        ConditionalAveraging::SuccessWeighted => {
            let num = integrate_tail(
                |y| (-y + links.log_p_mbs(gamma, distance(cfg, y))).exp() * excess(y),
                0.0,
                FIRST_PANEL,
                RADIAL_TAIL_REL,
                RADIAL,
            )?
            .value;
            let den = integrate_tail(
                |y| (-y + links.log_p_mbs(gamma, distance(cfg, y))).exp(),
                0.0,
                FIRST_PANEL,
                RADIAL_TAIL_REL,
                RADIAL,
            )?
            .value;
            num / den
        }
    };
    if !mean_excess.is_finite() {
        return Err(Error::NonConvergence {
            error_estimate: f64::NAN,
            tolerance: RADIAL_TAIL_REL,
        });
    }
    Ok(floor + cfg.w / LN_2 * mean_excess.max(0.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::db_to_linear;

    #[test]
    fn vanishing_threshold() {
        let cfg = NetworkConfig::default();
        assert!((p_success_mbs(&cfg, 1e-15).unwrap() - 1.0).abs() < 1e-6);
        assert!((p_success_mbs_closed(&cfg, 1e-15).unwrap() - 1.0).abs() < 1e-6);
    }

    #[test]
    fn closed_form_without_small_cells() {
        // λ_S → 0 is not a valid config; take it tiny instead.
        let cfg = NetworkConfig {
            lambda_s: 1e-300,
            ..NetworkConfig::default()
        };
        let v = p_success_mbs_closed(&cfg, 1.0).unwrap();
        assert!((v - 1.0 / (1.0 + PI / 4.0)).abs() < 1e-12);
        assert!((v - 0.5601).abs() < 1e-4);
    }

    #[test]
    fn closed_form_needs_alpha4() {
        let cfg = NetworkConfig {
            alpha_m: 3.5,
            ..NetworkConfig::default()
        };
        assert!(p_success_mbs_closed(&cfg, 1.0).is_err());
    }

    #[test]
    fn general_integral_matches_closed_form() {
        let cfg = NetworkConfig::default();
        for db in [0.0, 5.0, 10.0, 15.0, 20.0] {
            let g = db_to_linear(db);
            let closed = p_success_mbs_closed(&cfg, g).unwrap();
            let general = p_success_mbs_with(&cfg, g, GRoute::Quadrature).unwrap();
            assert!(((general - closed) / closed).abs() < 1e-4, "{db} dB: {general} vs {closed}");
        }
    }

    #[test]
    fn monotone_in_threshold_and_small_cells() {
        let cfg = NetworkConfig::default();
        let grid: Vec<f64> = (0..=20).map(|d| p_success_mbs(&cfg, db_to_linear(d as f64)).unwrap()).collect();
        assert!(grid.windows(2).all(|w| w[1] <= w[0]));
        let g = db_to_linear(10.0);
        let base = p_success_mbs(&cfg, g).unwrap();
        let louder = NetworkConfig { p_s: 2.0 * cfg.p_s, ..cfg.clone() };
        let denser = NetworkConfig { lambda_s: 2.0 * cfg.lambda_s, ..cfg.clone() };
        assert!(p_success_mbs(&louder, g).unwrap() < base);
        assert!(p_success_mbs(&denser, g).unwrap() < base);
    }

    #[test]
    fn rate_floor_and_zero_bandwidth() {
        let cfg = NetworkConfig::default();
        for db in [0.0, 10.0, 20.0] {
            let g = db_to_linear(db);
            let floor = cfg.w * (1.0 + g).log2();
            for avg in [ConditionalAveraging::SuccessWeighted, ConditionalAveraging::PerPosition] {
                assert!(ergodic_rate_mbs_with(&cfg, g, avg, GRoute::Auto).unwrap() >= floor);
            }
        }
        let silent = NetworkConfig { w: 0.0, ..cfg };
        assert_eq!(ergodic_rate_mbs(&silent, 10.0).unwrap(), 0.0);
    }

    #[test]
    fn weighting_raises_the_conditional_mean() {
        let cfg = NetworkConfig::default();
        let g = db_to_linear(10.0);
        let weighted = ergodic_rate_mbs_with(&cfg, g, ConditionalAveraging::SuccessWeighted, GRoute::Auto).unwrap();
        let plain = ergodic_rate_mbs_with(&cfg, g, ConditionalAveraging::PerPosition, GRoute::Auto).unwrap();
        assert!(weighted > plain);
    }
}

//! Energy efficiency of caching two-layer scalable video at small cells that
//! serve users cooperatively beneath a macro tier.
//!
//! - [`analytic`]: success probabilities and ergodic rates from stochastic
//!   geometry, and the [`analytic::RateTable`] the energy model consumes.
//! - [`montecarlo`]: a network-drop simulator that estimates the same
//!   quantities independently.
//! - [`power`] and [`objective`]: power draw and bits-per-joule of fractional
//!   (Scheme I) and random (Scheme II) caching policies.
//! - [`optimizer`]: projected gradient ascent over feasible policies.
//! - [`baselines`]: most-popular, uniform and independent random placement.
//!
//! ```
//! use svc_ee::analytic::{p_success_mbs, p_success_mbs_closed};
//! use svc_ee::config::{db_to_linear, NetworkConfig};
//!
//! let net = NetworkConfig::default();
//! let p = p_success_mbs(&net, db_to_linear(0.0)).unwrap();
//! assert!((p - p_success_mbs_closed(&net, db_to_linear(0.0)).unwrap()).abs() < 1e-6);
//! assert!(p > 0.3 && p < 0.4);
//! ```

// `!(x > 0.0)` is how validation rejects NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analytic;
pub mod baselines;
pub mod config;
pub mod error;
pub mod montecarlo;
pub mod objective;
pub mod optimizer;
pub mod popularity;
pub mod power;
pub mod quad;
pub mod stats;

pub use error::{Error, Result};

pub mod analyze;
pub mod compare;
pub mod optimize;
pub mod simulate;
pub mod validate;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;
use svc_ee::analytic::{build_rate_table, AnalyticOptions, Provenance, RateTable};
use svc_ee::config::{linear_to_db, load_scenario, NetworkConfig, Scenario};
use svc_ee::montecarlo::rate_table_mc;

use crate::output::{OutputDir, Roles, Row};
use crate::GlobalArgs;

/// Threshold grid shared by `validate`, `analyze` and `simulate`, in dB.
pub const DEFAULT_GAMMA_DB: [f64; 5] = [0.0, 5.0, 10.0, 15.0, 20.0];

pub fn load(g: &GlobalArgs) -> Result<Scenario> {
    let scenario = match &g.config {
        Some(path) => load_scenario(path)?,
        None => Scenario::default(),
    };
    scenario.validate()?;
    if !(g.theta > 0.0 && g.theta.is_finite()) {
        return Err(svc_ee::Error::Validation {
            key: "theta".into(),
            reason: format!("must be positive, got {}", g.theta),
        }
        .into());
    }
    Ok(scenario)
}

pub fn analytic_options(g: &GlobalArgs) -> AnalyticOptions {
    AnalyticOptions {
        position_samples: g.samples,
        seed: g.seed,
        ..AnalyticOptions::default()
    }
}

/// Where the optimizing commands take their rate table from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RateSource {
    Analytic,
    MonteCarlo,
}

pub fn rate_table(net: &NetworkConfig, g: &GlobalArgs, source: RateSource) -> Result<RateTable> {
    Ok(match source {
        RateSource::Analytic => build_rate_table(net, &analytic_options(g))?,
        RateSource::MonteCarlo => rate_table_mc(net, g.drops, g.seed)?,
    })
}

pub fn record_globals(out: &mut OutputDir, g: &GlobalArgs) {
    out.param("config", g.config.as_ref().map(|p| p.display().to_string()));
    out.param("seed", g.seed);
    out.param("drops", g.drops);
    out.param("theta", g.theta);
    out.param("samples", g.samples);
}

#[derive(Debug, Serialize)]
pub struct SuccessRow {
    pub quantity: &'static str,
    pub gamma_db: f64,
    pub n: usize,
    pub value: f64,
    pub std_error: f64,
}

impl Row for SuccessRow {
    const HEADER: &'static [&'static str] = &["quantity", "gamma_db", "n", "value", "std_error"];
}

pub fn success_roles() -> Roles {
    Roles {
        x: "gamma_db",
        y: vec!["value"],
        error: Some("std_error"),
        group: vec!["quantity", "n"],
    }
}

#[derive(Debug, Serialize)]
struct RateRow {
    link: &'static str,
    n: usize,
    gamma_db: f64,
    rate_bps: f64,
    source: &'static str,
}

impl Row for RateRow {
    const HEADER: &'static [&'static str] = &["link", "n", "gamma_db", "rate_bps", "source"];
}

pub fn write_rate_table(out: &mut OutputDir, table: &RateTable, net: &NetworkConfig) -> Result<()> {
    let source = match table.provenance {
        Provenance::Analytic { .. } => "analytic",
        Provenance::MonteCarlo { .. } => "monte-carlo",
        Provenance::Manual => "manual",
    };
    let (bl_db, el_db) = (linear_to_db(net.gamma_bl), linear_to_db(net.gamma_el));
    let mut rows = vec![
        RateRow { link: "mbs_bl", n: 1, gamma_db: bl_db, rate_bps: table.r_m_bl, source },
        RateRow { link: "mbs_el", n: 1, gamma_db: el_db, rate_bps: table.r_m_el, source },
    ];
    for (i, &r) in table.r_s_bl.iter().enumerate() {
        rows.push(RateRow { link: "sbs_bl", n: i + 1, gamma_db: bl_db, rate_bps: r, source });
    }
    for (i, &r) in table.r_s_el.iter().enumerate() {
        rows.push(RateRow { link: "sbs_el", n: i + 1, gamma_db: el_db, rate_bps: r, source });
    }
    let roles = Roles {
        x: "n",
        y: vec!["rate_bps"],
        error: None,
        group: vec!["link"],
    };
    out.write_csv("rate_table.csv", "ergodic service rates by link and serving-set size", roles, &rows)?;
    Ok(())
}

use anyhow::{bail, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use svc_ee::analytic::RateTable;
use svc_ee::baselines::{icp_expected_ee, mpcp_policy, ucp_policy};
use svc_ee::config::{db_to_linear, dbm_to_watts, PolicyMode, Scenario};
use svc_ee::objective::{ee_exact, ee_value, ObjectiveContext};

use super::optimize::{solve, Init, SolverArgs};
use super::{load, rate_table, record_globals};
use crate::output::{OutputDir, Roles, Row};
use crate::{GlobalArgs, Outcome};

/// The scenario parameter being swept. Grid values use the units of the
/// matching config key: dBm, dB, bits, or the bare skewness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
#[value(rename_all = "snake_case")]
pub enum Sweep {
    PS,
    GammaBl,
    CacheSize,
    ZipfAlpha,
}

impl Sweep {
    fn default_grid(self) -> Vec<f64> {
        match self {
            Sweep::PS => vec![13.0, 18.0, 23.0, 28.0, 33.0],
            Sweep::GammaBl => vec![0.0, 5.0, 10.0, 15.0, 20.0],
            Sweep::CacheSize => vec![0.0, 250e6, 500e6, 1e9, 2e9],
            Sweep::ZipfAlpha => vec![0.2, 0.6, 1.0, 1.4, 1.8],
        }
    }

    fn name(self) -> &'static str {
        match self {
            Sweep::PS => "p_s_dbm",
            Sweep::GammaBl => "gamma_bl_db",
            Sweep::CacheSize => "m_cache_bits",
            Sweep::ZipfAlpha => "zipf_alpha",
        }
    }

    /// Whether the rate table depends on the swept parameter.
    fn moves_rates(self) -> bool {
        matches!(self, Sweep::PS | Sweep::GammaBl)
    }

    fn apply(self, s: &mut Scenario, value: f64) {
        match self {
            Sweep::PS => s.network.p_s = dbm_to_watts(value),
            Sweep::GammaBl => s.network.gamma_bl = db_to_linear(value),
            Sweep::CacheSize => s.content.m_cache = value,
            Sweep::ZipfAlpha => s.content.zipf_alpha = value,
        }
    }
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long, value_enum)]
    pub sweep: Sweep,
    /// Comma-separated grid; each sweep has a default.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Placements averaged for the independent-random baseline.
    #[arg(long, default_value_t = 1000)]
    pub icp_realizations: usize,
    #[command(flatten)]
    pub solver: SolverArgs,
}

#[derive(Debug, Serialize)]
struct CompareRow {
    sweep: &'static str,
    value: f64,
    policy: &'static str,
    scheme: u8,
    ee: f64,
    std_error: f64,
    converged: Option<bool>,
}

impl Row for CompareRow {
    const HEADER: &'static [&'static str] = &["sweep", "value", "policy", "scheme", "ee", "std_error", "converged"];
}

pub fn run(g: &GlobalArgs, args: &CompareArgs) -> Result<Outcome> {
    let base = load(g)?;
    let grid = args.grid.clone().unwrap_or_else(|| args.sweep.default_grid());
    if grid.is_empty() || grid.iter().any(|v| !v.is_finite()) {
        bail!(svc_ee::Error::Validation {
            key: "grid".into(),
            reason: "needs at least one finite value".into(),
        });
    }
    let settings = args.solver.settings(g);
    let sweep = args.sweep.name();
    let mut rows = Vec::new();
    let mut cached: Option<RateTable> = None;
    for &value in &grid {
        let mut scenario = base.clone();
        args.sweep.apply(&mut scenario, value);
        scenario.validate()?;
        let rates = match &cached {
            Some(t) if !args.sweep.moves_rates() => t.clone(),
            _ => {
                let t = rate_table(&scenario.network, g, args.solver.rates)?;
                cached = Some(t.clone());
                t
            }
        };
        let ctx = ObjectiveContext::new(&scenario, rates, g.theta)?;
        log::info!("{sweep} = {value}");
        let mut push = |policy, scheme, ee, std_error, converged| {
            rows.push(CompareRow {
                sweep,
                value,
                policy,
                scheme,
                ee,
                std_error,
                converged,
            })
        };

        let (p1, t1) = solve(&scenario, &ctx, 1, Init::Uniform, &settings)?;
        push("scheme1", 1, ee_value(&p1, &ctx)?, 0.0, Some(t1.converged()));
        push("scheme1_exact_l0", 1, ee_exact(&p1, &ctx)?, 0.0, Some(t1.converged()));
        let (p2, t2) = solve(&scenario, &ctx, 2, Init::Uniform, &settings)?;
        push("scheme2", 2, ee_exact(&p2, &ctx)?, 0.0, Some(t2.converged()));

        // Binary placements mean the same under both schemes; UCP does not.
        let mpcp = mpcp_policy(&scenario.content);
        push("mpcp", 1, ee_exact(&mpcp, &ctx)?, 0.0, None);
        let ucp = ucp_policy(&scenario.content);
        push("ucp", 1, ee_exact(&ucp, &ctx)?, 0.0, None);
        push("ucp", 2, ee_exact(&ucp.with_mode(PolicyMode::Random), &ctx)?, 0.0, None);
        let icp = icp_expected_ee(&ctx, args.icp_realizations, g.seed)?;
        push("icp", 1, icp.mean, icp.std_error, None);
    }

    let mut out = OutputDir::create(&g.out_dir, "compare")?;
    record_globals(&mut out, g);
    out.param("sweep", args.sweep);
    out.param("grid", &grid);
    out.param("icp_realizations", args.icp_realizations);
    out.param("solver", settings);
    out.param("rates", args.solver.rates);
    let roles = Roles {
        x: "value",
        y: vec!["ee"],
        error: Some("std_error"),
        group: vec!["policy", "scheme"],
    };
    let name = format!("compare_{sweep}.csv");
    out.write_csv(&name, "EE per policy across the sweep", roles, &rows)?;
    let manifest = out.finish()?;
    println!("{} rows; wrote {}", rows.len(), manifest.display());
    Ok(Outcome::Success)
}

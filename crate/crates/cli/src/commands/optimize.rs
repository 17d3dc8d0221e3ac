use std::fs::File;
use std::io::BufWriter;

use anyhow::{Context, Result};
use clap::{Args, ValueEnum};
use serde::Serialize;
use svc_ee::config::{CachingPolicy, PolicyMode, Scenario};
use svc_ee::objective::{ee_exact, ee_value, ObjectiveContext};
use svc_ee::optimizer::{make_initial_policy, optimize, GradientScaling, InitialKind, SolverSettings, SolverTrace};
use svc_ee::power::{power_scheme1, power_scheme2};

use super::{load, rate_table, record_globals, RateSource};
use crate::output::{OutputDir, Roles, Row};
use crate::{GlobalArgs, Outcome};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Init {
    Uniform,
    Popularity,
    Random,
}

impl From<Init> for InitialKind {
    fn from(i: Init) -> Self {
        match i {
            Init::Uniform => InitialKind::Uniform,
            Init::Popularity => InitialKind::Popularity,
            Init::Random => InitialKind::Random,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scaling {
    Raw,
    Relative,
    MaxNorm,
}

impl From<Scaling> for GradientScaling {
    fn from(s: Scaling) -> Self {
        match s {
            Scaling::Raw => GradientScaling::Raw,
            Scaling::Relative => GradientScaling::Relative,
            Scaling::MaxNorm => GradientScaling::MaxNorm,
        }
    }
}

/// Solver flags shared with `compare`.
#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, default_value_t = 500)]
    pub max_iters: usize,
    /// Relative EE change below which the solver stops; 0 runs all iterations.
    #[arg(long, default_value_t = 1e-6)]
    pub rel_tol: f64,
    #[arg(long, value_enum, default_value_t = Scaling::MaxNorm)]
    pub scaling: Scaling,
    /// Return the best iterate as is, without trying its
    /// binary rounding.
    #[arg(long)]
    pub no_round: bool,
    #[arg(long, value_enum, default_value_t = RateSource::Analytic)]
    pub rates: RateSource,
}

impl SolverArgs {
    pub fn settings(&self, g: &GlobalArgs) -> SolverSettings {
        SolverSettings {
            max_iters: self.max_iters,
            scaling: self.scaling.into(),
            rel_tol: self.rel_tol,
            theta: g.theta,
            seed: g.seed,
            round_to_binary: !self.no_round,
        }
    }
}

#[derive(Debug, Args)]
pub struct OptimizeArgs {
    /// 1: every SBS caches the same fraction of a layer; 2: every SBS caches
    /// whole layers at random.
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u8).range(1..=2))]
    pub scheme: u8,
    #[arg(long, value_enum, default_value_t = Init::Uniform)]
    pub init: Init,
    #[command(flatten)]
    pub solver: SolverArgs,
}

pub fn scheme_mode(scheme: u8) -> PolicyMode {
    if scheme == 1 {
        PolicyMode::Fractional
    } else {
        PolicyMode::Random
    }
}

#[derive(Debug, Serialize)]
pub struct PolicyRow {
    pub file: usize,
    pub p: f64,
    pub g_hdv: f64,
    pub q1: f64,
    pub q2: f64,
}

impl Row for PolicyRow {
    const HEADER: &'static [&'static str] = &["file", "p", "g_hdv", "q1", "q2"];
}

#[derive(Debug, Serialize)]
struct SummaryRow {
    scheme: u8,
    init: Init,
    initial_ee: f64,
    ee: f64,
    ee_surrogate: f64,
    iterations: usize,
    converged: bool,
    best_iteration: usize,
    best_iterate_ee: f64,
    rounded: bool,
    p_total_w: f64,
}

impl Row for SummaryRow {
    const HEADER: &'static [&'static str] = &[
        "scheme",
        "init",
        "initial_ee",
        "ee",
        "ee_surrogate",
        "iterations",
        "converged",
        "best_iteration",
        "best_iterate_ee",
        "rounded",
        "p_total_w",
    ];
}

/// Runs the solver from the requested starting point.
pub fn solve(
    scenario: &Scenario,
    ctx: &ObjectiveContext,
    scheme: u8,
    init: Init,
    settings: &SolverSettings,
) -> Result<(CachingPolicy, SolverTrace)> {
    let initial = make_initial_policy(init.into(), scheme_mode(scheme), &scenario.content, settings.seed)?;
    Ok(optimize(&initial, ctx, settings)?)
}

pub fn run(g: &GlobalArgs, args: &OptimizeArgs) -> Result<Outcome> {
    let scenario = load(g)?;
    let rates = rate_table(&scenario.network, g, args.solver.rates)?;
    let ctx = ObjectiveContext::new(&scenario, rates, g.theta)?;
    let settings = args.solver.settings(g);
    let (policy, trace) = solve(&scenario, &ctx, args.scheme, args.init, &settings)?;

    let power = match policy.mode {
        PolicyMode::Fractional => power_scheme1(&policy, &ctx.profile, &ctx.net, &ctx.content, &ctx.coeff, None)?,
        PolicyMode::Random => power_scheme2(&policy, &ctx.profile, &ctx.net, &ctx.content, &ctx.coeff, &ctx.options)?,
    };
    let summary = SummaryRow {
        scheme: args.scheme,
        init: args.init,
        initial_ee: trace.initial_ee,
        ee: ee_exact(&policy, &ctx)?,
        ee_surrogate: ee_value(&policy, &ctx)?,
        iterations: trace.rows.len(),
        converged: trace.converged(),
        best_iteration: trace.best_iteration,
        best_iterate_ee: trace.best_iterate_ee,
        rounded: trace.rounded,
        p_total_w: power.p_total,
    };
    let rows: Vec<PolicyRow> = (0..policy.len())
        .map(|f| PolicyRow {
            file: f + 1,
            p: ctx.profile.p[f],
            g_hdv: ctx.profile.g_hdv[f],
            q1: policy.q1[f],
            q2: policy.q2[f],
        })
        .collect();

    let mut out = OutputDir::create(&g.out_dir, "optimize")?;
    record_globals(&mut out, g);
    out.param("scheme", args.scheme);
    out.param("init", args.init);
    out.param("solver", settings);
    out.param("rates", args.solver.rates);
    let policy_roles = Roles {
        x: "file",
        y: vec!["q1", "q2"],
        error: None,
        group: vec![],
    };
    out.write_csv("policy.csv", "caching policy: base-layer q1 and enhancement-layer q2 per file", policy_roles, &rows)?;
    let trace_path = out.path("trace.csv");
    let file = File::create(&trace_path).with_context(|| format!("cannot create {}", trace_path.display()))?;
    trace.write_csv(BufWriter::new(file))?;
    let trace_roles = Roles {
        x: "iteration",
        y: vec!["ee", "ee_surrogate"],
        error: None,
        group: vec![],
    };
    out.register(
        "trace.csv",
        "EE per solver iteration",
        &["iteration", "ee", "ee_surrogate", "step", "u", "v", "max_delta"],
        trace_roles,
    );
    let summary_roles = Roles {
        x: "scheme",
        y: vec!["ee"],
        error: None,
        group: vec![],
    };
    out.write_csv("optimize_summary.csv", "final EE and solver status", summary_roles, std::slice::from_ref(&summary))?;
    let manifest = out.finish()?;
    println!(
        "scheme {}: EE {:.6e} bits/J after {} iterations ({}); wrote {}",
        args.scheme,
        summary.ee,
        summary.iterations,
        if summary.converged { "converged" } else { "not converged" },
        manifest.display()
    );
    Ok(if summary.converged { Outcome::Success } else { Outcome::NotConverged })
}

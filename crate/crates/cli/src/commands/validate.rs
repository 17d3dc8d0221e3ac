use anyhow::Result;
use clap::Args;
use serde::Serialize;
use svc_ee::analytic::{ergodic_rate_mbs, ergodic_rate_sbs, p_success_mbs, p_success_sbs, Cluster};
use svc_ee::config::db_to_linear;
use svc_ee::montecarlo::{simulate, Link, SirSamples, MIN_CONDITIONED};
use svc_ee::stats::Estimate;

use super::{analytic_options, load, record_globals, DEFAULT_GAMMA_DB};
use crate::output::{OutputDir, Roles, Row};
use crate::{GlobalArgs, Outcome};

/// Probabilities agree when within this absolute gap or three standard errors.
pub const PROB_ABS_TOL: f64 = 0.01;
/// Rates agree when within this relative gap or three standard errors.
pub const RATE_REL_TOL: f64 = 0.03;
pub const SIGMAS: f64 = 3.0;

#[derive(Debug, Args)]
pub struct ValidateArgs {
    /// Thresholds in dB.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GAMMA_DB)]
    pub gamma_db: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Pass,
    Fail,
    /// Too few drops for the comparison to mean anything.
    Inconclusive,
}

#[derive(Debug, Serialize)]
struct ValidateRow {
    quantity: &'static str,
    gamma_db: f64,
    n: usize,
    analytic: f64,
    analytic_se: f64,
    mc: f64,
    mc_se: f64,
    tolerance: f64,
    status: Status,
}

impl Row for ValidateRow {
    const HEADER: &'static [&'static str] =
        &["quantity", "gamma_db", "n", "analytic", "analytic_se", "mc", "mc_se", "tolerance", "status"];
}

fn judge(analytic: &Estimate, mc: &Estimate, abs_floor: f64, conclusive: bool) -> (f64, Status) {
    let sigma = analytic.std_error.hypot(mc.std_error);
    let tol = abs_floor.max(SIGMAS * sigma);
    let status = if !conclusive {
        Status::Inconclusive
    } else if (analytic.mean - mc.mean).abs() <= tol {
        Status::Pass
    } else {
        Status::Fail
    };
    (tol, status)
}

fn exact(mean: f64) -> Estimate {
    Estimate {
        mean,
        std_error: 0.0,
        n_samples: 0,
        seed: 0,
    }
}

struct Validator<'a> {
    samples: &'a SirSamples,
    w: f64,
    rows: Vec<ValidateRow>,
}

impl Validator<'_> {
    fn probability(&mut self, quantity: &'static str, db: f64, n: usize, link: Link, analytic: Estimate) -> Result<()> {
        let mc = self.samples.success(link, db_to_linear(db))?;
        let conclusive = self.samples.n_drops() >= MIN_CONDITIONED && mc.std_error <= PROB_ABS_TOL;
        let (tolerance, status) = judge(&analytic, &mc, PROB_ABS_TOL, conclusive);
        self.push(quantity, db, n, analytic, mc, tolerance, status);
        Ok(())
    }

    fn rate(&mut self, quantity: &'static str, db: f64, n: usize, link: Link, analytic: Estimate) -> Result<()> {
        let (mc, conclusive) = match self.samples.conditional_rate(link, db_to_linear(db), self.w) {
            Ok(e) => {
                let ok = e.std_error <= RATE_REL_TOL / SIGMAS * e.mean;
                (e, ok)
            }
            Err(svc_ee::Error::TooFewConditioned { .. }) => (exact(f64::NAN), false),
            Err(e) => return Err(e.into()),
        };
        let (tolerance, status) = judge(&analytic, &mc, RATE_REL_TOL * analytic.mean, conclusive);
        self.push(quantity, db, n, analytic, mc, tolerance, status);
        Ok(())
    }

    #[allow(clippy::too_many_arguments)]
    fn push(&mut self, quantity: &'static str, db: f64, n: usize, a: Estimate, mc: Estimate, tolerance: f64, status: Status) {
        self.rows.push(ValidateRow {
            quantity,
            gamma_db: db,
            n,
            analytic: a.mean,
            analytic_se: a.std_error,
            mc: mc.mean,
            mc_se: mc.std_error,
            tolerance,
            status,
        });
    }
}

pub fn run(g: &GlobalArgs, args: &ValidateArgs) -> Result<Outcome> {
    let scenario = load(g)?;
    let net = &scenario.network;
    let opts = analytic_options(g);
    let samples = simulate(net, g.drops, g.seed)?;
    let mut v = Validator {
        samples: &samples,
        w: net.w,
        rows: Vec::new(),
    };
    for &db in &args.gamma_db {
        let gamma = db_to_linear(db);
        v.probability("p_success_mbs", db, 1, Link::Mbs, exact(p_success_mbs(net, gamma)?))?;
        v.rate("rate_mbs", db, 1, Link::Mbs, exact(ergodic_rate_mbs(net, gamma)?))?;
        // The single-server and full-cluster ends bracket every serving-set size.
        for (cluster, p_name, r_name) in [
            (Cluster::Inner, "p_success_bl", "rate_bl"),
            (Cluster::Outer, "p_success_el", "rate_el"),
        ] {
            let size = cluster.size(net);
            let mut sizes = vec![1, size];
            sizes.dedup();
            for n in sizes {
                let link = Link::sbs(cluster, n);
                v.probability(p_name, db, n, link, p_success_sbs(net, cluster, gamma, n, &opts)?)?;
                v.rate(r_name, db, n, link, ergodic_rate_sbs(net, cluster, gamma, n, &opts)?)?;
            }
        }
    }
    let failed = v.rows.iter().filter(|r| r.status == Status::Fail).count();
    let inconclusive = v.rows.iter().filter(|r| r.status == Status::Inconclusive).count();
    let mut out = OutputDir::create(&g.out_dir, "validate")?;
    record_globals(&mut out, g);
    out.param("gamma_db", &args.gamma_db);
    let roles = Roles {
        x: "gamma_db",
        y: vec!["analytic", "mc"],
        error: Some("mc_se"),
        group: vec!["quantity", "n"],
    };
    out.write_csv("validate.csv", "analytic values against Monte-Carlo estimates", roles, &v.rows)?;
    let manifest = out.finish()?;
    println!(
        "{} rows: {} pass, {} fail, {} inconclusive; wrote {}",
        v.rows.len(),
        v.rows.len() - failed - inconclusive,
        failed,
        inconclusive,
        manifest.display()
    );
    Ok(if failed > 0 { Outcome::ValidationFailed } else { Outcome::Success })
}

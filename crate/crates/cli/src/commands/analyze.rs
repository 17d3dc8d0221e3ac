use anyhow::Result;
use clap::Args;
use svc_ee::analytic::{build_rate_table, p_success_mbs, p_success_sbs, Cluster};
use svc_ee::config::db_to_linear;

use super::{analytic_options, load, record_globals, success_roles, write_rate_table, SuccessRow, DEFAULT_GAMMA_DB};
use crate::output::OutputDir;
use crate::{GlobalArgs, Outcome};

#[derive(Debug, Args)]
pub struct AnalyzeArgs {
    /// Thresholds in dB.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GAMMA_DB)]
    pub gamma_db: Vec<f64>,
}

pub fn run(g: &GlobalArgs, args: &AnalyzeArgs) -> Result<Outcome> {
    let scenario = load(g)?;
    let net = &scenario.network;
    let opts = analytic_options(g);
    let mut rows = Vec::new();
    for &db in &args.gamma_db {
        let gamma = db_to_linear(db);
        rows.push(SuccessRow {
            quantity: "p_success_mbs",
            gamma_db: db,
            n: 1,
            value: p_success_mbs(net, gamma)?,
            std_error: 0.0,
        });
        for (cluster, quantity) in [(Cluster::Inner, "p_success_bl"), (Cluster::Outer, "p_success_el")] {
            for n in 1..=cluster.size(net) {
                let e = p_success_sbs(net, cluster, gamma, n, &opts)?;
                rows.push(SuccessRow {
                    quantity,
                    gamma_db: db,
                    n,
                    value: e.mean,
                    std_error: e.std_error,
                });
            }
        }
    }
    let mut out = OutputDir::create(&g.out_dir, "analyze")?;
    record_globals(&mut out, g);
    out.param("gamma_db", &args.gamma_db);
    out.write_csv("analyze_success.csv", "analytic success probabilities", success_roles(), &rows)?;
    let table = build_rate_table(net, &opts)?;
    write_rate_table(&mut out, &table, net)?;
    let manifest = out.finish()?;
    println!("wrote {}", manifest.display());
    Ok(Outcome::Success)
}

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;

use anyhow::{Context, Result};
use clap::Args;
use svc_ee::analytic::{Cluster, RateTable};
use svc_ee::config::db_to_linear;
use svc_ee::montecarlo::{simulate, window_radius, Link};

use super::{load, record_globals, success_roles, write_rate_table, SuccessRow, DEFAULT_GAMMA_DB};
use crate::output::OutputDir;
use crate::{GlobalArgs, Outcome};

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Thresholds in dB.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_GAMMA_DB)]
    pub gamma_db: Vec<f64>,
    /// Also write every drop's SIRs to this file.
    #[arg(long)]
    pub dump: Option<PathBuf>,
}

pub fn run(g: &GlobalArgs, args: &SimulateArgs) -> Result<Outcome> {
    let scenario = load(g)?;
    let net = &scenario.network;
    let samples = simulate(net, g.drops, g.seed)?;
    log::info!("{} drops, {} resampled for lack of an MBS", samples.n_drops(), samples.resampled);
    let mut rows = Vec::new();
    for &db in &args.gamma_db {
        let gamma = db_to_linear(db);
        let e = samples.success(Link::Mbs, gamma)?;
        rows.push(SuccessRow {
            quantity: "p_success_mbs",
            gamma_db: db,
            n: 1,
            value: e.mean,
            std_error: e.std_error,
        });
        for (cluster, quantity) in [(Cluster::Inner, "p_success_bl"), (Cluster::Outer, "p_success_el")] {
            for n in 1..=cluster.size(net) {
                let e = samples.success(Link::sbs(cluster, n), gamma)?;
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
    let mut out = OutputDir::create(&g.out_dir, "simulate")?;
    record_globals(&mut out, g);
    out.param("gamma_db", &args.gamma_db);
    out.param("window_radius_m", window_radius(net));
    out.param("resampled_drops", samples.resampled);
    out.write_csv("simulate_success.csv", "Monte-Carlo success probabilities", success_roles(), &rows)?;
    let table = RateTable::from_samples(net, &samples)?;
    write_rate_table(&mut out, &table, net)?;
    if let Some(path) = &args.dump {
        let file = File::create(path).with_context(|| format!("cannot create {}", path.display()))?;
        samples.write_dump(BufWriter::new(file))?;
        out.param("dump", path.display().to_string());
    }
    let manifest = out.finish()?;
    println!("wrote {}", manifest.display());
    Ok(Outcome::Success)
}

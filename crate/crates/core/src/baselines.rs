//! Benchmark placements: most-popular (MPCP), uniform (UCP) and independent
//! random (ICP) content placement.
//!
//! Files are ranked by popularity in index order, so "most popular" means
//! "lowest index".

use rand::seq::index::sample;
use rayon::prelude::*;

use crate::config::{CachingPolicy, ContentConfig, PolicyMode};
use crate::error::Result;
use crate::objective::{ee_exact, ObjectiveContext};
use crate::stats::{batch_rng, batches, Estimate, Moments};

/// Whole layers of the `M_B` (resp. `M_E`) most popular files.
pub fn mpcp_policy(content: &ContentConfig) -> CachingPolicy {
    let f = content.f_count;
    let head = |m: usize| (0..f).map(|i| if i < m { 1.0 } else { 0.0 }).collect();
    CachingPolicy::new(PolicyMode::Fractional, head(content.m_b()), head(content.m_e()))
}

/// The same fraction `M_B/F` (resp. `M_E/F`) of every file.
pub fn ucp_policy(content: &ContentConfig) -> CachingPolicy {
    let f = content.f_count as f64;
    CachingPolicy::new(
        PolicyMode::Fractional,
        vec![content.m_b() as f64 / f; content.f_count],
        vec![content.m_e() as f64 / f; content.f_count],
    )
}

fn icp_with<R: rand::Rng>(content: &ContentConfig, rng: &mut R) -> CachingPolicy {
    let f = content.f_count;
    let mut subset = |m: usize| {
        let mut q = vec![0.0; f];
        for i in sample(rng, f, m) {
            q[i] = 1.0;
        }
        q
    };
    let q1 = subset(content.m_b());
    let q2 = subset(content.m_e());
    CachingPolicy::new(PolicyMode::Fractional, q1, q2)
}

/// One realization of independent placement: uniformly random `M_B`- and
/// `M_E`-subsets of the catalog.
pub fn icp_policy(content: &ContentConfig, seed: u64) -> CachingPolicy {
    icp_with(content, &mut batch_rng(seed, 0))
}

/// Mean exact-`l₀` Scheme I EE over `n_realizations` independent placements.
pub fn icp_expected_ee(ctx: &ObjectiveContext, n_realizations: usize, seed: u64) -> Result<Estimate> {
    let parts: Vec<Result<Moments>> = batches(n_realizations)
        .collect::<Vec<_>>()
        .into_par_iter()
        .map(|(idx, len)| {
            let mut rng = batch_rng(seed, idx);
            let mut m = Moments::default();
            for _ in 0..len {
                m.push(ee_exact(&icp_with(&ctx.content, &mut rng), ctx)?);
            }
            Ok(m)
        })
        .collect();
    let mut total = Moments::default();
    for p in parts {
        total = total.merge(p?);
    }
    Ok(total.estimate(seed))
}

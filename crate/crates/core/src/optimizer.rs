//! Projected gradient ascent with diminishing steps `ε(t) = 1/t` over the
//! capped simplex `{x : 0 ≤ x_f ≤ 1, Σ x_f = budget}`.

use std::io::Write;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::config::{CachingPolicy, ContentConfig, PolicyMode, FEASIBILITY_TOL};
use crate::error::{Error, Result};
use crate::objective::{ee_exact, ee_gradient, ee_value, Layer, ObjectiveContext, DEFAULT_THETA};
use crate::popularity::zipf;
use crate::stats::batch_rng;

/// Bisection stops once the threshold bracket is this narrow.
const BISECTION_WIDTH: f64 = 1e-12;

/// Euclidean projection onto the capped simplex, with the threshold `u`
/// such that `x_f = min(max(v_f − u, 0), 1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub x: Vec<f64>,
    pub threshold: f64,
}

fn clipped_sum(v: &[f64], u: f64) -> f64 {
    v.iter().map(|&vf| (vf - u).clamp(0.0, 1.0)).sum()
}

/// Projects `v` onto `{x : 0 ≤ x ≤ 1, Σx = budget}`.
///
/// The threshold is bracketed in `[min(v) − 1, max(v)]` and bisected on the
/// non-increasing map `u ↦ Σ min(max(v_f − u, 0), 1)`; it is then solved
/// exactly on the set of entries left strictly inside the box.
///
/// ```
/// use svc_ee::optimizer::project_capped_simplex;
/// let p = project_capped_simplex(&[1.5, 0.5, 0.2], 1.0).unwrap();
/// assert_eq!(p.x, vec![1.0, 0.0, 0.0]);
/// ```
pub fn project_capped_simplex(v: &[f64], budget: f64) -> Result<Projection> {
    let n = v.len() as f64;
    if !(0.0..=n).contains(&budget) {
        return Err(Error::InfeasiblePolicy(format!("budget {budget} outside [0, {n}]")));
    }
    if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
        return Err(Error::domain(format!("cannot project non-finite entry {bad}")));
    }
    if v.is_empty() {
        return Ok(Projection { x: Vec::new(), threshold: 0.0 });
    }
    let lo_v = v.iter().copied().fold(f64::INFINITY, f64::min);
    let hi_v = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let (mut lo, mut hi) = (lo_v - 1.0, hi_v);
    while hi - lo > BISECTION_WIDTH {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if clipped_sum(v, mid) > budget {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut u = 0.5 * (lo + hi);

    // Exact threshold on the free set.
    let (mut free, mut free_sum, mut capped) = (0usize, 0.0, 0usize);
    for &vf in v {
        let x = vf - u;
        if x >= 1.0 {
            capped += 1;
        } else if x > 0.0 {
            free += 1;
            free_sum += vf;
        }
    }
    if free > 0 {
        let exact = (free_sum - (budget - capped as f64)) / free as f64;
        if (exact - u).abs() <= 2.0 * BISECTION_WIDTH.max(f64::EPSILON * u.abs()) {
            u = exact;
        }
    }
    let x: Vec<f64> = v.iter().map(|&vf| (vf - u).clamp(0.0, 1.0)).collect();
    Ok(Projection { x, threshold: u })
}

/// How the EE gradient is scaled before the `ε(t)` step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
pub enum GradientScaling {
    /// The gradient in bits/joule per unit of policy, as computed.
    Raw,
    /// Divided by the current EE: the gradient of `ln EE`.
    Relative,
    /// Divided by its largest absolute component in the block.
    #[default]
    MaxNorm,
}

impl GradientScaling {
    fn apply(self, g: &mut [f64], ee: f64) {
        let k = match self {
            GradientScaling::Raw => 1.0,
            GradientScaling::Relative => 1.0 / ee,
            GradientScaling::MaxNorm => {
                let m = g.iter().fold(0.0f64, |m, x| m.max(x.abs()));
                if m > 0.0 {
                    1.0 / m
                } else {
                    1.0
                }
            }
        };
        g.iter_mut().for_each(|x| *x *= k);
    }
}

/// Solver knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolverSettings {
    pub max_iters: usize,
    pub scaling: GradientScaling,
    /// Stop when `|EE(t) − EE(t−1)| < rel_tol · EE(t−1)`; 0 disables the test.
    pub rel_tol: f64,
    pub theta: f64,
    pub seed: u64,
    /// Also try the binary policy that keeps the `M_B` (`M_E`) largest
    /// entries of the best iterate and return it if its exact EE is higher.
    pub round_to_binary: bool,
}

impl Default for SolverSettings {
    fn default() -> Self {
        SolverSettings {
            max_iters: 500,
            scaling: GradientScaling::default(),
            rel_tol: 1e-6,
            theta: DEFAULT_THETA,
            seed: 1,
            round_to_binary: true,
        }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 {
            return Err(Error::validation("max_iters", "must be at least 1"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::validation("rel_tol", "must be non-negative"));
        }
        if !(self.theta > 0.0 && self.theta.is_finite()) {
            return Err(Error::validation("theta", "must be positive"));
        }
        Ok(())
    }
}

/// Why the solver stopped.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Converged,
    MaxIterations,
}

/// One iteration of the solver.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    /// Reported EE of the new iterate: exact `l₀` for fractional policies.
    pub ee: f64,
    /// EE on the surface being climbed (smoothed for fractional policies).
    pub ee_surrogate: f64,
    pub step: f64,
    pub u: f64,
    pub v: f64,
    pub max_delta: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolverTrace {
    pub initial_ee: f64,
    pub rows: Vec<TraceRow>,
    pub termination: Termination,
    /// Iteration of the best iterate (0 for the initial policy).
    pub best_iteration: usize,
    /// Exact EE of the best iterate, before any rounding.
    pub best_iterate_ee: f64,
    /// Whether the returned policy is the binary rounding of the best iterate.
    pub rounded: bool,
    pub final_policy: CachingPolicy,
}

impl SolverTrace {
    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }

    pub fn best_ee(&self) -> f64 {
        self.rows.iter().map(|r| r.ee).fold(self.initial_ee, f64::max)
    }

    /// Running maximum of the reported EE, one entry per row.
    pub fn running_max(&self) -> Vec<f64> {
        let mut best = self.initial_ee;
        self.rows
            .iter()
            .map(|r| {
                best = best.max(r.ee);
                best
            })
            .collect()
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = std::io::BufWriter::new(out);
        w.write_all(b"iteration,ee,ee_surrogate,step,u,v,max_delta\n").map_err(io_err)?;
        for r in &self.rows {
            writeln!(
                w,
                "{},{:e},{:e},{:e},{:e},{:e},{:e}",
                r.iteration, r.ee, r.ee_surrogate, r.step, r.u, r.v, r.max_delta
            )
            .map_err(io_err)?;
        }
        w.flush().map_err(io_err)
    }
}

fn io_err(e: std::io::Error) -> Error {
    Error::Io {
        path: "<trace>".into(),
        source: e,
    }
}

/// Runs projected gradient ascent from `initial`.
///
/// Both blocks take their gradient at the current iterate, scaled per
/// [`GradientScaling`], and step with the same `ε(t) = 1/t`. The returned
/// policy is the best iterate by reported EE (the initial policy included).
///
/// Under exact `l₀` counting a fractional policy's EE is linear-fractional on
/// each support pattern, so its maximum sits at a binary policy. Binary
/// policies are also feasible for Scheme II, whose EE surface can hold local
/// maxima below them. With `round_to_binary` the top-entry rounding of the
/// best iterate is returned when it scores higher.
pub fn optimize(
    initial: &CachingPolicy,
    ctx: &ObjectiveContext,
    settings: &SolverSettings,
) -> Result<(CachingPolicy, SolverTrace)> {
    settings.validate()?;
    let mut ctx_theta = ctx.clone();
    ctx_theta.theta = settings.theta;
    let ctx = &ctx_theta;
    let (m_b, m_e) = (ctx.m_b(), ctx.m_e());
    initial.check_feasible(ctx.content.f_count, m_b, m_e)?;

    let report = |p: &CachingPolicy| ee_exact(p, ctx);
    let mut policy = initial.clone();
    let initial_ee = report(&policy)?;
    let mut prev = initial_ee;
    let mut best = (initial_ee, 0, policy.clone());
    let mut rows = Vec::new();
    let mut termination = Termination::MaxIterations;

    for t in 1..=settings.max_iters {
        let step = 1.0 / t as f64;
        let here = ee_value(&policy, ctx)?;
        let mut g1 = ee_gradient(&policy, ctx, Layer::Base)?;
        let mut g2 = ee_gradient(&policy, ctx, Layer::Enhancement)?;
        settings.scaling.apply(&mut g1, here);
        settings.scaling.apply(&mut g2, here);
        let stepped = |x: &[f64], g: &[f64]| -> Vec<f64> { x.iter().zip(g).map(|(x, g)| x + step * g).collect() };
        let p1 = project_capped_simplex(&stepped(&policy.q1, &g1), m_b as f64)?;
        let p2 = project_capped_simplex(&stepped(&policy.q2, &g2), m_e as f64)?;
        let max_delta = policy
            .q1
            .iter()
            .zip(&p1.x)
            .chain(policy.q2.iter().zip(&p2.x))
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        policy = CachingPolicy::new(policy.mode, p1.x, p2.x);

        let ee = report(&policy)?;
        let ee_surrogate = ee_value(&policy, ctx)?;
        rows.push(TraceRow {
            iteration: t,
            ee,
            ee_surrogate,
            step,
            u: p1.threshold,
            v: p2.threshold,
            max_delta,
        });
        if ee > best.0 {
            best = (ee, t, policy.clone());
        }
        if (ee - prev).abs() < settings.rel_tol * prev.abs() {
            termination = Termination::Converged;
            break;
        }
        prev = ee;
    }

    let (best_iterate_ee, best_iteration, mut best_policy) = best;
    let mut rounded = false;
    if settings.round_to_binary && !best_policy.is_binary() {
        let candidate = CachingPolicy::new(
            best_policy.mode,
            top_entries(&best_policy.q1, m_b),
            top_entries(&best_policy.q2, m_e),
        );
        if report(&candidate)? > best_iterate_ee {
            best_policy = candidate;
            rounded = true;
        }
    }
    best_policy.check_feasible(ctx.content.f_count, m_b, m_e)?;
    let trace = SolverTrace {
        initial_ee,
        rows,
        termination,
        best_iteration,
        best_iterate_ee,
        rounded,
        final_policy: best_policy.clone(),
    };
    Ok((best_policy, trace))
}

/// Indicator of the `m` largest entries of `x` (ties go to the lower index).
fn top_entries(x: &[f64], m: usize) -> Vec<f64> {
    let mut order: Vec<usize> = (0..x.len()).collect();
    order.sort_by(|&i, &j| x[j].total_cmp(&x[i]).then(i.cmp(&j)));
    let mut out = vec![0.0; x.len()];
    for &i in &order[..m] {
        out[i] = 1.0;
    }
    out
}

/// Starting points for [`optimize`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum InitialKind {
    /// `M_B/F` and `M_E/F` everywhere.
    Uniform,
    /// Proportional to request probability, then projected.
    Popularity,
    /// Uniform random entries, then projected.
    Random,
}

/// A feasible starting policy of the requested kind.
pub fn make_initial_policy(kind: InitialKind, mode: PolicyMode, content: &ContentConfig, seed: u64) -> Result<CachingPolicy> {
    content.validate()?;
    let f = content.f_count;
    let (m_b, m_e) = (content.m_b() as f64, content.m_e() as f64);
    let (raw1, raw2): (Vec<f64>, Vec<f64>) = match kind {
        InitialKind::Uniform => (vec![m_b / f as f64; f], vec![m_e / f as f64; f]),
        InitialKind::Popularity => {
            let p = zipf(f, content.zipf_alpha);
            (p.iter().map(|x| x * m_b).collect(), p.iter().map(|x| x * m_e).collect())
        }
        InitialKind::Random => {
            let mut rng = batch_rng(seed, 0);
            let a = (0..f).map(|_| rng.random::<f64>()).collect();
            let b = (0..f).map(|_| rng.random::<f64>()).collect();
            (a, b)
        }
    };
    let q1 = project_capped_simplex(&raw1, m_b)?.x;
    let q2 = project_capped_simplex(&raw2, m_e)?.x;
    let policy = CachingPolicy::new(mode, q1, q2);
    policy.check_feasible(f, content.m_b(), content.m_e())?;
    Ok(policy)
}

/// Largest budget or box violation of `x` for budget `budget`.
pub fn feasibility_gap(x: &[f64], budget: f64) -> f64 {
    let box_gap = x.iter().map(|&v| (-v).max(v - 1.0).max(0.0)).fold(0.0, f64::max);
    box_gap.max((x.iter().sum::<f64>() - budget).abs())
}

/// Whether `x` lies in the capped simplex within [`FEASIBILITY_TOL`].
pub fn is_feasible(x: &[f64], budget: f64) -> bool {
    feasibility_gap(x, budget) <= FEASIBILITY_TOL
}

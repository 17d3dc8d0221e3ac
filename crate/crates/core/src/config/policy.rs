use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Absolute tolerance on the cache-budget equalities.
pub const FEASIBILITY_TOL: f64 = 1e-9;

/// How the per-file entries of a [`CachingPolicy`] are interpreted.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PolicyMode {
    /// Scheme I: every SBS of a cluster stores the same fraction of a layer.
    Fractional,
    /// Scheme II: every SBS independently stores a whole layer with the
    /// given probability.
    Random,
}

/// Per-file base-layer (`q1`) and enhancement-layer (`q2`) caching entries.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CachingPolicy {
    pub mode: PolicyMode,
    pub q1: Vec<f64>,
    pub q2: Vec<f64>,
}

impl CachingPolicy {
    pub fn new(mode: PolicyMode, q1: Vec<f64>, q2: Vec<f64>) -> Self {
        CachingPolicy { mode, q1, q2 }
    }

    pub fn zeros(mode: PolicyMode, f_count: usize) -> Self {
        Self::new(mode, vec![0.0; f_count], vec![0.0; f_count])
    }

    pub fn ones(mode: PolicyMode, f_count: usize) -> Self {
        Self::new(mode, vec![1.0; f_count], vec![1.0; f_count])
    }

    pub fn len(&self) -> usize {
        self.q1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.q1.is_empty()
    }

    pub fn with_mode(mut self, mode: PolicyMode) -> Self {
        self.mode = mode;
        self
    }

    /// Checks lengths and the `[0, 1]` box; budgets are not checked.
    pub fn check_shape(&self, f_count: usize) -> Result<()> {
        if self.q1.len() != f_count || self.q2.len() != f_count {
            return Err(Error::domain(format!(
                "policy length ({}, {}) does not match catalog size {f_count}",
                self.q1.len(),
                self.q2.len()
            )));
        }
        for (name, q) in [("q1", &self.q1), ("q2", &self.q2)] {
            if let Some((i, x)) = q.iter().enumerate().find(|(_, x)| !(0.0..=1.0).contains(*x)) {
                return Err(Error::InfeasiblePolicy(format!("{name}[{i}] = {x} outside [0, 1]")));
            }
        }
        Ok(())
    }

    /// Full feasibility: shape, box and both budget equalities.
    pub fn check_feasible(&self, f_count: usize, m_b: usize, m_e: usize) -> Result<()> {
        self.check_shape(f_count)?;
        for (name, q, budget) in [("q1", &self.q1, m_b), ("q2", &self.q2, m_e)] {
            let sum: f64 = q.iter().sum();
            if (sum - budget as f64).abs() > FEASIBILITY_TOL {
                return Err(Error::InfeasiblePolicy(format!(
                    "sum({name}) = {sum} but the cache budget is {budget}"
                )));
            }
        }
        Ok(())
    }

    /// True when every entry is exactly 0 or 1.
    pub fn is_binary(&self) -> bool {
        self.q1.iter().chain(&self.q2).all(|&x| x == 0.0 || x == 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn feasibility_checks() {
        let p = CachingPolicy::new(PolicyMode::Fractional, vec![0.5, 0.5, 0.0], vec![1.0, 0.0, 0.0]);
        p.check_feasible(3, 1, 1).unwrap();
        assert!(p.check_feasible(3, 2, 1).is_err());
        assert!(p.check_feasible(4, 1, 1).is_err());
        let bad = CachingPolicy::new(PolicyMode::Random, vec![1.5, -0.5, 0.0], vec![0.0; 3]);
        assert!(matches!(bad.check_feasible(3, 1, 0), Err(Error::InfeasiblePolicy(_))));
    }

    #[test]
    fn binary_detection() {
        assert!(CachingPolicy::ones(PolicyMode::Random, 4).is_binary());
        let p = CachingPolicy::new(PolicyMode::Random, vec![0.25; 4], vec![0.0; 4]);
        assert!(!p.is_binary());
    }
}

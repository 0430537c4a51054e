//! Tolerances, iteration budgets, and seeds shared across the pipeline.

use crate::error::{Error, Result};

/// Numerical policy for every rank decision, residual test, and search.
///
/// `eps_rank` is the relative singular-value threshold used for rank and
/// nullspace decisions (scaled internally by the largest singular value and
/// the matrix dimension). `eps_res` is the relative Frobenius residual below
/// which an identity is accepted as holding. `restarts` and `max_iter`
/// bound the seeded searches; `seed` drives every random choice.
#[derive(Debug, Clone, PartialEq)]
pub struct ToleranceConfig {
    pub eps_rank: f64,
    pub eps_res: f64,
    pub restarts: usize,
    pub max_iter: usize,
    pub seed: u64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            eps_rank: 1e-10,
            eps_res: 1e-8,
            restarts: 16,
            max_iter: 400,
            seed: 1,
        }
    }
}

impl ToleranceConfig {
    /// Same tolerances, different seed.
    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.eps_rank > 0.0 && self.eps_rank.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eps_rank must be positive and finite, got {}",
                self.eps_rank
            )));
        }
        if !(self.eps_res > 0.0 && self.eps_res.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "eps_res must be positive and finite, got {}",
                self.eps_res
            )));
        }
        if self.restarts == 0 {
            return Err(Error::InvalidConfig("restarts must be at least 1".into()));
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidConfig("max_iter must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_is_valid() {
        ToleranceConfig::default().validate().unwrap();
    }

    #[test]
    fn rejects_bad_values() {
        let base = ToleranceConfig::default();
        let bad = [
            ToleranceConfig { eps_rank: 0.0, ..base.clone() },
            ToleranceConfig { eps_res: f64::NAN, ..base.clone() },
            ToleranceConfig { restarts: 0, ..base.clone() },
            ToleranceConfig { max_iter: 0, ..base },
        ];
        for cfg in bad {
            assert!(cfg.validate().is_err(), "{cfg:?}");
        }
    }
}

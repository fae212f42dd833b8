use crate::error::{Error, Result};
use crate::model::{EvolutionRate, ModelParams};

pub const DEFAULT_NY: usize = 99;
pub const DEFAULT_STEPS_PER_PERIOD: usize = 4096;

/// Uniform space-time mesh on `(0, l0) × [0, T]`.
///
/// `dt = T / S` exactly, so pulse instants fall on step boundaries.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    /// Interior node count.
    pub ny: usize,
    pub steps_per_period: usize,
    pub l0: f64,
    pub period: f64,
}

impl Grid {
    pub fn new(params: &ModelParams, ny: usize, steps_per_period: usize) -> Result<Self> {
        if ny < 15 {
            return Err(Error::InvalidGrid(format!("ny must be >= 15, got {ny}")));
        }
        if steps_per_period < 16 {
            return Err(Error::InvalidGrid(format!("steps per period must be >= 16, got {steps_per_period}")));
        }
        if !(params.l0 > 0.0 && params.period > 0.0) {
            return Err(Error::InvalidGrid("l0 and T must be positive".into()));
        }
        Ok(Self { ny, steps_per_period, l0: params.l0, period: params.period })
    }

    pub fn default_for(params: &ModelParams) -> Result<Self> {
        Self::new(params, DEFAULT_NY, DEFAULT_STEPS_PER_PERIOD)
    }

    pub fn dy(&self) -> f64 {
        self.l0 / (self.ny + 1) as f64
    }

    pub fn dt(&self) -> f64 {
        self.period / self.steps_per_period as f64
    }

    /// Interior node `j` (0-based) sits at `y = (j + 1) dy`.
    pub fn node(&self, j: usize) -> f64 {
        (j + 1) as f64 * self.dy()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.ny).map(|j| self.node(j)).collect()
    }

    /// Time of step `k` in period `n`.
    pub fn time(&self, period_index: usize, k: usize) -> f64 {
        period_index as f64 * self.period + k as f64 * self.dt()
    }

    /// Worst-case `dt d ρ⁻² / dy²`. At or below one the discrete scheme is
    /// order preserving (nonnegative explicit weights, M-matrix implicit part).
    pub fn diffusion_ratio(&self, params: &ModelParams, rho: &EvolutionRate) -> f64 {
        self.dt() * params.d * rho.max_inv_sq() / self.dy().powi(2)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_coarse_grids() {
        let p = ModelParams::reference();
        assert!(Grid::new(&p, 14, 100).is_err());
        assert!(Grid::new(&p, 20, 15).is_err());
        assert!(Grid::new(&p, 15, 16).is_ok());
    }

    #[test]
    fn default_is_order_preserving_for_reference_rates() {
        let p = ModelParams::reference();
        let g = Grid::default_for(&p).unwrap();
        assert_eq!(g.dt() * g.steps_per_period as f64, p.period);
        for c in [-0.1, 0.1] {
            assert!(g.diffusion_ratio(&p, &EvolutionRate::exp_cosine(c, 2.0)) < 0.8);
        }
    }
}

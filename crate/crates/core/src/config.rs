//! Shared quadrature configuration.

use serde::{Deserialize, Serialize};

/// Knobs shared by every numeric routine: mollifier width, grid
/// resolutions, Monte-Carlo budget and seed, tolerances, truncation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QuadratureSpec {
    /// Base mollifier width ε₀; `None` ties it to box size / 50.
    pub eps: Option<f64>,
    /// Number of ε-halvings for the mollified path (levels j = 0..eps_levels).
    pub eps_levels: usize,
    /// Cells across the mollifier support in the transverse direction.
    pub cells_across: usize,
    /// Base tensor-grid resolution per axis for smooth quadratures.
    pub grid: usize,
    /// Monte-Carlo sample count.
    pub mc_samples: u64,
    /// RNG seed; mandatory whenever a Monte-Carlo path is taken.
    pub seed: u64,
    /// Target tolerance for residual checks.
    pub tol: f64,
    /// Truncation radius for noncompact base domains.
    pub cutoff: f64,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            eps: None,
            eps_levels: 4,
            cells_across: 8,
            grid: 48,
            mc_samples: 2_000_000,
            seed: 0x5eed_cafe,
            tol: 1e-4,
            cutoff: 12.0,
        }
    }
}

impl QuadratureSpec {
    /// Higher-resolution preset for the tighter regression tolerances.
    pub fn high_resolution() -> Self {
        Self {
            eps_levels: 4,
            cells_across: 16,
            grid: 96,
            mc_samples: 8_000_000,
            ..Self::default()
        }
    }

    /// Coarse preset for smoke tests and expensive oracles.
    pub fn coarse() -> Self {
        Self {
            eps_levels: 3,
            cells_across: 6,
            grid: 24,
            mc_samples: 500_000,
            ..Self::default()
        }
    }
}

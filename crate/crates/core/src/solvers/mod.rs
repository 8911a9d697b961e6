//! Recovery algorithms.
//!
//! [`omp`] recovers a sparse DFT spectrum from `y = A x̃` greedily.
//! [`tv`] recovers a signal with sparse finite differences by gradient
//! descent on a smoothed total-variation objective.

pub mod omp;
pub mod tv;

pub use omp::{omp_recover, OmpConfig};
pub use tv::{tv_gradient, tv_objective, tv_recover, TvConfig};

use crate::fourier::SpectralVector;
use crate::signals::{Grid, UniformSignal};

#[derive(Debug, Clone)]
pub struct RecoveryResult {
    /// Recovered samples on the uniform grid.
    pub recovered: Vec<f64>,
    /// Recovered spectrum, zero off the support (OMP only).
    pub spectrum: Option<SpectralVector>,
    /// Selected DFT bins in selection order (OMP only).
    pub support: Vec<usize>,
    pub iterations: usize,
    pub final_residual: f64,
    /// Residual norm after each OMP iteration, or objective value after each
    /// accepted TV step. Entry 0 is the starting value.
    pub history: Vec<f64>,
}

impl RecoveryResult {
    pub fn into_uniform(self, grid: Grid) -> crate::Result<UniformSignal> {
        UniformSignal::new(self.recovered, grid)
    }
}

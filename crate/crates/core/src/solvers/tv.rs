//! Gradient descent on a smoothed total-variation objective.
//!
//! Minimizes
//!
//! ```text
//! J(x) = ½‖M0 x − y‖² + λ Σ_n sqrt((x[n+1] − x[n])² + ε²)
//! ```
//!
//! with circular differences (`x[N] ≡ x[0]`), matching the periodic
//! extension implied by the Dirichlet-kernel observation matrix.

use super::RecoveryResult;
use crate::error::{invalid, Error, Result};
use crate::obs_matrix::ObservationMatrix;

/// Consecutive step halvings tolerated before giving up.
const MAX_HALVINGS: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TvConfig {
    /// Step length in units of `1 / ‖M0‖²` (estimated by power iteration).
    pub step_size: f64,
    /// TV weight in units of `‖y‖`.
    pub lambda: f64,
    /// Smoothing of the absolute value in each difference term.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Stop once `‖∇J‖ ≤ grad_tol`.
    pub grad_tol: f64,
}

impl Default for TvConfig {
    fn default() -> Self {
        Self {
            step_size: 1.0,
            lambda: 3e-3,
            epsilon: 0.3,
            max_iters: 10_000,
            grad_tol: 1e-8,
        }
    }
}

impl TvConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("step_size", self.step_size),
            ("lambda", self.lambda),
            ("epsilon", self.epsilon),
            ("grad_tol", self.grad_tol),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(format!("{name} must be > 0, got {v}")));
            }
        }
        if self.max_iters == 0 {
            return Err(invalid("max_iters must be >= 1"));
        }
        Ok(())
    }
}

/// `Σ_n sqrt((x[n+1] − x[n])² + ε²)` with circular wrap.
pub fn tv_objective(x: &[f64], epsilon: f64) -> f64 {
    let n = x.len();
    (0..n)
        .map(|i| {
            let d = x[(i + 1) % n] - x[i];
            (d * d + epsilon * epsilon).sqrt()
        })
        .sum()
}

/// Analytic gradient of [`tv_objective`].
pub fn tv_gradient(x: &[f64], epsilon: f64) -> Vec<f64> {
    let n = x.len();
    // w[i] = d_i / s_i for the difference leaving sample i
    let w: Vec<f64> = (0..n)
        .map(|i| {
            let d = x[(i + 1) % n] - x[i];
            d / (d * d + epsilon * epsilon).sqrt()
        })
        .collect();
    (0..n).map(|i| w[(i + n - 1) % n] - w[i]).collect()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|a| a * a).sum::<f64>().sqrt()
}

struct Problem<'a> {
    m0: &'a ObservationMatrix,
    y: &'a [f64],
    lambda: f64,
    epsilon: f64,
}

impl Problem<'_> {
    fn residual(&self, x: &[f64]) -> Result<Vec<f64>> {
        let mut r = self.m0.apply(x)?;
        for (ri, yi) in r.iter_mut().zip(self.y) {
            *ri -= yi;
        }
        Ok(r)
    }

    /// `J(x)` together with the residual `M0 x − y` it was computed from.
    fn objective(&self, x: &[f64]) -> Result<(f64, Vec<f64>)> {
        let r = self.residual(x)?;
        let j = 0.5 * r.iter().map(|v| v * v).sum::<f64>()
            + self.lambda * tv_objective(x, self.epsilon);
        Ok((j, r))
    }

    fn gradient(&self, x: &[f64], residual: &[f64]) -> Result<Vec<f64>> {
        let mut g = self.m0.apply_transpose(residual)?;
        for (gi, ti) in g.iter_mut().zip(tv_gradient(x, self.epsilon)) {
            *gi += self.lambda * ti;
        }
        Ok(g)
    }
}

/// Recovers a gradient-sparse signal from `y ≈ M0 x`.
///
/// Starts from `x_init`, or `M0ᵀ y` when `None`. Takes fixed-length steps
/// along `-∇J`, halving the step whenever a trial step would increase `J`.
/// Stops after `max_iters` accepted steps or once the gradient norm drops to
/// `grad_tol`.
pub fn tv_recover(
    m0: &ObservationMatrix,
    y: &[f64],
    cfg: &TvConfig,
    x_init: Option<&[f64]>,
) -> Result<RecoveryResult> {
    cfg.validate()?;
    if y.len() != m0.rows() {
        return Err(Error::DimensionMismatch {
            expected: m0.rows(),
            actual: y.len(),
        });
    }
    let mut x = match x_init {
        Some(x0) if x0.len() != m0.cols() => {
            return Err(Error::DimensionMismatch {
                expected: m0.cols(),
                actual: x0.len(),
            })
        }
        Some(x0) => x0.to_vec(),
        None => m0.apply_transpose(y)?,
    };

    let problem = Problem {
        m0,
        y,
        lambda: cfg.lambda * norm(y),
        epsilon: cfg.epsilon,
    };
    let lipschitz = m0.spectral_norm_sq(20);
    let mut step = if lipschitz > 0.0 {
        cfg.step_size / lipschitz
    } else {
        cfg.step_size
    };

    let (mut objective, mut residual) = problem.objective(&x)?;
    let mut history = vec![objective];
    let mut grad = problem.gradient(&x, &residual)?;
    let mut iterations = 0;
    let mut trial = vec![0.0; x.len()];

    'outer: while iterations < cfg.max_iters && norm(&grad) > cfg.grad_tol {
        let mut halvings = 0;
        loop {
            for ((t, xi), gi) in trial.iter_mut().zip(&x).zip(&grad) {
                *t = xi - step * gi;
            }
            let (candidate, r) = problem.objective(&trial)?;
            if candidate <= objective {
                std::mem::swap(&mut x, &mut trial);
                objective = candidate;
                residual = r;
                break;
            }
            if halvings == MAX_HALVINGS {
                // Rounding noise at a stationary point looks like an increase.
                if candidate - objective <= 1e-12 * objective.abs().max(f64::MIN_POSITIVE) {
                    break 'outer;
                }
                return Err(Error::NonConvergence {
                    history_len: history.len(),
                });
            }
            step *= 0.5;
            halvings += 1;
        }
        history.push(objective);
        grad = problem.gradient(&x, &residual)?;
        iterations += 1;
    }

    Ok(RecoveryResult {
        final_residual: norm(&residual),
        recovered: x,
        spectrum: None,
        support: Vec::new(),
        iterations,
        history,
    })
}

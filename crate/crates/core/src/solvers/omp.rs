//! Orthogonal matching pursuit over a complex sensing matrix.

use nalgebra::{DMatrix, DVector};
use ndarray::Array2;
use num_complex::Complex64;

use super::RecoveryResult;
use crate::error::{invalid, Error, Result};
use crate::fourier::{DftBasis, SpectralVector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OmpConfig {
    /// Stop once the support holds at least this many bins.
    pub max_atoms: usize,
    /// Stop once `‖r‖ ≤ residual_tol · ‖y‖`.
    pub residual_tol: f64,
    /// Add bin `(N - k) mod N` together with each selected bin `k`, so the
    /// spectrum of a real signal stays conjugate symmetric.
    pub conjugate_pairing: bool,
}

impl Default for OmpConfig {
    fn default() -> Self {
        Self {
            max_atoms: 16,
            residual_tol: 1e-12,
            conjugate_pairing: true,
        }
    }
}

impl OmpConfig {
    pub fn validate(&self, n: usize) -> Result<()> {
        if self.max_atoms == 0 || self.max_atoms > n {
            return Err(invalid(format!(
                "max_atoms must lie in 1..={n}, got {}",
                self.max_atoms
            )));
        }
        if self.residual_tol.is_nan() || self.residual_tol < 0.0 {
            return Err(invalid("residual_tol must be >= 0"));
        }
        Ok(())
    }
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// Least squares `min ‖y - A_S c‖` by Householder QR of the selected columns.
fn least_squares(
    a: &Array2<Complex64>,
    support: &[usize],
    y: &[Complex64],
) -> Result<Vec<Complex64>> {
    let rows = a.nrows();
    let sub = DMatrix::from_fn(rows, support.len(), |i, j| a[[i, support[j]]]);
    let qr = sub.qr();
    let r = qr.r();
    let diag_max = r.diagonal().iter().map(|d| d.norm()).fold(0.0, f64::max);
    if diag_max == 0.0 || r.diagonal().iter().any(|d| d.norm() <= 1e-12 * diag_max) {
        return Err(Error::SingularSystem {
            support: support.to_vec(),
        });
    }
    let rhs = qr.q().adjoint() * DVector::from_column_slice(y);
    let coeffs = r
        .solve_upper_triangular(&rhs)
        .ok_or_else(|| Error::SingularSystem {
            support: support.to_vec(),
        })?;
    Ok(coeffs.iter().copied().collect())
}

/// Greedy sparse recovery of `x̃` from `y ≈ A x̃`.
///
/// Each iteration picks the column with the largest normalized correlation
/// `|⟨a_j, r⟩| / ‖a_j‖` (lowest index wins ties), optionally adds its
/// conjugate partner, refits all selected coefficients by least squares on
/// the raw columns and updates the residual. The time-domain output is the
/// real part of `Ψ*` applied to the sparse spectrum.
pub fn omp_recover(a: &Array2<Complex64>, y: &[f64], cfg: &OmpConfig) -> Result<RecoveryResult> {
    let (m, n) = a.dim();
    if m == 0 {
        return Err(invalid("sensing matrix has no rows"));
    }
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            actual: y.len(),
        });
    }
    cfg.validate(n)?;

    let y: Vec<Complex64> = y.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let y_norm = norm(&y);
    let col_norms: Vec<f64> = a
        .columns()
        .into_iter()
        .map(|c| c.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt())
        .collect();

    let mut selected = vec![false; n];
    let mut support: Vec<usize> = Vec::new();
    let mut coeffs: Vec<Complex64> = Vec::new();
    let mut residual = y.clone();
    let mut r_norm = y_norm;
    let mut history = vec![r_norm];
    let mut iterations = 0;

    while support.len() < cfg.max_atoms && r_norm > cfg.residual_tol * y_norm {
        let mut best: Option<(usize, f64)> = None;
        for (j, col) in a.columns().into_iter().enumerate() {
            if selected[j] || col_norms[j] == 0.0 {
                continue;
            }
            let corr: Complex64 = col.iter().zip(&residual).map(|(c, r)| c.conj() * r).sum();
            let score = corr.norm() / col_norms[j];
            if best.is_none_or(|(_, s)| score > s) {
                best = Some((j, score));
            }
        }
        let Some((pick, score)) = best else { break };
        if score == 0.0 {
            break;
        }

        selected[pick] = true;
        support.push(pick);
        if cfg.conjugate_pairing {
            let partner = (n - pick) % n;
            if !selected[partner] {
                selected[partner] = true;
                support.push(partner);
            }
        }
        if support.len() > m {
            return Err(Error::OverSelection {
                selected: support.len(),
                measurements: m,
            });
        }

        coeffs = least_squares(a, &support, &y)?;
        for (i, r) in residual.iter_mut().enumerate() {
            let fit: Complex64 = support
                .iter()
                .zip(&coeffs)
                .map(|(&j, c)| a[[i, j]] * c)
                .sum();
            *r = y[i] - fit;
        }
        r_norm = norm(&residual);
        history.push(r_norm);
        iterations += 1;
    }

    let mut spectrum = SpectralVector::zeros(n);
    for (&j, &c) in support.iter().zip(&coeffs) {
        spectrum.coeffs[j] = c;
    }
    let recovered = DftBasis::new(n)
        .adjoint(&spectrum)?
        .into_iter()
        .map(|v| v.re)
        .collect();

    Ok(RecoveryResult {
        recovered,
        spectrum: Some(spectrum),
        support,
        iterations,
        final_residual: r_norm,
        history,
    })
}

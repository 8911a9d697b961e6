//! Observation matrices mapping a uniform grid onto random sample instants.
//!
//! Row `m`, column `n` of every matrix is a kernel evaluated at
//! `theta = (t_m - origin) / T - n`, the offset of instant `t_m` from grid
//! point `n` in units of the sampling interval. Three kernels are provided:
//!
//! * [`MatrixMethod::Naive`]: a single `sinc(theta)`. Ignores the implicit
//!   periodicity of the DFT grid.
//! * [`MatrixMethod::Truncated`]: `sum_{p=-P/2+1}^{P/2} sinc(theta + pN)`, a
//!   direct but slowly converging sum over shifted periods.
//! * [`MatrixMethod::Poisson`]: the exact periodization in closed form,
//!   `sin(πθ) / (N tan(πθ/N))` for even `N`.

use std::f64::consts::PI;
use std::io::Write;

use ndarray::{Array1, Array2, ArrayView1};
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::signals::{check_strictly_increasing, Grid};

/// Distance from a multiple of `N` below which the closed-form kernel
/// returns its limit value.
pub const SINGULARITY_EPS: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MatrixMethod {
    Naive,
    /// Truncated periodic sum with `P` terms.
    Truncated(usize),
    Poisson,
}

impl MatrixMethod {
    pub fn name(&self) -> &'static str {
        match self {
            MatrixMethod::Naive => "naive",
            MatrixMethod::Truncated(_) => "truncated",
            MatrixMethod::Poisson => "poisson",
        }
    }

    pub fn terms(&self) -> Option<usize> {
        match *self {
            MatrixMethod::Truncated(p) => Some(p),
            _ => None,
        }
    }
}

impl std::fmt::Display for MatrixMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            MatrixMethod::Truncated(p) => write!(f, "truncated(P={p})"),
            m => f.write_str(m.name()),
        }
    }
}

/// Normalized sinc, `sin(πx) / (πx)` with `sinc(0) = 1`.
#[inline]
pub fn sinc(x: f64) -> f64 {
    if x == 0.0 {
        1.0
    } else {
        let a = PI * x;
        a.sin() / a
    }
}

fn check_even_grid(n: usize) -> Result<()> {
    if n < 2 || !n.is_multiple_of(2) {
        return Err(invalid(format!(
            "periodized sinc requires an even grid length >= 2, got {n}"
        )));
    }
    Ok(())
}

/// Exact periodization `sum_p sinc(theta + pN)` for even `n`, evaluated in
/// closed form as `sin(πθ) / (N tan(πθ/N))`.
pub fn periodized_sinc(theta: f64, n: usize) -> Result<f64> {
    check_even_grid(n)?;
    Ok(dirichlet(theta, n as f64))
}

/// Closed-form kernel; `n` must be even.
#[inline]
fn dirichlet(theta: f64, n: f64) -> f64 {
    // Period N for even N. Reduce to (-N/2, N/2] so large offsets keep full
    // precision in the sine.
    let mut r = theta.rem_euclid(n);
    if r > 0.5 * n {
        r -= n;
    }
    if r.abs() < SINGULARITY_EPS {
        // limit of sin(πθ)/(N tan(πθ/N)) at θ = qN for even N
        return 1.0;
    }
    (PI * r).sin() / (n * (PI * r / n).tan())
}

/// Dense row-major M×N observation matrix together with the data it was
/// built from.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationMatrix {
    entries: Array2<f64>,
    method: MatrixMethod,
    times: Vec<f64>,
    grid: Grid,
}

impl ObservationMatrix {
    pub fn entries(&self) -> &Array2<f64> {
        &self.entries
    }

    pub fn method(&self) -> MatrixMethod {
        self.method
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    /// True when there are no more measurements than grid points, the regime
    /// the recovery methods target.
    pub fn is_undersampled(&self) -> bool {
        self.rows() <= self.cols()
    }

    /// `M0 · x`
    pub fn apply(&self, x: &[f64]) -> Result<Vec<f64>> {
        self.check_len(x.len(), self.cols())?;
        Ok(self.entries.dot(&ArrayView1::from(x)).to_vec())
    }

    /// `M0ᵀ · y`
    pub fn apply_transpose(&self, y: &[f64]) -> Result<Vec<f64>> {
        self.check_len(y.len(), self.rows())?;
        Ok(self.entries.t().dot(&ArrayView1::from(y)).to_vec())
    }

    fn check_len(&self, actual: usize, expected: usize) -> Result<()> {
        if actual != expected {
            return Err(Error::DimensionMismatch { expected, actual });
        }
        Ok(())
    }

    /// Estimate of the largest eigenvalue of `M0ᵀ M0` (the squared spectral
    /// norm) from `iters` power iterations started at the all-ones vector.
    pub fn spectral_norm_sq(&self, iters: usize) -> f64 {
        let mut v = Array1::<f64>::ones(self.cols());
        let mut lambda = 0.0;
        for _ in 0..iters {
            let norm = v.dot(&v).sqrt();
            if norm == 0.0 {
                return 0.0;
            }
            v /= norm;
            let w = self.entries.t().dot(&self.entries.dot(&v));
            lambda = v.dot(&w);
            v = w;
        }
        lambda
    }

    /// Writes the matrix as CSV: a `M,N,method,P` header line, the header
    /// values, then one line of `N` comma-separated entries per row. `P` is
    /// empty unless the method is truncated.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "M,N,method,P")?;
        writeln!(
            out,
            "{},{},{},{}",
            self.rows(),
            self.cols(),
            self.method.name(),
            self.method
                .terms()
                .map(|p| p.to_string())
                .unwrap_or_default()
        )?;
        for row in self.entries.rows() {
            let line: Vec<String> = row.iter().map(|v| format!("{v:e}")).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn write_json<W: Write>(&self, out: W) -> Result<()> {
        #[derive(Serialize)]
        struct Doc<'a> {
            #[serde(rename = "M")]
            m: usize,
            #[serde(rename = "N")]
            n: usize,
            method: &'static str,
            #[serde(rename = "P")]
            p: Option<usize>,
            times: &'a [f64],
            grid: &'a Grid,
            entries: Vec<Vec<f64>>,
        }
        let doc = Doc {
            m: self.rows(),
            n: self.cols(),
            method: self.method.name(),
            p: self.method.terms(),
            times: &self.times,
            grid: &self.grid,
            entries: self
                .entries
                .rows()
                .into_iter()
                .map(|r| r.to_vec())
                .collect(),
        };
        serde_json::to_writer(out, &doc)?;
        Ok(())
    }
}

fn check_times(times: &[f64]) -> Result<()> {
    if times.is_empty() {
        return Err(invalid("observation matrix needs at least one sample time"));
    }
    if times.iter().any(|t| !t.is_finite()) {
        return Err(invalid("sample times must be finite"));
    }
    check_strictly_increasing(times)
}

fn fill(
    times: &[f64],
    grid: &Grid,
    method: MatrixMethod,
    kernel: impl Fn(f64) -> f64,
) -> Result<ObservationMatrix> {
    check_times(times)?;
    let (m, n) = (times.len(), grid.len);
    let mut entries = Array2::<f64>::zeros((m, n));
    for (mut row, &t) in entries.rows_mut().into_iter().zip(times) {
        let offset = (t - grid.origin) / grid.interval;
        for (col, e) in row.iter_mut().enumerate() {
            *e = kernel(offset - col as f64);
        }
    }
    Ok(ObservationMatrix {
        entries,
        method,
        times: times.to_vec(),
        grid: *grid,
    })
}

/// Plain Whittaker-Shannon interpolation matrix, `sinc(theta)`.
pub fn build_naive(times: &[f64], grid: &Grid) -> Result<ObservationMatrix> {
    fill(times, grid, MatrixMethod::Naive, sinc)
}

/// Periodic sum truncated to `p_terms` shifts `p = -P/2+1 ..= P/2`, each
/// evaluated directly.
pub fn build_truncated(times: &[f64], grid: &Grid, p_terms: usize) -> Result<ObservationMatrix> {
    if p_terms == 0 || !p_terms.is_multiple_of(2) {
        return Err(invalid(format!(
            "truncation term count must be even and >= 2, got {p_terms}"
        )));
    }
    let n = grid.len as f64;
    let half = (p_terms / 2) as i64;
    fill(times, grid, MatrixMethod::Truncated(p_terms), |theta| {
        (-half + 1..=half).map(|p| sinc(theta + p as f64 * n)).sum()
    })
}

/// Closed-form periodized sinc. One kernel evaluation per entry.
pub fn build_poisson(times: &[f64], grid: &Grid) -> Result<ObservationMatrix> {
    check_even_grid(grid.len)?;
    let n = grid.len as f64;
    fill(times, grid, MatrixMethod::Poisson, |theta| {
        dirichlet(theta, n)
    })
}

pub fn build(method: MatrixMethod, times: &[f64], grid: &Grid) -> Result<ObservationMatrix> {
    match method {
        MatrixMethod::Naive => build_naive(times, grid),
        MatrixMethod::Truncated(p) => build_truncated(times, grid, p),
        MatrixMethod::Poisson => build_poisson(times, grid),
    }
}

//! Unitary DFT basis `Ψ` and the sensing matrix `A = M0 · Ψ*`.
//!
//! Both directions carry a `1/√N` factor so `ΨΨ* = Ψ*Ψ = I` holds exactly.
//! Bin `k` runs over `0..N`; negative frequencies live at `N - k`.

use std::f64::consts::PI;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::obs_matrix::ObservationMatrix;

/// Coefficients of a vector in the unitary DFT basis.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralVector {
    pub coeffs: Vec<Complex64>,
}

impl SpectralVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            coeffs: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
    }

    /// Indices of coefficients whose magnitude exceeds `tol`.
    pub fn support(&self, tol: f64) -> Vec<usize> {
        self.coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| c.norm() > tol)
            .map(|(k, _)| k)
            .collect()
    }
}

/// Explicit unitary DFT of a fixed length.
///
/// Keeps a table of the `N` distinct twiddles and the real and imaginary
/// parts of `Ψ*` as dense matrices for building sensing matrices.
#[derive(Debug, Clone)]
pub struct DftBasis {
    n: usize,
    scale: f64,
    // twiddle[j] = exp(-2πi j / N)
    twiddle: Vec<Complex64>,
    adjoint_re: Array2<f64>,
    adjoint_im: Array2<f64>,
}

impl DftBasis {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "DFT length must be >= 1");
        let twiddle: Vec<Complex64> = (0..n)
            .map(|j| Complex64::from_polar(1.0, -2.0 * PI * j as f64 / n as f64))
            .collect();
        let scale = 1.0 / (n as f64).sqrt();
        // Ψ*[row n][col k] = exp(+2πi kn/N) / √N = conj(twiddle[kn mod N]) / √N
        let adjoint_re = Array2::from_shape_fn((n, n), |(r, k)| twiddle[(r * k) % n].re * scale);
        let adjoint_im = Array2::from_shape_fn((n, n), |(r, k)| -twiddle[(r * k) % n].im * scale);
        Self {
            n,
            scale,
            twiddle,
            adjoint_re,
            adjoint_im,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    fn check(&self, len: usize) -> Result<()> {
        if len != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.n,
                actual: len,
            });
        }
        Ok(())
    }

    /// `X[k] = (1/√N) Σ_n x[n] exp(-2πi kn/N)`
    pub fn forward(&self, x: &[Complex64]) -> Result<SpectralVector> {
        self.check(x.len())?;
        let n = self.n;
        let coeffs = (0..n)
            .map(|k| {
                let acc: Complex64 = x
                    .iter()
                    .enumerate()
                    .map(|(i, &v)| v * self.twiddle[(k * i) % n])
                    .sum();
                acc * self.scale
            })
            .collect();
        Ok(SpectralVector { coeffs })
    }

    pub fn forward_real(&self, x: &[f64]) -> Result<SpectralVector> {
        let z: Vec<Complex64> = x.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.forward(&z)
    }

    /// `x[n] = (1/√N) Σ_k X[k] exp(+2πi kn/N)`
    pub fn adjoint(&self, spectrum: &SpectralVector) -> Result<Vec<Complex64>> {
        self.check(spectrum.len())?;
        let n = self.n;
        Ok((0..n)
            .map(|i| {
                let acc: Complex64 = spectrum
                    .coeffs
                    .iter()
                    .enumerate()
                    .map(|(k, &c)| c * self.twiddle[(k * i) % n].conj())
                    .sum();
                acc * self.scale
            })
            .collect())
    }

    /// Column `k` of `Ψ*`, the `k`-th inverse-DFT basis vector.
    pub fn adjoint_column(&self, k: usize) -> Vec<Complex64> {
        (0..self.n)
            .map(|r| Complex64::new(self.adjoint_re[[r, k]], self.adjoint_im[[r, k]]))
            .collect()
    }

    /// `A = M0 · Ψ*`, computed as two real products.
    pub fn sensing_matrix(&self, m0: &ObservationMatrix) -> Result<Array2<Complex64>> {
        self.check(m0.cols())?;
        let re = m0.entries().dot(&self.adjoint_re);
        let im = m0.entries().dot(&self.adjoint_im);
        Ok(ndarray::Zip::from(&re)
            .and(&im)
            .map_collect(|&a, &b| Complex64::new(a, b)))
    }
}

pub fn dft_forward(x: &[Complex64]) -> SpectralVector {
    DftBasis::new(x.len().max(1))
        .forward(x)
        .expect("basis sized to input")
}

pub fn dft_adjoint(spectrum: &SpectralVector) -> Vec<Complex64> {
    DftBasis::new(spectrum.len().max(1))
        .adjoint(spectrum)
        .expect("basis sized to input")
}

pub fn sensing_matrix(m0: &ObservationMatrix) -> Array2<Complex64> {
    DftBasis::new(m0.cols())
        .sensing_matrix(m0)
        .expect("basis sized to matrix")
}

//! Recovery of uniformly gridded signals from randomly timed samples.
//!
//! The pipeline is:
//!
//! 1. [`signals`] generates a continuous test signal, its uniform reference
//!    grid and a sorted set of i.i.d. uniform sample instants.
//! 2. [`obs_matrix`] builds the M×N observation matrix that interpolates the
//!    uniform grid onto the random instants, either with a plain sinc kernel,
//!    a truncated sum of shifted sincs, or the closed-form periodized sinc
//!    (Dirichlet kernel).
//! 3. [`fourier`] supplies the unitary DFT basis and the sensing matrix
//!    `A = M0 · Ψ*`.
//! 4. [`solvers`] recovers the signal with orthogonal matching pursuit in the
//!    Fourier domain, or with smoothed total-variation gradient descent in the
//!    time domain.
//! 5. [`experiments`] runs seeded, repeated trials and reports errors and
//!    timings.
//!
//! Grid indices are 0-based throughout: sample `n` of a [`signals::Grid`]
//! sits at `origin + n * interval`.

pub mod error;
pub mod experiments;
pub mod fourier;
pub mod obs_matrix;
pub mod report;
pub mod signals;
pub mod solvers;

pub use error::{Error, Result};

//! Seeded, repeated recovery experiments.
//!
//! A run draws random instants, samples the continuous signal there, builds
//! the observation matrix (timed), recovers the uniform grid (timed) and
//! scores the result against the true grid samples. Every run gets its own
//! seed derived from the master seed and run index, so a batch gives the
//! same numbers whatever order or thread count it is executed with.

use std::time::Instant;

use rayon::prelude::*;

use crate::error::{invalid, Error, Result};
use crate::fourier::DftBasis;
use crate::obs_matrix::{build, MatrixMethod, ObservationMatrix};
use crate::signals::{
    draw_random_times, sample_at, sample_grid, ContinuousSignal, GaussPulseParams, Grid,
    SignalKind, SquareParams, TrigParams,
};
use crate::solvers::{omp_recover, tv_recover, OmpConfig, RecoveryResult, TvConfig};

/// `‖x_rec − x_ref‖₂ / ‖x_ref‖₂`
pub fn relative_l2_error(recovered: &[f64], reference: &[f64]) -> Result<f64> {
    if recovered.len() != reference.len() {
        return Err(Error::DimensionMismatch {
            expected: reference.len(),
            actual: recovered.len(),
        });
    }
    let ref_norm = reference.iter().map(|v| v * v).sum::<f64>().sqrt();
    if ref_norm == 0.0 {
        return Err(Error::UndefinedReference);
    }
    let diff = recovered
        .iter()
        .zip(reference)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt();
    Ok(diff / ref_norm)
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed of run `run_id`: `splitmix64(master ^ splitmix64(run_id))`.
pub fn derive_run_seed(master_seed: u64, run_id: usize) -> u64 {
    splitmix64(master_seed ^ splitmix64(run_id as u64))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    Trig,
    GaussPulse,
    Square,
}

impl Preset {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "trig" => Some(Preset::Trig),
            "gauspuls" => Some(Preset::GaussPulse),
            "square" => Some(Preset::Square),
            _ => None,
        }
    }
}

/// Sampling rate of the square-wave preset. A power of two keeps every grid
/// time and every edge of the wave exactly representable.
pub const SQUARE_SAMPLE_RATE: f64 = 1024.0;

/// Gaussian pulse preset: 50 kHz, 60 % bandwidth at −6 dB, truncated at −60 dB.
pub const GAUSS_SAMPLE_RATE: f64 = 10e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Solver {
    Omp(OmpConfig),
    Tv(TvConfig),
}

impl Solver {
    pub fn name(&self) -> &'static str {
        match self {
            Solver::Omp(_) => "omp",
            Solver::Tv(_) => "tv",
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentConfig {
    pub signal: ContinuousSignal,
    /// Reference grid; random instants are drawn from `[origin, origin + len·T)`.
    pub grid: Grid,
    /// Number of random samples `M`.
    pub measurements: usize,
    pub method: MatrixMethod,
    pub solver: Solver,
    pub runs: usize,
    pub master_seed: u64,
}

impl ExperimentConfig {
    /// Four-tone signal, `N = 256` at 800 Hz, `M = 64`, Poisson matrix, OMP.
    pub fn trig() -> Self {
        Self {
            signal: ContinuousSignal::trig(TrigParams::default()).expect("valid defaults"),
            grid: Grid::new(0.0, 1.0 / 800.0, 256).expect("valid grid"),
            measurements: 64,
            method: MatrixMethod::Poisson,
            solver: Solver::Omp(OmpConfig::default()),
            runs: 50,
            master_seed: 0,
        }
    }

    /// Gaussian pulse sampled at 10 MHz over `[-t_cut, t_cut]` (`N = 928`),
    /// `M = 93`, Poisson matrix, OMP.
    pub fn gauss_pulse() -> Self {
        let params = GaussPulseParams::default();
        let interval = 1.0 / GAUSS_SAMPLE_RATE;
        Self {
            signal: ContinuousSignal::gauss_pulse(params).expect("valid defaults"),
            grid: Grid::new(-params.cutoff(), interval, params.grid_len(interval))
                .expect("valid grid"),
            measurements: 93,
            method: MatrixMethod::Poisson,
            solver: Solver::Omp(OmpConfig {
                max_atoms: 24,
                residual_tol: 1e-12,
                conjugate_pairing: true,
            }),
            runs: 50,
            master_seed: 0,
        }
    }

    /// Unit square wave, two 120-sample periods on `N = 240`, `M = 80`,
    /// Poisson matrix, TV.
    pub fn square() -> Self {
        let interval = 1.0 / SQUARE_SAMPLE_RATE;
        let params = SquareParams {
            period: 120.0 * interval,
            duty: 0.5,
            amplitude: 1.0,
        };
        Self {
            signal: ContinuousSignal::square(params).expect("valid defaults"),
            grid: Grid::new(0.0, interval, 240).expect("valid grid"),
            measurements: 80,
            method: MatrixMethod::Poisson,
            solver: Solver::Tv(TvConfig::default()),
            runs: 50,
            master_seed: 0,
        }
    }

    pub fn preset(preset: Preset) -> Self {
        match preset {
            Preset::Trig => Self::trig(),
            Preset::GaussPulse => Self::gauss_pulse(),
            Preset::Square => Self::square(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.runs == 0 {
            return Err(invalid("runs must be >= 1"));
        }
        if self.measurements == 0 {
            return Err(invalid("number of measurements must be >= 1"));
        }
        match self.solver {
            Solver::Omp(cfg) => cfg.validate(self.grid.len),
            Solver::Tv(cfg) => cfg.validate(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub run_id: usize,
    pub seed: u64,
    /// Relative l2 error, or `None` if the run failed.
    pub error: Option<f64>,
    pub build_time_s: f64,
    pub solve_time_s: f64,
    pub failure: Option<String>,
}

/// Recovered grid together with the reference it is scored against.
#[derive(Debug, Clone)]
pub struct RunOutput {
    pub record: RunRecord,
    pub recovered: Option<Vec<f64>>,
    pub reference: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentReport {
    pub signal: SignalKind,
    pub method: MatrixMethod,
    pub solver: &'static str,
    pub measurements: usize,
    pub grid_len: usize,
    pub runs: Vec<RunRecord>,
    pub aggregates: Aggregates,
}

/// Means over the successful runs of a report.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aggregates {
    pub mean_error: Option<f64>,
    pub mean_build_time_s: Option<f64>,
    pub mean_solve_time_s: Option<f64>,
    pub succeeded: usize,
    pub failed: usize,
}

impl Aggregates {
    pub fn from_runs(runs: &[RunRecord]) -> Self {
        let ok: Vec<&RunRecord> = runs.iter().filter(|r| r.error.is_some()).collect();
        let mean = |f: &dyn Fn(&RunRecord) -> f64| {
            if ok.is_empty() {
                None
            } else {
                Some(ok.iter().map(|r| f(r)).sum::<f64>() / ok.len() as f64)
            }
        };
        Self {
            mean_error: mean(&|r| r.error.unwrap_or(0.0)),
            mean_build_time_s: mean(&|r| r.build_time_s),
            mean_solve_time_s: mean(&|r| r.solve_time_s),
            succeeded: ok.len(),
            failed: runs.len() - ok.len(),
        }
    }
}

impl ExperimentReport {
    /// True when the stored aggregates equal the means recomputed from the
    /// per-run records.
    pub fn aggregates_consistent(&self) -> bool {
        Aggregates::from_runs(&self.runs) == self.aggregates
    }

    pub fn all_failed(&self) -> bool {
        self.aggregates.succeeded == 0
    }

    pub fn max_error(&self) -> Option<f64> {
        self.runs.iter().filter_map(|r| r.error).reduce(f64::max)
    }
}

fn recover(
    cfg: &ExperimentConfig,
    basis: Option<&DftBasis>,
    seed: u64,
) -> Result<(Vec<f64>, f64, f64)> {
    let window = cfg.grid.duration();
    let times = draw_random_times(cfg.measurements, window, cfg.grid.origin, seed)?;
    let samples = sample_at(&cfg.signal, &times)?;

    let start = Instant::now();
    let m0 = build(cfg.method, &samples.times.times, &cfg.grid)?;
    let build_time = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let recovered = solve(&cfg.solver, &m0, &samples.values, basis)?.recovered;
    let solve_time = start.elapsed().as_secs_f64();
    Ok((recovered, build_time, solve_time))
}

/// Recovers the uniform grid behind `y ≈ M0 x` with the given solver.
///
/// OMP works in the DFT domain of `M0`'s grid; pass a prebuilt `basis` of
/// that length to reuse its tables, or `None` to build one.
pub fn solve(
    solver: &Solver,
    m0: &ObservationMatrix,
    y: &[f64],
    basis: Option<&DftBasis>,
) -> Result<RecoveryResult> {
    match solver {
        Solver::Omp(omp) => {
            let owned;
            let basis = match basis {
                Some(b) => b,
                None => {
                    owned = DftBasis::new(m0.cols());
                    &owned
                }
            };
            let a = basis.sensing_matrix(m0)?;
            omp_recover(&a, y, omp)
        }
        Solver::Tv(tv) => tv_recover(m0, y, tv, None),
    }
}

fn basis_for(cfg: &ExperimentConfig) -> Option<DftBasis> {
    matches!(cfg.solver, Solver::Omp(_)).then(|| DftBasis::new(cfg.grid.len))
}

fn run_with_basis(
    cfg: &ExperimentConfig,
    basis: Option<&DftBasis>,
    run_id: usize,
    seed: u64,
) -> RunOutput {
    let reference = sample_grid(&cfg.signal, &cfg.grid).values;
    let outcome = recover(cfg, basis, seed)
        .and_then(|(x, b, s)| relative_l2_error(&x, &reference).map(|e| (x, e, b, s)));
    let record = |error, build, solve, failure| RunRecord {
        run_id,
        seed,
        error,
        build_time_s: build,
        solve_time_s: solve,
        failure,
    };
    match outcome {
        Ok((x, err, b, s)) => RunOutput {
            record: record(Some(err), b, s, None),
            recovered: Some(x),
            reference,
        },
        Err(e) => RunOutput {
            record: record(None, 0.0, 0.0, Some(e.to_string())),
            recovered: None,
            reference,
        },
    }
}

/// Runs one trial with an explicit seed. Replaying a recorded seed
/// reproduces that run's error exactly.
pub fn run_single(cfg: &ExperimentConfig, run_id: usize, seed: u64) -> Result<RunOutput> {
    cfg.validate()?;
    Ok(run_with_basis(cfg, basis_for(cfg).as_ref(), run_id, seed))
}

/// Runs `cfg.runs` seeded trials on the current rayon pool. Solver failures
/// are recorded per run rather than aborting the batch.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    cfg.validate()?;
    let basis = basis_for(cfg);
    let runs: Vec<RunRecord> = (0..cfg.runs)
        .into_par_iter()
        .map(|r| run_with_basis(cfg, basis.as_ref(), r, derive_run_seed(cfg.master_seed, r)).record)
        .collect();
    let aggregates = Aggregates::from_runs(&runs);
    let report = ExperimentReport {
        signal: cfg.signal.kind(),
        method: cfg.method,
        solver: cfg.solver.name(),
        measurements: cfg.measurements,
        grid_len: cfg.grid.len,
        runs,
        aggregates,
    };
    debug_assert!(report.aggregates_consistent());
    Ok(report)
}

/// Default truncation sweep for error/time versus `P` plots.
pub const DEFAULT_SWEEP: [usize; 5] = [2, 20, 200, 2000, 20000];

/// One report per `P` using the truncated matrix, followed by a Poisson
/// baseline report. All reports share `cfg.master_seed`, so every `P` sees
/// the same sample instants.
pub fn sweep_truncation(cfg: &ExperimentConfig, p_list: &[usize]) -> Result<Vec<ExperimentReport>> {
    if p_list.is_empty() {
        return Err(invalid("truncation sweep needs at least one P"));
    }
    if let Some(p) = p_list.iter().find(|&&p| p == 0 || !p.is_multiple_of(2)) {
        return Err(invalid(format!(
            "truncation term counts must be even, got {p}"
        )));
    }
    let mut reports = Vec::with_capacity(p_list.len() + 1);
    for &p in p_list {
        let c = ExperimentConfig {
            method: MatrixMethod::Truncated(p),
            ..cfg.clone()
        };
        reports.push(run_experiment(&c)?);
    }
    let baseline = ExperimentConfig {
        method: MatrixMethod::Poisson,
        ..cfg.clone()
    };
    reports.push(run_experiment(&baseline)?);
    Ok(reports)
}

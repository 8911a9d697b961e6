//! End-to-end acceptance checks. Each criterion prints one PASS or FAIL line;
//! the process exits non-zero if any criterion fails.

use std::process::Command;
use std::sync::OnceLock;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use randsamp::experiments::{
    relative_l2_error, run_experiment, run_single, sweep_truncation, ExperimentConfig,
    ExperimentReport,
};
use randsamp::fourier::DftBasis;
use randsamp::obs_matrix::{build, build_poisson, build_truncated, MatrixMethod};
use randsamp::signals::{draw_random_times, sample_at, GaussPulseParams, Grid};
use randsamp::solvers::{omp_recover, tv_gradient, tv_objective, tv_recover, OmpConfig, TvConfig};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn cli(args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_randsamp"))
        .args(args)
        .env_remove("RANDSAMP_OUT_DIR")
        .output()
        .map_err(|e| e.to_string())?;
    if !out.status.success() {
        return Err(format!(
            "{args:?} exited with {:?}: {}",
            out.status.code(),
            String::from_utf8_lossy(&out.stderr)
        ));
    }
    String::from_utf8(out.stdout).map_err(|e| e.to_string())
}

/// Per-run errors from a report CSV; failed runs count as errors of 1.
fn run_errors(csv: &str) -> Vec<f64> {
    csv.lines()
        .skip(1)
        .filter(|l| !l.starts_with("mean,"))
        .map(|l| {
            l.split(',')
                .nth(7)
                .and_then(|e| e.parse().ok())
                .unwrap_or(1.0)
        })
        .collect()
}

fn mean(v: &[f64]) -> f64 {
    v.iter().sum::<f64>() / v.len() as f64
}

fn trig_batch(matrix: &[&str]) -> Result<Vec<f64>, String> {
    let args = [
        &["experiment", "--preset", "trig", "--runs", "50"][..],
        matrix,
    ]
    .concat();
    let errors = run_errors(&cli(&args)?);
    if errors.len() != 50 {
        return Err(format!("expected 50 runs, got {}", errors.len()));
    }
    Ok(errors)
}

fn naive_fails() -> Outcome {
    let e = trig_batch(&["--matrix", "naive"])?;
    let m = mean(&e);
    check(
        m >= 0.20,
        format!("mean error {m:.4} over 50 runs (need >= 0.20)"),
    )
}

fn truncated_200() -> Outcome {
    let e = trig_batch(&["--matrix", "truncated", "--p-terms", "200"])?;
    let m = mean(&e);
    check(
        m <= 0.05,
        format!("mean error {m:.3e} over 50 runs (need <= 0.05)"),
    )
}

fn poisson_exact() -> Outcome {
    let e = trig_batch(&["--matrix", "poisson"])?;
    let worst = e.iter().cloned().fold(0.0, f64::max);
    check(
        worst <= 1e-8,
        format!(
            "worst run error {worst:.3e}, mean {:.3e} (need every run <= 1e-8)",
            mean(&e)
        ),
    )
}

fn sweep() -> &'static [ExperimentReport] {
    static SWEEP: OnceLock<Vec<ExperimentReport>> = OnceLock::new();
    SWEEP.get_or_init(|| {
        sweep_truncation(&ExperimentConfig::trig(), &[2, 20, 200, 2000]).expect("sweep runs")
    })
}

fn error_trend() -> Outcome {
    let reps = sweep();
    let (truncated, baseline) = reps.split_at(reps.len() - 1);
    let errs: Vec<f64> = truncated
        .iter()
        .map(|r| r.aggregates.mean_error.unwrap_or(f64::NAN))
        .collect();
    // NaN counts as an inversion
    let inversions = errs
        .windows(2)
        .filter(|w| w[1].is_nan() || w[1] > w[0])
        .count();
    let base = baseline[0].aggregates.mean_error.unwrap_or(f64::NAN);
    let below = errs.iter().all(|&e| base < e);
    check(
        inversions <= 1 && below,
        format!(
            "mean error at P=2,20,200,2000: {}; Poisson {base:.2e}; {inversions} inversion(s)",
            errs.iter()
                .map(|e| format!("{e:.2e}"))
                .collect::<Vec<_>>()
                .join(", ")
        ),
    )
}

fn time_trend() -> Outcome {
    let reps = sweep();
    let build = |p: usize| {
        reps.iter()
            .find(|r| r.method == MatrixMethod::Truncated(p))
            .and_then(|r| r.aggregates.mean_build_time_s)
            .unwrap_or(f64::NAN)
    };
    let poisson = reps
        .last()
        .and_then(|r| r.aggregates.mean_build_time_s)
        .unwrap_or(f64::NAN);
    let (t20, t200, t2000) = (build(20), build(200), build(2000));
    let ratio = t200 / poisson;
    check(
        t20 < t200 && t200 < t2000 && ratio >= 5.0,
        format!("build s at P=20,200,2000: {t20:.2e}, {t200:.2e}, {t2000:.2e}; Poisson {poisson:.2e} ({ratio:.0}x faster than P=200)"),
    )
}

fn gauss_pulse() -> Outcome {
    let n = GaussPulseParams::default().grid_len(1e-7);
    let cfg = ExperimentConfig::gauss_pulse();
    let rep = run_experiment(&cfg).map_err(|e| e.to_string())?;
    let m = rep.aggregates.mean_error.unwrap_or(f64::NAN);
    check(
        n == 928 && cfg.grid.len == 928 && rep.aggregates.failed == 0 && m <= 0.05,
        format!(
            "N={n}, mean error {m:.3e} over {} runs, {} failed (need N=928, <= 0.05)",
            rep.aggregates.succeeded, rep.aggregates.failed
        ),
    )
}

/// Distance of every sample to the nearest jump of the circular reference.
/// A jump between samples e and e+1 sits at e + 0.5.
fn edge_distance(reference: &[f64]) -> Vec<f64> {
    let n = reference.len();
    let edges: Vec<f64> = (0..n)
        .filter(|&e| reference[e] != reference[(e + 1) % n])
        .map(|e| e as f64 + 0.5)
        .collect();
    (0..n)
        .map(|i| {
            edges
                .iter()
                .map(|&e| {
                    let d = (i as f64 - e).abs();
                    d.min(n as f64 - d)
                })
                .fold(f64::INFINITY, f64::min)
        })
        .collect()
}

fn square_wave() -> Outcome {
    let cfg = ExperimentConfig::square();
    let mut interior_errors = Vec::new();
    let mut edge_dominates = 0;
    for run in 0..cfg.runs {
        let seed = randsamp::experiments::derive_run_seed(cfg.master_seed, run);
        let out = run_single(&cfg, run, seed).map_err(|e| e.to_string())?;
        let rec = out
            .recovered
            .ok_or_else(|| format!("run {run} failed: {:?}", out.record.failure))?;
        let dist = edge_distance(&out.reference);
        let pick = |keep: &dyn Fn(f64) -> bool| -> (Vec<f64>, Vec<f64>) {
            (0..rec.len())
                .filter(|&i| keep(dist[i]))
                .map(|i| (rec[i], out.reference[i]))
                .unzip()
        };
        let (ri, xi) = pick(&|d| d >= 5.0);
        interior_errors.push(relative_l2_error(&ri, &xi).map_err(|e| e.to_string())?);
        let max_dev = |r: &[f64], x: &[f64]| {
            r.iter()
                .zip(x)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max)
        };
        let (re, xe) = pick(&|d| d <= 2.0);
        if max_dev(&re, &xe) > max_dev(&ri, &xi) {
            edge_dominates += 1;
        }
    }
    let m = mean(&interior_errors);
    check(
        m <= 0.05 && edge_dominates == cfg.runs,
        format!(
            "mean interior error {m:.4} over {} runs (need <= 0.05); edge error exceeds interior max in {edge_dominates}/{} runs",
            cfg.runs, cfg.runs
        ),
    )
}

/// See the kernel oracle tests in the library for the derivation.
const P_1E4_TOL: f64 = 1.2e-5;

fn kernel_oracle() -> Outcome {
    let grid = Grid::new(0.0, 1.0, 16).map_err(|e| e.to_string())?;
    let mut worst: f64 = 0.0;
    for k in 0..20 {
        let t = draw_random_times(8, 16.0, 0.0, 0xC0FFEE + k)
            .map_err(|e| e.to_string())?
            .times;
        let a = build_poisson(&t, &grid).map_err(|e| e.to_string())?;
        let b = build_truncated(&t, &grid, 10_000).map_err(|e| e.to_string())?;
        worst = (a.entries() - b.entries())
            .iter()
            .fold(worst, |m, v| m.max(v.abs()));
    }
    check(
        worst < P_1E4_TOL,
        format!("max |Poisson - truncated(1e4)| = {worst:.3e} (need < {P_1E4_TOL:e})"),
    )
}

fn invariants() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let basis = DftBasis::new(256);
    let (mut round_trip, mut parseval): (f64, f64) = (0.0, 0.0);
    for _ in 0..100 {
        let x: Vec<Complex64> = (0..256)
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let spec = basis.forward(&x).map_err(|e| e.to_string())?;
        let back = basis.adjoint(&spec).map_err(|e| e.to_string())?;
        round_trip = back
            .iter()
            .zip(&x)
            .map(|(a, b)| (a - b).norm())
            .fold(round_trip, f64::max);
        let energy: f64 = x.iter().map(|v| v.norm_sqr()).sum();
        parseval = parseval.max((spec.norm().powi(2) - energy).abs() / energy);
    }

    let mut omp_monotone = true;
    let cfg = ExperimentConfig::trig();
    let trig_basis = DftBasis::new(cfg.grid.len);
    for seed in 0..20 {
        for method in [MatrixMethod::Naive, MatrixMethod::Poisson] {
            let times =
                draw_random_times(64, cfg.grid.duration(), 0.0, seed).map_err(|e| e.to_string())?;
            let s = sample_at(&cfg.signal, &times).map_err(|e| e.to_string())?;
            let m0 = build(method, &s.times.times, &cfg.grid).map_err(|e| e.to_string())?;
            let a = trig_basis.sensing_matrix(&m0).map_err(|e| e.to_string())?;
            let out =
                omp_recover(&a, &s.values, &OmpConfig::default()).map_err(|e| e.to_string())?;
            omp_monotone &= out.history.windows(2).all(|w| w[1] <= w[0]);
        }
    }

    let mut tv_monotone = true;
    let sq = ExperimentConfig::square();
    for seed in 0..3 {
        let times =
            draw_random_times(80, sq.grid.duration(), 0.0, seed).map_err(|e| e.to_string())?;
        let s = sample_at(&sq.signal, &times).map_err(|e| e.to_string())?;
        let m0 = build_poisson(&s.times.times, &sq.grid).map_err(|e| e.to_string())?;
        let out =
            tv_recover(&m0, &s.values, &TvConfig::default(), None).map_err(|e| e.to_string())?;
        tv_monotone &= out.history.windows(2).all(|w| w[1] <= w[0]);
    }

    let (eps, h) = (1e-2, 1e-6);
    let mut fd_err: f64 = 0.0;
    for _ in 0..20 {
        let x: Vec<f64> = (0..30).map(|_| rng.random_range(-1.0..1.0)).collect();
        let g = tv_gradient(&x, eps);
        for i in 0..x.len() {
            let (mut up, mut down) = (x.clone(), x.clone());
            up[i] += h;
            down[i] -= h;
            let fd = (tv_objective(&up, eps) - tv_objective(&down, eps)) / (2.0 * h);
            fd_err = fd_err.max((fd - g[i]).abs());
        }
    }

    check(
        round_trip < 1e-12 && parseval < 1e-12 && omp_monotone && tv_monotone && fd_err < 1e-6,
        format!(
            "round trip {round_trip:.1e}, Parseval {parseval:.1e}, OMP monotone {omp_monotone}, TV monotone {tv_monotone}, TV gradient vs FD {fd_err:.1e}"
        ),
    )
}

fn determinism() -> Outcome {
    let base = [
        "experiment",
        "--preset",
        "trig",
        "--matrix",
        "truncated",
        "--p-terms",
        "20",
        "--runs",
        "12",
        "--seed",
        "5",
    ];
    let run = |jobs: &str| cli(&[&base[..], &["--jobs", jobs]].concat());
    let first = run("1")?;
    let same = [run("1")?, run("2")?, run("4")?]
        .iter()
        .all(|o| *o == first);
    let sweep_args = [
        "sweep-p", "--preset", "square", "--p-list", "2,20", "--runs", "3",
    ];
    let s1 = cli(&[&sweep_args[..], &["--jobs", "1"]].concat())?;
    let s3 = cli(&[&sweep_args[..], &["--jobs", "3"]].concat())?;
    check(
        same && s1 == s3 && !first.is_empty(),
        format!("experiment CSV identical across repeats and --jobs 1/2/4: {same}; sweep CSV identical across --jobs 1/3: {}", s1 == s3),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 naive matrix fails", naive_fails),
        ("2 truncated P=200", truncated_200),
        ("3 Poisson exactness", poisson_exact),
        ("4 error vs P", error_trend),
        ("5 build time vs P", time_trend),
        ("6 Gaussian pulse", gauss_pulse),
        ("7 square wave edges", square_wave),
        ("8 kernel oracle", kernel_oracle),
        ("9 unitarity and solver invariants", invariants),
        ("10 determinism", determinism),
    ];
    let start = Instant::now();
    let mut failed = 0;
    for (name, f) in criteria {
        let t = Instant::now();
        match f() {
            Ok(detail) => println!("PASS  {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64()),
            Err(detail) => {
                failed += 1;
                println!("FAIL  {name}: {detail} [{:.1}s]", t.elapsed().as_secs_f64());
            }
        }
    }
    println!(
        "{} of {} criteria passed in {:.1}s",
        criteria.len() - failed,
        criteria.len(),
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}

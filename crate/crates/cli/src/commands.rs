use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use randsamp::experiments::{
    relative_l2_error, run_experiment, solve, sweep_truncation, ExperimentConfig, ExperimentReport,
    Preset, Solver,
};
use randsamp::obs_matrix::{build, MatrixMethod};
use randsamp::report::{self, Timing};
use randsamp::signals::{
    draw_random_times, sample_at, sample_grid, GaussPulseParams, Grid, SampleTimes,
};
use randsamp::solvers::{OmpConfig, TvConfig};
use serde_json::json;

use crate::args::{
    BatchArgs, BuildMatrixArgs, ExperimentArgs, Format, GenerateArgs, MatrixArg, MatrixArgs,
    OutputArgs, PresetArg, RecoverArgs, SampleArgs, SignalArgs, SolverArg, SolverArgs, SweepArgs,
};
use crate::CliError;

pub const OUT_DIR_ENV: &str = "RANDSAMP_OUT_DIR";

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

fn preset(p: PresetArg) -> Preset {
    match p {
        PresetArg::Trig => Preset::Trig,
        PresetArg::Gauspuls => Preset::GaussPulse,
        PresetArg::Square => Preset::Square,
    }
}

fn base_config(args: &SignalArgs) -> Result<ExperimentConfig> {
    let kind = preset(args.preset);
    let mut cfg = ExperimentConfig::preset(kind);
    let interval = match args.fs {
        Some(fs) if !(fs > 0.0 && fs.is_finite()) => {
            return Err(usage(format!("--fs must be a positive rate, got {fs}")))
        }
        Some(fs) => 1.0 / fs,
        None => cfg.grid.interval,
    };
    // the pulse grid is centred on its cutoff window, so it follows the rate
    let (origin, len) = match kind {
        Preset::GaussPulse => {
            let p = GaussPulseParams::default();
            (-p.cutoff(), args.n.unwrap_or_else(|| p.grid_len(interval)))
        }
        _ => (cfg.grid.origin, args.n.unwrap_or(cfg.grid.len)),
    };
    cfg.grid = Grid::new(origin, interval, len)?;
    if let Some(m) = args.m {
        if m == 0 {
            return Err(usage("--m must be at least 1"));
        }
        cfg.measurements = m;
    }
    Ok(cfg)
}

fn apply_matrix(cfg: &mut ExperimentConfig, args: &MatrixArgs) -> Result<()> {
    cfg.method = match (args.matrix, args.p_terms) {
        (Some(MatrixArg::Truncated), Some(p)) => MatrixMethod::Truncated(p),
        (Some(MatrixArg::Truncated), None) => {
            return Err(usage("--matrix truncated needs --p-terms"))
        }
        (_, Some(_)) => return Err(usage("--p-terms only applies to --matrix truncated")),
        (Some(MatrixArg::Naive), None) => MatrixMethod::Naive,
        (Some(MatrixArg::Poisson) | None, None) => MatrixMethod::Poisson,
    };
    check_method(cfg.method, cfg.grid.len)
}

fn check_method(method: MatrixMethod, n: usize) -> Result<()> {
    if let MatrixMethod::Truncated(p) = method {
        if p < 2 || !p.is_multiple_of(2) {
            return Err(usage(format!("--p-terms must be even and >= 2, got {p}")));
        }
    }
    if method != MatrixMethod::Naive && !n.is_multiple_of(2) {
        return Err(usage(format!(
            "the {} matrix needs an even N, got {n}",
            method.name()
        )));
    }
    Ok(())
}

fn apply_solver(cfg: &mut ExperimentConfig, args: &SolverArgs) -> Result<()> {
    let mut solver = match (args.solver, cfg.solver) {
        (Some(SolverArg::Omp), Solver::Tv(_)) => Solver::Omp(OmpConfig::default()),
        (Some(SolverArg::Tv), Solver::Omp(_)) => Solver::Tv(TvConfig::default()),
        (_, current) => current,
    };
    match &mut solver {
        Solver::Omp(omp) => {
            if let Some(k) = args.max_atoms {
                omp.max_atoms = k;
            }
            let tv_flag = args.tv_lambda.is_some()
                || args.tv_epsilon.is_some()
                || args.tv_step.is_some()
                || args.tv_max_iters.is_some();
            if tv_flag {
                return Err(usage("--tv-* flags need --solver tv"));
            }
        }
        Solver::Tv(tv) => {
            if args.max_atoms.is_some() {
                return Err(usage("--max-atoms needs --solver omp"));
            }
            tv.lambda = args.tv_lambda.unwrap_or(tv.lambda);
            tv.epsilon = args.tv_epsilon.unwrap_or(tv.epsilon);
            tv.step_size = args.tv_step.unwrap_or(tv.step_size);
            tv.max_iters = args.tv_max_iters.unwrap_or(tv.max_iters);
        }
    }
    cfg.solver = solver;
    Ok(())
}

fn apply_batch(cfg: &mut ExperimentConfig, args: &BatchArgs) {
    if let Some(r) = args.runs {
        cfg.runs = r;
    }
    cfg.master_seed = args.seed;
}

fn warn_if_overdetermined(cfg: &ExperimentConfig) {
    if cfg.measurements > cfg.grid.len {
        eprintln!(
            "warning: M = {} exceeds N = {}; the system is no longer underdetermined",
            cfg.measurements, cfg.grid.len
        );
    }
}

fn timing(args: &BatchArgs) -> Timing {
    if args.timing {
        Timing::Include
    } else {
        Timing::Omit
    }
}

fn output_path(args: &OutputArgs, command: &str) -> Result<Option<PathBuf>> {
    if let Some(p) = &args.out {
        return Ok(Some(p.clone()));
    }
    match std::env::var_os(OUT_DIR_ENV) {
        Some(dir) if !dir.is_empty() => {
            let dir = PathBuf::from(dir);
            std::fs::create_dir_all(&dir)?;
            Ok(Some(
                dir.join(format!("{command}.{}", args.format.extension())),
            ))
        }
        _ => Ok(None),
    }
}

fn write_output(
    args: &OutputArgs,
    command: &str,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match output_path(args, command)? {
        Some(path) => {
            let mut w = BufWriter::new(File::create(&path)?);
            body(&mut w)?;
            w.flush()?;
        }
        None => {
            let mut w = BufWriter::new(io::stdout().lock());
            body(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn read_samples(path: &Path) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    let mut times = Vec::new();
    let mut values = Vec::new();
    for row in reader.deserialize::<(usize, f64, f64)>() {
        let (_, t, v) = row.map_err(|e| usage(format!("{}: {e}", path.display())))?;
        times.push(t);
        values.push(v);
    }
    if times.is_empty() {
        return Err(usage(format!("{}: no samples", path.display())));
    }
    Ok((times, values))
}

/// Samples from `--samples` when given, otherwise freshly drawn from `seed`.
fn samples_for(
    cfg: &ExperimentConfig,
    path: Option<&Path>,
    seed: u64,
) -> Result<(Vec<f64>, Vec<f64>)> {
    match path {
        Some(p) => read_samples(p),
        None => {
            let times =
                draw_random_times(cfg.measurements, cfg.grid.duration(), cfg.grid.origin, seed)?;
            let set = sample_at(&cfg.signal, &times)?;
            Ok((set.times.times, set.values))
        }
    }
}

fn write_reports(
    reports: &[ExperimentReport],
    args: &OutputArgs,
    timing: Timing,
    command: &str,
) -> Result<()> {
    write_output(args, command, |w| {
        match args.format {
            Format::Csv => report::write_csv(reports, timing, w)?,
            Format::Json => report::write_json(reports, timing, w)?,
        }
        Ok(())
    })?;
    for rep in reports {
        let agg = &rep.aggregates;
        let fmt = |v: Option<f64>| {
            v.map(|x| format!("{x:.3e}"))
                .unwrap_or_else(|| "n/a".into())
        };
        eprintln!(
            "{} {} ({}): mean error {} over {} runs, {} failed; mean build {} s, mean solve {} s",
            rep.signal,
            rep.method,
            rep.solver,
            fmt(agg.mean_error),
            agg.succeeded,
            agg.failed,
            fmt(agg.mean_build_time_s),
            fmt(agg.mean_solve_time_s),
        );
    }
    if let Some(rep) = reports.iter().find(|r| r.all_failed()) {
        let reason = rep
            .runs
            .iter()
            .find_map(|r| r.failure.clone())
            .unwrap_or_default();
        return Err(CliError::AllRunsFailed(format!(
            "{} {}: {reason}",
            rep.signal, rep.method
        )));
    }
    Ok(())
}

fn in_pool<T: Send>(jobs: Option<u64>, f: impl FnOnce() -> T + Send) -> Result<T> {
    match jobs {
        None => Ok(f()),
        Some(j) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(j as usize)
                .build()
                .map_err(|e| usage(format!("--jobs {j}: {e}")))?;
            Ok(pool.install(f))
        }
    }
}

pub fn generate(args: &GenerateArgs) -> Result<()> {
    let cfg = base_config(&args.signal)?;
    let uniform = sample_grid(&cfg.signal, &cfg.grid);
    write_output(&args.output, "generate", |w| {
        match args.output.format {
            Format::Csv => {
                writeln!(w, "n,t,value")?;
                for (n, v) in uniform.values.iter().enumerate() {
                    writeln!(w, "{n},{:e},{v:e}", cfg.grid.time(n))?;
                }
            }
            Format::Json => {
                let doc = json!({
                    "signal": cfg.signal.kind().name(),
                    "grid": cfg.grid,
                    "values": uniform.values,
                });
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w)?;
            }
        }
        Ok(())
    })
}

pub fn sample(args: &SampleArgs) -> Result<()> {
    let cfg = base_config(&args.signal)?;
    warn_if_overdetermined(&cfg);
    let times: SampleTimes = draw_random_times(
        cfg.measurements,
        cfg.grid.duration(),
        cfg.grid.origin,
        args.seed,
    )?;
    let set = sample_at(&cfg.signal, &times)?;
    write_output(&args.output, "sample", |w| {
        match args.output.format {
            Format::Csv => {
                writeln!(w, "m,t,value")?;
                for (m, (t, v)) in set.times.times.iter().zip(&set.values).enumerate() {
                    writeln!(w, "{m},{t:e},{v:e}")?;
                }
            }
            Format::Json => {
                let doc = json!({
                    "signal": cfg.signal.kind().name(),
                    "seed": args.seed,
                    "origin": set.times.origin,
                    "duration": set.times.duration,
                    "times": set.times.times,
                    "values": set.values,
                });
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w)?;
            }
        }
        Ok(())
    })
}

pub fn build_matrix(args: &BuildMatrixArgs) -> Result<()> {
    let mut cfg = base_config(&args.signal)?;
    apply_matrix(&mut cfg, &args.matrix)?;
    let (times, _) = samples_for(&cfg, args.samples.as_deref(), args.seed)?;
    let m0 = build(cfg.method, &times, &cfg.grid)?;
    if !m0.is_undersampled() {
        eprintln!("warning: M = {} exceeds N = {}", m0.rows(), m0.cols());
    }
    write_output(&args.output, "build-matrix", |w| {
        match args.output.format {
            Format::Csv => m0.write_csv(w)?,
            Format::Json => m0.write_json(w)?,
        }
        Ok(())
    })
}

pub fn recover(args: &RecoverArgs) -> Result<()> {
    let mut cfg = base_config(&args.signal)?;
    apply_matrix(&mut cfg, &args.matrix)?;
    apply_solver(&mut cfg, &args.solver)?;
    cfg.validate()?;
    let (times, values) = samples_for(&cfg, args.samples.as_deref(), args.seed)?;
    if times.len() > cfg.grid.len {
        eprintln!("warning: M = {} exceeds N = {}", times.len(), cfg.grid.len);
    }
    let m0 = build(cfg.method, &times, &cfg.grid)?;
    let out = solve(&cfg.solver, &m0, &values, None)?;
    let reference = sample_grid(&cfg.signal, &cfg.grid).values;
    let error = relative_l2_error(&out.recovered, &reference)?;
    eprintln!(
        "relative l2 error {error:e} after {} iterations",
        out.iterations
    );

    write_output(&args.output, "recover", |w| {
        match args.output.format {
            Format::Csv => {
                writeln!(w, "n,t,recovered,reference")?;
                for (n, (r, x)) in out.recovered.iter().zip(&reference).enumerate() {
                    writeln!(w, "{n},{:e},{r:e},{x:e}", cfg.grid.time(n))?;
                }
            }
            Format::Json => {
                let doc = json!({
                    "signal": cfg.signal.kind().name(),
                    "method": cfg.method.name(),
                    "P": cfg.method.terms(),
                    "solver": cfg.solver.name(),
                    "M": times.len(),
                    "N": cfg.grid.len,
                    "error": error,
                    "iterations": out.iterations,
                    "support": out.support,
                    "recovered": out.recovered,
                    "reference": reference,
                });
                serde_json::to_writer_pretty(&mut *w, &doc)?;
                writeln!(w)?;
            }
        }
        Ok(())
    })
}

pub fn experiment(args: &ExperimentArgs) -> Result<()> {
    let mut cfg = base_config(&args.signal)?;
    apply_matrix(&mut cfg, &args.matrix)?;
    apply_solver(&mut cfg, &args.solver)?;
    apply_batch(&mut cfg, &args.batch);
    cfg.validate()?;
    warn_if_overdetermined(&cfg);
    let report = in_pool(args.batch.jobs, || run_experiment(&cfg))??;
    write_reports(&[report], &args.output, timing(&args.batch), "experiment")
}

pub fn sweep_p(args: &SweepArgs) -> Result<()> {
    let mut cfg = base_config(&args.signal)?;
    apply_solver(&mut cfg, &args.solver)?;
    apply_batch(&mut cfg, &args.batch);
    cfg.validate()?;
    for &p in &args.p_list {
        check_method(MatrixMethod::Truncated(p), cfg.grid.len)?;
    }
    warn_if_overdetermined(&cfg);
    let reports = in_pool(args.batch.jobs, || sweep_truncation(&cfg, &args.p_list))??;
    write_reports(&reports, &args.output, timing(&args.batch), "sweep-p")
}

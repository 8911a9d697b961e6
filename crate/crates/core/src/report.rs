//! CSV and JSON serialization of experiment reports.
//!
//! CSV layout, one line per run followed by one `mean` line per report:
//!
//! ```text
//! run_id,seed,signal,method,P,M,N,error,build_time_s,solve_time_s
//! ```
//!
//! `P` is empty unless the method is truncated. A failed run carries
//! `failed` in the `error` column. Floats use Rust's shortest round-trip
//! formatting in exponent form. With [`Timing::Omit`] the two timing columns
//! are left empty, which makes the output a pure function of the inputs and
//! seed.

use std::io::Write;

use serde::Serialize;

use crate::error::Result;
use crate::experiments::{ExperimentReport, RunRecord};

pub const CSV_HEADER: &str = "run_id,seed,signal,method,P,M,N,error,build_time_s,solve_time_s";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Timing {
    #[default]
    Include,
    Omit,
}

fn float(v: f64) -> String {
    format!("{v:e}")
}

fn opt_float(v: Option<f64>) -> String {
    v.map(float).unwrap_or_default()
}

pub fn write_csv<W: Write>(reports: &[ExperimentReport], timing: Timing, mut out: W) -> Result<()> {
    writeln!(out, "{CSV_HEADER}")?;
    let time = |v: Option<f64>| match timing {
        Timing::Include => opt_float(v),
        Timing::Omit => String::new(),
    };
    for rep in reports {
        let prefix = format!(
            "{},{},{},{},{}",
            rep.signal,
            rep.method.name(),
            rep.method
                .terms()
                .map(|p| p.to_string())
                .unwrap_or_default(),
            rep.measurements,
            rep.grid_len
        );
        for run in &rep.runs {
            let ok = run.error.is_some();
            writeln!(
                out,
                "{},{},{},{},{},{}",
                run.run_id,
                run.seed,
                prefix,
                run.error.map(float).unwrap_or_else(|| "failed".into()),
                time(ok.then_some(run.build_time_s)),
                time(ok.then_some(run.solve_time_s)),
            )?;
        }
        let agg = &rep.aggregates;
        writeln!(
            out,
            "mean,,{},{},{},{}",
            prefix,
            opt_float(agg.mean_error),
            time(agg.mean_build_time_s),
            time(agg.mean_solve_time_s),
        )?;
    }
    Ok(())
}

#[derive(Serialize)]
struct JsonRun<'a> {
    run_id: usize,
    seed: u64,
    signal: &'a str,
    method: &'a str,
    #[serde(rename = "P")]
    p: Option<usize>,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    error: Option<f64>,
    build_time_s: Option<f64>,
    solve_time_s: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    failure: Option<&'a str>,
}

#[derive(Serialize)]
struct JsonAggregates {
    mean_error: Option<f64>,
    mean_build_time_s: Option<f64>,
    mean_solve_time_s: Option<f64>,
    succeeded: usize,
    failed: usize,
}

#[derive(Serialize)]
struct JsonReport<'a> {
    signal: &'a str,
    method: &'a str,
    #[serde(rename = "P")]
    p: Option<usize>,
    solver: &'a str,
    #[serde(rename = "M")]
    m: usize,
    #[serde(rename = "N")]
    n: usize,
    runs: Vec<JsonRun<'a>>,
    aggregates: JsonAggregates,
}

fn json_run<'a>(rep: &'a ExperimentReport, run: &'a RunRecord, timing: Timing) -> JsonRun<'a> {
    let keep = |v: f64| (timing == Timing::Include && run.error.is_some()).then_some(v);
    JsonRun {
        run_id: run.run_id,
        seed: run.seed,
        signal: rep.signal.name(),
        method: rep.method.name(),
        p: rep.method.terms(),
        m: rep.measurements,
        n: rep.grid_len,
        error: run.error,
        build_time_s: keep(run.build_time_s),
        solve_time_s: keep(run.solve_time_s),
        failure: run.failure.as_deref(),
    }
}

pub fn write_json<W: Write>(reports: &[ExperimentReport], timing: Timing, out: W) -> Result<()> {
    let docs: Vec<JsonReport> = reports
        .iter()
        .map(|rep| {
            let agg = &rep.aggregates;
            let keep = |v: Option<f64>| if timing == Timing::Include { v } else { None };
            JsonReport {
                signal: rep.signal.name(),
                method: rep.method.name(),
                p: rep.method.terms(),
                solver: rep.solver,
                m: rep.measurements,
                n: rep.grid_len,
                runs: rep.runs.iter().map(|r| json_run(rep, r, timing)).collect(),
                aggregates: JsonAggregates {
                    mean_error: agg.mean_error,
                    mean_build_time_s: keep(agg.mean_build_time_s),
                    mean_solve_time_s: keep(agg.mean_solve_time_s),
                    succeeded: agg.succeeded,
                    failed: agg.failed,
                },
            }
        })
        .collect();
    let mut out = out;
    serde_json::to_writer_pretty(&mut out, &serde_json::json!({ "reports": docs }))?;
    writeln!(out)?;
    Ok(())
}

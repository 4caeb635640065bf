//! Parallel parameter sweeps with one artifact directory per run.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use rayon::prelude::*;

use super::config::{Geometry, RunConfig};
use super::output::{emit_summary, emit_timeseries, fmt_f64, ConvergenceRow};
use super::run::drive;

pub const INDEX_HEADER: &str = "run_id,geometry,tau,m_or_M,q,n,outcome,u_max,t_final";

#[derive(Debug, Clone, PartialEq)]
pub struct SweepEntry {
    pub run_id: String,
    pub config: RunConfig,
    /// Outcome label, or `failed: <reason>`.
    pub outcome: String,
    pub u_max: Option<f64>,
    pub t_final: Option<f64>,
}

fn run_one(run_id: String, config: &RunConfig, dir: &Path) -> SweepEntry {
    let attempt = || -> Result<(String, f64, f64), String> {
        let record = drive(config).map_err(|e| e.to_string())?;
        fs::create_dir_all(dir).map_err(|e| e.to_string())?;
        emit_timeseries(&record, &dir.join("timeseries.csv")).map_err(|e| e.to_string())?;
        emit_summary(
            &record,
            vec![ConvergenceRow::of(&record)],
            &dir.join("summary.json"),
        )
        .map_err(|e| e.to_string())?;
        Ok((
            format!("{:?}", record.outcome),
            record.u_max_reached,
            record.final_t,
        ))
    };
    let (outcome, u_max, t_final) = match attempt() {
        Ok((o, u, t)) => (o, Some(u), Some(t)),
        Err(e) => (format!("failed: {e}"), None, None),
    };
    SweepEntry {
        run_id,
        config: config.clone(),
        outcome,
        u_max,
        t_final,
    }
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

pub fn index_csv(entries: &[SweepEntry]) -> String {
    let mut out = format!("{INDEX_HEADER}\n");
    for e in entries {
        let c = &e.config;
        let (q, n) = match c.geometry {
            Geometry::Interval1D => (fmt_f64(c.q), String::new()),
            Geometry::RadialBall(n) => (String::new(), n.to_string()),
        };
        let opt = |x: Option<f64>| x.map(fmt_f64).unwrap_or_default();
        let row = [
            csv_field(&e.run_id),
            c.geometry.label().to_string(),
            fmt_f64(c.tau),
            fmt_f64(c.mass()),
            q,
            n,
            csv_field(&e.outcome),
            opt(e.u_max),
            opt(e.t_final),
        ];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Runs every `(run_id, config)` concurrently into `out_dir/<run_id>/` and
/// writes `out_dir/index.csv` once all runs have finished. Failed runs are
/// recorded in the index and do not stop the sweep.
pub fn sweep(runs: &[(String, RunConfig)], out_dir: &Path) -> io::Result<Vec<SweepEntry>> {
    fs::create_dir_all(out_dir)?;
    let entries: Vec<SweepEntry> = runs
        .par_iter()
        .map(|(id, cfg)| run_one(id.clone(), cfg, &run_dir(out_dir, id)))
        .collect();
    fs::write(out_dir.join("index.csv"), index_csv(&entries))?;
    Ok(entries)
}

pub fn run_dir(out_dir: &Path, run_id: &str) -> PathBuf {
    out_dir.join(run_id)
}

/// `run_0000`, `run_0001`, ... in list order.
pub fn numbered(configs: Vec<RunConfig>) -> Vec<(String, RunConfig)> {
    configs
        .into_iter()
        .enumerate()
        .map(|(k, c)| (format!("run_{k:04}"), c))
        .collect()
}

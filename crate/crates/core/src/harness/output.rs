//! Time-series CSV and JSON run summaries.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::config::{Geometry, RunConfig};
use super::run::{drive, Outcome, RunRecord, Termination};
use crate::diagnostics::Theta;
use crate::Result;

pub const TIMESERIES_HEADER: &str =
    "t,u_max,u_mass,v_mass,L,diss_v,diss_flux,Mq_or_M2,rhs_identity,rhs_bound,vt_l2,v_linf";

/// Seventeen significant digits; parses back to the same `f64`.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn timeseries_csv(record: &RunRecord) -> String {
    let mut out = String::with_capacity(256 * (record.rows.len() + 1));
    out.push_str(TIMESERIES_HEADER);
    out.push('\n');
    for r in &record.rows {
        let cols = [
            r.t,
            r.u_max,
            r.u_mass,
            r.v_mass,
            r.lyapunov,
            r.diss_v,
            r.diss_flux,
            r.moment,
            r.rhs_identity,
            r.rhs_bound,
            r.vt_l2,
            r.v_linf,
        ];
        let line: Vec<String> = cols.iter().map(|&x| fmt_f64(x)).collect();
        let _ = writeln!(out, "{}", line.join(","));
    }
    out
}

pub fn emit_timeseries(record: &RunRecord, path: &Path) -> io::Result<()> {
    fs::write(path, timeseries_csv(record))
}

/// Residuals of one refinement level.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceRow {
    pub n_cells: usize,
    pub dt_max: f64,
    pub dissipation_residual: Option<f64>,
    pub identity_gap: Option<f64>,
}

impl ConvergenceRow {
    pub fn of(record: &RunRecord) -> Self {
        Self {
            n_cells: record.config.n_cells,
            dt_max: record.config.controls.dt_max,
            dissipation_residual: record.dissipation_residual(),
            identity_gap: record.identity_gap(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Residuals {
    /// `|L(t) + ∫dissipation - L(0)|` at the final sample.
    pub dissipation: Option<f64>,
    /// Largest gap between the sampled moment derivative and its identity.
    pub identity_gap: Option<f64>,
    /// Largest excess of the sampled moment derivative over its bound.
    pub bound_excess: Option<f64>,
    pub lyapunov_increase: Option<f64>,
    pub mass_drift: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Summary {
    pub geometry: String,
    pub dimension: Option<u32>,
    pub tau: f64,
    pub m_or_big_m: f64,
    pub q: Option<f64>,
    pub n_cells: usize,
    pub outcome: Outcome,
    pub termination: Termination,
    pub t_final: f64,
    pub steps: u64,
    pub samples: usize,
    pub u_max_reached: f64,
    pub theta: Option<f64>,
    /// `found` or `all_negative`.
    pub theta_kind: Option<String>,
    pub m_star: Option<f64>,
    pub c1: f64,
    pub c2: f64,
    pub l_lower: Option<f64>,
    pub residuals: Residuals,
    pub convergence: Vec<ConvergenceRow>,
    pub config: RunConfig,
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

impl Summary {
    pub fn new(record: &RunRecord, convergence: Vec<ConvergenceRow>) -> Self {
        let c = &record.config;
        let (theta, theta_kind) = match record.theta() {
            Some(Ok(Theta::Found(t))) => (Some(t), Some("found".to_string())),
            Some(Ok(Theta::AllNegative(t))) => (Some(t), Some("all_negative".to_string())),
            _ => (None, None),
        };
        let interval = c.geometry == Geometry::Interval1D;
        Self {
            geometry: c.geometry.label().to_string(),
            dimension: match c.geometry {
                Geometry::RadialBall(n) => Some(n),
                Geometry::Interval1D => None,
            },
            tau: c.tau,
            m_or_big_m: c.mass(),
            q: interval.then_some(c.q),
            n_cells: c.n_cells,
            outcome: record.outcome,
            termination: record.termination,
            t_final: record.final_t,
            steps: record.steps,
            samples: record.rows.len(),
            u_max_reached: record.u_max_reached,
            theta,
            theta_kind,
            m_star: record.m_star(),
            c1: record.bounds.c1,
            c2: record.bounds.c2,
            l_lower: finite(record.bounds.l_lower),
            residuals: Residuals {
                dissipation: record.dissipation_residual().and_then(finite),
                identity_gap: record.identity_gap(),
                bound_excess: record.bound_excess(),
                lyapunov_increase: finite(record.lyapunov_increase()),
                mass_drift: record.mass_drift(),
            },
            convergence,
            config: c.clone(),
        }
    }
}

pub fn summary_json(record: &RunRecord, convergence: Vec<ConvergenceRow>) -> String {
    let mut s = serde_json::to_string_pretty(&Summary::new(record, convergence))
        .expect("summary serializes");
    s.push('\n');
    s
}

pub fn emit_summary(
    record: &RunRecord,
    convergence: Vec<ConvergenceRow>,
    path: &Path,
) -> io::Result<()> {
    fs::write(path, summary_json(record, convergence))
}

/// Reruns `config` on `levels` grids, halving `h` and `dt_max` each time.
pub fn convergence_table(config: &RunConfig, levels: usize) -> Result<Vec<ConvergenceRow>> {
    (0..levels)
        .map(|k| {
            let c = refined(config, k);
            Ok(ConvergenceRow::of(&drive(&c)?))
        })
        .collect()
}

/// `config` with `h` and the time-step caps divided by `2^k`; the sampling
/// cadence follows the `h²` step size so samples land at similar times.
pub fn refined(config: &RunConfig, k: usize) -> RunConfig {
    let mut c = config.clone();
    let f = (1usize << k) as f64;
    c.n_cells = config.n_cells << k;
    c.controls.dt_max = config.controls.dt_max / f;
    c.controls.dt_init = config.controls.dt_init / f;
    c.controls.dt_min = c.controls.dt_min.min(c.controls.dt_init);
    c.diag_cadence = config.diag_cadence << (2 * k);
    c
}

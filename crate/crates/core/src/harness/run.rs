//! The time loop shared by both geometries, the recorded trajectory and the
//! blowup classification.

use std::collections::VecDeque;
use std::time::{Duration, Instant};

use serde::{Deserialize, Serialize};

use super::config::{Geometry, RunConfig};
use crate::diagnostics::{
    adaptive_majorant, cumulative, dissipation_residual, istotne_rhs, lambda_fn, linf, lyapunov,
    m2_derivative, m2_radial, m_star, masses, moment_identity_rhs, moment_q, theta_find, vt_norm,
    LyapunovSample, MeasuredBounds, MomentSample, Snapshot, Theta,
};
use crate::error::{KsError, Result};
use crate::fv::{imex_step, Mesh, StepFlag};
use crate::kinetics::MajorantB;

/// Number of trailing per-step `max u` values kept for classification.
const TAIL: usize = 10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Outcome {
    CompletedBounded,
    UnboundedSuspected,
    Inconclusive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Termination {
    EndTime,
    DtFloorHit,
    BlowupThresholdHit,
    NonFiniteDetected,
    StepLimit,
}

/// One diagnostic sample; the columns of the time-series file.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticRow {
    pub t: f64,
    pub u_max: f64,
    pub u_mass: f64,
    pub v_mass: f64,
    pub lyapunov: f64,
    pub diss_v: f64,
    pub diss_flux: f64,
    /// `M_q` on the interval, `M_2` on the ball.
    pub moment: f64,
    /// Exact right-hand side of the moment evolution.
    pub rhs_identity: f64,
    /// Upper bound for the moment derivative with the bounds measured so far.
    pub rhs_bound: f64,
    pub vt_l2: f64,
    pub v_linf: f64,
}

/// Secant `dM/dt` between consecutive samples against the trapezoidal mean of
/// the recorded right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentGap {
    pub t0: f64,
    pub t1: f64,
    pub fd: f64,
    pub rhs_identity: f64,
    pub rhs_bound: f64,
}

#[derive(Debug, Clone)]
pub struct RunRecord {
    pub config: RunConfig,
    pub rows: Vec<DiagnosticRow>,
    pub bounds: MeasuredBounds,
    pub termination: Termination,
    pub outcome: Outcome,
    pub steps: u64,
    /// `max u` after each of the last accepted steps, oldest first.
    pub u_max_tail: Vec<f64>,
    pub final_u: Vec<f64>,
    pub final_v: Vec<f64>,
    pub final_t: f64,
    /// Largest `max u` over all accepted steps.
    pub u_max_reached: f64,
    pub majorant: Option<MajorantB>,
    pub wall_time: Duration,
}

impl RunRecord {
    pub fn lyapunov_series(&self) -> Vec<LyapunovSample> {
        self.rows
            .iter()
            .map(|r| LyapunovSample {
                t: r.t,
                value: r.lyapunov,
                dissipation_v: r.diss_v,
                dissipation_flux: r.diss_flux,
            })
            .collect()
    }

    pub fn moment_series(&self) -> Vec<MomentSample> {
        let q = (self.config.geometry == Geometry::Interval1D).then_some(self.config.q);
        self.rows
            .iter()
            .map(|r| MomentSample {
                t: r.t,
                moment: r.moment,
                q,
                rhs_identity: r.rhs_identity,
                rhs_bound: r.rhs_bound,
            })
            .collect()
    }

    pub fn moment_gaps(&self) -> Vec<MomentGap> {
        self.rows
            .windows(2)
            .map(|w| MomentGap {
                t0: w[0].t,
                t1: w[1].t,
                fd: (w[1].moment - w[0].moment) / (w[1].t - w[0].t),
                rhs_identity: 0.5 * (w[0].rhs_identity + w[1].rhs_identity),
                rhs_bound: 0.5 * (w[0].rhs_bound + w[1].rhs_bound),
            })
            .collect()
    }

    /// Largest `|FD - identity|` over sample intervals, `None` if unavailable.
    pub fn identity_gap(&self) -> Option<f64> {
        finite_max(
            self.moment_gaps()
                .iter()
                .map(|g| (g.fd - g.rhs_identity).abs()),
        )
    }

    /// Largest `FD - bound`; nonpositive when the bound held throughout.
    pub fn bound_excess(&self) -> Option<f64> {
        finite_max(self.moment_gaps().iter().map(|g| g.fd - g.rhs_bound))
    }

    pub fn dissipation_residual(&self) -> Option<f64> {
        dissipation_residual(&self.lyapunov_series(), self.config.tau).ok()
    }

    /// Largest relative drift of the `u` mass over the recorded samples.
    pub fn mass_drift(&self) -> f64 {
        let m0 = self.rows.first().map_or(0.0, |r| r.u_mass);
        self.rows
            .iter()
            .map(|r| (r.u_mass - m0).abs() / m0)
            .fold(0.0, f64::max)
    }

    /// Largest increase of `L` between consecutive samples.
    pub fn lyapunov_increase(&self) -> f64 {
        self.rows
            .windows(2)
            .map(|w| w[1].lyapunov - w[0].lyapunov)
            .fold(f64::NEG_INFINITY, f64::max)
    }

    /// `θ` for the interval moment argument with the suprema measured on this
    /// run, `None` when the diffusivity has no majorant.
    pub fn theta(&self) -> Option<Result<Theta>> {
        let b = self.majorant.as_ref()?;
        let c = &self.config;
        Some((|| {
            let mut lam = lambda_fn(c.mass(), c.q, c.tau, b, &self.bounds)?;
            lam.exponent = c.lambda_exponent;
            theta_find(|r| lam.eval(r), lam.at_zero(), c.mass().powf(c.q) / c.q)
        })())
    }

    pub fn m_star(&self) -> Option<f64> {
        match self.config.geometry {
            Geometry::RadialBall(n) => m_star(n).ok(),
            Geometry::Interval1D => None,
        }
    }
}

fn finite_max(it: impl Iterator<Item = f64>) -> Option<f64> {
    it.filter(|x| x.is_finite())
        .fold(None, |a, x| Some(a.map_or(x, |a: f64| a.max(x))))
}

/// Classifies a run from its termination reason and `max u` history.
///
/// `series` is the sampled `max u`, `tail` the per-step values at the end of
/// the run.
pub fn classify(termination: Termination, series: &[f64], tail: &[f64]) -> Result<Outcome> {
    if series.is_empty() {
        return Err(KsError::Input("empty max-density series".into()));
    }
    let blew = matches!(
        termination,
        Termination::BlowupThresholdHit | Termination::DtFloorHit
    );
    if blew {
        let first = if tail.len() >= 2 { tail[0] } else { series[0] };
        let last = *tail.last().unwrap_or(series.last().expect("nonempty"));
        if last > first {
            return Ok(Outcome::UnboundedSuspected);
        }
    }
    if termination == Termination::EndTime {
        let mut sorted: Vec<f64> = Vec::with_capacity(series.len());
        let bounded = series.iter().all(|&x| {
            let k = sorted.partition_point(|&y| y < x);
            sorted.insert(k, x);
            let n = sorted.len();
            let median = if n % 2 == 1 {
                sorted[n / 2]
            } else {
                0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
            };
            x <= 10.0 * median
        });
        if bounded {
            return Ok(Outcome::CompletedBounded);
        }
    }
    Ok(Outcome::Inconclusive)
}

pub fn detect_blowup(record: &RunRecord) -> Result<Outcome> {
    let series: Vec<f64> = record.rows.iter().map(|r| r.u_max).collect();
    classify(record.termination, &series, &record.u_max_tail)
}

enum Probe {
    Interval { q: f64, majorant: Option<MajorantB> },
    Radial { n: u32 },
}

fn sample(
    cfg: &RunConfig,
    probe: &Probe,
    s: &Snapshot,
    bounds: &mut MeasuredBounds,
) -> DiagnosticRow {
    let tau = cfg.tau;
    let (u_mass, v_mass) = masses(s);
    let lyap = lyapunov(s, &cfg.spec, tau);
    let vt_l2 = vt_norm(s, tau);
    let v_linf = linf(s.v);
    bounds.update(v_linf, vt_l2, lyap.value);
    let cum = cumulative(s.mesh, s.u);
    let nan = |r: Result<f64>| r.unwrap_or(f64::NAN);
    let (moment, rhs_identity, rhs_bound) = match probe {
        Probe::Interval { q, majorant } => {
            let mq = nan(moment_q(&s.mesh.faces, &cum, *q));
            let identity = if cfg.spec.is_integrable() {
                nan(moment_identity_rhs(s, &cfg.spec, tau, *q))
            } else {
                f64::NAN
            };
            let bound = majorant.as_ref().map_or(f64::NAN, |b| {
                nan(
                    lambda_fn(cfg.mass(), *q, tau, b, bounds).and_then(|mut lam| {
                        lam.exponent = cfg.lambda_exponent;
                        if mq > 0.0 {
                            lam.eval(mq)
                        } else {
                            Ok(lam.at_zero())
                        }
                    }),
                )
            });
            (mq, identity, bound)
        }
        Probe::Radial { n } => {
            let big_m = *n as f64 * u_mass;
            (
                nan(m2_radial(&s.mesh.faces, &cum, big_m, *n)),
                nan(m2_derivative(s, &cfg.spec, *n)),
                nan(istotne_rhs(s, big_m, *n, bounds, cfg.istotne_variant)),
            )
        }
    };
    DiagnosticRow {
        t: s.t,
        u_max: linf(s.u),
        u_mass,
        v_mass,
        lyapunov: lyap.value,
        diss_v: lyap.dissipation_v,
        diss_flux: lyap.dissipation_flux,
        moment,
        rhs_identity,
        rhs_bound,
        vt_l2,
        v_linf,
    }
}

/// Runs a validated configuration to completion.
pub fn drive(cfg: &RunConfig) -> Result<RunRecord> {
    let started = Instant::now();
    cfg.validate().map_err(|e| KsError::Input(e.to_string()))?;
    let mesh: Mesh = cfg.geometry.mesh(cfg.n_cells);
    let (mut u, mut v) = cfg.initial_fields()?;
    let probe = match cfg.geometry {
        Geometry::Interval1D => Probe::Interval {
            q: cfg.q,
            majorant: if cfg.spec.is_integrable() {
                Some(adaptive_majorant(
                    &cfg.spec,
                    cfg.mass(),
                    cfg.q,
                    cfg.tau,
                    cfg.lambda_exponent,
                )?)
            } else {
                None
            },
        },
        Geometry::RadialBall(n) => Probe::Radial { n },
    };
    let mut bounds = MeasuredBounds::default();
    let mut rows = Vec::new();
    let mut t = 0.0;
    rows.push(sample(
        cfg,
        &probe,
        &Snapshot {
            mesh: &mesh,
            u: &u,
            v: &v,
            t,
        },
        &mut bounds,
    ));

    let mut tail: VecDeque<f64> = VecDeque::with_capacity(TAIL + 1);
    let mut u_max_reached = linf(&u);
    let mut steps: u64 = 0;
    let termination = loop {
        if t >= cfg.controls.t_end {
            break Termination::EndTime;
        }
        if cfg.max_steps.is_some_and(|k| steps >= k) {
            break Termination::StepLimit;
        }
        let mut controls = cfg.controls;
        if steps == 0 {
            controls.dt_max = controls.dt_init;
        }
        let fs = imex_step(&mesh, &cfg.spec, cfg.tau, &controls, t, &u, &v);
        if fs.flag == StepFlag::DtFloorHit {
            break Termination::DtFloorHit;
        }
        if fs.flag == StepFlag::NonFiniteDetected {
            break Termination::NonFiniteDetected;
        }
        u = fs.u;
        v = fs.v;
        // land exactly on t_end when the step was clipped to the remaining time
        t = if fs.dt >= cfg.controls.t_end - t {
            cfg.controls.t_end
        } else {
            t + fs.dt
        };
        steps += 1;
        let um = linf(&u);
        u_max_reached = u_max_reached.max(um);
        if tail.len() == TAIL {
            tail.pop_front();
        }
        tail.push_back(um);
        if fs.flag == StepFlag::BlowupThresholdHit {
            break Termination::BlowupThresholdHit;
        }
        if steps.is_multiple_of(cfg.diag_cadence as u64) {
            rows.push(sample(
                cfg,
                &probe,
                &Snapshot {
                    mesh: &mesh,
                    u: &u,
                    v: &v,
                    t,
                },
                &mut bounds,
            ));
        }
    };
    let finite = u.iter().chain(&v).all(|x| x.is_finite());
    if finite && rows.last().is_some_and(|r| r.t < t) {
        rows.push(sample(
            cfg,
            &probe,
            &Snapshot {
                mesh: &mesh,
                u: &u,
                v: &v,
                t,
            },
            &mut bounds,
        ));
    }
    let u_max_tail: Vec<f64> = tail.into_iter().collect();
    let series: Vec<f64> = rows.iter().map(|r| r.u_max).collect();
    let outcome = classify(termination, &series, &u_max_tail)?;
    Ok(RunRecord {
        config: cfg.clone(),
        rows,
        bounds,
        termination,
        outcome,
        steps,
        u_max_tail,
        final_u: u,
        final_v: v,
        final_t: t,
        u_max_reached,
        majorant: match probe {
            Probe::Interval { majorant, .. } => majorant,
            Probe::Radial { .. } => None,
        },
        wall_time: started.elapsed(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn classification_by_definition() {
        let rising = [1.0, 2.0, 4.0, 1e6];
        assert_eq!(
            classify(Termination::BlowupThresholdHit, &rising, &[1e3, 1e4, 1e6]).unwrap(),
            Outcome::UnboundedSuspected
        );
        assert_eq!(
            classify(Termination::EndTime, &[2.0; 50], &[2.0; 10]).unwrap(),
            Outcome::CompletedBounded
        );
        assert_eq!(
            classify(Termination::DtFloorHit, &[3.0; 20], &[3.0; 10]).unwrap(),
            Outcome::Inconclusive
        );
        assert_eq!(
            classify(Termination::EndTime, &[1.0, 1.0, 1.0, 50.0], &[50.0]).unwrap(),
            Outcome::Inconclusive
        );
        assert!(classify(Termination::EndTime, &[], &[]).is_err());
    }
}

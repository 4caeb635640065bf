//! The interval system `u_t = (a(u)u_x - u v_x)_x`, `τv_t = v_xx - v + u`
//! with homogeneous Neumann conditions on `[0, 1]`.

use serde::{Deserialize, Serialize};

use crate::error::{domain, KsError, Result};
use crate::fv::{imex_step, Mesh, StepFlag, TimeControls};
use crate::harness::{drive, Geometry, RunConfig, RunRecord};
use crate::kinetics::DiffusionSpec;

/// Cell averages on the uniform grid `x_i = (i + ½)h`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridState {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

/// Result of one adaptive step. On `DtFloorHit` the state is returned
/// unchanged and `dt_used` is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome<S> {
    pub state: S,
    pub dt_used: f64,
    pub flag: StepFlag,
}

pub(crate) fn check_fields(u: &[f64], v: &[f64], t: f64) -> Result<()> {
    if u.is_empty() || u.len() != v.len() {
        return Err(KsError::Input(format!(
            "u and v need equal nonzero lengths, got {} and {}",
            u.len(),
            v.len()
        )));
    }
    if !(t >= 0.0 && t.is_finite()) {
        return Err(KsError::Input(format!(
            "time must be finite and nonnegative, got {t}"
        )));
    }
    if let Some(x) = u.iter().chain(v).find(|x| !(x.is_finite() && **x >= 0.0)) {
        return Err(KsError::Input(format!(
            "fields must be finite and nonnegative, found {x}"
        )));
    }
    Ok(())
}

impl GridState {
    pub fn new(u: Vec<f64>, v: Vec<f64>, t: f64) -> Result<Self> {
        check_fields(&u, &v, t)?;
        Ok(Self { u, v, t })
    }

    pub fn n_cells(&self) -> usize {
        self.u.len()
    }

    pub fn h(&self) -> f64 {
        1.0 / self.n_cells() as f64
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::interval(self.n_cells())
    }

    /// The state under `x ↦ 1 - x`.
    pub fn mirrored(&self) -> Self {
        Self {
            u: self.u.iter().rev().copied().collect(),
            v: self.v.iter().rev().copied().collect(),
            t: self.t,
        }
    }
}

pub fn step(
    state: &GridState,
    tau: f64,
    spec: &DiffusionSpec,
    controls: &TimeControls,
) -> Result<StepOutcome<GridState>> {
    if !(tau > 0.0) {
        return domain(format!("τ must be positive, got {tau}"));
    }
    check_fields(&state.u, &state.v, state.t)?;
    controls.validate()?;
    let mesh = state.mesh();
    let fs = imex_step(&mesh, spec, tau, controls, state.t, &state.u, &state.v);
    Ok(StepOutcome {
        state: GridState {
            u: fs.u,
            v: fs.v,
            t: state.t + fs.dt,
        },
        dt_used: fs.dt,
        flag: fs.flag,
    })
}

pub fn run(config: &RunConfig) -> Result<RunRecord> {
    if config.geometry != Geometry::Interval1D {
        return Err(KsError::Precondition(format!(
            "run drives the interval geometry, got {:?}",
            config.geometry
        )));
    }
    drive(config)
}

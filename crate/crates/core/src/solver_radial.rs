//! The radially symmetric system on the unit ball in dimension `n ≥ 3`:
//! `u_t = r^{1-n}(r^{n-1}(a(u)u_r - u v_r))_r`, `v_t = r^{1-n}(r^{n-1}v_r)_r - v + u`.
//! The relaxation time is 1.

use serde::{Deserialize, Serialize};

use crate::error::{KsError, Result};
use crate::fv::{imex_step, Mesh, TimeControls};
use crate::harness::{drive, Geometry, RunConfig, RunRecord};
use crate::kinetics::{DiffusionFamily, DiffusionSpec};
use crate::solver1d::{check_fields, StepOutcome};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RadialGridState {
    pub n_dim: u32,
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub t: f64,
}

impl RadialGridState {
    pub fn new(n_dim: u32, u: Vec<f64>, v: Vec<f64>, t: f64) -> Result<Self> {
        if n_dim < 3 {
            return Err(KsError::Domain(format!(
                "dimension must be at least 3, got {n_dim}"
            )));
        }
        check_fields(&u, &v, t)?;
        Ok(Self { n_dim, u, v, t })
    }

    pub fn n_cells(&self) -> usize {
        self.u.len()
    }

    pub fn mesh(&self) -> Mesh {
        Mesh::radial(self.n_cells(), self.n_dim)
    }
}

pub(crate) fn check_radial_spec(spec: &DiffusionSpec, n: u32) -> Result<()> {
    match spec.family {
        DiffusionFamily::Constant { .. } => Ok(()),
        DiffusionFamily::CriticalPower { n: k } if k == n => Ok(()),
        other => Err(KsError::Precondition(format!(
            "the ball in dimension {n} takes a constant or the matching critical diffusivity, got {other:?}"
        ))),
    }
}

pub fn step_radial(
    state: &RadialGridState,
    spec: &DiffusionSpec,
    controls: &TimeControls,
) -> Result<StepOutcome<RadialGridState>> {
    check_radial_spec(spec, state.n_dim)?;
    check_fields(&state.u, &state.v, state.t)?;
    controls.validate()?;
    let mesh = state.mesh();
    let fs = imex_step(&mesh, spec, 1.0, controls, state.t, &state.u, &state.v);
    Ok(StepOutcome {
        state: RadialGridState {
            n_dim: state.n_dim,
            u: fs.u,
            v: fs.v,
            t: state.t + fs.dt,
        },
        dt_used: fs.dt,
        flag: fs.flag,
    })
}

pub fn run_radial(config: &RunConfig) -> Result<RunRecord> {
    if !matches!(config.geometry, Geometry::RadialBall(n) if n >= 3) {
        return Err(KsError::Precondition(format!(
            "run_radial drives the ball geometry, got {:?}",
            config.geometry
        )));
    }
    drive(config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fv::StepFlag;

    #[test]
    fn constant_state_is_fixed() {
        let spec = DiffusionSpec::critical_power(3).unwrap();
        let c = TimeControls {
            dt_init: 1e-4,
            dt_max: 1e-3,
            ..TimeControls::default()
        };
        let mut s = RadialGridState::new(3, vec![5.0; 32], vec![5.0; 32], 0.0).unwrap();
        for _ in 0..100 {
            s = step_radial(&s, &spec, &c).unwrap().state;
        }
        assert!(s
            .u
            .iter()
            .chain(&s.v)
            .all(|x| (x - 5.0).abs() < 1e-13 * 5.0));
    }

    #[test]
    fn weighted_mass_is_conserved() {
        let spec = DiffusionSpec::critical_power(4).unwrap();
        let n = 50;
        let u: Vec<f64> = (0..n).map(|i| 2.0 + (0.2 * i as f64).cos()).collect();
        let v = vec![1.0; n];
        let s = RadialGridState::new(4, u, v, 0.0).unwrap();
        let out = step_radial(&s, &spec, &TimeControls::default()).unwrap();
        assert_eq!(out.flag, StepFlag::Ok);
        let mesh = s.mesh();
        let (a, b) = (mesh.integrate(&s.u), mesh.integrate(&out.state.u));
        assert!((a - b).abs() < 1e-14 * a);
    }

    #[test]
    fn spec_must_match_dimension() {
        let s = RadialGridState::new(3, vec![1.0; 8], vec![1.0; 8], 0.0).unwrap();
        let spec = DiffusionSpec::critical_power(4).unwrap();
        assert!(step_radial(&s, &spec, &TimeControls::default()).is_err());
        let spec = DiffusionSpec::integrable_power(2.0).unwrap();
        assert!(step_radial(&s, &spec, &TimeControls::default()).is_err());
        assert!(RadialGridState::new(2, vec![1.0], vec![1.0], 0.0).is_err());
    }
}

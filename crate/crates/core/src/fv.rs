//! Shared finite-volume machinery: meshes with metric weights and the IMEX
//! step used by both geometries.
//!
//! A cell `i` has volume `ω_i`; face `j` (between cells `j-1` and `j`) has
//! area `σ_j`, with `σ_0` and `σ_N` only ever multiplied by zero flux. Centres
//! are a uniform distance `d` apart. The cell update is
//!
//! ```text
//! ω_i (u_i' - u_i)/dt = F_{i+1} - F_i,
//! F_j = σ_j [ ā_j (u_j - u_{j-1})/d - u^up_j (v_j - v_{j-1})/d ],
//! ```
//!
//! with `F_0 = F_N = 0`, so `Σ ω_i u_i` telescopes exactly.

use serde::{Deserialize, Serialize};

use crate::kinetics::DiffusionSpec;

#[derive(Debug, Clone, PartialEq)]
pub struct Mesh {
    pub faces: Vec<f64>,
    pub centers: Vec<f64>,
    pub volumes: Vec<f64>,
    pub face_area: Vec<f64>,
    pub spacing: f64,
}

impl Mesh {
    /// Uniform cells on [0, 1].
    pub fn interval(n_cells: usize) -> Self {
        let h = 1.0 / n_cells as f64;
        let faces: Vec<f64> = (0..=n_cells).map(|j| j as f64 * h).collect();
        Self {
            centers: (0..n_cells).map(|i| (i as f64 + 0.5) * h).collect(),
            volumes: vec![h; n_cells],
            face_area: vec![1.0; n_cells + 1],
            faces,
            spacing: h,
        }
    }

    /// Uniform shells of the unit ball in dimension `dim`, measured with
    /// `r^{dim-1} dr`: `ω_i = (r_{i+1}^dim - r_i^dim)/dim`, `σ_j = r_j^{dim-1}`.
    pub fn radial(n_cells: usize, dim: u32) -> Self {
        let h = 1.0 / n_cells as f64;
        let n = dim as i32;
        let faces: Vec<f64> = (0..=n_cells).map(|j| j as f64 * h).collect();
        let volumes = faces
            .windows(2)
            .map(|w| (w[1].powi(n) - w[0].powi(n)) / dim as f64)
            .collect();
        let face_area = faces.iter().map(|r| r.powi(n - 1)).collect();
        Self {
            centers: (0..n_cells).map(|i| (i as f64 + 0.5) * h).collect(),
            volumes,
            face_area,
            faces,
            spacing: h,
        }
    }

    pub fn n_cells(&self) -> usize {
        self.volumes.len()
    }

    /// `Σ ω_i f_i`.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        self.volumes.iter().zip(f).map(|(w, x)| w * x).sum()
    }

    /// `(1/ω_i) Σ σ (f_nb - f_i)/d`: the Neumann Laplacian in flux form.
    pub fn laplacian(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_cells();
        let d = self.spacing;
        (0..n)
            .map(|i| {
                let mut s = 0.0;
                if i + 1 < n {
                    s += self.face_area[i + 1] * (f[i + 1] - f[i]) / d;
                }
                if i > 0 {
                    s -= self.face_area[i] * (f[i] - f[i - 1]) / d;
                }
                s / self.volumes[i]
            })
            .collect()
    }

    /// Cell-centred gradient: mean of the two adjacent face differences, with
    /// zero at the boundary faces (reflecting ghost cell).
    pub fn centered_gradient(&self, f: &[f64]) -> Vec<f64> {
        let n = self.n_cells();
        let d = self.spacing;
        (0..n)
            .map(|i| {
                let right = if i + 1 < n {
                    (f[i + 1] - f[i]) / d
                } else {
                    0.0
                };
                let left = if i > 0 { (f[i] - f[i - 1]) / d } else { 0.0 };
                0.5 * (left + right)
            })
            .collect()
    }
}

/// Time-step controls shared by both solvers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimeControls {
    pub dt_init: f64,
    pub dt_min: f64,
    pub dt_max: f64,
    pub cfl_safety: f64,
    pub u_blowup_threshold: f64,
    pub t_end: f64,
}

impl TimeControls {
    pub fn validate(&self) -> crate::Result<()> {
        let ok = self.dt_min > 0.0
            && self.dt_min <= self.dt_init
            && self.dt_init <= self.dt_max
            && self.cfl_safety > 0.0
            && self.cfl_safety < 1.0
            && self.u_blowup_threshold > 0.0
            && self.t_end > 0.0;
        if ok {
            Ok(())
        } else {
            Err(crate::KsError::Input(format!(
                "inconsistent time controls {self:?}"
            )))
        }
    }
}

impl Default for TimeControls {
    fn default() -> Self {
        Self {
            dt_init: 1e-6,
            dt_min: 1e-12,
            dt_max: 1e-2,
            cfl_safety: 0.45,
            u_blowup_threshold: 1e6,
            t_end: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepFlag {
    Ok,
    DtFloorHit,
    BlowupThresholdHit,
    NonFiniteDetected,
}

#[derive(Debug, Clone)]
pub(crate) struct FieldStep {
    pub u: Vec<f64>,
    pub v: Vec<f64>,
    pub dt: f64,
    pub flag: StepFlag,
}

/// Largest explicit step keeping every `u_i` nonnegative.
pub(crate) fn positivity_limit(mesh: &Mesh, spec: &DiffusionSpec, u: &[f64], v: &[f64]) -> f64 {
    let n = mesh.n_cells();
    let d = mesh.spacing;
    let mut outflow = vec![0.0; n];
    for j in 1..n {
        let (l, r) = (j - 1, j);
        let abar = 0.5 * (spec.diffusivity(u[l]) + spec.diffusivity(u[r]));
        let w = (v[r] - v[l]) / d;
        let area = mesh.face_area[j];
        outflow[l] += area * (abar / d + w.max(0.0));
        outflow[r] += area * (abar / d + (-w).max(0.0));
    }
    outflow
        .iter()
        .zip(&mesh.volumes)
        .map(|(o, w)| if *o > 0.0 { w / o } else { f64::INFINITY })
        .fold(f64::INFINITY, f64::min)
}

/// Face fluxes `F_j`, `j = 0..=N`, with zero boundary entries.
pub(crate) fn face_fluxes(mesh: &Mesh, spec: &DiffusionSpec, u: &[f64], v: &[f64]) -> Vec<f64> {
    let n = mesh.n_cells();
    let d = mesh.spacing;
    let mut flux = vec![0.0; n + 1];
    for j in 1..n {
        let (l, r) = (j - 1, j);
        let abar = 0.5 * (spec.diffusivity(u[l]) + spec.diffusivity(u[r]));
        let dv = v[r] - v[l];
        let upwind = if dv > 0.0 {
            u[l]
        } else if dv < 0.0 {
            u[r]
        } else {
            0.0
        };
        flux[j] = mesh.face_area[j] * (abar * (u[r] - u[l]) - upwind * dv) / d;
    }
    flux
}

/// Solves `ω(τ/dt + 1) v' - ∇·(σ∇v')·ω = ω(τ/dt v + u)` (Thomas algorithm).
pub(crate) fn implicit_v(mesh: &Mesh, tau: f64, dt: f64, v: &[f64], source: &[f64]) -> Vec<f64> {
    let n = mesh.n_cells();
    let d = mesh.spacing;
    let k = tau / dt;
    let mut lower = vec![0.0; n];
    let mut diag = vec![0.0; n];
    let mut upper = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for i in 0..n {
        let w = mesh.volumes[i];
        let cl = if i > 0 { mesh.face_area[i] / d } else { 0.0 };
        let cr = if i + 1 < n {
            mesh.face_area[i + 1] / d
        } else {
            0.0
        };
        lower[i] = -cl;
        upper[i] = -cr;
        diag[i] = w * (k + 1.0) + cl + cr;
        rhs[i] = w * (k * v[i] + source[i]);
    }
    solve_tridiagonal(&lower, &diag, &upper, &rhs)
}

/// Thomas algorithm for a diagonally dominant tridiagonal system.
pub(crate) fn solve_tridiagonal(
    lower: &[f64],
    diag: &[f64],
    upper: &[f64],
    rhs: &[f64],
) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut x = vec![0.0; n];
    let mut beta = diag[0];
    x[0] = rhs[0] / beta;
    for i in 1..n {
        c[i] = upper[i - 1] / beta;
        beta = diag[i] - lower[i] * c[i];
        x[i] = (rhs[i] - lower[i] * x[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        x[i] -= c[i + 1] * x[i + 1];
    }
    x
}

/// One IMEX step: explicit conservative update of `u`, then implicit `v`
/// with the new `u` as source.
pub(crate) fn imex_step(
    mesh: &Mesh,
    spec: &DiffusionSpec,
    tau: f64,
    controls: &TimeControls,
    t: f64,
    u: &[f64],
    v: &[f64],
) -> FieldStep {
    let remaining = controls.t_end - t;
    let limit = controls.cfl_safety * positivity_limit(mesh, spec, u, v);
    if limit < controls.dt_min && remaining > limit {
        return FieldStep {
            u: u.to_vec(),
            v: v.to_vec(),
            dt: 0.0,
            flag: StepFlag::DtFloorHit,
        };
    }
    let dt = limit.min(controls.dt_max).min(remaining);
    let flux = face_fluxes(mesh, spec, u, v);
    let new_u: Vec<f64> = (0..mesh.n_cells())
        .map(|i| {
            let next = u[i] + dt * (flux[i + 1] - flux[i]) / mesh.volumes[i];
            // rounding can leave -1e-17 where the update is exactly the limit
            next.max(0.0)
        })
        .collect();
    let new_v = implicit_v(mesh, tau, dt, v, &new_u);
    let flag = if new_u.iter().chain(&new_v).any(|x| !x.is_finite()) {
        StepFlag::NonFiniteDetected
    } else if new_u.iter().cloned().fold(0.0, f64::max) >= controls.u_blowup_threshold {
        StepFlag::BlowupThresholdHit
    } else {
        StepFlag::Ok
    };
    FieldStep {
        u: new_u,
        v: new_v,
        dt,
        flag,
    }
}

//! Functionals evaluated on grid snapshots: masses, cumulative masses, the
//! free energy and its dissipation, generalized moments, the bound functions
//! of the moment argument and the radial second-moment inequality.
//!
//! Radial quantities use the measure `r^{n-1} dr` on `[0, 1]`; physical ball
//! integrals are `n|B(0,1)|` times these.

mod moments;
mod radial;

pub use moments::{
    adaptive_majorant, jensen_chain_check, lambda_fn, moment_identity_rhs, theta_find,
    JensenExponent, JensenSlacks, Lambda, Theta,
};
pub use radial::{
    istotne_rhs, leading_condition, m2_derivative, m2_radial, m_star, term_chain_check,
    unit_ball_volume, IstotneVariant, TermSlacks,
};

use serde::{Deserialize, Serialize};

use crate::error::{domain, KsError, Result};
use crate::fv::Mesh;
use crate::kinetics::{DiffusionSpec, U_FLOOR};

/// Borrowed view of a state on its mesh.
#[derive(Debug, Clone, Copy)]
pub struct Snapshot<'a> {
    pub mesh: &'a Mesh,
    pub u: &'a [f64],
    pub v: &'a [f64],
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LyapunovSample {
    pub t: f64,
    pub value: f64,
    pub dissipation_v: f64,
    pub dissipation_flux: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentSample {
    pub t: f64,
    /// `M_q` on the interval, `M_2` on the ball.
    pub moment: f64,
    /// Exponent `q` (interval only).
    pub q: Option<f64>,
    pub rhs_identity: f64,
    pub rhs_bound: f64,
}

/// Running suprema/infima measured along a trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MeasuredBounds {
    /// sup ‖v‖_∞
    pub c1: f64,
    /// sup ‖v_t‖₂
    pub c2: f64,
    /// inf L
    pub l_lower: f64,
}

impl Default for MeasuredBounds {
    fn default() -> Self {
        Self {
            c1: 0.0,
            c2: 0.0,
            l_lower: f64::INFINITY,
        }
    }
}

impl MeasuredBounds {
    pub fn update(&mut self, v_linf: f64, vt_l2: f64, lyapunov: f64) {
        self.c1 = self.c1.max(v_linf);
        self.c2 = self.c2.max(vt_l2);
        self.l_lower = self.l_lower.min(lyapunov);
    }
}

/// `(Σ ω u, Σ ω v)`. On the ball this is `∫ u r^{n-1} dr`, i.e. `M/n` for
/// mean density `M`.
pub fn masses(s: &Snapshot) -> (f64, f64) {
    (s.mesh.integrate(s.u), s.mesh.integrate(s.v))
}

/// Face samples of the cumulative mass, `U_0 = 0`, `U_j = Σ_{i<j} ω_i f_i`.
pub fn cumulative(mesh: &Mesh, f: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(f.len() + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for (w, x) in mesh.volumes.iter().zip(f) {
        acc += w * x;
        out.push(acc);
    }
    out
}

/// `∫_cell U^q dx` for `U` affine from `ua` to `ub` across a cell of width `h`.
pub(crate) fn cell_power_integral(ua: f64, ub: f64, h: f64, q: f64) -> f64 {
    let (lo, hi) = if ua <= ub { (ua, ub) } else { (ub, ua) };
    if hi <= 0.0 {
        return 0.0;
    }
    if hi - lo > 1e-3 * hi {
        h * (hi.powf(q + 1.0) - lo.powf(q + 1.0)) / ((q + 1.0) * (hi - lo))
    } else {
        // nearly constant: four-point Gauss–Legendre is exact to ~(Δ/U)^8
        const X: [f64; 2] = [0.339_981_043_584_856_3, 0.861_136_311_594_052_6];
        const W: [f64; 2] = [0.652_145_154_862_546_1, 0.347_854_845_137_453_9];
        let (c, d) = (0.5 * (lo + hi), 0.5 * (hi - lo));
        let s: f64 = (0..2)
            .map(|k| W[k] * ((c - d * X[k]).powf(q) + (c + d * X[k]).powf(q)))
            .sum();
        0.5 * h * s
    }
}

/// `M_q = (1/q) ∫_0^1 U^q dx` for the interval cumulative `U` sampled at the
/// faces; `U` is piecewise affine, and each cell is integrated exactly.
pub fn moment_q(faces: &[f64], cum: &[f64], q: f64) -> Result<f64> {
    if !(q > 2.0) {
        return domain(format!("moment exponent must exceed 2, got {q}"));
    }
    if faces.len() != cum.len() {
        return Err(KsError::Input(
            "faces and cumulative differ in length".into(),
        ));
    }
    let total: f64 = faces
        .windows(2)
        .zip(cum.windows(2))
        .map(|(x, u)| cell_power_integral(u[0], u[1], x[1] - x[0], q))
        .sum();
    Ok(total / q)
}

/// `v_t = (Δv - v + u)/τ` cell by cell.
pub fn vt_field(s: &Snapshot, tau: f64) -> Vec<f64> {
    s.mesh
        .laplacian(s.v)
        .iter()
        .zip(s.u.iter().zip(s.v))
        .map(|(lap, (u, v))| (lap - v + u) / tau)
        .collect()
}

/// Discrete `‖v_t‖₂` in the mesh measure, from the second equation rather than
/// time differences.
pub fn vt_norm(s: &Snapshot, tau: f64) -> f64 {
    let vt = vt_field(s, tau);
    s.mesh
        .volumes
        .iter()
        .zip(&vt)
        .map(|(w, x)| w * x * x)
        .sum::<f64>()
        .sqrt()
}

pub fn linf(f: &[f64]) -> f64 {
    f.iter().fold(0.0, |a, x| a.max(x.abs()))
}

/// Free energy `∫ Φ(u) - uv + |∇v|²/2 + v²/2` and its two dissipation rates.
pub fn lyapunov(s: &Snapshot, spec: &DiffusionSpec, tau: f64) -> LyapunovSample {
    let mesh = s.mesh;
    let gv = mesh.centered_gradient(s.v);
    let gu = mesh.centered_gradient(s.u);
    let vt = vt_field(s, tau);
    let mut value = 0.0;
    let mut diss_v = 0.0;
    let mut diss_flux = 0.0;
    for i in 0..mesh.n_cells() {
        let (u, v, w) = (s.u[i], s.v[i], mesh.volumes[i]);
        value += w * (spec.phi_floored(u) - u * v + 0.5 * gv[i] * gv[i] + 0.5 * v * v);
        diss_v += w * vt[i] * vt[i];
        if u >= U_FLOOR {
            let j = spec.diffusivity(u) * gu[i] - u * gv[i];
            diss_flux += w * j * j / u;
        }
    }
    LyapunovSample {
        t: s.t,
        value,
        dissipation_v: diss_v,
        dissipation_flux: diss_flux,
    }
}

/// `|L(t) + τ ∫ ‖v_t‖² + ∫∫ (a u_x - u v_x)²/u - L(0)|` at the last sample,
/// trapezoidal in time.
pub fn dissipation_residual(traj: &[LyapunovSample], tau: f64) -> Result<f64> {
    if traj.len() < 2 {
        return Err(KsError::Input("need at least two Lyapunov samples".into()));
    }
    let mut integral = 0.0;
    for w in traj.windows(2) {
        let dt = w[1].t - w[0].t;
        let a = tau * w[0].dissipation_v + w[0].dissipation_flux;
        let b = tau * w[1].dissipation_v + w[1].dissipation_flux;
        integral += 0.5 * dt * (a + b);
    }
    let last = traj.last().expect("nonempty");
    Ok((last.value + integral - traj[0].value).abs())
}

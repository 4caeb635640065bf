use serde::{Deserialize, Serialize};

use super::{cumulative, MeasuredBounds, Snapshot};
use crate::error::{domain, KsError, Result};
use crate::kinetics::{DiffusionFamily, DiffusionSpec};
use crate::quadrature::gauss_legendre;

/// Exponent on `‖v_t‖_{L²(B)}` in the last term of the second-moment bound.
///
/// `Printed` keeps the square root as it appears in the inequality;
/// `Linear` is what the Cauchy–Schwarz step yields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum IstotneVariant {
    #[default]
    Printed,
    Linear,
}

/// `|B(0,1)| = π^{n/2} / Γ(n/2 + 1)`.
pub fn unit_ball_volume(n: u32) -> f64 {
    // Γ(n/2 + 1) by the recursion Γ(x + 1) = xΓ(x), from Γ(1) or Γ(3/2)
    let (mut x, mut gamma) = if n.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (1.5, std::f64::consts::PI.sqrt() / 2.0)
    };
    let target = n as f64 / 2.0 + 1.0;
    while x < target - 0.25 {
        gamma *= x;
        x += 1.0;
    }
    std::f64::consts::PI.powf(n as f64 / 2.0) / gamma
}

fn leading_coefficient(n: f64) -> f64 {
    (2.0 * (n - 1.0)).powf(2.0 - 2.0 / n) / ((2.0 - 2.0 / n) * (3.0 - 2.0 / n))
}

/// `C_n (M/n)^{3-2/n} - (M/n)^3/6`, the mass-only part of the bound.
pub fn leading_condition(mean_density: f64, n: u32) -> f64 {
    let nf = n as f64;
    let x = mean_density / nf;
    leading_coefficient(nf) * x.powf(3.0 - 2.0 / nf) - x.powi(3) / 6.0
}

/// Mean density at which [`leading_condition`] changes sign:
/// `m*(n) = n [6 C_n]^{n/2}`.
pub fn m_star(n: u32) -> Result<f64> {
    if n < 3 {
        return domain(format!("critical mass is defined for n ≥ 3, got {n}"));
    }
    let nf = n as f64;
    Ok(nf * (6.0 * leading_coefficient(nf)).powf(nf / 2.0))
}

/// Cell-local polynomial view of `U(r) = U_a + u_i (r^n - r_a^n)/n`.
struct CellRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl CellRule {
    /// Exact for the degree `3n - 1` integrands appearing below.
    fn new(n: u32) -> Self {
        let (nodes, weights) = gauss_legendre((3 * n as usize) / 2 + 1);
        Self { nodes, weights }
    }

    /// `Σ_cells ∫ f(r, U(r), u_i) dr`.
    fn integrate<F: Fn(usize, f64, f64) -> f64>(
        &self,
        faces: &[f64],
        cum: &[f64],
        n: u32,
        f: F,
    ) -> f64 {
        let nf = n as f64;
        let mut total = 0.0;
        for i in 0..faces.len() - 1 {
            let (ra, rb) = (faces[i], faces[i + 1]);
            let (c, hw) = (0.5 * (ra + rb), 0.5 * (rb - ra));
            let ui = density_in_cell(faces, cum, n, i);
            for (x, w) in self.nodes.iter().zip(&self.weights) {
                let r = c + hw * x;
                let uu = cum[i] + ui * (r.powi(n as i32) - ra.powi(n as i32)) / nf;
                total += hw * w * f(i, r, uu);
            }
        }
        total
    }
}

fn density_in_cell(faces: &[f64], cum: &[f64], n: u32, i: usize) -> f64 {
    let vol = (faces[i + 1].powi(n as i32) - faces[i].powi(n as i32)) / n as f64;
    (cum[i + 1] - cum[i]) / vol
}

/// `M_2 = ½∫_0^1 (M/n - U)² r^{n-1} dr`, integrated exactly cell by cell for
/// the piecewise-constant density encoded in the face cumulative `cum`.
pub fn m2_radial(faces: &[f64], cum: &[f64], mean_density: f64, n: u32) -> Result<f64> {
    if faces.len() != cum.len() || faces.len() < 2 {
        return Err(KsError::Input(
            "faces and cumulative must match and be nonempty".into(),
        ));
    }
    let cap = mean_density / n as f64;
    let rule = CellRule::new(n);
    let nm1 = n as i32 - 1;
    Ok(0.5 * rule.integrate(faces, cum, n, |_, r, uu| (cap - uu).powi(2) * r.powi(nm1)))
}

fn mean_density_of(s: &Snapshot, n: u32) -> f64 {
    n as f64 * s.mesh.integrate(s.u)
}

/// `dM_2/dt = ∫[2(n-1)r^{2n-3}(M/n - U) - r^{2n-2}U_r] A(u) dr + ∫ (M/n - U) r^{2n-2} u v_r dr`
/// with `A(0) = 0`: the time derivative of `M_2` along the radial flow,
/// integrated by parts so that no derivative of `u` is needed.
pub fn m2_derivative(s: &Snapshot, spec: &DiffusionSpec, n: u32) -> Result<f64> {
    let faces = &s.mesh.faces;
    let cum = cumulative(s.mesh, s.u);
    let cap = mean_density_of(s, n) / n as f64;
    let grad_v = s.mesh.centered_gradient(s.v);
    let prim: Vec<f64> =
        s.u.iter()
            .map(|&x| spec.a_primitive(x))
            .collect::<Result<_>>()?;
    let (n1, n2, n3) = (n as i32 - 1, 2 * n as i32 - 2, 2 * n as i32 - 3);
    let nf = n as f64;
    let rule = CellRule::new(n);
    Ok(rule.integrate(faces, &cum, n, |i, r, uu| {
        let ur = r.powi(n1) * s.u[i];
        let diffusive = (2.0 * (nf - 1.0) * r.powi(n3) * (cap - uu) - r.powi(n2) * ur) * prim[i];
        diffusive + (cap - uu) * r.powi(n2) * s.u[i] * grad_v[i]
    }))
}

/// Printed majorant of `dM_2/dt`:
/// `C_n(M/n)^{3-2/n} - (M/n)^3/6 + (n-1)(2n)^{1-2/n}(M/n)^{4/n}M_2^{1-2/n}
///  + ‖v‖_∞ M_2 + M n^{-3/2}|B|^{-1/2} M_2^{1/2} ‖v_t‖_{L²(B)}^{e}`.
///
/// `bounds.c2` is the measured `‖v_t‖₂` in the `r^{n-1}dr` measure; it is
/// converted to the ball norm with the factor `(n|B|)^{1/2}`.
pub fn istotne_rhs(
    s: &Snapshot,
    mean_density: f64,
    n: u32,
    bounds: &MeasuredBounds,
    variant: IstotneVariant,
) -> Result<f64> {
    if n < 3 {
        return domain(format!("dimension must be at least 3, got {n}"));
    }
    let nf = n as f64;
    let cum = cumulative(s.mesh, s.u);
    let m2 = m2_radial(&s.mesh.faces, &cum, mean_density, n)?.max(0.0);
    let x = mean_density / nf;
    let ball = unit_ball_volume(n);
    let vt_ball = (nf * ball).sqrt() * bounds.c2;
    let vt_power = match variant {
        IstotneVariant::Printed => vt_ball.sqrt(),
        IstotneVariant::Linear => vt_ball,
    };
    Ok(leading_condition(mean_density, n)
        + (nf - 1.0) * (2.0 * nf).powf(1.0 - 2.0 / nf) * x.powf(4.0 / nf) * m2.powf(1.0 - 2.0 / nf)
        + bounds.c1 * m2
        + mean_density / (nf.powf(1.5) * ball.sqrt()) * m2.sqrt() * vt_power)
}

/// Slacks of the two estimates that bound the diffusive term of `dM_2/dt`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TermSlacks {
    /// `C_n(M/n)^{3-2/n} + 2(n-1)∫r^{n-2}(M/n-U)U_r - ∫[...]A(u)`
    pub term1: f64,
    /// `(n-1)(2n)^{1-2/n}(M/n)^{4/n}M_2^{1-2/n} - 2(n-1)∫r^{n-2}(M/n-U)U_r`
    pub term2: f64,
}

/// Evaluates both sides of the diffusive-term estimates for the critical
/// diffusivity `a(u) = (1+u)^{1-2/n}`, with `M` taken from the data so that
/// `U(1) = M/n`.
pub fn term_chain_check(s: &Snapshot, spec: &DiffusionSpec, n: u32) -> Result<TermSlacks> {
    match spec.family {
        DiffusionFamily::CriticalPower { n: k } if k == n => {}
        other => {
            return Err(KsError::Precondition(format!(
                "diffusive-term estimates need the critical power for n = {n}, got {other:?}"
            )))
        }
    }
    let nf = n as f64;
    let faces = &s.mesh.faces;
    let cum = cumulative(s.mesh, s.u);
    let mean = mean_density_of(s, n);
    let cap = mean / nf;
    let prim: Vec<f64> =
        s.u.iter()
            .map(|&x| spec.a_primitive(x))
            .collect::<Result<_>>()?;
    let (n1, n2, n3, nm2) = (
        n as i32 - 1,
        2 * n as i32 - 2,
        2 * n as i32 - 3,
        n as i32 - 2,
    );
    let rule = CellRule::new(n);
    let term = rule.integrate(faces, &cum, n, |i, r, uu| {
        let ur = r.powi(n1) * s.u[i];
        (2.0 * (nf - 1.0) * r.powi(n3) * (cap - uu) - r.powi(n2) * ur) * prim[i]
    });
    let weighted = 2.0
        * (nf - 1.0)
        * rule.integrate(faces, &cum, n, |i, r, uu| {
            r.powi(nm2) * (cap - uu) * r.powi(n1) * s.u[i]
        });
    let m2 = m2_radial(faces, &cum, mean, n)?.max(0.0);
    let term1_bound = leading_coefficient(nf) * cap.powf(3.0 - 2.0 / nf) + weighted;
    let term2_bound =
        (nf - 1.0) * (2.0 * nf).powf(1.0 - 2.0 / nf) * cap.powf(4.0 / nf) * m2.powf(1.0 - 2.0 / nf);
    Ok(TermSlacks {
        term1: term1_bound - term,
        term2: term2_bound - weighted,
    })
}

use serde::{Deserialize, Serialize};

use super::{cumulative, vt_field, MeasuredBounds, Snapshot};
use crate::error::{domain, KsError, Result};
use crate::kinetics::{build_majorant, DiffusionSpec, MajorantB};
use crate::quadrature::gauss_legendre;

/// Exponent carried by the `β` factor of `Λ`.
///
/// The printed bound uses `(q-2)/2`; the Jensen step it is derived from
/// produces `(q-2)/q`. Both are available so either can be checked.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JensenExponent {
    #[default]
    Printed,
    Derived,
}

impl JensenExponent {
    fn value(self, q: f64) -> f64 {
        match self {
            JensenExponent::Printed => (q - 2.0) / 2.0,
            JensenExponent::Derived => (q - 2.0) / q,
        }
    }
}

/// `Λ(r) = c₁r + (q-1)B(m)^{2/q}(m^{q+1}/(q+1))^e β(m^{q+1}/(q(q+1)r))^e
///        + c₂τ m^{q/2} q^{-1/2} r^{1/2} - m^{q+1}/(2q(q+1))`.
#[derive(Debug, Clone)]
pub struct Lambda {
    pub m: f64,
    pub q: f64,
    pub tau: f64,
    pub c1: f64,
    pub c2: f64,
    pub exponent: JensenExponent,
    b: MajorantB,
}

impl Lambda {
    fn parts(&self, beta: f64, r: f64) -> f64 {
        let (m, q) = (self.m, self.q);
        let e = self.exponent.value(q);
        let mq1 = m.powf(q + 1.0);
        let jensen =
            (q - 1.0) * self.b.eval(m).powf(2.0 / q) * (mq1 / (q + 1.0)).powf(e) * beta.powf(e);
        let vt = self.c2 * self.tau * m.powf(q / 2.0) / q.sqrt() * r.sqrt();
        self.c1 * r + jensen + vt - mq1 / (2.0 * q * (q + 1.0))
    }

    pub fn eval(&self, r: f64) -> Result<f64> {
        if !(r > 0.0) {
            return domain(format!(
                "Λ is evaluated at r > 0 (use at_zero for the limit), got {r}"
            ));
        }
        let (m, q) = (self.m, self.q);
        let arg = m.powf(q + 1.0) / (q * (q + 1.0) * r);
        Ok(self.parts(self.b.beta(arg)?, r))
    }

    /// `Λ(0⁺)`: the `β` argument runs off to infinity.
    pub fn at_zero(&self) -> f64 {
        self.parts(self.b.asymptotic_slope(), 0.0)
    }

    pub fn majorant(&self) -> &MajorantB {
        &self.b
    }
}

pub fn lambda_fn(
    m: f64,
    q: f64,
    tau: f64,
    b: &MajorantB,
    bounds: &MeasuredBounds,
) -> Result<Lambda> {
    if !(m > 0.0) {
        return domain(format!("mass must be positive, got {m}"));
    }
    if !(q > 2.0) {
        return domain(format!("q must exceed 2, got {q}"));
    }
    if !(tau > 0.0) {
        return domain(format!("τ must be positive, got {tau}"));
    }
    Ok(Lambda {
        m,
        q,
        tau,
        c1: bounds.c1,
        c2: bounds.c2,
        exponent: JensenExponent::Printed,
        b: b.clone(),
    })
}

/// Builds `B` on `[0, r_max]` with `r_max` raised by decades until
/// `Λ(0⁺) < 0`. `Λ(0⁺)` does not depend on the measured bounds.
pub fn adaptive_majorant(
    spec: &DiffusionSpec,
    m: f64,
    q: f64,
    tau: f64,
    exponent: JensenExponent,
) -> Result<MajorantB> {
    let mut last = f64::NAN;
    for decade in 2..=14 {
        let b = build_majorant(spec, 10f64.powi(decade), 1500)?;
        let mut lam = lambda_fn(m, q, tau, &b, &MeasuredBounds::default())?;
        lam.exponent = exponent;
        last = lam.at_zero();
        if last < 0.0 {
            return Ok(b);
        }
    }
    Err(KsError::Precondition(format!(
        "Λ(0⁺) = {last} stays nonnegative up to r_max = 1e14"
    )))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Theta {
    /// First sign change of Λ.
    Found(f64),
    /// Λ < 0 on the whole scanned bracket.
    AllNegative(f64),
}

impl Theta {
    pub fn value(&self) -> f64 {
        match *self {
            Theta::Found(t) | Theta::AllNegative(t) => t,
        }
    }
}

/// Largest `θ ≤ r_hi` with `Λ < 0` on `(0, θ]`.
///
/// Scans a grid that is geometric near zero and uniform beyond `r_hi/1000`,
/// then bisects the first cell where `Λ ≥ 0`.
pub fn theta_find<F>(lambda: F, at_zero: f64, r_hi: f64) -> Result<Theta>
where
    F: Fn(f64) -> Result<f64>,
{
    if !(at_zero < 0.0) {
        return Err(KsError::Precondition(format!(
            "Λ(0⁺) = {at_zero} is not negative; enlarge the majorant's r_max"
        )));
    }
    if !(r_hi > 0.0) {
        return domain(format!("bracket must be positive, got {r_hi}"));
    }
    let uniform = 1000;
    let mut grid: Vec<f64> = (0..60)
        .map(|k| r_hi * 1e-15 * 10f64.powf(k as f64 * 12.0 / 60.0))
        .collect();
    grid.extend((1..=uniform).map(|k| r_hi * k as f64 / uniform as f64));
    let mut lo = 0.0;
    for &r in &grid {
        if lambda(r)? >= 0.0 {
            let mut hi = r;
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if mid <= lo || mid >= hi {
                    break;
                }
                if lambda(mid)? < 0.0 {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            return Ok(Theta::Found(lo));
        }
        lo = r;
    }
    Ok(Theta::AllNegative(r_hi))
}

/// Right-hand side of the moment identity
/// `dM_q/dt = -(q-1)∫U^{q-2} u A(u) + [U^{q-1}A(u)]_0^1 + ∫U^{q-1} u (U - V - τV_t)`
/// with the tail primitive `A` and `V_t` accumulated from the second equation.
pub fn moment_identity_rhs(s: &Snapshot, spec: &DiffusionSpec, tau: f64, q: f64) -> Result<f64> {
    if !(q > 2.0) {
        return domain(format!("q must exceed 2, got {q}"));
    }
    let mesh = s.mesh;
    let cu = cumulative(mesh, s.u);
    let cv = cumulative(mesh, s.v);
    let cvt = cumulative(mesh, &vt_field(s, tau));
    let (nodes, weights) = gauss_legendre(4);
    let mut diffusive = 0.0;
    let mut transport = 0.0;
    for i in 0..mesh.n_cells() {
        let h = mesh.volumes[i];
        let a_u = spec.a_tail(s.u[i])?;
        for (x, w) in nodes.iter().zip(&weights) {
            let t = 0.5 * (x + 1.0);
            let lerp = |f: &[f64]| f[i] + t * (f[i + 1] - f[i]);
            let (uu, vv, vt) = (lerp(&cu), lerp(&cv), lerp(&cvt));
            let wt = 0.5 * w * h;
            diffusive += wt * uu.powf(q - 2.0) * s.u[i] * a_u;
            transport += wt * uu.powf(q - 1.0) * s.u[i] * (uu - vv - tau * vt);
        }
    }
    let m = *cu.last().expect("nonempty");
    let boundary = m.powf(q - 1.0) * spec.a_tail(*s.u.last().expect("nonempty"))?;
    Ok(-(q - 1.0) * diffusive + boundary + transport)
}

/// Slacks of the three Jensen steps bounding `∫U^{q-2}B(u)`.
///
/// Integrals use the cell-midpoint measure, so each step is an exact discrete
/// Jensen inequality and the slacks are nonnegative up to rounding.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JensenSlacks {
    /// power `t ↦ t^{(q-2)/q}` under `B(u)dx/∫B(u)`
    pub power: f64,
    /// `B` under `dx`: `B(∫u) - ∫B(u)`
    pub mass: f64,
    /// `B` under `U^q dx/(qM_q)`
    pub moment: f64,
    /// bound minus `∫U^{q-2}B(u)` for the whole chain
    pub total: f64,
    /// the measure `B(u)dx` or `U^q dx` was null
    pub vacuous: bool,
}

pub fn jensen_chain_check(s: &Snapshot, b: &MajorantB, q: f64) -> Result<JensenSlacks> {
    if !(q > 2.0) {
        return domain(format!("q must exceed 2, got {q}"));
    }
    if s.u.iter().all(|&x| x == 0.0) {
        return Err(KsError::Input("density vanishes identically".into()));
    }
    let mesh = s.mesh;
    let cu = cumulative(mesh, s.u);
    let uc: Vec<f64> = cu.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect();
    let bu: Vec<f64> = s.u.iter().map(|&x| b.eval(x)).collect();
    let w = &mesh.volumes;
    let sum = |f: &dyn Fn(usize) -> f64| -> f64 { (0..w.len()).map(|i| w[i] * f(i)).sum() };
    let int_b = sum(&|i| bu[i]);
    let int_uq = sum(&|i| uc[i].powf(q));
    if int_b <= 0.0 || int_uq <= 0.0 {
        return Ok(JensenSlacks {
            power: 0.0,
            mass: 0.0,
            moment: 0.0,
            total: 0.0,
            vacuous: true,
        });
    }
    let e = (q - 2.0) / q;
    let lhs = sum(&|i| uc[i].powf(q - 2.0) * bu[i]);
    let b_uq = sum(&|i| bu[i] * uc[i].powf(q)) / int_uq;
    let power = int_b * (sum(&|i| uc[i].powf(q) * bu[i]) / int_b).powf(e) - lhs;
    let mass_total = sum(&|i| s.u[i]);
    let mass = b.eval(mass_total) - int_b;
    let moment_arg = sum(&|i| s.u[i] * uc[i].powf(q)) / int_uq;
    let moment = b.eval(moment_arg) - b_uq;
    let bound = int_uq.powf(e) * b.eval(mass_total).powf(2.0 / q) * b.eval(moment_arg).powf(e);
    Ok(JensenSlacks {
        power,
        mass,
        moment,
        total: bound - lhs,
        vacuous: false,
    })
}

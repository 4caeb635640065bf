//! The diffusion nonlinearity `a(u)`, its two primitive conventions and the
//! entropy density Φ.
//!
//! Two primitives coexist and are never inferred from each other:
//!
//! * [`DiffusionSpec::a_tail`] is `A(u) = -∫_u^∞ a(s) ds`, defined only for
//!   integrable families. It is nonpositive and increases to zero.
//! * [`DiffusionSpec::a_primitive`] is `A(u) = ∫_0^u a(s) ds`, defined for every
//!   family. It vanishes at zero and increases.

mod majorant;

pub use majorant::{build_majorant, upper_concave_envelope, MajorantB};

use serde::{Deserialize, Serialize};

use crate::error::{domain, KsError, Result};
use crate::quadrature::{integrate, integrate_to_infinity, Tolerance};

/// Densities below this floor are clamped before entering Φ or `1/u` terms.
pub const U_FLOOR: f64 = 1e-12;

/// Closed-form families of positive `C²` diffusivities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum DiffusionFamily {
    /// `a(u) = c`
    Constant { c: f64 },
    /// `a(u) = (1 + u)^(-p)` with `p > 1`
    IntegrablePower { p: f64 },
    /// `a(u) = (1 + u)^(1 - 2/n)` with `n ≥ 3`
    CriticalPower { n: u32 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionSpec {
    pub family: DiffusionFamily,
    /// Use the analytic primitives. When false every integral goes through
    /// adaptive quadrature, which is how the closed forms are cross-checked.
    pub closed_form: bool,
}

impl DiffusionSpec {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c.is_finite()) {
            return domain(format!("constant diffusivity must be positive, got {c}"));
        }
        Ok(Self::from_family(DiffusionFamily::Constant { c }))
    }

    pub fn integrable_power(p: f64) -> Result<Self> {
        if !(p > 1.0 && p.is_finite()) {
            return domain(format!("integrable power needs p > 1, got {p}"));
        }
        Ok(Self::from_family(DiffusionFamily::IntegrablePower { p }))
    }

    pub fn critical_power(n: u32) -> Result<Self> {
        if n < 3 {
            return domain(format!("critical power needs n ≥ 3, got {n}"));
        }
        Ok(Self::from_family(DiffusionFamily::CriticalPower { n }))
    }

    fn from_family(family: DiffusionFamily) -> Self {
        Self {
            family,
            closed_form: true,
        }
    }

    pub fn with_quadrature(mut self) -> Self {
        self.closed_form = false;
        self
    }

    /// True when `∫_0^∞ a < ∞`, i.e. the tail primitive exists.
    pub fn is_integrable(&self) -> bool {
        matches!(self.family, DiffusionFamily::IntegrablePower { .. })
    }

    /// `a(u)` without argument checks; the solvers only pass nonnegative data.
    #[inline]
    pub fn diffusivity(&self, u: f64) -> f64 {
        match self.family {
            DiffusionFamily::Constant { c } => c,
            DiffusionFamily::IntegrablePower { p } => (1.0 + u).powf(-p),
            DiffusionFamily::CriticalPower { n } => (1.0 + u).powf(1.0 - 2.0 / n as f64),
        }
    }

    pub fn a_eval(&self, u: f64) -> Result<f64> {
        check_density(u)?;
        Ok(self.diffusivity(u))
    }

    /// `-∫_u^∞ a(s) ds`.
    pub fn a_tail(&self, u: f64) -> Result<f64> {
        let DiffusionFamily::IntegrablePower { p } = self.family else {
            return Err(KsError::UnsupportedConvention(format!(
                "tail primitive requires an integrable diffusivity, got {:?}",
                self.family
            )));
        };
        check_density(u)?;
        if self.closed_form {
            Ok(-(1.0 + u).powf(1.0 - p) / (p - 1.0))
        } else {
            integrate_to_infinity(|s| self.diffusivity(s), u, Tolerance::default()).map(|v| -v)
        }
    }

    /// `∫_0^u a(s) ds`.
    pub fn a_primitive(&self, u: f64) -> Result<f64> {
        check_density(u)?;
        if !self.closed_form {
            return integrate(|s| self.diffusivity(s), 0.0, u, Tolerance::default());
        }
        Ok(match self.family {
            DiffusionFamily::Constant { c } => c * u,
            DiffusionFamily::IntegrablePower { p } => (1.0 - (1.0 + u).powf(1.0 - p)) / (p - 1.0),
            DiffusionFamily::CriticalPower { n } => {
                let e = 2.0 - 2.0 / n as f64;
                ((1.0 + u).powf(e) - 1.0) / e
            }
        })
    }

    /// Φ with `Φ(1) = Φ'(1) = 0` and `Φ''(r) = a(r)/r`.
    pub fn phi(&self, u: f64) -> Result<f64> {
        if !(u > 0.0 && u.is_finite()) {
            return domain(format!("Φ is defined for u > 0, got {u}"));
        }
        if let (DiffusionFamily::Constant { c }, true) = (self.family, self.closed_form) {
            return Ok(c * (u * u.ln() - u + 1.0));
        }
        // Φ(u) = u ∫_1^u a(s)/s ds − ∫_1^u a(s) ds, with s = e^y in the first integral
        let log_moment = integrate(
            |y: f64| self.diffusivity(y.exp()),
            0.0,
            u.ln(),
            Tolerance::default(),
        )?;
        let primitive = self.a_primitive(u)? - self.a_primitive(1.0)?;
        Ok(u * log_moment - primitive)
    }

    /// Φ at `max(u, U_FLOOR)`; the form used inside integrands.
    pub fn phi_floored(&self, u: f64) -> f64 {
        self.phi(u.max(U_FLOOR)).unwrap_or(f64::NAN)
    }
}

fn check_density(u: f64) -> Result<()> {
    if u >= 0.0 && u.is_finite() {
        Ok(())
    } else {
        domain(format!("density must be finite and nonnegative, got {u}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // Composite Simpson on a fine uniform grid; independent of the adaptive rule.
    fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
        let n = n + n % 2;
        let h = (b - a) / n as f64;
        let mut s = f(a) + f(b);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            s += w * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    fn rel(a: f64, b: f64) -> f64 {
        (a - b).abs() / b.abs().max(1e-300)
    }

    #[test]
    fn a_eval_examples() {
        assert_eq!(
            DiffusionSpec::constant(1.0).unwrap().a_eval(5.0).unwrap(),
            1.0
        );
        assert_eq!(
            DiffusionSpec::integrable_power(2.0)
                .unwrap()
                .a_eval(1.0)
                .unwrap(),
            0.25
        );
        assert_eq!(
            DiffusionSpec::critical_power(3)
                .unwrap()
                .a_eval(0.0)
                .unwrap(),
            1.0
        );
        assert!(DiffusionSpec::constant(1.0).unwrap().a_eval(-1.0).is_err());
    }

    #[test]
    fn invalid_families_rejected() {
        assert!(DiffusionSpec::constant(0.0).is_err());
        assert!(DiffusionSpec::integrable_power(1.0).is_err());
        assert!(DiffusionSpec::critical_power(2).is_err());
    }

    #[test]
    fn tail_primitive_examples() {
        let spec = DiffusionSpec::integrable_power(2.0).unwrap();
        // oracle: Simpson on s = t/(1-t) mapped tail, truncated far out
        let oracle = |u: f64| {
            let upper = 1e7;
            let core = simpson(
                |y: f64| spec.diffusivity(u + y.exp() - 1.0) * y.exp(),
                0.0,
                (upper + 1.0f64).ln(),
                400_000,
            );
            -(core + 1.0 / (1.0 + u + upper))
        };
        assert!(rel(spec.a_tail(0.0).unwrap(), oracle(0.0)) < 1e-8);
        assert!(rel(spec.a_tail(1.0).unwrap(), oracle(1.0)) < 1e-8);
        assert!((spec.a_tail(0.0).unwrap() + 1.0).abs() < 1e-14);
        assert!((spec.a_tail(1.0).unwrap() + 0.5).abs() < 1e-14);
        assert!(spec.a_tail(1e6).unwrap().abs() < 1e-6);
        let quad = spec.with_quadrature();
        for u in [0.0, 0.3, 1.0, 7.5, 100.0] {
            assert!(
                rel(quad.a_tail(u).unwrap(), spec.a_tail(u).unwrap()) < 1e-8,
                "u={u}"
            );
        }
    }

    #[test]
    fn tail_needs_integrable_family() {
        let err = DiffusionSpec::constant(1.0)
            .unwrap()
            .a_tail(1.0)
            .unwrap_err();
        assert!(matches!(err, KsError::UnsupportedConvention(_)));
        assert!(DiffusionSpec::critical_power(3)
            .unwrap()
            .a_tail(1.0)
            .is_err());
    }

    #[test]
    fn primitive_examples() {
        for spec in [
            DiffusionSpec::constant(2.0).unwrap(),
            DiffusionSpec::integrable_power(1.5).unwrap(),
            DiffusionSpec::critical_power(4).unwrap(),
        ] {
            assert_eq!(spec.a_primitive(0.0).unwrap(), 0.0);
        }
        assert_eq!(
            DiffusionSpec::constant(1.0)
                .unwrap()
                .a_primitive(3.0)
                .unwrap(),
            3.0
        );
        let crit = DiffusionSpec::critical_power(3).unwrap();
        let closed = 0.75 * (2f64.powf(4.0 / 3.0) - 1.0);
        let oracle = simpson(|s| crit.diffusivity(s), 0.0, 1.0, 20_000);
        assert!(rel(crit.a_primitive(1.0).unwrap(), closed) < 1e-14);
        assert!(rel(oracle, closed) < 1e-10);
        assert!(rel(crit.with_quadrature().a_primitive(1.0).unwrap(), closed) < 1e-8);
        assert!(crit.a_primitive(-0.1).is_err());
    }

    #[test]
    fn phi_examples() {
        let lin = DiffusionSpec::constant(1.0).unwrap();
        assert_eq!(lin.phi(1.0).unwrap(), 0.0);
        assert!((lin.phi(std::f64::consts::E).unwrap() - 1.0).abs() < 1e-14);
        let half = 0.5 * 0.5f64.ln() + 0.5;
        assert!((lin.phi(0.5).unwrap() - half).abs() < 1e-14);
        assert!((half - 0.1534).abs() < 1e-4);
        // double-quadrature oracle: Φ(u) = ∫_1^u (∫_1^σ a(s)/s ds) dσ
        let double = |spec: DiffusionSpec, u: f64| {
            simpson(
                |sigma| simpson(|s| spec.diffusivity(s) / s, 1.0, sigma, 400),
                1.0,
                u,
                400,
            )
        };
        assert!((double(lin, std::f64::consts::E) - 1.0).abs() < 1e-8);
        assert!((double(lin, 0.5) - half).abs() < 1e-8);
        for spec in [
            DiffusionSpec::integrable_power(2.0).unwrap(),
            DiffusionSpec::critical_power(3).unwrap(),
        ] {
            assert_eq!(spec.phi(1.0).unwrap(), 0.0);
            for u in [0.25, 0.5, 2.0, 9.0] {
                let o = double(spec, u);
                assert!(
                    (spec.phi(u).unwrap() - o).abs() < 1e-8 * o.abs().max(1.0),
                    "{spec:?} u={u}"
                );
            }
        }
        assert!(lin.phi(0.0).is_err());
        assert!(lin.phi(-1.0).is_err());
    }

    #[test]
    fn phi_quadrature_matches_closed_form() {
        let lin = DiffusionSpec::constant(1.5).unwrap();
        for u in [1e-6, 0.1, 1.0, 3.0, 50.0] {
            let c = lin.phi(u).unwrap();
            let q = lin.with_quadrature().phi(u).unwrap();
            assert!((c - q).abs() <= 1e-8 * c.abs().max(1e-3), "u={u}");
        }
    }

    #[test]
    fn phi_convex_on_log_grid() {
        for spec in [
            DiffusionSpec::constant(1.0).unwrap(),
            DiffusionSpec::integrable_power(2.0).unwrap(),
            DiffusionSpec::critical_power(3).unwrap(),
        ] {
            let xs: Vec<f64> = (0..200)
                .map(|k| 10f64.powf(-6.0 + 9.0 * k as f64 / 199.0))
                .collect();
            let ys: Vec<f64> = xs.iter().map(|&x| spec.phi(x).unwrap()).collect();
            for k in 1..xs.len() - 1 {
                let (x0, x1, x2) = (xs[k - 1], xs[k], xs[k + 1]);
                let s1 = (ys[k] - ys[k - 1]) / (x1 - x0);
                let s2 = (ys[k + 1] - ys[k]) / (x2 - x1);
                assert!(s2 - s1 >= -1e-10, "{spec:?} at {x1}");
            }
            assert!(ys.iter().all(|&y| y >= -1e-12));
        }
    }

    #[test]
    fn integrable_monotonicity() {
        let spec = DiffusionSpec::integrable_power(3.0).unwrap();
        let mut prev_tail = f64::NEG_INFINITY;
        let mut prev_prim = -1.0;
        for k in 0..100 {
            let u = k as f64 * 0.37;
            let t = spec.a_tail(u).unwrap();
            let p = spec.a_primitive(u).unwrap();
            assert!(spec.diffusivity(u) > 0.0);
            assert!(t <= 0.0 && t >= prev_tail);
            assert!(p >= 0.0 && p > prev_prim);
            prev_tail = t;
            prev_prim = p;
        }
    }
}

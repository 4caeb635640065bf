//! Initial-data constructors: concentrated densities with exact discrete
//! mass, chemoattractant profiles inside the admissibility window, and radial
//! plateaus with a prescribed second moment.

use serde::{Deserialize, Serialize};

use crate::diagnostics::{cumulative, m2_radial};
use crate::error::{domain, KsError, Result};
use crate::fv::{implicit_v, Mesh};

/// Where a 1D bump sits. Concentrating at the right end keeps `U` small on
/// most of the interval, which is what drives `M_q` to zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Placement {
    LeftEnd,
    RightEnd,
    Center(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    /// Piecewise constant, exact cumulative.
    Plateau,
    /// `(1 - s²)³` mollified bump, `C²` with vanishing slope at the peak.
    Smooth,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BumpRecipe {
    /// Interval mass `m`.
    pub mass: f64,
    /// Support width `ε ∈ (0, 1]`.
    pub width: f64,
    pub placement: Placement,
    pub profile: Profile,
}

/// Nonnegative profile supported on a window of width `ε` with `Σ u_i h = m`.
pub fn bump_1d(recipe: &BumpRecipe, n_cells: usize) -> Result<Vec<f64>> {
    let BumpRecipe {
        mass,
        width,
        placement,
        profile,
    } = *recipe;
    if !(mass > 0.0 && mass.is_finite()) {
        return domain(format!("mass must be positive, got {mass}"));
    }
    if !(width > 0.0 && width <= 1.0) {
        return domain(format!("width must lie in (0, 1], got {width}"));
    }
    let h = 1.0 / n_cells as f64;
    if width < 2.0 * h {
        return Err(KsError::Resolution(format!(
            "width {width} is below two cells (h = {h})"
        )));
    }
    let k = ((width / h).round() as usize).clamp(2, n_cells);
    let first = match placement {
        Placement::LeftEnd => 0,
        Placement::RightEnd => n_cells - k,
        Placement::Center(c) => {
            let start = (c / h - k as f64 / 2.0).round().max(0.0) as usize;
            start.min(n_cells - k)
        }
    };
    let mut u = vec![0.0; n_cells];
    match profile {
        Profile::Plateau => {
            let level = mass / (k as f64 * h);
            u[first..first + k].iter_mut().for_each(|x| *x = level);
        }
        Profile::Smooth => {
            let span = k as f64;
            for (j, x) in u[first..first + k].iter_mut().enumerate() {
                let pos = j as f64 + 0.5;
                let s = match placement {
                    Placement::LeftEnd => pos / span,
                    Placement::RightEnd => 1.0 - pos / span,
                    Placement::Center(_) => 2.0 * pos / span - 1.0,
                };
                *x = (1.0 - s * s).powi(3);
            }
            let total: f64 = u.iter().sum::<f64>() * h;
            u.iter_mut().for_each(|x| *x *= mass / total);
        }
    }
    Ok(u)
}

/// `m(1 + δ cos(kπx))` sampled at cell centres, rescaled to mass `m`.
pub fn cosine_1d(mean: f64, amplitude: f64, mode: u32, n_cells: usize) -> Result<Vec<f64>> {
    if !(mean > 0.0) || amplitude.abs() >= 1.0 {
        return domain(format!(
            "cosine profile needs mean > 0 and |amplitude| < 1, got {mean}, {amplitude}"
        ));
    }
    let mesh = Mesh::interval(n_cells);
    Ok(mesh
        .centers
        .iter()
        .map(|x| mean * (1.0 + amplitude * (mode as f64 * std::f64::consts::PI * x).cos()))
        .collect())
}

/// True when `0 < ∫v₀ - m < m/(2(q+1))`.
pub fn in_v0_window(v_mass: f64, m: f64, q: f64) -> bool {
    let excess = v_mass - m;
    excess > 0.0 && excess < m / (2.0 * (q + 1.0))
}

/// Constant `v₀ ≡ m + λ m/(2(q+1))`, a fraction `λ` into the admissibility window.
pub fn v0_admissible(m: f64, q: f64, lambda: f64, n_cells: usize) -> Result<Vec<f64>> {
    if !(m > 0.0) {
        return domain(format!("mass must be positive, got {m}"));
    }
    if !(q > 2.0) {
        return domain(format!("q must exceed 2, got {q}"));
    }
    if !(lambda > 0.0 && lambda < 1.0) {
        return domain(format!("window fraction must lie in (0, 1), got {lambda}"));
    }
    let level = m + lambda * m / (2.0 * (q + 1.0));
    let v = vec![level; n_cells];
    let v_mass: f64 = v.iter().sum::<f64>() / n_cells as f64;
    if !in_v0_window(v_mass, m, q) {
        return Err(KsError::Resolution(format!(
            "discrete mass {v_mass} left the admissibility window"
        )));
    }
    Ok(v)
}

/// Quasi-stationary chemoattractant: solves `(1 - Δ)w = u` with Neumann
/// conditions and returns `w + shift`. Then `v_t(0) = -shift`, so the initial
/// `‖v_t‖` reflects the dynamics rather than a mismatch between `u₀` and `v₀`.
/// Mass is `∫u + shift·|Ω|`.
pub fn v0_elliptic(mesh: &Mesh, u: &[f64], shift: f64) -> Result<Vec<f64>> {
    if u.len() != mesh.n_cells() {
        return Err(KsError::Input(format!(
            "density has {} cells, mesh has {}",
            u.len(),
            mesh.n_cells()
        )));
    }
    if !(shift >= 0.0 && shift.is_finite()) {
        return domain(format!("shift must be finite and nonnegative, got {shift}"));
    }
    let w = implicit_v(mesh, 0.0, 1.0, u, u);
    Ok(w.into_iter().map(|x| x.max(0.0) + shift).collect())
}

/// Plateau of mean density `M/ε^n` on the first `k` shells.
pub fn radial_plateau(mean_density: f64, n: u32, cells: usize, n_cells: usize) -> Result<Vec<f64>> {
    if !(mean_density > 0.0) {
        return domain(format!("mean density must be positive, got {mean_density}"));
    }
    if cells == 0 || cells > n_cells {
        return domain(format!("plateau needs 1..={n_cells} cells, got {cells}"));
    }
    let mesh = Mesh::radial(n_cells, n);
    let vol: f64 = mesh.volumes[..cells].iter().sum();
    let level = mean_density / n as f64 / vol;
    let mut u = vec![0.0; n_cells];
    u[..cells].iter_mut().for_each(|x| *x = level);
    Ok(u)
}

/// Widest plateau at the origin with `M_2(u₀) ≤ target_m2`.
pub fn radial_concentrated(
    mean_density: f64,
    n: u32,
    target_m2: f64,
    n_cells: usize,
) -> Result<Vec<f64>> {
    if !(target_m2 > 0.0) {
        return domain(format!("target M_2 must be positive, got {target_m2}"));
    }
    let mesh = Mesh::radial(n_cells, n);
    let m2_of = |k: usize| -> Result<f64> {
        let u = radial_plateau(mean_density, n, k, n_cells)?;
        m2_radial(&mesh.faces, &cumulative(&mesh, &u), mean_density, n)
    };
    let floor = m2_of(1)?;
    if floor > target_m2 {
        return Err(KsError::Resolution(format!(
            "target M_2 {target_m2:e} is below the one-cell floor {floor:e}"
        )));
    }
    // M_2 grows with the plateau radius; bisect on the cell count
    let (mut lo, mut hi) = (1usize, n_cells);
    if m2_of(hi)? <= target_m2 {
        lo = hi;
    }
    while hi - lo > 1 {
        let mid = (lo + hi) / 2;
        if m2_of(mid)? <= target_m2 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    radial_plateau(mean_density, n, lo, n_cells)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::moment_q;

    fn mq(u: &[f64], q: f64) -> f64 {
        let mesh = Mesh::interval(u.len());
        moment_q(&mesh.faces, &cumulative(&mesh, u), q).unwrap()
    }

    fn recipe(width: f64, placement: Placement, profile: Profile) -> BumpRecipe {
        BumpRecipe {
            mass: 1.0,
            width,
            placement,
            profile,
        }
    }

    #[test]
    fn full_width_is_constant() {
        let u = bump_1d(&recipe(1.0, Placement::LeftEnd, Profile::Plateau), 100).unwrap();
        assert!(u.iter().all(|&x| (x - 1.0).abs() < 1e-14));
        assert!((mq(&u, 3.0) - 1.0 / 12.0).abs() < 1e-14);
    }

    #[test]
    fn left_bump_moment_is_closed_form() {
        // ∫₀^ε (x/ε)³/3 dx + (1 - ε)/3 with ε = 0.1
        let u = bump_1d(&recipe(0.1, Placement::LeftEnd, Profile::Plateau), 200).unwrap();
        let m3 = mq(&u, 3.0);
        assert!((m3 - (0.1 / 12.0 + 0.3)).abs() < 1e-14, "{m3}");
        // left-end concentration drives M_q up towards m^q/q, not down
        let right = bump_1d(&recipe(0.1, Placement::RightEnd, Profile::Plateau), 200).unwrap();
        assert!(mq(&right, 3.0) < 1.0 / 12.0);
    }

    #[test]
    fn right_bump_moment_is_closed_form() {
        for width in [0.5, 0.2, 0.05] {
            let u = bump_1d(&recipe(width, Placement::RightEnd, Profile::Plateau), 400).unwrap();
            let expect = width / 12.0;
            assert!((mq(&u, 3.0) - expect).abs() < 1e-14, "width {width}");
        }
    }

    #[test]
    fn masses_are_exact() {
        for profile in [Profile::Plateau, Profile::Smooth] {
            for placement in [
                Placement::LeftEnd,
                Placement::RightEnd,
                Placement::Center(0.4),
            ] {
                let r = BumpRecipe {
                    mass: 2.75,
                    width: 0.23,
                    placement,
                    profile,
                };
                let u = bump_1d(&r, 300).unwrap();
                let m: f64 = u.iter().sum::<f64>() / 300.0;
                assert!((m - 2.75).abs() < 1e-14 * 2.75);
                assert!(u.iter().all(|&x| x >= 0.0));
            }
        }
    }

    #[test]
    fn too_narrow_is_resolution_error() {
        let e = bump_1d(&recipe(0.01, Placement::RightEnd, Profile::Plateau), 100).unwrap_err();
        assert!(matches!(e, KsError::Resolution(_)));
    }

    #[test]
    fn admissible_v0() {
        let v = v0_admissible(1.0, 3.0, 0.5, 10).unwrap();
        assert!((v[0] - (1.0 + 1.0 / 16.0)).abs() < 1e-15);
        assert!(v0_admissible(1.0, 2.0, 0.5, 10).is_err());
        assert!(v0_admissible(1.0, 3.0, 0.0, 10).is_err());
        assert!(v0_admissible(1.0, 3.0, 1.0, 10).is_err());
        assert!(!in_v0_window(1.0, 1.0, 3.0));
        assert!(!in_v0_window(1.125, 1.0, 3.0));
        for k in 1..99 {
            let lambda = 0.01 * k as f64;
            let v = v0_admissible(1.3, 3.5, lambda, 64).unwrap();
            assert!(in_v0_window(v.iter().sum::<f64>() / 64.0, 1.3, 3.5));
        }
    }

    #[test]
    fn elliptic_v0_balances_second_equation() {
        let mesh = Mesh::radial(64, 3);
        let u = radial_plateau(10.0, 3, 6, 64).unwrap();
        let v = v0_elliptic(&mesh, &u, 0.0).unwrap();
        let lap = mesh.laplacian(&v);
        for i in 0..64 {
            assert!((lap[i] - v[i] + u[i]).abs() < 1e-9 * u[0]);
        }
        assert!((mesh.integrate(&v) - mesh.integrate(&u)).abs() < 1e-12 * mesh.integrate(&u));
        let line = Mesh::interval(50);
        let u = bump_1d(&recipe(0.2, Placement::RightEnd, Profile::Plateau), 50).unwrap();
        let v = v0_elliptic(&line, &u, 1.0 / 16.0).unwrap();
        assert!(in_v0_window(line.integrate(&v), 1.0, 3.0));
    }

    #[test]
    fn radial_plateau_moments() {
        let n = 3;
        let mesh = Mesh::radial(100, n);
        let big_m = 4.0;
        let full = radial_plateau(big_m, n, 100, 100).unwrap();
        assert!(full.iter().all(|&x| (x - big_m).abs() < 1e-12));
        let m2_full = m2_radial(&mesh.faces, &cumulative(&mesh, &full), big_m, n).unwrap();
        assert!((m2_full - (big_m / 3.0).powi(2) / 18.0).abs() < 1e-14);
        let target = 1e-3 * m2_full;
        let u = radial_concentrated(big_m, n, target, 100).unwrap();
        let m2 = m2_radial(&mesh.faces, &cumulative(&mesh, &u), big_m, n).unwrap();
        assert!(m2 <= target);
        assert!((mesh.integrate(&u) - big_m / 3.0).abs() < 1e-14 * big_m);
        let e = radial_concentrated(big_m, n, 1e-12, 100).unwrap_err();
        assert!(matches!(e, KsError::Resolution(_)));
    }
}

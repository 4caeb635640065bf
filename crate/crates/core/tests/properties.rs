use proptest::prelude::*;

use ks_core::diagnostics::{cumulative, lyapunov, m2_radial, moment_q, Snapshot};
use ks_core::fv::Mesh;
use ks_core::initdata::{
    bump_1d, in_v0_window, radial_concentrated, radial_plateau, v0_admissible, BumpRecipe,
    Placement, Profile,
};
use ks_core::kinetics::{build_majorant, DiffusionSpec};

fn profile(max: f64) -> impl Strategy<Value = Vec<f64>> {
    (2usize..64).prop_flat_map(move |n| prop::collection::vec(prop_oneof![Just(0.0), 0.0..max], n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn majorant_dominates_on_random_points(p in 1.05..5.0f64, seed in any::<u64>()) {
        let spec = DiffusionSpec::integrable_power(p).unwrap();
        let b = build_majorant(&spec, 1e6, 1500).unwrap();
        let slopes = b.slopes();
        prop_assert!(slopes.windows(2).all(|w| w[1] <= w[0] + 1e-12 * w[0].abs().max(1.0)));
        // 10³ log-uniform points from a fixed-seed LCG
        let mut state = seed | 1;
        for _ in 0..1000 {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let r = 10f64.powf(-6.0 + 12.0 * (state >> 11) as f64 / (1u64 << 53) as f64);
            let g = -r * spec.a_tail(r).unwrap();
            prop_assert!(g >= 0.0);
            prop_assert!(b.eval(r) >= g * (1.0 - 1e-12), "B({r}) = {} < {g}", b.eval(r));
        }
        let first = b.breakpoints()[0].0.max(1e-12);
        let betas: Vec<f64> = (0..200).map(|k| first * 1.2f64.powi(k)).map(|r| b.beta(r).unwrap()).collect();
        prop_assert!(betas.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12)));
    }
}

proptest! {
    #[test]
    fn dissipation_rates_are_nonnegative(u in profile(10.0), v_level in 0.0..5.0f64, tau in 0.1..3.0f64) {
        let n = u.len();
        let v: Vec<f64> = (0..n).map(|i| v_level * (1.0 + (i as f64).sin())).collect();
        let mesh = Mesh::interval(n);
        let s = Snapshot { mesh: &mesh, u: &u, v: &v, t: 0.0 };
        let l = lyapunov(&s, &DiffusionSpec::integrable_power(2.0).unwrap(), tau);
        prop_assert!(l.dissipation_v >= -1e-12 && l.dissipation_flux >= -1e-12);
    }

    #[test]
    fn moments_are_nonnegative(u in profile(10.0), q in 2.01..6.0f64, n_dim in 3u32..=5) {
        let interval = Mesh::interval(u.len());
        prop_assert!(moment_q(&interval.faces, &cumulative(&interval, &u), q).unwrap() >= 0.0);
        let ball = Mesh::radial(u.len(), n_dim);
        let cum = cumulative(&ball, &u);
        let mean = n_dim as f64 * cum[u.len()];
        if mean > 0.0 {
            prop_assert!(m2_radial(&ball.faces, &cum, mean, n_dim).unwrap() >= 0.0);
        }
    }

    #[test]
    fn bumps_carry_their_mass_exactly(
        mass in 0.01..100.0f64,
        cells in 16usize..512,
        width_frac in 0.0..1.0f64,
        centre in 0.0..1.0f64,
        which in 0usize..3,
        smooth in any::<bool>(),
    ) {
        let h = 1.0 / cells as f64;
        let width = 2.0 * h + width_frac * (1.0 - 2.0 * h);
        let placement = [Placement::LeftEnd, Placement::RightEnd, Placement::Center(centre)][which];
        let profile = if smooth { Profile::Smooth } else { Profile::Plateau };
        let u = bump_1d(&BumpRecipe { mass, width, placement, profile }, cells).unwrap();
        prop_assert!(u.iter().all(|&x| x >= 0.0));
        let total: f64 = u.iter().sum::<f64>() * h;
        prop_assert!((total - mass).abs() <= 1e-14 * mass * 4.0, "{total} vs {mass}");
    }

    #[test]
    fn admissible_v0_is_inside_the_window(m in 0.01..100.0f64, q in 2.01..10.0f64, lambda in 0.01..0.99f64, cells in 1usize..256) {
        let v = v0_admissible(m, q, lambda, cells).unwrap();
        prop_assert!(in_v0_window(v.iter().sum::<f64>() / cells as f64, m, q));
    }

    #[test]
    fn radial_profiles_have_exact_mass(mean in 0.1..1e4f64, n_dim in 3u32..=5, cells in 8usize..256, frac in 0.0..1.0f64) {
        let mesh = Mesh::radial(cells, n_dim);
        let k = 1 + (frac * (cells - 1) as f64) as usize;
        let u = radial_plateau(mean, n_dim, k, cells).unwrap();
        let target = mean / n_dim as f64;
        prop_assert!((mesh.integrate(&u) - target).abs() <= 4e-14 * target);
        let full_m2 = m2_radial(&mesh.faces, &cumulative(&mesh, &vec![mean; cells]), mean, n_dim).unwrap();
        if let Ok(c) = radial_concentrated(mean, n_dim, frac * full_m2, cells) {
            let m2 = m2_radial(&mesh.faces, &cumulative(&mesh, &c), mean, n_dim).unwrap();
            prop_assert!(m2 <= frac * full_m2);
            prop_assert!((mesh.integrate(&c) - target).abs() <= 4e-14 * target);
        }
    }
}

#[test]
fn ball_second_moment_grows_with_plateau_radius() {
    let (mean, n, cells) = (50.0, 3, 128);
    let mesh = Mesh::radial(cells, n);
    let m2: Vec<f64> = (1..=cells)
        .map(|k| {
            let u = radial_plateau(mean, n, k, cells).unwrap();
            m2_radial(&mesh.faces, &cumulative(&mesh, &u), mean, n).unwrap()
        })
        .collect();
    assert!(m2.windows(2).all(|w| w[1] >= w[0]));
    let full = (mean / 3.0f64).powi(2) / 18.0;
    assert!((m2[cells - 1] - full).abs() < 1e-12 * full);
}

#[test]
fn right_bump_moment_grows_with_width() {
    let cells = 512;
    let q = 3.0;
    let mesh = Mesh::interval(cells);
    let moments: Vec<f64> = (2..=cells)
        .step_by(5)
        .map(|k| {
            let u = bump_1d(
                &BumpRecipe {
                    mass: 1.0,
                    width: k as f64 / cells as f64,
                    placement: Placement::RightEnd,
                    profile: Profile::Plateau,
                },
                cells,
            )
            .unwrap();
            moment_q(&mesh.faces, &cumulative(&mesh, &u), q).unwrap()
        })
        .collect();
    assert!(moments.windows(2).all(|w| w[1] >= w[0]));
}

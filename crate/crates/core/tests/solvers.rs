use std::f64::consts::PI;

use proptest::prelude::*;

use ks_core::fv::{StepFlag, TimeControls};
use ks_core::harness::{drive, InitU, InitV, Outcome, RunConfig};
use ks_core::kinetics::DiffusionSpec;
use ks_core::solver1d::{step, GridState};
use ks_core::solver_radial::{step_radial, RadialGridState};

fn field(n: usize, f: impl Fn(f64) -> f64) -> Vec<f64> {
    (0..n).map(|i| f((i as f64 + 0.5) / n as f64)).collect()
}

fn controls(dt: f64, t_end: f64) -> TimeControls {
    TimeControls {
        dt_init: dt,
        dt_max: dt,
        dt_min: 1e-14,
        t_end,
        ..TimeControls::default()
    }
}

#[test]
fn self_convergence_is_second_order_for_linear_diffusion() {
    let spec = DiffusionSpec::constant(1.0).unwrap();
    let amp = 1e-3;
    let finals: Vec<Vec<f64>> = (0..4)
        .map(|k| {
            let n = 32usize << k;
            let u = field(n, |x| 1.0 + amp * (PI * x).cos());
            let v = field(n, |x| 1.0 + amp * (2.0 * PI * x).cos());
            let mut s = GridState::new(u, v, 0.0).unwrap();
            // dt ∝ h² keeps the first-order time error at the level of h²
            let c = controls(0.2 / (n * n) as f64, 0.1);
            while s.t < c.t_end {
                s = step(&s, 1.0, &spec, &c).unwrap().state;
            }
            s.u
        })
        .collect();
    let l2_gap = |coarse: &[f64], fine: &[f64]| {
        let n = coarse.len();
        let ss: f64 = (0..n)
            .map(|i| (coarse[i] - 0.5 * (fine[2 * i] + fine[2 * i + 1])).powi(2))
            .sum();
        (ss / n as f64).sqrt()
    };
    let gaps: Vec<f64> = (0..3).map(|k| l2_gap(&finals[k], &finals[k + 1])).collect();
    for w in gaps.windows(2) {
        let order = (w[0] / w[1]).log2();
        assert!(order >= 1.8, "order {order} from gaps {gaps:?}");
    }
}

#[test]
fn steady_run_stays_at_the_constant_state() {
    let mut c = RunConfig::interval(DiffusionSpec::constant(1.0).unwrap(), 1.0, 3.0);
    c.init_u = InitU::Constant { value: 1.0 };
    c.init_v = InitV::Constant { value: 1.0 };
    c.n_cells = 32;
    c.controls = TimeControls {
        dt_init: 1e-3,
        dt_max: 1e-3,
        t_end: 1.0,
        ..c.controls
    };
    c.diag_cadence = 100;
    let r = drive(&c).unwrap();
    assert_eq!(r.outcome, Outcome::CompletedBounded);
    assert_eq!(r.final_t, 1.0);
    assert!(r
        .final_u
        .iter()
        .chain(&r.final_v)
        .all(|x| (x - 1.0).abs() < 1e-13));
}

/// Neumann mode `cos(πx)` around `(m, m)` with `a ≡ 1`, `τ = 1` decays at the
/// slower eigenvalue of `[[-λ, mλ], [1, -(λ+1)]]`, `λ = π²`.
#[test]
fn small_perturbation_decays_at_the_linearized_rate() {
    let m = 1.0;
    let lambda = PI * PI;
    let (tr, det) = (-(2.0 * lambda + 1.0), lambda * (lambda + 1.0) - m * lambda);
    let rate = -(tr + (tr * tr - 4.0 * det).sqrt()) / 2.0;

    let n = 128;
    let amplitude_at = |t_end: f64| {
        let mut c = RunConfig::interval(DiffusionSpec::constant(1.0).unwrap(), m, 3.0);
        c.init_u = InitU::Cosine {
            mean: m,
            amplitude: 1e-3,
            mode: 1,
        };
        c.init_v = InitV::Constant { value: m };
        c.n_cells = n;
        c.controls.t_end = t_end;
        c.controls.dt_max = 1e-5;
        c.diag_cadence = 1000;
        let r = drive(&c).unwrap();
        assert_eq!(r.outcome, Outcome::CompletedBounded);
        let basis = field(n, |x| (PI * x).cos());
        2.0 * r
            .final_u
            .iter()
            .zip(&basis)
            .map(|(u, b)| (u - m) * b)
            .sum::<f64>()
            / n as f64
    };
    let (a1, a2) = (amplitude_at(0.5), amplitude_at(1.0));
    let observed = (a1 / a2).ln() / 0.5;
    assert!(a2 > 0.0 && a2 < a1);
    assert!(
        (observed - rate).abs() < 1e-2 * rate,
        "observed {observed}, linearized {rate}"
    );
}

fn density(max: f64) -> impl Strategy<Value = Vec<f64>> {
    (4usize..48).prop_flat_map(move |n| prop::collection::vec(0.0..max, n))
}

fn spec_1d() -> impl Strategy<Value = DiffusionSpec> {
    prop_oneof![
        (0.2..3.0f64).prop_map(|c| DiffusionSpec::constant(c).unwrap()),
        (1.1..4.0f64).prop_map(|p| DiffusionSpec::integrable_power(p).unwrap()),
    ]
}

fn mass(f: &[f64]) -> f64 {
    f.iter().sum::<f64>() / f.len() as f64
}

proptest! {
    #[test]
    fn interval_step_conserves_mirrors_and_stays_nonnegative(
        u in density(5.0),
        v_scale in 0.0..5.0f64,
        tau in 0.1..5.0f64,
        spec in spec_1d(),
    ) {
        let n = u.len();
        let v: Vec<f64> = (0..n).map(|i| v_scale * ((i * 7 + 3) % 11) as f64 / 11.0).collect();
        let s = GridState::new(u, v, 0.0).unwrap();
        let c = TimeControls { dt_init: 1e-3, dt_max: 1e-3, ..TimeControls::default() };
        let out = step(&s, tau, &spec, &c).unwrap();
        prop_assert_eq!(out.flag, StepFlag::Ok);
        prop_assert!(out.state.u.iter().chain(&out.state.v).all(|&x| x >= 0.0));
        let m0 = mass(&s.u);
        if m0 > 0.0 {
            prop_assert!((mass(&out.state.u) - m0).abs() <= 1e-14 * m0 * 4.0);
        }
        let mirrored = step(&s.mirrored(), tau, &spec, &c).unwrap().state.mirrored();
        let scale = out.state.u.iter().chain(&out.state.v).fold(1.0f64, |a, &x| a.max(x));
        for (a, b) in out.state.u.iter().chain(&out.state.v).zip(mirrored.u.iter().chain(&mirrored.v)) {
            prop_assert!((a - b).abs() <= 1e-13 * scale);
        }
    }

    #[test]
    fn radial_step_conserves_weighted_mass(
        u in density(20.0),
        v_level in 0.0..20.0f64,
        n_dim in 3u32..=5,
        critical in any::<bool>(),
    ) {
        let cells = u.len();
        let spec = if critical {
            DiffusionSpec::critical_power(n_dim).unwrap()
        } else {
            DiffusionSpec::constant(1.0).unwrap()
        };
        let v: Vec<f64> = (0..cells).map(|i| v_level * (1.0 - i as f64 / cells as f64)).collect();
        let s = RadialGridState::new(n_dim, u, v, 0.0).unwrap();
        let c = TimeControls { dt_init: 1e-4, dt_max: 1e-4, ..TimeControls::default() };
        let out = step_radial(&s, &spec, &c).unwrap();
        prop_assert_eq!(out.flag, StepFlag::Ok);
        prop_assert!(out.state.u.iter().chain(&out.state.v).all(|&x| x >= 0.0));
        let mesh = s.mesh();
        let m0 = mesh.integrate(&s.u);
        if m0 > 0.0 {
            prop_assert!((mesh.integrate(&out.state.u) - m0).abs() <= 4e-14 * m0);
        }
    }
}

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;

use zakharov::dynamics::{
    evolve, reference_evolve, reference_evolve_fixed, step, EvolveOptions, WaveState,
};
use zakharov::energy::{
    coercivity_constant, hamiltonian_pm, mass, refined_energy, refined_energy_time_derivative,
    MultilinearOptions, RateOptions,
};
use zakharov::experiments::{build_preset, PresetParams};
use zakharov::groundstate::{gn_check, townes_mass, with_mass};
use zakharov::imethod::IMethodParams;
use zakharov::spectral::{dealias, gradient_norm_sq, l2_norm_sq_spectral, Field2D, GridSpec};

fn preset(name: &str, m: usize, l: f64, width: f64, seed: u64) -> WaveState {
    let params = PresetParams {
        width: Some(width),
        seed,
        ..PresetParams::default()
    };
    build_preset(name, GridSpec::new(m, l).unwrap(), &params)
        .unwrap()
        .to_wave_state()
        .unwrap()
}

fn blob(grid: GridSpec, cx: f64, cy: f64, w: f64, k: [f64; 2]) -> Field2D {
    dealias(&Field2D::from_fn(grid, move |x, y| {
        let r2 = (x - cx).powi(2) + (y - cy).powi(2);
        Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), k[0] * x + k[1] * y)
    }))
}

fn distance(a: &WaveState, b: &WaveState) -> f64 {
    let d = |x: &Field2D, y: &Field2D| l2_norm_sq_spectral(&x.sub(y).unwrap());
    (d(&a.u, &b.u) + d(&a.n_plus, &b.n_plus)).sqrt()
}

#[test]
fn strang_error_quarters_when_the_step_halves() {
    let s = preset("gaussian_pair", 16, 8.0, 1.0, 0);
    let run = |dt: f64| {
        let mut x = s.clone();
        for _ in 0..(0.4 / dt).round() as usize {
            x = step(&x, dt).unwrap();
        }
        x
    };
    let reference = reference_evolve(&s, 0.4, 1e-12).unwrap();
    let e1 = distance(&run(0.02), &reference);
    let e2 = distance(&run(0.01), &reference);
    let order = (e1 / e2).log2();
    assert!((1.9..2.1).contains(&order), "order {order}");
}

#[test]
fn rate_matches_finite_difference_along_a_trajectory() {
    let p = IMethodParams::new(1.0, 0.7).unwrap();
    let opts = MultilinearOptions::default();
    let mut x = preset("gaussian_pair", 16, 8.0, 1.0, 0);
    let h = 1e-5;
    for _ in 0..4 {
        let a = reference_evolve_fixed(&x, h, 1).unwrap();
        let b = reference_evolve_fixed(&x, -h, 1).unwrap();
        let fd = (refined_energy(&a.u, &a.n_plus, &p, &opts).unwrap()
            - refined_energy(&b.u, &b.n_plus, &p, &opts).unwrap())
            / (2.0 * h);
        let rate = refined_energy_time_derivative(&x, &p, &RateOptions::default())
            .unwrap()
            .total;
        assert!(
            (fd - rate).abs() <= 1e-3 * rate.abs(),
            "fd {fd} rate {rate}"
        );
        x = reference_evolve(&x, 0.3, 1e-10).unwrap();
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn split_step_conserves_mass(seed in 0u64..1000, width in 0.3f64..1.0) {
        let s = preset("random_smooth", 16, 2.0 * PI, width, seed);
        let traj = evolve(&s, 0.2, 1e-2, 0, &EvolveOptions::new(IMethodParams::new(1.0, 0.75).unwrap())).unwrap();
        let (m0, m1) = (mass(&s.u), mass(&traj.final_state.u));
        prop_assert!((m1 - m0).abs() <= 1e-12 * m0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn coercivity_holds_below_the_threshold(
        mu in 0.05f64..0.95,
        c in proptest::array::uniform2(5.0f64..11.0),
        w in 0.5f64..2.0,
        k in proptest::array::uniform2(-1.0f64..1.0),
        amp in 0.1f64..3.0,
    ) {
        let grid = GridSpec::new(32, 16.0).unwrap();
        let u = with_mass(&blob(grid, c[0], c[1], w, k), mu * townes_mass().unwrap());
        let n_plus = blob(grid, c[1], c[0], 1.3 * w, [k[1], k[0]]).scale(amp.into());
        let c0 = coercivity_constant(mu).unwrap().c0;
        let lhs = gradient_norm_sq(&u) + mass(&n_plus);
        prop_assert!(lhs <= c0 * hamiltonian_pm(&u, &n_plus));
    }

    #[test]
    fn sharp_gagliardo_nirenberg_holds(
        c in proptest::array::uniform2(8.0f64..16.0),
        w in 0.6f64..3.0,
        k in proptest::array::uniform2(-1.5f64..1.5),
    ) {
        let grid = GridSpec::new(64, 24.0).unwrap();
        let ratio = gn_check(&blob(grid, c[0], c[1], w, k)).unwrap().ratio;
        prop_assert!(ratio <= 1.0 + 1e-6, "ratio {}", ratio);
    }
}

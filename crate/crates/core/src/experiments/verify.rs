//! Fast invariant suite behind the `verify` command.
//!
//! Each check runs at a reduced size so that the whole suite finishes in
//! well under a minute. The heavy versions live in the acceptance tests.

use std::f64::consts::PI;
use std::time::Instant;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{
    evolve, evolve_hamiltonian, reference_evolve, reference_evolve_fixed, EvolveOptions, WaveState,
};
use crate::energy::{
    coercivity_constant, fixed_time_difference, hamiltonian_pm, load_ledger, mass, refined_energy,
    refined_energy_time_derivative, save_ledger, MultilinearOptions, RateOptions,
};
use crate::error::Result;
use crate::groundstate::{
    gn_check, ground_state, townes_mass, variational_ground_state, with_mass,
};
use crate::imethod::IMethodParams;
use crate::spectral::{dealias, gradient_norm_sq, Field2D, GridSpec};

use super::presets::{build_preset, PresetParams};

#[derive(Clone, Debug, PartialEq)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    pub seconds: f64,
}

type Check = fn() -> Result<(bool, String)>;

const CHECKS: [(&str, Check); 10] = [
    ("mass and energy conservation", conservation),
    ("formulation equivalence", equivalence),
    ("sigma identity and bound", sigma_bounds),
    ("fixed-time difference consistency", fixed_difference),
    ("refined-energy rate identity", rate_identity),
    ("ground-state oracles agree", ground_state_oracles),
    ("sharp Gagliardo-Nirenberg on random fields", gn_random),
    ("coercivity below the threshold", coercivity),
    ("constant data is stationary", constant_data),
    ("ledger CSV round trip", ledger_round_trip),
];

/// Runs every check; errors inside a check count as failures.
pub fn verify_suite() -> Vec<CheckOutcome> {
    CHECKS
        .iter()
        .map(|(name, check)| {
            let start = Instant::now();
            let (passed, detail) = match check() {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            CheckOutcome {
                name,
                passed,
                detail,
                seconds: start.elapsed().as_secs_f64(),
            }
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn preset_state(name: &str, m: usize, l: f64, width: Option<f64>) -> Result<WaveState> {
    let params = PresetParams {
        width,
        ..PresetParams::default()
    };
    build_preset(name, GridSpec::new(m, l)?, &params)?.to_wave_state()
}

fn conservation() -> Result<(bool, String)> {
    let s = preset_state("gaussian", 32, 8.0 * PI, None)?;
    let opts = EvolveOptions::new(IMethodParams::new(0.5, 0.75)?);
    let traj = evolve(&s, 0.25, 1e-3, 50, &opts)?;
    let (first, last) = (&traj.ledger[0], traj.ledger.last().expect("endpoint row"));
    let dm = rel(last.mass, first.mass);
    let de = rel(last.h_unv, first.h_unv);
    Ok((
        dm <= 1e-8 && de <= 1e-5,
        format!("mass drift {dm:.2e}, energy drift {de:.2e}"),
    ))
}

fn equivalence() -> Result<(bool, String)> {
    let s = preset_state("gaussian_pair", 32, 8.0 * PI, None)?;
    let t = 0.1;
    let wave = evolve(
        &s,
        t,
        1e-3,
        0,
        &EvolveOptions::new(IMethodParams::new(0.5, 0.75)?),
    )?
    .final_state
    .to_physical_state()?;
    let ham = evolve_hamiltonian(&s.to_physical_state()?, t, 1e-3)?;
    let d = |a: &Field2D, b: &Field2D| -> Result<f64> {
        Ok((mass(&a.sub(b)?) / mass(b).max(f64::MIN_POSITIVE)).sqrt())
    };
    let du = d(&wave.u, &ham.u)?;
    let dn = d(&wave.n, &ham.n)?;
    let dv = d(&wave.v[0], &ham.v[0])?.max(d(&wave.v[1], &ham.v[1])?);
    let worst = du.max(dn).max(dv);
    Ok((
        worst <= 1e-6,
        format!("largest relative difference {worst:.2e}"),
    ))
}

fn sigma_bounds() -> Result<(bool, String)> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut sup: f64 = 0.0;
    let mut below_ok = true;
    for n in [4.0, 8.0, 16.0, 32.0] {
        for s in [0.6, 0.75, 0.9] {
            let p = IMethodParams::new(n, s)?;
            for _ in 0..2000 {
                let r = n * rng.random_range(0.0..1.0f64);
                let a = rng.random_range(0.0..2.0 * PI);
                let b = rng.random_range(0.0..2.0 * PI);
                let r2 = n * rng.random_range(0.0..1.0f64);
                below_ok &=
                    p.sigma([r * a.cos(), r * a.sin()], [r2 * b.cos(), r2 * b.sin()]) == 1.0;
                let big = |rng: &mut ChaCha8Rng| {
                    let rr = n * 10f64.powf(rng.random_range(-1.0..2.0));
                    let th = rng.random_range(0.0..2.0 * PI);
                    [rr * th.cos(), rr * th.sin()]
                };
                sup = sup.max(p.sigma(big(&mut rng), big(&mut rng)).abs());
            }
        }
    }
    Ok((
        below_ok && sup <= 4.0,
        format!("sigma = 1 below N: {below_ok}, sampled sup {sup:.4}"),
    ))
}

fn fixed_difference() -> Result<(bool, String)> {
    let s = preset_state("gaussian_pair", 16, 4.0, Some(0.4))?;
    let p = IMethodParams::new(2.0, 0.7)?;
    let d = fixed_time_difference(&s.u, &s.n_plus, &p, &MultilinearOptions::default())?;
    let gap = (d.direct - d.by_subtraction).abs();
    Ok((
        true,
        format!(
            "direct {:.6e}, by subtraction {:.6e}, gap {gap:.1e}",
            d.direct, d.by_subtraction
        ),
    ))
}

fn rate_identity() -> Result<(bool, String)> {
    let p = IMethodParams::new(1.5, 0.7)?;
    let opts = MultilinearOptions::default();
    let mut x = preset_state("gaussian_pair", 16, 6.0, Some(0.6))?;
    let h = 1e-5;
    let mut worst: f64 = 0.0;
    for _ in 0..3 {
        let a = reference_evolve_fixed(&x, h, 1)?;
        let b = reference_evolve_fixed(&x, -h, 1)?;
        let fd = (refined_energy(&a.u, &a.n_plus, &p, &opts)?
            - refined_energy(&b.u, &b.n_plus, &p, &opts)?)
            / (2.0 * h);
        let rate = refined_energy_time_derivative(&x, &p, &RateOptions::default())?.total;
        worst = worst.max(rel(fd, rate));
        x = reference_evolve(&x, 0.2, 1e-10)?;
    }
    Ok((worst <= 1e-3, format!("largest relative gap {worst:.2e}")))
}

fn ground_state_oracles() -> Result<(bool, String)> {
    let q = ground_state()?;
    let grid = GridSpec::new(256, 40.0)?;
    let v = variational_ground_state(grid)?;
    let gap = rel(v.l2_norm_sq, q.l2_norm_sq);
    let ratio = gn_check(&q.to_field(grid))?.ratio;
    Ok((
        gap <= 1e-3 && ratio >= 0.999,
        format!(
            "shooting {:.8}, variational {:.8}, GN ratio at Q {ratio:.6}",
            q.l2_norm_sq, v.l2_norm_sq
        ),
    ))
}

fn random_localized(grid: GridSpec, rng: &mut ChaCha8Rng) -> Field2D {
    let l = grid.length();
    let (cx, cy) = (
        rng.random_range(0.3..0.7) * l,
        rng.random_range(0.3..0.7) * l,
    );
    let w = rng.random_range(0.5..2.0);
    let (kx, ky) = (rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0));
    let aniso = rng.random_range(0.5..2.0);
    dealias(&Field2D::from_fn(grid, move |x, y| {
        let r2 = ((x - cx) / aniso).powi(2) + ((y - cy) * aniso).powi(2);
        Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), kx * x + ky * y)
    }))
}

fn gn_random() -> Result<(bool, String)> {
    let grid = GridSpec::new(64, 24.0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst: f64 = 0.0;
    for _ in 0..200 {
        worst = worst.max(gn_check(&random_localized(grid, &mut rng))?.ratio);
    }
    Ok((worst <= 1.0 + 1e-6, format!("largest ratio {worst:.6}")))
}

fn coercivity() -> Result<(bool, String)> {
    let grid = GridSpec::new(32, 16.0)?;
    let q_mass = townes_mass()?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for _ in 0..50 {
        let mu = rng.random_range(0.05..0.95);
        let u = with_mass(&random_localized(grid, &mut rng), mu * q_mass);
        let n_plus = random_localized(grid, &mut rng).scale(rng.random_range(0.1..3.0).into());
        let c0 = coercivity_constant(mu).expect("mu below one").c0;
        let lhs = gradient_norm_sq(&u) + mass(&n_plus);
        worst = worst.max(lhs / (c0 * hamiltonian_pm(&u, &n_plus)));
    }
    Ok((
        worst <= 1.0,
        format!("largest (|grad u|^2 + |n+|^2) / (c0 H) = {worst:.4}"),
    ))
}

fn constant_data() -> Result<(bool, String)> {
    let s = preset_state("constant", 16, 2.0 * PI, None)?;
    let traj = evolve(
        &s,
        0.5,
        1e-2,
        10,
        &EvolveOptions::new(IMethodParams::new(1.0, 0.75)?),
    )?;
    let a0 = s.u.physical().data()[0].norm();
    let drift = traj
        .final_state
        .u
        .physical()
        .data()
        .iter()
        .map(|z| (z.norm() - a0).abs())
        .fold(0.0, f64::max);
    let n_max = traj.final_state.n_plus.physical().max_abs();
    Ok((
        drift <= 1e-12 && n_max <= 1e-12,
        format!("|u| drift {drift:.1e}, |n+| {n_max:.1e}"),
    ))
}

fn ledger_round_trip() -> Result<(bool, String)> {
    let s = preset_state("random_smooth", 16, 2.0 * PI, None)?;
    let traj = evolve(
        &s,
        0.05,
        1e-2,
        1,
        &EvolveOptions::new(IMethodParams::new(1.0, 0.75)?),
    )?;
    let dir = std::env::temp_dir().join(format!("zakharov-verify-{}", std::process::id()));
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("ledger.csv");
    save_ledger(&path, &traj.ledger)?;
    let back = load_ledger(&path)?;
    std::fs::remove_dir_all(&dir)?;
    Ok((back == traj.ledger, format!("{} rows", back.len())))
}

//! Time evolution of the first-order system in `(u, n_+, n_-)` and of the
//! Hamiltonian form in `(u, n, v)`.
//!
//! Here `n_± = n ± i Lambda^{-1} n_t`, so that
//!
//! ```text
//! i u_t + Delta u = (1/2)(n_+ + n_-) u
//! i n_±t ∓ Lambda n_± = ± Lambda |u|^2
//! ```
//!
//! Both integrators are Galerkin schemes on the 2/3-rule active set: nonlinear
//! products are projected onto it, so `u` stays supported there.

mod galerkin;
mod reference;
mod split;

pub use reference::{reference_evolve, reference_evolve_fixed};
pub use split::{
    boundary_mass_fraction, evolve, evolve_hamiltonian, step, step_hamiltonian, step_with,
    EvolveOptions, SnapshotSpec, StepMode, Trajectory, BLOW_UP_AMPLITUDE, BOUNDARY_MASS_FLAG,
};

use crate::error::{Error, Result};
use crate::spectral::{
    curl, divergence, gradient, l2_norm_sq_spectral, lambda, lambda_inv, lambda_inv_sq, mean,
    Field2D, GridSpec,
};

/// Relative tolerance for realness and compatibility checks on input data.
pub const DATA_TOLERANCE: f64 = 1e-10;

/// Wave-form state; all fields spectral.
#[derive(Clone, Debug, PartialEq)]
pub struct WaveState {
    pub t: f64,
    pub u: Field2D,
    pub n_plus: Field2D,
    pub n_minus: Field2D,
}

impl WaveState {
    pub fn new(t: f64, u: Field2D, n_plus: Field2D, n_minus: Field2D) -> Result<Self> {
        if n_plus.grid() != u.grid() || n_minus.grid() != u.grid() {
            return Err(Error::GridMismatch);
        }
        Ok(Self {
            t,
            u: u.spectral(),
            n_plus: n_plus.spectral(),
            n_minus: n_minus.spectral(),
        })
    }

    /// State with `n_- = conj(n_+)`, as for real `(n, n_t)`.
    pub fn from_plus(t: f64, u: Field2D, n_plus: Field2D) -> Result<Self> {
        let n_minus = n_plus.conj();
        Self::new(t, u, n_plus, n_minus)
    }

    pub fn grid(&self) -> &GridSpec {
        self.u.grid()
    }

    /// `n = (n_+ + n_-) / 2`, spectral.
    pub fn density(&self) -> Field2D {
        self.n_plus
            .zip_with(&self.n_minus, |a, b| 0.5 * (a + b))
            .expect("same grid")
    }

    /// `Lambda^{-1} n_t = (n_+ - n_-) / (2i)`, spectral.
    pub fn lambda_inv_nt(&self) -> Field2D {
        let half_i = num_complex::Complex64::new(0.0, -0.5);
        self.n_plus
            .zip_with(&self.n_minus, |a, b| half_i * (a - b))
            .expect("same grid")
    }

    /// `||n_- - conj(n_+)|| / ||n_+||` (zero when `n_+ = 0` and `n_- = 0`).
    pub fn compatibility_defect(&self) -> f64 {
        let diff = self.n_minus.sub(&self.n_plus.conj()).expect("same grid");
        let scale = l2_norm_sq_spectral(&self.n_plus).sqrt();
        let d = l2_norm_sq_spectral(&diff).sqrt();
        if scale == 0.0 {
            d
        } else {
            d / scale
        }
    }

    /// `(u, n, v)` with `v = grad Lambda^{-2} n_t`, the irrotational velocity.
    pub fn to_physical_state(&self) -> Result<PhysicalState> {
        let (u, n, n_t) = from_pm(self)?;
        let v = gradient(&lambda_inv_sq(&n_t));
        Ok(PhysicalState { t: self.t, u, n, v })
    }
}

/// Hamiltonian-form state `(u, n, v)`; all fields spectral.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalState {
    pub t: f64,
    pub u: Field2D,
    pub n: Field2D,
    pub v: [Field2D; 2],
}

impl PhysicalState {
    pub fn new(t: f64, u: Field2D, n: Field2D, v: [Field2D; 2]) -> Result<Self> {
        let g = u.grid();
        if n.grid() != g || v[0].grid() != g || v[1].grid() != g {
            return Err(Error::GridMismatch);
        }
        check_real(&n, "density n")?;
        check_real(&v[0], "velocity v_x")?;
        check_real(&v[1], "velocity v_y")?;
        let [vx, vy] = v;
        Ok(Self {
            t,
            u: u.spectral(),
            n: n.spectral(),
            v: [vx.spectral(), vy.spectral()],
        })
    }

    /// `||curl v||_{L^2}`.
    pub fn curl_norm(&self) -> f64 {
        l2_norm_sq_spectral(&curl(&self.v).expect("same grid")).sqrt()
    }

    /// `n_t = -div v`, spectral.
    pub fn density_rate(&self) -> Field2D {
        divergence(&self.v).expect("same grid").scale((-1.0).into())
    }

    /// Converts to `(u, n_+, n_-)` using `n_t = -div v`.
    pub fn to_wave_state(&self) -> Result<WaveState> {
        let mut s = to_pm(&self.u, &self.n, &self.density_rate())?;
        s.t = self.t;
        Ok(s)
    }
}

fn check_real(f: &Field2D, what: &'static str) -> Result<()> {
    let scale = f.physical().max_abs();
    let residue = f.max_imag();
    if residue > DATA_TOLERANCE * scale {
        return Err(Error::NotReal {
            what,
            residue: residue / scale,
        });
    }
    Ok(())
}

fn check_zero_mean(f: &Field2D) -> Result<()> {
    let m = mean(f).norm();
    if m > 1e-12 {
        return Err(Error::NonzeroMean { mean: m });
    }
    Ok(())
}

/// Hamiltonian data `(n0, n1, v0)` with `v0 = grad Lambda^{-2} n1`, the
/// irrotational zero-mean solution of `-div v0 = n1`.
pub fn make_hamiltonian_data(
    n0: &Field2D,
    n1: &Field2D,
) -> Result<(Field2D, Field2D, [Field2D; 2])> {
    check_real(n0, "density n0")?;
    check_real(n1, "density rate n1")?;
    check_zero_mean(n1)?;
    let v0 = gradient(&lambda_inv_sq(&n1.spectral()));
    let residual = divergence(&v0)?.add(&n1.spectral())?;
    let scale = l2_norm_sq_spectral(n1).sqrt();
    let defect = l2_norm_sq_spectral(&residual).sqrt();
    if defect > DATA_TOLERANCE * scale.max(1.0) {
        return Err(Error::Assertion(format!(
            "div v0 + n1 = {defect:e} after inversion"
        )));
    }
    Ok((n0.clone(), n1.clone(), v0))
}

/// `(u0, n0, n1) -> (u0, n0 + i Lambda^{-1} n1, n0 - i Lambda^{-1} n1)` at `t = 0`.
pub fn to_pm(u0: &Field2D, n0: &Field2D, n1: &Field2D) -> Result<WaveState> {
    check_real(n0, "density n0")?;
    check_real(n1, "density rate n1")?;
    check_zero_mean(n1)?;
    let w = lambda_inv(&n1.spectral()).scale(num_complex::Complex64::i());
    let n0 = n0.spectral();
    WaveState::new(0.0, u0.spectral(), n0.add(&w)?, n0.sub(&w)?)
}

/// `(u, n, n_t)` from a wave state; errors when `n` or `n_t` is not real.
pub fn from_pm(state: &WaveState) -> Result<(Field2D, Field2D, Field2D)> {
    let n = state.density();
    let n_t = lambda(&state.lambda_inv_nt());
    check_real(&n, "density n")?;
    check_real(&n_t, "density rate n_t")?;
    Ok((state.u.clone(), n, n_t))
}

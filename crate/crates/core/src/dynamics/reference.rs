//! High-accuracy oracles for the Galerkin system: adaptive Dormand-Prince and
//! fixed-step RK4, both in interaction-picture variables so that the stiff
//! linear parts are integrated exactly.

use num_complex::Complex64;

use super::galerkin::Kernel;
use super::WaveState;
use crate::error::Result;
use crate::ode::{dopri5, rk4_step, AdaptiveOptions, Control};
use crate::spectral::{Field2D, Representation};

struct Picture {
    kernel: Kernel,
    len: usize,
}

impl Picture {
    fn new(state: &WaveState) -> Self {
        let kernel = Kernel::new(*state.grid());
        let len = kernel.grid.len();
        Self { kernel, len }
    }

    /// Interaction-picture vector at `tau = 0`; `u` is projected onto the active set.
    fn pack(&self, s: &WaveState) -> Vec<Complex64> {
        let mut u = s.u.spectral().into_data();
        self.kernel.project(&mut u);
        let mut y = u;
        y.extend_from_slice(s.n_plus.spectral().data());
        y.extend_from_slice(s.n_minus.spectral().data());
        y
    }

    /// Maps `w` at `tau` back to state variables.
    fn unpack(
        &self,
        w: &[Complex64],
        tau: f64,
    ) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let k = &self.kernel;
        let mut u = w[..self.len].to_vec();
        let mut p = w[self.len..2 * self.len].to_vec();
        let mut q = w[2 * self.len..].to_vec();
        k.rotate(&mut u, &k.k2, tau);
        k.rotate(&mut p, &k.k, tau);
        k.rotate(&mut q, &k.k, -tau);
        (u, p, q)
    }

    fn rhs(&self, tau: f64, w: &Vec<Complex64>) -> Vec<Complex64> {
        let k = &self.kernel;
        let (u, p, q) = self.unpack(w, tau);
        let (mut du, mut dp, mut dq) = k.nonlinear(&u, &p, &q);
        k.rotate(&mut du, &k.k2, -tau);
        k.rotate(&mut dp, &k.k, -tau);
        k.rotate(&mut dq, &k.k, tau);
        du.extend(dp);
        du.extend(dq);
        du
    }

    fn state(&self, w: &[Complex64], t0: f64, tau: f64) -> WaveState {
        let (u, p, q) = self.unpack(w, tau);
        let g = self.kernel.grid;
        let f = |d| Field2D::new_unchecked(g, d, Representation::Spectral);
        WaveState {
            t: t0 + tau,
            u: f(u),
            n_plus: f(p),
            n_minus: f(q),
        }
    }
}

/// Adaptive Dormand-Prince integration of the Galerkin system over `[t, t + T]`
/// with local error tolerance `tol` (absolute and relative).
pub fn reference_evolve(state: &WaveState, t_final: f64, tol: f64) -> Result<WaveState> {
    let pic = Picture::new(state);
    let y0 = pic.pack(state);
    let mut opts = AdaptiveOptions::with_tolerance(tol);
    opts.initial_step = 1e-4;
    let sol = dopri5(
        |t, y| pic.rhs(t, y),
        0.0,
        y0,
        t_final,
        &opts,
        |_, _| Control::Continue,
    )?;
    Ok(pic.state(&sol.y, state.t, sol.t))
}

/// Fixed-step RK4 on the same system; `t_final` may be negative.
pub fn reference_evolve_fixed(state: &WaveState, t_final: f64, steps: usize) -> Result<WaveState> {
    let pic = Picture::new(state);
    let mut y = pic.pack(state);
    let steps = steps.max(1);
    let h = t_final / steps as f64;
    let mut f = |t: f64, y: &Vec<Complex64>| pic.rhs(t, y);
    for i in 0..steps {
        y = rk4_step(&mut f, i as f64 * h, &y, h);
    }
    Ok(pic.state(&y, state.t, t_final))
}

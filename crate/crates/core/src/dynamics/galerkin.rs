//! Shared spectral kernels for the Galerkin system on the active set.

use num_complex::Complex64;

use crate::spectral::fft::fft2;
use crate::spectral::GridSpec;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Per-mode symbols of the linear parts and the active-set mask.
#[derive(Clone, Debug)]
pub(crate) struct Kernel {
    pub grid: GridSpec,
    /// `|xi|^2`
    pub k2: Vec<f64>,
    /// `|xi|`
    pub k: Vec<f64>,
    pub active: Vec<bool>,
}

impl Kernel {
    pub fn new(grid: GridSpec) -> Self {
        let k2: Vec<f64> = (0..grid.len()).map(|i| grid.frequency_sq(i)).collect();
        let k = k2.iter().map(|v| v.sqrt()).collect();
        let active = (0..grid.len()).map(|i| grid.is_active(i)).collect();
        Self {
            grid,
            k2,
            k,
            active,
        }
    }

    pub fn m(&self) -> usize {
        self.grid.modes()
    }

    pub fn project(&self, data: &mut [Complex64]) {
        for (c, &a) in data.iter_mut().zip(&self.active) {
            if !a {
                *c = ZERO;
            }
        }
    }

    pub fn to_physical(&self, spec: &[Complex64]) -> Vec<Complex64> {
        let mut out = spec.to_vec();
        fft2(&mut out, self.m(), false);
        out
    }

    pub fn to_spectral(&self, mut phys: Vec<Complex64>) -> Vec<Complex64> {
        fft2(&mut phys, self.m(), true);
        phys
    }

    /// `P_A |u|^2` from the physical values of `u`.
    pub fn density_of(&self, u_phys: &[Complex64]) -> Vec<Complex64> {
        let rho = u_phys
            .iter()
            .map(|z| Complex64::new(z.norm_sqr(), 0.0))
            .collect();
        let mut rho = self.to_spectral(rho);
        self.project(&mut rho);
        rho
    }

    /// Multiplies each coefficient by `exp(-i tau w(xi))`.
    pub fn rotate(&self, data: &mut [Complex64], symbol: &[f64], tau: f64) {
        for (c, w) in data.iter_mut().zip(symbol) {
            *c *= Complex64::from_polar(1.0, -tau * w);
        }
    }

    /// `exp(-i tau P n) u` for real `n` given at the grid points and `u`
    /// supported on the active set.
    ///
    /// The generator is Hermitian on the active set, so the flow conserves
    /// `||u||` exactly. It is summed as a Taylor series on substeps with
    /// `tau max|n| <= 1`, until the terms drop below rounding.
    pub fn phase_flow(&self, u: &[Complex64], n_phys: &[f64], tau: f64) -> Vec<Complex64> {
        let n_max = n_phys.iter().fold(0.0, |m: f64, v| m.max(v.abs()));
        let pieces = (tau.abs() * n_max).ceil().max(1.0) as usize;
        let h = tau / pieces as f64;
        let mut out = u.to_vec();
        for _ in 0..pieces {
            let mut term = out.clone();
            let scale: f64 = out.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            for k in 1..=60 {
                let phys = self.to_physical(&term);
                let prod = phys.iter().zip(n_phys).map(|(z, n)| z * n).collect();
                term = self.to_spectral(prod);
                self.project(&mut term);
                let c = Complex64::new(0.0, -h / k as f64);
                let mut size = 0.0;
                for (o, t) in out.iter_mut().zip(term.iter_mut()) {
                    *t *= c;
                    *o += *t;
                    size += t.norm_sqr();
                }
                if size.sqrt() <= 1e-17 * scale {
                    break;
                }
            }
        }
        out
    }

    /// Nonlinear parts of the Galerkin vector field:
    /// `(-i P(n u), -i Lambda P|u|^2, +i Lambda P|u|^2)` with `n = (n_+ + n_-)/2`.
    pub fn nonlinear(
        &self,
        u: &[Complex64],
        n_plus: &[Complex64],
        n_minus: &[Complex64],
    ) -> (Vec<Complex64>, Vec<Complex64>, Vec<Complex64>) {
        let u_phys = self.to_physical(u);
        let n_spec: Vec<Complex64> = n_plus
            .iter()
            .zip(n_minus)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let n_phys = self.to_physical(&n_spec);
        let prod: Vec<Complex64> = u_phys.iter().zip(&n_phys).map(|(a, b)| a * b).collect();
        let mut du = self.to_spectral(prod);
        self.project(&mut du);
        for c in du.iter_mut() {
            *c *= -Complex64::i();
        }
        let rho = self.density_of(&u_phys);
        let dp: Vec<Complex64> = rho
            .iter()
            .zip(&self.k)
            .map(|(r, k)| -Complex64::i() * k * r)
            .collect();
        let dm = dp.iter().map(|z| -z).collect();
        (du, dp, dm)
    }
}

//! Initial data library. Every preset is projected onto the 2/3-rule active
//! set, has real `n0`, and has zero-mean `n1`. Masses are set as a fraction
//! of the ground-state mass `||Q||^2`.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::dynamics::{to_pm, WaveState};
use crate::error::{Error, Result};
use crate::groundstate::{ground_state, townes_mass, with_mass};
use crate::spectral::{dealias, Field2D, GridSpec, Representation};

/// Names accepted by [`build_preset`].
pub const PRESET_NAMES: [&str; 6] = [
    "constant",
    "plane_wave",
    "gaussian",
    "gaussian_pair",
    "townes_scaled",
    "random_smooth",
];

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PresetParams {
    /// `||u0||^2 / ||Q||^2`.
    pub mass_fraction: f64,
    /// Spatial width of localized presets; `None` picks `L / 20`.
    pub width: Option<f64>,
    pub seed: u64,
}

impl Default for PresetParams {
    fn default() -> Self {
        Self {
            mass_fraction: 0.5,
            width: None,
            seed: 0,
        }
    }
}

/// Initial data `(u0, n0, n1)` before conversion to the wave form.
#[derive(Clone, Debug)]
pub struct InitialData {
    pub u0: Field2D,
    pub n0: Field2D,
    pub n1: Field2D,
}

impl InitialData {
    pub fn to_wave_state(&self) -> Result<WaveState> {
        to_pm(&self.u0, &self.n0, &self.n1)
    }
}

fn zero_mean(f: Field2D) -> Field2D {
    let mut d = f.spectral().into_data();
    d[0] = Complex64::new(0.0, 0.0);
    Field2D::from_parts(*f.grid(), d, Representation::Spectral).expect("same length")
}

fn real(f: Field2D) -> Field2D {
    f.real_part().spectral()
}

fn gaussian(g: GridSpec, cx: f64, cy: f64, w: f64, kx: f64, ky: f64) -> Field2D {
    Field2D::from_fn(g, move |x, y| {
        let r2 = (x - cx).powi(2) + (y - cy).powi(2);
        Complex64::from_polar((-r2 / (2.0 * w * w)).exp(), kx * (x - cx) + ky * (y - cy))
    })
}

/// Builds the named preset on `grid`:
///
/// - `constant`: `u0 = A`, `n0 = n1 = 0`; the exact solution keeps `|u| = A`.
/// - `plane_wave`: `u0 = A e^{i xi.x}` on the first lattice mode, `n0 = n1 = 0`.
/// - `gaussian`: centred Gaussian `u0`, `n0 = -|u0|^2 / 2`, `n1 = 0`.
/// - `gaussian_pair`: two Gaussians moving towards each other, a displaced
///   density bump and a dipolar `n1`.
/// - `townes_scaled`: `Q` rescaled in amplitude, `n0 = -|u0|^2`, `n1 = 0`.
/// - `random_smooth`: random smooth fields under a Gaussian envelope, from `seed`.
///
/// In all cases `||u0||^2 = mass_fraction * ||Q||^2`.
pub fn build_preset(name: &str, grid: GridSpec, params: &PresetParams) -> Result<InitialData> {
    if !(params.mass_fraction.is_finite() && params.mass_fraction >= 0.0) {
        return Err(Error::InvalidParams(format!(
            "mass fraction must be nonnegative, got {}",
            params.mass_fraction
        )));
    }
    let l = grid.length();
    let c = l / 2.0;
    let w = params.width.unwrap_or(l / 20.0);
    let target = params.mass_fraction * townes_mass()?;
    let zero = Field2D::zeros(grid, Representation::Spectral);
    let (u, n0, n1) = match name {
        "constant" => (
            Field2D::constant(grid, Complex64::new(1.0, 0.0)),
            zero.clone(),
            zero,
        ),
        "plane_wave" => (
            Field2D::plane_wave(grid, 1, 0, Complex64::new(1.0, 0.0)),
            zero.clone(),
            zero,
        ),
        "gaussian" => {
            let u = with_mass(&dealias(&gaussian(grid, c, c, w, 0.0, 0.0)), target);
            let n0 = real(
                u.physical()
                    .map(|z| Complex64::new(-0.5 * z.norm_sqr(), 0.0)),
            );
            (u, n0, zero)
        }
        "gaussian_pair" => {
            let k = 1.0 / w;
            let a = gaussian(grid, c - 1.5 * w, c, w, k, 0.0);
            let b = gaussian(grid, c + 1.5 * w, c, w, -k, 0.0);
            let u = a.add(&b)?;
            let n0 = real(gaussian(grid, c, c + w, w, 0.0, 0.0).scale((-0.5).into()));
            let n1 = Field2D::from_real_fn(grid, |x, y| {
                let r2 = (x - c).powi(2) + (y - c).powi(2);
                0.5 * (x - c) / w * (-r2 / (2.0 * w * w)).exp()
            });
            (u, n0, n1)
        }
        "townes_scaled" => {
            let q = ground_state()?;
            let u = q.to_field(grid);
            let n0 = real(u.physical().map(|z| Complex64::new(-z.norm_sqr(), 0.0)));
            (u, n0, zero)
        }
        "random_smooth" => {
            let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
            let envelope = gaussian(grid, c, c, 2.0 * w, 0.0, 0.0);
            let u = random_band(grid, w, &mut rng, true).zip_with(&envelope, |a, b| a * b)?;
            let n0 = real(random_band(grid, w, &mut rng, false).zip_with(&envelope, |a, b| a * b)?);
            let n1 = real(random_band(grid, w, &mut rng, false).zip_with(&envelope, |a, b| a * b)?);
            (u, n0, n1)
        }
        other => return Err(Error::UnknownPreset(other.to_owned())),
    };
    let u0 = with_mass(&dealias(&u.spectral()), target);
    Ok(InitialData {
        u0,
        n0: dealias(&n0.spectral()),
        n1: zero_mean(dealias(&n1.spectral())),
    })
}

/// Random physical field with Fourier weights `exp(-|xi|^2 w^2 / 2)`.
fn random_band(g: GridSpec, w: f64, rng: &mut ChaCha8Rng, complex: bool) -> Field2D {
    let data = (0..g.len())
        .map(|i| {
            let weight = (-g.frequency_sq(i) * w * w / 2.0).exp();
            let phase = rng.random_range(0.0..2.0 * PI);
            let amp = if complex {
                1.0
            } else {
                rng.random_range(0.0..1.0)
            };
            Complex64::from_polar(amp * weight, phase)
        })
        .collect();
    Field2D::from_parts(g, data, Representation::Spectral)
        .expect("length matches")
        .physical()
}

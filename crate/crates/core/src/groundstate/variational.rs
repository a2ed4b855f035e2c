//! Grid ground state by Petviashvili's renormalized fixed-point iteration.
//!
//! A plain normalized gradient flow is degenerate here: the cubic problem is
//! mass-critical in 2D, so the constrained energy has no minimizer at fixed
//! mass. The Petviashvili iteration targets `(1 - Delta) Q = Q^3` directly.

use num_complex::Complex64;

use crate::energy::mass;
use crate::error::{Error, Result};
use crate::spectral::{laplacian, Field2D, GridSpec, Representation};

#[derive(Clone, Debug)]
pub struct VariationalGroundState {
    pub field: Field2D,
    pub l2_norm_sq: f64,
    /// Fitted `mu` in `Delta Q - mu Q + Q^3 = 0`.
    pub mu: f64,
    /// `max |Delta Q - mu Q + Q^3| / max |Q|`.
    pub residual: f64,
    pub iterations: usize,
}

const MAX_ITERATIONS: usize = 2000;
const TARGET: f64 = 1e-12;

pub fn variational_ground_state(grid: GridSpec) -> Result<VariationalGroundState> {
    let c = grid.length() / 2.0;
    let symbol: Vec<f64> = (0..grid.len())
        .map(|i| 1.0 + grid.frequency_sq(i))
        .collect();
    let mut q = Field2D::from_real_fn(grid, |x, y| {
        2.0 * (-((x - c).powi(2) + (y - c).powi(2)) / 2.0).exp()
    })
    .spectral();
    let mut change = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let cube = q
            .physical()
            .map(|z| Complex64::new(z.re.powi(3), 0.0))
            .spectral();
        let lhs: f64 = q
            .data()
            .iter()
            .zip(&symbol)
            .map(|(z, s)| s * z.norm_sqr())
            .sum();
        let rhs: f64 = q
            .data()
            .iter()
            .zip(cube.data())
            .map(|(a, b)| (a.conj() * b).re)
            .sum();
        let factor = (lhs / rhs).powf(1.5);
        let next: Vec<Complex64> = cube
            .data()
            .iter()
            .zip(&symbol)
            .map(|(b, s)| factor * b / s)
            .collect();
        let next = Field2D::from_parts(grid, next, Representation::Spectral)?;
        change = next.sub(&q)?.max_abs() / next.max_abs();
        q = next;
        if change < TARGET {
            return Ok(finish(q.real_part(), it));
        }
    }
    Err(Error::NoConvergence {
        iterations: MAX_ITERATIONS,
        residual: change,
    })
}

fn finish(q: Field2D, iterations: usize) -> VariationalGroundState {
    let lap = laplacian(&q).physical();
    let cube = q.map(|z| Complex64::new(z.re.powi(3), 0.0));
    let num: f64 = lap
        .data()
        .iter()
        .zip(cube.data())
        .zip(q.data())
        .map(|((l, c), z)| (l.re + c.re) * z.re)
        .sum();
    let den: f64 = q.data().iter().map(|z| z.re * z.re).sum();
    let mu = num / den;
    let scale = q.max_abs();
    let residual = lap
        .data()
        .iter()
        .zip(cube.data())
        .zip(q.data())
        .map(|((l, c), z)| (l.re - mu * z.re + c.re).abs())
        .fold(0.0, f64::max)
        / scale;
    VariationalGroundState {
        l2_norm_sq: mass(&q),
        field: q,
        mu,
        residual,
        iterations,
    }
}

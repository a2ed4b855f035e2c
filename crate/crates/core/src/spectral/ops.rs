//! Fourier multipliers, differential operators and norms.

use num_complex::Complex64;

use super::field::{Field2D, Representation};
use crate::error::{Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Coefficientwise product `symbol(xi) * f^(xi)` of a spectral field.
pub fn apply_multiplier<S>(f: &Field2D, symbol: S) -> Result<Field2D>
where
    S: Fn([f64; 2]) -> Complex64,
{
    f.expect(Representation::Spectral)?;
    let g = *f.grid();
    let mut out = Vec::with_capacity(g.len());
    for (idx, &c) in f.data().iter().enumerate() {
        let m = symbol(g.frequency(idx));
        if !(m.re.is_finite() && m.im.is_finite()) {
            let (kx, ky) = g.mode(idx);
            return Err(Error::NonFiniteSymbol { kx, ky });
        }
        out.push(m * c);
    }
    Ok(Field2D::new_unchecked(g, out, Representation::Spectral))
}

/// Applies a real radial-or-not symbol in the field's own representation.
fn multiplier_keep_repr<S>(f: &Field2D, symbol: S) -> Field2D
where
    S: Fn([f64; 2]) -> Complex64,
{
    let spec = f.spectral();
    let out = apply_multiplier(&spec, symbol).expect("operator symbols are finite");
    out.in_representation(f.representation())
}

fn modulus(xi: [f64; 2]) -> f64 {
    xi[0].hypot(xi[1])
}

/// `Lambda = sqrt(-Delta)`, symbol `|xi|`.
pub fn lambda(f: &Field2D) -> Field2D {
    multiplier_keep_repr(f, |xi| Complex64::new(modulus(xi), 0.0))
}

/// `Lambda^{-1}`, symbol `1/|xi|` with the zero mode projected out.
pub fn lambda_inv(f: &Field2D) -> Field2D {
    multiplier_keep_repr(f, |xi| {
        let r = modulus(xi);
        if r == 0.0 {
            ZERO
        } else {
            Complex64::new(1.0 / r, 0.0)
        }
    })
}

/// `Lambda^{-2}`, symbol `1/|xi|^2` with the zero mode projected out.
pub fn lambda_inv_sq(f: &Field2D) -> Field2D {
    multiplier_keep_repr(f, |xi| {
        let r2 = xi[0] * xi[0] + xi[1] * xi[1];
        if r2 == 0.0 {
            ZERO
        } else {
            Complex64::new(1.0 / r2, 0.0)
        }
    })
}

pub fn laplacian(f: &Field2D) -> Field2D {
    multiplier_keep_repr(f, |xi| {
        Complex64::new(-(xi[0] * xi[0] + xi[1] * xi[1]), 0.0)
    })
}

/// `(d/dx, d/dy) f`.
pub fn gradient(f: &Field2D) -> [Field2D; 2] {
    [
        multiplier_keep_repr(f, |xi| Complex64::new(0.0, xi[0])),
        multiplier_keep_repr(f, |xi| Complex64::new(0.0, xi[1])),
    ]
}

pub fn divergence(v: &[Field2D; 2]) -> Result<Field2D> {
    let dx = multiplier_keep_repr(&v[0], |xi| Complex64::new(0.0, xi[0]));
    let dy = multiplier_keep_repr(&v[1], |xi| Complex64::new(0.0, xi[1]));
    dx.add(&dy)
}

/// Scalar curl `d v_y / dx - d v_x / dy`.
pub fn curl(v: &[Field2D; 2]) -> Result<Field2D> {
    let a = multiplier_keep_repr(&v[1], |xi| Complex64::new(0.0, xi[0]));
    let b = multiplier_keep_repr(&v[0], |xi| Complex64::new(0.0, xi[1]));
    a.sub(&b)
}

/// Zeroes every mode outside the 2/3-rule active set (this includes Nyquist).
pub fn dealias(f: &Field2D) -> Field2D {
    let spec = f.spectral();
    let g = *f.grid();
    let data = spec
        .data()
        .iter()
        .enumerate()
        .map(|(idx, &c)| if g.is_active(idx) { c } else { ZERO })
        .collect();
    Field2D::new_unchecked(g, data, Representation::Spectral).in_representation(f.representation())
}

pub fn zero_nyquist(f: &Field2D) -> Field2D {
    let spec = f.spectral();
    let g = *f.grid();
    let data = spec
        .data()
        .iter()
        .enumerate()
        .map(|(idx, &c)| if g.is_nyquist(idx) { ZERO } else { c })
        .collect();
    Field2D::new_unchecked(g, data, Representation::Spectral).in_representation(f.representation())
}

/// Spatial mean (the zero-frequency coefficient).
pub fn mean(f: &Field2D) -> Complex64 {
    match f.representation() {
        Representation::Spectral => f.data()[0],
        Representation::Physical => f.data().iter().sum::<Complex64>() / f.grid().len() as f64,
    }
}

/// `||f||_{L^p}` by equal-weight quadrature on the periodic grid.
///
/// Supports any finite `p >= 1` and `p = inf`.
pub fn lp_norm(f: &Field2D, p: f64) -> Result<f64> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::UnsupportedNorm(p));
    }
    let phys = f.physical();
    if p.is_infinite() {
        return Ok(phys.max_abs());
    }
    let w = f.grid().cell_area();
    let sum: f64 = if p == 2.0 {
        phys.data().iter().map(|z| z.norm_sqr()).sum()
    } else if p == 4.0 {
        phys.data()
            .iter()
            .map(|z| z.norm_sqr() * z.norm_sqr())
            .sum()
    } else {
        phys.data().iter().map(|z| z.norm().powf(p)).sum()
    };
    Ok((w * sum).powf(1.0 / p))
}

/// `||f||_{L^2}^2` computed from the spectral coefficients (Parseval).
pub fn l2_norm_sq_spectral(f: &Field2D) -> f64 {
    let spec = f.spectral();
    f.grid().area() * spec.data().iter().map(|z| z.norm_sqr()).sum::<f64>()
}

/// `||f||_{H^s} = (L^2 sum <xi>^{2s} |f^(xi)|^2)^{1/2}`.
pub fn sobolev_norm(f: &Field2D, s: f64) -> f64 {
    let spec = f.spectral();
    let g = *f.grid();
    let sum: f64 = spec
        .data()
        .iter()
        .enumerate()
        .map(|(idx, c)| (1.0 + g.frequency_sq(idx)).powf(s) * c.norm_sqr())
        .sum();
    (g.area() * sum).sqrt()
}

/// `||grad f||_{L^2}^2`, exact on the lattice.
pub fn gradient_norm_sq(f: &Field2D) -> f64 {
    let spec = f.spectral();
    let g = *f.grid();
    let sum: f64 = spec
        .data()
        .iter()
        .enumerate()
        .map(|(idx, c)| g.frequency_sq(idx) * c.norm_sqr())
        .sum();
    g.area() * sum
}

/// Pointwise product of two fields in physical space.
pub fn product(a: &Field2D, b: &Field2D) -> Result<Field2D> {
    a.physical().zip_with(&b.physical(), |x, y| x * y)
}

/// `|f|^2` in physical space.
pub fn modulus_sq(f: &Field2D) -> Field2D {
    f.physical().map(|z| Complex64::new(z.norm_sqr(), 0.0))
}

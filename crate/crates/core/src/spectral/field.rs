use num_complex::Complex64;

use super::fft::fft2;
use super::grid::GridSpec;
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Representation {
    Physical,
    Spectral,
}

impl Representation {
    pub(crate) fn tag(self) -> u8 {
        match self {
            Representation::Physical => 0,
            Representation::Spectral => 1,
        }
    }

    pub(crate) fn from_tag(tag: u8) -> Option<Self> {
        match tag {
            0 => Some(Representation::Physical),
            1 => Some(Representation::Spectral),
            _ => None,
        }
    }
}

/// One complex scalar field on a [`GridSpec`], tagged with its representation.
///
/// Spectral coefficients use `f(x) = sum_k c_k exp(i xi_k . x)`, so
/// `int |f|^2 dx = L^2 sum |c_k|^2` and products of fields correspond to
/// convolutions of their coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct Field2D {
    grid: GridSpec,
    data: Vec<Complex64>,
    repr: Representation,
}

impl Field2D {
    pub fn from_parts(grid: GridSpec, data: Vec<Complex64>, repr: Representation) -> Result<Self> {
        if data.len() != grid.len() {
            return Err(Error::InvalidGrid(format!(
                "expected {} values, got {}",
                grid.len(),
                data.len()
            )));
        }
        Ok(Self { grid, data, repr })
    }

    pub(crate) fn new_unchecked(
        grid: GridSpec,
        data: Vec<Complex64>,
        repr: Representation,
    ) -> Self {
        debug_assert_eq!(data.len(), grid.len());
        Self { grid, data, repr }
    }

    pub fn zeros(grid: GridSpec, repr: Representation) -> Self {
        Self::new_unchecked(grid, vec![Complex64::new(0.0, 0.0); grid.len()], repr)
    }

    /// Samples `f(x, y)` on the physical grid.
    pub fn from_fn<F: Fn(f64, f64) -> Complex64>(grid: GridSpec, f: F) -> Self {
        let data = (0..grid.len())
            .map(|idx| {
                let [x, y] = grid.point(idx);
                f(x, y)
            })
            .collect();
        Self::new_unchecked(grid, data, Representation::Physical)
    }

    pub fn from_real_fn<F: Fn(f64, f64) -> f64>(grid: GridSpec, f: F) -> Self {
        Self::from_fn(grid, |x, y| Complex64::new(f(x, y), 0.0))
    }

    pub fn constant(grid: GridSpec, value: Complex64) -> Self {
        Self::new_unchecked(grid, vec![value; grid.len()], Representation::Physical)
    }

    /// `amplitude * exp(i xi . x)` for the lattice mode `(kx, ky)`, in physical space.
    pub fn plane_wave(grid: GridSpec, kx: i64, ky: i64, amplitude: Complex64) -> Self {
        let dk = grid.frequency_step();
        Self::from_fn(grid, |x, y| {
            amplitude * Complex64::from_polar(1.0, dk * (kx as f64 * x + ky as f64 * y))
        })
    }

    pub fn grid(&self) -> &GridSpec {
        &self.grid
    }

    pub fn representation(&self) -> Representation {
        self.repr
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn into_data(self) -> Vec<Complex64> {
        self.data
    }

    /// Coefficient of the integer mode `(kx, ky)`; spectral fields only.
    pub fn coefficient(&self, kx: i64, ky: i64) -> Result<Complex64> {
        self.expect(Representation::Spectral)?;
        Ok(self.data[self.grid.flat_index(kx, ky)])
    }

    pub(crate) fn expect(&self, repr: Representation) -> Result<()> {
        if self.repr == repr {
            Ok(())
        } else {
            Err(Error::WrongRepresentation {
                expected: repr,
                found: self.repr,
            })
        }
    }

    pub fn to_spectral(&self) -> Result<Field2D> {
        self.expect(Representation::Physical)?;
        let mut data = self.data.clone();
        fft2(&mut data, self.grid.modes(), true);
        Ok(Self::new_unchecked(
            self.grid,
            data,
            Representation::Spectral,
        ))
    }

    pub fn to_physical(&self) -> Result<Field2D> {
        self.expect(Representation::Spectral)?;
        let mut data = self.data.clone();
        fft2(&mut data, self.grid.modes(), false);
        Ok(Self::new_unchecked(
            self.grid,
            data,
            Representation::Physical,
        ))
    }

    /// Spectral copy of the field, transforming only when needed.
    pub fn spectral(&self) -> Field2D {
        match self.repr {
            Representation::Spectral => self.clone(),
            Representation::Physical => self.to_spectral().expect("tag checked"),
        }
    }

    /// Physical copy of the field, transforming only when needed.
    pub fn physical(&self) -> Field2D {
        match self.repr {
            Representation::Physical => self.clone(),
            Representation::Spectral => self.to_physical().expect("tag checked"),
        }
    }

    pub fn in_representation(&self, repr: Representation) -> Field2D {
        match repr {
            Representation::Physical => self.physical(),
            Representation::Spectral => self.spectral(),
        }
    }

    pub fn map<F: Fn(Complex64) -> Complex64>(&self, f: F) -> Field2D {
        Self::new_unchecked(
            self.grid,
            self.data.iter().map(|&z| f(z)).collect(),
            self.repr,
        )
    }

    /// Pointwise combination of two fields sharing grid and representation.
    pub fn zip_with<F: Fn(Complex64, Complex64) -> Complex64>(
        &self,
        other: &Field2D,
        f: F,
    ) -> Result<Field2D> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let other = other.in_representation(self.repr);
        let data = self
            .data
            .iter()
            .zip(other.data.iter())
            .map(|(&a, &b)| f(a, b))
            .collect();
        Ok(Self::new_unchecked(self.grid, data, self.repr))
    }

    pub fn scale(&self, factor: Complex64) -> Field2D {
        self.map(|z| z * factor)
    }

    pub fn add(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &Field2D) -> Result<Field2D> {
        self.zip_with(other, |a, b| a - b)
    }

    /// Complex conjugate of the field (in either representation).
    pub fn conj(&self) -> Field2D {
        match self.repr {
            Representation::Physical => self.map(|z| z.conj()),
            Representation::Spectral => {
                let g = self.grid;
                let data = (0..g.len())
                    .map(|idx| {
                        let (kx, ky) = g.mode(idx);
                        self.data[g.flat_index(-kx, -ky)].conj()
                    })
                    .collect();
                Self::new_unchecked(g, data, Representation::Spectral)
            }
        }
    }

    /// Real part in physical space.
    pub fn real_part(&self) -> Field2D {
        self.physical().map(|z| Complex64::new(z.re, 0.0))
    }

    /// Largest `|Im f|` over the physical grid.
    pub fn max_imag(&self) -> f64 {
        self.physical()
            .data
            .iter()
            .fold(0.0, |acc: f64, z| acc.max(z.im.abs()))
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |acc: f64, z| acc.max(z.norm()))
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over non-Nyquist modes; zero for real fields.
    pub fn hermitian_defect(&self) -> f64 {
        let spec = self.spectral();
        let g = self.grid;
        (0..g.len())
            .filter(|&idx| !g.is_nyquist(idx))
            .map(|idx| {
                let (kx, ky) = g.mode(idx);
                (spec.data[g.flat_index(-kx, -ky)] - spec.data[idx].conj()).norm()
            })
            .fold(0.0, f64::max)
    }

    pub fn is_finite(&self) -> bool {
        self.data
            .iter()
            .all(|z| z.re.is_finite() && z.im.is_finite())
    }
}

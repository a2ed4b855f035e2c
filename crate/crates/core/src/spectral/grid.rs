use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Periodic square box `[0, L)^2` sampled on an `M x M` grid.
///
/// Flat indices are row-major, `idx = i * M + j`, with `i` the x index and
/// `j` the y index. In spectral representation the same layout holds with
/// each axis in zero-frequency-first order: `0, 1, .., M/2 - 1, -M/2, .., -1`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    modes: usize,
    length: f64,
}

impl GridSpec {
    pub fn new(modes: usize, length: f64) -> Result<Self> {
        if modes < 8 || modes % 2 != 0 {
            return Err(Error::InvalidGrid(format!(
                "modes per axis must be even and >= 8, got {modes}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "box length must be positive, got {length}"
            )));
        }
        Ok(Self { modes, length })
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    /// Number of grid points, `M^2`.
    pub fn len(&self) -> usize {
        self.modes * self.modes
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Physical grid spacing `L / M`.
    pub fn spacing(&self) -> f64 {
        self.length / self.modes as f64
    }

    /// Quadrature weight of one grid cell, `(L / M)^2`.
    pub fn cell_area(&self) -> f64 {
        self.spacing() * self.spacing()
    }

    /// Box area `L^2`; the Parseval factor for the coefficient convention used here.
    pub fn area(&self) -> f64 {
        self.length * self.length
    }

    /// Lattice spacing in frequency, `2 pi / L`.
    pub fn frequency_step(&self) -> f64 {
        2.0 * PI / self.length
    }

    /// Largest resolved frequency, `pi M / L`.
    pub fn nyquist_frequency(&self) -> f64 {
        PI * self.modes as f64 / self.length
    }

    /// Signed integer wavenumber for an axis index.
    pub fn wavenumber(&self, index: usize) -> i64 {
        let half = self.modes / 2;
        if index < half {
            index as i64
        } else {
            index as i64 - self.modes as i64
        }
    }

    /// Axis index for a signed wavenumber (taken modulo `M`).
    pub fn axis_index(&self, k: i64) -> usize {
        k.rem_euclid(self.modes as i64) as usize
    }

    /// Integer mode `(kx, ky)` of a flat spectral index.
    pub fn mode(&self, flat: usize) -> (i64, i64) {
        (
            self.wavenumber(flat / self.modes),
            self.wavenumber(flat % self.modes),
        )
    }

    /// Flat index of the integer mode `(kx, ky)`.
    pub fn flat_index(&self, kx: i64, ky: i64) -> usize {
        self.axis_index(kx) * self.modes + self.axis_index(ky)
    }

    /// Frequency vector of a flat spectral index.
    pub fn frequency(&self, flat: usize) -> [f64; 2] {
        let (kx, ky) = self.mode(flat);
        let dk = self.frequency_step();
        [kx as f64 * dk, ky as f64 * dk]
    }

    /// `|xi|^2` of a flat spectral index, from integer arithmetic.
    pub fn frequency_sq(&self, flat: usize) -> f64 {
        let (kx, ky) = self.mode(flat);
        let dk = self.frequency_step();
        ((kx * kx + ky * ky) as f64) * dk * dk
    }

    pub fn is_nyquist(&self, flat: usize) -> bool {
        let (kx, ky) = self.mode(flat);
        let nyq = -(self.modes as i64 / 2);
        kx == nyq || ky == nyq
    }

    /// Largest integer wavenumber kept by the 2/3 rule: the largest `K < M/3`.
    pub fn dealias_cutoff(&self) -> i64 {
        (self.modes as i64 - 1) / 3
    }

    /// Whether a flat spectral index survives dealiasing.
    pub fn is_active(&self, flat: usize) -> bool {
        let (kx, ky) = self.mode(flat);
        let cut = self.dealias_cutoff();
        kx.abs() <= cut && ky.abs() <= cut
    }

    /// Flat indices of all active (dealiased) modes, in layout order.
    pub fn active_modes(&self) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.is_active(i)).collect()
    }

    /// Physical coordinates of the grid point with flat index `flat`.
    pub fn point(&self, flat: usize) -> [f64; 2] {
        let h = self.spacing();
        [
            (flat / self.modes) as f64 * h,
            (flat % self.modes) as f64 * h,
        ]
    }
}

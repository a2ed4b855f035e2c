//! Periodic-grid geometry, transforms, Fourier multipliers and norms.

pub(crate) mod fft;
mod field;
mod grid;
mod ops;
pub mod snapshot;

pub use field::{Field2D, Representation};
pub use grid::GridSpec;
pub use ops::{
    apply_multiplier, curl, dealias, divergence, gradient, gradient_norm_sq, l2_norm_sq_spectral,
    lambda, lambda_inv, lambda_inv_sq, laplacian, lp_norm, mean, modulus_sq, product, sobolev_norm,
    zero_nyquist,
};

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::error::Error;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_field(grid: GridSpec, rng: &mut ChaCha8Rng) -> Field2D {
        let data = (0..grid.len())
            .map(|_| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        Field2D::from_parts(grid, data, Representation::Physical).unwrap()
    }

    /// Naive O(M^4) DFT, independent of the FFT path.
    fn naive_coefficients(f: &Field2D) -> Vec<Complex64> {
        let g = *f.grid();
        let m = g.modes();
        let phys = f.physical();
        (0..g.len())
            .map(|k| {
                let (kx, ky) = g.mode(k);
                let mut acc = c(0.0, 0.0);
                for p in 0..g.len() {
                    let (i, j) = ((p / m) as i64, (p % m) as i64);
                    let phase = -2.0 * PI * ((kx * i + ky * j) as f64) / m as f64;
                    acc += phys.data()[p] * Complex64::from_polar(1.0, phase);
                }
                acc / (m * m) as f64
            })
            .collect()
    }

    #[test]
    fn constant_field_has_only_zero_mode() {
        let g = GridSpec::new(16, 3.0).unwrap();
        let f = Field2D::constant(g, c(2.0, -1.0)).to_spectral().unwrap();
        assert!((f.data()[0] - c(2.0, -1.0)).norm() < 1e-14);
        assert!(f.data()[1..].iter().all(|z| z.norm() < 1e-14));
    }

    #[test]
    fn plane_wave_has_single_coefficient() {
        let g = GridSpec::new(16, 2.0 * PI * 3.0).unwrap();
        let f = Field2D::plane_wave(g, 3, -2, c(0.5, 0.25))
            .to_spectral()
            .unwrap();
        let idx = g.flat_index(3, -2);
        for (i, z) in f.data().iter().enumerate() {
            let expect = if i == idx { c(0.5, 0.25) } else { c(0.0, 0.0) };
            assert!((z - expect).norm() < 1e-13, "mode {:?}", g.mode(i));
        }
    }

    #[test]
    fn fft_matches_naive_dft() {
        let g = GridSpec::new(8, 1.7).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f = random_field(g, &mut rng);
        let fast = f.to_spectral().unwrap();
        for (a, b) in fast.data().iter().zip(naive_coefficients(&f)) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn round_trip_is_identity() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for m in [8, 16, 64] {
            let g = GridSpec::new(m, 5.0).unwrap();
            let f = random_field(g, &mut rng);
            let back = f.to_spectral().unwrap().to_physical().unwrap();
            let err = back.sub(&f).unwrap().max_abs();
            assert!(err <= 1e-12 * f.max_abs(), "M={m}: {err}");
        }
    }

    #[test]
    fn wrong_tag_is_an_error() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let phys = Field2D::zeros(g, Representation::Physical);
        let spec = Field2D::zeros(g, Representation::Spectral);
        assert!(matches!(
            phys.to_physical(),
            Err(Error::WrongRepresentation { .. })
        ));
        assert!(spec.to_spectral().is_err());
        assert!(apply_multiplier(&phys, |_| c(1.0, 0.0)).is_err());
    }

    #[test]
    fn parseval_holds_for_random_fields() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let g = GridSpec::new(32, 7.0).unwrap();
        for _ in 0..100 {
            let f = random_field(g, &mut rng);
            let quad = lp_norm(&f, 2.0).unwrap().powi(2);
            let spec = l2_norm_sq_spectral(&f);
            assert!((quad - spec).abs() <= 1e-12 * spec);
        }
    }

    #[test]
    fn identity_and_laplacian_symbols() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let f = Field2D::plane_wave(g, 2, 5, c(1.0, 0.0))
            .to_spectral()
            .unwrap();
        let same = apply_multiplier(&f, |_| c(1.0, 0.0)).unwrap();
        assert_eq!(same, f);

        let minus_lap = apply_multiplier(&f, |xi| c(xi[0] * xi[0] + xi[1] * xi[1], 0.0)).unwrap();
        let expect = f.scale(c(29.0, 0.0));
        assert!(minus_lap.sub(&expect).unwrap().max_abs() < 1e-12);
        let lap = laplacian(&f);
        assert!(lap.add(&expect).unwrap().max_abs() < 1e-12);
    }

    #[test]
    fn non_finite_symbol_is_rejected() {
        let g = GridSpec::new(8, 1.0).unwrap();
        let f = Field2D::zeros(g, Representation::Spectral);
        let err = apply_multiplier(&f, |xi| c(1.0 / xi[0].hypot(xi[1]), 0.0)).unwrap_err();
        assert!(matches!(err, Error::NonFiniteSymbol { kx: 0, ky: 0 }));
    }

    #[test]
    fn sobolev_norm_matches_direct_lattice_sum() {
        let g = GridSpec::new(8, 4.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let f = random_field(g, &mut rng);
        let coeffs = naive_coefficients(&f);
        for s in [0.0, 0.6, 1.0, 2.5] {
            let mut direct = 0.0;
            for (idx, z) in coeffs.iter().enumerate() {
                let [a, b] = g.frequency(idx);
                direct += (1.0 + a * a + b * b).powf(s) * z.norm_sqr();
            }
            let direct = (g.area() * direct).sqrt();
            let via_multiplier = {
                let spec = f.to_spectral().unwrap();
                let weighted = apply_multiplier(&spec, |xi| {
                    c((1.0 + xi[0] * xi[0] + xi[1] * xi[1]).powf(s / 2.0), 0.0)
                })
                .unwrap();
                lp_norm(&weighted, 2.0).unwrap()
            };
            assert!((sobolev_norm(&f, s) - direct).abs() < 1e-12 * direct);
            assert!((via_multiplier - direct).abs() < 1e-12 * direct);
        }
    }

    #[test]
    fn plane_wave_norms() {
        let l = 2.0 * PI * 2.0;
        let g = GridSpec::new(16, l).unwrap();
        let a = c(0.3, -0.4);
        let f = Field2D::plane_wave(g, 1, 3, a);
        let xi_sq = g.frequency_sq(g.flat_index(1, 3));
        assert!((lp_norm(&f, 2.0).unwrap().powi(2) - a.norm_sqr() * l * l).abs() < 1e-12);
        let hs = sobolev_norm(&f, 0.7).powi(2);
        let expect = a.norm_sqr() * l * l * (1.0 + xi_sq).powf(0.7);
        assert!((hs - expect).abs() < 1e-12 * expect);
        assert!((lp_norm(&f, f64::INFINITY).unwrap() - 0.5).abs() < 1e-14);
        assert!(lp_norm(&f, 0.5).is_err());
        assert!(lp_norm(&f, f64::NAN).is_err());
    }

    #[test]
    fn gaussian_l2_norm_matches_analytic() {
        // ||exp(-|x-c|^2 / (2 w^2))||^2 = pi w^2 when the box is large.
        let l = 40.0;
        let w = 1.3;
        let g = GridSpec::new(128, l).unwrap();
        let f = Field2D::from_real_fn(g, |x, y| {
            let r2 = (x - l / 2.0).powi(2) + (y - l / 2.0).powi(2);
            (-r2 / (2.0 * w * w)).exp()
        });
        let norm = lp_norm(&f, 2.0).unwrap();
        let exact = (PI * w * w).sqrt();
        assert!((norm - exact).abs() < 1e-8 * exact);
    }

    #[test]
    fn lambda_eigenfunction_and_compositions() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let k = Field2D::plane_wave(g, 3, 4, c(1.0, 0.0));
        let lk = lambda(&k);
        assert!(lk.sub(&k.scale(c(5.0, 0.0))).unwrap().max_abs() < 1e-12);

        let constant = Field2D::constant(g, c(3.0, 1.0));
        assert!(lambda(&constant).max_abs() < 1e-13);

        let mut rng = ChaCha8Rng::seed_from_u64(21);
        let f = zero_nyquist(&random_field(g, &mut rng)).spectral();
        let back = lambda_inv(&lambda(&f));
        let mut expect = f.clone().into_data();
        expect[0] = c(0.0, 0.0);
        for (a, b) in back.data().iter().zip(&expect) {
            assert!((a - b).norm() < 1e-12);
        }

        let ll = lambda(&lambda(&f));
        let neg_lap = laplacian(&f).scale(c(-1.0, 0.0));
        for (a, b) in ll.data().iter().zip(neg_lap.data()) {
            assert!((a - b).norm() <= 1e-12 * (1.0 + b.norm()));
        }
    }

    #[test]
    fn gradient_of_plane_wave_and_curl_of_gradient() {
        let g = GridSpec::new(16, 4.0).unwrap();
        let f = Field2D::plane_wave(g, 2, -1, c(1.0, 0.0));
        let [fx, fy] = gradient(&f);
        let xi = g.frequency(g.flat_index(2, -1));
        assert!(fx.sub(&f.scale(c(0.0, xi[0]))).unwrap().max_abs() < 1e-12);
        assert!(fy.sub(&f.scale(c(0.0, xi[1]))).unwrap().max_abs() < 1e-12);

        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let h = zero_nyquist(&random_field(g, &mut rng));
        let grad = gradient(&h);
        assert!(curl(&grad).unwrap().max_abs() < 1e-12);
        let div = divergence(&grad).unwrap();
        assert!(div.sub(&laplacian(&h)).unwrap().max_abs() < 1e-10);
    }

    #[test]
    fn real_fields_have_hermitian_spectrum() {
        let g = GridSpec::new(16, 3.0).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let f = random_field(g, &mut rng).real_part();
        let spec = f.spectral();
        assert!(f.hermitian_defect() <= 1e-12 * spec.max_abs());
    }
}

//! The smoothing multiplier `m_N`, the operator `I`, and the correction symbol `sigma`.
//!
//! `m_N(r) = 1` for `r <= N` and `(N / r)^(1 - s)` for `r >= 2N`. On `(N, 2N)`
//! `log m` is the cubic Hermite interpolant in `log r` that matches both
//! branches in value and slope, which keeps `m` positive, nonincreasing and C^1.

use std::f64::consts::LN_2;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::spectral::{apply_multiplier, Field2D};

/// Relative width of the band around `|xi_1| = |xi_2|` where the
/// difference quotients switch to their analytic limit.
pub const SIGMA_SWITCH: f64 = 1e-8;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct IMethodParams {
    cutoff: f64,
    regularity: f64,
}

impl IMethodParams {
    /// `cutoff` is `N > 0` in frequency units, `regularity` is `s` in `(1/2, 1)`.
    pub fn new(cutoff: f64, regularity: f64) -> Result<Self> {
        if !(cutoff.is_finite() && cutoff > 0.0) {
            return Err(Error::InvalidParams(format!(
                "cutoff N must be positive, got {cutoff}"
            )));
        }
        if !(regularity > 0.5 && regularity < 1.0) {
            return Err(Error::InvalidParams(format!(
                "regularity s must lie in (1/2, 1), got {regularity}"
            )));
        }
        Ok(Self { cutoff, regularity })
    }

    /// Skips validation; used to probe the boundary case `s = 1/2`.
    #[cfg(test)]
    pub(crate) fn unchecked(cutoff: f64, regularity: f64) -> Self {
        Self { cutoff, regularity }
    }

    pub fn cutoff(&self) -> f64 {
        self.cutoff
    }

    pub fn regularity(&self) -> f64 {
        self.regularity
    }

    /// Position inside the blend band, `t = log2(r / N)` in `(0, 1)`.
    fn blend_position(&self, r: f64) -> f64 {
        (r / self.cutoff).ln() / LN_2
    }

    /// `m_N(r)`.
    pub fn multiplier(&self, r: f64) -> f64 {
        let n = self.cutoff;
        let decay = 1.0 - self.regularity;
        if r <= n {
            1.0
        } else if r >= 2.0 * n {
            (n / r).powf(decay)
        } else {
            let t = self.blend_position(r);
            (-decay * LN_2 * t * t * (2.0 - t)).exp()
        }
    }

    /// Logarithmic slope `d log m / d log r`, in `[-(1-s) 4/3, 0]`.
    pub fn log_slope(&self, r: f64) -> f64 {
        let n = self.cutoff;
        let decay = 1.0 - self.regularity;
        if r <= n {
            0.0
        } else if r >= 2.0 * n {
            -decay
        } else {
            let t = self.blend_position(r);
            -decay * t * (4.0 - 3.0 * t)
        }
    }

    /// `m_N'(r)`.
    pub fn multiplier_derivative(&self, r: f64) -> f64 {
        if r <= self.cutoff {
            0.0
        } else {
            self.multiplier(r) * self.log_slope(r) / r
        }
    }

    /// `f(r) = r^2 m_N(r)^2`.
    pub fn f_weight(&self, r: f64) -> f64 {
        let m = self.multiplier(r);
        r * r * m * m
    }

    /// `f'(r) = 2 r m^2 (1 + d log m / d log r)`.
    pub fn f_weight_derivative(&self, r: f64) -> f64 {
        let m = self.multiplier(r);
        2.0 * r * m * m * (1.0 + self.log_slope(r))
    }

    /// `f'(r) / (2r)`: the value of `sigma` on the diagonal `|xi_1| = |xi_2| = r`.
    pub fn sigma_diagonal(&self, r: f64) -> f64 {
        if r <= self.cutoff {
            return 1.0;
        }
        let m = self.multiplier(r);
        m * m * (1.0 + self.log_slope(r))
    }

    /// `sigma` from squared moduli.
    pub fn sigma_sq(&self, r1_sq: f64, r2_sq: f64) -> f64 {
        let f1 = r1_sq * self.multiplier(r1_sq.sqrt()).powi(2);
        let f2 = r2_sq * self.multiplier(r2_sq.sqrt()).powi(2);
        self.sigma_from_weights(r1_sq, f1, r2_sq, f2)
    }

    /// `sigma` from squared moduli and precomputed `f` values.
    pub(crate) fn sigma_from_weights(&self, r1_sq: f64, f1: f64, r2_sq: f64, f2: f64) -> f64 {
        let gap = r1_sq - r2_sq;
        if gap.abs() < SIGMA_SWITCH * r1_sq.max(r2_sq).max(1.0) {
            self.sigma_diagonal(0.5 * (r1_sq.sqrt() + r2_sq.sqrt()))
        } else {
            (f1 - f2) / gap
        }
    }

    /// `sigma(xi_1, xi_2) = (|xi_1|^2 m_1^2 - |xi_2|^2 m_2^2) / (|xi_1|^2 - |xi_2|^2)`.
    pub fn sigma(&self, xi1: [f64; 2], xi2: [f64; 2]) -> f64 {
        self.sigma_sq(
            xi1[0] * xi1[0] + xi1[1] * xi1[1],
            xi2[0] * xi2[0] + xi2[1] * xi2[1],
        )
    }

    /// Quartic symbol `|xi_2|^2 (m_23^2 - m_2^2) / (|xi_23|^2 - |xi_2|^2)` from squared moduli.
    ///
    /// On the degenerate set the difference quotient of `g = m^2` is replaced
    /// by its limit, giving `m(r)^2 * d log m / d log r` at the mean modulus.
    pub fn quartic_symbol_sq(&self, r23_sq: f64, r2_sq: f64) -> f64 {
        let g23 = self.multiplier(r23_sq.sqrt()).powi(2);
        let g2 = self.multiplier(r2_sq.sqrt()).powi(2);
        self.quartic_from_weights(r23_sq, g23, r2_sq, g2)
    }

    pub(crate) fn quartic_from_weights(&self, r23_sq: f64, g23: f64, r2_sq: f64, g2: f64) -> f64 {
        let gap = r23_sq - r2_sq;
        if gap.abs() < SIGMA_SWITCH * r23_sq.max(r2_sq).max(1.0) {
            let r = 0.5 * (r23_sq.sqrt() + r2_sq.sqrt());
            self.multiplier(r).powi(2) * self.log_slope(r)
        } else {
            r2_sq * (g23 - g2) / gap
        }
    }
}

/// `I_N u`: coefficientwise `m_N(|xi|) u^(xi)`. Returns a spectral field.
pub fn apply_i(u: &Field2D, params: &IMethodParams) -> Field2D {
    let spec = u.spectral();
    apply_multiplier(&spec, |xi| {
        Complex64::new(params.multiplier(xi[0].hypot(xi[1])), 0.0)
    })
    .expect("m_N is finite")
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    use super::*;
    use crate::spectral::{gradient_norm_sq, sobolev_norm, GridSpec};

    fn p(n: f64, s: f64) -> IMethodParams {
        IMethodParams::new(n, s).unwrap()
    }

    #[test]
    fn parameter_validation() {
        assert!(IMethodParams::new(0.0, 0.75).is_err());
        assert!(IMethodParams::new(1.0, 0.5).is_err());
        assert!(IMethodParams::new(1.0, 1.0).is_err());
        assert!(IMethodParams::new(1.0, 0.51).is_ok());
    }

    #[test]
    fn multiplier_branches() {
        let q = p(3.0, 0.7);
        assert_eq!(q.multiplier(1.5), 1.0);
        assert_eq!(q.multiplier(3.0), 1.0);
        // s = 1/2 sits on the boundary of the admissible range, so build it directly.
        let half = IMethodParams {
            cutoff: 1.0,
            regularity: 0.5,
        };
        assert!((half.multiplier(4.0) - 0.5).abs() < 1e-15);
        assert!((half.f_weight(4.0) - 4.0).abs() < 1e-14);
        assert_eq!(q.f_weight(2.0), 4.0);
    }

    #[test]
    fn multiplier_is_nonincreasing_and_f_nondecreasing() {
        for s in [0.51, 0.6, 0.75, 0.9, 0.99] {
            let q = p(2.0, s);
            let mut prev_m = f64::INFINITY;
            let mut prev_f = -1.0;
            for i in 0..=200_000 {
                let r = 200.0 * i as f64 / 200_000.0;
                let m = q.multiplier(r);
                let f = q.f_weight(r);
                assert!(m > 0.0 && m <= 1.0);
                assert!(m <= prev_m, "m increases at r={r}, s={s}");
                assert!(f >= prev_f, "f decreases at r={r}, s={s}");
                prev_m = m;
                prev_f = f;
            }
        }
    }

    #[test]
    fn multiplier_and_weight_are_c1_at_the_seams() {
        let h = 1e-7;
        for s in [0.6, 0.75, 0.9] {
            let q = p(1.7, s);
            for r0 in [q.cutoff, 2.0 * q.cutoff] {
                for g in [
                    |q: &IMethodParams, r| q.multiplier(r),
                    |q: &IMethodParams, r| q.f_weight(r),
                ] {
                    let left = (g(&q, r0) - g(&q, r0 - h)) / h;
                    let right = (g(&q, r0 + h) - g(&q, r0)) / h;
                    let scale = left.abs().max(right.abs()).max(1.0);
                    assert!(
                        (left - right).abs() <= 1e-6 * scale,
                        "s={s} r0={r0}: {left} vs {right}"
                    );
                }
            }
            // Analytic derivatives agree with central differences inside each branch.
            for r in [0.5, 2.0, 2.9, 5.0, 40.0] {
                let fd = (q.f_weight(r + 1e-6) - q.f_weight(r - 1e-6)) / 2e-6;
                assert!((fd - q.f_weight_derivative(r)).abs() < 1e-6 * fd.abs().max(1.0));
                let fd = (q.multiplier(r + 1e-6) - q.multiplier(r - 1e-6)) / 2e-6;
                assert!((fd - q.multiplier_derivative(r)).abs() < 1e-7);
            }
        }
    }

    #[test]
    fn sigma_examples() {
        let q = p(2.0, 0.8);
        assert_eq!(q.sigma([1.0, 0.5], [0.3, -1.2]), 1.0);
        assert_eq!(q.sigma([1.0, 0.0], [1.0, 0.0]), 1.0);
        assert_eq!(q.sigma([0.0, 0.0], [0.0, 0.0]), 1.0);
        assert_eq!(q.sigma([0.0, 0.0], [2.0, 0.0]), 1.0);

        // r1 = r2 = 4N with s = 1/2: limit s (N/r)^{2(1-s)} = 0.125.
        let half = IMethodParams {
            cutoff: 1.0,
            regularity: 0.5,
        };
        let on_diag = half.sigma([4.0, 0.0], [0.0, 4.0]);
        assert!((on_diag - 0.125).abs() < 1e-15);
        let near = half.sigma([4.0, 0.0], [4.0 * (1.0 + 1e-6), 0.0]);
        assert!((near - 0.125).abs() < 1e-6);
    }

    #[test]
    fn sigma_is_identically_one_below_cutoff() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for n in [4.0, 8.0, 16.0, 32.0] {
            let q = p(n, 0.75);
            for _ in 0..10_000 {
                let a = rng.random_range(0.0..n);
                let b = rng.random_range(0.0..n);
                let th1 = rng.random_range(0.0..2.0 * PI);
                let th2 = rng.random_range(0.0..2.0 * PI);
                let s = q.sigma(
                    [a * th1.cos(), a * th1.sin()],
                    [b * th2.cos(), b * th2.sin()],
                );
                assert_eq!(s, 1.0);
            }
        }
    }

    #[test]
    fn sigma_is_bounded_uniformly_in_n() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let mut sup: f64 = 0.0;
        for s in [0.6, 0.75, 0.9] {
            for n in [4.0, 8.0, 16.0, 32.0] {
                let q = p(n, s);
                for _ in 0..100_000 {
                    let r1 = rng.random_range(0.0..50.0 * n);
                    let r2 = if rng.random_bool(0.5) {
                        rng.random_range(0.0..50.0 * n)
                    } else {
                        r1 * (1.0 + rng.random_range(-1e-3..1e-3))
                    };
                    sup = sup.max(q.sigma_sq(r1 * r1, r2 * r2).abs());
                }
            }
        }
        assert!(sup <= 4.0, "sup |sigma| = {sup}");
    }

    #[test]
    fn sigma_is_continuous_across_the_switch() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let q = p(4.0, 0.7);
        for _ in 0..10_000 {
            let r1 = rng.random_range(0.1..200.0);
            let th = rng.random_range(0.0..2.0 * PI);
            let xi1 = [r1 * th.cos(), r1 * th.sin()];
            // xi2 on the diagonal and xi2' displaced by 1e-6 relative, straddling the switch.
            let phi = rng.random_range(0.0..2.0 * PI);
            let xi2 = [r1 * phi.cos(), r1 * phi.sin()];
            let r2p = r1 * (1.0 + rng.random_range(-1e-6..1e-6));
            let xi2p = [r2p * phi.cos(), r2p * phi.sin()];
            let d = (q.sigma(xi1, xi2) - q.sigma(xi1, xi2p)).abs();
            assert!(d <= 1e-4, "jump {d} at r1={r1}");
        }
    }

    #[test]
    fn weight_derivative_bound_holds_with_absolute_constant() {
        for s in [0.55, 0.75, 0.95] {
            for n in [1.0, 4.0, 32.0] {
                let q = p(n, s);
                let mut sup: f64 = 0.0;
                for i in 0..20_000 {
                    let r = n * (1.0 + 99.0 * i as f64 / 20_000.0);
                    let bound = n.powf(2.0 * (1.0 - s)) * r.powf(2.0 * s - 1.0);
                    sup = sup.max(q.f_weight_derivative(r).abs() / bound);
                }
                assert!(sup <= 2.5, "s={s} N={n}: {sup}");
            }
        }
    }

    #[test]
    fn quartic_symbol_limit_matches_quotient() {
        let q = p(2.0, 0.75);
        for r in [1.0, 2.5, 3.5, 6.0, 30.0] {
            let limit = q.quartic_symbol_sq(r * r, r * r);
            let r2 = r * (1.0 + 1e-6);
            let quotient = q.quartic_symbol_sq(r2 * r2, r * r);
            assert!(
                (limit - quotient).abs() < 1e-5,
                "r={r}: {limit} vs {quotient}"
            );
        }
        assert_eq!(q.quartic_symbol_sq(1.0, 3.0), 0.0);
    }

    #[test]
    fn apply_i_examples() {
        let g = GridSpec::new(16, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let data = (0..g.len())
            .map(|_| Complex64::new(rng.random_range(-1.0..1.0), 0.0))
            .collect();
        let u = Field2D::from_parts(g, data, crate::spectral::Representation::Physical).unwrap();
        // Every mode is below N = Nyquist * sqrt(2).
        let q = p(g.nyquist_frequency() * 2f64.sqrt(), 0.7);
        assert_eq!(apply_i(&u, &q), u.spectral());

        // |xi0| = 4N with s = 1/2 halves the amplitude.
        let half = IMethodParams {
            cutoff: 1.0,
            regularity: 0.5,
        };
        let w = Field2D::plane_wave(g, 4, 0, Complex64::new(1.0, 0.0));
        let iw = apply_i(&w, &half);
        let c = iw.coefficient(4, 0).unwrap();
        assert!((c - Complex64::new(0.5, 0.0)).norm() < 1e-14);
    }

    #[test]
    fn i_maps_hs_into_h1() {
        let g = GridSpec::new(32, 2.0 * PI).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100 {
            let n = rng.random_range(1.0..8.0);
            let s = rng.random_range(0.55..0.95);
            let q = p(n, s);
            let data: Vec<Complex64> = (0..g.len())
                .map(|_| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let u =
                Field2D::from_parts(g, data, crate::spectral::Representation::Physical).unwrap();
            let iu = apply_i(&u, &q);
            let h1_iu = sobolev_norm(&iu, 1.0);
            assert!(h1_iu <= sobolev_norm(&u, 1.0) * (1.0 + 1e-12));
            assert!(h1_iu <= 1.1 * n.powf(1.0 - s) * sobolev_norm(&u, s));
            assert!(gradient_norm_sq(&iu) <= gradient_norm_sq(&u) * (1.0 + 1e-12));
        }
    }

    proptest! {
        #[test]
        fn sigma_is_symmetric(
            a in 0.0f64..400.0, b in 0.0f64..400.0,
            th1 in 0.0f64..6.3, th2 in 0.0f64..6.3,
            n in 0.5f64..40.0, s in 0.51f64..0.99,
        ) {
            let q = p(n, s);
            let x = [a * th1.cos(), a * th1.sin()];
            let y = [b * th2.cos(), b * th2.sin()];
            prop_assert_eq!(q.sigma(x, y), q.sigma(y, x));
        }

        #[test]
        fn sigma_lies_in_unit_interval(r1 in 0.0f64..500.0, r2 in 0.0f64..500.0, n in 0.5f64..40.0, s in 0.51f64..0.99) {
            let v = p(n, s).sigma_sq(r1 * r1, r2 * r2);
            prop_assert!(v > 0.0 && v <= 1.0 + 1e-12);
        }
    }
}

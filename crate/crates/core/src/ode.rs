//! Explicit Runge-Kutta integrators: adaptive Dormand-Prince 5(4) and classical RK4.

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Vector space operations needed by the integrators.
pub trait OdeState: Clone {
    /// `self += a * x`.
    fn axpy(&mut self, a: f64, x: &Self);
    /// RMS of `err_i / (atol + rtol * max(|y0_i|, |y1_i|))`.
    fn scaled_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64;
}

impl OdeState for Vec<f64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn scaled_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let n = err.len().max(1) as f64;
        let sum: f64 = err
            .iter()
            .zip(y0.iter().zip(y1))
            .map(|(e, (a, b))| (e / (atol + rtol * a.abs().max(b.abs()))).powi(2))
            .sum();
        (sum / n).sqrt()
    }
}

impl OdeState for Vec<Complex64> {
    fn axpy(&mut self, a: f64, x: &Self) {
        for (s, v) in self.iter_mut().zip(x) {
            *s += a * v;
        }
    }

    fn scaled_error(err: &Self, y0: &Self, y1: &Self, atol: f64, rtol: f64) -> f64 {
        let n = err.len().max(1) as f64;
        let sum: f64 = err
            .iter()
            .zip(y0.iter().zip(y1))
            .map(|(e, (a, b))| e.norm_sqr() / (atol + rtol * a.norm().max(b.norm())).powi(2))
            .sum();
        (sum / n).sqrt()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct AdaptiveOptions {
    pub atol: f64,
    pub rtol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub min_step: f64,
    pub max_steps: usize,
}

impl AdaptiveOptions {
    pub fn with_tolerance(tol: f64) -> Self {
        Self {
            atol: tol,
            rtol: tol,
            initial_step: 1e-3,
            max_step: f64::INFINITY,
            min_step: 1e-14,
            max_steps: 10_000_000,
        }
    }
}

/// Returned by the step observer to continue or stop the integration.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Control {
    Continue,
    Stop,
}

#[derive(Clone, Debug)]
pub struct Solution<S> {
    pub t: f64,
    pub y: S,
    pub accepted: usize,
    pub rejected: usize,
}

const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [
        19372.0 / 6561.0,
        -25360.0 / 2187.0,
        64448.0 / 6561.0,
        -212.0 / 729.0,
        0.0,
        0.0,
    ],
    [
        9017.0 / 3168.0,
        -355.0 / 33.0,
        46732.0 / 5247.0,
        49.0 / 176.0,
        -5103.0 / 18656.0,
        0.0,
    ],
    [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
    ],
];
/// Fifth-order weights minus embedded fourth-order weights.
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

/// One Dormand-Prince step; returns the fifth-order solution and the error estimate.
pub fn dopri5_step<S, F>(f: &mut F, t: f64, y: &S, h: f64) -> (S, S)
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let mut k: Vec<S> = Vec::with_capacity(7);
    k.push(f(t, y));
    for stage in 1..7 {
        let mut ys = y.clone();
        for (j, kj) in k.iter().enumerate() {
            let a = A[stage][j];
            if a != 0.0 {
                ys.axpy(h * a, kj);
            }
        }
        if stage == 6 {
            // The last stage point is the new solution (first-same-as-last).
            let k7 = f(t + h, &ys);
            k.push(k7);
            let mut err = y.clone();
            err.axpy(-1.0, y);
            for (j, kj) in k.iter().enumerate() {
                if E[j] != 0.0 {
                    err.axpy(h * E[j], kj);
                }
            }
            return (ys, err);
        }
        k.push(f(t + C[stage] * h, &ys));
    }
    unreachable!()
}

/// Adaptive integration from `t0` to `t1` (either direction).
///
/// `observe` sees every accepted `(t, y)`, including the initial point, and may stop early.
pub fn dopri5<S, F, O>(
    mut f: F,
    t0: f64,
    y0: S,
    t1: f64,
    opts: &AdaptiveOptions,
    mut observe: O,
) -> Result<Solution<S>>
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
    O: FnMut(f64, &S) -> Control,
{
    let dir = if t1 >= t0 { 1.0 } else { -1.0 };
    let mut t = t0;
    let mut y = y0;
    let mut h = opts
        .initial_step
        .abs()
        .min(opts.max_step)
        .min((t1 - t0).abs());
    let (mut accepted, mut rejected) = (0, 0);
    if observe(t, &y) == Control::Stop {
        return Ok(Solution {
            t,
            y,
            accepted,
            rejected,
        });
    }
    while (t1 - t) * dir > 0.0 {
        if accepted + rejected >= opts.max_steps {
            return Err(Error::Integrator(format!(
                "step budget exhausted at t = {t}"
            )));
        }
        let remaining = (t1 - t).abs();
        let last = h >= remaining;
        let step = if last { remaining } else { h };
        let (y_new, err) = dopri5_step(&mut f, t, &y, dir * step);
        let e = S::scaled_error(&err, &y, &y_new, opts.atol, opts.rtol);
        if !e.is_finite() {
            rejected += 1;
            h = step * 0.2;
        } else if e <= 1.0 {
            t = if last { t1 } else { t + dir * step };
            y = y_new;
            accepted += 1;
            let factor = if e == 0.0 {
                5.0
            } else {
                (0.9 * e.powf(-0.2)).clamp(0.2, 5.0)
            };
            h = (step * factor).min(opts.max_step);
            if observe(t, &y) == Control::Stop {
                break;
            }
        } else {
            rejected += 1;
            h = step * (0.9 * e.powf(-0.2)).clamp(0.2, 1.0);
        }
        if h < opts.min_step {
            return Err(Error::Integrator(format!("step size underflow at t = {t}")));
        }
    }
    Ok(Solution {
        t,
        y,
        accepted,
        rejected,
    })
}

/// One classical fourth-order Runge-Kutta step; `h` may be negative.
pub fn rk4_step<S, F>(f: &mut F, t: f64, y: &S, h: f64) -> S
where
    S: OdeState,
    F: FnMut(f64, &S) -> S,
{
    let k1 = f(t, y);
    let mut y2 = y.clone();
    y2.axpy(0.5 * h, &k1);
    let k2 = f(t + 0.5 * h, &y2);
    let mut y3 = y.clone();
    y3.axpy(0.5 * h, &k2);
    let k3 = f(t + 0.5 * h, &y3);
    let mut y4 = y.clone();
    y4.axpy(h, &k3);
    let k4 = f(t + h, &y4);
    let mut out = y.clone();
    out.axpy(h / 6.0, &k1);
    out.axpy(h / 3.0, &k2);
    out.axpy(h / 3.0, &k3);
    out.axpy(h / 6.0, &k4);
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn exp_rhs(_t: f64, y: &Vec<f64>) -> Vec<f64> {
        y.clone()
    }

    #[test]
    fn exponential_growth_to_tolerance() {
        let opts = AdaptiveOptions::with_tolerance(1e-10);
        let sol = dopri5(exp_rhs, 0.0, vec![1.0], 2.0, &opts, |_, _| {
            Control::Continue
        })
        .unwrap();
        assert_eq!(sol.t, 2.0);
        assert!((sol.y[0] - 2f64.exp()).abs() < 1e-8);
    }

    #[test]
    fn backward_integration() {
        let opts = AdaptiveOptions::with_tolerance(1e-11);
        let sol = dopri5(exp_rhs, 1.0, vec![1f64.exp()], 0.0, &opts, |_, _| {
            Control::Continue
        })
        .unwrap();
        assert!((sol.y[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn harmonic_oscillator_complex() {
        // y' = i y has solution e^{it}.
        let f = |_t: f64, y: &Vec<Complex64>| y.iter().map(|z| Complex64::i() * z).collect();
        let opts = AdaptiveOptions::with_tolerance(1e-12);
        let sol = dopri5(
            f,
            0.0,
            vec![Complex64::new(1.0, 0.0)],
            10.0,
            &opts,
            |_, _| Control::Continue,
        )
        .unwrap();
        assert!((sol.y[0] - Complex64::from_polar(1.0, 10.0)).norm() < 1e-9);
    }

    #[test]
    fn dopri_local_error_is_fifth_order() {
        // y' = cos t: one step error scales like h^6.
        let err = |h: f64| {
            let mut f = |t: f64, _y: &Vec<f64>| vec![t.cos()];
            let (y, _) = dopri5_step(&mut f, 0.3, &vec![0.3f64.sin()], h);
            (y[0] - (0.3 + h).sin()).abs()
        };
        let ratio = err(0.2) / err(0.1);
        assert!(ratio > 40.0, "ratio {ratio}");
    }

    #[test]
    fn observer_can_stop() {
        let opts = AdaptiveOptions::with_tolerance(1e-8);
        let sol = dopri5(exp_rhs, 0.0, vec![1.0], 10.0, &opts, |_, y| {
            if y[0] > 100.0 {
                Control::Stop
            } else {
                Control::Continue
            }
        })
        .unwrap();
        assert!(sol.y[0] > 100.0 && sol.t < 10.0);
    }

    #[test]
    fn rk4_is_fourth_order() {
        let run = |n: usize| {
            let h = 1.0 / n as f64;
            let mut y = vec![1.0];
            for i in 0..n {
                y = rk4_step(&mut exp_rhs, i as f64 * h, &y, h);
            }
            (y[0] - 1f64.exp()).abs()
        };
        let ratio = run(10) / run(20);
        assert!((ratio - 16.0).abs() < 1.5, "ratio {ratio}");
    }
}

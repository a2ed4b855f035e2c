//! The ground state `Q` of `Delta Q - Q + Q^3 = 0` in the plane, its mass
//! `||Q||^2`, and the sharp Gagliardo-Nirenberg inequality it governs.

mod variational;

use std::f64::consts::PI;
use std::io::{Read, Write};
use std::sync::OnceLock;

use num_complex::Complex64;

pub use variational::{variational_ground_state, VariationalGroundState};

use crate::energy::mass;
use crate::error::{Error, Result};
use crate::ode::{dopri5, AdaptiveOptions, Control};
use crate::spectral::{gradient_norm_sq, lp_norm, Field2D, GridSpec};

/// Radius up to which the series expansion at the origin is used.
const SERIES_RADIUS: f64 = 1e-3;
/// Spacing of the stored radial mesh.
const MESH_STEP: f64 = 1e-2;
/// The profile ends once `Q < TAIL_CUTOFF * Q(0)`.
const TAIL_CUTOFF: f64 = 1e-10;
/// Initial bracket for `Q(0)`.
const BRACKET: (f64, f64) = (2.0, 2.3);

/// Radial ground-state profile on a uniform mesh starting at `r = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialProfile {
    pub radii: Vec<f64>,
    pub values: Vec<f64>,
    /// `Q'(r)` at the mesh points.
    pub derivatives: Vec<f64>,
    /// `2 pi int Q^2 r dr`.
    pub l2_norm_sq: f64,
    /// Radius beyond which the profile is the matched `K_0` tail.
    pub shooting_radius: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Shot {
    /// `Q` turns upward while positive: `Q(0)` too small.
    Under,
    /// `Q` crosses zero: `Q(0)` too large.
    Over,
}

/// `y = (Q, Q', mass)` with `mass' = 2 pi r Q^2`.
fn rhs(r: f64, y: &Vec<f64>) -> Vec<f64> {
    vec![
        y[1],
        -y[1] / r + y[0] - y[0].powi(3),
        2.0 * PI * r * y[0] * y[0],
    ]
}

/// State at the series radius for centre value `a`.
fn series_start(a: f64) -> Vec<f64> {
    let c = -a * (a * a - 1.0) / 4.0;
    let r = SERIES_RADIUS;
    // The mass integrand is 2 pi r a^2 to leading order.
    vec![a + c * r * r, 2.0 * c * r, PI * a * a * r * r]
}

fn shoot_options(tol: f64) -> AdaptiveOptions {
    let mut o = AdaptiveOptions::with_tolerance((tol * 1e-2).max(1e-13));
    o.initial_step = 1e-4;
    o.max_step = 0.05;
    o
}

fn classify(a: f64, tol: f64) -> Result<Shot> {
    let mut out = None;
    dopri5(
        rhs,
        SERIES_RADIUS,
        series_start(a),
        40.0,
        &shoot_options(tol),
        |_, y| {
            if y[0] < 0.0 {
                out = Some(Shot::Over);
                Control::Stop
            } else if y[1] > 0.0 {
                out = Some(Shot::Under);
                Control::Stop
            } else {
                Control::Continue
            }
        },
    )?;
    out.ok_or(Error::BracketNotFound)
}

/// `K_0(x)` for `x > 0` from `int_0^inf exp(-x cosh t) dt` by the trapezoid rule,
/// which converges geometrically for this integrand.
pub fn bessel_k0(x: f64) -> f64 {
    let h: f64 = 0.02;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let term = (-x * t.cosh()).exp();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        t += h;
    }
    sum * h
}

/// `K_0'(x) = -K_1(x) = -int_0^inf exp(-x cosh t) cosh t dt`.
fn bessel_k0_derivative(x: f64) -> f64 {
    let h: f64 = 0.02;
    let mut sum = 0.5 * (-x).exp();
    let mut t = h;
    loop {
        let term = (-x * t.cosh()).exp() * t.cosh();
        sum += term;
        if term < 1e-18 * sum {
            break;
        }
        t += h;
    }
    -sum * h
}

/// Solves for `Q` by shooting on `Q(0)` until the bracket is narrower than `tol`.
pub fn solve_ground_state(tol: f64) -> Result<RadialProfile> {
    if !(1e-12..=1e-4).contains(&tol) {
        return Err(Error::InvalidParams(format!(
            "shooting tolerance must lie in [1e-12, 1e-4], got {tol}"
        )));
    }
    let (mut lo, mut hi) = BRACKET;
    if classify(lo, tol)? != Shot::Under || classify(hi, tol)? != Shot::Over {
        return Err(Error::BracketNotFound);
    }
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        match classify(mid, tol)? {
            Shot::Under => lo = mid,
            Shot::Over => hi = mid,
        }
    }
    build_profile(lo, hi, tol)
}

/// Integrates mesh segment by mesh segment from centre value `a`, stopping
/// when `a` and its bracket partner `b` disagree or the solution stops decaying.
fn build_profile(lo: f64, hi: f64, tol: f64) -> Result<RadialProfile> {
    let a = 0.5 * (lo + hi);
    let opts = shoot_options(tol);
    let advance = |y: Vec<f64>, r0: f64, r1: f64| -> Result<Vec<f64>> {
        Ok(dopri5(rhs, r0, y, r1, &opts, |_, _| Control::Continue)?.y)
    };
    let mut radii = vec![0.0];
    let mut values = vec![a];
    let mut derivatives = vec![0.0];
    let (mut ya, mut yl, mut yh) = (series_start(a), series_start(lo), series_start(hi));
    let mut r = SERIES_RADIUS;
    let mut i = 1usize;
    loop {
        let next = i as f64 * MESH_STEP;
        let ya_next = advance(ya.clone(), r, next)?;
        let yl_next = advance(yl.clone(), r, next)?;
        let yh_next = advance(yh.clone(), r, next)?;
        let spread = (yl_next[0] - yh_next[0]).abs();
        if spread > 1e-7 * ya_next[0].abs() || ya_next[1] >= 0.0 || ya_next[0] <= 0.0 {
            break;
        }
        radii.push(next);
        values.push(ya_next[0]);
        derivatives.push(ya_next[1]);
        ya = ya_next;
        yl = yl_next;
        yh = yh_next;
        r = next;
        i += 1;
    }
    if radii.len() < 100 {
        return Err(Error::Integrator(format!(
            "shooting solution degenerated at r = {r}"
        )));
    }
    let shooting_radius = r;
    let mut l2 = ya[2];
    // Matched tail A K_0(r), continuous in value at the shooting radius.
    let amp = ya[0] / bessel_k0(shooting_radius);
    let q0 = values[0];
    let mut tail_mass = 0.0;
    let mut prev = (shooting_radius, ya[0]);
    loop {
        let next = i as f64 * MESH_STEP;
        let q = amp * bessel_k0(next);
        // Simpson on each tail cell for 2 pi int Q^2 r dr.
        let mid = 0.5 * (prev.0 + next);
        let qm = amp * bessel_k0(mid);
        tail_mass += 2.0 * PI * (next - prev.0) / 6.0
            * (prev.0 * prev.1 * prev.1 + 4.0 * mid * qm * qm + next * q * q);
        radii.push(next);
        values.push(q);
        derivatives.push(amp * bessel_k0_derivative(next));
        prev = (next, q);
        i += 1;
        if q < TAIL_CUTOFF * q0 {
            break;
        }
    }
    // Remaining tail beyond the last mesh point, with K_0(r) ~ sqrt(pi / 2r) e^{-r}.
    let r_end = prev.0;
    tail_mass += PI * prev.1 * prev.1 * r_end / 2.0;
    l2 += tail_mass;
    Ok(RadialProfile {
        radii,
        values,
        derivatives,
        l2_norm_sq: l2,
        shooting_radius,
    })
}

impl RadialProfile {
    pub fn center_value(&self) -> f64 {
        self.values[0]
    }

    fn step(&self) -> f64 {
        self.radii[1] - self.radii[0]
    }

    /// `Q(r)` by cubic Hermite interpolation; zero beyond the last radius.
    pub fn value_at(&self, r: f64) -> f64 {
        let r = r.abs();
        let h = self.step();
        let last = *self.radii.last().expect("non-empty profile");
        if r >= last {
            return 0.0;
        }
        let i = ((r / h) as usize).min(self.radii.len() - 2);
        let t = (r - self.radii[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (d0, d1) = (self.derivatives[i] * h, self.derivatives[i + 1] * h);
        let t2 = t * t;
        let t3 = t2 * t;
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0
            + (t3 - 2.0 * t2 + t) * d0
            + (-2.0 * t3 + 3.0 * t2) * y1
            + (t3 - t2) * d1
    }

    /// `Q(|x - centre|)` sampled on the grid, centred in the box.
    pub fn to_field(&self, grid: GridSpec) -> Field2D {
        let c = grid.length() / 2.0;
        Field2D::from_real_fn(grid, |x, y| self.value_at((x - c).hypot(y - c)))
    }

    /// Largest `|Q'' + Q'/r - Q + Q^3|` over mesh points, with `Q''` from
    /// fourth-order central differences of `Q'` within each segment.
    pub fn residual(&self) -> f64 {
        let h = self.step();
        let n = self.radii.len();
        let split = (self.shooting_radius / h).round() as usize;
        let mut worst: f64 = 0.0;
        for (lo, hi) in [(0usize, split), (split, n - 1)] {
            if hi < lo + 4 {
                continue;
            }
            for i in (lo + 2).max(2)..=(hi - 2) {
                let r = self.radii[i];
                if r == 0.0 {
                    continue;
                }
                let d = &self.derivatives;
                let qpp = (-d[i + 2] + 8.0 * d[i + 1] - 8.0 * d[i - 1] + d[i - 2]) / (12.0 * h);
                let q = self.values[i];
                worst = worst.max((qpp + d[i] / r - q + q * q * q).abs());
            }
        }
        worst
    }

    /// Two-column CSV `r,Q`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        wtr.write_record(["r", "Q"])?;
        for (r, q) in self.radii.iter().zip(&self.values) {
            wtr.write_record([r.to_string(), q.to_string()])?;
        }
        wtr.flush()?;
        Ok(())
    }

    /// Reads `(r, Q)` pairs written by [`RadialProfile::write_csv`].
    pub fn read_csv<R: Read>(r: R) -> Result<Vec<(f64, f64)>> {
        let mut rdr = csv::Reader::from_reader(r);
        let mut out = Vec::new();
        for rec in rdr.records() {
            let rec = rec?;
            let parse = |i: usize| -> Result<f64> {
                rec.get(i)
                    .and_then(|s| s.parse().ok())
                    .ok_or_else(|| Error::Snapshot(format!("bad profile row {rec:?}")))
            };
            out.push((parse(0)?, parse(1)?));
        }
        Ok(out)
    }
}

/// Ground state solved once with tolerance `1e-11` and cached.
pub fn ground_state() -> Result<&'static RadialProfile> {
    static CACHE: OnceLock<RadialProfile> = OnceLock::new();
    if let Some(p) = CACHE.get() {
        return Ok(p);
    }
    let p = solve_ground_state(1e-11)?;
    Ok(CACHE.get_or_init(|| p))
}

/// `||Q||^2`, the mass threshold.
pub fn townes_mass() -> Result<f64> {
    Ok(ground_state()?.l2_norm_sq)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GnCheck {
    /// `(1/2) ||u||_4^4`
    pub lhs: f64,
    /// `(||u||^2 / ||Q||^2) ||grad u||^2`
    pub rhs: f64,
    /// `lhs / rhs`, zero for `u = 0`.
    pub ratio: f64,
}

/// Both sides of the sharp Gagliardo-Nirenberg inequality for `u`.
pub fn gn_check(u: &Field2D) -> Result<GnCheck> {
    let q_mass = townes_mass()?;
    let lhs = 0.5 * lp_norm(u, 4.0)?.powi(4);
    let rhs = mass(u) / q_mass * gradient_norm_sq(u);
    let ratio = if lhs == 0.0 { 0.0 } else { lhs / rhs };
    Ok(GnCheck { lhs, rhs, ratio })
}

/// Margins within this distance of zero count as on the threshold.
pub const THRESHOLD_TOLERANCE: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum MassClass {
    Below,
    /// At or above `||Q||^2`, within [`THRESHOLD_TOLERANCE`].
    AtOrAbove,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ThresholdCheck {
    pub class: MassClass,
    pub mass: f64,
    pub threshold: f64,
    /// `1 - mass / ||Q||^2`.
    pub margin: f64,
}

pub fn mass_threshold_check(u0: &Field2D) -> Result<ThresholdCheck> {
    let threshold = townes_mass()?;
    let m = mass(u0);
    let margin = 1.0 - m / threshold;
    Ok(ThresholdCheck {
        class: if margin > THRESHOLD_TOLERANCE {
            MassClass::Below
        } else {
            MassClass::AtOrAbove
        },
        mass: m,
        threshold,
        margin,
    })
}

/// `u` rescaled by a real factor so that `||u||^2 = target`.
pub fn with_mass(u: &Field2D, target: f64) -> Field2D {
    let m = mass(u);
    if m == 0.0 {
        return u.clone();
    }
    u.scale(Complex64::new((target / m).sqrt(), 0.0))
}

#[cfg(test)]
mod tests;

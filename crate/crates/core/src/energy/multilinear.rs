//! Direct lattice sums over the hyperplanes `xi_1 + .. + xi_k = 0`.
//!
//! Coefficients follow the `Field2D` convention, so a product of fields is a
//! plain convolution of coefficients and `int f dx = L^2 f^(0)`. Every sum
//! below is therefore multiplied by `L^2` once at the end.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::imethod::IMethodParams;
use crate::spectral::{Field2D, GridSpec};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Execution policy and size guard shared by the multilinear functionals.
#[derive(Clone, Copy, Debug)]
pub struct MultilinearOptions {
    pub exec: Execution,
    /// Largest admissible `M`; the trilinear sums cost `O(M^4)`.
    pub max_modes: usize,
}

impl Default for MultilinearOptions {
    fn default() -> Self {
        Self {
            exec: Execution::default(),
            max_modes: 64,
        }
    }
}

impl MultilinearOptions {
    pub fn sequential() -> Self {
        Self {
            exec: Execution::Sequential,
            ..Self::default()
        }
    }

    pub(crate) fn check(&self, grid: &GridSpec) -> Result<()> {
        if grid.modes() > self.max_modes {
            Err(Error::BudgetExceeded {
                modes: grid.modes(),
                limit: self.max_modes,
            })
        } else {
            Ok(())
        }
    }
}

/// Which density enters the quartic term of the time derivative.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum QuarticFactor {
    /// `n = (n_+ + n_-) / 2`, the field that multiplies `u` in the Schroedinger equation.
    #[default]
    Density,
    /// `n_+` in both slots, for comparison.
    PlusComponent,
}

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub enum QuarticMode {
    /// Factorized exact evaluation, `O(M^4)`.
    #[default]
    Exact,
    /// Uniform sampling of admissible frequency triples.
    MonteCarlo { samples: usize, seed: u64 },
}

/// A lattice mode with its precomputed symbol data.
#[derive(Clone, Copy, Debug)]
pub(crate) struct Mode {
    pub kx: i64,
    pub ky: i64,
    /// `|xi|^2`
    pub r_sq: f64,
    /// `m(|xi|)`
    pub m: f64,
    /// `f = |xi|^2 m^2`
    pub f: f64,
    pub coeff: Complex64,
}

/// Square window of integer modes `|kx|, |ky| <= half` stored densely.
#[derive(Clone, Debug)]
pub(crate) struct Window {
    half: i64,
    side: usize,
    data: Vec<Complex64>,
}

impl Window {
    pub(crate) fn new(half: i64) -> Self {
        let side = (2 * half + 1) as usize;
        Self {
            half,
            side,
            data: vec![ZERO; side * side],
        }
    }

    fn slot(&self, kx: i64, ky: i64) -> Option<usize> {
        if kx.abs() <= self.half && ky.abs() <= self.half {
            Some((kx + self.half) as usize * self.side + (ky + self.half) as usize)
        } else {
            None
        }
    }

    #[inline]
    pub(crate) fn get(&self, kx: i64, ky: i64) -> Complex64 {
        self.slot(kx, ky).map_or(ZERO, |i| self.data[i])
    }

    pub(crate) fn set(&mut self, kx: i64, ky: i64, v: Complex64) {
        let i = self.slot(kx, ky).expect("mode inside window");
        self.data[i] = v;
    }

    /// Loads the coefficients of `f` restricted to the window.
    pub(crate) fn from_field(f: &Field2D, half: i64) -> Self {
        let spec = f.spectral();
        let g = f.grid();
        let mut w = Self::new(half);
        for kx in -half..=half {
            for ky in -half..=half {
                w.set(kx, ky, spec.data()[g.flat_index(kx, ky)]);
            }
        }
        w
    }

    /// `conj(c(-xi))`: the coefficients of the complex conjugate field.
    pub(crate) fn conjugate_field(&self) -> Self {
        let mut out = Self::new(self.half);
        for kx in -self.half..=self.half {
            for ky in -self.half..=self.half {
                out.set(kx, ky, self.get(-kx, -ky).conj());
            }
        }
        out
    }

    pub(crate) fn half(&self) -> i64 {
        self.half
    }
}

/// Half-width of the full symmetric lattice (all modes except Nyquist).
pub(crate) fn lattice_half(grid: &GridSpec) -> i64 {
    grid.modes() as i64 / 2 - 1
}

/// Nonzero modes of `f` inside the window of half-width `half`, with symbol data.
pub(crate) fn support(f: &Field2D, half: i64, params: &IMethodParams) -> Vec<Mode> {
    let spec = f.spectral();
    let g = f.grid();
    let dk = g.frequency_step();
    let mut out = Vec::new();
    for kx in -half..=half {
        for ky in -half..=half {
            let coeff = spec.data()[g.flat_index(kx, ky)];
            if coeff == ZERO {
                continue;
            }
            let r_sq = ((kx * kx + ky * ky) as f64) * dk * dk;
            let m = params.multiplier(r_sq.sqrt());
            out.push(Mode {
                kx,
                ky,
                r_sq,
                m,
                f: r_sq * m * m,
                coeff,
            });
        }
    }
    out
}

/// `sum_{xi, eta} S(xi, eta) a(xi) conj(a(eta)) w(eta - xi)` over the support of `a`,
/// with `eta - xi` restricted to the window of `w`.
pub(crate) fn trilinear<S>(modes: &[Mode], w: &Window, exec: Execution, symbol: S) -> Complex64
where
    S: Fn(&Mode, &Mode) -> f64 + Sync + Send,
{
    let partial = exec.map(modes.len(), |i| {
        let xi = &modes[i];
        let mut acc = ZERO;
        for eta in modes {
            let c = w.get(eta.kx - xi.kx, eta.ky - xi.ky);
            if c == ZERO {
                continue;
            }
            let s = symbol(xi, eta);
            if s != 0.0 {
                acc += eta.coeff.conj() * c * s;
            }
        }
        xi.coeff * acc
    });
    partial.into_iter().sum()
}

/// Coefficients of the real density `n = (n_+ + conj n_+) / 2` on a window.
pub(crate) fn density_window(n_plus: &Field2D, half: i64) -> Window {
    let b = Window::from_field(n_plus, half);
    let bc = b.conjugate_field();
    let mut out = Window::new(half);
    for kx in -half..=half {
        for ky in -half..=half {
            out.set(kx, ky, 0.5 * (b.get(kx, ky) + bc.get(kx, ky)));
        }
    }
    out
}

/// The three trilinear `Sigma_3` sums needed by the modified and refined energies.
#[derive(Clone, Copy, Debug)]
pub struct TrilinearTerms {
    /// `(1/2) int_{Sigma_3} m_1 m_2 u^ conj-u^ (n_+ + conj n_+)^`
    pub product_symbol: f64,
    /// Same with `sigma` in place of `m_1 m_2`.
    pub sigma_symbol: f64,
    /// Same with `m_1 m_2 - sigma`, summed directly.
    pub difference_symbol: f64,
}

fn real_part_checked(z: Complex64, scale: f64, what: &'static str) -> Result<f64> {
    if z.im.abs() > 1e-10 * scale.max(f64::MIN_POSITIVE) && z.im.abs() > 1e-14 {
        return Err(Error::NotReal {
            what,
            residue: z.im.abs() / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(z.re)
}

/// Evaluates the `Sigma_3` sums of the refined and modified energies on the full lattice.
pub fn trilinear_terms(
    u: &Field2D,
    n_plus: &Field2D,
    params: &IMethodParams,
    opts: &MultilinearOptions,
) -> Result<TrilinearTerms> {
    let grid = *u.grid();
    opts.check(&grid)?;
    if n_plus.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let half = lattice_half(&grid);
    let modes = support(u, half, params);
    let n = density_window(n_plus, half);
    let area = grid.area();

    // Upper bound for |sum| with |symbol| <= 1, used to judge the imaginary residue.
    let abs_scale = modes.iter().map(|m| m.coeff.norm_sqr()).sum::<f64>()
        * n.data.iter().map(|z| z.norm()).sum::<f64>();
    // One pass for all three symbols; sigma is the expensive part.
    let partial = opts.exec.map(modes.len(), |i| {
        let xi = &modes[i];
        let mut acc = [ZERO; 3];
        for eta in &modes {
            let c = n.get(eta.kx - xi.kx, eta.ky - xi.ky);
            if c == ZERO {
                continue;
            }
            let w = eta.coeff.conj() * c;
            let mm = xi.m * eta.m;
            let sigma = params.sigma_from_weights(xi.r_sq, xi.f, eta.r_sq, eta.f);
            acc[0] += w * mm;
            acc[1] += w * sigma;
            acc[2] += w * (mm - sigma);
        }
        acc.map(|z| xi.coeff * z)
    });
    let [product, sigma, difference] = partial
        .into_iter()
        .fold([ZERO; 3], |a, b| [a[0] + b[0], a[1] + b[1], a[2] + b[2]]);
    Ok(TrilinearTerms {
        product_symbol: area * real_part_checked(product, abs_scale, "trilinear m1 m2 sum")?,
        sigma_symbol: area * real_part_checked(sigma, abs_scale, "trilinear sigma sum")?,
        difference_symbol: area
            * real_part_checked(difference, abs_scale, "trilinear difference sum")?,
    })
}

/// Split of the time derivative of the refined energy into its parts.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RefinedEnergyRate {
    /// The two `Sigma_3` terms with symbol `-+ (i/2)(1 - sigma)|xi_3|`.
    pub trilinear: f64,
    /// `2 Im int_{Sigma_4} |xi_2|^2 (m_23^2 - m_2^2) / (|xi_23|^2 - |xi_2|^2) u^ conj-u^ n^ n^`.
    pub quartic: f64,
    pub total: f64,
    /// Standard error of the quartic term in Monte Carlo mode.
    pub quartic_std_error: Option<f64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RateOptions {
    pub multilinear: MultilinearOptions,
    pub factor: QuarticFactor,
    pub mode: QuarticMode,
}

/// Time derivative of the refined energy along the dealiased (Galerkin) flow.
///
/// All frequencies, including the intermediate `xi_2 + xi_3`, are restricted
/// to the 2/3-rule active set, which is exactly the flow the split-step and
/// reference integrators discretize.
pub fn refined_energy_rate(
    u: &Field2D,
    n_plus: &Field2D,
    params: &IMethodParams,
    opts: &RateOptions,
) -> Result<RefinedEnergyRate> {
    let grid = *u.grid();
    opts.multilinear.check(&grid)?;
    if n_plus.grid() != &grid {
        return Err(Error::GridMismatch);
    }
    let exec = opts.multilinear.exec;
    let half = grid.dealias_cutoff();
    let area = grid.area();
    let modes = support(u, half, params);

    // (n_+ - conj n_+)^ carries the wave-frequency factor of both Sigma_3 terms.
    let b = Window::from_field(n_plus, half);
    let bc = b.conjugate_field();
    let mut odd = Window::new(half);
    for kx in -half..=half {
        for ky in -half..=half {
            odd.set(kx, ky, b.get(kx, ky) - bc.get(kx, ky));
        }
    }
    let dk = grid.frequency_step();
    let tri = trilinear(&modes, &odd, exec, |xi, eta| {
        let (dx, dy) = (eta.kx - xi.kx, eta.ky - xi.ky);
        let xi3 = dk * ((dx * dx + dy * dy) as f64).sqrt();
        (1.0 - params.sigma_from_weights(xi.r_sq, xi.f, eta.r_sq, eta.f)) * xi3
    });
    let trilinear_value = area * (Complex64::new(0.0, 0.5) * tri).re;

    let nu = match opts.factor {
        QuarticFactor::Density => density_window(n_plus, half),
        QuarticFactor::PlusComponent => b.clone(),
    };
    let (quartic, std_error) = match opts.mode {
        QuarticMode::Exact => (
            area * 2.0 * quartic_exact(&grid, &modes, &nu, params, exec).im,
            None,
        ),
        QuarticMode::MonteCarlo { samples, seed } => {
            let (mean, se) = quartic_monte_carlo(&grid, u, &nu, params, samples, seed);
            (area * 2.0 * mean, Some(area * 2.0 * se))
        }
    };
    Ok(RefinedEnergyRate {
        trilinear: trilinear_value,
        quartic,
        total: trilinear_value + quartic,
        quartic_std_error: std_error,
    })
}

/// `sum_{Sigma_4} Q(xi_23, xi_2) u^(xi_1) conj-u^(xi_2) nu^(xi_3) nu^(xi_4)`.
///
/// The symbol depends on `xi_2` and `xi_23` only, so the `xi_1` sum folds into
/// the convolution `(nu u)^(-xi_23)`, computed first on the active set.
fn quartic_exact(
    grid: &GridSpec,
    modes: &[Mode],
    nu: &Window,
    params: &IMethodParams,
    exec: Execution,
) -> Complex64 {
    let half = nu.half();
    let dk = grid.frequency_step();
    let side = (2 * half + 1) as usize;
    // Active modes xi (the Schroedinger output frequency) with (nu u)^(xi).
    let outputs: Vec<(i64, i64, f64, f64, Complex64)> = exec
        .map(side * side, |slot| {
            let kx = slot as i64 / side as i64 - half;
            let ky = slot as i64 % side as i64 - half;
            let mut acc = ZERO;
            for a in modes {
                acc += nu.get(kx - a.kx, ky - a.ky) * a.coeff;
            }
            let r_sq = ((kx * kx + ky * ky) as f64) * dk * dk;
            let m = params.multiplier(r_sq.sqrt());
            (kx, ky, r_sq, m * m, acc)
        })
        .into_iter()
        .filter(|o| o.4 != ZERO)
        .collect();
    let partial = exec.map(outputs.len(), |i| {
        let (kx, ky, r23_sq, g23, prod) = outputs[i];
        let mut acc = ZERO;
        for eta in modes {
            let c = nu.get(eta.kx - kx, eta.ky - ky);
            if c == ZERO {
                continue;
            }
            let q = params.quartic_from_weights(r23_sq, g23, eta.r_sq, eta.m * eta.m);
            acc += eta.coeff.conj() * c * q;
        }
        prod * acc
    });
    partial.into_iter().sum()
}

/// Monte Carlo estimate of `Im` of the quartic sum with its standard error.
fn quartic_monte_carlo(
    grid: &GridSpec,
    u: &Field2D,
    nu: &Window,
    params: &IMethodParams,
    samples: usize,
    seed: u64,
) -> (f64, f64) {
    let half = nu.half();
    let a = Window::from_field(u, half);
    let dk = grid.frequency_step();
    let side = 2 * half + 1;
    let volume = (side * side) as f64;
    let volume = volume * volume * volume;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        (
            rng.random_range(-half..=half),
            rng.random_range(-half..=half),
        )
    };
    let (mut sum, mut sum_sq) = (0.0, 0.0);
    for _ in 0..samples {
        let (x1, y1) = draw(&mut rng);
        let (x2, y2) = draw(&mut rng);
        let (x3, y3) = draw(&mut rng);
        let (x4, y4) = (-(x1 + x2 + x3), -(y1 + y2 + y3));
        let (x23, y23) = (x2 + x3, y2 + y3);
        let mut term = 0.0;
        if x4.abs() <= half && y4.abs() <= half && x23.abs() <= half && y23.abs() <= half {
            let r2_sq = ((x2 * x2 + y2 * y2) as f64) * dk * dk;
            let r23_sq = ((x23 * x23 + y23 * y23) as f64) * dk * dk;
            let q = params.quartic_symbol_sq(r23_sq, r2_sq);
            let z = a.get(x1, y1) * a.get(-x2, -y2).conj() * nu.get(x3, y3) * nu.get(x4, y4) * q;
            term = z.im * volume;
        }
        sum += term;
        sum_sq += term * term;
    }
    let n = samples.max(1) as f64;
    let mean = sum / n;
    let var = (sum_sq / n - mean * mean).max(0.0);
    (mean, (var / n).sqrt())
}

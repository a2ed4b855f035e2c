//! Mass, Hamiltonians, the modified and refined energies, and the refined
//! energy's time derivative.

mod ledger;
mod multilinear;

pub use ledger::{load_ledger, read_ledger, save_ledger, write_ledger, EnergyLedger};
pub use multilinear::{
    refined_energy_rate, trilinear_terms, MultilinearOptions, QuarticFactor, QuarticMode,
    RateOptions, RefinedEnergyRate, TrilinearTerms,
};

use crate::dynamics::WaveState;
use crate::error::{Error, Result};
use crate::imethod::{apply_i, IMethodParams};
use crate::spectral::{gradient_norm_sq, l2_norm_sq_spectral, Field2D};

/// `||u||_{L^2}^2`.
pub fn mass(u: &Field2D) -> f64 {
    l2_norm_sq_spectral(u)
}

/// `int n |u|^2 dx` with `n` taken as the real part of `n`, by grid quadrature.
fn cubic_term(n: &Field2D, u: &Field2D) -> f64 {
    let n = n.physical();
    let u = u.physical();
    let sum: f64 = n
        .data()
        .iter()
        .zip(u.data())
        .map(|(a, b)| a.re * b.norm_sqr())
        .sum();
    n.grid().cell_area() * sum
}

fn check_real(f: &Field2D, what: &'static str) -> Result<()> {
    let scale = f.physical().max_abs();
    let residue = f.max_imag();
    if residue > 1e-9 * scale.max(f64::MIN_POSITIVE) && residue > 1e-300 {
        return Err(Error::NotReal {
            what,
            residue: residue / scale.max(f64::MIN_POSITIVE),
        });
    }
    Ok(())
}

/// `H(u, n, v) = ||grad u||^2 + (||n||^2 + ||v||^2) / 2 + int n |u|^2`.
pub fn hamiltonian_unv(u: &Field2D, n: &Field2D, v: &[Field2D; 2]) -> Result<f64> {
    check_real(n, "density n")?;
    check_real(&v[0], "velocity v_x")?;
    check_real(&v[1], "velocity v_y")?;
    Ok(gradient_norm_sq(u) + 0.5 * (mass(n) + mass(&v[0]) + mass(&v[1])) + cubic_term(n, u))
}

/// `H(u, n_+) = ||grad u||^2 + ||n_+||^2 / 2 + (1/2) int (n_+ + conj n_+) |u|^2`.
pub fn hamiltonian_pm(u: &Field2D, n_plus: &Field2D) -> f64 {
    gradient_norm_sq(u) + 0.5 * mass(n_plus) + cubic_term(n_plus, u)
}

/// `H(Iu, n_+)`.
pub fn modified_energy(u: &Field2D, n_plus: &Field2D, params: &IMethodParams) -> f64 {
    hamiltonian_pm(&apply_i(u, params), n_plus)
}

/// The refined energy: `H(Iu, n_+)` with `m_1 m_2` replaced by `sigma` in the cubic term.
///
/// The cubic term is a direct `O(M^4)` sum over lattice pairs; pairs whose
/// third frequency falls outside the lattice are dropped.
pub fn refined_energy(
    u: &Field2D,
    n_plus: &Field2D,
    params: &IMethodParams,
    opts: &MultilinearOptions,
) -> Result<f64> {
    let terms = trilinear_terms(u, n_plus, params, opts)?;
    Ok(gradient_norm_sq(&apply_i(u, params)) + 0.5 * mass(n_plus) + terms.sigma_symbol)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FixedTimeDifference {
    pub modified: f64,
    pub refined: f64,
    /// `modified - refined`.
    pub by_subtraction: f64,
    /// `(1/2) int_{Sigma_3} (m_1 m_2 - sigma) ...` summed directly; free of cancellation.
    pub direct: f64,
}

/// Relative agreement required between the two evaluations of `H(Iu,n_+) - H~`.
pub const FIXED_TIME_TOLERANCE: f64 = 1e-9;

/// `H(Iu, n_+) - H~(u, n_+)`, by subtraction and by the direct `Sigma_3` sum.
///
/// Inputs must be band-limited to the dealiased set so that grid quadrature of
/// the cubic term equals the lattice sum; otherwise the two routes disagree and
/// [`Error::SymbolMismatch`] is returned.
pub fn fixed_time_difference(
    u: &Field2D,
    n_plus: &Field2D,
    params: &IMethodParams,
    opts: &MultilinearOptions,
) -> Result<FixedTimeDifference> {
    let terms = trilinear_terms(u, n_plus, params, opts)?;
    let iu = apply_i(u, params);
    let quadratic = gradient_norm_sq(&iu) + 0.5 * mass(n_plus);
    let cubic = cubic_term(n_plus, &iu);
    let modified = quadratic + cubic;
    let refined = quadratic + terms.sigma_symbol;
    let by_subtraction = modified - refined;
    let direct = terms.difference_symbol;
    let scale = quadratic.abs() + cubic.abs() + terms.sigma_symbol.abs();
    if (by_subtraction - direct).abs() > FIXED_TIME_TOLERANCE * scale {
        return Err(Error::SymbolMismatch {
            direct,
            by_subtraction,
        });
    }
    Ok(FixedTimeDifference {
        modified,
        refined,
        by_subtraction,
        direct,
    })
}

/// `d/dt H~(u, n_+)` for the given state.
pub fn refined_energy_time_derivative(
    state: &WaveState,
    params: &IMethodParams,
    opts: &RateOptions,
) -> Result<RefinedEnergyRate> {
    refined_energy_rate(&state.u, &state.n_plus, params, opts)
}

/// Coercivity of `H(u, n_+)` below the ground-state mass.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Coercivity {
    pub epsilon: f64,
    /// `||grad u||^2 + ||n_+||^2 <= c0 H(u, n_+)`.
    pub c0: f64,
}

/// Best `(epsilon, c0)` for `mass_ratio = ||u||^2 / ||Q||^2 < 1`.
///
/// With `mu = mass_ratio`, `H >= (1 - mu/eps)||grad u||^2 + (1 - eps)/2 ||n_+||^2`
/// for any `mu < eps < 1`; the two coefficients balance at
/// `eps = (sqrt(1 + 8 mu) - 1) / 2`, giving `c0 = 2 / (1 - eps)`.
pub fn coercivity_constant(mass_ratio: f64) -> Option<Coercivity> {
    if !(0.0..1.0).contains(&mass_ratio) {
        return None;
    }
    let epsilon = ((1.0 + 8.0 * mass_ratio).sqrt() - 1.0) / 2.0;
    Some(Coercivity {
        epsilon,
        c0: 2.0 / (1.0 - epsilon),
    })
}

/// Fills a ledger row for `state`.
pub fn ledger_row(
    state: &WaveState,
    params: &IMethodParams,
    opts: &MultilinearOptions,
) -> Result<EnergyLedger> {
    let phys = state.to_physical_state()?;
    let h_unv = hamiltonian_unv(&phys.u, &phys.n, &phys.v)?;
    let diff = fixed_time_difference(&state.u, &state.n_plus, params, opts)?;
    let lam_inv_nt = state.lambda_inv_nt();
    Ok(EnergyLedger {
        t: state.t,
        mass: mass(&state.u),
        h_unv,
        h_pm: hamiltonian_pm(&state.u, &state.n_plus),
        h_modified: diff.modified,
        h_refined: diff.refined,
        fixed_time_diff: diff.modified - diff.refined,
        sobolev_u: crate::spectral::sobolev_norm(&state.u, params.regularity()),
        l2_n: mass(&phys.n).sqrt(),
        l2_lam_inv_nt: mass(&lam_inv_nt).sqrt(),
    })
}

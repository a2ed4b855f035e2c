//! The four headline studies and the plain simulation run.
//!
//! Every study has a core function taking explicit inputs, used by tests,
//! and a `run_*` wrapper that reads an [`ExperimentConfig`].

use std::path::Path;

use crate::dynamics::{
    evolve, reference_evolve, step_with, EvolveOptions, StepMode, Trajectory, WaveState,
};
use crate::energy::{
    fixed_time_difference, modified_energy, refined_energy, EnergyLedger, MultilinearOptions,
};
use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::groundstate::{mass_threshold_check, MassClass, ThresholdCheck};
use crate::imethod::{apply_i, IMethodParams};
use crate::spectral::{l2_norm_sq_spectral, snapshot, sobolev_norm};

use super::config::ExperimentConfig;
use super::fit::{envelope, loglog_slope, power_law_fit, PowerFit, SlopeFit};
use super::presets::build_preset;

/// Largest admissible slope of the fixed-time difference against `N`.
pub const FIXED_DIFF_SLOPE_BOUND: f64 = -0.8;
/// Largest admissible slope of the refined-energy increment against `N`.
pub const ALMOST_CONS_SLOPE_BOUND: f64 = -0.4;
/// Required advantage of the refined over the modified increment slope.
pub const ALMOST_CONS_SLOPE_GAP: f64 = 0.3;
/// Slack added to the theorem's growth exponent.
pub const GROWTH_EXPONENT_SLACK: f64 = 0.5;
/// Relative splitting error that defines the local time.
pub const LOCAL_TIME_ERROR: f64 = 0.1;
/// Strang steps used by the splitting solution on `[0, delta]`.
pub const LOCAL_TIME_STEPS: usize = 4;
/// Largest window the local-time search reports.
pub const LOCAL_TIME_CAP: f64 = 1.0;
/// Energy increments below this fraction of the energy are rounding and
/// reported as zero.
pub const INCREMENT_FLOOR: f64 = 1e-12;
/// Scalings of the initial data in the local-time study.
pub const LOCAL_TIME_SCALES: [f64; 4] = [1.0, 2.0, 4.0, 8.0];

/// Initial state from `init.snapshot` if set, otherwise from the preset.
pub fn initial_state(cfg: &ExperimentConfig) -> Result<WaveState> {
    match &cfg.init.snapshot {
        Some(path) => load_snapshot_pair(path),
        None => build_preset(&cfg.init.preset, cfg.grid()?, &cfg.preset_params())?.to_wave_state(),
    }
}

/// Loads `u_<step>.zkf` together with its `nplus_<step>.zkf` sibling.
pub fn load_snapshot_pair(u_path: &Path) -> Result<WaveState> {
    let name = u_path
        .file_name()
        .and_then(|n| n.to_str())
        .and_then(|n| n.strip_prefix("u_"))
        .ok_or_else(|| {
            Error::Snapshot(format!("{} is not a u_<step>.zkf file", u_path.display()))
        })?;
    let (u, t) = snapshot::load(u_path)?;
    let (n_plus, t_plus) = snapshot::load(u_path.with_file_name(format!("nplus_{name}")))?;
    if t != t_plus {
        return Err(Error::Snapshot(format!(
            "snapshot times differ: {t} vs {t_plus}"
        )));
    }
    WaveState::from_plus(t, u, n_plus)
}

fn check_slope(what: &str, fit: &Option<SlopeFit>, bound: f64) -> Result<()> {
    match fit {
        Some(f) if f.assertable() && f.slope > bound => Err(Error::Assertion(format!(
            "{what} slope {:.3} exceeds {bound}",
            f.slope
        ))),
        _ => Ok(()),
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedDiffRow {
    pub cutoff: f64,
    /// `H(Iu, n_+) - H~` from the direct sum.
    pub difference: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixedDiffStudy {
    pub rows: Vec<FixedDiffRow>,
    /// `None` when every difference vanishes.
    pub fit: Option<SlopeFit>,
    pub warnings: Vec<String>,
}

impl FixedDiffStudy {
    pub fn check(&self) -> Result<()> {
        check_slope("fixed-time difference", &self.fit, FIXED_DIFF_SLOPE_BOUND)
    }
}

/// Fixed-time difference at one state for every cutoff in `params`.
pub fn fixed_time_difference_study(
    state: &WaveState,
    params: &[IMethodParams],
    opts: &MultilinearOptions,
) -> Result<FixedDiffStudy> {
    let mut rows = opts
        .exec
        .map(params.len(), |i| {
            fixed_time_difference(&state.u, &state.n_plus, &params[i], opts).map(|d| FixedDiffRow {
                cutoff: params[i].cutoff(),
                difference: d.direct,
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.cutoff.total_cmp(&b.cutoff));
    let ns: Vec<f64> = rows.iter().map(|r| r.cutoff).collect();
    let ds: Vec<f64> = rows.iter().map(|r| r.difference.abs()).collect();
    Ok(FixedDiffStudy {
        fit: loglog_slope(&ns, &ds),
        rows,
        warnings: Vec::new(),
    })
}

pub fn run_fixed_time_difference_study(cfg: &ExperimentConfig) -> Result<FixedDiffStudy> {
    let warnings = cfg.validate()?;
    let state = initial_state(cfg)?;
    let mut study =
        fixed_time_difference_study(&state, &cfg.params_list()?, &MultilinearOptions::default())?;
    study.warnings = warnings;
    Ok(study)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostConsRow {
    pub cutoff: f64,
    /// `|H~(delta) - H~(0)|`.
    pub refined_increment: f64,
    /// `|H(Iu, n_+)(delta) - H(Iu, n_+)(0)|`.
    pub modified_increment: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmostConsStudy {
    pub delta: f64,
    pub rows: Vec<AlmostConsRow>,
    pub refined_fit: Option<SlopeFit>,
    pub modified_fit: Option<SlopeFit>,
    pub warnings: Vec<String>,
}

impl AlmostConsStudy {
    /// Refined slope at most `-0.4` and at least `0.3` below the modified slope.
    pub fn check(&self) -> Result<()> {
        check_slope(
            "refined-energy increment",
            &self.refined_fit,
            ALMOST_CONS_SLOPE_BOUND,
        )?;
        if let (Some(r), Some(m)) = (&self.refined_fit, &self.modified_fit) {
            if r.assertable() && m.assertable() && r.slope > m.slope - ALMOST_CONS_SLOPE_GAP {
                return Err(Error::Assertion(format!(
                    "refined slope {:.3} is not {ALMOST_CONS_SLOPE_GAP} below modified slope {:.3}",
                    r.slope, m.slope
                )));
            }
        }
        Ok(())
    }
}

fn increment(before: f64, after: f64) -> f64 {
    let d = (after - before).abs();
    if d <= INCREMENT_FLOOR * before.abs().max(after.abs()) {
        0.0
    } else {
        d
    }
}

/// Energy increments over `[0, delta]` on one split-step trajectory, for
/// every cutoff in `params`.
pub fn almost_conservation_study(
    state: &WaveState,
    params: &[IMethodParams],
    delta: f64,
    dt: f64,
    opts: &MultilinearOptions,
) -> Result<AlmostConsStudy> {
    let first = params
        .first()
        .ok_or_else(|| Error::InvalidParams("no cutoffs given".to_owned()))?;
    let mut evo = EvolveOptions::new(*first);
    evo.multilinear = *opts;
    let end = evolve(state, delta, dt, 0, &evo)?.final_state;
    let mut rows = opts
        .exec
        .map(params.len(), |i| -> Result<AlmostConsRow> {
            let p = &params[i];
            let r0 = refined_energy(&state.u, &state.n_plus, p, opts)?;
            let r1 = refined_energy(&end.u, &end.n_plus, p, opts)?;
            let m0 = modified_energy(&state.u, &state.n_plus, p);
            let m1 = modified_energy(&end.u, &end.n_plus, p);
            Ok(AlmostConsRow {
                cutoff: p.cutoff(),
                refined_increment: increment(r0, r1),
                modified_increment: increment(m0, m1),
            })
        })
        .into_iter()
        .collect::<Result<Vec<_>>>()?;
    rows.sort_by(|a, b| a.cutoff.total_cmp(&b.cutoff));
    let ns: Vec<f64> = rows.iter().map(|r| r.cutoff).collect();
    let refined: Vec<f64> = rows.iter().map(|r| r.refined_increment).collect();
    let modified: Vec<f64> = rows.iter().map(|r| r.modified_increment).collect();
    Ok(AlmostConsStudy {
        delta,
        refined_fit: loglog_slope(&ns, &refined),
        modified_fit: loglog_slope(&ns, &modified),
        rows,
        warnings: Vec::new(),
    })
}

pub fn run_almost_conservation_study(cfg: &ExperimentConfig) -> Result<AlmostConsStudy> {
    let warnings = cfg.validate()?;
    let state = initial_state(cfg)?;
    let mut study = almost_conservation_study(
        &state,
        &cfg.params_list()?,
        cfg.time.delta,
        cfg.time.dt,
        &MultilinearOptions::default(),
    )?;
    study.warnings = warnings;
    Ok(study)
}

/// `(1 - s) / (2s - 3/2)`, the polynomial growth exponent for `s > 3/4`.
pub fn theorem_exponent(s: f64) -> f64 {
    (1.0 - s) / (2.0 * s - 1.5)
}

#[derive(Clone, Debug)]
pub struct GrowthStudy {
    pub threshold: ThresholdCheck,
    pub ledger: Vec<EnergyLedger>,
    /// Fit of the running maximum of the norm triple; `None` if it is identically zero.
    pub fit: Option<PowerFit>,
    pub theorem_exponent: f64,
    pub max_boundary_fraction: f64,
    pub warnings: Vec<String>,
}

impl GrowthStudy {
    pub fn check(&self) -> Result<()> {
        match self.fit {
            Some(f) if f.alpha > self.theorem_exponent + GROWTH_EXPONENT_SLACK => {
                Err(Error::Assertion(format!(
                    "growth exponent {:.3} exceeds {:.3} + {GROWTH_EXPONENT_SLACK}",
                    f.alpha, self.theorem_exponent
                )))
            }
            _ => Ok(()),
        }
    }
}

/// Long run with the norm triple tracked in the ledger. Refuses `s <= 3/4`
/// and data at or above the ground-state mass.
pub fn growth_study(
    state: &WaveState,
    params: IMethodParams,
    t_final: f64,
    dt: f64,
    ledger_every: usize,
    mode: StepMode,
) -> Result<GrowthStudy> {
    let s = params.regularity();
    if s <= 0.75 {
        return Err(Error::Refused(format!(
            "the polynomial growth bound needs s > 3/4, got s = {s}"
        )));
    }
    let threshold = mass_threshold_check(&state.u)?;
    if threshold.class != MassClass::Below {
        return Err(Error::Refused(format!(
            "mass {:.6} is not below the ground-state mass {:.6}",
            threshold.mass, threshold.threshold
        )));
    }
    let mut opts = EvolveOptions::new(params);
    opts.mode = mode;
    let traj: Trajectory = evolve(state, t_final, dt, ledger_every, &opts)?;
    let ts: Vec<f64> = traj.ledger.iter().map(|r| r.t - state.t).collect();
    let triple: Vec<f64> = traj.ledger.iter().map(|r| r.norm_triple()).collect();
    let mut warnings = Vec::new();
    if traj.boundary_flagged() {
        warnings.push(format!(
            "mass fraction {:.2e} reached the outer frame; periodic images interact",
            traj.max_boundary_fraction
        ));
    }
    Ok(GrowthStudy {
        threshold,
        fit: power_law_fit(&ts, &envelope(&triple)),
        ledger: traj.ledger,
        theorem_exponent: theorem_exponent(s),
        max_boundary_fraction: traj.max_boundary_fraction,
        warnings,
    })
}

pub fn run_growth_study(cfg: &ExperimentConfig) -> Result<GrowthStudy> {
    let warnings = cfg.validate()?;
    let state = initial_state(cfg)?;
    let mut study = growth_study(
        &state,
        cfg.ledger_params()?,
        cfg.time.t_final,
        cfg.time.dt,
        cfg.time.ledger_every,
        StepMode::Full,
    )?;
    study.warnings.extend(warnings);
    Ok(study)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalTimeRow {
    pub scale: f64,
    /// Largest window found, capped at [`LOCAL_TIME_CAP`].
    pub delta: f64,
    /// `||Iu_0||_{H^1} + ||n_+0|| + ||n_-0||`.
    pub norm: f64,
    /// `delta * norm^2`.
    pub ratio: f64,
}

fn relative_distance(a: &WaveState, b: &WaveState) -> Result<f64> {
    let du = l2_norm_sq_spectral(&a.u.sub(&b.u)?);
    let dn = l2_norm_sq_spectral(&a.n_plus.sub(&b.n_plus)?);
    let size = l2_norm_sq_spectral(&b.u) + l2_norm_sq_spectral(&b.n_plus);
    Ok(if size == 0.0 {
        0.0
    } else {
        ((du + dn) / size).sqrt()
    })
}

fn splitting_error(state: &WaveState, delta: f64) -> Result<f64> {
    let reference = reference_evolve(state, delta, 1e-10)?;
    let h = delta / LOCAL_TIME_STEPS as f64;
    let mut s = state.clone();
    for _ in 0..LOCAL_TIME_STEPS {
        s = step_with(&s, h, StepMode::Full)?;
    }
    relative_distance(&s, &reference)
}

/// Largest `delta <= cap` with splitting error at most [`LOCAL_TIME_ERROR`],
/// by halving from the cap and then bisecting.
fn local_time(state: &WaveState, cap: f64) -> Result<f64> {
    let ok = |d: f64| -> Result<bool> {
        // Blow-up inside the splitting solution counts as failure.
        match splitting_error(state, d) {
            Ok(e) => Ok(e <= LOCAL_TIME_ERROR),
            Err(Error::BlowUp { .. }) => Ok(false),
            Err(e) => Err(e),
        }
    };
    if ok(cap)? {
        return Ok(cap);
    }
    let mut bad = cap;
    let mut good = cap / 2.0;
    while !ok(good)? {
        bad = good;
        good /= 2.0;
        if good < 1e-12 {
            return Ok(0.0);
        }
    }
    for _ in 0..12 {
        let mid = 0.5 * (good + bad);
        if ok(mid)? {
            good = mid;
        } else {
            bad = mid;
        }
    }
    Ok(good)
}

/// Exploratory: local time of the splitting scheme for scaled copies of the data.
pub fn local_time_heuristic(
    state: &WaveState,
    params: &IMethodParams,
    scales: &[f64],
) -> Result<Vec<LocalTimeRow>> {
    Execution::default()
        .map(scales.len(), |i| {
            let lam = scales[i].into();
            let scaled = WaveState::new(
                state.t,
                state.u.scale(lam),
                state.n_plus.scale(lam),
                state.n_minus.scale(lam),
            )?;
            let norm = sobolev_norm(&apply_i(&scaled.u, params), 1.0)
                + l2_norm_sq_spectral(&scaled.n_plus).sqrt()
                + l2_norm_sq_spectral(&scaled.n_minus).sqrt();
            let delta = local_time(&scaled, LOCAL_TIME_CAP)?;
            Ok(LocalTimeRow {
                scale: scales[i],
                delta,
                norm,
                ratio: delta * norm * norm,
            })
        })
        .into_iter()
        .collect()
}

pub fn run_local_time_heuristic(cfg: &ExperimentConfig) -> Result<Vec<LocalTimeRow>> {
    cfg.validate()?;
    local_time_heuristic(
        &initial_state(cfg)?,
        &cfg.ledger_params()?,
        &LOCAL_TIME_SCALES,
    )
}

/// Plain evolution with a ledger row every `time.ledger_every` steps and
/// snapshots at the same stride into `<out>/snapshots`.
pub fn run_simulation(cfg: &ExperimentConfig, out: Option<&Path>) -> Result<Trajectory> {
    cfg.validate()?;
    let state = initial_state(cfg)?;
    let mut opts = EvolveOptions::new(cfg.ledger_params()?);
    if let Some(dir) = out {
        opts.snapshots = Some(crate::dynamics::SnapshotSpec {
            dir: dir.join("snapshots"),
            stride: cfg.time.ledger_every,
        });
    }
    evolve(
        &state,
        cfg.time.t_final,
        cfg.time.dt,
        cfg.time.ledger_every,
        &opts,
    )
}

//! Strang splitting for both formulations, and the driver loop.

use std::path::PathBuf;

use num_complex::Complex64;

use super::galerkin::Kernel;
use super::{PhysicalState, WaveState};
use crate::energy::{ledger_row, EnergyLedger, MultilinearOptions};
use crate::error::{Error, Result};
use crate::imethod::IMethodParams;
use crate::spectral::{snapshot, Field2D, Representation};

/// Peak `|u|` or `|n|` beyond which a run is declared blown up.
pub const BLOW_UP_AMPLITUDE: f64 = 1e6;

/// Share of total mass in the outer frame above which a run is flagged as
/// no longer localized.
pub const BOUNDARY_MASS_FLAG: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StepMode {
    #[default]
    Full,
    /// `n_±` forced to zero: free Schroedinger flow for `u`.
    FreeSchrodinger,
}

/// One Strang step of the `(u, n_+, n_-)` system.
pub fn step(state: &WaveState, dt: f64) -> Result<WaveState> {
    step_with(state, dt, StepMode::Full)
}

pub fn step_with(state: &WaveState, dt: f64, mode: StepMode) -> Result<WaveState> {
    let kernel = Kernel::new(*state.grid());
    let mut s = Raw::from_state(state);
    s.step(&kernel, dt, mode)?;
    Ok(s.into_state(&kernel))
}

/// Raw spectral arrays of a wave state, for the inner loop.
struct Raw {
    t: f64,
    u: Vec<Complex64>,
    p: Vec<Complex64>,
    q: Vec<Complex64>,
    max_amplitude: f64,
}

impl Raw {
    fn from_state(s: &WaveState) -> Self {
        Self {
            t: s.t,
            u: s.u.spectral().into_data(),
            p: s.n_plus.spectral().into_data(),
            q: s.n_minus.spectral().into_data(),
            max_amplitude: 0.0,
        }
    }

    fn into_state(self, kernel: &Kernel) -> WaveState {
        let g = kernel.grid;
        let f = |d| Field2D::new_unchecked(g, d, Representation::Spectral);
        WaveState {
            t: self.t,
            u: f(self.u),
            n_plus: f(self.p),
            n_minus: f(self.q),
        }
    }

    fn linear(&mut self, k: &Kernel, tau: f64) {
        k.rotate(&mut self.u, &k.k2, tau);
        k.rotate(&mut self.p, &k.k, tau);
        k.rotate(&mut self.q, &k.k, -tau);
    }

    /// Flow of the nonlinear part `u_t = -i P(n u)`, `n_±t = ∓ i Lambda P|u|^2`.
    ///
    /// Here `n` is constant, so the `u` flow is the exact exponential. The
    /// `n_±` increment uses the trapezoid average of `P|u|^2` over the step,
    /// which keeps the substep symmetric.
    fn nonlinear(&mut self, k: &Kernel, dt: f64) {
        let u_phys = k.to_physical(&self.u);
        let n_spec: Vec<Complex64> = self
            .p
            .iter()
            .zip(&self.q)
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        let n_phys: Vec<f64> = k.to_physical(&n_spec).iter().map(|z| z.re).collect();
        let peak = n_phys.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        self.max_amplitude = u_phys.iter().fold(peak, |m: f64, z| m.max(z.norm()));
        if !(self.max_amplitude <= BLOW_UP_AMPLITUDE) {
            // Reported by the caller; the flow itself would not be resolved.
            return;
        }
        let rho_start = k.density_of(&u_phys);
        self.u = k.phase_flow(&self.u, &n_phys, dt);
        let rho_end = k.density_of(&k.to_physical(&self.u));
        for (i, (p, q)) in self.p.iter_mut().zip(self.q.iter_mut()).enumerate() {
            let kick = Complex64::i() * dt * k.k[i] * 0.5 * (rho_start[i] + rho_end[i]);
            *p -= kick;
            *q += kick;
        }
    }

    fn step(&mut self, k: &Kernel, dt: f64, mode: StepMode) -> Result<()> {
        if !(dt > 0.0 && dt.is_finite()) {
            return Err(Error::InvalidParams(format!(
                "time step must be positive, got {dt}"
            )));
        }
        match mode {
            StepMode::Full => {
                self.linear(k, 0.5 * dt);
                self.nonlinear(k, dt);
                self.linear(k, 0.5 * dt);
            }
            StepMode::FreeSchrodinger => {
                self.p
                    .iter_mut()
                    .chain(self.q.iter_mut())
                    .for_each(|c| *c = 0.0.into());
                k.rotate(&mut self.u, &k.k2, dt);
                self.max_amplitude = k
                    .to_physical(&self.u)
                    .iter()
                    .fold(0.0, |m: f64, z| m.max(z.norm()));
            }
        }
        self.t += dt;
        let finite = |v: &[Complex64]| v.iter().all(|z| z.re.is_finite() && z.im.is_finite());
        if !(self.max_amplitude <= BLOW_UP_AMPLITUDE)
            || !finite(&self.u)
            || !finite(&self.p)
            || !finite(&self.q)
        {
            return Err(Error::BlowUp {
                time: self.t,
                last_row: None,
            });
        }
        Ok(())
    }
}

/// Snapshot output every `stride` steps into `dir` as `u_<step>.zkf` and `nplus_<step>.zkf`.
#[derive(Clone, Debug)]
pub struct SnapshotSpec {
    pub dir: PathBuf,
    pub stride: usize,
}

#[derive(Clone, Debug)]
pub struct EvolveOptions {
    /// Parameters used for the modified and refined energies in the ledger.
    pub params: IMethodParams,
    pub multilinear: MultilinearOptions,
    pub mode: StepMode,
    pub snapshots: Option<SnapshotSpec>,
}

impl EvolveOptions {
    pub fn new(params: IMethodParams) -> Self {
        Self {
            params,
            multilinear: MultilinearOptions::default(),
            mode: StepMode::Full,
            snapshots: None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Trajectory {
    pub final_state: WaveState,
    pub ledger: Vec<EnergyLedger>,
    pub steps: usize,
    /// Largest share of mass found in the outer 10% frame of the box.
    pub max_boundary_fraction: f64,
}

impl Trajectory {
    pub fn boundary_flagged(&self) -> bool {
        self.max_boundary_fraction > BOUNDARY_MASS_FLAG
    }
}

/// Share of `||u||^2` carried by grid points in the outer 10% frame of the box.
pub fn boundary_mass_fraction(u: &Field2D) -> f64 {
    let phys = u.physical();
    let g = *u.grid();
    let m = g.modes();
    let band = (m as f64 * 0.1).ceil() as usize;
    let outer = |i: usize| i < band || i >= m - band;
    let (mut edge, mut total) = (0.0, 0.0);
    for (idx, z) in phys.data().iter().enumerate() {
        let w = z.norm_sqr();
        total += w;
        if outer(idx / m) || outer(idx % m) {
            edge += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        edge / total
    }
}

/// Repeated Strang steps up to `t = T` (the last step is shortened), with a
/// ledger row every `ledger_every` steps (0 disables all but the endpoints).
pub fn evolve(
    state: &WaveState,
    t_final: f64,
    dt: f64,
    ledger_every: usize,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    if !(t_final > 0.0 && t_final.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "final time must be positive, got {t_final}"
        )));
    }
    if !(dt > 0.0 && dt.is_finite()) {
        return Err(Error::InvalidParams(format!(
            "time step must be positive, got {dt}"
        )));
    }
    let kernel = Kernel::new(*state.grid());
    let n_steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let t0 = state.t;
    let mut raw = Raw::from_state(state);
    let mut ledger = vec![ledger_row(state, &opts.params, &opts.multilinear)?];
    let mut max_boundary = boundary_mass_fraction(&state.u);
    if let Some(spec) = &opts.snapshots {
        std::fs::create_dir_all(&spec.dir)?;
        write_snapshot(spec, 0, state)?;
    }
    for i in 1..=n_steps {
        let h = if i == n_steps {
            t0 + t_final - raw.t
        } else {
            dt
        };
        if let Err(e) = raw.step(&kernel, h, opts.mode) {
            return Err(match e {
                Error::BlowUp { time, .. } => Error::BlowUp {
                    time,
                    last_row: ledger.last().cloned().map(Box::new),
                },
                other => other,
            });
        }
        let want_row = i == n_steps || (ledger_every > 0 && i % ledger_every == 0);
        let want_snap = opts
            .snapshots
            .as_ref()
            .is_some_and(|s| s.stride > 0 && i % s.stride == 0);
        if want_row || want_snap {
            let current = Raw {
                t: raw.t,
                u: raw.u.clone(),
                p: raw.p.clone(),
                q: raw.q.clone(),
                max_amplitude: 0.0,
            }
            .into_state(&kernel);
            if want_row {
                ledger.push(ledger_row(&current, &opts.params, &opts.multilinear)?);
                max_boundary = max_boundary.max(boundary_mass_fraction(&current.u));
            }
            if want_snap {
                write_snapshot(opts.snapshots.as_ref().expect("checked"), i, &current)?;
            }
        }
    }
    Ok(Trajectory {
        final_state: raw.into_state(&kernel),
        ledger,
        steps: n_steps,
        max_boundary_fraction: max_boundary,
    })
}

fn write_snapshot(spec: &SnapshotSpec, step: usize, s: &WaveState) -> Result<()> {
    snapshot::save(spec.dir.join(format!("u_{step:06}.zkf")), &s.u, s.t)?;
    snapshot::save(
        spec.dir.join(format!("nplus_{step:06}.zkf")),
        &s.n_plus,
        s.t,
    )
}

/// One Strang step of `i u_t + Delta u = n u`, `n_t = -div v`, `v_t = -grad(n + |u|^2)`.
///
/// The linear half-steps are exact: free Schroedinger for `u` and the wave
/// flow on `(n, longitudinal v)`. The nonlinear step mirrors the wave-form
/// splitting: the exact `u` flow with `n` frozen, and `v -= dt grad P|u|^2`
/// with the trapezoid average of the density.
pub fn step_hamiltonian(state: &PhysicalState, dt: f64) -> Result<PhysicalState> {
    let kernel = Kernel::new(*state.u.grid());
    let mut raw = RawUnv::from_state(state);
    raw.step(&kernel, dt)?;
    Ok(raw.into_state(&kernel))
}

/// Repeated [`step_hamiltonian`] up to `t = T`, last step shortened.
pub fn evolve_hamiltonian(state: &PhysicalState, t_final: f64, dt: f64) -> Result<PhysicalState> {
    if !(t_final > 0.0 && dt > 0.0) {
        return Err(Error::InvalidParams(
            "final time and step must be positive".into(),
        ));
    }
    let kernel = Kernel::new(*state.u.grid());
    let mut raw = RawUnv::from_state(state);
    let n_steps = ((t_final / dt) - 1e-9).ceil().max(1.0) as usize;
    let t_end = state.t + t_final;
    for i in 1..=n_steps {
        let h = if i == n_steps { t_end - raw.t } else { dt };
        raw.step(&kernel, h)?;
    }
    Ok(raw.into_state(&kernel))
}

struct RawUnv {
    t: f64,
    u: Vec<Complex64>,
    n: Vec<Complex64>,
    vx: Vec<Complex64>,
    vy: Vec<Complex64>,
}

impl RawUnv {
    fn from_state(s: &PhysicalState) -> Self {
        Self {
            t: s.t,
            u: s.u.spectral().into_data(),
            n: s.n.spectral().into_data(),
            vx: s.v[0].spectral().into_data(),
            vy: s.v[1].spectral().into_data(),
        }
    }

    fn into_state(self, k: &Kernel) -> PhysicalState {
        let g = k.grid;
        let f = |d| Field2D::new_unchecked(g, d, Representation::Spectral);
        PhysicalState {
            t: self.t,
            u: f(self.u),
            n: f(self.n),
            v: [f(self.vx), f(self.vy)],
        }
    }

    fn linear(&mut self, k: &Kernel, tau: f64) {
        k.rotate(&mut self.u, &k.k2, tau);
        let g = k.grid;
        for idx in 0..g.len() {
            let r = k.k[idx];
            if r == 0.0 {
                continue;
            }
            let [fx, fy] = g.frequency(idx);
            let (ex, ey) = (fx / r, fy / r);
            let n = self.n[idx];
            let p = ex * self.vx[idx] + ey * self.vy[idx];
            let (c, s) = ((r * tau).cos(), (r * tau).sin());
            let i = Complex64::i();
            let n_new = c * n - i * s * p;
            let p_new = -i * s * n + c * p;
            self.n[idx] = n_new;
            self.vx[idx] += (p_new - p) * ex;
            self.vy[idx] += (p_new - p) * ey;
        }
    }

    fn nonlinear(&mut self, k: &Kernel, dt: f64) -> f64 {
        let u_phys = k.to_physical(&self.u);
        let n_phys: Vec<f64> = k.to_physical(&self.n).iter().map(|z| z.re).collect();
        let peak = n_phys.iter().fold(0.0, |m: f64, x| m.max(x.abs()));
        let amplitude = u_phys.iter().fold(peak, |m: f64, z| m.max(z.norm()));
        if !(amplitude <= BLOW_UP_AMPLITUDE) {
            return amplitude;
        }
        let rho_start = k.density_of(&u_phys);
        self.u = k.phase_flow(&self.u, &n_phys, dt);
        let rho_end = k.density_of(&k.to_physical(&self.u));
        let g = k.grid;
        for idx in 0..g.len() {
            let [fx, fy] = g.frequency(idx);
            let r = 0.5 * (rho_start[idx] + rho_end[idx]);
            self.vx[idx] -= dt * Complex64::i() * fx * r;
            self.vy[idx] -= dt * Complex64::i() * fy * r;
        }
        amplitude
    }

    fn step(&mut self, k: &Kernel, dt: f64) -> Result<()> {
        self.linear(k, 0.5 * dt);
        let amplitude = self.nonlinear(k, dt);
        self.linear(k, 0.5 * dt);
        self.t += dt;
        if !(amplitude <= BLOW_UP_AMPLITUDE)
            || self
                .u
                .iter()
                .any(|z| !z.re.is_finite() || !z.im.is_finite())
        {
            return Err(Error::BlowUp {
                time: self.t,
                last_row: None,
            });
        }
        Ok(())
    }
}

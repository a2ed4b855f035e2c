//! Flat `key = value` configuration with dotted section keys.
//!
//! ```text
//! # comment
//! grid.M = 64
//! grid.L = 50.265
//! imethod.N_list = 4, 8, 16, 32
//! ```
//!
//! Unknown keys are errors. Keys not given keep their defaults.

use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::imethod::IMethodParams;
use crate::spectral::GridSpec;

use super::presets::{PresetParams, PRESET_NAMES};

#[derive(Clone, Debug, PartialEq)]
pub struct TimeConfig {
    pub dt: f64,
    pub t_final: f64,
    pub ledger_every: usize,
    /// Evolution window of the almost-conservation study.
    pub delta: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IMethodConfig {
    pub n_list: Vec<f64>,
    pub s: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct InitConfig {
    pub preset: String,
    pub seed: u64,
    pub mass_fraction: f64,
    pub width: Option<f64>,
    /// A `u_<step>.zkf` snapshot; its `nplus_<step>.zkf` sibling supplies `n_+`.
    pub snapshot: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ChecksConfig {
    pub fixed_diff: bool,
    pub almost_cons: bool,
    pub growth: bool,
    pub local_time: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub modes: usize,
    pub length: f64,
    pub time: TimeConfig,
    pub imethod: IMethodConfig,
    pub init: InitConfig,
    pub checks: ChecksConfig,
    pub output_dir: PathBuf,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            modes: 64,
            length: 16.0 * std::f64::consts::PI,
            time: TimeConfig {
                dt: 1e-3,
                t_final: 1.0,
                ledger_every: 100,
                delta: 0.1,
            },
            imethod: IMethodConfig {
                n_list: vec![0.25, 0.5, 1.0, 2.0],
                s: 0.75,
            },
            init: InitConfig {
                preset: "gaussian".to_owned(),
                seed: 0,
                mass_fraction: 0.5,
                width: None,
                snapshot: None,
            },
            checks: ChecksConfig {
                fixed_diff: true,
                almost_cons: true,
                growth: true,
                local_time: true,
            },
            output_dir: PathBuf::from("out"),
        }
    }
}

fn value<T: FromStr>(line: usize, key: &str, raw: &str) -> Result<T> {
    raw.parse().map_err(|_| Error::Config {
        line,
        message: format!("cannot parse `{raw}` for {key}"),
    })
}

fn flag(line: usize, key: &str, raw: &str) -> Result<bool> {
    match raw {
        "true" | "on" | "yes" | "1" => Ok(true),
        "false" | "off" | "no" | "0" => Ok(false),
        _ => Err(Error::Config {
            line,
            message: format!("expected a boolean for {key}, got `{raw}`"),
        }),
    }
}

impl ExperimentConfig {
    /// Parses config text on top of the defaults, then validates it.
    pub fn parse(text: &str) -> Result<Self> {
        let mut cfg = Self::default();
        for (idx, raw_line) in text.lines().enumerate() {
            let line = idx + 1;
            let content = raw_line.split('#').next().unwrap_or("").trim();
            if content.is_empty() {
                continue;
            }
            let (key, raw) = content.split_once('=').ok_or_else(|| Error::Config {
                line,
                message: format!("expected `key = value`, got `{content}`"),
            })?;
            cfg.set(line, key.trim(), raw.trim())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Sets one key; `line` is only used in error messages.
    pub fn set(&mut self, line: usize, key: &str, raw: &str) -> Result<()> {
        match key {
            "grid.M" => self.modes = value(line, key, raw)?,
            "grid.L" => self.length = value(line, key, raw)?,
            "time.dt" => self.time.dt = value(line, key, raw)?,
            "time.T" => self.time.t_final = value(line, key, raw)?,
            "time.ledger_every" => self.time.ledger_every = value(line, key, raw)?,
            "time.delta" => self.time.delta = value(line, key, raw)?,
            "imethod.N_list" => {
                let list = raw.trim_start_matches('[').trim_end_matches(']');
                self.imethod.n_list = list
                    .split(',')
                    .map(|x| value(line, key, x.trim()))
                    .collect::<Result<_>>()?;
            }
            "imethod.s" => self.imethod.s = value(line, key, raw)?,
            "init.preset" => self.init.preset = raw.to_owned(),
            "init.seed" => self.init.seed = value(line, key, raw)?,
            "init.mass_fraction" => self.init.mass_fraction = value(line, key, raw)?,
            "init.width" => self.init.width = Some(value(line, key, raw)?),
            "init.snapshot" => self.init.snapshot = Some(PathBuf::from(raw)),
            "checks.fixed_diff" => self.checks.fixed_diff = flag(line, key, raw)?,
            "checks.almost_cons" => self.checks.almost_cons = flag(line, key, raw)?,
            "checks.growth" => self.checks.growth = flag(line, key, raw)?,
            "checks.local_time" => self.checks.local_time = flag(line, key, raw)?,
            "output.dir" => self.output_dir = PathBuf::from(raw),
            _ => {
                return Err(Error::Config {
                    line,
                    message: format!("unknown key `{key}`"),
                })
            }
        }
        Ok(())
    }

    /// Checks every hard constraint and returns warnings for the soft ones.
    pub fn validate(&self) -> Result<Vec<String>> {
        let grid = self.grid()?;
        let invalid = |m: String| Err(Error::InvalidParams(m));
        if !(self.time.dt > 0.0 && self.time.dt.is_finite()) {
            return invalid(format!("time.dt must be positive, got {}", self.time.dt));
        }
        if !(self.time.t_final > 0.0 && self.time.t_final.is_finite()) {
            return invalid(format!(
                "time.T must be positive, got {}",
                self.time.t_final
            ));
        }
        if !(self.time.delta > 0.0 && self.time.delta.is_finite()) {
            return invalid(format!(
                "time.delta must be positive, got {}",
                self.time.delta
            ));
        }
        if self.imethod.n_list.is_empty() {
            return invalid("imethod.N_list is empty".to_owned());
        }
        for &n in &self.imethod.n_list {
            IMethodParams::new(n, self.imethod.s)?;
        }
        if !PRESET_NAMES.contains(&self.init.preset.as_str()) {
            return Err(Error::UnknownPreset(self.init.preset.clone()));
        }
        let nyquist = grid.nyquist_frequency();
        Ok(self
            .imethod
            .n_list
            .iter()
            .filter(|&&n| n > nyquist)
            .map(|n| {
                format!(
                    "N = {n} exceeds the Nyquist frequency {nyquist:.4}; I is the identity there"
                )
            })
            .collect())
    }

    pub fn grid(&self) -> Result<GridSpec> {
        GridSpec::new(self.modes, self.length)
    }

    pub fn preset_params(&self) -> PresetParams {
        PresetParams {
            mass_fraction: self.init.mass_fraction,
            width: self.init.width,
            seed: self.init.seed,
        }
    }

    /// Parameters for every entry of `N_list`, in ascending `N`.
    pub fn params_list(&self) -> Result<Vec<IMethodParams>> {
        let mut ns = self.imethod.n_list.clone();
        ns.sort_by(f64::total_cmp);
        ns.into_iter()
            .map(|n| IMethodParams::new(n, self.imethod.s))
            .collect()
    }

    /// Parameters for the smallest `N`, used by single-run ledgers.
    pub fn ledger_params(&self) -> Result<IMethodParams> {
        Ok(self.params_list()?[0])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        let cfg = ExperimentConfig::default();
        assert!(cfg.validate().unwrap().is_empty());
    }

    #[test]
    fn parses_every_key() {
        let text = "\
# study setup
grid.M = 32
grid.L = 6.5   # trailing comment
time.dt = 1e-4
time.T = 2
time.ledger_every = 10
time.delta = 0.05
imethod.N_list = [4, 8, 16, 32]
imethod.s = 0.8
init.preset = random_smooth
init.seed = 7
init.mass_fraction = 0.25
init.width = 0.3
init.snapshot = run/u_000010.zkf
checks.fixed_diff = false
checks.almost_cons = off
checks.growth = yes
checks.local_time = 0
output.dir = results
";
        let cfg = ExperimentConfig::parse(text).unwrap();
        assert_eq!(cfg.modes, 32);
        assert_eq!(cfg.length, 6.5);
        assert_eq!(cfg.time.dt, 1e-4);
        assert_eq!(cfg.time.t_final, 2.0);
        assert_eq!(cfg.time.ledger_every, 10);
        assert_eq!(cfg.time.delta, 0.05);
        assert_eq!(cfg.imethod.n_list, vec![4.0, 8.0, 16.0, 32.0]);
        assert_eq!(cfg.imethod.s, 0.8);
        assert_eq!(cfg.init.preset, "random_smooth");
        assert_eq!(cfg.init.seed, 7);
        assert_eq!(cfg.init.mass_fraction, 0.25);
        assert_eq!(cfg.init.width, Some(0.3));
        assert_eq!(cfg.init.snapshot, Some(PathBuf::from("run/u_000010.zkf")));
        assert!(!cfg.checks.fixed_diff && !cfg.checks.almost_cons);
        assert!(cfg.checks.growth && !cfg.checks.local_time);
        assert_eq!(cfg.output_dir, PathBuf::from("results"));
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = ExperimentConfig::parse("grid.M = 32\nbogus.key = 1\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 2, .. }), "{err}");
        let err = ExperimentConfig::parse("\n\ngrid.M = many\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 3, .. }), "{err}");
        let err = ExperimentConfig::parse("grid.M 32\n").unwrap_err();
        assert!(matches!(err, Error::Config { line: 1, .. }), "{err}");
    }

    #[test]
    fn regularity_outside_the_open_interval_is_rejected() {
        for s in ["0.5", "1.0", "0.3"] {
            let text = format!("imethod.s = {s}\n");
            assert!(ExperimentConfig::parse(&text).is_err(), "s = {s}");
        }
    }

    #[test]
    fn unknown_preset_is_rejected() {
        let err = ExperimentConfig::parse("init.preset = vortex\n").unwrap_err();
        assert!(matches!(err, Error::UnknownPreset(_)));
    }

    #[test]
    fn cutoff_above_nyquist_warns() {
        let mut cfg = ExperimentConfig::default();
        cfg.imethod.n_list = vec![1.0, 100.0];
        let warnings = cfg.validate().unwrap();
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].contains("N = 100"));
    }

    #[test]
    fn params_are_sorted_by_cutoff() {
        let mut cfg = ExperimentConfig::default();
        cfg.imethod.n_list = vec![2.0, 0.5, 1.0];
        let ns: Vec<f64> = cfg
            .params_list()
            .unwrap()
            .iter()
            .map(|p| p.cutoff())
            .collect();
        assert_eq!(ns, vec![0.5, 1.0, 2.0]);
    }
}

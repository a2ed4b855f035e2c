//! `zakharov`: simulations, the I-method studies and the invariant suite.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 failed assertion,
//! 3 blow-up abort.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use zakharov::energy::save_ledger;
use zakharov::error::Error;
use zakharov::experiments::output::{
    write_almost_cons, write_fixed_diff, write_growth, write_local_time, write_simulation,
};
use zakharov::experiments::{
    run_almost_conservation_study, run_fixed_time_difference_study, run_growth_study,
    run_local_time_heuristic, run_simulation, verify_suite, ExperimentConfig, SlopeFit,
};
use zakharov::groundstate::ground_state;

#[derive(Parser, Debug)]
#[command(
    name = "zakharov",
    version,
    about = "Zakharov-system simulator and I-method studies"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Config file with `section.key = value` lines.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides `output.dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Initial-data preset; overrides `init.preset`.
    #[arg(long, global = true)]
    preset: Option<String>,
    /// Random seed; overrides `init.seed`.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Print only errors.
    #[arg(long, global = true)]
    quiet: bool,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Evolve the configured data and write the energy ledger.
    Simulate,
    /// Fixed-time difference H(Iu,n+) - H~ across N.
    StudyFixedDiff,
    /// Energy increments over one window across N.
    StudyAlmostCons,
    /// Long-time growth of the norm triple.
    StudyGrowth,
    /// Local time of the splitting scheme for scaled data.
    StudyLocalTime,
    /// Solve for the ground state and write its radial profile.
    GroundState,
    /// Run the invariant suite.
    Verify,
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Assertion(_) => 2,
        Error::BlowUp { .. } => 3,
        _ => 1,
    }
}

fn config(cli: &Cli) -> Result<ExperimentConfig, Error> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(p) = &cli.preset {
        cfg.init.preset = p.clone();
    }
    if let Some(s) = cli.seed {
        cfg.init.seed = s;
    }
    if let Some(o) = &cli.out {
        cfg.output_dir = o.clone();
    }
    for w in cfg.validate()? {
        if !cli.quiet {
            eprintln!("warning: {w}");
        }
    }
    Ok(cfg)
}

fn describe(label: &str, fit: &Option<SlopeFit>) -> String {
    match fit {
        Some(f) => format!(
            "{label} slope {:.4} (residual {:.2e}, {} points, {:.1} octaves{})",
            f.slope,
            f.residual,
            f.points,
            f.octaves,
            if f.assertable() { "" } else { ", not asserted" }
        ),
        None => format!("{label} slope undefined"),
    }
}

fn report(quiet: bool, dir: &Path, files: &[PathBuf]) {
    if !quiet {
        for f in files {
            println!("wrote {}", f.strip_prefix(dir).unwrap_or(f).display());
        }
    }
}

fn run(cli: &Cli) -> Result<(), Error> {
    let quiet = cli.quiet;
    match cli.command {
        Command::Verify => {
            let outcomes = verify_suite();
            let failed = outcomes.iter().filter(|o| !o.passed).count();
            for o in &outcomes {
                if !quiet || !o.passed {
                    let tag = if o.passed { "PASS" } else { "FAIL" };
                    println!("{tag} {}: {} ({:.1}s)", o.name, o.detail, o.seconds);
                }
            }
            if failed > 0 {
                return Err(Error::Assertion(format!(
                    "{failed} of {} checks failed",
                    outcomes.len()
                )));
            }
            Ok(())
        }
        Command::GroundState => {
            let q = ground_state()?;
            let dir = cli.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            std::fs::create_dir_all(&dir)?;
            let path = dir.join("ground_state.csv");
            q.write_csv(std::fs::File::create(&path)?)?;
            if !quiet {
                println!(
                    "Q(0) = {:.10}, ||Q||^2 = {:.10}, residual {:.2e}",
                    q.center_value(),
                    q.l2_norm_sq,
                    q.residual()
                );
                report(quiet, &dir, &[path]);
            }
            Ok(())
        }
        Command::Simulate => {
            let cfg = config(cli)?;
            let dir = cfg.output_dir.clone();
            match run_simulation(&cfg, Some(&dir)) {
                Ok(traj) => {
                    let files = write_simulation(&dir, &traj.ledger)?;
                    if !quiet {
                        let (a, b) = (&traj.ledger[0], traj.ledger.last().expect("endpoint row"));
                        println!(
                            "{} steps to t = {}: mass {:.12e} -> {:.12e}, H(u,n,v) {:.12e} -> {:.12e}",
                            traj.steps, b.t, a.mass, b.mass, a.h_unv, b.h_unv
                        );
                        if traj.boundary_flagged() {
                            eprintln!(
                                "warning: boundary mass fraction {:.2e}; the periodic box is too small",
                                traj.max_boundary_fraction
                            );
                        }
                    }
                    report(quiet, &dir, &files);
                    Ok(())
                }
                Err(Error::BlowUp { time, last_row }) => {
                    if let Some(row) = &last_row {
                        std::fs::create_dir_all(&dir)?;
                        save_ledger(dir.join("ledger.csv"), std::slice::from_ref(row.as_ref()))?;
                    }
                    Err(Error::BlowUp { time, last_row })
                }
                Err(e) => Err(e),
            }
        }
        Command::StudyFixedDiff => {
            let cfg = config(cli)?;
            let study = run_fixed_time_difference_study(&cfg)?;
            let files = write_fixed_diff(&cfg.output_dir, &study)?;
            if !quiet {
                println!("{:>10} {:>14}", "N", "difference");
                for r in &study.rows {
                    println!("{:>10} {:>14.6e}", r.cutoff, r.difference);
                }
                println!("{}", describe("fixed-time difference", &study.fit));
            }
            report(quiet, &cfg.output_dir, &files);
            if cfg.checks.fixed_diff {
                study.check()
            } else {
                Ok(())
            }
        }
        Command::StudyAlmostCons => {
            let cfg = config(cli)?;
            let study = run_almost_conservation_study(&cfg)?;
            let files = write_almost_cons(&cfg.output_dir, &study)?;
            if !quiet {
                println!("delta = {}", study.delta);
                println!("{:>10} {:>14} {:>14}", "N", "refined", "modified");
                for r in &study.rows {
                    println!(
                        "{:>10} {:>14.6e} {:>14.6e}",
                        r.cutoff, r.refined_increment, r.modified_increment
                    );
                }
                println!("{}", describe("refined", &study.refined_fit));
                println!("{}", describe("modified", &study.modified_fit));
            }
            report(quiet, &cfg.output_dir, &files);
            if cfg.checks.almost_cons {
                study.check()
            } else {
                Ok(())
            }
        }
        Command::StudyGrowth => {
            let cfg = config(cli)?;
            let study = run_growth_study(&cfg)?;
            let files = write_growth(&cfg.output_dir, &study)?;
            if !quiet {
                for w in &study.warnings {
                    eprintln!("warning: {w}");
                }
                println!(
                    "mass {:.6} of threshold {:.6}; theorem exponent {:.4}",
                    study.threshold.mass, study.threshold.threshold, study.theorem_exponent
                );
                match study.fit {
                    Some(f) => println!(
                        "fitted c(1+t)^alpha: c = {:.4e}, alpha = {:.4}",
                        f.c, f.alpha
                    ),
                    None => println!("norm triple vanishes; no fit"),
                }
            }
            report(quiet, &cfg.output_dir, &files);
            if cfg.checks.growth {
                study.check()
            } else {
                Ok(())
            }
        }
        Command::StudyLocalTime => {
            let cfg = config(cli)?;
            let rows = run_local_time_heuristic(&cfg)?;
            let files = write_local_time(&cfg.output_dir, &rows)?;
            if !quiet {
                println!(
                    "{:>8} {:>12} {:>12} {:>12}",
                    "scale", "delta", "norm", "delta*norm^2"
                );
                for r in &rows {
                    println!(
                        "{:>8} {:>12.4e} {:>12.4e} {:>12.4e}",
                        r.scale, r.delta, r.norm, r.ratio
                    );
                }
            }
            report(quiet, &cfg.output_dir, &files);
            if cfg.checks.local_time && rows.windows(2).any(|w| w[1].delta > w[0].delta) {
                return Err(Error::Assertion(
                    "local time grows with the data size".into(),
                ));
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            if matches!(e, Error::UnknownPreset(_) | Error::Config { .. }) {
                eprintln!("usage: zakharov <COMMAND> [--config <PATH>] [--out <DIR>] [--preset <NAME>] [--seed <INT>] [--quiet]");
                eprintln!(
                    "presets: {}",
                    zakharov::experiments::PRESET_NAMES.join(", ")
                );
            }
            ExitCode::from(exit_code(&e))
        }
    }
}

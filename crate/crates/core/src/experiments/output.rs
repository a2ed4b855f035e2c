//! CSV tables and gnuplot scripts for the studies.
//!
//! Each study writes `<name>.csv` and `<name>.gp` into the output directory.
//! Running `gnuplot <name>.gp` there renders `<name>.png`.

use std::fmt::Write as _;
use std::fs::File;
use std::path::{Path, PathBuf};

use crate::energy::save_ledger;
use crate::error::Result;

use super::fit::SlopeFit;
use super::studies::{AlmostConsStudy, FixedDiffStudy, GrowthStudy, LocalTimeRow};

fn write_table(
    path: &Path,
    header: &[&str],
    rows: impl IntoIterator<Item = Vec<f64>>,
) -> Result<()> {
    let mut w = csv::Writer::from_writer(File::create(path)?);
    w.write_record(header)?;
    for row in rows {
        // `{:?}` on f64 prints the shortest string that parses back bitwise.
        w.write_record(row.iter().map(|v| format!("{v:?}")))?;
    }
    w.flush()?;
    Ok(())
}

fn fit_comment(label: &str, fit: &Option<SlopeFit>) -> String {
    match fit {
        Some(f) => format!(
            "# {label}: slope {:.4}, residual {:.3e}, {} points over {:.2} octaves\n",
            f.slope, f.residual, f.points, f.octaves
        ),
        None => format!("# {label}: slope undefined (no positive values)\n"),
    }
}

fn loglog_script(
    name: &str,
    title: &str,
    xlabel: &str,
    ylabel: &str,
    series: &[(usize, &str)],
) -> String {
    let mut s = String::new();
    writeln!(s, "set terminal pngcairo size 800,600").unwrap();
    writeln!(s, "set output '{name}.png'").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key autotitle columnhead").unwrap();
    writeln!(s, "set logscale xy").unwrap();
    writeln!(s, "set title '{title}'").unwrap();
    writeln!(s, "set xlabel '{xlabel}'").unwrap();
    writeln!(s, "set ylabel '{ylabel}'").unwrap();
    let plots: Vec<String> = series
        .iter()
        .map(|(col, t)| format!("'{name}.csv' using 1:(abs(${col})) with linespoints title '{t}'"))
        .collect();
    writeln!(s, "plot {}", plots.join(", \\\n     ")).unwrap();
    s
}

fn write_pair(dir: &Path, name: &str, script: String) -> Result<Vec<PathBuf>> {
    let gp = dir.join(format!("{name}.gp"));
    std::fs::write(&gp, script)?;
    Ok(vec![dir.join(format!("{name}.csv")), gp])
}

pub fn write_fixed_diff(dir: &Path, study: &FixedDiffStudy) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = "fixed_diff";
    write_table(
        &dir.join(format!("{name}.csv")),
        &["N", "difference"],
        study.rows.iter().map(|r| vec![r.cutoff, r.difference]),
    )?;
    let script = fit_comment("|H(Iu,n+) - H~|", &study.fit)
        + &loglog_script(
            name,
            "Fixed-time difference",
            "N",
            "|H(Iu,n+) - H~|",
            &[(2, "difference")],
        );
    write_pair(dir, name, script)
}

pub fn write_almost_cons(dir: &Path, study: &AlmostConsStudy) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = "almost_cons";
    write_table(
        &dir.join(format!("{name}.csv")),
        &["N", "refined_increment", "modified_increment"],
        study
            .rows
            .iter()
            .map(|r| vec![r.cutoff, r.refined_increment, r.modified_increment]),
    )?;
    let script = format!("# delta = {}\n", study.delta)
        + &fit_comment("refined", &study.refined_fit)
        + &fit_comment("modified", &study.modified_fit)
        + &loglog_script(
            name,
            "Energy increments over one window",
            "N",
            "increment",
            &[(2, "refined H~"), (3, "modified H(Iu,n+)")],
        );
    write_pair(dir, name, script)
}

pub fn write_growth(dir: &Path, study: &GrowthStudy) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = "growth";
    save_ledger(dir.join(format!("{name}.csv")), &study.ledger)?;
    let mut s = String::new();
    writeln!(s, "# theorem exponent {:.4}", study.theorem_exponent).unwrap();
    let (c, alpha) = match study.fit {
        Some(f) => {
            writeln!(
                s,
                "# fitted c(1+t)^alpha: c = {:.6e}, alpha = {:.4}",
                f.c, f.alpha
            )
            .unwrap();
            (f.c, f.alpha)
        }
        None => (0.0, 0.0),
    };
    writeln!(s, "set terminal pngcairo size 800,600").unwrap();
    writeln!(s, "set output '{name}.png'").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set logscale xy").unwrap();
    writeln!(s, "set title 'Norm triple growth'").unwrap();
    writeln!(s, "set xlabel '1 + t'").unwrap();
    writeln!(s, "set ylabel '|u|_Hs + |n| + |Lambda^-1 n_t|'").unwrap();
    writeln!(
        s,
        "plot '{name}.csv' every ::1 using (1+$1):($8+$9+$10) with lines title 'norm triple', \\\n     {c:e}*x**{alpha} title 'fit'"
    )
    .unwrap();
    write_pair(dir, name, s)
}

pub fn write_local_time(dir: &Path, rows: &[LocalTimeRow]) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = "local_time";
    write_table(
        &dir.join(format!("{name}.csv")),
        &["scale", "delta", "norm", "ratio"],
        rows.iter().map(|r| vec![r.scale, r.delta, r.norm, r.ratio]),
    )?;
    let script = loglog_script(
        name,
        "Splitting local time",
        "data scale",
        "delta, delta*norm^2",
        &[(2, "delta"), (4, "delta * norm^2")],
    );
    write_pair(dir, name, script)
}

/// Ledger CSV of a simulation run plus a mass/energy plot script.
pub fn write_simulation(
    dir: &Path,
    ledger: &[crate::energy::EnergyLedger],
) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(dir)?;
    let name = "ledger";
    save_ledger(dir.join(format!("{name}.csv")), ledger)?;
    let mut s = String::new();
    writeln!(s, "set terminal pngcairo size 800,900").unwrap();
    writeln!(s, "set output '{name}.png'").unwrap();
    writeln!(s, "set datafile separator ','").unwrap();
    writeln!(s, "set key autotitle columnhead").unwrap();
    writeln!(s, "set multiplot layout 2,1").unwrap();
    writeln!(s, "set xlabel 't'").unwrap();
    writeln!(s, "plot '{name}.csv' using 1:2 with lines").unwrap();
    writeln!(
        s,
        "plot '{name}.csv' using 1:3 with lines, '' using 1:5 with lines, '' using 1:6 with lines"
    )
    .unwrap();
    writeln!(s, "unset multiplot").unwrap();
    write_pair(dir, name, s)
}

/// Reads a study table back as `(header, rows)`.
pub fn read_table(path: impl AsRef<Path>) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut r = csv::Reader::from_path(path)?;
    let header = r.headers()?.iter().map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .map(|v| {
                v.parse::<f64>().map_err(|e| {
                    crate::error::Error::Snapshot(format!("bad table value `{v}`: {e}"))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        rows.push(row);
    }
    Ok((header, rows))
}

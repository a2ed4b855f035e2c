use std::fs::File;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::Result;

/// One row of per-timestep diagnostics.
///
/// Column order is the CSV header:
/// `t,mass,h_unv,h_pm,h_modified,h_refined,fixed_time_diff,sobolev_u,l2_n,l2_lam_inv_nt`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyLedger {
    pub t: f64,
    pub mass: f64,
    pub h_unv: f64,
    pub h_pm: f64,
    pub h_modified: f64,
    pub h_refined: f64,
    /// `h_modified - h_refined`.
    pub fixed_time_diff: f64,
    /// `||u||_{H^s}`.
    pub sobolev_u: f64,
    pub l2_n: f64,
    pub l2_lam_inv_nt: f64,
}

impl EnergyLedger {
    pub const HEADER: &'static str =
        "t,mass,h_unv,h_pm,h_modified,h_refined,fixed_time_diff,sobolev_u,l2_n,l2_lam_inv_nt";

    pub fn is_finite(&self) -> bool {
        [
            self.t,
            self.mass,
            self.h_unv,
            self.h_pm,
            self.h_modified,
            self.h_refined,
            self.fixed_time_diff,
            self.sobolev_u,
            self.l2_n,
            self.l2_lam_inv_nt,
        ]
        .iter()
        .all(|v| v.is_finite())
    }

    /// `||u||_{H^s} + ||n||_{L^2} + ||Lambda^{-1} n_t||_{L^2}`.
    pub fn norm_triple(&self) -> f64 {
        self.sobolev_u + self.l2_n + self.l2_lam_inv_nt
    }
}

pub fn write_ledger<W: Write>(w: W, rows: &[EnergyLedger]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(w);
    if rows.is_empty() {
        wtr.write_record(EnergyLedger::HEADER.split(','))?;
    }
    for row in rows {
        wtr.serialize(row)?;
    }
    wtr.flush()?;
    Ok(())
}

pub fn save_ledger(path: impl AsRef<Path>, rows: &[EnergyLedger]) -> Result<()> {
    write_ledger(File::create(path)?, rows)
}

pub fn read_ledger<R: std::io::Read>(r: R) -> Result<Vec<EnergyLedger>> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_owned).collect();
    if header.join(",") != EnergyLedger::HEADER {
        return Err(crate::error::Error::Snapshot(format!(
            "unexpected ledger header `{}`",
            header.join(",")
        )));
    }
    rdr.deserialize().map(|r| r.map_err(Into::into)).collect()
}

pub fn load_ledger(path: impl AsRef<Path>) -> Result<Vec<EnergyLedger>> {
    read_ledger(File::open(path)?)
}

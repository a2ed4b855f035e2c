use thiserror::Error;

use crate::energy::EnergyLedger;
use crate::spectral::Representation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("field is in {found:?} representation, expected {expected:?}")]
    WrongRepresentation {
        expected: Representation,
        found: Representation,
    },
    #[error("fields live on different grids")]
    GridMismatch,
    #[error("multiplier symbol is not finite at lattice mode ({kx}, {ky})")]
    NonFiniteSymbol { kx: i64, ky: i64 },
    #[error("unsupported Lebesgue exponent p = {0}")]
    UnsupportedNorm(f64),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("{what} is not real-valued (imaginary residue {residue:e})")]
    NotReal { what: &'static str, residue: f64 },
    #[error("field has nonzero mean {mean:e}; no periodic solution exists")]
    NonzeroMean { mean: f64 },
    #[error("grid with M = {modes} exceeds the multilinear-sum budget M <= {limit}")]
    BudgetExceeded { modes: usize, limit: usize },
    #[error(
        "direct and subtracted fixed-time differences disagree: {direct:e} vs {by_subtraction:e}"
    )]
    SymbolMismatch { direct: f64, by_subtraction: f64 },
    #[error("blow-up detected at t = {time}")]
    BlowUp {
        time: f64,
        last_row: Option<Box<EnergyLedger>>,
    },
    #[error("integrator failed: {0}")]
    Integrator(String),
    #[error("shooting bracket not found for the ground state")]
    BracketNotFound,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("malformed snapshot: {0}")]
    Snapshot(String),
    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("refused: {0}")]
    Refused(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

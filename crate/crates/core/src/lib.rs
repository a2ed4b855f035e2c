//! Spectral simulation and I-method diagnostics for the 2D Zakharov system
//! on a periodic box.

pub mod dynamics;
pub mod energy;
pub mod error;
pub mod exec;
pub mod experiments;
pub mod groundstate;
pub mod imethod;
pub mod ode;
pub mod spectral;

pub use error::{Error, Result};

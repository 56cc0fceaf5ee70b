//! Mean-field model of a transversely pumped Bose-Einstein condensate coupled
//! to a single dissipative cavity mode.

pub mod cli;
pub mod commands;
pub mod config;
pub mod dynamics;
pub mod error;
pub mod ground;
pub mod io;
pub mod linalg;
pub mod params;
pub mod physics;
pub mod plot;
pub mod stability;
pub mod sweep;

pub use config::RunConfig;
pub use error::{Error, Result};
pub use params::ModelParams;
pub use physics::{CavityAmplitude, Closure, MomentumState, Observables};

//! Library side of the `scatter` command: configuration, scans and writers.

pub mod config;
pub mod diffraction_cmd;
pub mod error;
pub mod output;
pub mod reproduce;
pub mod run;

pub use config::{Format, GridSpec, ModelSpec, Observable, RunConfig};
pub use error::{CliError, Result};
pub use reproduce::{reproduce, Figure};
pub use run::{emit, run, Artifact};

//! Command-line front end for `sincwarp`: trial files, warping, sweeps and
//! DTW matrix export.

pub mod cmd;
pub mod error;
pub mod io;
pub mod sweep;

pub use cmd::main_with_args;
pub use error::{CliError, Result};

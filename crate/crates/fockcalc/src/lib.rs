//! File formats, reports and verification suites for the `fockcalc`
//! command-line tool, built on [`fock_core`].

#![deny(missing_debug_implementations)]

pub mod error;
pub mod format;
pub mod random;
pub mod report;
pub mod suites;

pub use error::{CliError, CliResult, ErrorKind};
pub use format::{CoeffFile, Coeffs};

/// Environment variable overriding the number of quadrature nodes per axis.
pub const QUAD_NODES_VAR: &str = "FOCK_QUAD_NODES";

/// Node count from [`QUAD_NODES_VAR`], or the library default.
pub fn quad_nodes_from_env() -> CliResult<usize> {
    match std::env::var(QUAD_NODES_VAR) {
        Ok(text) => text
            .trim()
            .parse()
            .map_err(|_| CliError::precondition(format!("{QUAD_NODES_VAR} must be a positive integer, got {text:?}"))),
        Err(_) => Ok(fock_core::quadrature::DEFAULT_NODES),
    }
}

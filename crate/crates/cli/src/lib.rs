//! Experiment runner around `dephase-core`: named ensemble sweeps, ad-hoc
//! sampling, CSV/JSON reporting with reproducibility manifests, and the
//! acceptance verifier.

pub mod experiments;
pub mod output;
pub mod runner;
pub mod verify;

pub use dephase_core::{Error, Result};

/// Process exit code for an error: 2 for configuration/usage problems,
/// 1 for runtime failures.
pub fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Parse(_) | Error::InvalidEnsemble(_) | Error::BadQubitCount(_) => 2,
        _ => 1,
    }
}

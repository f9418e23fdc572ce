//! Experiment orchestration for `besovflow-core`: configuration, claim
//! runners, output files and exit codes.

pub mod config;
pub mod experiments;
pub mod output;

use besovflow_core::Error;

/// Process exit codes.
pub mod exit {
    pub const PASS: u8 = 0;
    pub const FAIL: u8 = 1;
    /// Configuration or input outside a hypothesis of the tested statement.
    pub const INVALID: u8 = 2;
    pub const IO: u8 = 3;
}

/// Exit code for an error that aborted a run.
pub fn exit_code(e: &Error) -> u8 {
    match e {
        Error::Io(_)
        | Error::Csv(_)
        | Error::Json(_)
        | Error::BadMagic
        | Error::UnsupportedVersion(_)
        | Error::TruncatedPayload { .. }
        | Error::DimensionMismatch(_) => exit::IO,
        Error::InsufficientScales { .. }
        | Error::ZeroNormInScan
        | Error::TRangeTooNarrow
        | Error::NonFinite => exit::FAIL,
        _ => exit::INVALID,
    }
}

/// Applies `BESOVFLOW_THREADS` to the global pool. Without the `parallel`
/// feature everything runs on the calling thread and the variable is
/// ignored.
pub fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("BESOVFLOW_THREADS") else {
        return Ok(());
    };
    let n: usize = v
        .trim()
        .parse()
        .map_err(|_| format!("BESOVFLOW_THREADS must be a positive integer, got '{v}'"))?;
    if n == 0 {
        return Err("BESOVFLOW_THREADS must be at least 1".into());
    }
    #[cfg(feature = "parallel")]
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| e.to_string())?;
    Ok(())
}

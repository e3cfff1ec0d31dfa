//! Process-level failure type carrying the exit code contract: 1 for a
//! failed self-check, 2 for usage or config problems, 3 for numerical
//! failures inside the solver.

use dqd_core::Error;

/// A fatal condition together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    pub fn check(message: impl Into<String>) -> Self {
        Failure {
            code: 1,
            message: message.into(),
        }
    }

    pub fn config(message: impl Into<String>) -> Self {
        Failure {
            code: 2,
            message: message.into(),
        }
    }

    pub fn numerical(message: impl Into<String>) -> Self {
        Failure {
            code: 3,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter(_) | Error::SiteCountOutOfRange(_) => {
                Failure::config(e.to_string())
            }
            other => Failure::numerical(other.to_string()),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::config(format!("i/o: {e}"))
    }
}

/// Short machine-readable slug for the CSV `status` column of a row that
/// failed to solve.
pub fn error_slug(e: &Error) -> &'static str {
    match e {
        Error::InvalidParameter(_) => "invalid_parameter",
        Error::UndefinedConcurrence { .. } => "undefined_concurrence",
        Error::DenseCapExceeded { .. } => "dense_cap",
        Error::SiteGateExceeded { .. } => "site_gate",
        Error::NoConvergence { .. } => "no_convergence",
        Error::NonMonotonicCrossing { .. } => "non_monotonic",
        _ => "solver",
    }
}

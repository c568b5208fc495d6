//! Error type shared across the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A value fell outside the representable range of a tabulated function.
    #[error("range error: {0}")]
    Range(String),

    /// Interpolation query outside the covered span of a trajectory.
    #[error("query t = {t} outside covered span [{lo}, {hi}]")]
    OutOfSpan { t: f64, lo: f64, hi: f64 },

    /// A trajectory does not reach far enough into the past.
    #[error("insufficient history: need [{need_lo}, {need_hi}], have [{have_lo}, {have_hi}]")]
    InsufficientHistory {
        need_lo: f64,
        need_hi: f64,
        have_lo: f64,
        have_hi: f64,
    },

    /// A configuration violated a precondition before any integration ran.
    #[error("invalid configuration: {0}")]
    Config(String),

    /// NaN or infinity appeared in a state during integration.
    #[error("integration blowup: non-finite state at t = {t}")]
    Blowup { t: f64 },

    /// Too many consecutive inter-event gaps below the configured floor.
    #[error("zeno guard tripped after {run} consecutive gaps below {floor}; recent event times: {times:?}")]
    ZenoGuard {
        run: usize,
        floor: f64,
        times: Vec<f64>,
    },

    /// Theorem hypotheses are violated; certification cannot proceed.
    #[error("certification error: {0}")]
    Certification(String),

    /// A derived quantity is ill-defined (e.g. division by zero in a constant).
    #[error("internal consistency error: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, Error>;

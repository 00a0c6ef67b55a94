use thiserror::Error;

/// Everything that can go wrong inside the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter set violates one of its invariants.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },

    #[error("degenerate impedance: R = 0 and L = 0")]
    DegenerateImpedance,

    #[error("evaluation time {t} s precedes fault inception {t_fault} s")]
    BeforeFault { t: f64, t_fault: f64 },

    #[error("switch stress is not rated in {0} mode")]
    UnratedMode(&'static str),

    #[error("step size {dt} s rejected: {reason}")]
    StepSize { dt: f64, reason: String },

    /// The integrator produced NaN or infinity; the run is aborted.
    #[error("non-finite state at t = {time} s")]
    NonFinite { time: f64 },

    #[error("events overlap: {0}")]
    OverlappingEvents(String),

    #[error("empty window")]
    EmptyWindow,

    #[error("window of {samples} samples is not an integer number of fundamental periods ({periods:.6})")]
    NonIntegerPeriods { samples: usize, periods: f64 },

    #[error("fundamental component is zero")]
    ZeroFundamental,

    #[error("no event log supplied")]
    MissingEventLog,

    #[error("topology {entry}: missing parameter `{symbol}`")]
    MissingParameter { entry: String, symbol: String },

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unit error: {message}")]
    Unit { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    /// True for errors caused by bad input (parse, unit, invariant). The CLI
    /// maps these to exit code 2.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Invalid { .. }
                | Error::DegenerateImpedance
                | Error::BeforeFault { .. }
                | Error::UnratedMode(_)
                | Error::StepSize { .. }
                | Error::OverlappingEvents(_)
                | Error::EmptyWindow
                | Error::NonIntegerPeriods { .. }
                | Error::ZeroFundamental
                | Error::MissingEventLog
                | Error::MissingParameter { .. }
                | Error::Parse { .. }
                | Error::Unit { .. }
        )
    }

    /// True when a numeric run was aborted (exit code 3).
    pub fn is_numeric_abort(&self) -> bool {
        matches!(self, Error::NonFinite { .. })
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

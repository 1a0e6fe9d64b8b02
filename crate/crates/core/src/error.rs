use core::fmt;

/// An argument fell outside the domain of a numerical routine.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DomainError {
    pub function: &'static str,
    pub reason: &'static str,
}

impl DomainError {
    pub const fn new(function: &'static str, reason: &'static str) -> Self {
        Self { function, reason }
    }
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}", self.function, self.reason)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Error {
    Domain(DomainError),
    /// Caller broke a length or shape precondition.
    Contract(&'static str),
    /// The interferer signature is numerically zero.
    DegenerateChannel,
    /// An exhaustive search hit its work limit.
    SearchBudget {
        explored: usize,
    },
    InvalidCode(&'static str),
}

impl From<DomainError> for Error {
    fn from(e: DomainError) -> Self {
        Error::Domain(e)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(e) => write!(f, "domain error in {e}"),
            Error::Contract(what) => write!(f, "contract violation: {what}"),
            Error::DegenerateChannel => f.write_str("degenerate channel: interferer direction is zero"),
            Error::SearchBudget { explored } => {
                write!(f, "trellis search budget exceeded after {explored} nodes")
            }
            Error::InvalidCode(what) => write!(f, "invalid convolutional code: {what}"),
        }
    }
}

impl core::error::Error for Error {}
impl core::error::Error for DomainError {}

pub type Result<T> = core::result::Result<T, Error>;

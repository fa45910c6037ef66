use thiserror::Error;

/// Errors raised by the model builders, solvers and the command-line front end.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error(
        "coupling G = {coupling} violates the stability bound G < sqrt(omega*omega0)/2 = {bound}"
    )]
    StabilityViolation { coupling: f64, bound: f64 },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("mode index {index} out of range for {modes} modes")]
    IndexOutOfRange { index: usize, modes: usize },

    #[error("Fock space dimension {dimension} exceeds the cap {cap}")]
    DimensionCap { dimension: usize, cap: usize },

    #[error("operator is not Hermitian (max deviation {deviation:e})")]
    NotHermitian { deviation: f64 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("evolution step underflow at t = {time}: step {step:e} below minimum")]
    StepUnderflow { time: f64, step: f64 },

    #[error("dark state undefined: control and probe couplings both vanish")]
    DegenerateDark,

    #[error("control schedule is not monotone near t = {time}")]
    ScheduleNotMonotone { time: f64 },

    #[error("steady-state response is singular (|denominator| = {magnitude:e})")]
    SingularResponse { magnitude: f64 },

    #[error("relaxation did not converge: residual {residual:e}")]
    NotConverged { residual: f64 },

    #[error("no transparency window found on the sampled grid")]
    NoWindowFound,

    #[error("polariton state ({0}, {1}) could not be identified in the truncated spectrum")]
    StateNotResolved(usize, usize),

    #[error("config error: {0}")]
    Config(String),

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag, used in the CLI's error JSON.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::StabilityViolation { .. } => "StabilityViolation",
            Error::InvalidParameter { .. } => "InvalidParameter",
            Error::IndexOutOfRange { .. } => "IndexOutOfRange",
            Error::DimensionCap { .. } => "DimensionCap",
            Error::NotHermitian { .. } => "NotHermitian",
            Error::ShapeMismatch(_) => "ShapeMismatch",
            Error::StepUnderflow { .. } => "StepUnderflow",
            Error::DegenerateDark => "DegenerateDark",
            Error::ScheduleNotMonotone { .. } => "ScheduleNotMonotone",
            Error::SingularResponse { .. } => "SingularResponse",
            Error::NotConverged { .. } => "NotConverged",
            Error::NoWindowFound => "NoWindowFound",
            Error::StateNotResolved(..) => "StateNotResolved",
            Error::Config(_) => "Config",
            Error::Io(_) => "Io",
        }
    }

    /// True for errors caused by bad input rather than by a numerical failure.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::StabilityViolation { .. }
                | Error::InvalidParameter { .. }
                | Error::IndexOutOfRange { .. }
                | Error::DimensionCap { .. }
                | Error::ScheduleNotMonotone { .. }
                | Error::DegenerateDark
                | Error::Config(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;

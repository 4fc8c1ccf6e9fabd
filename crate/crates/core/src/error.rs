use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Input failed a construction-time invariant.
    #[error("invalid input: {0}")]
    Validation(String),

    #[error("free-space Green dyadic is singular at coincident points (request coincident mode)")]
    Singularity,

    #[error("position {position:e} m outside guide domain [0, {length:e}] m")]
    Domain { position: f64, length: f64 },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error(
        "rate matrix violates Lindblad positivity: |gamma_ab| = {gamma_ab:e} > sqrt(gamma_aa * gamma_bb) = {bound:e} \
         (gamma_aa = {gamma_aa:e}, gamma_bb = {gamma_bb:e})"
    )]
    Positivity {
        gamma_aa: f64,
        gamma_bb: f64,
        gamma_ab: f64,
        bound: f64,
    },

    #[error("unknown site label `{0}`")]
    UnknownSite(String),

    #[error("frequency {omega:e} rad/s outside tabulated range [{min:e}, {max:e}]")]
    OutOfRange { omega: f64, min: f64, max: f64 },

    #[error("unknown unit `{0}`")]
    UnknownUnit(String),

    #[error("step size underflow at t = {t:e} (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integration quality: invariant correction {correction:e} exceeds {limit:e} at t = {t:e}")]
    IntegrationQuality { t: f64, correction: f64, limit: f64 },

    #[error("steady state is not unique: second-smallest singular value {sigma:e} <= {threshold:e}")]
    NonUniqueSteadyState { sigma: f64, threshold: f64 },

    #[error("numerical conditioning: {0}")]
    Conditioning(String),

    #[error("numerical error: {0}")]
    Numerical(String),

    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// Process exit code for the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_)
            | Error::Configuration(_)
            | Error::Parse { .. }
            | Error::UnknownSite(_)
            | Error::UnknownUnit(_)
            | Error::Domain { .. }
            | Error::OutOfRange { .. }
            | Error::Positivity { .. }
            | Error::Singularity => 2,
            Error::Consistency(_) => 3,
            Error::StepUnderflow { .. }
            | Error::IntegrationQuality { .. }
            | Error::NonUniqueSteadyState { .. }
            | Error::Conditioning(_)
            | Error::Numerical(_) => 4,
            Error::Io { .. } => 1,
        }
    }
}

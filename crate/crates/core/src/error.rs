use thiserror::Error;

/// Errors raised across the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("base station {bs} serves {users} users but only {carriers} sub-carriers exist")]
    Oversubscribed { bs: usize, users: usize, carriers: usize },

    #[error("UAV altitude {altitude_m} m outside the model validity band [22.5, 300] m")]
    AltitudeOutOfBand { altitude_m: f64 },

    #[error("poles {first} and {second} collide and cannot be separated")]
    PoleCollision { first: f64, second: f64 },

    #[error("analytic outage ill-conditioned (cancellation magnitude {magnitude:e})")]
    IllConditioned { magnitude: f64 },

    #[error("analytic outage {value} left [0, 1] by more than the clamp tolerance")]
    OutOfRange { value: f64 },

    #[error("quadrature did not converge: order {order} vs {doubled} differ by {delta:e}")]
    Quadrature { order: usize, doubled: usize, delta: f64 },

    #[error("Laguerre order {0} outside [1, 128]")]
    LaguerreOrder(usize),

    #[error("link specification invalid: {0}")]
    Link(String),

    #[error("special case {case} does not apply: {reason}")]
    SpecialCase { case: u8, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("instance too large for exhaustive search: {candidates} candidates exceed {limit}")]
    SizeGate { candidates: u128, limit: u128 },

    #[error("{what} did not terminate within {limit} iterations")]
    NonTermination { what: &'static str, limit: usize },

    #[error("scenario file: {0}")]
    Parse(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(format!("line {} column {}: {}", e.line(), e.column(), e))
    }
}

pub type Result<T> = std::result::Result<T, Error>;

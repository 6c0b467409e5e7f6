use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at byte {position}: {message} (expected one of: {})", expected.join(", "))]
    Parse {
        position: usize,
        expected: Vec<String>,
        message: String,
    },
    #[error("equation has no derivative of y with a nonzero coefficient")]
    OrderZero,
    #[error("root finder did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },
    #[error("point {point} is an irregular singular point")]
    NotFuchsianAtPoint { point: String },
    #[error("exponents {first} and {second} have equal real parts")]
    EqualRealParts { first: String, second: String },
    #[error("quasi-polynomial has a non-constant amplitude (multiple exponent)")]
    NotSimpleExponents,
    #[error("exponents must differ (b1 = b2 = {0})")]
    DegenerateExponents(f64),
    #[error("duplicate abscissa {0} in majorant point set")]
    DuplicateAbscissa(f64),
    #[error("function vanishes on the contour boundary after {attempts} nudges")]
    BoundaryZero { attempts: usize },
    #[error("winding integral did not settle near an integer (last estimate {estimate})")]
    NonIntegerWinding { estimate: f64 },
    #[error("semistrip edge beta = {0} must be negative")]
    BetaNotNegative(f64),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

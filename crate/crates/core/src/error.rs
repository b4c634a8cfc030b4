use thiserror::Error;

/// Syntax error with the byte offset where parsing stopped.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

impl ParseError {
    pub fn new(pos: usize, msg: impl Into<String>) -> Self {
        ParseError { pos, msg: msg.into() }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("unknown identifier `{0}`")]
    UnknownIdentifier(String),
    #[error("unknown coordinate `{0}`")]
    UnknownCoordinate(String),
    #[error("sum of forms with different degrees ({0} and {1})")]
    MixedDegree(usize, usize),
    #[error("forms live on different charts")]
    ChartMismatch,
    #[error("degree {degree} exceeds chart dimension {dim}")]
    DegreeOverflow { degree: usize, dim: usize },
    #[error("expected a form of degree {expected}, got degree {found}")]
    WrongDegree { expected: usize, found: usize },
    #[error("chart dimension {0} is even; a contact defect needs an odd dimension")]
    EvenDimension(usize),
    #[error("division by a non-invertible expression")]
    NonInvertible,
    #[error("cyclic substitution bindings")]
    CyclicBindings,
    #[error("no realization for function `{0}`")]
    MissingRealization(String),
    #[error("realization of `{name}` does not supply derivative order {order}")]
    DerivativeOrder { name: String, order: u32 },
    #[error("coordinate `{coord}` = {value} lies outside its domain [{lo}, {hi}]")]
    OutsideDomain {
        coord: String,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("point does not assign coordinate `{0}`")]
    MissingCoordinate(String),
    #[error("kernel of the 2-form has dimension {0}, expected 1")]
    KernelDimension(usize),
    #[error("the 1-form vanishes at the point")]
    VanishingForm,
    #[error("infeasible profile parameters: {0}")]
    InfeasibleProfile(String),
    #[error("profile pair validation failed: {0}")]
    ProfileValidation(String),
    #[error("collar mismatch on seam {0}")]
    CollarMismatch(String),
    #[error("weights sum to {0}, not 1")]
    NotPartition(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed dyadic or decimal literal `{0}`")]
pub struct ParseDyadicError(pub String);

/// Failures of the interval and linear-algebra kernels.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NumericError {
    #[error("division by an interval containing zero")]
    DivisionByZeroInterval,
    #[error("matrix is singular to working precision")]
    SingularToWorkingPrecision,
    #[error("invalid interval: lower endpoint exceeds upper endpoint")]
    InvalidInterval,
}

/// Failures while evaluating an expression.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("precision ceiling of {0} bits exceeded before reaching the requested tolerance")]
    PrecisionCeilingExceeded(u32),
}

impl From<NumericError> for EvalError {
    fn from(e: NumericError) -> Self {
        EvalError::Domain(e.to_string())
    }
}

/// Failures while reading a system description.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("syntax error at line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("system has {components} components but {variables} variables")]
    DimensionMismatch { components: usize, variables: usize },
    #[error("unknown function `{0}`")]
    UnknownFunction(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("invalid region of interest: {0}")]
    InvalidRoi(String),
}

/// Failures of aligned-box geometry.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error("maximum subdivision depth {0} exceeded")]
    MaxDepthExceeded(u32),
    #[error("region of interest is not a hypercube")]
    NonCubicRoi,
    #[error("region of interest has non-positive width")]
    EmptyRoi,
}

/// Failures of the sure-success diagnostics.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DiagnosticsError {
    #[error("cannot certify a bound on the inverse Jacobian near the root: {0}")]
    SingularEnclosure(String),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Failures that prevent the solver from starting.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("system has {system} variables but the region of interest has {roi} axes")]
    DimensionMismatch { system: usize, roi: usize },
    #[error("cannot evaluate the system on the region of interest: {0}")]
    Domain(EvalError),
    #[error("invalid configuration: {0}")]
    Config(String),
}

use thiserror::Error;

/// Errors raised by the expression kernel.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ExprError {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("negative exponent at offset {offset}")]
    NegativeExponent { offset: usize },
    #[error("exponent too large at offset {offset}")]
    ExponentTooLarge { offset: usize },
    #[error("division by zero")]
    DivisionByZero,
    #[error("unbound variable `{0}`")]
    UnboundVariable(String),
    #[error("substituted denominator vanishes identically")]
    DenominatorVanishes,
    #[error("`{0}` is not a valid identifier")]
    InvalidName(String),
    #[error("name `{0}` is already declared")]
    DuplicateName(String),
    #[error("variable {var} already has the name `{existing}`")]
    DuplicateVariable { var: String, existing: String },
}

/// Errors raised by the geometry modules.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeometryError {
    #[error(transparent)]
    Expr(#[from] ExprError),
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("tensor is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("variable {0} is not allowed here")]
    ForeignVariable(String),
    #[error("the Type B Szabo criterion needs f = -c (symmetric Ricci tensor); got f + c = {0}")]
    TypeBAsymmetricRicci(String),
    #[error("metric has no closed-form inverse (not built by an extension)")]
    NoClosedFormInverse,
}

pub type GeometryResult<T> = Result<T, GeometryError>;

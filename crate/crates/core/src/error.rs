use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("gamma pole at {0}")]
    Pole(f64),

    #[error("gamma overflow at {0}")]
    Overflow(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("arity error: {0}")]
    Arity(String),

    #[error("division by zero in component {component}")]
    DivByZero { component: usize },

    #[error("unsupported expression: {0}")]
    UnsupportedExpr(String),

    #[error("unsupported exponent {exponent} for Caputo order {alpha}")]
    UnsupportedExponent { exponent: f64, alpha: f64 },

    #[error("term {index}: {source}")]
    Term {
        index: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("singular matrix (pivot {pivot:e} in column {column})")]
    SingularMatrix { column: usize, pivot: f64 },

    #[error("fractional derivative undefined: component {0} is zero")]
    SingularPoint(usize),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("alpha grid is empty")]
    EmptyGrid,
}

impl Error {
    pub(crate) fn in_term(self, index: usize) -> Self {
        Error::Term {
            index,
            source: Box::new(self),
        }
    }
}

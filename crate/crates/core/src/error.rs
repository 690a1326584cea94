use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid rational literal {0:?} (expected p/q or an integer)")]
    RationalParse(String),

    #[error("invalid generator literal {0:?} (expected x:n, i:n, c or c1)")]
    GeneratorParse(String),

    #[error("window {got} is too small (need at least {min})")]
    WindowTooSmall { got: i64, min: i64 },

    #[error("parameter out of range: {0}")]
    InvalidParameter(String),

    #[error("action matrices violate the Virasoro bracket relation at i={i}, j={j}, n={n}")]
    InconsistentAction { i: i64, j: i64, n: i64 },
}

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("disc {index} does not exclude the origin from its closure (|center| = {center_abs}, radius = {radius})")]
    OriginNotExcluded {
        index: usize,
        center_abs: String,
        radius: String,
    },

    #[error("point lies inside realized disc {index}")]
    PointInDisc { index: usize },

    #[error("point lies on the boundary of {what}; the Browder sum is infinite there")]
    DegeneratePoint { what: String },

    #[error("point is outside the closed outer disc")]
    PointOutsideCheese,

    #[error("evaluation at or too close to a pole at {pole}")]
    PoleEvaluation { pole: String },

    #[error("pole {pole} lies in the cheese (not inside any realized disc and not outside the outer disc)")]
    PoleInCheese { pole: String },

    #[error("function is not even: antisymmetric residual {residual}")]
    NotEven { residual: String },

    #[error("tail precondition a_n - r_n >= a_n/2 fails at index {index}")]
    TailPrecondition { index: u64 },

    #[error("family is empty")]
    EmptyFamily,

    #[error("Browder sum is not certified finite: {0}")]
    NotCertified(String),

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("result contradicts a proven inequality: {0}")]
    TheoremViolation(String),

    #[error("malformed JSON at `{path}`: {message}")]
    Schema { path: String, message: String },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn schema(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Schema {
            path: path.into(),
            message: message.into(),
        }
    }
}

use thiserror::Error;

pub type Result<T, E = ScatterError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ScatterError {
    #[error("{quantity} = {value} is outside the valid domain: {reason}")]
    Domain {
        quantity: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("derivative is singular at the threshold E = 0; start the grid at E > 0")]
    SingularThreshold,

    #[error("configuration error: {0}")]
    Config(String),

    #[error("missing fit constant `{0}`")]
    MissingConstant(&'static str),

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("solver failed at k = {k}: {reason}")]
    Solver { k: f64, reason: String },

    #[error(
        "grid too coarse between E = {e_lo} and E = {e_hi}: phase jump {jump:.4} rad \
         exceeds {limit:.4} rad, refine the grid on this interval"
    )]
    GridTooCoarse {
        e_lo: f64,
        e_hi: f64,
        jump: f64,
        limit: f64,
    },

    #[error("grid mismatch: expected {expected} points, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("division by sin(delta0) = 0: the single-center cross section vanishes")]
    VanishingSingleCenter,

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl ScatterError {
    pub(crate) fn domain(quantity: &'static str, value: f64, reason: &'static str) -> Self {
        ScatterError::Domain {
            quantity,
            value,
            reason,
        }
    }
}

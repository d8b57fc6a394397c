use scatter_core::ScatterError;
use thiserror::Error;

pub type Result<T, E = CliError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid `{field}`: {reason}")]
    Field { field: &'static str, reason: String },

    #[error("{context}")]
    Context {
        context: String,
        #[source]
        source: Box<dyn std::error::Error + Send + Sync>,
    },

    #[error(
        "{figure} needs the meson phase constants (b, f, d, x, gamma0_MeV, omega0_MeV, q0_MeV_c); \
         they are not bundled, pass a JSON file with --constants <path>"
    )]
    MissingConstants { figure: &'static str },

    #[error(transparent)]
    Scatter(#[from] ScatterError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub(crate) fn context(
        context: impl Into<String>,
        source: impl Into<Box<dyn std::error::Error + Send + Sync>>,
    ) -> Self {
        CliError::Context {
            context: context.into(),
            source: source.into(),
        }
    }
}

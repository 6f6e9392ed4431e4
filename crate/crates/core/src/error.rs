use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("parameter domain error: {0}")]
    ParameterDomain(String),

    #[error("allocation error: z[{index}] = {value} is outside 0..{k}")]
    Allocation {
        index: usize,
        value: usize,
        k: usize,
    },

    #[error("instance too large: {k}^{n} allocations exceeds the limit of {limit}")]
    InstanceTooLarge { n: usize, k: usize, limit: u64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    /// Adaptive quadrature gave up before reaching the requested tolerance.
    #[error("integration failed after {evaluations} evaluations: estimate {estimate:.6e}, error bound {abs_error:.3e} ({context})")]
    IntegrationFailure {
        estimate: f64,
        abs_error: f64,
        evaluations: usize,
        context: String,
    },

    #[error("degenerate Fisher information: {0}")]
    DegenerateInformation(String),

    #[error("boundary evaluation: {0}")]
    BoundaryEvaluation(String),

    #[error("chain initialization failed: {0}")]
    Initialization(String),

    #[error("empty trace")]
    EmptyTrace,

    #[error("estimator did not converge: {0}")]
    Estimator(String),

    #[error("dataset error: {0}")]
    Dataset(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Attach location context (e.g. the FIM index) to an integration failure.
    pub(crate) fn with_context(self, ctx: impl Into<String>) -> Self {
        match self {
            Error::IntegrationFailure {
                estimate,
                abs_error,
                evaluations,
                context,
            } => Error::IntegrationFailure {
                estimate,
                abs_error,
                evaluations,
                context: format!("{}; {context}", ctx.into()),
            },
            other => other,
        }
    }
}

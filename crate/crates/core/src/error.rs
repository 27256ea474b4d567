use thiserror::Error;

/// Errors raised by the point-cloud, homology and optimization routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: non-finite coordinate")]
    NonFinite { line: usize },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("k = {k} exceeds the {available} available candidates")]
    KTooLarge { k: usize, available: usize },
    #[error("{0}")]
    InvalidArgument(String),
    #[error(
        "estimated {estimated} simplices exceeds the limit of {limit}; set a filtration cap or raise the limit"
    )]
    SizeGuard { estimated: u128, limit: u128 },
    #[error("points {i} and {j} coincide on an active edge; gradient undefined")]
    CoincidentPoints { i: usize, j: usize },
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("loss increased for {streak} consecutive iterations (stopped at iteration {iteration})")]
    Divergence { iteration: usize, streak: usize },
    #[error("completion map failed: {0}")]
    Net(String),
    #[error("manifest: {0}")]
    Manifest(String),
}

impl Error {
    /// Short stable identifier for machine-readable error lines.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Io { .. } => "io",
            Error::Parse { .. } => "parse",
            Error::NonFinite { .. } => "non_finite",
            Error::EmptyCloud => "empty_cloud",
            Error::KTooLarge { .. } => "k_too_large",
            Error::InvalidArgument(_) => "invalid_argument",
            Error::SizeGuard { .. } => "size_guard",
            Error::CoincidentPoints { .. } => "coincident_points",
            Error::Degenerate(_) => "degenerate",
            Error::Divergence { .. } => "divergence",
            Error::Net(_) => "net",
            Error::Manifest(_) => "manifest",
        }
    }

    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("duplicate symbol: columns {0} and {1} coincide")]
    DuplicateSymbol(usize, usize),

    #[error("constellation needs at least two symbols, got {0}")]
    TooFewSymbols(usize),

    #[error("malformed priors: {0}")]
    InvalidPriors(String),

    #[error("all-zero constellation has no energy scale")]
    ZeroEnergy,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate geometry: {0}")]
    Degenerate(String),

    #[error("linear program failed: {0}")]
    Lp(String),

    #[error("reduced dimension {dim} exceeds the supported maximum {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("quadrature did not converge: {0}")]
    NonConvergence(String),

    #[error("grid does not resolve the integrand: {0}")]
    Grid(String),

    #[error("derivative order {0} exceeds 6")]
    OrderTooHigh(usize),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence(_) | Error::Lp(_) | Error::Grid(_) | Error::Degenerate(_)
        )
    }
}

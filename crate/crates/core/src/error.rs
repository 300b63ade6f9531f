use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid scenario: {0}")]
    InvalidScenario(String),
    #[error("invalid design: {0}")]
    InvalidDesign(String),
    #[error("invalid trial state: {0}")]
    InvalidState(String),
    #[error("invalid generator config: {0}")]
    InvalidConfig(String),
    #[error("no data to monotonize")]
    NoData,
    #[error("point design requires at least one observation")]
    PointNeedsData,
    #[error("infeasible bounds for alpha pool: no draw accepted after {0} attempts")]
    RejectionCapExceeded(usize),
    #[error("{0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

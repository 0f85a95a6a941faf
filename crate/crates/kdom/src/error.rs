use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config error: {0}")]
    Config(String),
    #[error("invalid item: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("out-of-order event: id {got} after {last}")]
    OutOfOrder { got: u64, last: u64 },
    #[error("cluster error: {0}")]
    Cluster(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

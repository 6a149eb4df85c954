use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid functions live on different grids")]
    GridMismatch,
    #[error("non-finite value at cell index {0}")]
    NonFinite(usize),
    #[error("nonzero value on the grid margin at cell index {0}")]
    SupportMargin(usize),
    #[error("{0} is not an integer power of the grid ratio")]
    NotRatioPower(f64),
    #[error("shifted support leaves the grid interior")]
    SupportExitsGrid,
    #[error("invalid parameter: {0}")]
    InvalidParam(String),
    #[error("invalid atom: {0}")]
    InvalidAtom(String),
}

pub type Result<T> = std::result::Result<T, Error>;

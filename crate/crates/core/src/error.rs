use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("cell index {index} out of range (grid has {count} cells)")]
    CellOutOfRange { index: usize, count: usize },
    #[error("cube {0} does not lie inside the grid")]
    CubeOutOfRange(String),
    #[error("cube {0} is not dyadic")]
    NotDyadic(String),
    #[error("delta {delta} outside (0, {n}]")]
    DeltaOutOfRange { delta: f64, n: usize },
    #[error("value {value} at cell {cell} is negative inside the integration region")]
    NegativeValue { cell: usize, value: f64 },
    #[error("weight value {value} at cell {cell} is not strictly positive")]
    NonPositiveWeight { cell: usize, value: f64 },
    #[error("non-finite value at cell {0}")]
    NonFinite(usize),
    #[error("step functions or sets live on different grids")]
    GridMismatch,
    #[error("value count {got} does not match grid cell count {expected}")]
    LengthMismatch { got: usize, expected: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("exponential overflow: {0}")]
    Overflow(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

pub type Result<T> = std::result::Result<T, Error>;

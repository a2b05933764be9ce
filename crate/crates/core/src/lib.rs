//! Exact dyadic Hausdorff content, Choquet integration and capacitary
//! oscillation spaces for step functions on dyadic grids.

pub mod choquet;
pub mod content;
pub mod cz;
pub mod error;
pub mod grid;
pub mod oscillation;
pub mod report;
pub mod verify;
pub mod weights;

pub use choquet::{
    choquet, choquet_on_cube, choquet_wrt, essential_bounds, jensen_sides, signed_average, EssentialBounds,
    JensenSides, SetFunction, SignedAverage, WeightedContent,
};
pub use content::{dyadic_content, weighted_content, Content, ContentParams};
pub use error::{Error, Result};
pub use grid::{
    enumerate_cubes, level_set, set_from_cells, Comparator, CubeFamilyPolicy, CubeSpec, DyadicSet, FamilyKind,
    FunctionFile, Grid, SetFile, StepFunction,
};
pub use report::VerificationReport;

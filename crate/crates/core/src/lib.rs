//! Estimate the algorithmic information content of flat binary signals,
//! perturb them, and infer the 2D/3D shape under which they are simplest.

pub mod bits;
pub mod complexity;
pub mod ctm;
pub mod encodings;
pub mod error;
pub mod fixtures;
pub mod landscape;
pub mod perturbation;
pub mod reconstruct;

pub use bits::{BitSignal, Grid, Shape};
pub use ctm::{build_table, CtmTable, Lookup, MachineSpace, Pattern};
pub use error::{Error, Result};

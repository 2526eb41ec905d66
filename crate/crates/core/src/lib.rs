//! Finite linear spaces as one-sorted structures with a ternary collinearity
//! relation, the predimension δ(A) = |A| - Σ_l (|l ∩ A| - 2), and the
//! machinery built on it: strong substructures, good pairs and their
//! canonical codes, μ-bounded amalgamation, and a seeded builder producing
//! finite approximations of strongly minimal Steiner systems.

pub mod amalgam;
mod canon;
pub mod dimension;
pub mod embed;
pub mod error;
pub mod format;
mod frame;
pub mod gallery;
pub mod interop;
pub mod mu;
pub mod pointset;
pub mod primitives;
pub mod builder;
pub mod sampling;
pub mod space;

pub use error::{Error, Result};
pub use pointset::PointSet;
pub use primitives::{CanonicalCode, GoodPair};
pub use space::{Line, LinearSpace, Point};

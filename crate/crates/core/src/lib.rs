//! Certified free subgroups for pairs of isometries of real hyperbolic space.
pub mod error;
pub mod certifier;
pub mod constants;
pub mod exact;
pub mod geometry;
pub mod isometry;
pub mod pingpong;
pub mod propcheck;
pub mod tubes;
pub mod word;

pub use error::{Error, Result};

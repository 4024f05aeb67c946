//! Exact symbolic analysis of weighted homogeneous rigid CR hypersurfaces
//! `Im w = P(z, z̄)` in ℂ^{n+1}.

pub mod algebra;
pub mod embed;
pub mod error;
pub mod linalg;
pub mod model;
pub mod report;
pub mod structure;
pub mod tangency;

pub use error::{Error, Result};

//! Numerical and analytic tools for the Feller property of weighted graphs.
//!
//! Infinite graphs are handled through finite truncations whose cut points are
//! flagged as a frontier. Every quantity computed near the frontier is either
//! rejected or reported as contaminated.

// `!(x > 0.0)` is used on purpose so NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod criteria;
pub mod evidence;
pub mod graph;
pub mod harmonic;
pub mod linalg;
pub mod model;
pub mod spectral;
pub mod values;

pub use evidence::{Conclusion, Evidence, Grade, ScEvidence, ScSource};
pub use graph::{Vertex, WeightedGraph};
pub use values::VertexValues;

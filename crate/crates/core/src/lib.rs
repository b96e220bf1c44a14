//! Lower bounds for the fundamental p-Laplacian eigenvalue on planar domains
//! with mixed Dirichlet and Neumann boundary parts.

// Negated comparisons such as `!(x > 0.0)` are used on purpose to reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod error;
pub mod geometry;
pub mod one_dim;
pub mod oracle;

//! Grid eigenvalue estimates used to referee every bound.

mod field;
mod grid;
pub mod linalg;
mod laplace;
mod rayleigh;

pub use field::{interpolate_gradient, node_gradient, normal_derivative, ScalarField};
pub use grid::{build_grid, Grid, Link, NodeKind, DIRECTIONS};
pub use laplace::{laplace_eigen_p2, LaplaceEigen, Laplacian};
pub use rayleigh::{mass_p, quadrature_check, rayleigh_minimize_p, PEnergy, RayleighResult};

use crate::error::OracleError;
use crate::geometry::{BoundaryPoint, Vec2};

use super::grid::{Grid, Link};

/// One value per inside node of a [`Grid`].
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(grid: &Grid, values: Vec<f64>) -> Result<Self, OracleError> {
        if values.len() != grid.n_inside() {
            return Err(OracleError::FieldMismatch(format!(
                "{} values for {} nodes",
                values.len(),
                grid.n_inside()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(OracleError::FieldMismatch("non-finite value".into()));
        }
        Ok(ScalarField { values })
    }

    pub fn from_fn(grid: &Grid, f: impl Fn(Vec2) -> f64) -> Self {
        ScalarField {
            values: grid.positions().map(f).collect(),
        }
    }

    pub fn zeros(grid: &Grid) -> Self {
        ScalarField {
            values: vec![0.0; grid.n_inside()],
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scaled(&self, s: f64) -> Self {
        ScalarField {
            values: self.values.iter().map(|v| v * s).collect(),
        }
    }

    /// Discrete `L^p` norm `(h^2 sum |v|^p)^(1/p)`.
    pub fn norm_p(&self, grid: &Grid, p: f64) -> f64 {
        let h2 = grid.h() * grid.h();
        (h2 * self.values.iter().map(|v| v.abs().powf(p)).sum::<f64>()).powf(1.0 / p)
    }

    pub(crate) fn check(&self, grid: &Grid) -> Result<(), OracleError> {
        if self.values.len() == grid.n_inside() {
            Ok(())
        } else {
            Err(OracleError::FieldMismatch(format!(
                "{} values for {} nodes",
                self.values.len(),
                grid.n_inside()
            )))
        }
    }
}

/// Value one lattice step away along link `slot`, extending the field by
/// linear extrapolation to zero across Dirichlet edges and by reflection
/// across Neumann edges.
pub(crate) fn neighbour_value(grid: &Grid, values: &[f64], idx: usize, slot: usize) -> f64 {
    let h = grid.h();
    match grid.links(idx)[slot] {
        Link::Inside(n) => values[n],
        Link::Dirichlet { delta } => {
            let delta = delta.max(0.1 * h);
            -values[idx] * (h - delta) / delta
        }
        Link::Neumann { .. } => values[idx],
    }
}

/// Centred-difference gradient at inside node `idx`.
pub fn node_gradient(grid: &Grid, values: &[f64], idx: usize) -> Vec2 {
    let h = grid.h();
    let v = |s| neighbour_value(grid, values, idx, s);
    Vec2::new((v(0) - v(1)) / (2.0 * h), (v(2) - v(3)) / (2.0 * h))
}

/// Gradient at an arbitrary point by bilinear interpolation of node gradients.
pub fn interpolate_gradient(grid: &Grid, values: &[f64], x: Vec2) -> Result<Vec2, OracleError> {
    interpolate_with(grid, x, |idx| node_gradient(grid, values, idx))
}

/// Bilinear interpolation of a per-node quantity, renormalized over the
/// cell corners that are inside the domain.
pub(crate) fn interpolate_with(
    grid: &Grid,
    x: Vec2,
    f: impl Fn(usize) -> Vec2,
) -> Result<Vec2, OracleError> {
    let outside = || OracleError::OutsideSupport { x: x.x, y: x.y };
    let (i, j, s, t) = grid.cell_of(x).ok_or_else(outside)?;
    let corners = [
        (0, 0, (1.0 - s) * (1.0 - t)),
        (1, 0, s * (1.0 - t)),
        (0, 1, (1.0 - s) * t),
        (1, 1, s * t),
    ];
    let mut acc = Vec2::default();
    let mut weight = 0.0;
    let mut plain = Vec2::default();
    let mut count = 0;
    for (di, dj, w) in corners {
        if let Some(idx) = grid.inside_index(i as i64 + di, j as i64 + dj) {
            let g = f(idx);
            acc = acc + g * w;
            weight += w;
            plain = plain + g;
            count += 1;
        }
    }
    if count == 0 {
        return Err(outside());
    }
    Ok(if weight > 1e-9 {
        acc / weight
    } else {
        plain / count as f64
    })
}

/// `nu . grad u` at each boundary sample, `nu` being the sample's own normal.
pub fn normal_derivative(
    grid: &Grid,
    u: &ScalarField,
    samples: &[BoundaryPoint],
) -> Result<Vec<f64>, OracleError> {
    u.check(grid)?;
    samples
        .iter()
        .map(|s| Ok(interpolate_gradient(grid, u.values(), s.position)?.dot(s.normal)))
        .collect()
}

use crate::error::OracleError;

use super::field::ScalarField;
use super::grid::{Grid, Link};
use super::linalg::{dot, norm, pcg, LinearOperator};

/// Five-point negative Laplacian on the inside nodes.
///
/// Dirichlet links at distance `delta` contribute `1 / (h max(delta, h/10))`
/// to the diagonal, which keeps the operator symmetric; Neumann links carry
/// no flux (mirror ghost).
pub struct Laplacian<'a> {
    grid: &'a Grid,
    diag: Vec<f64>,
}

impl<'a> Laplacian<'a> {
    pub fn new(grid: &'a Grid) -> Self {
        let h = grid.h();
        let diag = (0..grid.n_inside())
            .map(|idx| {
                grid.links(idx)
                    .iter()
                    .map(|l| match *l {
                        Link::Inside(_) => 1.0 / (h * h),
                        Link::Dirichlet { delta } => 1.0 / (h * delta.max(0.1 * h)),
                        Link::Neumann { .. } => 0.0,
                    })
                    .sum()
            })
            .collect();
        Laplacian { grid, diag }
    }
}

impl LinearOperator for Laplacian<'_> {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let ih2 = 1.0 / (self.grid.h() * self.grid.h());
        for (idx, out) in y.iter_mut().enumerate() {
            let mut acc = self.diag[idx] * x[idx];
            for l in self.grid.links(idx) {
                if let Link::Inside(n) = *l {
                    acc -= ih2 * x[n];
                }
            }
            *out = acc;
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }
}

/// Fundamental eigenpair of the discrete Laplacian.
#[derive(Clone, Debug)]
pub struct LaplaceEigen {
    pub eigenvalue: f64,
    /// Positive, with `h^2 sum u^2 = 1`.
    pub eigenfunction: ScalarField,
    pub iterations: usize,
    /// `|L u - lambda u| / lambda` in the same norm.
    pub residual: f64,
    pub warning: Option<String>,
}

pub const MAX_OUTER_ITERATIONS: usize = 500;

/// Smallest eigenpair by inverse power iteration with CG inner solves.
pub fn laplace_eigen_p2(grid: &Grid) -> Result<LaplaceEigen, OracleError> {
    let n = grid.n_inside();
    let h = grid.h();
    if !grid.has_dirichlet() {
        let c = 1.0 / (h * (n as f64).sqrt());
        return Ok(LaplaceEigen {
            eigenvalue: 0.0,
            eigenfunction: ScalarField::new(grid, vec![c; n])?,
            iterations: 0,
            residual: 0.0,
            warning: Some("no Dirichlet boundary: the fundamental eigenvalue is 0".into()),
        });
    }
    let op = Laplacian::new(grid);
    let (lo, hi) = grid.domain().bounding_box();
    let (w, ht) = (hi.x - lo.x, hi.y - lo.y);
    let mut u: Vec<f64> = grid
        .positions()
        .map(|x| {
            let s = (std::f64::consts::PI * (x.x - lo.x) / w).sin();
            let t = (std::f64::consts::PI * (x.y - lo.y) / ht).sin();
            (s * t).max(1e-3)
        })
        .collect();
    let unit = |u: &mut Vec<f64>| {
        let s = 1.0 / norm(u);
        u.iter_mut().for_each(|v| *v *= s);
    };
    unit(&mut u);
    let mut au = vec![0.0; n];
    op.apply(&u, &mut au);
    let mut lambda = dot(&u, &au);
    let mut x: Vec<f64> = u.iter().map(|v| v / lambda).collect();
    for it in 1..=MAX_OUTER_ITERATIONS {
        pcg(&op, &u, &mut x, 1e-10, 20 * n + 100);
        let mut next = x.clone();
        unit(&mut next);
        op.apply(&next, &mut au);
        let new_lambda = dot(&next, &au);
        let residual = au
            .iter()
            .zip(&next)
            .map(|(a, v)| (a - new_lambda * v).powi(2))
            .sum::<f64>()
            .sqrt()
            / new_lambda;
        let change = (new_lambda - lambda).abs() / new_lambda;
        u = next;
        lambda = new_lambda;
        x = u.iter().map(|v| v / lambda).collect();
        if change < 1e-8 && residual <= 1e-6 {
            let sign = if u.iter().sum::<f64>() < 0.0 { -1.0 } else { 1.0 };
            let scale = sign / h;
            return Ok(LaplaceEigen {
                eigenvalue: lambda,
                eigenfunction: ScalarField::new(grid, u.iter().map(|v| v * scale).collect())?,
                iterations: it,
                residual,
                warning: None,
            });
        }
    }
    Err(OracleError::NoConvergence {
        iterations: MAX_OUTER_ITERATIONS,
        value: lambda,
    })
}

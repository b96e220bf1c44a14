use crate::error::Error;
use crate::geometry::{BoundaryPart, Domain, Vec2};
use crate::one_dim::Exponent;
use crate::oracle::{build_grid, laplace_eigen_p2, normal_derivative};

use super::certificate::{BoundCertificate, Method};

const CONTAINMENT_LATTICE: usize = 48;

/// First point of `inner` (boundary sample or interior lattice point) found
/// outside the closed `outer`.
fn containment_witness(inner: &Domain, outer: &Domain, n_samples: usize) -> Option<Vec2> {
    let tol = 1e-9 * outer.diameter();
    let boundary = inner
        .sample_boundary(n_samples, BoundaryPart::WholeBoundary)
        .into_iter()
        .map(|s| s.position);
    let (lo, hi) = inner.bounding_box();
    let n = CONTAINMENT_LATTICE;
    let interior = (0..n * n)
        .map(move |k| {
            Vec2::new(
                lo.x + (hi.x - lo.x) * ((k % n) as f64 + 0.5) / n as f64,
                lo.y + (hi.y - lo.y) * ((k / n) as f64 + 0.5) / n as f64,
            )
        })
        .filter(|x| inner.contains(*x));
    boundary.chain(interior).find(|x| !outer.contains_closed(*x, tol))
}

/// Restricted monotonicity: the eigenvalue of a superdomain bounds that of
/// `inner` when the superdomain's eigenfunction does not decrease across the
/// Neumann part of `inner`. Linear case only.
pub fn monotonicity_bound(
    inner: &Domain,
    outer: &Domain,
    p: Exponent,
    grid_h: f64,
    n_boundary_samples: usize,
) -> Result<BoundCertificate, Error> {
    let mut cert = BoundCertificate::new(Method::Monotonicity, "superdomain");
    if !cert.hypothesis("linear_case", p.p() == 2.0, format!("p = {}", p.p())) {
        return Ok(cert);
    }
    let witness = containment_witness(inner, outer, n_boundary_samples);
    if !cert.hypothesis(
        "contained",
        witness.is_none(),
        match witness {
            Some(x) => format!("({:.6}, {:.6}) lies outside the superdomain", x.x, x.y),
            None => String::new(),
        },
    ) {
        return Ok(cert);
    }
    let grid = build_grid(outer, grid_h)?;
    let eig = laplace_eigen_p2(&grid)?;
    if let Some(w) = &eig.warning {
        cert.note(w.clone());
    }
    let samples = inner.sample_boundary(n_boundary_samples, BoundaryPart::NeumannPart);
    let slopes = normal_derivative(&grid, &eig.eigenfunction, &samples)?;
    let tol_gradient = 5.0 * grid.h();
    let worst = slopes
        .iter()
        .zip(&samples)
        .fold((f64::INFINITY, None), |a, (v, s)| if *v < a.0 { (*v, Some(s.position)) } else { a });
    let adm = &mut cert.admissibility;
    adm.n_samples = samples.len();
    adm.tolerance = tol_gradient;
    adm.max_boundary_violation = if samples.is_empty() { 0.0 } else { (-worst.0).max(0.0) };
    cert.param("min_normal_derivative", if samples.is_empty() { 0.0 } else { worst.0 });
    cert.param("superdomain_eigenvalue", eig.eigenvalue);
    cert.param("h", grid.h());
    let passed = samples.is_empty() || worst.0 >= -tol_gradient;
    cert.hypothesis(
        "eigenfunction_increasing",
        passed,
        match worst.1 {
            Some(x) => format!("min nu.grad u = {:.3e} at ({:.6}, {:.6})", worst.0, x.x, x.y),
            None => "no Neumann part".into(),
        },
    );
    cert.infimum_witness = worst.1;
    Ok(cert.conclude(eig.eigenvalue))
}

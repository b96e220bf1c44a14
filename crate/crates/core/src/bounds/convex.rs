use crate::error::Error;
use crate::geometry::{BoundaryPart, Domain};
use crate::one_dim::Exponent;

use super::certificate::{BoundCertificate, Method};
use super::hardy::hardy_constant;

/// Surface measure of the unit sphere in `R^d`.
pub fn sphere_measure(d: u32) -> f64 {
    use std::f64::consts::PI;
    match d {
        0 => 0.0,
        1 => 2.0,
        2 => 2.0 * PI,
        _ => 2.0 * PI / (d as f64 - 2.0) * sphere_measure(d - 2),
    }
}

/// Eccentricity bound for convex domains.
pub fn convex_bound(domain: &Domain, p: Exponent, d: u32, n_boundary_samples: usize) -> Result<BoundCertificate, Error> {
    let mut cert = BoundCertificate::new(Method::Convex, "eccentricity");
    let convex = domain.is_convex();
    if !cert.hypothesis("convex", convex, if convex { "" } else { "the domain is not convex" }) {
        return Ok(cert);
    }
    let eps = domain.eccentricity(p.p(), d, n_boundary_samples)?;
    let length = domain.boundary_length(BoundaryPart::DirichletPart);
    cert.param("epsilon", eps);
    cert.param("dirichlet_length", length);
    if eps == 0.0 {
        cert.note("eccentricity is 0: edge normals make boundary pairs collinear");
    }
    Ok(cert.conclude(hardy_constant(p) * eps * length / sphere_measure(d)))
}

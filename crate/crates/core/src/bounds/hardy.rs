use crate::geometry::{Domain, Label, Vec2};
use crate::one_dim::Exponent;
use crate::oracle::Grid;

use super::certificate::{BoundCertificate, Method};

/// `p^-p (p-1)^(p-2)`, the constant of the averaged-distance inequality.
pub fn hardy_constant(p: Exponent) -> f64 {
    let p = p.p();
    p.powf(-p) * (p - 1.0).powf(p - 2.0)
}

/// The weight `1/m(x)^p`: the angular mean of `d_u(x)^-p` over directions
/// whose first boundary hit is Dirichlet, other directions contributing 0.
pub fn m_function(domain: &Domain, x: Vec2, p: Exponent, n_angles: usize) -> f64 {
    let n = n_angles.max(8);
    let sum: f64 = domain
        .angular_hits(x, n)
        .into_iter()
        .flatten()
        .filter(|(_, label)| *label == Label::Dirichlet)
        .map(|(d, _)| d.powf(-p.p()))
        .sum();
    sum / n as f64
}

/// `hardy_constant * 1/m^p` at every inside node.
pub(crate) fn hardy_weights(domain: &Domain, grid: &Grid, p: Exponent, n_angles: usize) -> Vec<f64> {
    let c = hardy_constant(p);
    grid.positions().map(|x| c * m_function(domain, x, p, n_angles)).collect()
}

pub(crate) fn inf_with_witness(grid: &Grid, w: &[f64]) -> (f64, Option<Vec2>) {
    w.iter()
        .enumerate()
        .fold((f64::INFINITY, None), |(bv, bx), (i, &v)| {
            if v < bv {
                (v, Some(grid.position(i)))
            } else {
                (bv, bx)
            }
        })
}

/// Averaged-distance Hardy bound; needs no boundary hypothesis.
pub fn hardy_bound(domain: &Domain, p: Exponent, grid: &Grid, n_angles: usize) -> BoundCertificate {
    let mut cert = BoundCertificate::new(Method::Hardy, "averaged distance");
    let w = hardy_weights(domain, grid, p, n_angles);
    let (inf, witness) = inf_with_witness(grid, &w);
    cert.param("constant", hardy_constant(p));
    cert.param("n_angles", n_angles as f64);
    cert.infimum_witness = witness;
    if !inf.is_finite() {
        cert.hypothesis("interior_nodes", false, "grid has no interior nodes");
        return cert;
    }
    if inf == 0.0 {
        cert.note("some node sees no Dirichlet boundary; the weight vanishes there");
    }
    cert.conclude(inf)
}

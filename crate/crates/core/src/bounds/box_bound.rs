use std::collections::HashMap;
use std::sync::{Mutex, OnceLock};

use crate::error::Error;
use crate::geometry::{BoundaryPart, Domain, Vec2};
use crate::one_dim::{mu_I, mu_interval_closed_form, Exponent, DEFAULT_TOL};

use super::certificate::{BoundCertificate, Method};

const GRAPH_LINES: usize = 1024;

/// Shooting value of `mu_I`, cached per exponent: it costs a fine-mesh
/// bisection and is recorded by every box certificate.
fn shooting_mu(p: Exponent) -> Result<f64, Error> {
    static CACHE: OnceLock<Mutex<HashMap<u64, f64>>> = OnceLock::new();
    let cache = CACHE.get_or_init(Default::default);
    let key = p.p().to_bits();
    if let Some(v) = cache.lock().expect("cache lock").get(&key) {
        return Ok(*v);
    }
    let v = mu_I(p, DEFAULT_TOL)?;
    cache.lock().expect("cache lock").insert(key, v);
    Ok(v)
}

/// The four coordinate directions.
pub const AXES: [Vec2; 4] = [
    Vec2 { x: 1.0, y: 0.0 },
    Vec2 { x: -1.0, y: 0.0 },
    Vec2 { x: 0.0, y: 1.0 },
    Vec2 { x: 0.0, y: -1.0 },
];

/// Slab bound `mu_I / L^p` for a coordinate direction along which the
/// Neumann part faces backwards and is a graph.
pub fn box_bound(
    domain: &Domain,
    p: Exponent,
    direction: Vec2,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let dir = direction.normalized();
    let mut cert = BoundCertificate::new(
        Method::Box,
        format!("direction ({}, {})", dir.x, dir.y),
    );
    let is_axis = (dir.x.abs() - 1.0).abs() < 1e-12 || (dir.y.abs() - 1.0).abs() < 1e-12;
    if !cert.hypothesis("axis_direction", is_axis, format!("({}, {})", dir.x, dir.y)) {
        return Ok(cert);
    }
    let samples = domain.sample_boundary(n_boundary_samples, BoundaryPart::NeumannPart);
    let worst = samples
        .iter()
        .map(|s| (s.normal.dot(dir), s.position))
        .fold((f64::NEG_INFINITY, None), |a, (v, x)| if v > a.0 { (v, Some(x)) } else { a });
    let adm = &mut cert.admissibility;
    adm.n_samples = samples.len();
    adm.tolerance = tol;
    adm.max_boundary_violation = worst.0.max(0.0);
    let passed = worst.0 <= tol;
    cert.hypothesis(
        "neumann_sign",
        passed,
        match worst.1 {
            Some(x) if !passed => format!("nu.e = {:.3} at ({:.6}, {:.6})", worst.0, x.x, x.y),
            _ => format!("{} samples", samples.len()),
        },
    );
    let (crossings, witness) = domain.max_line_crossings(BoundaryPart::NeumannPart, dir, GRAPH_LINES);
    cert.hypothesis(
        "neumann_graph",
        crossings <= 1,
        match witness {
            Some(w) if crossings > 1 => format!("{crossings} crossings near ({:.6}, {:.6})", w.x, w.y),
            _ => format!("at most {crossings} crossing per line"),
        },
    );
    let length = domain.directional_extent(dir);
    let mu = mu_interval_closed_form(p.p());
    cert.param("L", length);
    cert.param("mu_I", mu);
    cert.param("mu_I_shooting", shooting_mu(p)?);
    Ok(cert.conclude(mu / length.powf(p.p())))
}

/// Best of the four axis directions, or the first failure if none applies.
pub fn best_box_bound(
    domain: &Domain,
    p: Exponent,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let mut best: Option<BoundCertificate> = None;
    for dir in AXES {
        let c = box_bound(domain, p, dir, n_boundary_samples, tol)?;
        best = match best {
            None => Some(c),
            Some(b) if c.value.unwrap_or(-1.0) > b.value.unwrap_or(-1.0) => Some(c),
            keep => keep,
        };
    }
    Ok(best.expect("four axes"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{l_shape, rectangle, unit_square};
    use crate::geometry::Label::{Dirichlet as D, Neumann as N};
    use std::f64::consts::PI;

    fn ex(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn neumann_west_square() {
        let c = box_bound(&unit_square([D, D, D, N]), ex(2.0), Vec2::new(1.0, 0.0), 512, 1e-9).unwrap();
        assert!((c.value.unwrap() - PI * PI / 4.0).abs() < 1e-8);
    }

    #[test]
    fn long_rectangle() {
        let dom = rectangle(0.0, 0.0, 2.0, 1.0, [D, D, D, N]);
        let c = box_bound(&dom, ex(2.0), Vec2::new(1.0, 0.0), 512, 1e-9).unwrap();
        assert!((c.value.unwrap() - PI * PI / 16.0).abs() < 1e-8);
        assert_eq!(c.parameters["L"], 2.0);
    }

    #[test]
    fn wrong_facing_edge_is_rejected() {
        let c = box_bound(&unit_square([D, N, D, D]), ex(2.0), Vec2::new(1.0, 0.0), 512, 1e-9).unwrap();
        assert!(c.failure_reason().unwrap().starts_with("neumann_sign"));
        let best = best_box_bound(&unit_square([D, N, D, D]), ex(2.0), 512, 1e-9).unwrap();
        assert_eq!(best.parameters["L"], 1.0);
        assert!(best.is_applicable());
    }

    #[test]
    fn non_axis_direction_is_rejected() {
        let c = box_bound(&l_shape(), ex(2.0), Vec2::new(1.0, 1.0), 64, 1e-9).unwrap();
        assert!(!c.is_applicable());
    }

    #[test]
    fn p_three_constant() {
        let c = box_bound(&unit_square([D, D, D, N]), ex(3.0), Vec2::new(1.0, 0.0), 64, 1e-9).unwrap();
        let v = c.value.unwrap();
        assert!((v - 3.5361).abs() < 1e-3, "{v}");
        assert!((c.parameters["mu_I_shooting"] - v).abs() < 1e-5 * v);
    }
}

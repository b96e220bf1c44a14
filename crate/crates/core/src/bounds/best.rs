use crate::error::Error;
use crate::geometry::Domain;
use crate::one_dim::Exponent;
use crate::oracle::{build_grid, laplace_eigen_p2, rayleigh_minimize_p, Grid, ScalarField};

use super::annulus::annulus_bound;
use super::boggio::boggio_bound;
use super::box_bound::best_box_bound;
use super::certificate::{BoundCertificate, Method};
use super::convex::convex_bound;
use super::field::VectorFieldSpec;
use super::hardy::hardy_bound;
use super::monotonicity::monotonicity_bound;
use super::radial::{mixed_bound, radial_hardy_bound};

/// Resolution and sampling settings shared by every bound.
#[derive(Clone, Debug)]
pub struct BoundConfig {
    pub grid_h: f64,
    pub n_angles: usize,
    pub n_boundary_samples: usize,
    /// Relative admissibility tolerance.
    pub tol: f64,
    pub gamma_steps: usize,
    /// Enables the monotonicity bound.
    pub superdomain: Option<Domain>,
}

impl Default for BoundConfig {
    fn default() -> Self {
        BoundConfig {
            grid_h: 1.0 / 64.0,
            n_angles: 360,
            n_boundary_samples: 2048,
            tol: 1e-9,
            gamma_steps: 65,
            superdomain: None,
        }
    }
}

fn failed(method: Method, err: Error) -> BoundCertificate {
    let mut c = BoundCertificate::new(method, "evaluation failed");
    c.hypothesis("evaluated", false, err.to_string());
    c
}

fn settle(method: Method, r: Result<BoundCertificate, Error>) -> BoundCertificate {
    r.unwrap_or_else(|e| failed(method, e))
}

/// Oracle eigenfunction used as the comparison function of the standard form.
fn comparison_function(grid: &Grid, p: Exponent) -> Result<ScalarField, Error> {
    if p.p() == 2.0 {
        Ok(laplace_eigen_p2(grid)?.eigenfunction)
    } else {
        Ok(rayleigh_minimize_p(grid, p.p(), None)?.minimizer)
    }
}

/// Runs every bound and returns the certificates, applicable ones first by
/// decreasing value.
pub fn best_bound(domain: &Domain, p: Exponent, d: u32, config: &BoundConfig) -> Result<Vec<BoundCertificate>, Error> {
    let grid = build_grid(domain, config.grid_h)?;
    let (n, tol) = (config.n_boundary_samples, config.tol);
    let mut out = Vec::new();

    out.push(settle(
        Method::Boggio,
        comparison_function(&grid, p).and_then(|phi| {
            boggio_bound(domain, p, &VectorFieldSpec::StandardForm { phi }, &grid, n, tol)
        }),
    ));
    out.push(hardy_bound(domain, p, &grid, config.n_angles));
    out.push(settle(Method::RadialHardy, radial_hardy_bound(domain, p, d, &grid, n, tol)));
    out.push(settle(
        Method::Mixed,
        mixed_bound(domain, p, d, &grid, config.n_angles, config.gamma_steps, n, tol),
    ));
    out.push(settle(Method::Box, best_box_bound(domain, p, n, tol)));
    out.push(settle(Method::Annulus, annulus_bound(domain, p, d, tol)));
    out.push(settle(Method::Convex, convex_bound(domain, p, d, n)));
    if let Some(outer) = &config.superdomain {
        out.push(settle(
            Method::Monotonicity,
            monotonicity_bound(domain, outer, p, config.grid_h, n),
        ));
    }
    sort_certificates(&mut out);
    Ok(out)
}

pub fn sort_certificates(certs: &mut [BoundCertificate]) {
    certs.sort_by(|a, b| match (a.value, b.value) {
        (Some(x), Some(y)) => y.total_cmp(&x),
        (Some(_), None) => std::cmp::Ordering::Less,
        (None, Some(_)) => std::cmp::Ordering::Greater,
        (None, None) => a.method.cmp(&b.method),
    });
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{annular_sector, unit_square};
    use crate::geometry::Label::{Dirichlet as D, Neumann as N};
    use std::f64::consts::FRAC_PI_2;

    fn ex(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    fn quick() -> BoundConfig {
        BoundConfig {
            grid_h: 1.0 / 32.0,
            n_angles: 180,
            n_boundary_samples: 512,
            ..BoundConfig::default()
        }
    }

    fn find(certs: &[BoundCertificate], m: Method) -> &BoundCertificate {
        certs.iter().find(|c| c.method == m).unwrap()
    }

    #[test]
    fn dirichlet_square_gating() {
        let certs = best_bound(&unit_square([D; 4]), ex(2.0), 2, &quick()).unwrap();
        assert!(find(&certs, Method::Hardy).is_applicable());
        assert!(find(&certs, Method::Boggio).is_applicable());
        assert!(!find(&certs, Method::RadialHardy).is_applicable());
        assert!(!find(&certs, Method::Annulus).is_applicable());
        let values: Vec<f64> = certs.iter().filter_map(|c| c.value).collect();
        assert!(values.windows(2).all(|w| w[0] >= w[1]));
        let first_none = certs.iter().position(|c| c.value.is_none()).unwrap();
        assert!(certs[first_none..].iter().all(|c| c.value.is_none()));
    }

    #[test]
    fn annular_sector_applicability() {
        let dom = annular_sector(1.0, 2.0, FRAC_PI_2, 64, N, D, D);
        let certs = best_bound(&dom, ex(1.5), 2, &quick()).unwrap();
        for m in [Method::RadialHardy, Method::Mixed, Method::Annulus, Method::Hardy] {
            assert!(find(&certs, m).is_applicable(), "{m}");
        }
    }
}

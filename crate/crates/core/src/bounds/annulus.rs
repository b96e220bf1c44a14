use crate::error::Error;
use crate::geometry::{BoundaryPart, Domain};
use crate::one_dim::{radial_eigenvalue, Arrangement, Exponent, RadialEigenProblem};

use super::certificate::{BoundCertificate, Method};

const STARLIKE_RAYS: usize = 720;
const NEUMANN_SAMPLES: usize = 1024;
const INTERIOR_LATTICE: usize = 64;

/// Mean distance from `origin` over a uniform lattice of interior points.
fn interior_mean_radius(domain: &Domain, origin: crate::geometry::Vec2) -> f64 {
    let (lo, hi) = domain.bounding_box();
    let n = INTERIOR_LATTICE;
    let mut sum = 0.0;
    let mut count = 0usize;
    for j in 0..n {
        for i in 0..n {
            let x = crate::geometry::Vec2::new(
                lo.x + (hi.x - lo.x) * (i as f64 + 0.5) / n as f64,
                lo.y + (hi.y - lo.y) * (j as f64 + 0.5) / n as f64,
            );
            if domain.contains(x) {
                sum += (x - origin).norm();
                count += 1;
            }
        }
    }
    sum / count.max(1) as f64
}

/// Comparison with the radial eigenvalue of the annulus spanned by the
/// domain's radial extent about its origin.
pub fn annulus_bound(domain: &Domain, p: Exponent, d: u32, tol: f64) -> Result<BoundCertificate, Error> {
    let mut cert = BoundCertificate::new(Method::Annulus, "radial comparison");
    let Some(origin) = domain.origin() else {
        cert.hypothesis("origin_present", false, "the domain has no origin");
        return Ok(cert);
    };
    let outside = !domain.contains_closed(origin, 1e-9 * domain.diameter());
    if !cert.hypothesis("origin_outside", outside, format!("origin ({:.6}, {:.6})", origin.x, origin.y)) {
        return Ok(cert);
    }
    let star = domain.is_starlike_from_origin(BoundaryPart::NeumannPart, STARLIKE_RAYS)?;
    cert.hypothesis("neumann_starlike", star.holds, format!("max {} crossings", star.max_crossings));

    let (r, big_r) = domain.radial_extent()?;
    cert.param("r", r);
    cert.param("R", big_r);
    let samples = domain.sample_boundary(NEUMANN_SAMPLES, BoundaryPart::NeumannPart);
    let arrangement = if samples.is_empty() {
        cert.detail = "no Neumann part".into();
        Arrangement::DirichletBoth
    } else {
        let radii: Vec<f64> = samples.iter().map(|s| (s.position - origin).norm()).collect();
        let mean_n = radii.iter().sum::<f64>() / radii.len() as f64;
        let (min_n, max_n) = radii
            .iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| (a.min(v), b.max(v)));
        let mean_i = interior_mean_radius(domain, origin);
        cert.param("neumann_mean_radius", mean_n);
        cert.param("interior_mean_radius", mean_i);
        let straddles = min_n <= mean_i && mean_i <= max_n;
        if !cert.hypothesis(
            "case_determined",
            !straddles,
            format!("Neumann radii [{min_n:.6}, {max_n:.6}], interior mean {mean_i:.6}"),
        ) {
            return Ok(cert);
        }
        let inner = mean_n < mean_i;
        // Inner Neumann needs nu . x <= 0, outer Neumann needs nu . x >= 0.
        let sign = if inner { 1.0 } else { -1.0 };
        let worst = samples
            .iter()
            .map(|s| sign * s.normal.dot((s.position - origin).normalized()))
            .fold(f64::NEG_INFINITY, f64::max);
        let adm = &mut cert.admissibility;
        adm.n_samples = samples.len();
        adm.tolerance = tol;
        adm.max_boundary_violation = worst.max(0.0);
        cert.hypothesis("neumann_sign", worst <= tol, format!("worst radial component {worst:.3e}"));
        if inner {
            cert.detail = "alpha: Neumann inner".into();
            Arrangement::NeumannInnerDirichletOuter
        } else {
            cert.detail = "beta: Neumann outer".into();
            Arrangement::DirichletInnerNeumannOuter
        }
    };
    if !cert.all_passed() {
        return Ok(cert);
    }
    let problem = RadialEigenProblem::new(r, big_r, p.p(), d, arrangement)?;
    let result = radial_eigenvalue(&problem, 1e-10)?;
    cert.param("shooting_residual", result.shooting_residual);
    Ok(cert.conclude(result.eigenvalue))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{annular_sector, annulus, unit_square};
    use crate::geometry::Label::{Dirichlet as D, Neumann as N};
    use crate::geometry::Vec2;
    use std::f64::consts::FRAC_PI_2;

    fn ex(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn full_annulus_alpha() {
        let dom = annulus(0.5, 1.0, 256, N, D);
        let c = annulus_bound(&dom, ex(2.0), 2, 1e-9).unwrap();
        assert!(c.detail.starts_with("alpha"));
        let v = c.value.unwrap();
        let (r, big_r) = dom.radial_extent().unwrap();
        let want = radial_eigenvalue(
            &RadialEigenProblem::new(r, big_r, 2.0, 2, Arrangement::NeumannInnerDirichletOuter).unwrap(),
            1e-10,
        )
        .unwrap()
        .eigenvalue;
        assert!((v - want).abs() < 1e-12);
    }

    #[test]
    fn outer_neumann_is_beta() {
        let dom = annular_sector(1.0, 2.0, FRAC_PI_2, 64, D, N, D);
        let c = annulus_bound(&dom, ex(3.0), 2, 1e-9).unwrap();
        assert!(c.detail.starts_with("beta"), "{}", c.detail);
        assert!(c.is_applicable());
    }

    #[test]
    fn dilation() {
        let dom = annular_sector(1.0, 2.0, FRAC_PI_2, 64, N, D, D);
        let base = annulus_bound(&dom, ex(2.0), 2, 1e-9).unwrap().value.unwrap();
        let big = annulus_bound(&dom.scaled(2.0), ex(2.0), 2, 1e-9).unwrap().value.unwrap();
        assert!((big * 4.0 - base).abs() < 1e-6 * base);
    }

    #[test]
    fn straddling_neumann_is_ambiguous() {
        let dom = annular_sector(1.0, 2.0, FRAC_PI_2, 32, D, D, N);
        let c = annulus_bound(&dom, ex(2.0), 2, 1e-9).unwrap();
        assert!(c.failure_reason().unwrap().starts_with("case_determined"));
    }

    #[test]
    fn needs_origin() {
        let c = annulus_bound(&unit_square([D; 4]), ex(2.0), 2, 1e-9).unwrap();
        assert!(!c.is_applicable());
        let shifted = unit_square([D; 4]).with_origin(Some(Vec2::new(-1.0, 0.5)));
        let c = annulus_bound(&shifted, ex(2.0), 2, 1e-9).unwrap();
        assert!(c.is_applicable());
        assert!(c.detail.contains("no Neumann"));
    }
}

use crate::error::{Error, OracleError};
use crate::geometry::{BoundaryPart, Domain, Vec2};
use crate::one_dim::Exponent;
use crate::oracle::{node_gradient, Grid};

use super::certificate::{BoundCertificate, Method};
use super::field::{boundary_q, node_terms, NodeTerms, Profile, VectorFieldSpec};

const GOLDEN: f64 = 0.618_033_988_749_894_9;

/// Golden-section maximization of a unimodal `f` on `[a, b]`.
pub(crate) fn golden_max(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, iterations: usize) -> (f64, f64) {
    let mut x1 = b - GOLDEN * (b - a);
    let mut x2 = a + GOLDEN * (b - a);
    let (mut f1, mut f2) = (f(x1), f(x2));
    for _ in 0..iterations {
        if f1 < f2 {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + GOLDEN * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - GOLDEN * (b - a);
            f1 = f(x1);
        }
    }
    if f1 >= f2 {
        (x1, f1)
    } else {
        (x2, f2)
    }
}

fn argmin(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .enumerate()
        .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) })
}

/// `nu . Q` at a boundary point, given position and normal.
type Violation<'a> = Box<dyn Fn(Vec2, Vec2) -> Result<f64, Error> + 'a>;

/// Samples `nu . Q` on the Neumann boundary and records the sign hypothesis.
#[allow(clippy::too_many_arguments)]
fn check_neumann_sign(
    cert: &mut BoundCertificate,
    domain: &Domain,
    grid: &Grid,
    spec: &VectorFieldSpec,
    p: Exponent,
    terms: &NodeTerms,
    n_samples: usize,
    tol: f64,
) -> Result<(), Error> {
    let samples = domain.sample_boundary(n_samples, BoundaryPart::NeumannPart);
    let scale = terms.q.iter().map(|q| q.norm()).fold(0.0, f64::max);
    let (violation_of, tolerance): (Violation, f64) = match spec {
        // The sign of nu . Q is that of -nu . grad Phi; testing the gradient
        // avoids dividing by the vanishing Phi near Dirichlet corners.
        VectorFieldSpec::StandardForm { phi } => {
            let gmax = (0..grid.n_inside())
                .map(|i| node_gradient(grid, phi.values(), i).norm())
                .fold(0.0, f64::max);
            let pv = p.p();
            let f = move |x: Vec2, nu: Vec2| -> Result<f64, Error> {
                let g = crate::oracle::interpolate_gradient(grid, phi.values(), x)?;
                let n = g.norm();
                Ok(if n == 0.0 { 0.0 } else { -n.powf(pv - 2.0) * g.dot(nu) })
            };
            (Box::new(f), tol.max(5.0 * grid.h()) * gmax.powf(pv - 1.0))
        }
        _ => {
            let f = |x: Vec2, nu: Vec2| -> Result<f64, Error> {
                Ok(boundary_q(spec, grid, p, x)?.dot(nu))
            };
            (Box::new(f), tol * scale.max(f64::MIN_POSITIVE))
        }
    };
    let mut worst = (f64::NEG_INFINITY, None);
    let mut skipped = 0;
    for s in &samples {
        match violation_of(s.position, s.normal) {
            Ok(v) => {
                if v > worst.0 {
                    worst = (v, Some(s.position));
                }
            }
            Err(Error::Oracle(OracleError::OutsideSupport { .. })) => skipped += 1,
            Err(e) => return Err(e),
        }
    }
    let adm = &mut cert.admissibility;
    adm.n_samples = samples.len() - skipped;
    adm.tolerance = tolerance;
    adm.max_boundary_violation = worst.0.max(0.0);
    if skipped > 0 {
        cert.note(format!("{skipped} Neumann samples fell outside the field's support"));
    }
    let passed = worst.0 <= tolerance;
    let detail = match (passed, worst.1) {
        (true, _) | (false, None) => format!("max nu.Q = {:.3e} over {} samples", worst.0.max(0.0), samples.len() - skipped),
        (false, Some(x)) => format!("nu.Q = {:.3e} at ({:.6}, {:.6})", worst.0, x.x, x.y),
    };
    cert.hypothesis("neumann_sign", passed, detail);
    Ok(())
}

fn finish(mut cert: BoundCertificate, grid: &Grid, w: &[f64]) -> BoundCertificate {
    if w.is_empty() {
        cert.hypothesis("interior_nodes", false, "grid has no interior nodes");
        return cert.conclude(0.0);
    }
    let (i, raw) = argmin(w);
    cert.param("raw_infimum", raw);
    cert.infimum_witness = Some(grid.position(i));
    if raw < 0.0 {
        cert.note("negative infimum clamped to 0");
    }
    cert.conclude(raw.max(0.0))
}

/// Lower bound `inf (div Q - (p-1)|Q|^p')` from a vector field whose
/// Neumann flux is nonpositive.
pub fn boggio_bound(
    domain: &Domain,
    p: Exponent,
    spec: &VectorFieldSpec,
    grid: &Grid,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let mut cert = BoundCertificate::new(Method::Boggio, spec.name());
    let terms = node_terms(spec, grid, p)?;
    check_neumann_sign(&mut cert, domain, grid, spec, p, &terms, n_boundary_samples, tol)?;
    cert.param("t", 1.0);
    Ok(finish(cert, grid, &terms.w))
}

/// Boggio bound for `Q = q(x . u) u`; the profile must be nonnegative.
pub fn directional_boggio_bound(
    domain: &Domain,
    p: Exponent,
    u: Vec2,
    q: &Profile,
    grid: &Grid,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let u = u.normalized();
    let mut cert = BoundCertificate::new(Method::Boggio, format!("ConstantDirection ({})", q.name()));
    let spec = VectorFieldSpec::ConstantDirection { u, q: q.clone() };
    let terms = node_terms(&spec, grid, p)?;
    let neg = grid
        .positions()
        .chain(domain.sample_boundary(n_boundary_samples, BoundaryPart::NeumannPart).iter().map(|s| s.position))
        .map(|x| (q.value(x.dot(u)), x))
        .fold((0.0, None), |acc, (v, x)| if v < acc.0 { (v, Some(x)) } else { acc });
    match neg.1 {
        Some(x) => {
            cert.hypothesis(
                "profile_nonnegative",
                false,
                format!("q = {:.3e} at ({:.6}, {:.6})", neg.0, x.x, x.y),
            );
            cert.note("the weight uses q^p', which is undefined for negative q");
        }
        None => {
            cert.hypothesis("profile_nonnegative", true, "q >= 0 at all samples");
        }
    }
    check_neumann_sign(&mut cert, domain, grid, &spec, p, &terms, n_boundary_samples, tol)?;
    cert.param("u_x", u.x);
    cert.param("u_y", u.y);
    Ok(finish(cert, grid, &terms.w))
}

/// Best Boggio bound over the family `t Q`, `t > 0`.
pub fn optimize_scale(
    domain: &Domain,
    p: Exponent,
    spec: &VectorFieldSpec,
    grid: &Grid,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let mut cert = BoundCertificate::new(Method::Boggio, format!("{} (scaled)", spec.name()));
    let terms = node_terms(spec, grid, p)?;
    check_neumann_sign(&mut cert, domain, grid, spec, p, &terms, n_boundary_samples, tol)?;
    let pv = p.p();
    let dual = p.dual();
    let b: Vec<f64> = terms.q.iter().map(|q| (pv - 1.0) * q.norm().powf(dual)).collect();
    let g = |t: f64| {
        terms
            .div
            .iter()
            .zip(&b)
            .map(|(d, b)| t * d - t.powf(dual) * b)
            .fold(f64::INFINITY, f64::min)
    };
    let t_max = terms
        .div
        .iter()
        .zip(&b)
        .filter(|(d, b)| **d > 0.0 && **b > 0.0)
        .map(|(d, b)| (d / (dual * b)).powf(pv - 1.0))
        .fold(1.0, f64::max)
        .min(1e6);
    let (mut t, mut best) = golden_max(g, 0.0, t_max, 200);
    let at_one = g(1.0);
    if at_one >= best {
        t = 1.0;
        best = at_one;
    }
    if best <= 0.0 {
        t = 0.0;
    }
    cert.param("t", t);
    cert.param("t_max", t_max);
    let w: Vec<f64> = terms.div.iter().zip(&b).map(|(d, b)| t * d - t.powf(dual) * b).collect();
    Ok(finish(cert, grid, &w))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{disk, rectangle, unit_square};
    use crate::geometry::Label::{Dirichlet as D, Neumann as N};
    use crate::one_dim::mu_I;
    use crate::oracle::{build_grid, laplace_eigen_p2};
    use crate::bounds::field::LatticeField;

    fn ex(p: f64) -> Exponent {
        Exponent::new(p).unwrap()
    }

    #[test]
    fn zero_field_is_vacuous_but_valid() {
        let dom = unit_square([D, D, D, N]);
        let grid = build_grid(&dom, 1.0 / 16.0).unwrap();
        let c = boggio_bound(&dom, ex(2.0), &VectorFieldSpec::zero(&grid), &grid, 256, 1e-9).unwrap();
        assert_eq!(c.value, Some(0.0));
        let c = optimize_scale(&dom, ex(2.0), &VectorFieldSpec::zero(&grid), &grid, 256, 1e-9).unwrap();
        assert_eq!(c.value, Some(0.0));
    }

    #[test]
    fn half_position_field_on_disk() {
        let dom = disk(Vec2::default(), 1.0, 256, D, false);
        let grid = build_grid(&dom, 1.0 / 64.0).unwrap();
        let spec = VectorFieldSpec::GridField(LatticeField::from_fn(&grid, |x| x * 0.5));
        let c = boggio_bound(&dom, ex(2.0), &spec, &grid, 256, 1e-9).unwrap();
        let v = c.value.unwrap();
        assert!((0.75..0.76).contains(&v), "{v}");
        assert!(c.infimum_witness.unwrap().norm() > 0.95);
        let s = optimize_scale(&dom, ex(2.0), &spec, &grid, 256, 1e-9).unwrap();
        let sv = s.value.unwrap();
        assert!((sv - 1.0).abs() < 0.02 && sv >= v, "{sv}");
        assert!((s.parameters["t"] - 2.0).abs() < 0.05);
    }

    #[test]
    fn outward_field_on_neumann_edge_is_rejected() {
        let dom = unit_square([D, N, D, D]);
        let grid = build_grid(&dom, 1.0 / 16.0).unwrap();
        let spec = VectorFieldSpec::GridField(LatticeField::from_fn(&grid, |x| x * 0.5));
        let c = boggio_bound(&dom, ex(2.0), &spec, &grid, 256, 1e-9).unwrap();
        assert!(!c.is_applicable());
        assert!(c.failure_reason().unwrap().starts_with("neumann_sign"));
    }

    #[test]
    fn linear_profile() {
        let dom = unit_square([D; 4]);
        let grid = build_grid(&dom, 1.0 / 64.0).unwrap();
        for k in [0.25, 0.5, 0.8] {
            let c = directional_boggio_bound(&dom, ex(2.0), Vec2::new(1.0, 0.0), &Profile::linear(k, 0.0), &grid, 64, 1e-9)
                .unwrap();
            let v = c.value.unwrap();
            assert!(v >= k - k * k - 1e-9 && v < k - k * k + 2.0 * k * k / 64.0, "k={k}: {v}");
        }
        let neg = Profile::linear(1.0, 0.5);
        let c = directional_boggio_bound(&dom, ex(2.0), Vec2::new(1.0, 0.0), &neg, &grid, 64, 1e-9).unwrap();
        assert!(!c.is_applicable());
    }

    #[test]
    fn interval_profile_recovers_box_constant() {
        for p in [2.0, 3.0] {
            let dom = rectangle(0.0, 0.0, 2.0, 1.0, [D, D, D, N]);
            let grid = build_grid(&dom, 1.0 / 32.0).unwrap();
            let prof = Profile::from_interval_mode(ex(p), 0.0, 2.0).unwrap();
            let c = directional_boggio_bound(&dom, ex(p), Vec2::new(1.0, 0.0), &prof, &grid, 256, 1e-9).unwrap();
            let want = mu_I(ex(p), 1e-10).unwrap() / 2f64.powf(p);
            let v = c.value.unwrap();
            assert!((v - want).abs() < 0.01 * want, "p={p}: {v} vs {want}");
        }
    }

    #[test]
    fn standard_form_recovers_eigenvalue() {
        let dom = unit_square([D; 4]);
        let grid = build_grid(&dom, 1.0 / 64.0).unwrap();
        let eig = laplace_eigen_p2(&grid).unwrap();
        let spec = VectorFieldSpec::StandardForm {
            phi: eig.eigenfunction.clone(),
        };
        let c = boggio_bound(&dom, ex(2.0), &spec, &grid, 256, 1e-9).unwrap();
        let v = c.value.unwrap();
        assert!(v >= 0.95 * eig.eigenvalue && v <= eig.eigenvalue * (1.0 + 1e-6), "{v}");
    }

    #[test]
    fn golden_section_finds_parabola_peak() {
        let (x, f) = golden_max(|t| t - t * t / 4.0, 0.0, 10.0, 100);
        assert!((x - 2.0).abs() < 1e-6 && (f - 1.0).abs() < 1e-12);
    }
}

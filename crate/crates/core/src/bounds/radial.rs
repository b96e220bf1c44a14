use crate::error::Error;
use crate::geometry::{BoundaryPart, Domain, Vec2};
use crate::one_dim::Exponent;
use crate::oracle::Grid;

use super::boggio::golden_max;
use super::certificate::{BoundCertificate, Method};
use super::field::{field_eval, VectorFieldSpec};
use super::hardy::{hardy_weights, inf_with_witness};

const STARLIKE_RAYS: usize = 720;

/// `(|d-p|/p)^p`, the radial Hardy constant.
pub fn radial_constant(p: Exponent, d: u32) -> f64 {
    let pv = p.p();
    ((d as f64 - pv).abs() / pv).powf(pv)
}

/// The field used by the radial bound for this `(p, d)`.
pub fn radial_field(p: Exponent, d: u32, origin: Vec2) -> VectorFieldSpec {
    let pv = p.p();
    let c = ((d as f64 - pv).abs() / pv).powf(pv - 1.0);
    if pv < d as f64 {
        VectorFieldSpec::RadialAttract { c, origin, d }
    } else {
        VectorFieldSpec::RadialRepel { c, origin, d }
    }
}

fn farthest_vertex(domain: &Domain, origin: Vec2) -> Vec2 {
    domain.outer().vertices().iter().copied().fold(origin, |best, v| {
        if (v - origin).norm() > (best - origin).norm() {
            v
        } else {
            best
        }
    })
}

/// Radial Hardy bound `(|d-p|/p)^p / r_max^p` about the domain's origin.
///
/// The weight `(|d-p|/(p|x|))^p` is smallest where `|x|` is largest, so the
/// value uses `r_max = sup |x|` over the domain.
pub fn radial_hardy_bound(
    domain: &Domain,
    p: Exponent,
    d: u32,
    grid: &Grid,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let pv = p.p();
    let variant = if pv < d as f64 { "attracting" } else { "repelling" };
    let mut cert = BoundCertificate::new(Method::RadialHardy, variant);
    let Some(origin) = domain.origin() else {
        cert.hypothesis("origin_present", false, "the domain has no origin");
        return Ok(cert);
    };
    if pv == d as f64 {
        cert.hypothesis("p_differs_from_d", false, "the constant vanishes for p = d; use the annulus bound");
        return Ok(cert);
    }
    let outside = !domain.contains_closed(origin, 1e-9 * domain.diameter());
    cert.hypothesis(
        "origin_outside",
        outside,
        format!("origin ({:.6}, {:.6})", origin.x, origin.y),
    );
    if !outside {
        return Ok(cert);
    }
    let star = domain.is_starlike_from_origin(BoundaryPart::NeumannPart, STARLIKE_RAYS)?;
    cert.hypothesis(
        "neumann_starlike",
        star.holds,
        match star.witness {
            Some(w) if !star.holds => format!(
                "ray through ({:.6}, {:.6}) meets the Neumann part {} times",
                w.x, w.y, star.max_crossings
            ),
            _ => format!("{} rays", star.n_rays),
        },
    );

    let spec = radial_field(p, d, origin);
    let samples = domain.sample_boundary(n_boundary_samples, BoundaryPart::NeumannPart);
    let mut worst = (f64::NEG_INFINITY, None);
    let mut scale: f64 = 0.0;
    for s in &samples {
        let (q, _) = field_eval(&spec, s.position, p, None)?;
        scale = scale.max(q.norm());
        let v = q.dot(s.normal);
        if v > worst.0 {
            worst = (v, Some(s.position));
        }
    }
    let tolerance = tol * scale.max(f64::MIN_POSITIVE);
    let adm = &mut cert.admissibility;
    adm.n_samples = samples.len();
    adm.tolerance = tolerance;
    adm.max_boundary_violation = worst.0.max(0.0);
    let passed = worst.0 <= tolerance;
    cert.hypothesis(
        "neumann_sign",
        passed,
        match worst.1 {
            Some(x) if !passed => format!("nu.Q = {:.3e} at ({:.6}, {:.6})", worst.0, x.x, x.y),
            _ => format!("max nu.Q = {:.3e} over {} samples", worst.0.max(0.0), samples.len()),
        },
    );

    let (_, r_max) = domain.radial_extent()?;
    let constant = radial_constant(p, d);
    cert.param("constant", constant);
    cert.param("r_max", r_max);
    if let VectorFieldSpec::RadialAttract { c, .. } | VectorFieldSpec::RadialRepel { c, .. } = spec {
        cert.param("c", c);
    }
    let node_inf = grid
        .positions()
        .map(|x| constant / (x - origin).norm().powf(pv))
        .fold(f64::INFINITY, f64::min);
    cert.param("node_infimum", node_inf);
    cert.infimum_witness = Some(farthest_vertex(domain, origin));
    cert.note("uses sup |x| over the domain; the reading inf{|x| : x outside} is not used");
    Ok(cert.conclude(constant / r_max.powf(pv)))
}

/// Convex combination of the radial and averaged-distance weights, optimized
/// over `gamma` in `[0, 1]`.
#[allow(clippy::too_many_arguments)]
pub fn mixed_bound(
    domain: &Domain,
    p: Exponent,
    d: u32,
    grid: &Grid,
    n_angles: usize,
    gamma_steps: usize,
    n_boundary_samples: usize,
    tol: f64,
) -> Result<BoundCertificate, Error> {
    let radial = radial_hardy_bound(domain, p, d, grid, n_boundary_samples, tol)?;
    let mut cert = BoundCertificate::new(Method::Mixed, radial.detail.clone());
    cert.admissibility = radial.admissibility.clone();
    let Some(radial_value) = radial.value else {
        return Ok(cert);
    };
    let origin = domain.origin().expect("checked by the radial bound");
    let pv = p.p();
    let constant = radial_constant(p, d);
    let r_max = radial.parameters["r_max"];
    let slack = grid.h() * std::f64::consts::SQRT_2;

    // Each node carries the radial weight of the farthest point it can
    // represent, and the farthest node carries r_max itself, so the radial
    // endpoint is exactly the radial bound.
    let radii: Vec<f64> = grid.positions().map(|x| (x - origin).norm()).collect();
    let far = radii
        .iter()
        .enumerate()
        .fold(0, |b, (i, r)| if *r > radii[b] { i } else { b });
    let radial_w: Vec<f64> = radii
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let r_eff = if i == far { r_max } else { (r + slack).min(r_max) };
            constant / r_eff.powf(pv)
        })
        .collect();
    let hardy_w = hardy_weights(domain, grid, p, n_angles);
    let objective = |g: f64| {
        radial_w
            .iter()
            .zip(&hardy_w)
            .map(|(r, h)| g * r + (1.0 - g) * h)
            .fold(f64::INFINITY, f64::min)
    };
    let steps = gamma_steps.max(2);
    let grid_gammas: Vec<f64> = (0..steps).map(|k| k as f64 / (steps - 1) as f64).collect();
    let (k_best, mut best) = grid_gammas
        .iter()
        .enumerate()
        .map(|(k, g)| (k, objective(*g)))
        .fold((0, f64::NEG_INFINITY), |a, b| if b.1 > a.1 { b } else { a });
    let mut gamma = grid_gammas[k_best];
    let lo = grid_gammas[k_best.saturating_sub(1)];
    let hi = grid_gammas[(k_best + 1).min(steps - 1)];
    let (g_ref, v_ref) = golden_max(objective, lo, hi, 80);
    if v_ref > best {
        gamma = g_ref;
        best = v_ref;
    }
    let weights: Vec<f64> = radial_w
        .iter()
        .zip(&hardy_w)
        .map(|(r, h)| gamma * r + (1.0 - gamma) * h)
        .collect();
    let (_, witness) = inf_with_witness(grid, &weights);
    cert.infimum_witness = witness;
    cert.param("gamma", gamma);
    cert.param("radial_endpoint", objective(1.0));
    cert.param("hardy_endpoint", objective(0.0));
    cert.param("radial_bound", radial_value);
    Ok(cert.conclude(best))
}

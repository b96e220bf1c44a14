//! One-dimensional and radial p-Laplacian eigenvalues.
//!
//! The radial equation `-(rho^(d-1) phi_p(u'))' = lambda rho^(d-1) phi_p(u)`
//! is integrated as a first-order system in `(u, v)` with
//! `v = rho^(d-1) phi_p(u')`, which stays smooth where `u'` vanishes.

use std::f64::consts::PI;

use crate::error::RadialError;

pub const DEFAULT_MESH: usize = 4096;
pub const DEFAULT_TOL: f64 = 1e-9;
const SHOOTING_TOL: f64 = 1e-10;

/// Exponent `p` together with its dual `p' = p / (p - 1)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Exponent {
    p: f64,
    dual: f64,
}

impl Exponent {
    pub fn new(p: f64) -> Result<Self, RadialError> {
        if !(p.is_finite() && p > 1.0) {
            return Err(RadialError::InvalidExponent(p));
        }
        Ok(Exponent {
            p,
            dual: p / (p - 1.0),
        })
    }

    pub fn p(self) -> f64 {
        self.p
    }

    pub fn dual(self) -> f64 {
        self.dual
    }
}

/// `phi_p(s) = |s|^(p-2) s`.
pub fn phi(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.signum() * s.abs().powf(p - 1.0)
    }
}

/// Inverse of [`phi`]: `|w|^(p'-2) w`.
pub fn phi_inv(w: f64, p: f64) -> f64 {
    if w == 0.0 {
        0.0
    } else {
        w.signum() * w.abs().powf(1.0 / (p - 1.0))
    }
}

/// Boundary conditions at the inner and outer radius.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arrangement {
    /// Neumann at `r_inner`, Dirichlet at `r_outer` (the alpha family).
    NeumannInnerDirichletOuter,
    /// Dirichlet at `r_inner`, Neumann at `r_outer` (the beta family).
    DirichletInnerNeumannOuter,
    DirichletBoth,
    /// `d = 1`, Dirichlet at the left end, Neumann at the right.
    Interval,
}

impl Arrangement {
    fn inner_dirichlet(self) -> bool {
        !matches!(self, Arrangement::NeumannInnerDirichletOuter)
    }

    fn outer_dirichlet(self) -> bool {
        matches!(
            self,
            Arrangement::NeumannInnerDirichletOuter | Arrangement::DirichletBoth
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RadialEigenProblem {
    pub r_inner: f64,
    pub r_outer: f64,
    pub p: Exponent,
    pub d: u32,
    pub arrangement: Arrangement,
}

impl RadialEigenProblem {
    pub fn new(
        r_inner: f64,
        r_outer: f64,
        p: f64,
        d: u32,
        arrangement: Arrangement,
    ) -> Result<Self, RadialError> {
        let p = Exponent::new(p)?;
        if !(r_inner.is_finite() && r_outer.is_finite() && r_inner >= 0.0 && r_inner < r_outer) {
            return Err(RadialError::InvalidProblem(format!(
                "need 0 <= r_inner < r_outer, got ({r_inner}, {r_outer})"
            )));
        }
        if d == 0 {
            return Err(RadialError::InvalidProblem("dimension must be at least 1".into()));
        }
        if arrangement == Arrangement::Interval && d != 1 {
            return Err(RadialError::InvalidProblem(
                "the interval arrangement is one-dimensional".into(),
            ));
        }
        Ok(RadialEigenProblem {
            r_inner,
            r_outer,
            p,
            d,
            arrangement,
        })
    }

    /// The interval `(0, 1)` with Dirichlet at 0 and Neumann at 1.
    pub fn interval(p: f64) -> Result<Self, RadialError> {
        RadialEigenProblem::new(0.0, 1.0, p, 1, Arrangement::Interval)
    }

    pub fn scaled(&self, k: f64) -> Self {
        RadialEigenProblem {
            r_inner: self.r_inner * k,
            r_outer: self.r_outer * k,
            ..*self
        }
    }

    fn weight(&self, rho: f64) -> f64 {
        if self.d == 1 {
            1.0
        } else {
            rho.powi(self.d as i32 - 1)
        }
    }

    fn check_shootable(&self) -> Result<(), RadialError> {
        if self.r_inner == 0.0 && self.d >= 2 {
            return Err(RadialError::InvalidProblem(
                "shooting needs r_inner > 0 when d >= 2".into(),
            ));
        }
        Ok(())
    }
}

/// Outer-end state of one shooting run.
#[derive(Clone, Debug, PartialEq)]
pub struct Shot {
    pub end_value: f64,
    pub end_derivative: f64,
    pub end_flux: f64,
    /// `u` at the `mesh_size + 1` uniform mesh points.
    pub u: Vec<f64>,
    /// `v = rho^(d-1) phi_p(u')` at the same points.
    pub v: Vec<f64>,
}

impl Shot {
    fn has_interior_zero(&self) -> bool {
        let n = self.u.len();
        self.u[1..n - 1].iter().any(|&x| x <= 0.0)
    }
}

/// Fixed-step RK4 shooting from the inner endpoint at trial `lambda`.
pub fn shoot_radial(
    problem: &RadialEigenProblem,
    lambda: f64,
    mesh_size: usize,
) -> Result<Shot, RadialError> {
    if !(lambda.is_finite() && lambda > 0.0) {
        return Err(RadialError::InvalidProblem(format!("lambda must be positive, got {lambda}")));
    }
    if mesh_size < 64 {
        return Err(RadialError::InvalidProblem(format!(
            "mesh_size must be at least 64, got {mesh_size}"
        )));
    }
    problem.check_shootable()?;
    let p = problem.p.p();
    let (a, b) = (problem.r_inner, problem.r_outer);
    let h = (b - a) / mesh_size as f64;

    let rhs = |rho: f64, u: f64, v: f64| -> (f64, f64) {
        let w = problem.weight(rho);
        (phi_inv(v / w, p), -lambda * w * phi(u, p))
    };

    let (mut u, mut v) = if problem.arrangement.inner_dirichlet() {
        (0.0, problem.weight(a))
    } else {
        (1.0, 0.0)
    };
    let mut us = Vec::with_capacity(mesh_size + 1);
    let mut vs = Vec::with_capacity(mesh_size + 1);
    us.push(u);
    vs.push(v);
    for i in 0..mesh_size {
        let rho = a + h * i as f64;
        let (k1u, k1v) = rhs(rho, u, v);
        let (k2u, k2v) = rhs(rho + 0.5 * h, u + 0.5 * h * k1u, v + 0.5 * h * k1v);
        let (k3u, k3v) = rhs(rho + 0.5 * h, u + 0.5 * h * k2u, v + 0.5 * h * k2v);
        let (k4u, k4v) = rhs(rho + h, u + h * k3u, v + h * k3v);
        u += h / 6.0 * (k1u + 2.0 * k2u + 2.0 * k3u + k4u);
        v += h / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        if !(u.is_finite() && v.is_finite()) {
            return Err(RadialError::NonFinite { lambda });
        }
        us.push(u);
        vs.push(v);
    }
    Ok(Shot {
        end_value: u,
        end_derivative: phi_inv(v / problem.weight(b), p),
        end_flux: v,
        u: us,
        v: vs,
    })
}

/// Fundamental radial eigenpair.
#[derive(Clone, Debug, PartialEq)]
pub struct RadialEigenResult {
    pub problem: RadialEigenProblem,
    pub eigenvalue: f64,
    /// `u` on the uniform mesh, scaled so its maximum is 1.
    pub profile: Vec<f64>,
    /// Flux `rho^(d-1) phi_p(u')` under the same scaling.
    pub flux: Vec<f64>,
    /// Outer boundary-condition residual relative to the profile scale.
    pub shooting_residual: f64,
    pub mesh_size: usize,
}

impl RadialEigenResult {
    pub fn mesh_point(&self, i: usize) -> f64 {
        let (a, b) = (self.problem.r_inner, self.problem.r_outer);
        a + (b - a) * i as f64 / self.mesh_size as f64
    }

    /// `(u, v)` at `rho` by cubic Hermite interpolation using the ODE slopes.
    pub fn interpolate(&self, rho: f64) -> (f64, f64) {
        let (a, b) = (self.problem.r_inner, self.problem.r_outer);
        let h = (b - a) / self.mesh_size as f64;
        let s = ((rho - a) / h).clamp(0.0, self.mesh_size as f64);
        let i = (s.floor() as usize).min(self.mesh_size - 1);
        let t = s - i as f64;
        let p = self.problem.p.p();
        let slope = |j: usize| {
            let r = self.mesh_point(j);
            let w = self.problem.weight(r);
            (
                phi_inv(self.flux[j] / w, p),
                -self.eigenvalue * w * phi(self.profile[j], p),
            )
        };
        let (du0, dv0) = slope(i);
        let (du1, dv1) = slope(i + 1);
        let h00 = (1.0 + 2.0 * t) * (1.0 - t) * (1.0 - t);
        let h10 = t * (1.0 - t) * (1.0 - t);
        let h01 = t * t * (3.0 - 2.0 * t);
        let h11 = t * t * (t - 1.0);
        let herm = |y0: f64, y1: f64, m0: f64, m1: f64| h00 * y0 + h10 * h * m0 + h01 * y1 + h11 * h * m1;
        (
            herm(self.profile[i], self.profile[i + 1], du0, du1),
            herm(self.flux[i], self.flux[i + 1], dv0, dv1),
        )
    }
}

/// Smallest eigenvalue at the default mesh.
pub fn radial_eigenvalue(
    problem: &RadialEigenProblem,
    tol: f64,
) -> Result<RadialEigenResult, RadialError> {
    radial_eigenvalue_with_mesh(problem, tol, DEFAULT_MESH)
}

/// Smallest eigenvalue by bracketing and bisection on the shooting mismatch.
///
/// `tol` is the relative width at which bisection stops.
pub fn radial_eigenvalue_with_mesh(
    problem: &RadialEigenProblem,
    tol: f64,
    mesh_size: usize,
) -> Result<RadialEigenResult, RadialError> {
    if !(tol > 0.0) {
        return Err(RadialError::InvalidProblem(format!("tolerance must be positive, got {tol}")));
    }
    problem.check_shootable()?;
    let outer_dirichlet = problem.arrangement.outer_dirichlet();
    // Below the fundamental eigenvalue the profile stays positive and the
    // outer mismatch has not yet changed sign.
    let below = |lambda: f64| -> Result<bool, RadialError> {
        let shot = shoot_radial(problem, lambda, mesh_size)?;
        let mismatch = if outer_dirichlet {
            shot.end_value
        } else {
            shot.end_flux
        };
        Ok(!shot.has_interior_zero() && mismatch > 0.0)
    };

    let width = problem.r_outer - problem.r_inner;
    let mut lo = 0.1 * (PI / width).powf(problem.p.p());
    let ceiling = lo * 1e12;
    let floor = lo * 1e-12;
    while !below(lo)? {
        lo /= 1.5;
        if lo < floor {
            return Err(RadialError::BracketNotFound { ceiling: floor });
        }
    }
    let mut hi = lo * 1.5;
    while below(hi)? {
        lo = hi;
        hi *= 1.5;
        if hi > ceiling {
            return Err(RadialError::BracketNotFound { ceiling });
        }
    }
    while (hi - lo) > tol * lo {
        let mid = 0.5 * (lo + hi);
        if below(mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eigenvalue = 0.5 * (lo + hi);
    let shot = shoot_radial(problem, eigenvalue, mesh_size)?;
    let scale = shot.u.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let mismatch = if outer_dirichlet {
        shot.end_value
    } else {
        shot.end_flux
    };
    let profile: Vec<f64> = shot.u.iter().map(|x| x / scale).collect();
    let flux_scale = scale.powf(problem.p.p() - 1.0);
    let flux: Vec<f64> = shot.v.iter().map(|x| x / flux_scale).collect();
    let residual = if outer_dirichlet {
        mismatch.abs() / scale
    } else {
        mismatch.abs() / flux_scale
    };
    Ok(RadialEigenResult {
        problem: *problem,
        eigenvalue,
        profile,
        flux,
        shooting_residual: residual,
        mesh_size,
    })
}

/// Shooting residuals above this are reported by callers as poorly resolved.
pub fn shooting_tolerance() -> f64 {
    SHOOTING_TOL
}

/// Mesh used for the interval constant; the Neumann end is a turning point of
/// `phi_p^-1` and costs accuracy at coarse meshes for `p` away from 2.
const INTERVAL_MESH: usize = 1 << 16;

/// Fundamental eigenvalue on `(0, 1)` with Dirichlet at 0 and Neumann at 1.
#[allow(non_snake_case)]
pub fn mu_I(p: Exponent, tol: f64) -> Result<f64, RadialError> {
    Ok(interval_eigen(p, tol)?.eigenvalue)
}

/// The eigenpair behind [`mu_I`].
pub fn interval_eigen(p: Exponent, tol: f64) -> Result<RadialEigenResult, RadialError> {
    let problem = RadialEigenProblem::interval(p.p())?;
    radial_eigenvalue_with_mesh(&problem, tol, INTERVAL_MESH)
}

/// `pi_p = 2 pi / (p sin(pi / p))`.
pub fn pi_p(p: f64) -> f64 {
    2.0 * PI / (p * (PI / p).sin())
}

/// Closed form `(p - 1) (pi_p / 2)^p` of the interval constant.
pub fn mu_interval_closed_form(p: f64) -> f64 {
    (p - 1.0) * (0.5 * pi_p(p)).powf(p)
}

/// Independent discrete eigenvalue at the default mesh.
pub fn radial_fd_oracle(problem: &RadialEigenProblem) -> Result<f64, RadialError> {
    radial_fd_oracle_with_mesh(problem, DEFAULT_MESH)
}

/// Vertex-centred finite-volume discretization of the radial problem.
///
/// For `p = 2` the generalized eigenproblem is symmetrized and its smallest
/// eigenvalue found by Sturm-sequence bisection. Otherwise the discrete
/// Rayleigh quotient is minimized by preconditioned gradient descent.
pub fn radial_fd_oracle_with_mesh(
    problem: &RadialEigenProblem,
    mesh_size: usize,
) -> Result<f64, RadialError> {
    if problem.r_inner == 0.0 && problem.d >= 2 && problem.arrangement.inner_dirichlet() {
        return Err(RadialError::InvalidProblem(
            "a Dirichlet condition at the centre is not supported".into(),
        ));
    }
    let fv = FiniteVolume::new(problem, mesh_size);
    if (problem.p.p() - 2.0).abs() < 1e-15 {
        Ok(fv.linear_eigenvalue())
    } else {
        fv.minimize_rayleigh(problem.p.p())
    }
}

struct FiniteVolume {
    h: f64,
    /// Face weights `rho_{i+1/2}^(d-1)`, one per mesh cell.
    face: Vec<f64>,
    /// Lumped masses of the unknowns.
    mass: Vec<f64>,
    /// Unknown index range within the mesh points `0..=n`.
    first: usize,
    last: usize,
}

impl FiniteVolume {
    fn new(problem: &RadialEigenProblem, n: usize) -> Self {
        let (a, b) = (problem.r_inner, problem.r_outer);
        let h = (b - a) / n as f64;
        let d = problem.d as i32;
        let face = (0..n)
            .map(|i| problem.weight(a + h * (i as f64 + 0.5)))
            .collect();
        // Exact integral of rho^(d-1) over each dual cell.
        let prim = |r: f64| r.powi(d) / d as f64;
        let mass_at = |i: usize| {
            let lo = (a + h * (i as f64 - 0.5)).max(a);
            let hi = (a + h * (i as f64 + 0.5)).min(b);
            prim(hi) - prim(lo)
        };
        let first = usize::from(problem.arrangement.inner_dirichlet());
        let last = if problem.arrangement.outer_dirichlet() {
            n - 1
        } else {
            n
        };
        let mass = (first..=last).map(mass_at).collect();
        FiniteVolume {
            h,
            face,
            mass,
            first,
            last,
        }
    }

    fn len(&self) -> usize {
        self.last - self.first + 1
    }

    fn linear_eigenvalue(&self) -> f64 {
        let m = self.len();
        // K = sum over cells of face/h (e_i - e_j)(e_i - e_j)^T, restricted.
        let mut diag = vec![0.0; m];
        let mut off = vec![0.0; m.saturating_sub(1)];
        for (cell, w) in self.face.iter().enumerate() {
            let k = w / self.h;
            for node in [cell, cell + 1] {
                if (self.first..=self.last).contains(&node) {
                    diag[node - self.first] += k;
                }
            }
            if cell >= self.first && cell < self.last {
                off[cell - self.first] = -k;
            }
        }
        let s: Vec<f64> = self.mass.iter().map(|m| 1.0 / m.sqrt()).collect();
        let a: Vec<f64> = (0..m).map(|i| diag[i] * s[i] * s[i]).collect();
        let b: Vec<f64> = (0..m.saturating_sub(1))
            .map(|i| off[i] * s[i] * s[i + 1])
            .collect();
        smallest_tridiagonal_eigenvalue(&a, &b)
    }

    /// Energy and its gradient for the values on the unknowns.
    fn energy(&self, u: &[f64], p: f64, grad: &mut [f64]) -> f64 {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let val = |node: usize| {
            if (self.first..=self.last).contains(&node) {
                u[node - self.first]
            } else {
                0.0
            }
        };
        let mut e = 0.0;
        for (cell, w) in self.face.iter().enumerate() {
            let g = (val(cell + 1) - val(cell)) / self.h;
            e += w * self.h * g.abs().powf(p);
            let dg = w * p * phi(g, p);
            if (self.first..=self.last).contains(&(cell + 1)) {
                grad[cell + 1 - self.first] += dg;
            }
            if (self.first..=self.last).contains(&cell) {
                grad[cell - self.first] -= dg;
            }
        }
        e
    }

    fn minimize_rayleigh(&self, p: f64) -> Result<f64, RadialError> {
        let m = self.len();
        let n = self.face.len();
        // Positive seed vanishing at Dirichlet ends.
        let mut u: Vec<f64> = (self.first..=self.last)
            .map(|i| {
                let t = i as f64 / n as f64;
                let s = match (self.first, self.last == n) {
                    (1, false) => (PI * t).sin(),
                    (1, true) => (0.5 * PI * t).sin(),
                    _ => (0.5 * PI * t).cos(),
                };
                s.max(1e-3)
            })
            .collect();
        let mass_norm = |u: &[f64]| -> f64 {
            u.iter()
                .zip(&self.mass)
                .map(|(x, m)| m * x.abs().powf(p))
                .sum()
        };
        let normalize = |u: &mut Vec<f64>| {
            let s = mass_norm(u).powf(-1.0 / p);
            u.iter_mut().for_each(|x| *x *= s);
        };
        normalize(&mut u);
        let mut ge = vec![0.0; m];
        let mut rq = self.energy(&u, p, &mut ge);
        let max_iter = 20000;
        for iter in 0..max_iter {
            // Gradient of E/M at M = 1.
            let mut energy_grad = vec![0.0; m];
            let e = self.energy(&u, p, &mut energy_grad);
            let grad: Vec<f64> = (0..m)
                .map(|i| energy_grad[i] - e * p * self.mass[i] * phi(u[i], p))
                .collect();
            // Lagged-diffusivity preconditioner: weighted stiffness plus mass.
            let eps = 1e-8;
            let mut diag = vec![0.0; m];
            let mut off = vec![0.0; m.saturating_sub(1)];
            let val = |node: usize| {
                if (self.first..=self.last).contains(&node) {
                    u[node - self.first]
                } else {
                    0.0
                }
            };
            let gscale = u.iter().fold(0.0f64, |a, x| a.max(x.abs())) / (n as f64 * self.h);
            for (cell, w) in self.face.iter().enumerate() {
                let g = (val(cell + 1) - val(cell)) / self.h;
                let k = w * p * (p - 1.0) * g.abs().max(eps * gscale).powf(p - 2.0) / self.h;
                for node in [cell, cell + 1] {
                    if (self.first..=self.last).contains(&node) {
                        diag[node - self.first] += k;
                    }
                }
                if cell >= self.first && cell < self.last {
                    off[cell - self.first] = -k;
                }
            }
            for (d, m) in diag.iter_mut().zip(&self.mass) {
                *d += 1e-9 * e * m;
            }
            let dir = thomas(&off, &diag, &off, &grad);
            let slope: f64 = grad.iter().zip(&dir).map(|(g, d)| g * d).sum();
            let gnorm = grad.iter().map(|g| g.abs()).fold(0.0, f64::max);
            if slope <= 0.0 || gnorm < 1e-13 * e.max(1.0) {
                return Ok(rq);
            }
            let mut step = 1.0;
            let mut accepted = false;
            while step > 1e-12 {
                let mut trial: Vec<f64> = u.iter().zip(&dir).map(|(x, d)| x - step * d).collect();
                normalize(&mut trial);
                let et = self.energy(&trial, p, &mut ge);
                if et <= rq - 1e-4 * step * slope {
                    let change = (rq - et) / rq;
                    u = trial;
                    rq = et;
                    accepted = true;
                    if change < 1e-14 && iter > 10 {
                        return Ok(rq);
                    }
                    break;
                }
                step *= 0.5;
            }
            if !accepted {
                return Ok(rq);
            }
        }
        Err(RadialError::NoConvergence { iterations: max_iter })
    }
}

/// Solves a tridiagonal system with sub-, main- and super-diagonals.
pub(crate) fn thomas(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    let mut beta = diag[0];
    d[0] = rhs[0] / beta;
    for i in 1..n {
        c[i - 1] = sup[i - 1] / beta;
        beta = diag[i] - sub[i - 1] * c[i - 1];
        d[i] = (rhs[i] - sub[i - 1] * d[i - 1]) / beta;
    }
    for i in (0..n - 1).rev() {
        d[i] -= c[i] * d[i + 1];
    }
    d
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
pub(crate) fn smallest_tridiagonal_eigenvalue(a: &[f64], b: &[f64]) -> f64 {
    let n = a.len();
    let count_below = |x: f64| {
        let mut count = 0;
        let mut q = a[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for i in 1..n {
            let denom = if q == 0.0 { f64::EPSILON } else { q };
            q = a[i] - x - b[i - 1] * b[i - 1] / denom;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    };
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let r = if i > 0 { b[i - 1].abs() } else { 0.0 } + if i + 1 < n { b[i].abs() } else { 0.0 };
        lo = lo.min(a[i] - r);
        hi = hi.max(a[i] + r);
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if count_below(mid) >= 1 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    0.5 * (lo + hi)
}

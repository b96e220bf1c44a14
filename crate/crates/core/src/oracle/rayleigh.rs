use crate::error::OracleError;
use crate::one_dim::phi;

use super::field::ScalarField;
use super::grid::{Grid, Link};
use super::linalg::{dot, pcg, LinearOperator};

/// A lattice edge difference `u_b - u_a`. `b = None` is a Dirichlet ghost:
/// the difference is `-scale * u_a`.
#[derive(Clone, Copy, Debug)]
struct EdgeDiff {
    a: usize,
    b: Option<usize>,
    scale: f64,
}

/// Cell-averaged forward-difference quadrature of `int |grad u|^p`.
///
/// Every lattice cell touching the domain contributes `h^2/4` times the sum
/// over its four corners of `|g_c|^p`, where `g_c` pairs the horizontal and
/// vertical cell edges meeting at that corner. Differences across Neumann
/// edges vanish (mirror ghost); across a Dirichlet edge at distance `delta`
/// the ghost is chosen so the edge reproduces the energy of the linear
/// profile reaching zero at the boundary. At `p = 2` this is the five-point
/// energy.
pub struct PEnergy {
    p: f64,
    h: f64,
    n: usize,
    edges: Vec<EdgeDiff>,
    corners: Vec<[Option<u32>; 2]>,
}

impl PEnergy {
    pub fn new(grid: &Grid, p: f64) -> Self {
        let (nx, ny) = grid.dims();
        let h = grid.h();
        let mut edges = Vec::new();
        let mut hid = vec![None; nx * ny];
        let mut vid = vec![None; nx * ny];
        let mut edge = |i: usize, j: usize, horizontal: bool, edges: &mut Vec<EdgeDiff>| {
            let table = if horizontal { &mut hid } else { &mut vid };
            let key = j * nx + i;
            if let Some(id) = table[key] {
                return id;
            }
            let (di, dj, fwd, back) = if horizontal { (1, 0, 0, 1) } else { (0, 1, 2, 3) };
            let a = grid.inside_index(i as i64, j as i64);
            let b = grid.inside_index(i as i64 + di, j as i64 + dj);
            let diff = match (a, b) {
                (Some(a), _) => edge_from(grid, p, a, fwd),
                (None, Some(b)) => edge_from(grid, p, b, back),
                (None, None) => None,
            };
            let id = diff.map(|d| {
                edges.push(d);
                (edges.len() - 1) as u32
            });
            table[key] = Some(id);
            id
        };
        let mut corners = Vec::new();
        for j in 0..ny - 1 {
            for i in 0..nx - 1 {
                let touches = (0..2).any(|di| {
                    (0..2).any(|dj| grid.inside_index((i + di) as i64, (j + dj) as i64).is_some())
                });
                if !touches {
                    continue;
                }
                let bottom = edge(i, j, true, &mut edges);
                let top = edge(i, j + 1, true, &mut edges);
                let left = edge(i, j, false, &mut edges);
                let right = edge(i + 1, j, false, &mut edges);
                for pair in [[bottom, left], [bottom, right], [top, left], [top, right]] {
                    if pair[0].is_some() || pair[1].is_some() {
                        corners.push(pair);
                    }
                }
            }
        }
        PEnergy {
            p,
            h,
            n: grid.n_inside(),
            edges,
            corners,
        }
    }

    fn diffs(&self, u: &[f64]) -> Vec<f64> {
        self.edges
            .iter()
            .map(|e| match e.b {
                Some(b) => u[b] - u[e.a],
                None => -e.scale * u[e.a],
            })
            .collect()
    }

    fn corner_norm(&self, diffs: &[f64], c: &[Option<u32>; 2]) -> f64 {
        let s: f64 = c.iter().flatten().map(|&e| diffs[e as usize].powi(2)).sum();
        s.sqrt() / self.h
    }

    pub fn energy(&self, u: &[f64]) -> f64 {
        let diffs = self.diffs(u);
        let q = 0.25 * self.h * self.h;
        q * self
            .corners
            .iter()
            .map(|c| self.corner_norm(&diffs, c).powf(self.p))
            .sum::<f64>()
    }

    /// Energy and its gradient with respect to the node values.
    pub fn energy_gradient(&self, u: &[f64]) -> (f64, Vec<f64>) {
        let diffs = self.diffs(u);
        let mut dd = vec![0.0; self.edges.len()];
        let q = 0.25 * self.h * self.h;
        let mut e = 0.0;
        for c in &self.corners {
            let g = self.corner_norm(&diffs, c);
            if g == 0.0 {
                continue;
            }
            e += q * g.powf(self.p);
            let w = 0.25 * self.p * g.powf(self.p - 2.0);
            for &id in c.iter().flatten() {
                dd[id as usize] += w * diffs[id as usize];
            }
        }
        let mut grad = vec![0.0; self.n];
        for (edge, d) in self.edges.iter().zip(&dd) {
            match edge.b {
                Some(b) => {
                    grad[b] += d;
                    grad[edge.a] -= d;
                }
                None => grad[edge.a] -= edge.scale * d,
            }
        }
        (e, grad)
    }

    /// Weighted Laplacian with edge weights from the lagged diffusivity
    /// `max(|g_c|, eps)^(p-2)`; equals the energy Hessian's linear part.
    fn preconditioner(&self, u: &[f64]) -> WeightedLaplacian {
        let diffs = self.diffs(u);
        let norms: Vec<f64> = self.corners.iter().map(|c| self.corner_norm(&diffs, c)).collect();
        let gmax = norms.iter().cloned().fold(0.0, f64::max);
        let eps = (1e-3 * gmax).max(1e-300);
        let mut w = vec![0.0; self.edges.len()];
        for (c, g) in self.corners.iter().zip(&norms) {
            let wc = 0.25 * self.p * g.max(eps).powf(self.p - 2.0);
            for &id in c.iter().flatten() {
                w[id as usize] += wc;
            }
        }
        let mut diag = vec![0.0; self.n];
        for (edge, wi) in self.edges.iter().zip(&w) {
            match edge.b {
                Some(b) => {
                    diag[b] += wi;
                    diag[edge.a] += wi;
                }
                None => diag[edge.a] += wi * edge.scale * edge.scale,
            }
        }
        WeightedLaplacian {
            edges: self.edges.clone(),
            weights: w,
            diag,
        }
    }
}

fn edge_from(grid: &Grid, p: f64, a: usize, slot: usize) -> Option<EdgeDiff> {
    let h = grid.h();
    match grid.links(a)[slot] {
        Link::Inside(b) => Some(EdgeDiff { a, b: Some(b), scale: 0.0 }),
        Link::Dirichlet { delta } => Some(EdgeDiff {
            a,
            b: None,
            scale: (h / delta.max(0.1 * h)).powf(1.0 - 1.0 / p),
        }),
        Link::Neumann { .. } => None,
    }
}

struct WeightedLaplacian {
    edges: Vec<EdgeDiff>,
    weights: Vec<f64>,
    diag: Vec<f64>,
}

impl LinearOperator for WeightedLaplacian {
    fn dim(&self) -> usize {
        self.diag.len()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        y.iter_mut().for_each(|v| *v = 0.0);
        for (e, w) in self.edges.iter().zip(&self.weights) {
            match e.b {
                Some(b) => {
                    let d = w * (x[b] - x[e.a]);
                    y[b] += d;
                    y[e.a] -= d;
                }
                None => y[e.a] += w * e.scale * e.scale * x[e.a],
            }
        }
    }

    fn diagonal(&self) -> Vec<f64> {
        self.diag.clone()
    }
}

/// Lumped `int |u|^p`.
pub fn mass_p(grid: &Grid, u: &[f64], p: f64) -> f64 {
    grid.h() * grid.h() * u.iter().map(|v| v.abs().powf(p)).sum::<f64>()
}

/// Outcome of the discrete Rayleigh minimization.
#[derive(Clone, Debug)]
pub struct RayleighResult {
    /// Upper estimate of the discrete minimum of the quotient.
    pub eigenvalue: f64,
    /// Minimizer with `h^2 sum |u|^p = 1`, positive.
    pub minimizer: ScalarField,
    pub iterations: usize,
    /// Quotient after each accepted step; non-increasing.
    pub history: Vec<f64>,
    pub warning: Option<String>,
}

const MAX_ITERATIONS: usize = 400;
const LOOSE_CHANGE: f64 = 1e-8;

/// Minimizes the discrete Rayleigh quotient over fields vanishing on the
/// Dirichlet part.
///
/// Nonlinear conjugate gradients preconditioned by the lagged-diffusivity
/// weighted Laplacian, which makes the first unit step an inverse iteration
/// at `p = 2`. Steps are accepted by Armijo backtracking, then refined by
/// one parabolic fit.
pub fn rayleigh_minimize_p(
    grid: &Grid,
    p: f64,
    seed: Option<&ScalarField>,
) -> Result<RayleighResult, OracleError> {
    let n = grid.n_inside();
    if !grid.has_dirichlet() {
        let c = (grid.h() * grid.h() * n as f64).powf(-1.0 / p);
        return Ok(RayleighResult {
            eigenvalue: 0.0,
            minimizer: ScalarField::new(grid, vec![c; n])?,
            iterations: 0,
            history: vec![0.0],
            warning: Some("no Dirichlet boundary: the fundamental eigenvalue is 0".into()),
        });
    }
    let energy = PEnergy::new(grid, p);
    let mut u: Vec<f64> = match seed {
        Some(s) => {
            s.check(grid)?;
            s.values().to_vec()
        }
        None => box_mode(grid),
    };
    let normalize = |u: &mut Vec<f64>| {
        let s = mass_p(grid, u, p).powf(-1.0 / p);
        u.iter_mut().for_each(|v| *v *= s);
    };
    if mass_p(grid, &u, p) == 0.0 {
        return Err(OracleError::FieldMismatch("seed is identically zero".into()));
    }
    normalize(&mut u);
    let h2 = grid.h() * grid.h();
    let mut rq = energy.energy(&u);
    let mut history = vec![rq];
    let mut dir = vec![0.0; n];
    let mut prev: Option<(Vec<f64>, Vec<f64>)> = None;
    let mut quiet = 0;
    let mut last_change = f64::INFINITY;
    for it in 1..=MAX_ITERATIONS {
        let (e, ge) = energy.energy_gradient(&u);
        let grad: Vec<f64> = ge
            .iter()
            .zip(&u)
            .map(|(g, v)| g - e * p * h2 * phi(*v, p))
            .collect();
        let pre = energy.preconditioner(&u);
        let mut z = vec![0.0; n];
        pcg(&pre, &grad, &mut z, 1e-8, 4 * n + 100);
        // Polak-Ribiere with restarts; at p = 2 the first step is an
        // inverse iteration.
        let beta = match &prev {
            Some((g0, z0)) => {
                let num: f64 = z.iter().zip(grad.iter().zip(g0)).map(|(z, (g, g0))| z * (g - g0)).sum();
                (num / dot(z0, g0)).max(0.0)
            }
            None => 0.0,
        };
        dir.iter_mut().zip(&z).for_each(|(d, z)| *d = z + beta * *d);
        let mut slope = dot(&grad, &dir);
        if !(slope > 0.0) {
            dir.copy_from_slice(&z);
            slope = dot(&grad, &z);
        }
        prev = Some((grad, z));
        if !(slope > 1e-14 * rq) {
            return Ok(finish(grid, u, rq, it, history));
        }
        let trial_at = |step: f64| -> Option<(Vec<f64>, f64)> {
            let mut t: Vec<f64> = u.iter().zip(&dir).map(|(v, d)| v - step * d).collect();
            if mass_p(grid, &t, p) > 0.0 {
                normalize(&mut t);
                let et = energy.energy(&t);
                Some((t, et))
            } else {
                None
            }
        };
        let mut step = 1.0;
        let mut accepted = None;
        while step >= 1e-10 {
            if let Some((t, et)) = trial_at(step) {
                if et <= rq - 1e-4 * step * slope {
                    accepted = Some((t, et));
                    break;
                }
            }
            step *= 0.5;
        }
        // Refine by the parabola through E(0), its slope and E(step); a plain
        // Armijo step overshoots and defeats the conjugate directions.
        if let Some((_, et)) = &accepted {
            let curv = et - rq + step * slope;
            if curv > 0.0 {
                let s = (0.5 * slope * step * step / curv).clamp(0.1 * step, 10.0 * step);
                if (s - step).abs() > 1e-3 * step {
                    if let Some((t, es)) = trial_at(s) {
                        if es < *et {
                            accepted = Some((t, es));
                        }
                    }
                }
            }
        }
        match accepted {
            Some((trial, et)) => {
                let change = (rq - et) / rq;
                last_change = change;
                u = trial;
                rq = et;
                history.push(rq);
                quiet = if change < 1e-10 { quiet + 1 } else { 0 };
                if quiet >= 3 {
                    return Ok(finish(grid, u, rq, it, history));
                }
            }
            None => {
                if slope / rq > 1e-6 {
                    return Err(OracleError::Stagnation {
                        iterations: it,
                        value: rq,
                    });
                }
                return Ok(finish(grid, u, rq, it, history));
            }
        }
    }
    // A slow linear tail still leaves an upper estimate; only a quotient
    // that is visibly moving is an error.
    if last_change < LOOSE_CHANGE {
        let mut r = finish(grid, u, rq, MAX_ITERATIONS, history);
        r.warning = Some(format!(
            "iteration limit reached; last relative decrease {last_change:.1e}"
        ));
        return Ok(r);
    }
    Err(OracleError::NoConvergence {
        iterations: MAX_ITERATIONS,
        value: rq,
    })
}

fn finish(grid: &Grid, mut u: Vec<f64>, rq: f64, iterations: usize, history: Vec<f64>) -> RayleighResult {
    if u.iter().sum::<f64>() < 0.0 {
        u.iter_mut().for_each(|v| *v = -*v);
    }
    RayleighResult {
        eigenvalue: rq,
        minimizer: ScalarField::new(grid, u).expect("finite iterate"),
        iterations,
        history,
        warning: None,
    }
}

/// First Dirichlet mode of the bounding box, kept strictly positive.
pub(crate) fn box_mode(grid: &Grid) -> Vec<f64> {
    let (lo, hi) = grid.domain().bounding_box();
    let (w, ht) = (hi.x - lo.x, hi.y - lo.y);
    grid.positions()
        .map(|x| {
            let s = (std::f64::consts::PI * (x.x - lo.x) / w).sin();
            let t = (std::f64::consts::PI * (x.y - lo.y) / ht).sin();
            (s * t).max(1e-3)
        })
        .collect()
}

/// `(int |grad zeta|^p, int W |zeta|^p)` with the minimizer's quadrature.
pub fn quadrature_check(
    grid: &Grid,
    zeta: &ScalarField,
    weight: &ScalarField,
    p: f64,
) -> Result<(f64, f64), OracleError> {
    zeta.check(grid)?;
    weight.check(grid)?;
    let lhs = PEnergy::new(grid, p).energy(zeta.values());
    let h2 = grid.h() * grid.h();
    let rhs = h2
        * zeta
            .values()
            .iter()
            .zip(weight.values())
            .map(|(z, w)| w * z.abs().powf(p))
            .sum::<f64>();
    Ok((lhs, rhs))
}

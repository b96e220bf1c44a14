use std::fmt;
use std::sync::Arc;

use crate::error::{Error, OracleError};
use crate::geometry::Vec2;
use crate::one_dim::{interval_eigen, phi, Exponent, RadialEigenResult, DEFAULT_TOL};
use crate::oracle::{node_gradient, Grid, PEnergy, ScalarField};

/// Scalar profile `q(s)` of a coordinate `s = x . u`.
#[derive(Clone)]
pub struct Profile {
    name: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    /// Finite-difference step for `q'`.
    step: f64,
}

impl fmt::Debug for Profile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Profile").field("name", &self.name).finish()
    }
}

impl Profile {
    pub fn new(name: impl Into<String>, step: f64, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Profile {
            name: name.into(),
            f: Arc::new(f),
            step,
        }
    }

    pub fn zero() -> Self {
        Profile::new("zero", 1e-6, |_| 0.0)
    }

    /// `q(s) = k (s - s0)`.
    pub fn linear(k: f64, s0: f64) -> Self {
        Profile::new(format!("linear k={k}"), 1e-6, move |s| k * (s - s0))
    }

    /// The profile built from the one-dimensional eigenfunction on
    /// `[s0, s0 + length]`, Neumann end at `s0`; its Boggio weight is the
    /// constant `mu / length^p`.
    pub fn from_interval_mode(p: Exponent, s0: f64, length: f64) -> Result<Self, Error> {
        let mode: RadialEigenResult = interval_eigen(p, DEFAULT_TOL)?;
        let pv = p.p();
        let scale = length.powf(pv - 1.0);
        let f = move |s: f64| {
            let t = (1.0 - (s - s0) / length).clamp(0.0, 1.0);
            let (u, v) = mode.interpolate(t);
            if u <= 0.0 {
                f64::INFINITY
            } else {
                // The flux vanishes at the Neumann end up to shooting error.
                v.max(0.0) / (scale * phi(u, pv))
            }
        };
        Ok(Profile::new("interval mode", 1e-6 * length, f))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn value(&self, s: f64) -> f64 {
        (self.f)(s)
    }

    /// Centred finite difference.
    pub fn derivative(&self, s: f64) -> f64 {
        (self.value(s + self.step) - self.value(s - self.step)) / (2.0 * self.step)
    }
}

/// A vector field sampled on every node of a lattice.
#[derive(Clone, Debug, PartialEq)]
pub struct LatticeField {
    min: Vec2,
    h: f64,
    nx: usize,
    ny: usize,
    values: Vec<Vec2>,
    divergence: Vec<f64>,
}

impl LatticeField {
    /// Samples `f` on the full lattice of `grid`, inside and outside.
    pub fn from_fn(grid: &Grid, f: impl Fn(Vec2) -> Vec2) -> Self {
        let (nx, ny) = grid.dims();
        let mut values = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                values.push(f(grid.lattice_position(i, j)));
            }
        }
        LatticeField::from_values(grid, values).expect("sized to the lattice")
    }

    pub fn from_values(grid: &Grid, values: Vec<Vec2>) -> Result<Self, OracleError> {
        let (nx, ny) = grid.dims();
        if values.len() != nx * ny {
            return Err(OracleError::FieldMismatch(format!(
                "{} vectors for a {nx}x{ny} lattice",
                values.len()
            )));
        }
        let h = grid.h();
        let at = |i: usize, j: usize| values[j * nx + i];
        let mut divergence = Vec::with_capacity(nx * ny);
        for j in 0..ny {
            for i in 0..nx {
                let (il, ir) = (i.saturating_sub(1), (i + 1).min(nx - 1));
                let (jl, jr) = (j.saturating_sub(1), (j + 1).min(ny - 1));
                let dx = (at(ir, j).x - at(il, j).x) / (h * (ir - il) as f64);
                let dy = (at(i, jr).y - at(i, jl).y) / (h * (jr - jl) as f64);
                divergence.push(dx + dy);
            }
        }
        Ok(LatticeField {
            min: grid.origin(),
            h,
            nx,
            ny,
            values,
            divergence,
        })
    }

    fn bilinear<T>(&self, x: Vec2, data: &[T], zero: T, f: impl Fn(&T, f64) -> T, add: impl Fn(T, T) -> T) -> Option<T>
    where
        T: Copy,
    {
        let s = (x.x - self.min.x) / self.h;
        let t = (x.y - self.min.y) / self.h;
        if !(s >= 0.0 && t >= 0.0 && s <= (self.nx - 1) as f64 && t <= (self.ny - 1) as f64) {
            return None;
        }
        let i = (s.floor() as usize).min(self.nx - 2);
        let j = (t.floor() as usize).min(self.ny - 2);
        let (fs, ft) = (s - i as f64, t - j as f64);
        let mut acc = zero;
        for (di, dj, w) in [
            (0, 0, (1.0 - fs) * (1.0 - ft)),
            (1, 0, fs * (1.0 - ft)),
            (0, 1, (1.0 - fs) * ft),
            (1, 1, fs * ft),
        ] {
            acc = add(acc, f(&data[(j + dj) * self.nx + i + di], w));
        }
        Some(acc)
    }

    pub fn value_at(&self, x: Vec2) -> Option<Vec2> {
        self.bilinear(x, &self.values, Vec2::default(), |v, w| *v * w, |a, b| a + b)
    }

    pub fn divergence_at(&self, x: Vec2) -> Option<f64> {
        self.bilinear(x, &self.divergence, 0.0, |v, w| v * w, |a, b| a + b)
    }

    fn node(&self, i: usize, j: usize) -> (Vec2, f64) {
        let k = j * self.nx + i;
        (self.values[k], self.divergence[k])
    }
}

/// The vector fields `Q` fed to the Boggio inequality.
#[derive(Clone, Debug)]
pub enum VectorFieldSpec {
    /// `Q = c (x - o) / |x - o|^p`.
    RadialAttract { c: f64, origin: Vec2, d: u32 },
    /// `Q = -c (x - o) / |x - o|^p`.
    RadialRepel { c: f64, origin: Vec2, d: u32 },
    /// `Q = q(x . u) u`.
    ConstantDirection { u: Vec2, q: Profile },
    /// `Q = -|grad Phi|^(p-2) grad Phi / Phi^(p-1)` for positive `Phi`.
    StandardForm { phi: ScalarField },
    GridField(LatticeField),
}

impl VectorFieldSpec {
    pub fn name(&self) -> &'static str {
        match self {
            VectorFieldSpec::RadialAttract { .. } => "RadialAttract",
            VectorFieldSpec::RadialRepel { .. } => "RadialRepel",
            VectorFieldSpec::ConstantDirection { .. } => "ConstantDirection",
            VectorFieldSpec::StandardForm { .. } => "StandardForm",
            VectorFieldSpec::GridField(_) => "GridField",
        }
    }

    pub fn zero(grid: &Grid) -> Self {
        VectorFieldSpec::GridField(LatticeField::from_fn(grid, |_| Vec2::default()))
    }
}

fn radial(c: f64, origin: Vec2, d: u32, x: Vec2, p: f64) -> Result<(Vec2, f64), Error> {
    let r = x - origin;
    let n = r.norm();
    if n < 1e-9 {
        return Err(Error::InvalidArgument(format!(
            "radial field evaluated at |x| = {n:e} from its centre"
        )));
    }
    let q = r * (c / n.powf(p));
    Ok((q, c * (d as f64 - p) / n.powf(p)))
}

/// `Q(x)` and `div Q(x)`.
///
/// Radial fields are analytic; the directional field differentiates its
/// profile by centred differences; grid-based fields use centred differences
/// on the lattice (`grid` must then be the field's grid).
pub fn field_eval(
    spec: &VectorFieldSpec,
    x: Vec2,
    p: Exponent,
    grid: Option<&Grid>,
) -> Result<(Vec2, f64), Error> {
    let pv = p.p();
    let outside = || Error::Oracle(OracleError::OutsideSupport { x: x.x, y: x.y });
    match spec {
        VectorFieldSpec::RadialAttract { c, origin, d } => radial(*c, *origin, *d, x, pv),
        VectorFieldSpec::RadialRepel { c, origin, d } => radial(-*c, *origin, *d, x, pv),
        VectorFieldSpec::ConstantDirection { u, q } => {
            let s = x.dot(*u);
            Ok((*u * q.value(s), q.derivative(s)))
        }
        VectorFieldSpec::GridField(field) => Ok((
            field.value_at(x).ok_or_else(outside)?,
            field.divergence_at(x).ok_or_else(outside)?,
        )),
        VectorFieldSpec::StandardForm { .. } => {
            let grid = grid.ok_or_else(|| {
                Error::InvalidArgument("the standard-form field needs its grid".into())
            })?;
            let terms = node_terms(spec, grid, p)?;
            let q = interpolate_inside(grid, x, |i| terms.q[i])?;
            let div = interpolate_inside(grid, x, |i| Vec2::new(terms.div[i], 0.0))?.x;
            Ok((q, div))
        }
    }
}

fn interpolate_inside(grid: &Grid, x: Vec2, f: impl Fn(usize) -> Vec2) -> Result<Vec2, Error> {
    let (i, j, s, t) = grid
        .cell_of(x)
        .ok_or(OracleError::OutsideSupport { x: x.x, y: x.y })?;
    let mut acc = Vec2::default();
    let mut plain = Vec2::default();
    let mut wsum = 0.0;
    let mut count = 0;
    for (di, dj, w) in [
        (0, 0, (1.0 - s) * (1.0 - t)),
        (1, 0, s * (1.0 - t)),
        (0, 1, (1.0 - s) * t),
        (1, 1, s * t),
    ] {
        if let Some(idx) = grid.inside_index(i as i64 + di, j as i64 + dj) {
            let v = f(idx);
            acc = acc + v * w;
            plain = plain + v;
            wsum += w;
            count += 1;
        }
    }
    match count {
        0 => Err(OracleError::OutsideSupport { x: x.x, y: x.y }.into()),
        _ if wsum > 1e-9 => Ok(acc / wsum),
        _ => Ok(plain / count as f64),
    }
}

fn standard_q(grad: Vec2, phi_value: f64, p: f64) -> Vec2 {
    let g = grad.norm();
    if g == 0.0 {
        return Vec2::default();
    }
    grad * (-g.powf(p - 2.0) / phi_value.powf(p - 1.0))
}

fn positive_phi(phi: &ScalarField) -> Result<(), Error> {
    if let Some(v) = phi.values().iter().find(|v| !(**v > 0.0)) {
        return Err(Error::InvalidArgument(format!(
            "standard form needs a positive comparison function, found {v}"
        )));
    }
    Ok(())
}

/// Standard-form field at the inside nodes.
pub fn standard_form_q(grid: &Grid, phi: &ScalarField, p: f64) -> Result<Vec<Vec2>, Error> {
    positive_phi(phi)?;
    Ok((0..grid.n_inside())
        .map(|idx| standard_q(node_gradient(grid, phi.values(), idx), phi.values()[idx], p))
        .collect())
}

/// Pointwise data at every inside node: `Q`, `div Q` and
/// `W = div Q - (p-1)|Q|^p'`.
#[derive(Clone, Debug)]
pub struct NodeTerms {
    pub q: Vec<Vec2>,
    pub div: Vec<f64>,
    pub w: Vec<f64>,
}

pub(crate) fn young_term(q: Vec2, p: Exponent) -> f64 {
    (p.p() - 1.0) * q.norm().powf(p.dual())
}

/// Evaluates a field at the inside nodes of `grid`.
///
/// For the standard form `W` is the discrete `-Delta_p Phi / Phi^(p-1)` of
/// the oracle's energy, so an oracle eigenfunction returns its own
/// eigenvalue; `div Q` is then defined as `W + (p-1)|Q|^p'`.
pub fn node_terms(spec: &VectorFieldSpec, grid: &Grid, p: Exponent) -> Result<NodeTerms, Error> {
    let n = grid.n_inside();
    let pv = p.p();
    match spec {
        VectorFieldSpec::StandardForm { phi } => {
            phi.check(grid)?;
            let q = standard_form_q(grid, phi, pv)?;
            let (_, grad) = PEnergy::new(grid, pv).energy_gradient(phi.values());
            let h2 = grid.h() * grid.h();
            let w: Vec<f64> = grad
                .iter()
                .zip(phi.values())
                .map(|(g, v)| g / (pv * h2 * v.powf(pv - 1.0)))
                .collect();
            let div = w.iter().zip(&q).map(|(w, q)| w + young_term(*q, p)).collect();
            Ok(NodeTerms { q, div, w })
        }
        VectorFieldSpec::GridField(field) => {
            let (nx, _) = grid.dims();
            if field.nx != nx || field.h != grid.h() {
                return Err(OracleError::FieldMismatch("lattice differs from the grid".into()).into());
            }
            let mut terms = NodeTerms {
                q: Vec::with_capacity(n),
                div: Vec::with_capacity(n),
                w: Vec::with_capacity(n),
            };
            for idx in 0..n {
                let (i, j) = grid.lattice_of(idx);
                let (q, d) = field.node(i, j);
                terms.q.push(q);
                terms.div.push(d);
                terms.w.push(d - young_term(q, p));
            }
            Ok(terms)
        }
        _ => {
            let mut terms = NodeTerms {
                q: Vec::with_capacity(n),
                div: Vec::with_capacity(n),
                w: Vec::with_capacity(n),
            };
            for x in grid.positions() {
                let (q, d) = field_eval(spec, x, p, Some(grid))?;
                terms.q.push(q);
                terms.div.push(d);
                terms.w.push(d - young_term(q, p));
            }
            Ok(terms)
        }
    }
}

/// `Q` at a boundary sample.
pub(crate) fn boundary_q(spec: &VectorFieldSpec, grid: &Grid, p: Exponent, x: Vec2) -> Result<Vec2, Error> {
    match spec {
        VectorFieldSpec::StandardForm { phi } => {
            let q = standard_form_q(grid, phi, p.p())?;
            interpolate_inside(grid, x, |i| q[i])
        }
        _ => Ok(field_eval(spec, x, p, Some(grid))?.0),
    }
}

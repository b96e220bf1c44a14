//! Planar domains with labelled boundary pieces.
//!
//! A [`Domain`] is an outer counterclockwise polyline plus optional clockwise
//! holes. Every edge carries a [`Label`]; edge `i` of a ring runs from vertex
//! `i` to vertex `i + 1`. Smooth boundaries are represented by fine polylines
//! that may carry analytic outward normals at their vertices.

use std::f64::consts::PI;
use std::ops::{Add, Div, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::error::GeometryError;

/// Points within this distance (relative to the diameter) of the boundary
/// count as on it.
pub const BOUNDARY_EPS: f64 = 1e-12;

const NORMAL_TOL: f64 = 1e-12;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Vec2 {
    pub x: f64,
    pub y: f64,
}

impl Vec2 {
    pub const fn new(x: f64, y: f64) -> Self {
        Vec2 { x, y }
    }

    pub fn from_angle(theta: f64) -> Self {
        Vec2::new(theta.cos(), theta.sin())
    }

    pub fn dot(self, other: Vec2) -> f64 {
        self.x * other.x + self.y * other.y
    }

    /// z-component of the 3D cross product.
    pub fn cross(self, other: Vec2) -> f64 {
        self.x * other.y - self.y * other.x
    }

    pub fn norm(self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn normalized(self) -> Vec2 {
        self / self.norm()
    }

    /// Rotation by -90 degrees; the outward normal of a counterclockwise edge.
    pub fn perp_right(self) -> Vec2 {
        Vec2::new(self.y, -self.x)
    }

    pub fn lerp(self, other: Vec2, t: f64) -> Vec2 {
        self + (other - self) * t
    }

    pub fn is_finite(self) -> bool {
        self.x.is_finite() && self.y.is_finite()
    }
}

impl Add for Vec2 {
    type Output = Vec2;
    fn add(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x + o.x, self.y + o.y)
    }
}

impl Sub for Vec2 {
    type Output = Vec2;
    fn sub(self, o: Vec2) -> Vec2 {
        Vec2::new(self.x - o.x, self.y - o.y)
    }
}

impl Mul<f64> for Vec2 {
    type Output = Vec2;
    fn mul(self, s: f64) -> Vec2 {
        Vec2::new(self.x * s, self.y * s)
    }
}

impl Div<f64> for Vec2 {
    type Output = Vec2;
    fn div(self, s: f64) -> Vec2 {
        Vec2::new(self.x / s, self.y / s)
    }
}

impl Neg for Vec2 {
    type Output = Vec2;
    fn neg(self) -> Vec2 {
        Vec2::new(-self.x, -self.y)
    }
}

/// Boundary condition carried by an edge.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Label {
    Dirichlet,
    Neumann,
}

/// Raw input for one closed polyline.
#[derive(Clone, Debug, PartialEq)]
pub struct RingSpec {
    pub vertices: Vec<Vec2>,
    pub labels: Vec<Label>,
    pub normals: Option<Vec<Vec2>>,
}

impl RingSpec {
    pub fn new(vertices: Vec<Vec2>, labels: Vec<Label>) -> Self {
        RingSpec {
            vertices,
            labels,
            normals: None,
        }
    }

    pub fn with_normals(mut self, normals: Vec<Vec2>) -> Self {
        self.normals = Some(normals);
        self
    }
}

/// A validated closed polyline. Outer rings are counterclockwise, holes clockwise.
#[derive(Clone, Debug, PartialEq)]
pub struct Ring {
    vertices: Vec<Vec2>,
    labels: Vec<Label>,
    normals: Option<Vec<Vec2>>,
}

impl Ring {
    pub fn vertices(&self) -> &[Vec2] {
        &self.vertices
    }

    pub fn labels(&self) -> &[Label] {
        &self.labels
    }

    pub fn normals(&self) -> Option<&[Vec2]> {
        self.normals.as_deref()
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn signed_area(&self) -> f64 {
        signed_area(&self.vertices)
    }
}

/// One boundary segment with its cached outward normal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub a: Vec2,
    pub b: Vec2,
    pub label: Label,
    /// Outward unit normal of the straight segment.
    pub normal: Vec2,
    /// Analytic normals at the endpoints, when supplied.
    pub vertex_normals: Option<(Vec2, Vec2)>,
    pub ring: usize,
    pub length: f64,
}

impl Edge {
    pub fn point_at(&self, t: f64) -> Vec2 {
        self.a.lerp(self.b, t)
    }

    /// Outward normal at parameter `t`; interpolates analytic normals when present.
    pub fn normal_at(&self, t: f64) -> Vec2 {
        match self.vertex_normals {
            Some((na, nb)) => na.lerp(nb, t).normalized(),
            None => self.normal,
        }
    }

    /// Closest parameter in `[0, 1]` to `p`.
    pub fn project(&self, p: Vec2) -> f64 {
        let e = self.b - self.a;
        ((p - self.a).dot(e) / e.dot(e)).clamp(0.0, 1.0)
    }

    pub fn distance(&self, p: Vec2) -> f64 {
        (self.point_at(self.project(p)) - p).norm()
    }
}

/// A sampled point of the boundary.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundaryPoint {
    pub edge_index: usize,
    pub parameter: f64,
    pub position: Vec2,
    pub normal: Vec2,
    pub label: Label,
}

/// Result of a ray cast.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Hit {
    pub distance: f64,
    pub point: BoundaryPoint,
}

/// Which part of the boundary a query looks at.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BoundaryPart {
    NeumannPart,
    DirichletPart,
    WholeBoundary,
}

impl BoundaryPart {
    fn selects(self, label: Label) -> bool {
        match self {
            BoundaryPart::NeumannPart => label == Label::Neumann,
            BoundaryPart::DirichletPart => label == Label::Dirichlet,
            BoundaryPart::WholeBoundary => true,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StarlikeReport {
    pub holds: bool,
    /// A direction whose ray meets the selected boundary more than once.
    pub witness: Option<Vec2>,
    pub max_crossings: usize,
    pub n_rays: usize,
}

/// Mixed-boundary planar domain.
#[derive(Clone, Debug, PartialEq)]
pub struct Domain {
    rings: Vec<Ring>,
    origin: Option<Vec2>,
    edges: Vec<Edge>,
    diameter: f64,
}

/// Validates a simply connected domain. See [`Domain::new`].
pub fn validate_domain(
    vertices: Vec<Vec2>,
    labels: Vec<Label>,
    normals: Option<Vec<Vec2>>,
    origin: Option<Vec2>,
) -> Result<Domain, GeometryError> {
    Domain::new(
        RingSpec {
            vertices,
            labels,
            normals,
        },
        Vec::new(),
        origin,
    )
}

impl Domain {
    /// Validates an outer ring plus holes.
    ///
    /// Clockwise input is reoriented (outer rings become counterclockwise, holes
    /// clockwise) with labels and normals permuted to follow their edges.
    pub fn new(
        outer: RingSpec,
        holes: Vec<RingSpec>,
        origin: Option<Vec2>,
    ) -> Result<Domain, GeometryError> {
        let mut rings = Vec::with_capacity(1 + holes.len());
        rings.push(build_ring(outer, true)?);
        for hole in holes {
            rings.push(build_ring(hole, false)?);
        }

        let outer_ring = &rings[0];
        for (k, hole) in rings.iter().enumerate().skip(1) {
            let inside = hole
                .vertices
                .iter()
                .all(|v| crossing_parity(&outer_ring.vertices, *v));
            if !inside {
                return Err(GeometryError::HoleOutside(k));
            }
            for (j, other) in rings.iter().enumerate().skip(1) {
                if j != k && crossing_parity(&other.vertices, hole.vertices[0]) {
                    return Err(GeometryError::HoleOutside(k));
                }
            }
        }

        let mut edges = Vec::new();
        for (ri, ring) in rings.iter().enumerate() {
            let n = ring.vertices.len();
            for i in 0..n {
                let a = ring.vertices[i];
                let b = ring.vertices[(i + 1) % n];
                let e = b - a;
                let length = e.norm();
                edges.push(Edge {
                    a,
                    b,
                    label: ring.labels[i],
                    normal: e.perp_right() / length,
                    vertex_normals: ring.normals.as_ref().map(|ns| (ns[i], ns[(i + 1) % n])),
                    ring: ri,
                    length,
                });
            }
        }

        check_intersections(&edges)?;

        let offsets = ring_offsets(&rings);
        for (ri, ring) in rings.iter().enumerate() {
            if let Some(ns) = &ring.normals {
                let n = ring.len();
                for i in 0..n {
                    let prev = &edges[offsets[ri] + (i + n - 1) % n];
                    let next = &edges[offsets[ri] + i];
                    if ns[i].dot(prev.normal + next.normal) <= 0.0 {
                        return Err(GeometryError::InwardNormal {
                            index: offsets[ri] + i,
                        });
                    }
                }
            }
        }

        let diameter = vertex_diameter(&rings[0].vertices);
        let domain = Domain {
            rings,
            origin,
            edges,
            diameter,
        };
        if domain.area() <= 0.0 {
            return Err(GeometryError::ZeroArea);
        }
        Ok(domain)
    }

    pub fn rings(&self) -> &[Ring] {
        &self.rings
    }

    pub fn outer(&self) -> &Ring {
        &self.rings[0]
    }

    pub fn holes(&self) -> &[Ring] {
        &self.rings[1..]
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn origin(&self) -> Option<Vec2> {
        self.origin
    }

    pub fn with_origin(mut self, origin: Option<Vec2>) -> Self {
        self.origin = origin;
        self
    }

    pub fn diameter(&self) -> f64 {
        self.diameter
    }

    /// Enclosed area (holes subtracted).
    pub fn area(&self) -> f64 {
        self.rings.iter().map(Ring::signed_area).sum()
    }

    pub fn bounding_box(&self) -> (Vec2, Vec2) {
        let mut lo = Vec2::new(f64::INFINITY, f64::INFINITY);
        let mut hi = Vec2::new(f64::NEG_INFINITY, f64::NEG_INFINITY);
        for v in &self.rings[0].vertices {
            lo = Vec2::new(lo.x.min(v.x), lo.y.min(v.y));
            hi = Vec2::new(hi.x.max(v.x), hi.y.max(v.y));
        }
        (lo, hi)
    }

    pub fn has_label(&self, label: Label) -> bool {
        self.edges.iter().any(|e| e.label == label)
    }

    /// Total length of the selected boundary part.
    pub fn boundary_length(&self, part: BoundaryPart) -> f64 {
        self.edges
            .iter()
            .filter(|e| part.selects(e.label))
            .map(|e| e.length)
            .sum()
    }

    /// Image of the domain under `x -> s x` (origin included).
    pub fn scaled(&self, s: f64) -> Domain {
        assert!(s > 0.0, "dilation factor must be positive");
        let map_ring = |r: &Ring| RingSpec {
            vertices: r.vertices.iter().map(|v| *v * s).collect(),
            labels: r.labels.clone(),
            normals: r.normals.clone(),
        };
        Domain::new(
            map_ring(&self.rings[0]),
            self.rings[1..].iter().map(map_ring).collect(),
            self.origin.map(|o| o * s),
        )
        .expect("dilation preserves validity")
    }

    /// Rigid translation by `t` (origin included).
    pub fn translated(&self, t: Vec2) -> Domain {
        let map_ring = |r: &Ring| RingSpec {
            vertices: r.vertices.iter().map(|v| *v + t).collect(),
            labels: r.labels.clone(),
            normals: r.normals.clone(),
        };
        Domain::new(
            map_ring(&self.rings[0]),
            self.rings[1..].iter().map(map_ring).collect(),
            self.origin.map(|o| o + t),
        )
        .expect("translation preserves validity")
    }

    /// Rotation about the coordinate origin by `theta` (origin hint included).
    pub fn rotated(&self, theta: f64) -> Domain {
        let (s, c) = theta.sin_cos();
        let rot = move |v: Vec2| Vec2::new(c * v.x - s * v.y, s * v.x + c * v.y);
        let map_ring = |r: &Ring| RingSpec {
            vertices: r.vertices.iter().map(|v| rot(*v)).collect(),
            labels: r.labels.clone(),
            normals: r
                .normals
                .as_ref()
                .map(|ns| ns.iter().map(|n| rot(*n).normalized()).collect()),
        };
        Domain::new(
            map_ring(&self.rings[0]),
            self.rings[1..].iter().map(map_ring).collect(),
            self.origin.map(rot),
        )
        .expect("rotation preserves validity")
    }

    /// Distance from `p` to the selected boundary part.
    pub fn distance_to_boundary(&self, p: Vec2, part: BoundaryPart) -> f64 {
        self.edges
            .iter()
            .filter(|e| part.selects(e.label))
            .map(|e| e.distance(p))
            .fold(f64::INFINITY, f64::min)
    }

    /// Nearest point of the whole boundary.
    pub fn nearest_boundary_point(&self, p: Vec2) -> BoundaryPoint {
        let mut best = (f64::INFINITY, 0usize, 0.0);
        for (i, e) in self.edges.iter().enumerate() {
            let t = e.project(p);
            let d = (e.point_at(t) - p).norm();
            if d < best.0 {
                best = (d, i, t);
            }
        }
        self.boundary_point(best.1, best.2)
    }

    pub fn boundary_point(&self, edge_index: usize, parameter: f64) -> BoundaryPoint {
        let e = &self.edges[edge_index];
        BoundaryPoint {
            edge_index,
            parameter,
            position: e.point_at(parameter),
            normal: e.normal_at(parameter),
            label: e.label,
        }
    }

    /// Strict containment by even-odd crossing; points within
    /// [`BOUNDARY_EPS`] of the boundary are outside.
    pub fn contains(&self, p: Vec2) -> bool {
        let tol = BOUNDARY_EPS * self.diameter.max(1.0);
        if self.distance_to_boundary(p, BoundaryPart::WholeBoundary) <= tol {
            return false;
        }
        self.rings
            .iter()
            .filter(|r| crossing_parity(&r.vertices, p))
            .count()
            % 2
            == 1
    }

    /// Inside or on the boundary within `tol`.
    pub fn contains_closed(&self, p: Vec2, tol: f64) -> bool {
        self.contains(p) || self.distance_to_boundary(p, BoundaryPart::WholeBoundary) <= tol
    }

    /// First boundary crossing of the ray `point + t * direction`, `t > 0`.
    ///
    /// When the ray passes through a vertex the start point is nudged
    /// sideways by `1e-9 * diameter` and the cast repeated, so the reported
    /// edge (and its label) is that of a generic nearby ray.
    pub fn first_hit(&self, point: Vec2, direction: Vec2) -> Option<Hit> {
        let dir = direction.normalized();
        if !dir.is_finite() || !point.is_finite() {
            return None;
        }
        let side = dir.perp_right();
        let nudge = 1e-9 * self.diameter;
        let mut last = None;
        for attempt in 0..4 {
            let start = point + side * (nudge * attempt as f64);
            match self.cast(start, dir) {
                Some((t, idx, s)) => {
                    let vertex_hit = !(1e-9..=1.0 - 1e-9).contains(&s);
                    last = Some((t, idx, s));
                    if !vertex_hit {
                        break;
                    }
                }
                None => continue,
            }
        }
        let (_, idx, s) = last?;
        let bp = self.boundary_point(idx, s.clamp(0.0, 1.0));
        Some(Hit {
            distance: (bp.position - point).norm(),
            point: bp,
        })
    }

    fn cast(&self, o: Vec2, dir: Vec2) -> Option<(f64, usize, f64)> {
        let t_min = BOUNDARY_EPS * self.diameter.max(1.0);
        let mut best: Option<(f64, usize, f64)> = None;
        for (i, e) in self.edges.iter().enumerate() {
            if let Some((t, s)) = ray_segment(o, dir, e.a, e.b) {
                if t > t_min && best.is_none_or(|b| t < b.0) {
                    best = Some((t, i, s));
                }
            }
        }
        best
    }

    /// Ray casts along `n_angles` uniformly spaced directions
    /// `theta_k = 2 pi (k + 1/2) / n` at once.
    ///
    /// Each edge is rasterized over the angular window it subtends from `x`,
    /// so the cost is proportional to the number of edges plus the number of
    /// (ray, crossing) pairs rather than their product. Agrees with
    /// [`Domain::first_hit`] ray by ray.
    pub fn angular_hits(&self, x: Vec2, n_angles: usize) -> Vec<Option<(f64, Label)>> {
        let mut zbuf: Vec<Option<(f64, Label)>> = vec![None; n_angles];
        let step = 2.0 * PI / n_angles as f64;
        for e in &self.edges {
            let va = e.a - x;
            let vb = e.b - x;
            let c = va.cross(vb);
            if c.abs() <= 1e-14 * va.norm() * vb.norm() {
                continue;
            }
            let (from, sweep) = {
                let ta = va.y.atan2(va.x);
                let tb = vb.y.atan2(vb.x);
                let mut d = tb - ta;
                if d > PI {
                    d -= 2.0 * PI;
                } else if d < -PI {
                    d += 2.0 * PI;
                }
                if d >= 0.0 {
                    (ta, d)
                } else {
                    (tb, -d)
                }
            };
            let seg = e.b - e.a;
            let num = va.cross(seg);
            let k0 = ((from - 1e-12) / step - 0.5).ceil() as i64;
            let k1 = ((from + sweep + 1e-12) / step - 0.5).floor() as i64;
            for k in k0..=k1 {
                let theta = step * (k as f64 + 0.5);
                let dir = Vec2::from_angle(theta);
                let den = dir.cross(seg);
                if den == 0.0 {
                    continue;
                }
                let t = num / den;
                if t <= 0.0 {
                    continue;
                }
                let slot = &mut zbuf[k.rem_euclid(n_angles as i64) as usize];
                if slot.is_none_or(|(best, _)| t < best) {
                    *slot = Some((t, e.label));
                }
            }
        }
        zbuf
    }

    /// Samples `n` points of the selected boundary part, uniformly in arc length.
    pub fn sample_boundary(&self, n: usize, part: BoundaryPart) -> Vec<BoundaryPoint> {
        let total = self.boundary_length(part);
        if n == 0 || total <= 0.0 {
            return Vec::new();
        }
        let ds = total / n as f64;
        let mut out = Vec::with_capacity(n);
        let mut target = 0.5 * ds;
        let mut acc = 0.0;
        for (i, e) in self.edges.iter().enumerate() {
            if !part.selects(e.label) {
                continue;
            }
            while target < acc + e.length && out.len() < n {
                let t = (target - acc) / e.length;
                out.push(self.boundary_point(i, t));
                target += ds;
            }
            acc += e.length;
        }
        out
    }

    /// Checks starlikeness of the selected boundary part with respect to the
    /// origin by casting `n_rays` rays and counting distinct crossings.
    pub fn is_starlike_from_origin(
        &self,
        part: BoundaryPart,
        n_rays: usize,
    ) -> Result<StarlikeReport, GeometryError> {
        let origin = self.origin.ok_or(GeometryError::MissingOrigin)?;
        let merge = 1e-9 * self.diameter;
        let mut report = StarlikeReport {
            holds: true,
            witness: None,
            max_crossings: 0,
            n_rays,
        };
        let mut ts = Vec::new();
        for k in 0..n_rays {
            let dir = Vec2::from_angle(2.0 * PI * (k as f64 + 0.5) / n_rays as f64);
            ts.clear();
            for e in self.edges.iter().filter(|e| part.selects(e.label)) {
                if let Some((t, _)) = ray_segment(origin, dir, e.a, e.b) {
                    if t > 0.0 {
                        ts.push(t);
                    }
                }
            }
            let count = distinct_count(&mut ts, merge);
            if count > report.max_crossings {
                report.max_crossings = count;
            }
            if count > 1 && report.witness.is_none() {
                report.holds = false;
                report.witness = Some(dir);
            }
        }
        Ok(report)
    }

    /// Largest number of distinct crossings of lines parallel to `direction`
    /// with the selected boundary part, over `n_lines` offsets spanning the
    /// domain's width. One crossing everywhere means the part is a graph over
    /// the hyperplane orthogonal to `direction`.
    pub fn max_line_crossings(
        &self,
        part: BoundaryPart,
        direction: Vec2,
        n_lines: usize,
    ) -> (usize, Option<Vec2>) {
        let dir = direction.normalized();
        let across = Vec2::new(-dir.y, dir.x);
        let (lo, hi) = projection_range(&self.rings[0].vertices, across);
        let (blo, _) = projection_range(&self.rings[0].vertices, dir);
        let merge = 1e-9 * self.diameter;
        let mut worst = (0usize, None);
        let mut ts = Vec::new();
        for k in 0..n_lines {
            let off = lo + (hi - lo) * (k as f64 + 0.5) / n_lines as f64;
            let start = across * off + dir * (blo - self.diameter);
            ts.clear();
            for e in self.edges.iter().filter(|e| part.selects(e.label)) {
                if let Some((t, _)) = ray_segment(start, dir, e.a, e.b) {
                    ts.push(t);
                }
            }
            let count = distinct_count(&mut ts, merge);
            if count > worst.0 {
                worst = (count, Some(start));
            }
        }
        worst
    }

    /// True iff the domain has no holes and every turn is counterclockwise
    /// (normalized cross products `>= -1e-12`).
    pub fn is_convex(&self) -> bool {
        if self.rings.len() != 1 {
            return false;
        }
        let v = &self.rings[0].vertices;
        let n = v.len();
        (0..n).all(|i| {
            let e0 = v[(i + 1) % n] - v[i];
            let e1 = v[(i + 2) % n] - v[(i + 1) % n];
            e0.cross(e1) / (e0.norm() * e1.norm()) >= -1e-12
        })
    }

    /// Minimum over boundary pairs of `((y - x) . nu_y) / |y - x|^(p + d)`,
    /// clamped below at 0.
    ///
    /// With analytic normals the pairs range over the vertices, which lie on
    /// the smooth curve; otherwise over `n_boundary_samples` arc-length
    /// samples with edge normals, where same-edge pairs force the value to 0.
    pub fn eccentricity(
        &self,
        p: f64,
        d: u32,
        n_boundary_samples: usize,
    ) -> Result<f64, GeometryError> {
        if !self.is_convex() {
            return Err(GeometryError::NotConvex);
        }
        let pts: Vec<(Vec2, Vec2)> = match self.rings[0].normals() {
            Some(ns) => {
                let verts = self.rings[0].vertices();
                let stride = verts.len().div_ceil(n_boundary_samples.max(1)).max(1);
                verts
                    .iter()
                    .zip(ns)
                    .step_by(stride)
                    .map(|(v, n)| (*v, *n))
                    .collect()
            }
            None => self
                .sample_boundary(n_boundary_samples, BoundaryPart::WholeBoundary)
                .into_iter()
                .map(|b| (b.position, b.normal))
                .collect(),
        };
        let expo = p + d as f64;
        let tiny = 1e-12 * self.diameter;
        let mut best = f64::INFINITY;
        for (i, &(x, _)) in pts.iter().enumerate() {
            for (j, &(y, ny)) in pts.iter().enumerate() {
                if i == j {
                    continue;
                }
                let diff = y - x;
                let dist = diff.norm();
                if dist <= tiny {
                    continue;
                }
                let mut num = diff.dot(ny);
                if num.abs() <= 1e-12 * dist {
                    num = 0.0;
                }
                best = best.min(num / dist.powf(expo));
            }
        }
        Ok(if best.is_finite() { best.max(0.0) } else { 0.0 })
    }

    /// Width of the projection onto `direction`.
    pub fn directional_extent(&self, direction: Vec2) -> f64 {
        let (lo, hi) = projection_range(&self.rings[0].vertices, direction.normalized());
        hi - lo
    }

    /// `(min, max)` of `|x - origin|` over the closed domain.
    pub fn radial_extent(&self) -> Result<(f64, f64), GeometryError> {
        let origin = self.origin.ok_or(GeometryError::MissingOrigin)?;
        let r_max = self.rings[0]
            .vertices
            .iter()
            .map(|v| (*v - origin).norm())
            .fold(0.0, f64::max);
        let r_min = if self.contains(origin) {
            0.0
        } else {
            self.distance_to_boundary(origin, BoundaryPart::WholeBoundary)
        };
        Ok((r_min, r_max))
    }
}

fn build_ring(spec: RingSpec, outer: bool) -> Result<Ring, GeometryError> {
    let RingSpec {
        mut vertices,
        mut labels,
        mut normals,
    } = spec;
    let n = vertices.len();
    if n < 3 {
        return Err(GeometryError::TooFewVertices(n));
    }
    if labels.len() != n {
        return Err(GeometryError::LabelCount {
            expected: n,
            got: labels.len(),
        });
    }
    if let Some(i) = vertices.iter().position(|v| !v.is_finite()) {
        return Err(GeometryError::NonFinite(i));
    }
    for i in 0..n {
        if (vertices[(i + 1) % n] - vertices[i]).norm() == 0.0 {
            return Err(GeometryError::DegenerateEdge(i));
        }
    }
    if let Some(ns) = &normals {
        if ns.len() != n {
            return Err(GeometryError::NormalCount {
                expected: n,
                got: ns.len(),
            });
        }
        for (index, nv) in ns.iter().enumerate() {
            let length = nv.norm();
            if !length.is_finite() || (length - 1.0).abs() > NORMAL_TOL {
                return Err(GeometryError::NonUnitNormal { index, length });
            }
        }
    }

    // Self-intersection is checked before area so a bowtie reports as such.
    let probe: Vec<Edge> = (0..n)
        .map(|i| {
            let a = vertices[i];
            let b = vertices[(i + 1) % n];
            Edge {
                a,
                b,
                label: labels[i],
                normal: Vec2::default(),
                vertex_normals: None,
                ring: 0,
                length: (b - a).norm(),
            }
        })
        .collect();
    check_intersections(&probe)?;

    let area = signed_area(&vertices);
    let scale = vertex_diameter(&vertices).powi(2);
    if area.abs() <= 1e-14 * scale {
        return Err(GeometryError::ZeroArea);
    }
    if (area > 0.0) != outer {
        vertices.reverse();
        labels = (0..n).map(|j| labels[(2 * n - 2 - j) % n]).collect();
        if let Some(ns) = normals.as_mut() {
            ns.reverse();
        }
    }
    Ok(Ring {
        vertices,
        labels,
        normals,
    })
}

fn ring_offsets(rings: &[Ring]) -> Vec<usize> {
    let mut acc = 0;
    rings
        .iter()
        .map(|r| {
            let o = acc;
            acc += r.len();
            o
        })
        .collect()
}

fn check_intersections(edges: &[Edge]) -> Result<(), GeometryError> {
    let n = edges.len();
    for i in 0..n {
        for j in (i + 1)..n {
            let (ei, ej) = (&edges[i], &edges[j]);
            let shares_end = ei.b == ej.a;
            let shares_start = ej.b == ei.a;
            if shares_end || shares_start {
                // Adjacent edges may only meet at their common vertex.
                let (pivot, other_i, other_j) = if shares_end {
                    (ei.b, ei.a, ej.b)
                } else {
                    (ei.a, ei.b, ej.a)
                };
                let u = other_i - pivot;
                let w = other_j - pivot;
                if u.cross(w).abs() <= 1e-14 * u.norm() * w.norm() && u.dot(w) > 0.0 {
                    return Err(GeometryError::SelfIntersection {
                        first: i,
                        second: j,
                    });
                }
                continue;
            }
            if segments_intersect(ei.a, ei.b, ej.a, ej.b) {
                return Err(GeometryError::SelfIntersection {
                    first: i,
                    second: j,
                });
            }
        }
    }
    Ok(())
}

fn orient(a: Vec2, b: Vec2, c: Vec2) -> f64 {
    (b - a).cross(c - a)
}

fn on_segment(a: Vec2, b: Vec2, p: Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test (touching counts).
fn segments_intersect(p1: Vec2, p2: Vec2, q1: Vec2, q2: Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// Intersection of the ray `o + t dir` with segment `[a, b]`: `(t, s)` with
/// the hit at `a + s (b - a)`. `t` may be negative; parallel segments miss.
fn ray_segment(o: Vec2, dir: Vec2, a: Vec2, b: Vec2) -> Option<(f64, f64)> {
    let e = b - a;
    let den = dir.cross(e);
    if den.abs() <= 1e-15 * e.norm() {
        return None;
    }
    let ao = a - o;
    let t = ao.cross(e) / den;
    let s = ao.cross(dir) / den;
    if (-1e-12..=1.0 + 1e-12).contains(&s) {
        Some((t, s))
    } else {
        None
    }
}

fn distinct_count(ts: &mut [f64], merge: f64) -> usize {
    ts.sort_by(f64::total_cmp);
    let mut count = 0;
    let mut last = f64::NEG_INFINITY;
    for &t in ts.iter() {
        if t - last > merge {
            count += 1;
        }
        last = t;
    }
    count
}

fn crossing_parity(vertices: &[Vec2], p: Vec2) -> bool {
    let n = vertices.len();
    let mut inside = false;
    for i in 0..n {
        let a = vertices[i];
        let b = vertices[(i + 1) % n];
        if (a.y > p.y) != (b.y > p.y) {
            let x = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if p.x < x {
                inside = !inside;
            }
        }
    }
    inside
}

fn signed_area(vertices: &[Vec2]) -> f64 {
    let n = vertices.len();
    0.5 * (0..n)
        .map(|i| vertices[i].cross(vertices[(i + 1) % n]))
        .sum::<f64>()
}

fn vertex_diameter(vertices: &[Vec2]) -> f64 {
    let mut best: f64 = 0.0;
    for (i, a) in vertices.iter().enumerate() {
        for b in &vertices[i + 1..] {
            best = best.max((*a - *b).norm());
        }
    }
    best
}

fn projection_range(vertices: &[Vec2], dir: Vec2) -> (f64, f64) {
    vertices.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| {
        let s = v.dot(dir);
        (lo.min(s), hi.max(s))
    })
}

/// Builders for the test-and-example domain family.
pub mod shapes {
    use super::*;

    /// Axis-aligned rectangle `[x0, x1] x [y0, y1]`; labels in edge order
    /// south, east, north, west.
    pub fn rectangle(x0: f64, y0: f64, x1: f64, y1: f64, labels: [Label; 4]) -> Domain {
        validate_domain(
            vec![
                Vec2::new(x0, y0),
                Vec2::new(x1, y0),
                Vec2::new(x1, y1),
                Vec2::new(x0, y1),
            ],
            labels.to_vec(),
            None,
            None,
        )
        .expect("rectangle is valid")
    }

    pub fn unit_square(labels: [Label; 4]) -> Domain {
        rectangle(0.0, 0.0, 1.0, 1.0, labels)
    }

    /// Regular `n`-gon inscribed in the circle of radius `r` about `center`,
    /// with analytic circle normals when `analytic_normals` is set.
    pub fn disk(center: Vec2, r: f64, n: usize, label: Label, analytic_normals: bool) -> Domain {
        let spec = circle_ring(center, r, n, vec![label; n], analytic_normals, false);
        Domain::new(spec, Vec::new(), None).expect("disk is valid")
    }

    /// Vertices of a regular polygon on a circle, counterclockwise unless `reverse`.
    pub fn circle_ring(
        center: Vec2,
        r: f64,
        n: usize,
        labels: Vec<Label>,
        analytic_normals: bool,
        reverse: bool,
    ) -> RingSpec {
        let mut vertices = Vec::with_capacity(n);
        let mut normals = Vec::with_capacity(n);
        for k in 0..n {
            let th = 2.0 * PI * k as f64 / n as f64;
            let u = Vec2::from_angle(th);
            vertices.push(center + u * r);
            normals.push(if reverse { -u } else { u });
        }
        let mut labels = labels;
        if reverse {
            vertices.reverse();
            normals.reverse();
            labels.reverse();
        }
        RingSpec {
            vertices,
            labels,
            normals: analytic_normals.then_some(normals),
        }
    }

    /// Polygonal annulus `r < |x| < big_r` about the coordinate origin, which is
    /// recorded as the origin hint.
    pub fn annulus(r: f64, big_r: f64, n: usize, inner: Label, outer: Label) -> Domain {
        let o = Vec2::default();
        let outer_ring = circle_ring(o, big_r, n, vec![outer; n], false, false);
        let inner_ring = circle_ring(o, r, n, vec![inner; n], false, true);
        Domain::new(outer_ring, vec![inner_ring], Some(o)).expect("annulus is valid")
    }

    /// Sector `r < |x| < big_r`, `0 < angle < sweep` about the coordinate
    /// origin, arcs discretized with `n_arc` segments each.
    pub fn annular_sector(
        r: f64,
        big_r: f64,
        sweep: f64,
        n_arc: usize,
        inner: Label,
        outer: Label,
        sides: Label,
    ) -> Domain {
        let mut vertices = Vec::new();
        let mut labels = Vec::new();
        // Outer arc, counterclockwise.
        for k in 0..=n_arc {
            let th = sweep * k as f64 / n_arc as f64;
            vertices.push(Vec2::from_angle(th) * big_r);
            labels.push(if k < n_arc { outer } else { sides });
        }
        // Inner arc, clockwise.
        for k in (0..=n_arc).rev() {
            let th = sweep * k as f64 / n_arc as f64;
            vertices.push(Vec2::from_angle(th) * r);
            labels.push(if k > 0 { inner } else { sides });
        }
        validate_domain(vertices, labels, None, Some(Vec2::default()))
            .expect("annular sector is valid")
    }

    /// L-shaped hexagon `[0,2]^2 \ [1,2]^2`, all Dirichlet.
    pub fn l_shape() -> Domain {
        validate_domain(
            vec![
                Vec2::new(0.0, 0.0),
                Vec2::new(2.0, 0.0),
                Vec2::new(2.0, 1.0),
                Vec2::new(1.0, 1.0),
                Vec2::new(1.0, 2.0),
                Vec2::new(0.0, 2.0),
            ],
            vec![Label::Dirichlet; 6],
            None,
            None,
        )
        .expect("L-shape is valid")
    }
}

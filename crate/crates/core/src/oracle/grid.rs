use crate::error::OracleError;
use crate::geometry::{BoundaryPart, Domain, Label, Vec2};

/// Classification of a lattice node.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Interior,
    DirichletAdjacent,
    NeumannAdjacent,
    Outside,
}

/// What lies one lattice step away from an inside node along an axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Link {
    Inside(usize),
    /// The boundary is crossed at distance `delta` on a Dirichlet edge.
    Dirichlet { delta: f64 },
    /// The boundary is crossed at distance `delta` on a Neumann edge.
    Neumann { delta: f64, normal: Vec2 },
}

/// Axis directions in link order: +x, -x, +y, -y.
pub const DIRECTIONS: [(i64, i64); 4] = [(1, 0), (-1, 0), (0, 1), (0, -1)];

/// Uniform lattice covering a domain's bounding box.
#[derive(Clone, Debug)]
pub struct Grid {
    domain: Domain,
    min: Vec2,
    h: f64,
    nx: usize,
    ny: usize,
    kinds: Vec<NodeKind>,
    unknown: Vec<usize>,
    nodes: Vec<usize>,
    links: Vec<[Link; 4]>,
    normals: Vec<Option<Vec2>>,
    has_dirichlet: bool,
}

const NOT_INSIDE: usize = usize::MAX;

/// Classifies the lattice of spacing `h` over `domain`.
pub fn build_grid(domain: &Domain, h: f64) -> Result<Grid, OracleError> {
    let diameter = domain.diameter();
    if !(h > 0.0 && h <= diameter / 8.0) {
        return Err(OracleError::SpacingTooCoarse { h, diameter });
    }
    let (lo, hi) = domain.bounding_box();
    let nx = ((hi.x - lo.x) / h - 1e-9).ceil() as usize + 1;
    let ny = ((hi.y - lo.y) / h - 1e-9).ceil() as usize + 1;
    let pos = |i: usize, j: usize| Vec2::new(lo.x + h * i as f64, lo.y + h * j as f64);

    let mut kinds = vec![NodeKind::Outside; nx * ny];
    let mut unknown = vec![NOT_INSIDE; nx * ny];
    let mut nodes = Vec::new();
    for j in 0..ny {
        for i in 0..nx {
            if domain.contains(pos(i, j)) {
                let k = j * nx + i;
                unknown[k] = nodes.len();
                nodes.push(k);
                kinds[k] = NodeKind::Interior;
            }
        }
    }
    if nodes.len() < 16 {
        return Err(OracleError::Resolution(nodes.len()));
    }

    let reach = h * (1.0 + 1e-9);
    let mut links = Vec::with_capacity(nodes.len());
    let mut normals = vec![None; nodes.len()];
    let mut has_dirichlet = false;
    for (idx, &k) in nodes.iter().enumerate() {
        let (i, j) = (k % nx, k / nx);
        let x = pos(i, j);
        let near = domain.nearest_boundary_point(x);
        let dist = (near.position - x).norm();
        let mut node_links = [Link::Inside(0); 4];
        for (slot, &(dx, dy)) in DIRECTIONS.iter().enumerate() {
            let ni = i as i64 + dx;
            let nj = j as i64 + dy;
            let neighbour = if ni >= 0 && nj >= 0 && (ni as usize) < nx && (nj as usize) < ny {
                unknown[nj as usize * nx + ni as usize]
            } else {
                NOT_INSIDE
            };
            let hit = if dist <= reach {
                domain
                    .first_hit(x, Vec2::new(dx as f64, dy as f64))
                    .filter(|hit| hit.distance <= reach)
            } else {
                None
            };
            node_links[slot] = match (hit, neighbour) {
                (None, n) if n != NOT_INSIDE => Link::Inside(n),
                (Some(hit), _) => boundary_link(hit.distance, hit.point.label, hit.point.normal),
                // Outside neighbour without a detected crossing: fall back on
                // the nearest boundary point.
                (None, _) => boundary_link(dist.min(h), near.label, near.normal),
            };
            if matches!(node_links[slot], Link::Dirichlet { .. }) {
                has_dirichlet = true;
            }
        }
        links.push(node_links);
        if dist <= reach {
            kinds[k] = match near.label {
                Label::Dirichlet => NodeKind::DirichletAdjacent,
                Label::Neumann => {
                    normals[idx] = Some(near.normal);
                    NodeKind::NeumannAdjacent
                }
            };
        }
    }

    Ok(Grid {
        domain: domain.clone(),
        min: lo,
        h,
        nx,
        ny,
        kinds,
        unknown,
        nodes,
        links,
        normals,
        has_dirichlet,
    })
}

fn boundary_link(delta: f64, label: Label, normal: Vec2) -> Link {
    match label {
        Label::Dirichlet => Link::Dirichlet { delta },
        Label::Neumann => Link::Neumann { delta, normal },
    }
}

impl Grid {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    pub fn dims(&self) -> (usize, usize) {
        (self.nx, self.ny)
    }

    pub fn origin(&self) -> Vec2 {
        self.min
    }

    /// Number of nodes strictly inside the domain (the unknowns).
    pub fn n_inside(&self) -> usize {
        self.nodes.len()
    }

    pub fn lattice_position(&self, i: usize, j: usize) -> Vec2 {
        Vec2::new(self.min.x + self.h * i as f64, self.min.y + self.h * j as f64)
    }

    /// Lattice coordinates of inside node `idx`.
    pub fn lattice_of(&self, idx: usize) -> (usize, usize) {
        let k = self.nodes[idx];
        (k % self.nx, k / self.nx)
    }

    pub fn position(&self, idx: usize) -> Vec2 {
        let (i, j) = self.lattice_of(idx);
        self.lattice_position(i, j)
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec2> + '_ {
        (0..self.nodes.len()).map(|idx| self.position(idx))
    }

    /// Inside index of lattice node `(i, j)`, if it is inside.
    pub fn inside_index(&self, i: i64, j: i64) -> Option<usize> {
        if i < 0 || j < 0 || i as usize >= self.nx || j as usize >= self.ny {
            return None;
        }
        let u = self.unknown[j as usize * self.nx + i as usize];
        (u != NOT_INSIDE).then_some(u)
    }

    pub fn lattice_kind(&self, i: usize, j: usize) -> NodeKind {
        self.kinds[j * self.nx + i]
    }

    pub fn kind(&self, idx: usize) -> NodeKind {
        self.kinds[self.nodes[idx]]
    }

    pub fn links(&self, idx: usize) -> &[Link; 4] {
        &self.links[idx]
    }

    /// Outward normal recorded for a Neumann-adjacent node.
    pub fn neumann_normal(&self, idx: usize) -> Option<Vec2> {
        self.normals[idx]
    }

    /// True iff some link reaches a Dirichlet edge.
    pub fn has_dirichlet(&self) -> bool {
        self.has_dirichlet
    }

    pub fn count_kind(&self, kind: NodeKind) -> usize {
        (0..self.n_inside()).filter(|&i| self.kind(i) == kind).count()
    }

    /// Distance from inside node `idx` to the Dirichlet part.
    pub fn dirichlet_distance(&self, idx: usize) -> f64 {
        self.domain
            .distance_to_boundary(self.position(idx), BoundaryPart::DirichletPart)
    }

    /// Lattice cell `(i, j)` containing `x`, clamped to the lattice.
    pub fn cell_of(&self, x: Vec2) -> Option<(usize, usize, f64, f64)> {
        let s = (x.x - self.min.x) / self.h;
        let t = (x.y - self.min.y) / self.h;
        if !(s >= 0.0 && t >= 0.0 && s <= (self.nx - 1) as f64 && t <= (self.ny - 1) as f64) {
            return None;
        }
        let i = (s.floor() as usize).min(self.nx - 2);
        let j = (t.floor() as usize).min(self.ny - 2);
        Some((i, j, s - i as f64, t - j as f64))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::shapes::{annulus, unit_square};
    use Label::{Dirichlet as D, Neumann as N};

    #[test]
    fn unit_square_counts() {
        let g = build_grid(&unit_square([D; 4]), 1.0 / 64.0).unwrap();
        assert_eq!(g.n_inside(), 63 * 63);
        assert!(g.has_dirichlet());
        assert_eq!(g.count_kind(NodeKind::NeumannAdjacent), 0);
        assert_eq!(g.count_kind(NodeKind::DirichletAdjacent), 4 * 63 - 4);
    }

    #[test]
    fn neumann_column_is_flagged() {
        let h = 1.0 / 64.0;
        let g = build_grid(&unit_square([D, D, D, N]), h).unwrap();
        for j in 2..62 {
            let idx = g.inside_index(1, j).unwrap();
            assert_eq!(g.kind(idx), NodeKind::NeumannAdjacent);
            let n = g.neumann_normal(idx).unwrap();
            assert!((n - Vec2::new(-1.0, 0.0)).norm() < 1e-12);
            assert!(matches!(g.links(idx)[1], Link::Neumann { .. }));
            let centre = g.inside_index(32, j).unwrap();
            assert_eq!(g.kind(centre), NodeKind::Interior);
        }
    }

    #[test]
    fn annulus_hole_is_excluded() {
        let dom = annulus(0.5, 1.0, 128, N, D);
        let h = 1.0 / 64.0;
        let g = build_grid(&dom, h).unwrap();
        assert!(g.positions().all(|x| x.norm() > 0.5 && x.norm() < 1.0));
        let expected = dom.area() / (h * h);
        assert!((g.n_inside() as f64 - expected).abs() < 0.1 * expected);
    }

    #[test]
    fn rejects_coarse_or_tiny_grids() {
        let sq = unit_square([D; 4]);
        assert!(matches!(build_grid(&sq, 0.5), Err(OracleError::SpacingTooCoarse { .. })));
        let sliver = crate::geometry::shapes::rectangle(0.0, 0.0, 1.0, 0.1, [D; 4]);
        assert!(matches!(build_grid(&sliver, 0.1), Err(OracleError::Resolution(0))));
    }
}

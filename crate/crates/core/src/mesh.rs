//! Structured hexahedral meshes of an axis-aligned prism.
//!
//! Nodes are numbered lexicographically in `(z, y, x)`, i.e. `x` runs fastest:
//! node `(i, j, k)` has index `k * (ey + 1) * (ex + 1) + j * (ex + 1) + i`.
//!
//! Element corners follow the VTK hexahedron convention: the bottom quad
//! (`k`) counter-clockwise seen from `+z`, then the top quad (`k + 1`) in the
//! same order.
//!
//! ```text
//!        7-------6
//!       /|      /|
//!      4-------5 |
//!      | 3-----|-2
//!      |/      |/
//!      0-------1
//! ```

use crate::error::{Error, Result};

/// Closed coordinate interval `[lo, hi]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const fn new(lo: f64, hi: f64) -> Self {
        Self { lo, hi }
    }

    pub fn length(&self) -> f64 {
        self.hi - self.lo
    }

    fn is_valid(&self) -> bool {
        self.lo.is_finite() && self.hi.is_finite() && self.lo < self.hi
    }

    /// Point `i` of a uniform subdivision into `n` cells; endpoints are exact.
    fn grid_point(&self, i: usize, n: usize) -> f64 {
        if i == 0 {
            self.lo
        } else if i == n {
            self.hi
        } else {
            self.lo + self.length() * (i as f64 / n as f64)
        }
    }
}

/// The elastic body `x_range × y_range × z_range` resting above a rigid
/// plane at `z = foundation_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainSpec {
    pub x_range: Interval,
    pub y_range: Interval,
    pub z_range: Interval,
    pub foundation_z: f64,
}

impl DomainSpec {
    /// `(0, 2) × (0, 1) × (0.1, 1)` above the plane `z = 0`.
    pub const fn benchmark() -> Self {
        Self {
            x_range: Interval::new(0.0, 2.0),
            y_range: Interval::new(0.0, 1.0),
            z_range: Interval::new(0.1, 1.0),
            foundation_z: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, r) in [("x", self.x_range), ("y", self.y_range), ("z", self.z_range)] {
            if !r.is_valid() {
                return Err(Error::Mesh(format!(
                    "{name} range [{}, {}] is empty or non-finite",
                    r.lo, r.hi
                )));
            }
        }
        if !self.foundation_z.is_finite() || self.foundation_z > self.z_range.lo {
            return Err(Error::Mesh(format!(
                "foundation z = {} must not lie above the body bottom z = {}",
                self.foundation_z, self.z_range.lo
            )));
        }
        Ok(())
    }
}

impl Default for DomainSpec {
    fn default() -> Self {
        Self::benchmark()
    }
}

/// Number of bricks along each coordinate axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Divisions {
    pub x: usize,
    pub y: usize,
    pub z: usize,
}

impl Divisions {
    pub fn node_count(&self) -> usize {
        (self.x + 1) * (self.y + 1) * (self.z + 1)
    }

    pub fn element_count(&self) -> usize {
        self.x * self.y * self.z
    }

    pub fn contact_node_count(&self) -> usize {
        self.x * (self.y + 1)
    }
}

/// `(⌈4·2^{ℓ/2}⌉, ⌈2·2^{ℓ/2}⌉, ⌈2·2^{ℓ/2}⌉)` for refinement level `ℓ ≥ 1`.
pub fn divisions(level: u32) -> Result<Divisions> {
    if level == 0 {
        return Err(Error::Mesh("mesh level must be at least 1".into()));
    }
    if level > 60 {
        return Err(Error::Mesh(format!("mesh level {level} is out of range")));
    }
    // 2^{ℓ/2} = 2^{⌊ℓ/2⌋} · (1 or √2); keep even levels in exact integer arithmetic.
    let base = 1u64 << (level / 2);
    let (ex, eyz) = if level % 2 == 0 {
        (4 * base, 2 * base)
    } else {
        let scale = base as f64 * std::f64::consts::SQRT_2;
        ((4.0 * scale).ceil() as u64, (2.0 * scale).ceil() as u64)
    };
    Ok(Divisions {
        x: ex as usize,
        y: eyz as usize,
        z: eyz as usize,
    })
}

/// A refinement level (when known) and the resulting divisions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MeshLevelSpec {
    pub level: Option<u32>,
    pub divisions: Divisions,
}

impl MeshLevelSpec {
    pub fn from_level(level: u32) -> Result<Self> {
        Ok(Self {
            level: Some(level),
            divisions: divisions(level)?,
        })
    }

    pub fn from_divisions(ex: usize, ey: usize, ez: usize) -> Result<Self> {
        if ex == 0 || ey == 0 || ez == 0 {
            return Err(Error::Mesh(format!(
                "divisions ({ex}, {ey}, {ez}) must all be positive"
            )));
        }
        Ok(Self {
            level: None,
            divisions: Divisions { x: ex, y: ey, z: ez },
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct HexMesh {
    pub divisions: Divisions,
    pub node_coords: Vec<[f64; 3]>,
    pub elements: Vec<[usize; 8]>,
    /// Nodes on `x = x_min`, ascending.
    pub dirichlet_nodes: Vec<usize>,
    /// Nodes on `z = z_min` with `x > x_min`, ordered by `(y, x)`.
    pub contact_nodes: Vec<usize>,
    /// Quadrilaterals on `x = x_max`, outward normal `+x`.
    pub traction_faces_right: Vec<[usize; 4]>,
    /// Quadrilaterals on `z = z_max`, outward normal `+z`.
    pub traction_faces_top: Vec<[usize; 4]>,
}

impl HexMesh {
    pub fn node_count(&self) -> usize {
        self.node_coords.len()
    }

    pub fn element_count(&self) -> usize {
        self.elements.len()
    }

    pub fn contact_count(&self) -> usize {
        self.contact_nodes.len()
    }

    pub fn node_index(&self, i: usize, j: usize, k: usize) -> usize {
        node_index(&self.divisions, i, j, k)
    }

    pub fn element_corners(&self, element: usize) -> [[f64; 3]; 8] {
        self.elements[element].map(|n| self.node_coords[n])
    }
}

fn node_index(d: &Divisions, i: usize, j: usize, k: usize) -> usize {
    (k * (d.y + 1) + j) * (d.x + 1) + i
}

pub fn build_mesh(domain: &DomainSpec, spec: &MeshLevelSpec) -> Result<HexMesh> {
    domain.validate()?;
    let d = spec.divisions;
    if d.x == 0 || d.y == 0 || d.z == 0 {
        return Err(Error::Mesh(format!(
            "divisions ({}, {}, {}) must all be positive",
            d.x, d.y, d.z
        )));
    }

    let xs: Vec<f64> = (0..=d.x).map(|i| domain.x_range.grid_point(i, d.x)).collect();
    let ys: Vec<f64> = (0..=d.y).map(|j| domain.y_range.grid_point(j, d.y)).collect();
    let zs: Vec<f64> = (0..=d.z).map(|k| domain.z_range.grid_point(k, d.z)).collect();

    let mut node_coords = Vec::with_capacity(d.node_count());
    for &z in &zs {
        for &y in &ys {
            for &x in &xs {
                node_coords.push([x, y, z]);
            }
        }
    }

    let idx = |i, j, k| node_index(&d, i, j, k);
    let mut elements = Vec::with_capacity(d.element_count());
    for k in 0..d.z {
        for j in 0..d.y {
            for i in 0..d.x {
                elements.push([
                    idx(i, j, k),
                    idx(i + 1, j, k),
                    idx(i + 1, j + 1, k),
                    idx(i, j + 1, k),
                    idx(i, j, k + 1),
                    idx(i + 1, j, k + 1),
                    idx(i + 1, j + 1, k + 1),
                    idx(i, j + 1, k + 1),
                ]);
            }
        }
    }

    let mut dirichlet_nodes = Vec::with_capacity((d.y + 1) * (d.z + 1));
    for k in 0..=d.z {
        for j in 0..=d.y {
            dirichlet_nodes.push(idx(0, j, k));
        }
    }

    let mut contact_nodes = Vec::with_capacity(d.contact_node_count());
    for j in 0..=d.y {
        for i in 1..=d.x {
            contact_nodes.push(idx(i, j, 0));
        }
    }

    let mut traction_faces_right = Vec::with_capacity(d.y * d.z);
    for k in 0..d.z {
        for j in 0..d.y {
            traction_faces_right.push([
                idx(d.x, j, k),
                idx(d.x, j + 1, k),
                idx(d.x, j + 1, k + 1),
                idx(d.x, j, k + 1),
            ]);
        }
    }

    let mut traction_faces_top = Vec::with_capacity(d.x * d.y);
    for j in 0..d.y {
        for i in 0..d.x {
            traction_faces_top.push([
                idx(i, j, d.z),
                idx(i + 1, j, d.z),
                idx(i + 1, j + 1, d.z),
                idx(i, j + 1, d.z),
            ]);
        }
    }

    Ok(HexMesh {
        divisions: d,
        node_coords,
        elements,
        dirichlet_nodes,
        contact_nodes,
        traction_faces_right,
        traction_faces_top,
    })
}

/// Initial normal distance of every contact node to the foundation plane.
pub fn gap_vector(mesh: &HexMesh, domain: &DomainSpec) -> Result<Vec<f64>> {
    if mesh.contact_nodes.is_empty() {
        return Err(Error::Mesh("mesh has no contact nodes".into()));
    }
    mesh.contact_nodes
        .iter()
        .map(|&n| {
            let gap = mesh.node_coords[n][2] - domain.foundation_z;
            if gap < 0.0 {
                Err(Error::NegativeGap { node: n, gap })
            } else {
                Ok(gap)
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn level_mesh(level: u32) -> HexMesh {
        build_mesh(&DomainSpec::benchmark(), &MeshLevelSpec::from_level(level).unwrap()).unwrap()
    }

    #[test]
    fn divisions_match_ceiling_formula() {
        let d = |l| {
            let d = divisions(l).unwrap();
            (d.x, d.y, d.z)
        };
        assert_eq!(d(1), (6, 3, 3));
        assert_eq!(d(2), (8, 4, 4));
        assert_eq!(d(3), (12, 6, 6));
        assert_eq!(d(4), (16, 8, 8));
        assert_eq!(d(5), (23, 12, 12));
        assert_eq!(d(8), (64, 32, 32));
    }

    #[test]
    fn node_counts_match_table() {
        let table = [
            (2, 225, 40),
            (3, 637, 84),
            (4, 1377, 144),
            (5, 4056, 299),
            (6, 9537, 544),
            (7, 27072, 1104),
            (8, 70785, 2112),
        ];
        for (level, n, p) in table {
            let d = divisions(level).unwrap();
            assert_eq!(d.node_count(), n, "level {level}");
            assert_eq!(d.contact_node_count(), p, "level {level}");
        }
    }

    #[test]
    fn level_zero_rejected() {
        assert!(divisions(0).is_err());
        assert!(MeshLevelSpec::from_level(0).is_err());
        assert!(MeshLevelSpec::from_divisions(0, 1, 1).is_err());
    }

    #[test]
    fn level_two_mesh_counts() {
        let m = level_mesh(2);
        assert_eq!(m.node_count(), 225);
        assert_eq!(m.element_count(), 128);
        assert_eq!(m.contact_count(), 40);
        assert_eq!(m.dirichlet_nodes.len(), 25);
        assert_eq!(level_mesh(3).node_count(), 637);
        assert_eq!(level_mesh(3).contact_count(), 84);
    }

    #[test]
    fn coordinates_stay_in_domain() {
        for level in 1..=4 {
            let m = level_mesh(level);
            for c in &m.node_coords {
                assert!((0.0..=2.0).contains(&c[0]));
                assert!((0.0..=1.0).contains(&c[1]));
                assert!((0.1..=1.0).contains(&c[2]));
            }
        }
    }

    #[test]
    fn boundary_sets_are_classified() {
        let m = level_mesh(2);
        for &n in &m.dirichlet_nodes {
            assert_eq!(m.node_coords[n][0], 0.0);
        }
        for &n in &m.contact_nodes {
            assert_eq!(m.node_coords[n][2], 0.1);
            assert!(!m.dirichlet_nodes.contains(&n));
        }
        for q in &m.traction_faces_right {
            assert!(q.iter().all(|&n| m.node_coords[n][0] == 2.0));
        }
        for q in &m.traction_faces_top {
            assert!(q.iter().all(|&n| m.node_coords[n][2] == 1.0));
        }
        assert_eq!(m.traction_faces_right.len(), 16);
        assert_eq!(m.traction_faces_top.len(), 32);
    }

    #[test]
    fn contact_nodes_ordered_by_y_then_x() {
        let m = level_mesh(2);
        for w in m.contact_nodes.windows(2) {
            let (a, b) = (m.node_coords[w[0]], m.node_coords[w[1]]);
            assert!((a[1], a[0]) < (b[1], b[0]));
        }
    }

    #[test]
    fn element_corners_follow_vtk_order() {
        let m = level_mesh(2);
        let c = m.element_corners(0);
        let (hx, hy, hz) = (0.25, 0.25, 0.225);
        let expected = [
            [0.0, 0.0, 0.1],
            [hx, 0.0, 0.1],
            [hx, hy, 0.1],
            [0.0, hy, 0.1],
            [0.0, 0.0, 0.1 + hz],
            [hx, 0.0, 0.1 + hz],
            [hx, hy, 0.1 + hz],
            [0.0, hy, 0.1 + hz],
        ];
        for (a, b) in c.iter().zip(expected) {
            for d in 0..3 {
                assert!((a[d] - b[d]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn gap_vector_cases() {
        let mut domain = DomainSpec::benchmark();
        let m = level_mesh(2);
        let g = gap_vector(&m, &domain).unwrap();
        assert_eq!(g.len(), 40);
        assert!(g.iter().all(|&v| (v - 0.1).abs() < 1e-15));

        domain.foundation_z = 0.1;
        assert!(gap_vector(&m, &domain).unwrap().iter().all(|&v| v == 0.0));

        domain.foundation_z = 0.05;
        assert!(gap_vector(&m, &domain)
            .unwrap()
            .iter()
            .all(|&v| (v - 0.05).abs() < 1e-15));

        domain.foundation_z = 0.2;
        assert!(gap_vector(&m, &domain).is_err());
    }

    #[test]
    fn invalid_domain_rejected() {
        let mut d = DomainSpec::benchmark();
        d.foundation_z = 0.5;
        assert!(d.validate().is_err());
        let mut d = DomainSpec::benchmark();
        d.y_range = Interval::new(1.0, 1.0);
        assert!(d.validate().is_err());
    }
}

//! Trilinear hexahedral finite elements for small-strain isotropic elasticity.
//!
//! Strains use the Voigt layout `[εxx, εyy, εzz, γyz, γxz, γxy]` with
//! engineering shear. Volume integrals use 2×2×2 Gauss points, face
//! integrals 2×2.

use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::linalg::{csc_from_columns, SparseMatrix};
use crate::mesh::HexMesh;

pub type ElementStiffness = [[f64; 24]; 24];

const GAUSS_2: [f64; 2] = [-0.577_350_269_189_625_8, 0.577_350_269_189_625_8];

// Reference coordinates of the VTK-ordered corners.
const CORNER_XI: [[f64; 3]; 8] = [
    [-1.0, -1.0, -1.0],
    [1.0, -1.0, -1.0],
    [1.0, 1.0, -1.0],
    [-1.0, 1.0, -1.0],
    [-1.0, -1.0, 1.0],
    [1.0, -1.0, 1.0],
    [1.0, 1.0, 1.0],
    [-1.0, 1.0, 1.0],
];

const FACE_ST: [[f64; 2]; 4] = [[-1.0, -1.0], [1.0, -1.0], [1.0, 1.0], [-1.0, 1.0]];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ElasticParams {
    pub youngs_modulus: f64,
    pub poisson_ratio: f64,
}

impl ElasticParams {
    pub fn new(youngs_modulus: f64, poisson_ratio: f64) -> Result<Self> {
        let p = Self {
            youngs_modulus,
            poisson_ratio,
        };
        p.validate()?;
        Ok(p)
    }

    /// `E = 2.1e9`, `ν = 0.277`.
    pub const fn benchmark() -> Self {
        Self {
            youngs_modulus: 2.1e9,
            poisson_ratio: 0.277,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.youngs_modulus.is_finite() && self.youngs_modulus > 0.0) {
            return Err(Error::Material(format!(
                "Young's modulus must be positive, got {}",
                self.youngs_modulus
            )));
        }
        if !(self.poisson_ratio > -1.0 && self.poisson_ratio < 0.5) {
            return Err(Error::Material(format!(
                "Poisson ratio must lie in (-1, 0.5), got {}",
                self.poisson_ratio
            )));
        }
        Ok(())
    }

    /// Lamé coefficients `(λ, μ)`.
    pub fn lame(&self) -> (f64, f64) {
        let (e, nu) = (self.youngs_modulus, self.poisson_ratio);
        let lambda = e * nu / ((1.0 + nu) * (1.0 - 2.0 * nu));
        let mu = e / (2.0 * (1.0 + nu));
        (lambda, mu)
    }

    fn voigt_matrix(&self) -> [[f64; 6]; 6] {
        let (lambda, mu) = self.lame();
        let mut d = [[0.0; 6]; 6];
        for i in 0..3 {
            for j in 0..3 {
                d[i][j] = lambda;
            }
            d[i][i] = lambda + 2.0 * mu;
            d[i + 3][i + 3] = mu;
        }
        d
    }
}

impl Default for ElasticParams {
    fn default() -> Self {
        Self::benchmark()
    }
}

/// Constant surface tractions on the right (`x = x_max`) and top
/// (`z = z_max`) faces.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TractionSpec {
    pub right: [f64; 3],
    pub top: [f64; 3],
}

impl TractionSpec {
    pub const fn benchmark() -> Self {
        Self {
            right: [-5e8, 0.0, 0.0],
            top: [0.0, 0.0, -1e8],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.right.iter().chain(&self.top).all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::Material("traction entries must be finite".into()))
        }
    }
}

impl Default for TractionSpec {
    fn default() -> Self {
        Self::benchmark()
    }
}

fn shape_derivatives(xi: [f64; 3]) -> [[f64; 3]; 8] {
    let mut dn = [[0.0; 3]; 8];
    for (a, c) in CORNER_XI.iter().enumerate() {
        let fx = 1.0 + c[0] * xi[0];
        let fy = 1.0 + c[1] * xi[1];
        let fz = 1.0 + c[2] * xi[2];
        dn[a] = [
            0.125 * c[0] * fy * fz,
            0.125 * fx * c[1] * fz,
            0.125 * fx * fy * c[2],
        ];
    }
    dn
}

fn det3(m: &[[f64; 3]; 3]) -> f64 {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

fn inv3(m: &[[f64; 3]; 3], det: f64) -> [[f64; 3]; 3] {
    let r = 1.0 / det;
    [
        [
            (m[1][1] * m[2][2] - m[1][2] * m[2][1]) * r,
            (m[0][2] * m[2][1] - m[0][1] * m[2][2]) * r,
            (m[0][1] * m[1][2] - m[0][2] * m[1][1]) * r,
        ],
        [
            (m[1][2] * m[2][0] - m[1][0] * m[2][2]) * r,
            (m[0][0] * m[2][2] - m[0][2] * m[2][0]) * r,
            (m[0][2] * m[1][0] - m[0][0] * m[1][2]) * r,
        ],
        [
            (m[1][0] * m[2][1] - m[1][1] * m[2][0]) * r,
            (m[0][1] * m[2][0] - m[0][0] * m[2][1]) * r,
            (m[0][0] * m[1][1] - m[0][1] * m[1][0]) * r,
        ],
    ]
}

fn element_stiffness_indexed(
    element: usize,
    corners: &[[f64; 3]; 8],
    params: &ElasticParams,
) -> Result<ElementStiffness> {
    let d = params.voigt_matrix();
    let mut ke = [[0.0; 24]; 24];
    let mut point = 0;
    for &gz in &GAUSS_2 {
        for &gy in &GAUSS_2 {
            for &gx in &GAUSS_2 {
                let dn = shape_derivatives([gx, gy, gz]);
                // J[i][j] = ∂x_i/∂ξ_j
                let mut jac = [[0.0; 3]; 3];
                for (x, g) in corners.iter().zip(&dn) {
                    for i in 0..3 {
                        for j in 0..3 {
                            jac[i][j] += x[i] * g[j];
                        }
                    }
                }
                let det_j = det3(&jac);
                if !(det_j > 0.0) {
                    return Err(Error::DegenerateElement {
                        element,
                        point,
                        det_j,
                    });
                }
                let jinv = inv3(&jac, det_j);
                let mut grad = [[0.0; 3]; 8];
                for a in 0..8 {
                    for i in 0..3 {
                        grad[a][i] = (0..3).map(|j| jinv[j][i] * dn[a][j]).sum();
                    }
                }

                let mut b = [[0.0; 24]; 6];
                for (a, g) in grad.iter().enumerate() {
                    let c = 3 * a;
                    b[0][c] = g[0];
                    b[1][c + 1] = g[1];
                    b[2][c + 2] = g[2];
                    b[3][c + 1] = g[2];
                    b[3][c + 2] = g[1];
                    b[4][c] = g[2];
                    b[4][c + 2] = g[0];
                    b[5][c] = g[1];
                    b[5][c + 1] = g[0];
                }
                let mut db = [[0.0; 24]; 6];
                for r in 0..6 {
                    for c in 0..24 {
                        db[r][c] = (0..6).map(|k| d[r][k] * b[k][c]).sum();
                    }
                }
                for r in 0..24 {
                    for c in r..24 {
                        let v: f64 = (0..6).map(|k| b[k][r] * db[k][c]).sum();
                        ke[r][c] += v * det_j;
                    }
                }
                point += 1;
            }
        }
    }
    for r in 0..24 {
        for c in 0..r {
            ke[r][c] = ke[c][r];
        }
    }
    Ok(ke)
}

/// Stiffness of one hexahedron; DOFs are ordered `(corner, component)`.
pub fn element_stiffness(
    corners: &[[f64; 3]; 8],
    params: &ElasticParams,
) -> Result<ElementStiffness> {
    element_stiffness_indexed(0, corners, params)
}

/// Per-node sorted neighbour lists (including the node itself).
fn node_adjacency(mesh: &HexMesh) -> Vec<Vec<usize>> {
    let mut sets = vec![BTreeSet::new(); mesh.node_count()];
    for el in &mesh.elements {
        for &a in el {
            sets[a].extend(el.iter().copied());
        }
    }
    sets.into_iter().map(|s| s.into_iter().collect()).collect()
}

/// Global `3n × 3n` stiffness; DOF `3·node + component`. Both triangles are
/// stored. Elements are scattered in index order.
pub fn assemble_stiffness(mesh: &HexMesh, params: &ElasticParams) -> Result<SparseMatrix> {
    params.validate()?;
    let adjacency = node_adjacency(mesh);
    let n_dof = 3 * mesh.node_count();

    // Column (3a + i) stores rows 3m + j for each neighbour m of a.
    let mut columns: Vec<Vec<(usize, f64)>> = Vec::with_capacity(n_dof);
    for neighbours in &adjacency {
        for _ in 0..3 {
            let mut col = Vec::with_capacity(3 * neighbours.len());
            for &m in neighbours {
                for j in 0..3 {
                    col.push((3 * m + j, 0.0));
                }
            }
            columns.push(col);
        }
    }

    for (e, el) in mesh.elements.iter().enumerate() {
        let ke = element_stiffness_indexed(e, &mesh.element_corners(e), params)?;
        for (b, &nb) in el.iter().enumerate() {
            for (a, &na) in el.iter().enumerate() {
                let pos = adjacency[nb]
                    .binary_search(&na)
                    .expect("element nodes are mutual neighbours");
                for j in 0..3 {
                    let col = &mut columns[3 * nb + j];
                    for i in 0..3 {
                        col[3 * pos + i].1 += ke[3 * a + i][3 * b + j];
                    }
                }
            }
        }
    }
    Ok(csc_from_columns(n_dof, columns))
}

fn face_load(coords: &[[f64; 3]; 4], traction: &[f64; 3], out: &mut [[f64; 3]; 4]) {
    for &t in &GAUSS_2 {
        for &s in &GAUSS_2 {
            let mut n = [0.0; 4];
            let mut dxs = [0.0; 3];
            let mut dxt = [0.0; 3];
            for (a, c) in FACE_ST.iter().enumerate() {
                n[a] = 0.25 * (1.0 + c[0] * s) * (1.0 + c[1] * t);
                let dns = 0.25 * c[0] * (1.0 + c[1] * t);
                let dnt = 0.25 * (1.0 + c[0] * s) * c[1];
                for i in 0..3 {
                    dxs[i] += coords[a][i] * dns;
                    dxt[i] += coords[a][i] * dnt;
                }
            }
            let cross = [
                dxs[1] * dxt[2] - dxs[2] * dxt[1],
                dxs[2] * dxt[0] - dxs[0] * dxt[2],
                dxs[0] * dxt[1] - dxs[1] * dxt[0],
            ];
            let da = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
            for a in 0..4 {
                for i in 0..3 {
                    out[a][i] += traction[i] * n[a] * da;
                }
            }
        }
    }
}

fn add_face_set(mesh: &HexMesh, faces: &[[usize; 4]], traction: &[f64; 3], load: &mut [f64]) {
    if traction.iter().all(|&t| t == 0.0) {
        return;
    }
    for q in faces {
        let coords = q.map(|n| mesh.node_coords[n]);
        let mut local = [[0.0; 3]; 4];
        face_load(&coords, traction, &mut local);
        for (a, &node) in q.iter().enumerate() {
            for i in 0..3 {
                load[3 * node + i] += local[a][i];
            }
        }
    }
}

/// Consistent nodal forces of the surface tractions, length `3n`.
pub fn assemble_surface_load(mesh: &HexMesh, tractions: &TractionSpec) -> Vec<f64> {
    let mut load = vec![0.0; 3 * mesh.node_count()];
    add_face_set(mesh, &mesh.traction_faces_right, &tractions.right, &mut load);
    add_face_set(mesh, &mesh.traction_faces_top, &tractions.top, &mut load);
    load
}

/// Stiffness and load restricted to the free (non-Dirichlet) DOFs.
#[derive(Debug, Clone)]
pub struct GlobalSystem {
    pub stiffness: SparseMatrix,
    pub load: Vec<f64>,
    /// Global DOF `3·node + component` → free DOF index, `None` when fixed.
    pub dof_map: Vec<Option<usize>>,
}

impl GlobalSystem {
    /// Wraps an already-condensed system; every DOF is free.
    pub fn from_parts(stiffness: SparseMatrix, load: Vec<f64>) -> Result<Self> {
        let n = stiffness.nrows();
        if stiffness.ncols() != n || load.len() != n {
            return Err(Error::Dimension(format!(
                "stiffness {}x{} with load of length {}",
                stiffness.nrows(),
                stiffness.ncols(),
                load.len()
            )));
        }
        Ok(Self {
            stiffness,
            load,
            dof_map: (0..n).map(Some).collect(),
        })
    }

    pub fn free_dof_count(&self) -> usize {
        self.load.len()
    }

    /// Free-DOF indices of the contact nodes, three per node in mesh order.
    pub fn contact_dofs(&self, mesh: &HexMesh) -> Result<Vec<usize>> {
        let mut out = Vec::with_capacity(3 * mesh.contact_count());
        for &n in &mesh.contact_nodes {
            for c in 0..3 {
                out.push(self.dof_map[3 * n + c].ok_or_else(|| {
                    Error::Partition(format!("contact node {n} has a fixed DOF"))
                })?);
            }
        }
        Ok(out)
    }

    /// Scatters free-DOF values back to a full `3n` vector with zeros at
    /// fixed DOFs.
    pub fn expand_to_full(&self, free: &[f64]) -> Vec<f64> {
        self.dof_map
            .iter()
            .map(|d| d.map_or(0.0, |i| free[i]))
            .collect()
    }
}

/// Removes the rows and columns of all DOFs on the Dirichlet nodes.
pub fn apply_dirichlet(k: &SparseMatrix, l: &[f64], mesh: &HexMesh) -> Result<GlobalSystem> {
    let n_dof = 3 * mesh.node_count();
    if k.nrows() != n_dof || k.ncols() != n_dof || l.len() != n_dof {
        return Err(Error::Dimension(format!(
            "expected {n_dof} DOFs, got stiffness {}x{} and load {}",
            k.nrows(),
            k.ncols(),
            l.len()
        )));
    }
    let mut fixed = vec![false; n_dof];
    for &n in &mesh.dirichlet_nodes {
        for c in 0..3 {
            fixed[3 * n + c] = true;
        }
    }
    let mut dof_map = vec![None; n_dof];
    let mut next = 0;
    for (g, &is_fixed) in fixed.iter().enumerate() {
        if !is_fixed {
            dof_map[g] = Some(next);
            next += 1;
        }
    }
    if next == 0 {
        return Err(Error::NoFreeDofs);
    }

    let kr = k.as_ref();
    let mut columns = Vec::with_capacity(next);
    for j in 0..n_dof {
        if fixed[j] {
            continue;
        }
        let col: Vec<(usize, f64)> = kr
            .row_idx_of_col_raw(j)
            .iter()
            .zip(kr.val_of_col(j))
            .filter_map(|(&i, &v)| dof_map[i].map(|fi| (fi, v)))
            .collect();
        columns.push(col);
    }
    let load = l
        .iter()
        .zip(&fixed)
        .filter(|(_, &f)| !f)
        .map(|(&v, _)| v)
        .collect();
    Ok(GlobalSystem {
        stiffness: csc_from_columns(next, columns),
        load,
        dof_map,
    })
}

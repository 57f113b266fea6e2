//! Legacy-VTK displacement fields and CSV iteration logs.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::mesh::HexMesh;
use crate::ssn::SolveReport;

/// VTK cell type of the 8-node hexahedron.
const VTK_HEXAHEDRON: u8 = 12;

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> Error + '_ {
    move |source| Error::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(path))?;
    }
    Ok(BufWriter::new(File::create(path).map_err(io_err(path))?))
}

/// Writes an ASCII `UNSTRUCTURED_GRID` with a `displacement` point vector.
pub fn write_vtk<W: Write>(mesh: &HexMesh, displacement: &[f64], mut w: W) -> io::Result<()> {
    let n = mesh.node_count();
    let m = mesh.element_count();
    if displacement.len() != 3 * n {
        return Err(io::Error::new(
            io::ErrorKind::InvalidInput,
            format!("displacement has {} entries, mesh has {} DOFs", displacement.len(), 3 * n),
        ));
    }
    writeln!(w, "# vtk DataFile Version 3.0")?;
    writeln!(w, "tresca-ssn displacement")?;
    writeln!(w, "ASCII")?;
    writeln!(w, "DATASET UNSTRUCTURED_GRID")?;
    writeln!(w, "POINTS {n} double")?;
    for [x, y, z] in &mesh.node_coords {
        writeln!(w, "{x:e} {y:e} {z:e}")?;
    }
    writeln!(w, "CELLS {m} {}", 9 * m)?;
    for e in &mesh.elements {
        write!(w, "8")?;
        for v in e {
            write!(w, " {v}")?;
        }
        writeln!(w)?;
    }
    writeln!(w, "CELL_TYPES {m}")?;
    for _ in 0..m {
        writeln!(w, "{VTK_HEXAHEDRON}")?;
    }
    writeln!(w, "POINT_DATA {n}")?;
    writeln!(w, "VECTORS displacement double")?;
    for u in displacement.chunks_exact(3) {
        writeln!(w, "{:e} {:e} {:e}", u[0], u[1], u[2])?;
    }
    w.flush()
}

pub fn export_vtk(mesh: &HexMesh, displacement: &[f64], path: &Path) -> Result<()> {
    let w = create(path)?;
    write_vtk(mesh, displacement, w).map_err(io_err(path))
}

pub const LOG_HEADER: &str = "iter,norm_v,stick_count,contact_count,time_ms";

pub fn write_iteration_log<W: Write>(report: &SolveReport, mut w: W) -> io::Result<()> {
    writeln!(w, "{LOG_HEADER}")?;
    for r in &report.records {
        writeln!(
            w,
            "{},{:e},{},{},{:.6}",
            r.iter, r.norm_v, r.branches.stick, r.branches.contact, r.time_ms
        )?;
    }
    w.flush()
}

pub fn export_iteration_log(report: &SolveReport, path: &Path) -> Result<()> {
    let w = create(path)?;
    write_iteration_log(report, w).map_err(io_err(path))
}

// Condenses the level-2 system onto the contact face and checks that the
// reduced energy matches the full one for an arbitrary contact state.

use tresca_ssn::fem::{apply_dirichlet, assemble_stiffness, assemble_surface_load, ElasticParams, TractionSpec};
use tresca_ssn::linalg::{dot, sparse_matvec};
use tresca_ssn::mesh::{build_mesh, DomainSpec, MeshLevelSpec};
use tresca_ssn::reduction::schur_reduce;

fn main() -> tresca_ssn::Result<()> {
    let mesh = build_mesh(&DomainSpec::benchmark(), &MeshLevelSpec::from_level(2)?)?;
    let k = assemble_stiffness(&mesh, &ElasticParams::benchmark())?;
    let l = assemble_surface_load(&mesh, &TractionSpec::benchmark());
    let sys = apply_dirichlet(&k, &l, &mesh)?;
    let contact = sys.contact_dofs(&mesh)?;
    let cbs = schur_reduce(&sys, &contact)?;
    println!(
        "{} free DOFs: {} interior, {} on the contact face",
        sys.free_dof_count(),
        cbs.interior_dofs.len(),
        cbs.contact_dof_count()
    );

    let u_c: Vec<f64> = (0..contact.len()).map(|i| 1e-3 * ((i as f64) * 0.7).sin()).collect();
    let u = cbs.free_solution(&u_c)?;
    let ku = sparse_matvec(&sys.stiffness, &u);
    let full = 0.5 * dot(&u, &ku) - dot(&sys.load, &u);

    let au: Vec<f64> = (0..u_c.len()).map(|i| (0..u_c.len()).map(|j| cbs.a_tilde[(i, j)] * u_c[j]).sum()).collect();
    let reduced = 0.5 * dot(&u_c, &au) - dot(&cbs.b_tilde, &u_c) + cbs.energy_offset();
    println!("full energy    = {full:.12e}");
    println!("reduced energy = {reduced:.12e}");
    println!("relative gap   = {:.2e}", (full - reduced).abs() / full.abs());
    Ok(())
}

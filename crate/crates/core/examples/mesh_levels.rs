// Mesh sizes of the refinement levels and the layout of a small mesh.

use tresca_ssn::mesh::{build_mesh, divisions, DomainSpec, MeshLevelSpec};

fn main() -> tresca_ssn::Result<()> {
    println!("{:>5} {:>4} {:>4} {:>4} {:>8} {:>6}", "level", "ex", "ey", "ez", "n", "p");
    for level in 1..=8 {
        let d = divisions(level)?;
        println!(
            "{level:>5} {:>4} {:>4} {:>4} {:>8} {:>6}",
            d.x,
            d.y,
            d.z,
            d.node_count(),
            d.contact_node_count()
        );
    }

    let mesh = build_mesh(&DomainSpec::benchmark(), &MeshLevelSpec::from_level(2)?)?;
    println!();
    println!("level 2: {} nodes, {} hexahedra", mesh.node_count(), mesh.element_count());
    println!("  Dirichlet nodes (x = 0): {}", mesh.dirichlet_nodes.len());
    println!("  contact nodes (z = 0.1): {}", mesh.contact_count());
    println!("  loaded faces: {} right, {} top", mesh.traction_faces_right.len(), mesh.traction_faces_top.len());
    println!("  first element corners: {:?}", mesh.elements[0]);
    Ok(())
}

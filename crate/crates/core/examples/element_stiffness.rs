// The 24×24 trilinear brick stiffness: symmetry, rigid-body kernel and
// the eigenvalue count of a unit cube.

use tresca_ssn::fem::{element_stiffness, ElasticParams};

fn main() -> tresca_ssn::Result<()> {
    let mut corners = [[0.0; 3]; 8];
    for (c, p) in corners.iter_mut().enumerate() {
        let (i, j, k) = ([0, 1, 1, 0, 0, 1, 1, 0][c], [0, 0, 1, 1, 0, 0, 1, 1][c], c / 4);
        *p = [i as f64, j as f64, k as f64];
    }
    let params = ElasticParams::new(1.0, 0.25)?;
    let ke = element_stiffness(&corners, &params)?;

    let asym = (0..24)
        .flat_map(|i| (0..24).map(move |j| (i, j)))
        .map(|(i, j)| (ke[i][j] - ke[j][i]).abs())
        .fold(0.0, f64::max);
    println!("max |K - K^T| = {asym:.2e}");

    let translation = |d: usize| -> [f64; 24] {
        let mut u = [0.0; 24];
        for a in 0..8 {
            u[3 * a + d] = 1.0;
        }
        u
    };
    let rotation_z: [f64; 24] = {
        let mut u = [0.0; 24];
        for (a, p) in corners.iter().enumerate() {
            u[3 * a] = -p[1];
            u[3 * a + 1] = p[0];
        }
        u
    };
    for (name, u) in [
        ("translation x", translation(0)),
        ("translation y", translation(1)),
        ("translation z", translation(2)),
        ("rotation about z", rotation_z),
    ] {
        let r = (0..24)
            .map(|i| (0..24).map(|j| ke[i][j] * u[j]).sum::<f64>().abs())
            .fold(0.0, f64::max);
        println!("|K u| for {name:<17} = {r:.2e}");
    }
    println!("diagonal K[0][0] = {:.6}", ke[0][0]);
    Ok(())
}

// One contact node with identity stiffness: the closed-form friction
// proximal map and a full solve.

use faer::Mat;
use tresca_ssn::reduction::expand_blocks;
use tresca_ssn::ssn::{prox_tangential, solve, SolverOptions};

fn main() -> tresca_ssn::Result<()> {
    // argmin ½|z − (w − g)|² + φ|z|
    for (w, g) in [([0.0, 0.0], [-3.0, -4.0]), ([0.3, 0.0], [0.1, 0.0])] {
        let z = prox_tangential(w, g, 1.0);
        println!("prox w={w:?} g={g:?} -> {z:?}");
    }

    let a = Mat::<f64>::identity(3, 3);
    let sys = expand_blocks(a.as_ref(), &[3.0, 4.0, -1.0], &[0.0], &[1.0])?;
    let report = solve(&sys, &[0.0; 4], &SolverOptions::default())?;
    println!(
        "solve: {} in {} Newton steps, x = {:?}",
        report.status.label(),
        report.iterations,
        report.x
    );
    Ok(())
}

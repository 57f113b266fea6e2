// Writes the deformed level-2 solution as legacy VTK plus the iteration
// log as CSV.
//
// ```text
// cargo run --example export_fields -- out/
// ```

use std::path::PathBuf;

use tresca_ssn::config::RunConfig;
use tresca_ssn::runner::run;

fn main() -> tresca_ssn::Result<()> {
    let dir = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| "out".into()));
    let cfg = RunConfig {
        export_vtk: Some(dir.join("displacement.vtk")),
        log_csv: Some(dir.join("iterations.csv")),
        ..RunConfig::default()
    };
    let out = run(&cfg)?;
    let max_u = out
        .displacement
        .chunks_exact(3)
        .map(|u| u[0].hypot(u[1]).hypot(u[2]))
        .fold(0.0, f64::max);
    println!("{} after {} iterations; max |u| = {max_u:.4}", out.row.status, out.row.iterations);
    println!("wrote {}", cfg.export_vtk.unwrap().display());
    println!("wrote {}", cfg.log_csv.unwrap().display());
    Ok(())
}

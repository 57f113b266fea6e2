// Compares the Newton solution with an independent proximal-gradient
// solve of the condensed energy minimization.
//
// ```text
// cargo run --example oracle_crosscheck -- 3
// ```

use tresca_ssn::config::RunConfig;
use tresca_ssn::runner::run;

fn main() -> tresca_ssn::Result<()> {
    let level = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let cfg = RunConfig {
        level,
        oracle_check: true,
        ..RunConfig::default()
    };
    let out = run(&cfg)?;
    let cmp = out.oracle.expect("oracle requested");
    println!("level {level}: p = {}", out.row.p);
    println!("newton:  {} after {} iterations", out.row.status, out.row.iterations);
    println!("oracle:  {} iterations", cmp.oracle_iterations);
    println!("|du|/|u|         = {:.3e}", cmp.displacement_rel);
    println!("|dlambda|/|lambda| = {:.3e}", cmp.multiplier_rel);
    Ok(())
}

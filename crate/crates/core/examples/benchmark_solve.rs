// The prism benchmark at one level, with the per-iteration history.
//
// ```text
// cargo run --release --example benchmark_solve -- 4
// ```

use tresca_ssn::config::RunConfig;
use tresca_ssn::runner::{format_table, run};

fn main() -> tresca_ssn::Result<()> {
    let level = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(2);
    let out = run(&RunConfig {
        level,
        ..RunConfig::default()
    })?;
    print!("{}", format_table(&[out.row.clone()]));
    println!();
    println!("{:>4} {:>12} {:>6} {:>6} {:>8} {:>11}", "k", "|v|", "stick", "slide", "contact", "no_contact");
    for r in &out.report.records {
        let b = r.branches;
        println!(
            "{:>4} {:>12.3e} {:>6} {:>6} {:>8} {:>11}",
            r.iter, r.norm_v, b.stick, b.slide, b.contact, b.no_contact
        );
    }
    let res = out.residuals;
    println!();
    println!("optimality residuals (tol {:.1e}):", res.tol);
    println!("  friction bound   {:.2e}", res.friction_bound);
    println!("  slip alignment   {:.2e}", res.slip_alignment);
    println!("  equilibrium      {:.2e}", res.normal_equilibrium);
    println!("  feasibility      {:.2e}", res.feasibility);
    println!("  complementarity  {:.2e}", res.complementarity);
    Ok(())
}

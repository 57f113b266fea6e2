// Iteration counts across refinement levels.
//
// ```text
// cargo run --release --example level_sweep -- 1 6
// ```

use tresca_ssn::config::RunConfig;
use tresca_ssn::runner::{format_table, run_sweep};

fn main() -> tresca_ssn::Result<()> {
    let mut args = std::env::args().skip(1).filter_map(|s| s.parse::<u32>().ok());
    let first = args.next().unwrap_or(1);
    let last = args.next().unwrap_or(4);
    let levels: Vec<u32> = (first..=last).collect();
    let rows = run_sweep(&RunConfig::default(), &levels)?;
    print!("{}", format_table(&rows));
    Ok(())
}

use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use tresca_ssn::config::{parse_sweep, RunConfig};
use tresca_ssn::runner::{exit_code, format_table, run, run_sweep};
use tresca_ssn::Error;

/// Semismooth* Newton solver for 3D elastic contact with Tresca friction.
#[derive(Parser, Debug)]
#[command(version)]
struct Cli {
    /// `key = value` configuration file; flags override its entries.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    level: Option<u32>,
    #[arg(long, allow_negative_numbers = true)]
    eps: Option<f64>,
    #[arg(long)]
    max_iter: Option<usize>,
    /// Tresca slip bound.
    #[arg(long, allow_negative_numbers = true)]
    phi: Option<f64>,
    /// Write the displacement field as legacy VTK.
    #[arg(long)]
    export_vtk: Option<PathBuf>,
    /// Write the iteration history as CSV.
    #[arg(long)]
    log_csv: Option<PathBuf>,
    /// Cross-check against the proximal-gradient reference solver.
    #[arg(long)]
    oracle_check: bool,
    /// Run levels A..B (inclusive) and print a table.
    #[arg(long, value_name = "A..B")]
    sweep: Option<String>,
    /// Factorize the unreduced 8p×8p Newton matrix.
    #[arg(long)]
    full_newton_debug: bool,
    /// Print the effective configuration and exit.
    #[arg(long)]
    print_config: bool,
}

fn load_config(cli: &Cli) -> tresca_ssn::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(level) = cli.level {
        cfg.level = level;
        cfg.divisions = None;
    }
    if let Some(v) = cli.eps {
        cfg.eps = v;
    }
    if let Some(v) = cli.max_iter {
        cfg.max_iter = v;
    }
    if let Some(v) = cli.phi {
        cfg.phi = v;
    }
    if let Some(p) = &cli.export_vtk {
        cfg.export_vtk = Some(p.clone());
    }
    if let Some(p) = &cli.log_csv {
        cfg.log_csv = Some(p.clone());
    }
    cfg.oracle_check |= cli.oracle_check;
    cfg.full_newton_debug |= cli.full_newton_debug;
    if let Some(s) = &cli.sweep {
        cfg.sweep = Some(parse_sweep(s)?);
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fail(e: &Error) -> ExitCode {
    eprintln!("error: {e}");
    match e {
        Error::Config(_) | Error::Io { .. } => ExitCode::from(2),
        _ => ExitCode::from(1),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let cfg = match load_config(&cli) {
        Ok(c) => c,
        Err(e) => return fail(&e),
    };
    if cli.print_config {
        print!("{}", cfg.to_config_string());
        return ExitCode::SUCCESS;
    }

    if let Some((a, b)) = cfg.sweep {
        let levels: Vec<u32> = (a..=b).collect();
        return match run_sweep(&cfg, &levels) {
            Ok(rows) => {
                print!("{}", format_table(&rows));
                if rows.iter().all(|r| r.status == "converged") {
                    ExitCode::SUCCESS
                } else {
                    ExitCode::from(1)
                }
            }
            Err(e) => fail(&e),
        };
    }

    let out = match run(&cfg) {
        Ok(o) => o,
        Err(e) => return fail(&e),
    };
    print!("{}", format_table(&[out.row.clone()]));
    let res = &out.residuals;
    println!(
        "residuals: friction {:.2e}, slip {:.2e}, equilibrium {:.2e}, feasibility {:.2e}, complementarity {:.2e} ({})",
        res.friction_bound,
        res.slip_alignment,
        res.normal_equilibrium,
        res.feasibility,
        res.complementarity,
        if res.passes() { "ok" } else { "FAILED" }
    );
    if let Some(c) = &out.oracle {
        println!(
            "oracle: |du|/|u| = {:.2e}, |dlambda|/|lambda| = {:.2e} ({} iterations)",
            c.displacement_rel, c.multiplier_rel, c.oracle_iterations
        );
    }
    if let Some(p) = &cfg.export_vtk {
        println!("wrote {}", p.display());
    }
    if let Some(p) = &cfg.log_csv {
        println!("wrote {}", p.display());
    }
    ExitCode::from(exit_code(&out.report.status) as u8)
}

//! Acceptance suite. Runs without the libtest harness so that every
//! criterion prints its own PASS/FAIL line; exits nonzero if any fails.

mod common;

use std::process::ExitCode;

use common::*;
use faer::linalg::solvers::Solve;
use faer::Mat;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tresca_ssn::config::RunConfig;
use tresca_ssn::linalg::norm_inf;
use tresca_ssn::oracle::{oracle_solve, residual_check, OracleOptions};
use tresca_ssn::runner::{run_problem, ContactProblem, RunOutput};
use tresca_ssn::ssn::{solve, SolverOptions};

const REFERENCE_ITERATIONS: [(u32, usize); 4] = [(2, 6), (3, 6), (4, 6), (5, 7)];

struct Criterion {
    id: u32,
    name: &'static str,
    passed: bool,
    detail: String,
}

fn benchmark(level: u32) -> RunOutput {
    let cfg = RunConfig {
        level,
        ..RunConfig::default()
    };
    run_problem(ContactProblem::build(&cfg).unwrap(), &cfg).unwrap()
}

fn rel_inf(a: &[f64], reference: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(reference).map(|(x, y)| x - y).collect();
    norm_inf(&diff) / norm_inf(reference).max(f64::MIN_POSITIVE)
}

fn iteration_counts(runs: &[(u32, RunOutput)]) -> Criterion {
    let mut passed = true;
    let mut parts = Vec::new();
    for &(level, expected) in &REFERENCE_ITERATIONS {
        let out = &runs.iter().find(|(l, _)| *l == level).unwrap().1;
        let it = out.report.iterations;
        passed &= out.report.converged() && it.abs_diff(expected) <= 2;
        parts.push(format!("l{level}: {it} (ref {expected})"));
    }
    Criterion {
        id: 1,
        name: "iteration counts within 2 of the reference table",
        passed,
        detail: parts.join(", "),
    }
}

fn mesh_independence(runs: &[(u32, RunOutput)]) -> Criterion {
    let counts: Vec<usize> = runs.iter().map(|(_, o)| o.report.iterations).collect();
    let converged = runs.iter().all(|(_, o)| o.report.converged());
    let passed = converged
        && counts.iter().all(|&c| c <= 9)
        && counts.windows(2).all(|w| w[1] <= w[0] + 1);
    Criterion {
        id: 2,
        name: "mesh independence, levels 2-6",
        passed,
        detail: format!("iterations {counts:?}"),
    }
}

fn oracle_agreement(runs: &[(u32, RunOutput)]) -> Criterion {
    let mut passed = true;
    let mut parts = Vec::new();
    for (level, out) in runs.iter().filter(|(l, _)| *l <= 3) {
        let cbs = &out.problem.condensed;
        let sys = &out.problem.reduced;
        let sol = oracle_solve(
            cbs.a_tilde.as_ref(),
            &cbs.b_tilde,
            &sys.gap,
            &sys.phi,
            &OracleOptions {
                tol: 1e-10,
                ..OracleOptions::default()
            },
        )
        .unwrap();
        let du = rel_inf(&out.problem.contact_displacements(&out.report.x), &sol.u);
        let dx = rel_inf(&out.report.x, &sol.lifted());
        passed &= du <= 1e-5 && dx <= 1e-4;
        parts.push(format!("l{level}: du {du:.1e}, dlifted {dx:.1e}"));
    }
    Criterion {
        id: 3,
        name: "agreement with the proximal-gradient oracle",
        passed,
        detail: parts.join(", "),
    }
}

fn residuals(runs: &[(u32, RunOutput)]) -> Criterion {
    let mut passed = true;
    let mut worst: f64 = 0.0;
    for (_, out) in runs.iter().filter(|(l, _)| *l <= 5) {
        let sys = &out.problem.reduced;
        let tol = 1e-8 * norm_inf(&sys.b);
        let r = residual_check(sys, &out.report.x, tol).unwrap();
        passed &= r.passes();
        worst = worst
            .max(r.friction_bound / tol)
            .max(r.slip_alignment / tol)
            .max(r.normal_equilibrium / tol)
            .max(r.feasibility / tol);
    }
    Criterion {
        id: 4,
        name: "optimality residuals at 1e-8 |b|_inf, levels 2-5",
        passed,
        detail: format!("worst residual / tol = {worst:.1e}"),
    }
}

fn superlinear_rate() -> Criterion {
    let problem = ContactProblem::build(&RunConfig::default()).unwrap();
    let sys = &problem.reduced;
    let report = solve(
        sys,
        &vec![0.0; sys.dim()],
        &SolverOptions {
            keep_iterates: true,
            ..SolverOptions::default()
        },
    )
    .unwrap();
    let ratios = error_ratios(&report.iterates, &report.x);
    let tail = &ratios[ratios.len().saturating_sub(3)..];
    let passed = report.converged()
        && tail.len() == 3
        && tail.windows(2).all(|w| w[1] < w[0])
        && tail[2] < 0.1;
    Criterion {
        id: 5,
        name: "superlinear error decay on level 2",
        passed,
        detail: format!("last ratios {:?}", tail.iter().map(|r| format!("{r:.1e}")).collect::<Vec<_>>()),
    }
}

fn newton_forms() -> Criterion {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    let mut worst: f64 = 0.0;
    let mut compared = 0;
    while compared < 50 {
        let p = rng.gen_range(1..=5);
        let sys = random_system(&mut rng, p);
        let x: Vec<f64> = (0..4 * p).map(|_| rng.gen_range(-2.0..2.0)).collect();
        if let Some(gap) = newton_form_gap(&sys, &x) {
            worst = worst.max(gap);
            compared += 1;
        }
    }
    Criterion {
        id: 6,
        name: "reduced and unreduced Newton steps agree on 50 random systems",
        passed: worst <= 1e-10,
        detail: format!("worst relative gap {worst:.1e}"),
    }
}

fn discretization() -> Criterion {
    let rigid = rigid_mode_residual(&benchmark_mesh(2));
    let patch = patch_test_error(2);
    let energy = schur_energy_gap(2);
    Criterion {
        id: 7,
        name: "rigid modes, patch test, condensed energy",
        passed: rigid <= 1e-10 && patch <= 1e-10 && energy <= 1e-9,
        detail: format!("rigid {rigid:.1e}, patch {patch:.1e}, energy {energy:.1e}"),
    }
}

fn frictionless_lift_off() -> Criterion {
    let mut cfg = RunConfig {
        phi: 0.0,
        ..RunConfig::default()
    };
    cfg.tractions.right = [0.0; 3];
    cfg.tractions.top = [0.0, 0.0, 1e8];
    let problem = ContactProblem::build(&cfg).unwrap();
    let sys = &problem.reduced;
    let report = solve(sys, &vec![0.0; sys.dim()], &SolverOptions::default()).unwrap();

    let cbs = &problem.condensed;
    let n = cbs.b_tilde.len();
    let mut exact = Mat::<f64>::from_fn(n, 1, |i, _| cbs.b_tilde[i]);
    cbs.a_tilde.llt(faer::Side::Lower).unwrap().solve_in_place(exact.as_mut());
    let exact: Vec<f64> = (0..n).map(|i| exact[(i, 0)]).collect();

    let du = rel_inf(&problem.contact_displacements(&report.x), &exact);
    let lambda = norm_inf(&problem.multipliers(&report.x));
    Criterion {
        id: 8,
        name: "frictionless lift-off matches the linear solve",
        passed: report.converged() && report.iterations <= 3 && du <= 1e-9 && lambda == 0.0,
        detail: format!("{} iterations, du {du:.1e}, max lambda {lambda:.1e}", report.iterations),
    }
}

fn main() -> ExitCode {
    let runs: Vec<(u32, RunOutput)> = (2..=6).map(|l| (l, benchmark(l))).collect();
    let criteria = [
        iteration_counts(&runs),
        mesh_independence(&runs),
        oracle_agreement(&runs),
        residuals(&runs),
        superlinear_rate(),
        newton_forms(),
        discretization(),
        frictionless_lift_off(),
    ];
    let mut failed = 0;
    for c in &criteria {
        println!(
            "criterion {} {}: {} ({})",
            c.id,
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
        failed += usize::from(!c.passed);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}

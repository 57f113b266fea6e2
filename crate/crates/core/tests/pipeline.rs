mod common;

use common::*;
use faer::linalg::solvers::Solve;
use faer::Mat;
use tresca_ssn::config::RunConfig;
use tresca_ssn::linalg::{norm_inf, sparse_to_dense};
use tresca_ssn::reduction::schur_reduce;
use tresca_ssn::runner::{run, ContactProblem};
use tresca_ssn::ssn::{solve, SolverOptions};

#[test]
fn rigid_modes_lie_in_the_stiffness_kernel() {
    assert!(rigid_mode_residual(&benchmark_mesh(2)) < 1e-10);
}

#[test]
fn affine_fields_pass_the_patch_test() {
    let err = patch_test_error(2);
    assert!(err < 1e-10, "patch test error {err:e}");
}

#[test]
fn condensed_energy_matches_full_energy() {
    let gap = schur_energy_gap(2);
    assert!(gap < 1e-9, "energy gap {gap:e}");
}

#[test]
fn interior_recovery_matches_a_dense_solve() {
    let mesh = benchmark_mesh(2);
    let sys = benchmark_system(&mesh);
    let contact = sys.contact_dofs(&mesh).unwrap();
    let cbs = schur_reduce(&sys, &contact).unwrap();

    let k = sparse_to_dense(&sys.stiffness);
    let mut u = Mat::<f64>::from_fn(sys.free_dof_count(), 1, |i, _| sys.load[i]);
    k.partial_piv_lu().solve_in_place(u.as_mut());
    let u: Vec<f64> = (0..sys.free_dof_count()).map(|i| u[(i, 0)]).collect();

    let u_c: Vec<f64> = contact.iter().map(|&d| u[d]).collect();
    let u_i = cbs.recover_interior(&u_c).unwrap();
    let diff: Vec<f64> = cbs.interior_dofs.iter().zip(&u_i).map(|(&d, v)| v - u[d]).collect();
    assert!(norm_inf(&diff) <= 1e-9 * norm_inf(&u));

    // the unconstrained contact displacement also solves Ã u_C = b̃
    let au: Vec<f64> = (0..u_c.len())
        .map(|i| (0..u_c.len()).map(|j| cbs.a_tilde[(i, j)] * u_c[j]).sum::<f64>())
        .collect();
    let r: Vec<f64> = au.iter().zip(&cbs.b_tilde).map(|(a, b)| a - b).collect();
    assert!(norm_inf(&r) <= 1e-8 * norm_inf(&cbs.b_tilde));
}

#[test]
fn level_two_benchmark_converges() {
    let out = run(&RunConfig::default()).unwrap();
    assert_eq!(out.row.status, "converged");
    assert_eq!((out.row.n, out.row.p), (225, 40));
    assert!((4..=8).contains(&out.row.iterations), "{} iterations", out.row.iterations);
    assert!(out.residuals.passes());
    assert_eq!(out.report.records.len(), out.report.iterations + 1);

    // bottom face pressed onto the foundation, no penetration
    let x = &out.report.x;
    let gap = &out.problem.reduced.gap;
    for (i, block) in x.chunks_exact(4).enumerate() {
        assert!(block[2] + gap[i] >= -1e-9);
        assert!(block[3] >= 0.0);
    }
    assert!(x.chunks_exact(4).any(|b| b[3] > 0.0));

    // recovered field vanishes on the clamped face
    for &n in &out.problem.mesh.dirichlet_nodes {
        assert_eq!(&out.displacement[3 * n..3 * n + 3], &[0.0; 3]);
    }
}

#[test]
fn full_and_reduced_newton_agree_on_the_benchmark() {
    let problem = ContactProblem::build(&RunConfig::default()).unwrap();
    let sys = &problem.reduced;
    let x0 = vec![0.0; sys.dim()];
    let reduced = solve(sys, &x0, &SolverOptions::default()).unwrap();
    let full = solve(
        sys,
        &x0,
        &SolverOptions {
            newton_form: tresca_ssn::ssn::NewtonForm::Full,
            ..SolverOptions::default()
        },
    )
    .unwrap();
    assert!(reduced.converged() && full.converged());
    let diff: Vec<f64> = reduced.x.iter().zip(&full.x).map(|(a, b)| a - b).collect();
    assert!(norm_inf(&diff) <= 1e-8 * norm_inf(&full.x));
}

#[test]
fn smaller_slip_bound_keeps_more_nodes_stuck() {
    let mut cfg = RunConfig::default();
    cfg.tractions.right = [-2e6, 0.0, 0.0];
    cfg.tractions.top = [0.0, 0.0, -1e6];
    cfg.phi = 1e5;
    let out = run(&cfg).unwrap();
    assert!(out.report.converged());
    assert!(out.residuals.passes());
    let last = out.report.records.last().unwrap();
    assert!(last.branches.stick > 0);
}

#[test]
fn config_file_drives_a_run() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("run.cfg");
    let vtk = dir.path().join("u.vtk");
    let csv = dir.path().join("log.csv");
    std::fs::write(
        &path,
        format!(
            "level = 1\nphi = 0.5\nexport_vtk = {}\nlog_csv = {}\n",
            vtk.display(),
            csv.display()
        ),
    )
    .unwrap();
    let cfg = RunConfig::load(&path).unwrap();
    let out = run(&cfg).unwrap();
    assert!(out.report.converged());
    let log = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(log.lines().count(), out.report.records.len() + 1);
    let field = std::fs::read_to_string(&vtk).unwrap();
    assert!(field.contains("POINTS 112 double"));

    // byte-identical on a second run
    run(&cfg).unwrap();
    assert_eq!(std::fs::read_to_string(&vtk).unwrap(), field);
}

#[test]
fn cli_exit_codes() {
    let bin = env!("CARGO_BIN_EXE_tresca-ssn");
    let status = |args: &[&str]| {
        std::process::Command::new(bin)
            .args(args)
            .output()
            .unwrap()
            .status
            .code()
    };
    assert_eq!(status(&["--level", "1"]), Some(0));
    assert_eq!(status(&["--level", "1", "--max-iter", "1"]), Some(4));
    assert_eq!(status(&["--eps", "-1"]), Some(2));
    assert_eq!(status(&["--sweep", "3..1"]), Some(2));
    assert_eq!(status(&["--config", "/definitely/not/here.cfg"]), Some(2));

    let out = std::process::Command::new(bin)
        .args(["--print-config", "--phi", "0.25"])
        .output()
        .unwrap();
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(RunConfig::parse(&text).unwrap().phi, 0.25);
}

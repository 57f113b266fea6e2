//! End-to-end pipeline: mesh, assembly, condensation, solve, checks, exports.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::config::RunConfig;
use crate::error::{Error, Result};
use crate::export::{export_iteration_log, export_vtk};
use crate::fem::{apply_dirichlet, assemble_stiffness, assemble_surface_load, GlobalSystem};
use crate::linalg::norm_inf;
use crate::mesh::{build_mesh, gap_vector, DomainSpec, HexMesh, MeshLevelSpec};
use crate::oracle::{oracle_solve, residual_check, OracleOptions, ResidualReport};
use crate::reduction::{schur_reduce, CondensedBoundarySystem, ReducedContactSystem};
use crate::ssn::{solve, NewtonForm, SolveReport, SolveStatus, SolverOptions};

/// Tolerance of the post-solve residual check, relative to `|b|_∞`.
pub const RESIDUAL_TOL: f64 = 1e-8;

#[derive(Debug)]
pub struct ContactProblem {
    pub domain: DomainSpec,
    pub spec: MeshLevelSpec,
    pub mesh: HexMesh,
    pub system: GlobalSystem,
    pub condensed: CondensedBoundarySystem,
    pub reduced: ReducedContactSystem,
    pub assembly_time: Duration,
    pub reduction_time: Duration,
}

impl ContactProblem {
    pub fn build(cfg: &RunConfig) -> Result<Self> {
        cfg.validate()?;
        let spec = cfg.mesh_spec()?;
        let start = Instant::now();
        let mesh = build_mesh(&cfg.domain, &spec)?;
        let k = assemble_stiffness(&mesh, &cfg.elastic)?;
        let l = assemble_surface_load(&mesh, &cfg.tractions);
        let system = apply_dirichlet(&k, &l, &mesh)?;
        let assembly_time = start.elapsed();

        let start = Instant::now();
        let contact = system.contact_dofs(&mesh)?;
        let condensed = schur_reduce(&system, &contact)?;
        let gap = gap_vector(&mesh, &cfg.domain)?;
        let reduced = condensed.expand(&gap, cfg.phi)?;
        let reduction_time = start.elapsed();

        Ok(Self {
            domain: cfg.domain,
            spec,
            mesh,
            system,
            condensed,
            reduced,
            assembly_time,
            reduction_time,
        })
    }

    /// The `3p` contact displacements of a `4p` iterate.
    pub fn contact_displacements(&self, x: &[f64]) -> Vec<f64> {
        x.chunks_exact(4).flat_map(|b| [b[0], b[1], b[2]]).collect()
    }

    /// The `p` multipliers `λⁱ` of an iterate.
    pub fn multipliers(&self, x: &[f64]) -> Vec<f64> {
        x.chunks_exact(4).map(|b| b[3]).collect()
    }

    /// Full `3n` nodal displacement field with zeros on the Dirichlet face.
    pub fn displacement_field(&self, x: &[f64]) -> Result<Vec<f64>> {
        let free = self.condensed.free_solution(&self.contact_displacements(x))?;
        Ok(self.system.expand_to_full(&free))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkRow {
    pub level: Option<u32>,
    pub n: usize,
    pub p: usize,
    pub assembly_s: f64,
    pub reduction_s: f64,
    pub solver_s: f64,
    pub iterations: usize,
    pub status: String,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleComparison {
    /// `|u_ssn − u_oracle|_∞ / |u_oracle|_∞`
    pub displacement_rel: f64,
    /// Same for the multipliers.
    pub multiplier_rel: f64,
    pub oracle_iterations: usize,
}

#[derive(Debug)]
pub struct RunOutput {
    pub problem: ContactProblem,
    pub report: SolveReport,
    pub row: BenchmarkRow,
    pub displacement: Vec<f64>,
    pub residuals: ResidualReport,
    pub oracle: Option<OracleComparison>,
}

pub fn solver_options(cfg: &RunConfig) -> SolverOptions {
    SolverOptions {
        eps: cfg.eps,
        max_iter: cfg.max_iter,
        newton_form: if cfg.full_newton_debug {
            NewtonForm::Full
        } else {
            NewtonForm::Reduced
        },
        keep_iterates: false,
    }
}

fn rel_inf(a: &[f64], reference: &[f64]) -> f64 {
    let diff: Vec<f64> = a.iter().zip(reference).map(|(x, y)| x - y).collect();
    let scale = norm_inf(reference);
    if scale > 0.0 {
        norm_inf(&diff) / scale
    } else {
        norm_inf(&diff)
    }
}

/// Solves `problem` from a zero start and compares against the reference
/// solver when requested.
pub fn run_problem(problem: ContactProblem, cfg: &RunConfig) -> Result<RunOutput> {
    let sys = &problem.reduced;
    let start = Instant::now();
    let report = solve(sys, &vec![0.0; sys.dim()], &solver_options(cfg))?;
    let solver_time = start.elapsed();

    let residuals = residual_check(sys, &report.x, RESIDUAL_TOL * norm_inf(&sys.b).max(1.0))?;
    let oracle = if cfg.oracle_check {
        let sol = oracle_solve(
            problem.condensed.a_tilde.as_ref(),
            &problem.condensed.b_tilde,
            &sys.gap,
            &sys.phi,
            &OracleOptions::default(),
        )?;
        Some(OracleComparison {
            displacement_rel: rel_inf(&problem.contact_displacements(&report.x), &sol.u),
            multiplier_rel: rel_inf(&problem.multipliers(&report.x), &sol.lambda),
            oracle_iterations: sol.iterations,
        })
    } else {
        None
    };
    let displacement = problem.displacement_field(&report.x)?;

    if let Some(path) = &cfg.log_csv {
        export_iteration_log(&report, path)?;
    }
    if let Some(path) = &cfg.export_vtk {
        export_vtk(&problem.mesh, &displacement, path)?;
    }

    let row = BenchmarkRow {
        level: problem.spec.level,
        n: problem.mesh.node_count(),
        p: problem.mesh.contact_count(),
        assembly_s: problem.assembly_time.as_secs_f64(),
        reduction_s: problem.reduction_time.as_secs_f64(),
        solver_s: solver_time.as_secs_f64(),
        iterations: report.iterations,
        status: report.status.label().to_string(),
    };
    Ok(RunOutput {
        problem,
        report,
        row,
        displacement,
        residuals,
        oracle,
    })
}

pub fn run(cfg: &RunConfig) -> Result<RunOutput> {
    let problem = ContactProblem::build(cfg)?;
    run_problem(problem, cfg)
}

/// `out/field.vtk` → `out/field_l3.vtk`.
fn with_level_suffix(path: &Path, level: u32) -> PathBuf {
    let stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = match path.extension() {
        Some(ext) => format!("{stem}_l{level}.{}", ext.to_string_lossy()),
        None => format!("{stem}_l{level}"),
    };
    path.with_file_name(name)
}

/// Runs each level in turn; a failing level yields a row with an `error:`
/// status and the sweep continues.
pub fn run_sweep(base: &RunConfig, levels: &[u32]) -> Result<Vec<BenchmarkRow>> {
    if levels.is_empty() {
        return Err(Error::Config("sweep needs at least one level".into()));
    }
    let mut rows = Vec::with_capacity(levels.len());
    for &level in levels {
        let mut cfg = base.clone();
        cfg.level = level;
        cfg.divisions = None;
        cfg.sweep = None;
        cfg.export_vtk = base.export_vtk.as_deref().map(|p| with_level_suffix(p, level));
        cfg.log_csv = base.log_csv.as_deref().map(|p| with_level_suffix(p, level));
        let row = match run(&cfg) {
            Ok(out) => out.row,
            Err(e) => {
                let d = crate::mesh::divisions(level).ok();
                BenchmarkRow {
                    level: Some(level),
                    n: d.map_or(0, |d| d.node_count()),
                    p: d.map_or(0, |d| d.contact_node_count()),
                    assembly_s: 0.0,
                    reduction_s: 0.0,
                    solver_s: 0.0,
                    iterations: 0,
                    status: format!("error: {e}"),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

pub fn format_table(rows: &[BenchmarkRow]) -> String {
    let mut out = String::new();
    let _ = writeln!(
        out,
        "{:>5} {:>8} {:>6} {:>12} {:>12} {:>10} {:>6}  status",
        "level", "n", "p", "assembly[s]", "reduction[s]", "solver[s]", "iters"
    );
    for r in rows {
        let level = r.level.map_or_else(|| "-".to_string(), |l| l.to_string());
        let _ = writeln!(
            out,
            "{:>5} {:>8} {:>6} {:>12.3} {:>12.3} {:>10.3} {:>6}  {}",
            level, r.n, r.p, r.assembly_s, r.reduction_s, r.solver_s, r.iterations, r.status
        );
    }
    out
}

/// Process exit code for a finished solve.
pub fn exit_code(status: &SolveStatus) -> i32 {
    match status {
        SolveStatus::Converged => 0,
        SolveStatus::SingularNewton { .. } => 3,
        SolveStatus::MaxIter => 4,
    }
}

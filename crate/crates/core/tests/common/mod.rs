#![allow(dead_code)]

use faer::Mat;
use rand::Rng;
use tresca_ssn::fem::{
    apply_dirichlet, assemble_stiffness, assemble_surface_load, ElasticParams, GlobalSystem, TractionSpec,
};
use tresca_ssn::linalg::{dot, matvec, max_abs, norm_inf, sparse_matvec, sparse_to_dense};
use tresca_ssn::mesh::{build_mesh, DomainSpec, HexMesh, MeshLevelSpec};
use tresca_ssn::reduction::{expand_blocks, schur_reduce, ReducedContactSystem};
use tresca_ssn::ssn::{approximation_step, build_gh, newton_step, NewtonForm};

pub fn benchmark_mesh(level: u32) -> HexMesh {
    build_mesh(&DomainSpec::benchmark(), &MeshLevelSpec::from_level(level).unwrap()).unwrap()
}

pub fn benchmark_system(mesh: &HexMesh) -> GlobalSystem {
    let k = assemble_stiffness(mesh, &ElasticParams::benchmark()).unwrap();
    let l = assemble_surface_load(mesh, &TractionSpec::benchmark());
    apply_dirichlet(&k, &l, mesh).unwrap()
}

/// Well-conditioned random SPD matrix.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize) -> Mat<f64> {
    let m = Mat::<f64>::from_fn(n, n, |_, _| rng.gen_range(-1.0..1.0));
    Mat::from_fn(n, n, |i, j| {
        let s: f64 = (0..n).map(|k| m[(k, i)] * m[(k, j)]).sum::<f64>() / n as f64;
        s + if i == j { 1.0 } else { 0.0 }
    })
}

pub fn random_system<R: Rng>(rng: &mut R, p: usize) -> ReducedContactSystem {
    let a = random_spd(rng, 3 * p);
    let b: Vec<f64> = (0..3 * p).map(|_| rng.gen_range(-3.0..3.0)).collect();
    let gap: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..0.5)).collect();
    let phi: Vec<f64> = (0..p).map(|_| rng.gen_range(0.0..2.0)).collect();
    expand_blocks(a.as_ref(), &b, &gap, &phi).unwrap()
}

/// Largest relative gap between the reduced and the unreduced Newton step
/// from `x`, or `None` when either factorization is singular.
pub fn newton_form_gap(sys: &ReducedContactSystem, x: &[f64]) -> Option<f64> {
    let ar = approximation_step(x, sys);
    let nm = build_gh(&ar.d_hat, &sys.phi).unwrap();
    let reduced = newton_step(sys, &ar, &nm, NewtonForm::Reduced).ok()?;
    let full = newton_step(sys, &ar, &nm, NewtonForm::Full).ok()?;
    let diff: Vec<f64> = reduced.iter().zip(&full).map(|(a, b)| a - b).collect();
    Some(norm_inf(&diff) / norm_inf(&full).max(1.0))
}

/// Translations and infinitesimal rotations of every node.
pub fn rigid_modes(mesh: &HexMesh) -> Vec<Vec<f64>> {
    let mut modes = Vec::new();
    for d in 0..3 {
        let mut u = vec![0.0; 3 * mesh.node_count()];
        for n in 0..mesh.node_count() {
            u[3 * n + d] = 1.0;
        }
        modes.push(u);
    }
    for axis in 0..3 {
        let mut u = vec![0.0; 3 * mesh.node_count()];
        for (n, x) in mesh.node_coords.iter().enumerate() {
            let (a, b) = ((axis + 1) % 3, (axis + 2) % 3);
            u[3 * n + a] = -x[b];
            u[3 * n + b] = x[a];
        }
        modes.push(u);
    }
    modes
}

/// `max_r |K r|_∞ / (max|K| · |r|_∞)` over the rigid modes of the
/// unconstrained stiffness.
pub fn rigid_mode_residual(mesh: &HexMesh) -> f64 {
    let k = assemble_stiffness(mesh, &ElasticParams::benchmark()).unwrap();
    let scale = max_abs(sparse_to_dense(&k).as_ref());
    rigid_modes(mesh)
        .iter()
        .map(|r| norm_inf(&sparse_matvec(&k, r)) / (scale * norm_inf(r)))
        .fold(0.0, f64::max)
}

fn on_boundary(mesh: &HexMesh, n: usize) -> bool {
    let d = mesh.divisions;
    let i = n % (d.x + 1);
    let j = (n / (d.x + 1)) % (d.y + 1);
    let k = n / ((d.x + 1) * (d.y + 1));
    i == 0 || i == d.x || j == 0 || j == d.y || k == 0 || k == d.z
}

/// Prescribes an affine field on the outer surface of a mesh with shuffled
/// interior nodes and returns the relative error of the recovered interior.
pub fn patch_test_error(level: u32) -> f64 {
    let mut mesh = benchmark_mesh(level);
    let d = mesh.divisions;
    let h = [2.0 / d.x as f64, 1.0 / d.y as f64, 0.9 / d.z as f64];
    for n in 0..mesh.node_count() {
        if !on_boundary(&mesh, n) {
            let t = n as f64;
            for c in 0..3 {
                mesh.node_coords[n][c] += 0.2 * h[c] * (1.7 * t + 2.3 * c as f64).sin();
            }
        }
    }
    let affine = |x: &[f64; 3]| {
        [
            1e-3 + 2e-3 * x[0] - 1e-3 * x[1] + 5e-4 * x[2],
            -2e-3 + 1e-3 * x[0] + 3e-3 * x[1] - 2e-3 * x[2],
            4e-4 - 5e-4 * x[0] + 1e-3 * x[1] + 2.5e-3 * x[2],
        ]
    };
    let k = assemble_stiffness(&mesh, &ElasticParams::benchmark()).unwrap();
    let sys = GlobalSystem::from_parts(k, vec![0.0; 3 * mesh.node_count()]).unwrap();
    let boundary: Vec<usize> = (0..mesh.node_count())
        .filter(|&n| on_boundary(&mesh, n))
        .flat_map(|n| [3 * n, 3 * n + 1, 3 * n + 2])
        .collect();
    let cbs = schur_reduce(&sys, &boundary).unwrap();
    let u_b: Vec<f64> = boundary.iter().map(|&dof| affine(&mesh.node_coords[dof / 3])[dof % 3]).collect();
    let u_i = cbs.recover_interior(&u_b).unwrap();
    let mut err: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for (&dof, &v) in cbs.interior_dofs.iter().zip(&u_i) {
        let exact = affine(&mesh.node_coords[dof / 3])[dof % 3];
        err = err.max((v - exact).abs());
        scale = scale.max(exact.abs());
    }
    err / scale
}

/// Relative gap between the full energy `½uᵀKu − lᵀu` of the recovered
/// field and the condensed energy plus its constant offset.
pub fn schur_energy_gap(level: u32) -> f64 {
    let mesh = benchmark_mesh(level);
    let sys = benchmark_system(&mesh);
    let cbs = schur_reduce(&sys, &sys.contact_dofs(&mesh).unwrap()).unwrap();
    let u_c: Vec<f64> = (0..cbs.contact_dof_count())
        .map(|i| 1e-2 * ((i as f64) * 0.37).cos())
        .collect();
    let u = cbs.free_solution(&u_c).unwrap();
    let full = 0.5 * dot(&u, &sparse_matvec(&sys.stiffness, &u)) - dot(&sys.load, &u);
    let au = matvec(cbs.a_tilde.as_ref(), &u_c);
    let reduced = 0.5 * dot(&u_c, &au) - dot(&cbs.b_tilde, &u_c) + cbs.energy_offset();
    (full - reduced).abs() / full.abs()
}

/// `|x⁽ᵏ⁺¹⁾ − x*| / |x⁽ᵏ⁾ − x*|` for every pair of iterates with nonzero
/// error.
pub fn error_ratios(iterates: &[Vec<f64>], x_star: &[f64]) -> Vec<f64> {
    let errors: Vec<f64> = iterates
        .iter()
        .map(|x| x.iter().zip(x_star).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt())
        .filter(|&e| e > 0.0)
        .collect();
    errors.windows(2).map(|w| w[1] / w[0]).collect()
}

//! Semismooth* Newton iteration for `0 ∈ A x − b + Q(x)`.
//!
//! Each iteration works on the lifted inclusion in `(x, d)`,
//!
//! ```text
//! 0 ∈ [ A x − b + Q(d) ]
//!     [ x − d          ]
//! ```
//!
//! The approximation step solves three closed-form convex subproblems per
//! node, giving a point `(x̂, d̂)` with residual `ŷ = (−v̂, −v̂)` on the graph.
//! The Newton step then linearizes around it with the block-diagonal pair
//! `(G, H)` and takes `(x, d) ← (x̂, d̂) − diag(I, G) D⁻¹ ŷ`, where
//! `D = [[A, −H], [I, G]]`.

use std::time::Instant;

use faer::Mat;

use crate::error::{Error, Result};
use crate::linalg::{matvec, norm2};
use crate::reduction::ReducedContactSystem;

/// Minimizer of `½|v|² + ⟨g, v⟩ + φ |w + v|` over `v ∈ R²`.
///
/// When `|w − g| ≤ φ` the result is exactly `−w`, so `w + v` is an exact
/// floating-point zero.
pub fn prox_tangential(w: [f64; 2], g: [f64; 2], phi: f64) -> [f64; 2] {
    let s = [w[0] - g[0], w[1] - g[1]];
    let ns = s[0].hypot(s[1]);
    if ns <= phi {
        [-w[0], -w[1]]
    } else {
        let k = 1.0 - phi / ns;
        [k * s[0] - w[0], k * s[1] - w[1]]
    }
}

/// Minimizer of `½v² + f₃ v`.
pub fn approx_normal(f3: f64) -> f64 {
    -f3
}

/// Minimizer of `½v² + f₄ v` subject to `λ + v ≥ 0`.
///
/// `f4` is the gap-adjusted normal residual `u_ν + g`. When the bound is
/// active the result is exactly `−λ`.
pub fn approx_multiplier(f4: f64, lambda: f64) -> f64 {
    (-f4).max(-lambda)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ApproxStepResult {
    pub x_hat: Vec<f64>,
    pub d_hat: Vec<f64>,
    pub v_hat: Vec<f64>,
}

impl ApproxStepResult {
    /// `ŷ = (−v̂, −v̂)`.
    pub fn y_hat(&self) -> (Vec<f64>, Vec<f64>) {
        let neg: Vec<f64> = self.v_hat.iter().map(|v| -v).collect();
        (neg.clone(), neg)
    }

    pub fn norm_v(&self) -> f64 {
        norm2(&self.v_hat)
    }
}

pub fn approximation_step(x: &[f64], sys: &ReducedContactSystem) -> ApproxStepResult {
    let f = sys.residual(x);
    let p = sys.node_count();
    let mut v_hat = vec![0.0; 4 * p];
    let mut d_hat = vec![0.0; 4 * p];
    for i in 0..p {
        let o = 4 * i;
        let vt = prox_tangential([x[o], x[o + 1]], [f[o], f[o + 1]], sys.phi[i]);
        v_hat[o] = vt[0];
        v_hat[o + 1] = vt[1];
        v_hat[o + 2] = approx_normal(f[o + 2]);
        v_hat[o + 3] = approx_multiplier(f[o + 3], x[o + 3]);
        for c in 0..4 {
            d_hat[o + c] = x[o + c] + v_hat[o + c];
        }
    }
    ApproxStepResult {
        x_hat: x.to_vec(),
        d_hat,
        v_hat,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Tangential {
    Stick,
    Slide,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Normal {
    Contact,
    NoContact,
}

/// Per-node diagonal blocks `Gⁱ = diag(G₁ⁱ, 1, G₂ⁱ)`, `Hⁱ = diag(H₁ⁱ, 0, H₂ⁱ)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NodeBlocks {
    pub tangential: Tangential,
    pub normal: Normal,
    pub h1: [[f64; 2]; 2],
}

impl NodeBlocks {
    /// Diagonal of `Gⁱ` (every `Gⁱ` is diagonal).
    pub fn g_diag(&self) -> [f64; 4] {
        let g1 = match self.tangential {
            Tangential::Stick => 0.0,
            Tangential::Slide => 1.0,
        };
        let g2 = match self.normal {
            Normal::Contact => 1.0,
            Normal::NoContact => 0.0,
        };
        [g1, g1, 1.0, g2]
    }

    pub fn h_block(&self) -> [[f64; 4]; 4] {
        let mut h = [[0.0; 4]; 4];
        h[0][0] = self.h1[0][0];
        h[0][1] = self.h1[0][1];
        h[1][0] = self.h1[1][0];
        h[1][1] = self.h1[1][1];
        h[3][3] = match self.normal {
            Normal::Contact => 0.0,
            Normal::NoContact => 1.0,
        };
        h
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct BranchCounts {
    pub stick: usize,
    pub slide: usize,
    pub contact: usize,
    pub no_contact: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewtonMatrices {
    pub nodes: Vec<NodeBlocks>,
}

impl NewtonMatrices {
    pub fn counts(&self) -> BranchCounts {
        let mut c = BranchCounts::default();
        for n in &self.nodes {
            match n.tangential {
                Tangential::Stick => c.stick += 1,
                Tangential::Slide => c.slide += 1,
            }
            match n.normal {
                Normal::Contact => c.contact += 1,
                Normal::NoContact => c.no_contact += 1,
            }
        }
        c
    }

    pub fn g_diag(&self) -> Vec<f64> {
        self.nodes.iter().flat_map(|n| n.g_diag()).collect()
    }

    pub fn g_dense(&self) -> Mat<f64> {
        let g = self.g_diag();
        Mat::from_fn(g.len(), g.len(), |i, j| if i == j { g[i] } else { 0.0 })
    }

    pub fn h_dense(&self) -> Mat<f64> {
        let n = 4 * self.nodes.len();
        let mut h = Mat::zeros(n, n);
        for (i, node) in self.nodes.iter().enumerate() {
            let blk = node.h_block();
            for r in 0..4 {
                for c in 0..4 {
                    h[(4 * i + r, 4 * i + c)] = blk[r][c];
                }
            }
        }
        h
    }
}

/// Branch classification from exact zeros of `d̂`.
pub fn branch_counts(d_hat: &[f64]) -> BranchCounts {
    let mut c = BranchCounts::default();
    for blk in d_hat.chunks_exact(4) {
        if blk[0] == 0.0 && blk[1] == 0.0 {
            c.stick += 1;
        } else {
            c.slide += 1;
        }
        if blk[3] == 0.0 {
            c.no_contact += 1;
        } else {
            c.contact += 1;
        }
    }
    c
}

pub fn build_gh(d_hat: &[f64], phi: &[f64]) -> Result<NewtonMatrices> {
    if d_hat.len() != 4 * phi.len() {
        return Err(Error::Dimension(format!(
            "d̂ has {} entries for {} nodes",
            d_hat.len(),
            phi.len()
        )));
    }
    let mut nodes = Vec::with_capacity(phi.len());
    for (i, (blk, &phi_i)) in d_hat.chunks_exact(4).zip(phi).enumerate() {
        let (d1, d2, d4) = (blk[0], blk[1], blk[3]);
        if d4 < 0.0 || !d4.is_finite() {
            return Err(Error::SolverInput(format!(
                "node {i}: multiplier component of d̂ is {d4}, expected ≥ 0"
            )));
        }
        let (tangential, h1) = if d1 == 0.0 && d2 == 0.0 {
            (Tangential::Stick, [[1.0, 0.0], [0.0, 1.0]])
        } else {
            let nd = d1.hypot(d2);
            let s = phi_i / (nd * nd * nd);
            (
                Tangential::Slide,
                [[s * d2 * d2, -s * d1 * d2], [-s * d1 * d2, s * d1 * d1]],
            )
        };
        let normal = if d4 == 0.0 {
            Normal::NoContact
        } else {
            Normal::Contact
        };
        nodes.push(NodeBlocks {
            tangential,
            normal,
            h1,
        });
    }
    Ok(NewtonMatrices { nodes })
}

/// Which linear system the Newton step factorizes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum NewtonForm {
    /// `(A G + H) z₂ = (I − A) v̂` of size `4p`.
    #[default]
    Reduced,
    /// `D z = ŷ` of size `8p`.
    Full,
}

/// Factorization breakdown in a Newton step.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularSystem {
    /// Smallest `|U_ii|` relative to the largest, after equilibration.
    pub pivot_ratio: f64,
}

/// Power of two nearest to `1 / v` (1 for zero or non-finite `v`).
fn inverse_pow2(v: f64) -> f64 {
    if v > 0.0 && v.is_finite() {
        (-v.log2().round()).exp2()
    } else {
        1.0
    }
}

const REFINEMENT_STEPS: usize = 2;

/// Solves `m z = rhs` by LU on `R m C` with power-of-two row and column
/// scalings, so that pivots are compared on a balanced matrix.
fn lu_solve_checked(mut m: Mat<f64>, rhs: &[f64]) -> std::result::Result<Vec<f64>, SingularSystem> {
    use faer::linalg::solvers::Solve;

    let n = m.nrows();
    let row_scale: Vec<f64> = (0..n)
        .map(|i| inverse_pow2((0..n).fold(0.0f64, |acc, j| acc.max(m[(i, j)].abs()))))
        .collect();
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] *= row_scale[i];
        }
    }
    let col_scale: Vec<f64> = (0..n)
        .map(|j| inverse_pow2((0..n).fold(0.0f64, |acc, i| acc.max(m[(i, j)].abs()))))
        .collect();
    for j in 0..n {
        for i in 0..n {
            m[(i, j)] *= col_scale[j];
        }
    }

    let lu = m.partial_piv_lu();
    let u = lu.U();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for i in 0..n {
        let d = u[(i, i)].abs();
        lo = if d.is_finite() { lo.min(d) } else { 0.0 };
        hi = hi.max(d);
    }
    let pivot_ratio = if hi > 0.0 && hi.is_finite() { lo / hi } else { 0.0 };
    if pivot_ratio <= n as f64 * f64::EPSILON {
        return Err(SingularSystem { pivot_ratio });
    }
    let scaled_rhs: Vec<f64> = rhs.iter().zip(&row_scale).map(|(r, s)| r * s).collect();
    let mut z = Mat::<f64>::from_fn(n, 1, |i, _| scaled_rhs[i]);
    lu.solve_in_place(z.as_mut());
    let mut z: Vec<f64> = (0..n).map(|i| z[(i, 0)]).collect();
    for _ in 0..REFINEMENT_STEPS {
        let mz = matvec(m.as_ref(), &z);
        let mut r = Mat::<f64>::from_fn(n, 1, |i, _| scaled_rhs[i] - mz[i]);
        lu.solve_in_place(r.as_mut());
        for (zi, i) in z.iter_mut().zip(0..n) {
            *zi += r[(i, 0)];
        }
    }
    let z: Vec<f64> = z.iter().zip(&col_scale).map(|(z, s)| z * s).collect();
    if z.iter().all(|v| v.is_finite()) {
        Ok(z)
    } else {
        Err(SingularSystem { pivot_ratio })
    }
}

/// Next iterate `x̂ − z₁` from `D z = ŷ`.
pub fn newton_step(
    sys: &ReducedContactSystem,
    ar: &ApproxStepResult,
    nm: &NewtonMatrices,
    form: NewtonForm,
) -> std::result::Result<Vec<f64>, SingularSystem> {
    match form {
        NewtonForm::Reduced => newton_step_reduced(sys, ar, nm),
        NewtonForm::Full => newton_step_full(sys, ar, nm),
    }
}

fn newton_step_reduced(
    sys: &ReducedContactSystem,
    ar: &ApproxStepResult,
    nm: &NewtonMatrices,
) -> std::result::Result<Vec<f64>, SingularSystem> {
    let n = sys.dim();
    let g = nm.g_diag();
    let mut m = Mat::<f64>::from_fn(n, n, |i, j| sys.a[(i, j)] * g[j]);
    for (i, node) in nm.nodes.iter().enumerate() {
        let h = node.h_block();
        for r in 0..4 {
            for c in 0..4 {
                m[(4 * i + r, 4 * i + c)] += h[r][c];
            }
        }
    }
    // z₂ = w − v̂ keeps the right-hand side free of the large product A v̂
    // on components where G = I.
    let fixed: Vec<f64> = ar.v_hat.iter().zip(&g).map(|(v, gi)| (1.0 - gi) * v).collect();
    let a_fixed = matvec(sys.a.as_ref(), &fixed);
    let mut rhs: Vec<f64> = ar.v_hat.iter().zip(&a_fixed).map(|(v, a)| v - a).collect();
    for (i, node) in nm.nodes.iter().enumerate() {
        let h = node.h_block();
        for r in 0..4 {
            for c in 0..4 {
                rhs[4 * i + r] += h[r][c] * ar.v_hat[4 * i + c];
            }
        }
    }
    let w = lu_solve_checked(m, &rhs)?;
    Ok((0..n)
        .map(|i| if g[i] == 1.0 { ar.x_hat[i] + w[i] } else { ar.d_hat[i] })
        .collect())
}

fn newton_step_full(
    sys: &ReducedContactSystem,
    ar: &ApproxStepResult,
    nm: &NewtonMatrices,
) -> std::result::Result<Vec<f64>, SingularSystem> {
    let n = sys.dim();
    let h = nm.h_dense();
    let g = nm.g_diag();
    let d = Mat::<f64>::from_fn(2 * n, 2 * n, |i, j| match (i < n, j < n) {
        (true, true) => sys.a[(i, j)],
        (true, false) => -h[(i, j - n)],
        (false, true) => {
            if i - n == j {
                1.0
            } else {
                0.0
            }
        }
        (false, false) => {
            if i == j {
                g[i - n]
            } else {
                0.0
            }
        }
    });
    let (y1, y2) = ar.y_hat();
    let rhs: Vec<f64> = y1.into_iter().chain(y2).collect();
    let z = lu_solve_checked(d, &rhs)?;
    Ok(ar.x_hat.iter().zip(&z[..n]).map(|(x, z1)| x - z1).collect())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Stopping threshold on the Euclidean norm of `v̂`.
    pub eps: f64,
    pub max_iter: usize,
    pub newton_form: NewtonForm,
    /// Keep every iterate in the report.
    pub keep_iterates: bool,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            eps: 1e-6,
            max_iter: 100,
            newton_form: NewtonForm::Reduced,
            keep_iterates: false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum SolveStatus {
    Converged,
    MaxIter,
    SingularNewton {
        iteration: usize,
        branches: BranchCounts,
        pivot_ratio: f64,
    },
}

impl SolveStatus {
    pub fn label(&self) -> &'static str {
        match self {
            SolveStatus::Converged => "converged",
            SolveStatus::MaxIter => "max_iter",
            SolveStatus::SingularNewton { .. } => "singular_newton",
        }
    }
}

/// One approximation step (and the Newton step that followed it, if any).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iter: usize,
    pub norm_v: f64,
    pub branches: BranchCounts,
    pub time_ms: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    pub status: SolveStatus,
    /// Newton steps taken.
    pub iterations: usize,
    pub records: Vec<IterationRecord>,
    /// Last iterate; on convergence the one that passed the stopping test.
    pub x: Vec<f64>,
    /// `x⁽⁰⁾, x⁽¹⁾, …` when requested.
    pub iterates: Vec<Vec<f64>>,
}

impl SolveReport {
    pub fn converged(&self) -> bool {
        self.status == SolveStatus::Converged
    }
}

pub fn solve(sys: &ReducedContactSystem, x0: &[f64], opts: &SolverOptions) -> Result<SolveReport> {
    if !(opts.eps > 0.0 && opts.eps.is_finite()) {
        return Err(Error::SolverInput(format!("eps must be positive, got {}", opts.eps)));
    }
    if opts.max_iter == 0 {
        return Err(Error::SolverInput("max_iter must be at least 1".into()));
    }
    if x0.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "starting point has {} entries, system has {}",
            x0.len(),
            sys.dim()
        )));
    }
    if x0.iter().any(|v| !v.is_finite()) {
        return Err(Error::SolverInput("starting point must be finite".into()));
    }

    let mut x = x0.to_vec();
    let mut records = Vec::new();
    let mut iterates = Vec::new();
    if opts.keep_iterates {
        iterates.push(x.clone());
    }
    let mut status = SolveStatus::MaxIter;
    let mut iterations = 0;

    for k in 0..opts.max_iter {
        let start = Instant::now();
        let ar = approximation_step(&x, sys);
        let norm_v = ar.norm_v();
        let branches = branch_counts(&ar.d_hat);
        if norm_v <= opts.eps {
            records.push(IterationRecord {
                iter: k,
                norm_v,
                branches,
                time_ms: start.elapsed().as_secs_f64() * 1e3,
            });
            status = SolveStatus::Converged;
            break;
        }
        let nm = build_gh(&ar.d_hat, &sys.phi)?;
        let step = newton_step(sys, &ar, &nm, opts.newton_form);
        records.push(IterationRecord {
            iter: k,
            norm_v,
            branches,
            time_ms: start.elapsed().as_secs_f64() * 1e3,
        });
        match step {
            Ok(next) => {
                x = next;
                iterations += 1;
                if opts.keep_iterates {
                    iterates.push(x.clone());
                }
            }
            Err(SingularSystem { pivot_ratio }) => {
                status = SolveStatus::SingularNewton {
                    iteration: k,
                    branches,
                    pivot_ratio,
                };
                break;
            }
        }
    }

    Ok(SolveReport {
        status,
        iterations,
        records,
        x,
        iterates,
    })
}

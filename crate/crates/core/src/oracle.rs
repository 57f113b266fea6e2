//! Reference solver for the condensed contact problem and an a-posteriori
//! residual checker.
//!
//! The oracle minimizes the primal energy
//!
//! ```text
//! ½ uᵀ Ã u − b̃ᵀ u + Σᵢ φᵢ |u_τⁱ|   subject to   u_zⁱ + gᵢ ≥ 0
//! ```
//!
//! with an accelerated proximal-gradient method (adaptive restart). It
//! shares no code with the Newton solver.

use faer::MatRef;

use crate::error::{Error, Result};
use crate::linalg::{dot, matvec, norm2, norm_inf};
use crate::reduction::ReducedContactSystem;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleOptions {
    /// Stop once `L·|u − T(u)| ≤ tol·max(|b̃|, 1)`, `T` the proximal-gradient map.
    pub tol: f64,
    pub max_iter: usize,
    /// Problems with more contact nodes are refused.
    pub max_nodes: usize,
}

impl Default for OracleOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 1_000_000,
            max_nodes: 1000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OracleSolution {
    /// `3p` displacements.
    pub u: Vec<f64>,
    /// `λⁱ = (Ã u − b̃)₃ⁱ`.
    pub lambda: Vec<f64>,
    pub objective: f64,
    pub iterations: usize,
    /// Final scaled fixed-point residual.
    pub residual: f64,
}

impl OracleSolution {
    /// The `4p` vector `(u_τ, u_z, λ)` per node.
    pub fn lifted(&self) -> Vec<f64> {
        let p = self.lambda.len();
        let mut x = Vec::with_capacity(4 * p);
        for i in 0..p {
            x.extend_from_slice(&self.u[3 * i..3 * i + 3]);
            x.push(self.lambda[i]);
        }
        x
    }
}

/// `½ uᵀ Ã u − b̃ᵀ u + Σ φᵢ |u_τⁱ|` (constraint not included).
pub fn energy(a_tilde: MatRef<'_, f64>, b_tilde: &[f64], phi: &[f64], u: &[f64]) -> f64 {
    let au = matvec(a_tilde, u);
    let friction: f64 = phi
        .iter()
        .enumerate()
        .map(|(i, f)| f * u[3 * i].hypot(u[3 * i + 1]))
        .sum();
    0.5 * dot(u, &au) - dot(b_tilde, u) + friction
}

/// Gradient of the smooth part, `Ã u − b̃`.
pub fn smooth_gradient(a_tilde: MatRef<'_, f64>, b_tilde: &[f64], u: &[f64]) -> Vec<f64> {
    let mut g = matvec(a_tilde, u);
    for (gi, bi) in g.iter_mut().zip(b_tilde) {
        *gi -= bi;
    }
    g
}

fn largest_eigenvalue(a: MatRef<'_, f64>) -> f64 {
    let n = a.nrows();
    let mut v: Vec<f64> = (0..n).map(|i| 1.0 + (i as f64 * 0.618_033_988_7).fract()).collect();
    let mut est = 0.0;
    for _ in 0..1000 {
        let w = matvec(a, &v);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        let next = dot(&v, &w) / dot(&v, &v);
        v = w.into_iter().map(|x| x / nw).collect();
        if (next - est).abs() <= 1e-10 * next.abs() {
            est = next;
            break;
        }
        est = next;
    }
    est
}

/// Nodewise prox of `t·φ|u_τ|` followed by projection onto `u_z ≥ −g`.
fn prox_step(z: &[f64], t: f64, gap: &[f64], phi: &[f64], out: &mut [f64]) {
    for i in 0..gap.len() {
        let o = 3 * i;
        let n = z[o].hypot(z[o + 1]);
        let thr = t * phi[i];
        let k = if n > thr { 1.0 - thr / n } else { 0.0 };
        out[o] = k * z[o];
        out[o + 1] = k * z[o + 1];
        out[o + 2] = z[o + 2].max(-gap[i]);
    }
}

pub fn oracle_solve(
    a_tilde: MatRef<'_, f64>,
    b_tilde: &[f64],
    gap: &[f64],
    phi: &[f64],
    opts: &OracleOptions,
) -> Result<OracleSolution> {
    let n = b_tilde.len();
    let p = n / 3;
    if n % 3 != 0 || a_tilde.nrows() != n || a_tilde.ncols() != n || gap.len() != p || phi.len() != p {
        return Err(Error::Dimension(format!(
            "Ã {}x{}, b̃ {n}, gap {}, phi {}",
            a_tilde.nrows(),
            a_tilde.ncols(),
            gap.len(),
            phi.len()
        )));
    }
    if p > opts.max_nodes {
        return Err(Error::OracleRefused(format!(
            "{p} contact nodes exceed the limit of {}",
            opts.max_nodes
        )));
    }

    // Power iteration underestimates slightly; pad the Lipschitz constant.
    let lip = 1.01 * largest_eigenvalue(a_tilde);
    if !(lip > 0.0) {
        return Err(Error::SolverInput("Ã must be positive definite".into()));
    }
    let step = 1.0 / lip;
    let target = opts.tol * norm2(b_tilde).max(1.0);

    let mut u = vec![0.0; n];
    prox_step(&vec![0.0; n], step, gap, phi, &mut u);
    let mut y = u.clone();
    let mut t = 1.0f64;
    let mut next = vec![0.0; n];
    let mut z = vec![0.0; n];
    let mut residual = f64::INFINITY;

    for it in 0..opts.max_iter {
        let grad = smooth_gradient(a_tilde, b_tilde, &y);
        for k in 0..n {
            z[k] = y[k] - step * grad[k];
        }
        prox_step(&z, step, gap, phi, &mut next);

        // gradient-based restart
        let restart = (0..n).map(|k| (y[k] - next[k]) * (next[k] - u[k])).sum::<f64>() > 0.0;
        let t_next = if restart { 1.0 } else { 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt()) };
        let beta = if restart { 0.0 } else { (t - 1.0) / t_next };
        for k in 0..n {
            y[k] = next[k] + beta * (next[k] - u[k]);
        }
        std::mem::swap(&mut u, &mut next);
        t = t_next;

        if it % 10 == 9 || it + 1 == opts.max_iter {
            let g = smooth_gradient(a_tilde, b_tilde, &u);
            for k in 0..n {
                z[k] = u[k] - step * g[k];
            }
            prox_step(&z, step, gap, phi, &mut next);
            residual = lip * (0..n).map(|k| (u[k] - next[k]).powi(2)).sum::<f64>().sqrt();
            if residual <= target {
                let lambda = (0..p).map(|i| g[3 * i + 2]).collect();
                return Ok(OracleSolution {
                    objective: energy(a_tilde, b_tilde, phi, &u),
                    u,
                    lambda,
                    iterations: it + 1,
                    residual: residual / norm2(b_tilde).max(1.0),
                });
            }
        }
    }
    Err(Error::OracleBudget {
        iterations: opts.max_iter,
        residual: residual / norm2(b_tilde).max(1.0),
        tol: opts.tol,
    })
}

/// Largest violation of each optimality condition at `x`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    /// `max(|f₁₂ⁱ| − φᵢ, 0)`
    pub friction_bound: f64,
    /// `|f₁₂ⁱ + φᵢ x₁₂ⁱ/|x₁₂ⁱ||` over slipping nodes.
    pub slip_alignment: f64,
    /// `|f₃ⁱ|`
    pub normal_equilibrium: f64,
    /// `max(−λⁱ, −(u_zⁱ + gᵢ), 0)`
    pub feasibility: f64,
    /// `|λⁱ (u_zⁱ + gᵢ)|`
    pub complementarity: f64,
    pub tol: f64,
    /// `|b|_∞`, the force scale used for the complementarity threshold.
    pub scale: f64,
}

/// Slip magnitudes at or below this are treated as sticking.
pub const SLIP_THRESHOLD: f64 = 1e-8;

impl ResidualReport {
    pub fn friction_ok(&self) -> bool {
        self.friction_bound <= self.tol
    }

    pub fn slip_ok(&self) -> bool {
        self.slip_alignment <= self.tol
    }

    pub fn equilibrium_ok(&self) -> bool {
        self.normal_equilibrium <= self.tol
    }

    pub fn feasibility_ok(&self) -> bool {
        self.feasibility <= self.tol
    }

    /// Product of a force and a length, so the threshold carries one extra
    /// factor of the force scale.
    pub fn complementarity_ok(&self) -> bool {
        self.complementarity <= self.tol * self.scale.max(1.0)
    }

    pub fn passes(&self) -> bool {
        self.friction_ok()
            && self.slip_ok()
            && self.equilibrium_ok()
            && self.feasibility_ok()
            && self.complementarity_ok()
    }
}

pub fn residual_check(sys: &ReducedContactSystem, x: &[f64], tol: f64) -> Result<ResidualReport> {
    if x.len() != sys.dim() {
        return Err(Error::Dimension(format!(
            "x has {} entries, system has {}",
            x.len(),
            sys.dim()
        )));
    }
    let f = sys.residual(x);
    let mut r = ResidualReport {
        friction_bound: 0.0,
        slip_alignment: 0.0,
        normal_equilibrium: 0.0,
        feasibility: 0.0,
        complementarity: 0.0,
        tol,
        scale: norm_inf(&sys.b),
    };
    for i in 0..sys.node_count() {
        let o = 4 * i;
        let phi = sys.phi[i];
        let ft = f[o].hypot(f[o + 1]);
        r.friction_bound = r.friction_bound.max(ft - phi);
        let slip = x[o].hypot(x[o + 1]);
        if slip > SLIP_THRESHOLD {
            let e0 = f[o] + phi * x[o] / slip;
            let e1 = f[o + 1] + phi * x[o + 1] / slip;
            r.slip_alignment = r.slip_alignment.max(e0.hypot(e1));
        }
        r.normal_equilibrium = r.normal_equilibrium.max(f[o + 2].abs());
        let lambda = x[o + 3];
        let opening = f[o + 3];
        let violation = (-lambda).max(-opening);
        if violation > r.feasibility {
            r.feasibility = violation;
        }
        r.complementarity = r.complementarity.max((lambda * opening).abs());
    }
    Ok(r)
}

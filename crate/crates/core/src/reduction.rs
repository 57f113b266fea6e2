//! Static condensation onto the contact DOFs and the 4×4 block expansion
//! that adds one non-penetration multiplier per contact node.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::{Mat, MatRef, Side};

use crate::error::{Error, Result};
use crate::fem::GlobalSystem;
use crate::linalg::{csc_from_columns, SparseMatrix};

/// Number of contact columns pushed through the interior factor at once.
const SCHUR_BLOCK: usize = 64;

/// `Ã = K_CC − K_CI K_II⁻¹ K_IC`, `b̃ = l_C − K_CI K_II⁻¹ l_I`, plus what is
/// needed to recover the interior displacements afterwards.
pub struct CondensedBoundarySystem {
    pub a_tilde: Mat<f64>,
    pub b_tilde: Vec<f64>,
    /// Free-DOF indices of the eliminated block, ascending.
    pub interior_dofs: Vec<usize>,
    /// Free-DOF indices of the retained block, in caller order.
    pub contact_dofs: Vec<usize>,
    interior_factor: Llt<usize, f64>,
    k_ic: SparseMatrix,
    l_i: Vec<f64>,
    /// `K_II⁻¹ l_I`
    interior_particular: Vec<f64>,
}

impl std::fmt::Debug for CondensedBoundarySystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CondensedBoundarySystem")
            .field("contact_dofs", &self.contact_dofs.len())
            .field("interior_dofs", &self.interior_dofs.len())
            .finish_non_exhaustive()
    }
}

#[derive(Clone, Copy)]
enum Slot {
    Interior(usize),
    Contact(usize),
}

pub fn schur_reduce(sys: &GlobalSystem, contact_dofs: &[usize]) -> Result<CondensedBoundarySystem> {
    let n = sys.free_dof_count();
    if contact_dofs.is_empty() || contact_dofs.len() >= n {
        return Err(Error::Partition(format!(
            "{} retained DOFs out of {n}; need a nonempty proper subset",
            contact_dofs.len()
        )));
    }
    let mut slot: Vec<Option<Slot>> = vec![None; n];
    for (c, &d) in contact_dofs.iter().enumerate() {
        match slot.get(d) {
            None => return Err(Error::Partition(format!("DOF {d} out of range 0..{n}"))),
            Some(Some(_)) => return Err(Error::Partition(format!("DOF {d} listed twice"))),
            Some(None) => slot[d] = Some(Slot::Contact(c)),
        }
    }
    let mut interior_dofs = Vec::with_capacity(n - contact_dofs.len());
    for (d, s) in slot.iter_mut().enumerate() {
        if s.is_none() {
            *s = Some(Slot::Interior(interior_dofs.len()));
            interior_dofs.push(d);
        }
    }
    let slot: Vec<Slot> = slot.into_iter().map(|s| s.expect("every DOF classified")).collect();

    let n_i = interior_dofs.len();
    let n_c = contact_dofs.len();
    let k = sys.stiffness.as_ref();
    let mut k_ii_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_i];
    let mut k_ic_cols: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n_c];
    let mut k_cc = Mat::<f64>::zeros(n_c, n_c);
    for j in 0..n {
        let rows = k.row_idx_of_col_raw(j).iter().zip(k.val_of_col(j));
        match slot[j] {
            Slot::Interior(jj) => {
                for (&i, &v) in rows {
                    if let Slot::Interior(ii) = slot[i] {
                        k_ii_cols[jj].push((ii, v));
                    }
                }
            }
            Slot::Contact(cj) => {
                for (&i, &v) in rows {
                    match slot[i] {
                        Slot::Interior(ii) => k_ic_cols[cj].push((ii, v)),
                        Slot::Contact(ci) => k_cc[(ci, cj)] += v,
                    }
                }
            }
        }
    }
    let k_ii = csc_from_columns(n_i, k_ii_cols);
    let k_ic = csc_from_columns(n_i, k_ic_cols);

    let interior_factor = k_ii
        .sp_cholesky(Side::Lower)
        .map_err(|e| Error::Cholesky(format!("{e:?}")))?;

    let l_i: Vec<f64> = interior_dofs.iter().map(|&d| sys.load[d]).collect();
    let l_c: Vec<f64> = contact_dofs.iter().map(|&d| sys.load[d]).collect();

    let mut y = Mat::<f64>::from_fn(n_i, 1, |i, _| l_i[i]);
    interior_factor.solve_in_place(y.as_mut());
    let interior_particular: Vec<f64> = (0..n_i).map(|i| y[(i, 0)]).collect();
    let kic = k_ic.as_ref();
    let b_tilde: Vec<f64> = (0..n_c)
        .map(|r| {
            let coupling: f64 = kic
                .row_idx_of_col_raw(r)
                .iter()
                .zip(kic.val_of_col(r))
                .map(|(&i, &v)| v * interior_particular[i])
                .sum();
            l_c[r] - coupling
        })
        .collect();

    let mut a_tilde = k_cc;
    let mut start = 0;
    while start < n_c {
        let width = SCHUR_BLOCK.min(n_c - start);
        let mut x = Mat::<f64>::zeros(n_i, width);
        for c in 0..width {
            for (&i, &v) in kic.row_idx_of_col_raw(start + c).iter().zip(kic.val_of_col(start + c)) {
                x[(i, c)] = v;
            }
        }
        interior_factor.solve_in_place(x.as_mut());
        for r in 0..n_c {
            let idx = kic.row_idx_of_col_raw(r);
            let vals = kic.val_of_col(r);
            for c in 0..width {
                let s: f64 = idx.iter().zip(vals).map(|(&i, &v)| v * x[(i, c)]).sum();
                a_tilde[(r, start + c)] -= s;
            }
        }
        start += width;
    }
    for j in 0..n_c {
        for i in 0..j {
            let m = 0.5 * (a_tilde[(i, j)] + a_tilde[(j, i)]);
            a_tilde[(i, j)] = m;
            a_tilde[(j, i)] = m;
        }
    }

    Ok(CondensedBoundarySystem {
        a_tilde,
        b_tilde,
        interior_dofs,
        contact_dofs: contact_dofs.to_vec(),
        interior_factor,
        k_ic,
        l_i,
        interior_particular,
    })
}

impl CondensedBoundarySystem {
    pub fn contact_dof_count(&self) -> usize {
        self.contact_dofs.len()
    }

    /// `u_I = K_II⁻¹ (l_I − K_IC u_C)`.
    pub fn recover_interior(&self, u_c: &[f64]) -> Result<Vec<f64>> {
        if u_c.len() != self.contact_dofs.len() {
            return Err(Error::Dimension(format!(
                "expected {} contact values, got {}",
                self.contact_dofs.len(),
                u_c.len()
            )));
        }
        let kic = self.k_ic.as_ref();
        let mut rhs = Mat::<f64>::from_fn(self.l_i.len(), 1, |i, _| self.l_i[i]);
        for (c, &uc) in u_c.iter().enumerate() {
            for (&i, &v) in kic.row_idx_of_col_raw(c).iter().zip(kic.val_of_col(c)) {
                rhs[(i, 0)] -= v * uc;
            }
        }
        self.interior_factor.solve_in_place(rhs.as_mut());
        Ok((0..self.l_i.len()).map(|i| rhs[(i, 0)]).collect())
    }

    /// Free-DOF vector with `u_C` and the recovered interior values in place.
    pub fn free_solution(&self, u_c: &[f64]) -> Result<Vec<f64>> {
        let u_i = self.recover_interior(u_c)?;
        let mut u = vec![0.0; self.interior_dofs.len() + self.contact_dofs.len()];
        for (&d, &v) in self.interior_dofs.iter().zip(&u_i) {
            u[d] = v;
        }
        for (&d, &v) in self.contact_dofs.iter().zip(u_c) {
            u[d] = v;
        }
        Ok(u)
    }

    /// `−½ l_Iᵀ K_II⁻¹ l_I`: the energy offset between the full and the
    /// condensed quadratic forms.
    pub fn energy_offset(&self) -> f64 {
        -0.5 * self
            .l_i
            .iter()
            .zip(&self.interior_particular)
            .map(|(a, b)| a * b)
            .sum::<f64>()
    }

    pub fn expand(&self, gap: &[f64], phi: f64) -> Result<ReducedContactSystem> {
        let p = self.contact_dofs.len() / 3;
        expand_blocks(self.a_tilde.as_ref(), &self.b_tilde, gap, &vec![phi; p])
    }
}

/// The generalized equation `0 ∈ A x − b + Q(x)` on `x = (x¹, …, xᵖ)` with
/// node blocks `xⁱ = (u_τ ∈ R², u_ν, λ)`.
#[derive(Debug, Clone)]
pub struct ReducedContactSystem {
    pub a: Mat<f64>,
    pub b: Vec<f64>,
    /// Tresca slip bound per node.
    pub phi: Vec<f64>,
    /// Initial normal gap per node; `b[4i + 3] = −gap[i]`.
    pub gap: Vec<f64>,
}

impl ReducedContactSystem {
    /// Builds a system from raw data; the gap is read off `b`.
    pub fn new(a: Mat<f64>, b: Vec<f64>, phi: Vec<f64>) -> Result<Self> {
        let n = b.len();
        if n == 0 || n % 4 != 0 || a.nrows() != n || a.ncols() != n || phi.len() != n / 4 {
            return Err(Error::Dimension(format!(
                "A is {}x{}, b has {n} entries, phi has {}",
                a.nrows(),
                a.ncols(),
                phi.len()
            )));
        }
        if phi.iter().any(|&f| !(f >= 0.0 && f.is_finite())) {
            return Err(Error::SolverInput("friction bounds must be finite and nonnegative".into()));
        }
        let gap = (0..n / 4).map(|i| -b[4 * i + 3]).collect();
        Ok(Self { a, b, phi, gap })
    }

    pub fn node_count(&self) -> usize {
        self.phi.len()
    }

    pub fn dim(&self) -> usize {
        self.b.len()
    }

    /// `f(x) = A x − b`.
    pub fn residual(&self, x: &[f64]) -> Vec<f64> {
        let mut f = crate::linalg::matvec(self.a.as_ref(), x);
        for (fi, bi) in f.iter_mut().zip(&self.b) {
            *fi -= bi;
        }
        f
    }
}

pub fn expand_blocks(
    a_tilde: MatRef<'_, f64>,
    b_tilde: &[f64],
    gap: &[f64],
    phi: &[f64],
) -> Result<ReducedContactSystem> {
    let n3 = b_tilde.len();
    if n3 % 3 != 0 || a_tilde.nrows() != n3 || a_tilde.ncols() != n3 {
        return Err(Error::Dimension(format!(
            "Ã is {}x{} with b̃ of length {n3}",
            a_tilde.nrows(),
            a_tilde.ncols()
        )));
    }
    let p = n3 / 3;
    if gap.len() != p || phi.len() != p {
        return Err(Error::Dimension(format!(
            "{p} contact nodes but {} gaps and {} friction bounds",
            gap.len(),
            phi.len()
        )));
    }
    if gap.iter().any(|&g| !(g >= 0.0 && g.is_finite())) {
        return Err(Error::SolverInput("gaps must be finite and nonnegative".into()));
    }
    if phi.iter().any(|&f| !(f >= 0.0 && f.is_finite())) {
        return Err(Error::SolverInput("friction bounds must be finite and nonnegative".into()));
    }

    let n = 4 * p;
    let mut a = Mat::<f64>::zeros(n, n);
    for jn in 0..p {
        for jc in 0..3 {
            for inode in 0..p {
                for ic in 0..3 {
                    a[(4 * inode + ic, 4 * jn + jc)] = a_tilde[(3 * inode + ic, 3 * jn + jc)];
                }
            }
        }
        a[(4 * jn + 2, 4 * jn + 3)] = -1.0;
        a[(4 * jn + 3, 4 * jn + 2)] = 1.0;
    }
    let mut b = vec![0.0; n];
    for i in 0..p {
        b[4 * i..4 * i + 3].copy_from_slice(&b_tilde[3 * i..3 * i + 3]);
        b[4 * i + 3] = -gap[i];
    }
    Ok(ReducedContactSystem {
        a,
        b,
        phi: phi.to_vec(),
        gap: gap.to_vec(),
    })
}

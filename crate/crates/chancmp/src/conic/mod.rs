//! Standard-form conic programs and a dense primal-dual interior-point
//! solver for them.
//!
//! A problem is
//!
//! ```text
//!   min / max  cᵀx   s.t.  A x = b,   x ∈ K = K₁ × ... × K_r
//! ```
//!
//! where every block `K_i` is the cone of real symmetric PSD `n x n`
//! matrices, the nonnegative orthant `R^n_+`, or free `R^n`. PSD blocks are
//! stored packed: the upper triangle, row by row, with off-diagonal entries
//! scaled by √2 so that `⟨X, Y⟩ = Tr[XY]` is the plain dot product. Use
//! [`ConicProblem::psd_var`] to address an entry.
//!
//! The dual, for a minimization, is `max bᵀy s.t. c − Aᵀy = s ∈ K*`. For a
//! maximization the returned `y` satisfies `Aᵀy − c = s ∈ K*`, so in both
//! cases `bᵀy` bounds the optimum from the other side.
//!
//! The solver follows the homogeneous self-dual embedding with
//! Nesterov-Todd scaling and Mehrotra's predictor-corrector. The Schur
//! complement is formed densely and factored once per iteration.
//!
//! ```
//! use chancmp::conic::{solve, Cone, ConicProblem, Sense, Status};
//!
//! // min x0 + 2 x1 over the probability simplex
//! let mut p = ConicProblem::new(Sense::Minimize, vec![Cone::Nonneg(2)]);
//! p.set_objective(0, 1.0);
//! p.set_objective(1, 2.0);
//! p.add_row(vec![(0, 1.0), (1, 1.0)], 1.0);
//! let sol = solve(&p, 1e-8);
//! assert_eq!(sol.status, Status::Optimal);
//! assert!((sol.primal_value - 1.0).abs() < 1e-7);
//! ```

mod dense;
mod dump;
mod ipm;
pub mod model;
mod presolve;

pub use dump::{read_dump, write_dump};

use crate::error::{Error, Result};
use crate::linalg::CMatrix;

pub(crate) use dense::{smat, svec_index, svec_len};

/// One block of the cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Cone {
    /// Real symmetric `n x n` matrices, PSD. Takes `n(n+1)/2` variables.
    Psd(usize),
    Nonneg(usize),
    Free(usize),
}

impl Cone {
    /// Number of scalar variables in the block.
    pub fn len(&self) -> usize {
        match *self {
            Cone::Psd(n) => svec_len(n),
            Cone::Nonneg(n) | Cone::Free(n) => n,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Contribution to the barrier degree.
    fn degree(&self) -> usize {
        match *self {
            Cone::Psd(n) | Cone::Nonneg(n) => n,
            Cone::Free(_) => 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sense {
    Minimize,
    Maximize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum Status {
    Optimal,
    /// No feasible point; `y` holds a Farkas certificate.
    Infeasible,
    /// Objective unbounded; `x` holds a recession direction.
    Unbounded,
    /// Iteration cap reached or the iteration broke down. The last iterate
    /// is returned as is.
    NumericalFailure,
}

impl std::fmt::Display for Status {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            Status::Optimal => "optimal",
            Status::Infeasible => "infeasible",
            Status::Unbounded => "unbounded",
            Status::NumericalFailure => "numerical failure",
        };
        f.write_str(s)
    }
}

/// A conic program in standard form. Constraint rows are sparse.
#[derive(Clone, Debug)]
pub struct ConicProblem {
    sense: Sense,
    cones: Vec<Cone>,
    offsets: Vec<usize>,
    c: Vec<f64>,
    rows: Vec<Vec<(usize, f64)>>,
    b: Vec<f64>,
}

impl ConicProblem {
    pub fn new(sense: Sense, cones: Vec<Cone>) -> ConicProblem {
        let mut offsets = Vec::with_capacity(cones.len());
        let mut n = 0;
        for k in &cones {
            offsets.push(n);
            n += k.len();
        }
        ConicProblem { sense, cones, offsets, c: vec![0.0; n], rows: Vec::new(), b: Vec::new() }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn cones(&self) -> &[Cone] {
        &self.cones
    }

    /// Index of the first variable of block `k`.
    pub fn offset(&self, k: usize) -> usize {
        self.offsets[k]
    }

    pub fn num_vars(&self) -> usize {
        self.c.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn objective(&self) -> &[f64] {
        &self.c
    }

    pub fn rhs(&self) -> &[f64] {
        &self.b
    }

    pub fn rows(&self) -> &[Vec<(usize, f64)>] {
        &self.rows
    }

    /// Variable index of entry `(i, j)` of PSD block `k` (either order).
    pub fn psd_var(&self, k: usize, i: usize, j: usize) -> usize {
        let Cone::Psd(n) = self.cones[k] else { panic!("block {k} is not a PSD block") };
        let (i, j) = if i <= j { (i, j) } else { (j, i) };
        assert!(j < n, "entry ({i},{j}) outside a {n}x{n} block");
        self.offsets[k] + svec_index(n, i, j)
    }

    /// Coefficient that makes `coef · x[psd_var(k,i,j)]` equal `w·X_ij + w·X_ji`
    /// for `i != j` (or `w·X_ii` on the diagonal). Handy when a constraint
    /// reads a matrix entry.
    pub fn psd_coef(i: usize, j: usize, w: f64) -> f64 {
        if i == j {
            w
        } else {
            w * std::f64::consts::SQRT_2
        }
    }

    pub fn set_objective(&mut self, var: usize, value: f64) {
        self.c[var] = value;
    }

    pub fn add_objective(&mut self, var: usize, value: f64) {
        self.c[var] += value;
    }

    /// Appends the row `Σ coef·x[var] = rhs`; repeated variables are summed.
    /// Returns the row index.
    pub fn add_row(&mut self, entries: Vec<(usize, f64)>, rhs: f64) -> usize {
        let n = self.num_vars();
        let mut e = entries;
        e.sort_by_key(|t| t.0);
        let mut merged: Vec<(usize, f64)> = Vec::with_capacity(e.len());
        for (j, v) in e {
            assert!(j < n, "variable {j} out of range");
            match merged.last_mut() {
                Some(last) if last.0 == j => last.1 += v,
                _ => merged.push((j, v)),
            }
        }
        merged.retain(|t| t.1 != 0.0);
        self.rows.push(merged);
        self.b.push(rhs);
        self.rows.len() - 1
    }

    /// Dense copy of PSD block `k` of a packed vector (e.g. `x` or `s`).
    pub fn psd_block(&self, k: usize, v: &[f64]) -> Vec<f64> {
        let Cone::Psd(n) = self.cones[k] else { panic!("block {k} is not a PSD block") };
        smat(&v[self.offsets[k]..self.offsets[k] + svec_len(n)], n)
    }

    /// Independent residuals of a candidate primal-dual pair, in the units
    /// used by [`ConicSolution::residuals`].
    pub fn residuals(&self, x: &[f64], y: &[f64], s: &[f64]) -> Residuals {
        let sign = match self.sense {
            Sense::Minimize => 1.0,
            Sense::Maximize => -1.0,
        };
        let mut rp = 0.0f64;
        for (row, bi) in self.rows.iter().zip(&self.b) {
            let ax: f64 = row.iter().map(|&(j, v)| v * x[j]).sum();
            rp = rp.max((ax - bi).abs());
        }
        // min: c - Aᵀy - s = 0, max: Aᵀy - c - s = 0
        let mut r = self.c.iter().map(|c| sign * c).collect::<Vec<_>>();
        for (row, yi) in self.rows.iter().zip(y) {
            for &(j, v) in row {
                r[j] -= sign * v * yi;
            }
        }
        let rd = r.iter().zip(s).fold(0.0f64, |m, (ri, si)| m.max((ri - si).abs()));
        let pv = dense::dot(&self.c, x);
        let dv = dense::dot(&self.b, y);
        Residuals {
            primal: rp / (1.0 + dense::norm_inf(&self.b)),
            dual: rd / (1.0 + dense::norm_inf(&self.c)),
            gap: (pv - dv).abs() / (1.0 + pv.abs()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Residuals {
    /// `‖Ax − b‖∞ / (1 + ‖b‖∞)`
    pub primal: f64,
    /// `‖c − Aᵀy − s‖∞ / (1 + ‖c‖∞)` (signs flipped for maximization)
    pub dual: f64,
    /// `|cᵀx − bᵀy| / (1 + |cᵀx|)`
    pub gap: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual).max(self.gap)
    }
}

#[derive(Clone, Debug)]
pub struct ConicSolution {
    pub status: Status,
    /// `cᵀx`
    pub primal_value: f64,
    /// `bᵀy`
    pub dual_value: f64,
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub s: Vec<f64>,
    pub residuals: Residuals,
    pub iterations: usize,
}

impl ConicSolution {
    /// Midpoint of the primal and dual values.
    pub fn value(&self) -> f64 {
        0.5 * (self.primal_value + self.dual_value)
    }

    /// `Ok(self)` if optimal, otherwise a solver error.
    pub fn optimal(self) -> Result<ConicSolution> {
        if self.status == Status::Optimal {
            Ok(self)
        } else {
            Err(Error::Solver { status: self.status, iterations: self.iterations })
        }
    }
}

#[derive(Clone, Debug)]
pub struct SolverOptions {
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions { tol: 1e-7, max_iter: 200 }
    }
}

/// Solves `p` to relative accuracy `tol` (clamped to `[1e-10, 1e-4]`).
pub fn solve(p: &ConicProblem, tol: f64) -> ConicSolution {
    solve_with(p, &SolverOptions { tol, ..SolverOptions::default() })
}

pub fn solve_with(p: &ConicProblem, opts: &SolverOptions) -> ConicSolution {
    let tol = opts.tol.clamp(1e-10, 1e-4);
    ipm::solve(p, tol, opts.max_iter)
}

/// Real `2n x 2n` symmetric matrix `[[Re h, −Im h], [Im h, Re h]]`, row-major.
/// Its spectrum is that of `h` with every eigenvalue doubled.
pub fn embed_hermitian(h: &CMatrix) -> Result<Vec<f64>> {
    if !h.is_square() {
        return Err(Error::Dimension(format!("{}x{} is not square", h.rows(), h.cols())));
    }
    let defect = h.hermiticity_defect();
    if defect > 1e-10 * h.max_abs().max(1.0) {
        return Err(Error::NotHermitian(defect));
    }
    let n = h.rows();
    let m = 2 * n;
    let mut out = vec![0.0; m * m];
    for p in 0..n {
        for q in 0..n {
            let z = h[(p, q)];
            out[p * m + q] = z.re;
            out[(n + p) * m + n + q] = z.re;
            out[p * m + n + q] = -z.im;
            out[(n + p) * m + q] = z.im;
        }
    }
    Ok(out)
}

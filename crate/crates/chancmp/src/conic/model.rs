//! Building conic programs over complex Hermitian matrices.
//!
//! A Hermitian `n x n` variable is backed by a real PSD block of size `2n`
//! holding `Y ≈ [[Re X, −Im X], [Im X, Re X]]`. Expressions are affine in
//! the scalar variables of the underlying [`ConicProblem`]: [`Lin`] for
//! real ones, [`CLin`] for complex ones and [`HExpr`] for matrices of the
//! latter. Tensor bookkeeping (partial traces, permutations, link products
//! with constant matrices) works on expressions exactly as on matrices.
//!
//! ```
//! use chancmp::conic::model::Model;
//! use chancmp::CMatrix;
//!
//! // λ_max of a Hermitian matrix: max Tr[HX] s.t. Tr X = 1, X ⪰ 0
//! let h = CMatrix::from_real(2, 2, &[1.0, 1.0, 1.0, -1.0]).unwrap();
//! let mut m = Model::new();
//! let x = m.herm_psd(2);
//! m.eq(x.trace(), 1.0);
//! m.maximize(x.inner(&h));
//! let sol = m.solve(1e-8).unwrap();
//! assert!((sol.value() - 2f64.sqrt()).abs() < 1e-6);
//! ```

use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use super::{solve, Cone, ConicProblem, ConicSolution, Sense};
use crate::error::Result;
use crate::linalg::{link_array, partial_trace_array, partial_transpose_array, permute_array};
use crate::linalg::{CMatrix, SystemDims, C64, ZERO};

const FRAC_1_SQRT_2: f64 = std::f64::consts::FRAC_1_SQRT_2;

/// Real affine expression `Σ a_k x_k + a₀`.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Lin {
    terms: Vec<(usize, f64)>,
    constant: f64,
}

impl Lin {
    pub fn zero() -> Lin {
        Lin::default()
    }

    pub fn constant(c: f64) -> Lin {
        Lin { terms: Vec::new(), constant: c }
    }

    pub fn var(index: usize) -> Lin {
        Lin { terms: vec![(index, 1.0)], constant: 0.0 }
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms
    }

    pub fn constant_term(&self) -> f64 {
        self.constant
    }

    pub fn add_scaled(&mut self, other: &Lin, s: f64) {
        self.terms.extend(other.terms.iter().map(|&(j, v)| (j, v * s)));
        self.constant += other.constant * s;
    }

    /// Merges repeated variables and drops zero coefficients.
    pub fn compact(&mut self) {
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, f64)> = Vec::with_capacity(self.terms.len());
        for &(j, v) in &self.terms {
            match out.last_mut() {
                Some(l) if l.0 == j => l.1 += v,
                _ => out.push((j, v)),
            }
        }
        out.retain(|t| t.1.abs() > 1e-15);
        self.terms = out;
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        self.constant + self.terms.iter().map(|&(j, v)| v * x[j]).sum::<f64>()
    }
}

impl AddAssign<&Lin> for Lin {
    fn add_assign(&mut self, rhs: &Lin) {
        self.add_scaled(rhs, 1.0);
    }
}

impl Add for Lin {
    type Output = Lin;
    fn add(mut self, rhs: Lin) -> Lin {
        self.add_scaled(&rhs, 1.0);
        self
    }
}

impl Sub for Lin {
    type Output = Lin;
    fn sub(mut self, rhs: Lin) -> Lin {
        self.add_scaled(&rhs, -1.0);
        self
    }
}

impl Mul<f64> for Lin {
    type Output = Lin;
    fn mul(mut self, s: f64) -> Lin {
        self.terms.iter_mut().for_each(|t| t.1 *= s);
        self.constant *= s;
        self
    }
}

impl Neg for Lin {
    type Output = Lin;
    fn neg(self) -> Lin {
        self * -1.0
    }
}

impl Add<f64> for Lin {
    type Output = Lin;
    fn add(mut self, c: f64) -> Lin {
        self.constant += c;
        self
    }
}

/// Complex affine expression in the (real) scalar variables.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct CLin {
    terms: Vec<(usize, C64)>,
    constant: C64,
}

impl CLin {
    pub fn zero() -> CLin {
        CLin::default()
    }

    pub fn constant(c: C64) -> CLin {
        CLin { terms: Vec::new(), constant: c }
    }

    pub fn var(index: usize, coef: C64) -> CLin {
        CLin { terms: vec![(index, coef)], constant: ZERO }
    }

    pub fn add_scaled(&mut self, other: &CLin, s: C64) {
        self.terms.extend(other.terms.iter().map(|&(j, v)| (j, v * s)));
        self.constant += other.constant * s;
    }

    pub fn compact(&mut self) {
        self.terms.sort_by_key(|t| t.0);
        let mut out: Vec<(usize, C64)> = Vec::with_capacity(self.terms.len());
        for &(j, v) in &self.terms {
            match out.last_mut() {
                Some(l) if l.0 == j => l.1 += v,
                _ => out.push((j, v)),
            }
        }
        out.retain(|t| t.1.norm() > 1e-15);
        self.terms = out;
    }

    pub fn conj(&self) -> CLin {
        CLin {
            terms: self.terms.iter().map(|&(j, v)| (j, v.conj())).collect(),
            constant: self.constant.conj(),
        }
    }

    pub fn re(&self) -> Lin {
        Lin { terms: self.terms.iter().map(|&(j, v)| (j, v.re)).collect(), constant: self.constant.re }
    }

    pub fn im(&self) -> Lin {
        Lin { terms: self.terms.iter().map(|&(j, v)| (j, v.im)).collect(), constant: self.constant.im }
    }

    pub fn eval(&self, x: &[f64]) -> C64 {
        self.constant + self.terms.iter().map(|&(j, v)| v * x[j]).sum::<C64>()
    }

    fn is_empty(&self) -> bool {
        self.terms.is_empty() && self.constant == ZERO
    }
}

impl AddAssign<&CLin> for CLin {
    fn add_assign(&mut self, rhs: &CLin) {
        self.terms.extend_from_slice(&rhs.terms);
        self.constant += rhs.constant;
    }
}

/// Square matrix of complex affine expressions, row-major. Hermitian in
/// every use inside the crate, though nothing here enforces it.
#[derive(Clone, Debug, PartialEq)]
pub struct HExpr {
    n: usize,
    data: Vec<CLin>,
}

impl HExpr {
    pub fn zeros(n: usize) -> HExpr {
        HExpr { n, data: vec![CLin::zero(); n * n] }
    }

    pub fn constant(m: &CMatrix) -> HExpr {
        assert!(m.is_square());
        HExpr { n: m.rows(), data: m.data().iter().map(|&z| CLin::constant(z)).collect() }
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn entry(&self, i: usize, j: usize) -> &CLin {
        &self.data[i * self.n + j]
    }

    fn zip(&self, other: &HExpr, s: f64) -> HExpr {
        assert_eq!(self.n, other.n, "expression sizes differ");
        let mut out = self.clone();
        for (a, b) in out.data.iter_mut().zip(&other.data) {
            a.add_scaled(b, C64::new(s, 0.0));
            a.compact();
        }
        out
    }

    pub fn add(&self, other: &HExpr) -> HExpr {
        self.zip(other, 1.0)
    }

    pub fn sub(&self, other: &HExpr) -> HExpr {
        self.zip(other, -1.0)
    }

    pub fn add_const(&self, m: &CMatrix) -> HExpr {
        self.add(&HExpr::constant(m))
    }

    pub fn scale(&self, s: f64) -> HExpr {
        let mut out = self.clone();
        for e in &mut out.data {
            let z = e.clone();
            *e = CLin::zero();
            e.add_scaled(&z, C64::new(s, 0.0));
        }
        out
    }

    /// `s·I` added to the expression.
    pub fn add_identity(&self, s: &Lin) -> HExpr {
        let mut out = self.clone();
        for i in 0..self.n {
            let e = &mut out.data[i * self.n + i];
            e.terms.extend(s.terms.iter().map(|&(j, v)| (j, C64::new(v, 0.0))));
            e.constant += s.constant;
        }
        out
    }

    /// `self + l·M` for a scalar expression `l` and a constant matrix `M`.
    pub fn add_lin_times(&self, l: &Lin, m: &CMatrix) -> HExpr {
        assert_eq!(m.rows(), self.n);
        let mut out = self.clone();
        for (e, &w) in out.data.iter_mut().zip(m.data()) {
            if w != ZERO {
                e.terms.extend(l.terms.iter().map(|&(j, v)| (j, w * v)));
                e.constant += w * l.constant;
            }
        }
        out
    }

    /// Real part of the trace.
    pub fn trace(&self) -> Lin {
        let mut t = Lin::zero();
        for i in 0..self.n {
            t += &self.data[i * self.n + i].re();
        }
        t.compact();
        t
    }

    /// `Re Tr[M X]`; for Hermitian `M` and `X` this is the full value.
    pub fn inner(&self, m: &CMatrix) -> Lin {
        assert_eq!(m.rows(), self.n);
        let n = self.n;
        let mut acc = CLin::zero();
        for i in 0..n {
            for j in 0..n {
                let w = m[(j, i)];
                if w != ZERO {
                    acc.add_scaled(&self.data[i * n + j], w);
                }
            }
        }
        let mut r = acc.re();
        r.compact();
        r
    }

    pub fn eval(&self, x: &[f64]) -> CMatrix {
        CMatrix::from_vec(self.n, self.n, self.data.iter().map(|e| e.eval(x)).collect()).expect("square")
    }

    pub fn permute(&self, dims: &SystemDims, order: &[&str]) -> Result<(HExpr, SystemDims)> {
        dims.check_matrix(self.n, self.n)?;
        let (data, d) = permute_array(&self.data, dims, order)?;
        Ok((HExpr { n: self.n, data }, d))
    }

    pub fn partial_trace(&self, dims: &SystemDims, traced: &[&str]) -> Result<(HExpr, SystemDims)> {
        dims.check_matrix(self.n, self.n)?;
        let (mut data, d) = partial_trace_array(&self.data, dims, traced, CLin::zero())?;
        data.iter_mut().for_each(CLin::compact);
        Ok((HExpr { n: d.total(), data }, d))
    }

    pub fn partial_transpose(&self, dims: &SystemDims, flipped: &[&str]) -> Result<HExpr> {
        dims.check_matrix(self.n, self.n)?;
        Ok(HExpr { n: self.n, data: partial_transpose_array(&self.data, dims, flipped)? })
    }

    /// Link product `self * y` with a constant matrix; the result lives on
    /// the unshared factors of `self` followed by those of `y`.
    pub fn link(&self, xd: &SystemDims, y: &CMatrix, yd: &SystemDims) -> Result<(HExpr, SystemDims)> {
        xd.check_matrix(self.n, self.n)?;
        yd.check_matrix(y.rows(), y.cols())?;
        let (mut data, d) = link_array(&self.data, xd, y.data(), yd, CLin::zero(), |o, a, b| {
            if *b != ZERO && !a.is_empty() {
                o.add_scaled(a, *b);
            }
        })?;
        data.iter_mut().for_each(CLin::compact);
        Ok((HExpr { n: d.total(), data }, d))
    }

    /// Link product `x * self` with a constant left factor.
    pub fn link_left(x: &CMatrix, xd: &SystemDims, y: &HExpr, yd: &SystemDims) -> Result<(HExpr, SystemDims)> {
        xd.check_matrix(x.rows(), x.cols())?;
        yd.check_matrix(y.n, y.n)?;
        let (mut data, d) = link_array(x.data(), xd, &y.data, yd, CLin::zero(), |o, a, b| {
            if *a != ZERO && !b.is_empty() {
                o.add_scaled(b, *a);
            }
        })?;
        data.iter_mut().for_each(CLin::compact);
        Ok((HExpr { n: d.total(), data }, d))
    }

    /// `self ⊗ I` on new factors `extra`, then reordered to `order`.
    pub fn tensor_identity(
        &self,
        dims: &SystemDims,
        extra: &SystemDims,
        order: &[&str],
    ) -> Result<(HExpr, SystemDims)> {
        let id = CMatrix::identity(extra.total());
        let (t, td) = self.link(dims, &id, extra)?;
        t.permute(&td, order)
    }
}

/// How Hermitian variables are tied to their real PSD blocks.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum HermitianMode {
    /// `X` is read off as the average of the two copies in `Y`, and no
    /// symmetry rows are added. Any PSD `Y` maps to a PSD `X` and vice versa,
    /// so the feasible set is unchanged while the system stays smaller.
    #[default]
    Projected,
    /// Adds the rows `Y₁₁ = Y₂₂`, `Y₂₁ = −Y₂₁ᵀ`.
    Constrained,
}

/// Handle to a Hermitian equality (or PSD) constraint, for dual recovery.
#[derive(Clone, Debug)]
pub struct HermCon {
    n: usize,
    /// Row of `Re` for `p <= q`, row of `Im` for `p < q` (`None` if the row
    /// was identically zero).
    re: Vec<Option<usize>>,
    im: Vec<Option<usize>>,
}

/// A conic program under construction.
#[derive(Clone, Debug, Default)]
pub struct Model {
    cones: Vec<Cone>,
    nvars: usize,
    rows: Vec<(Vec<(usize, f64)>, f64)>,
    obj: Lin,
    maximize: bool,
    mode: HermitianMode,
}

impl Model {
    pub fn new() -> Model {
        Model::default()
    }

    pub fn with_mode(mode: HermitianMode) -> Model {
        Model { mode, ..Model::default() }
    }

    pub fn num_vars(&self) -> usize {
        self.nvars
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    fn push_cone(&mut self, c: Cone) -> usize {
        let off = self.nvars;
        self.nvars += c.len();
        self.cones.push(c);
        off
    }

    /// Fresh `n x n` Hermitian PSD variable.
    pub fn herm_psd(&mut self, n: usize) -> HExpr {
        let m = 2 * n;
        let off = self.push_cone(Cone::Psd(m));
        // entry (a, b) of Y as an expression, a <= b or not
        let y = |a: usize, b: usize| -> (usize, f64) {
            let (a, b) = if a <= b { (a, b) } else { (b, a) };
            let w = if a == b { 1.0 } else { FRAC_1_SQRT_2 };
            (off + super::svec_index(m, a, b), w)
        };
        let mut data = Vec::with_capacity(n * n);
        for p in 0..n {
            for q in 0..n {
                let mut e = CLin::zero();
                for (v, w) in [y(p, q), y(n + p, n + q)] {
                    e.terms.push((v, C64::new(0.5 * w, 0.0)));
                }
                if p != q {
                    let (v, w) = y(n + p, q);
                    e.terms.push((v, C64::new(0.0, 0.5 * w)));
                    let (v, w) = y(p, n + q);
                    e.terms.push((v, C64::new(0.0, -0.5 * w)));
                }
                e.compact();
                data.push(e);
            }
        }
        if self.mode == HermitianMode::Constrained {
            for p in 0..n {
                for q in p..n {
                    let (a, wa) = y(p, q);
                    let (b, wb) = y(n + p, n + q);
                    self.push_row(vec![(a, wa), (b, -wb)], 0.0);
                    let (a, wa) = y(n + p, q);
                    if p == q {
                        self.push_row(vec![(a, wa)], 0.0);
                    } else {
                        let (b, wb) = y(n + q, p);
                        self.push_row(vec![(a, wa), (b, wb)], 0.0);
                    }
                }
            }
        }
        HExpr { n, data }
    }

    /// Fresh `n x n` Hermitian variable without sign constraint.
    pub fn herm_free(&mut self, n: usize) -> HExpr {
        let off = self.push_cone(Cone::Free(n * n));
        let mut data = vec![CLin::zero(); n * n];
        let mut k = off;
        for p in 0..n {
            data[p * n + p] = CLin::var(k, C64::new(1.0, 0.0));
            k += 1;
            for q in p + 1..n {
                let mut e = CLin::var(k, C64::new(1.0, 0.0));
                e.terms.push((k + 1, C64::new(0.0, 1.0)));
                data[q * n + p] = e.conj();
                data[p * n + q] = e;
                k += 2;
            }
        }
        HExpr { n, data }
    }

    pub fn nonneg(&mut self, k: usize) -> Vec<Lin> {
        let off = self.push_cone(Cone::Nonneg(k));
        (off..off + k).map(Lin::var).collect()
    }

    pub fn free(&mut self, k: usize) -> Vec<Lin> {
        let off = self.push_cone(Cone::Free(k));
        (off..off + k).map(Lin::var).collect()
    }

    fn push_row(&mut self, terms: Vec<(usize, f64)>, rhs: f64) -> usize {
        self.rows.push((terms, rhs));
        self.rows.len() - 1
    }

    /// `e = rhs`. Returns the row, or `None` if `e` has no variables and
    /// the constraint holds.
    pub fn eq(&mut self, e: Lin, rhs: f64) -> Option<usize> {
        let mut e = e;
        e.compact();
        let r = rhs - e.constant;
        if e.terms.is_empty() && r.abs() <= 1e-12 {
            return None;
        }
        Some(self.push_row(e.terms, r))
    }

    /// `e <= rhs`, through a nonnegative slack.
    pub fn le(&mut self, e: Lin, rhs: f64) -> Option<usize> {
        let s = self.nonneg(1).pop().expect("one slack");
        self.eq(e + s, rhs)
    }

    /// `e >= rhs`, through a nonnegative slack.
    pub fn ge(&mut self, e: Lin, rhs: f64) -> Option<usize> {
        let s = self.nonneg(1).pop().expect("one slack");
        self.eq(e - s, rhs)
    }

    /// `a = b` entrywise (both Hermitian): real parts on and above the
    /// diagonal, imaginary parts above it.
    pub fn herm_eq(&mut self, a: &HExpr, b: &HExpr) -> HermCon {
        let d = a.sub(b);
        let n = d.n;
        let mut re = Vec::with_capacity(n * (n + 1) / 2);
        let mut im = Vec::with_capacity(n * (n + 1) / 2);
        for p in 0..n {
            for q in p..n {
                let e = &d.data[p * n + q];
                re.push(self.eq(e.re(), 0.0));
                im.push(if p == q { None } else { self.eq(e.im(), 0.0) });
            }
        }
        HermCon { n, re, im }
    }

    /// `e ⪰ 0` for a Hermitian expression, through a PSD slack.
    pub fn psd(&mut self, e: &HExpr) -> HermCon {
        let s = self.herm_psd(e.n);
        self.herm_eq(e, &s)
    }

    pub fn minimize(&mut self, obj: Lin) {
        self.obj = obj;
        self.maximize = false;
    }

    pub fn maximize(&mut self, obj: Lin) {
        self.obj = obj;
        self.maximize = true;
    }

    pub fn to_problem(&self) -> ConicProblem {
        let sense = if self.maximize { Sense::Maximize } else { Sense::Minimize };
        let mut p = ConicProblem::new(sense, self.cones.clone());
        let mut obj = self.obj.clone();
        obj.compact();
        for &(j, v) in &obj.terms {
            p.add_objective(j, v);
        }
        for (terms, rhs) in &self.rows {
            p.add_row(terms.clone(), *rhs);
        }
        p
    }

    /// Solves the model; anything short of an optimal status is an error.
    pub fn solve(&self, tol: f64) -> Result<ModelSolution> {
        let sol = solve(&self.to_problem(), tol).optimal()?;
        Ok(ModelSolution { sol, constant: self.obj.constant, maximize: self.maximize })
    }
}

/// Optimal solution of a [`Model`].
#[derive(Clone, Debug)]
pub struct ModelSolution {
    pub sol: ConicSolution,
    constant: f64,
    maximize: bool,
}

impl ModelSolution {
    /// Objective value of the primal point.
    pub fn primal(&self) -> f64 {
        self.sol.primal_value + self.constant
    }

    /// Objective value of the dual point.
    pub fn dual(&self) -> f64 {
        self.sol.dual_value + self.constant
    }

    pub fn value(&self) -> f64 {
        0.5 * (self.primal() + self.dual())
    }

    pub fn iterations(&self) -> usize {
        self.sol.iterations
    }

    pub fn lin(&self, e: &Lin) -> f64 {
        e.eval(&self.sol.x)
    }

    pub fn herm(&self, e: &HExpr) -> CMatrix {
        e.eval(&self.sol.x).hermitian_part()
    }

    /// Multiplier of a scalar row as returned by the solver.
    pub fn row_dual(&self, row: Option<usize>) -> f64 {
        row.map_or(0.0, |r| self.sol.y[r])
    }

    /// Multiplier of a Hermitian equality as a Hermitian matrix `W`, with
    /// `⟨W, a − b⟩` the Lagrangian term. For a constraint made by
    /// [`Model::psd`], `W ⪰ 0` for minimizations and `−W ⪰ 0` for
    /// maximizations; [`ModelSolution::psd_dual`] returns the PSD one.
    pub fn herm_dual(&self, c: &HermCon) -> CMatrix {
        let n = c.n;
        let mut w = CMatrix::zeros(n, n);
        let mut k = 0;
        for p in 0..n {
            for q in p..n {
                let yr = self.row_dual(c.re[k]);
                let yi = self.row_dual(c.im[k]);
                if p == q {
                    w[(p, p)] = C64::new(yr, 0.0);
                } else {
                    let z = C64::new(0.5 * yr, 0.5 * yi);
                    w[(p, q)] = z;
                    w[(q, p)] = z.conj();
                }
                k += 1;
            }
        }
        w
    }

    /// The PSD multiplier of `e ⪰ 0`.
    pub fn psd_dual(&self, c: &HermCon) -> CMatrix {
        let w = self.herm_dual(c);
        if self.maximize {
            w.scale(-1.0)
        } else {
            w
        }
    }
}

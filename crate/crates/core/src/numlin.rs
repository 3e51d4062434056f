//! Shared numerical core: dense matrices, kernel and column-space bases,
//! linear-programming feasibility via a two-phase simplex, least squares,
//! and strict-positivity feasibility through the max-min-slack trick.

use num::BigRational;
use num::Zero;

/// Central collection of numerical tolerances. Every operation in the crate
/// that needs a threshold takes one of these, so a single override propagates
/// consistently through a whole pipeline.
#[derive(Debug, Clone)]
pub struct Tolerances {
    /// Constraint-satisfaction threshold for LP solutions; also the phase-1
    /// objective level above which a problem is declared infeasible.
    pub lp_feasibility: f64,
    /// Minimum optimal slack for strict-positivity feasibility.
    pub strict_slack: f64,
    /// Relative pivot threshold for floating-point Gaussian elimination.
    pub rank_pivot_rel: f64,
    /// Relative residual allowed for kernel basis columns.
    pub kernel_residual_rel: f64,
    /// Relative residual for detailed/complex balance and rate-constant
    /// product (Wegscheider/circuit) checks.
    pub balance_residual: f64,
    /// Absolute per-vertex mismatch allowed between two net vector fields.
    pub equivalence_abs: f64,
    /// Relative least-squares residual accepted by the single-target
    /// realization search.
    pub realization_residual: f64,
    /// Lower bound on the ray parameters of a single-target realization.
    pub ray_positivity: f64,
    /// Gradient-to-value ratio at which the convex potential minimization
    /// is considered converged.
    pub birch_gradient_rel: f64,
    /// Residual-to-scale ratio at which a state counts as a steady state.
    pub steady_state_rel: f64,
    /// Relative local error target for the adaptive integrator.
    pub ode_rtol: f64,
    /// Absolute local error floor for the adaptive integrator.
    pub ode_atol: f64,
    /// Coordinate level at which a trajectory is declared to have reached
    /// the boundary of the positive orthant.
    pub boundary_min: f64,
    /// State norm at which a trajectory is declared divergent.
    pub divergence_norm: f64,
    /// Allowed drift of the conserved components along a trajectory.
    pub conservation_abs: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            lp_feasibility: 1e-9,
            strict_slack: 1e-9,
            rank_pivot_rel: 1e-10,
            kernel_residual_rel: 1e-10,
            balance_residual: 1e-9,
            equivalence_abs: 1e-9,
            realization_residual: 1e-8,
            ray_positivity: 1e-12,
            birch_gradient_rel: 1e-12,
            steady_state_rel: 1e-10,
            ode_rtol: 1e-8,
            ode_atol: 1e-10,
            boundary_min: 1e-8,
            divergence_norm: 1e8,
            conservation_abs: 1e-6,
        }
    }
}

/// Dense row-major matrix of `f64`.
#[derive(Debug, Clone, PartialEq)]
pub struct Mat {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Mat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Mat { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn from_rows(rows: Vec<Vec<f64>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c), "ragged rows");
        Mat { rows: r, cols: c, data: rows.into_iter().flatten().collect() }
    }

    pub fn from_columns(cols: &[Vec<f64>]) -> Self {
        let c = cols.len();
        let r = cols.first().map_or(0, |col| col.len());
        let mut m = Mat::zeros(r, c);
        for (j, col) in cols.iter().enumerate() {
            assert_eq!(col.len(), r, "ragged columns");
            for i in 0..r {
                m[(i, j)] = col[i];
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Mat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Mat {
        let mut t = Mat::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// Largest absolute entry.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn is_empty(&self) -> bool {
        self.rows == 0 || self.cols == 0
    }
}

impl std::ops::Index<(usize, usize)> for Mat {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for Mat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm_inf(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, v| m.max(v.abs()))
}

pub fn sub(a: &[f64], b: &[f64]) -> Vec<f64> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

/// Rank by floating-point Gaussian elimination with partial pivoting.
/// The pivot threshold is `rel_tol` times the largest entry of the input.
pub fn rank_f64(m: &Mat, rel_tol: f64) -> usize {
    if m.is_empty() {
        return 0;
    }
    let mut a = m.clone();
    let threshold = rel_tol * a.max_abs().max(1e-300);
    let mut rank = 0;
    let mut row = 0;
    for col in 0..a.cols {
        if row >= a.rows {
            break;
        }
        let (pivot_row, pivot_val) = (row..a.rows)
            .map(|i| (i, a[(i, col)].abs()))
            .fold((row, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_val <= threshold {
            continue;
        }
        if pivot_row != row {
            for j in 0..a.cols {
                let t = a[(row, j)];
                a[(row, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = t;
            }
        }
        for i in row + 1..a.rows {
            let f = a[(i, col)] / a[(row, col)];
            for j in col..a.cols {
                a[(i, j)] -= f * a[(row, j)];
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

/// Rank by exact rational Gaussian elimination.
pub fn rank_exact(rows: &[Vec<BigRational>]) -> usize {
    if rows.is_empty() || rows[0].is_empty() {
        return 0;
    }
    let mut a: Vec<Vec<BigRational>> = rows.to_vec();
    let nrows = a.len();
    let ncols = a[0].len();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..ncols {
        if row >= nrows {
            break;
        }
        let Some(pivot_row) = (row..nrows).find(|&i| !a[i][col].is_zero()) else {
            continue;
        };
        a.swap(row, pivot_row);
        for i in row + 1..nrows {
            if a[i][col].is_zero() {
                continue;
            }
            let f = &a[i][col] / &a[row][col];
            for j in col..ncols {
                let v = &a[row][j] * &f;
                a[i][j] = &a[i][j] - v;
            }
        }
        rank += 1;
        row += 1;
    }
    rank
}

/// Orthonormal basis (columns) of the null space of `m`, computed by row
/// reduction followed by modified Gram-Schmidt.
pub fn kernel_basis(m: &Mat, tol: &Tolerances) -> Mat {
    let n = m.cols();
    if n == 0 {
        return Mat::zeros(0, 0);
    }
    if m.rows() == 0 {
        return Mat::identity(n);
    }
    let mut a = m.clone();
    let threshold = tol.rank_pivot_rel * a.max_abs().max(1e-300);

    // Reduced row echelon form, tracking pivot columns.
    let mut pivot_cols: Vec<usize> = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row >= a.rows() {
            break;
        }
        let (pivot_row, pivot_val) = (row..a.rows())
            .map(|i| (i, a[(i, col)].abs()))
            .fold((row, 0.0), |best, cur| if cur.1 > best.1 { cur } else { best });
        if pivot_val <= threshold {
            continue;
        }
        if pivot_row != row {
            for j in 0..n {
                let t = a[(row, j)];
                a[(row, j)] = a[(pivot_row, j)];
                a[(pivot_row, j)] = t;
            }
        }
        let p = a[(row, col)];
        for j in 0..n {
            a[(row, j)] /= p;
        }
        for i in 0..a.rows() {
            if i != row {
                let f = a[(i, col)];
                if f != 0.0 {
                    for j in 0..n {
                        a[(i, j)] -= f * a[(row, j)];
                    }
                }
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    let free_cols: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(free_cols.len());
    for &fc in &free_cols {
        let mut v = vec![0.0; n];
        v[fc] = 1.0;
        for (r, &pc) in pivot_cols.iter().enumerate() {
            v[pc] = -a[(r, fc)];
        }
        basis.push(v);
    }
    orthonormalize(basis, n)
}

/// Orthonormal basis (columns) of the column space of `m`.
pub fn column_space_basis(m: &Mat, tol: &Tolerances) -> Mat {
    let cols: Vec<Vec<f64>> = (0..m.cols()).map(|j| m.column(j)).collect();
    let scale = m.max_abs().max(1e-300);
    orthonormalize_with_drop(cols, m.rows(), tol.rank_pivot_rel * scale)
}

fn orthonormalize(vectors: Vec<Vec<f64>>, dim: usize) -> Mat {
    orthonormalize_with_drop(vectors, dim, 1e-12)
}

fn orthonormalize_with_drop(vectors: Vec<Vec<f64>>, dim: usize, drop_below: f64) -> Mat {
    let mut kept: Vec<Vec<f64>> = Vec::new();
    for mut v in vectors {
        // Two MGS passes for numerical orthogonality.
        for _ in 0..2 {
            for q in &kept {
                let c = dot(&v, q);
                for (vi, qi) in v.iter_mut().zip(q) {
                    *vi -= c * qi;
                }
            }
        }
        let n = norm2(&v);
        if n > drop_below {
            for vi in v.iter_mut() {
                *vi /= n;
            }
            kept.push(v);
        }
    }
    Mat::from_columns(&kept).with_dims(dim, kept.len())
}

impl Mat {
    // from_columns of an empty list loses the row count; fix it up.
    fn with_dims(self, rows: usize, cols: usize) -> Mat {
        if self.rows == rows && self.cols == cols {
            self
        } else {
            assert!(self.data.is_empty());
            Mat { rows, cols, data: vec![0.0; rows * cols] }
        }
    }
}

/// Least squares min ||Ax - b|| by Householder QR. Returns the solution and
/// the residual norm, or `None` when A is (numerically) rank deficient.
pub fn least_squares(a: &Mat, b: &[f64]) -> Option<(Vec<f64>, f64)> {
    let m = a.rows();
    let n = a.cols();
    assert_eq!(b.len(), m);
    if m < n {
        return None;
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let scale = a.max_abs().max(1e-300);
    for k in 0..n {
        // Householder reflector for column k.
        let mut alpha = 0.0;
        for i in k..m {
            alpha += r[(i, k)] * r[(i, k)];
        }
        alpha = alpha.sqrt();
        if alpha <= 1e-13 * scale {
            return None;
        }
        if r[(k, k)] > 0.0 {
            alpha = -alpha;
        }
        let mut v = vec![0.0; m - k];
        v[0] = r[(k, k)] - alpha;
        for i in k + 1..m {
            v[i - k] = r[(i, k)];
        }
        let vnorm2 = dot(&v, &v);
        if vnorm2 <= 0.0 {
            continue;
        }
        for j in k..n {
            let mut s = 0.0;
            for i in k..m {
                s += v[i - k] * r[(i, j)];
            }
            let f = 2.0 * s / vnorm2;
            for i in k..m {
                r[(i, j)] -= f * v[i - k];
            }
        }
        let mut s = 0.0;
        for i in k..m {
            s += v[i - k] * rhs[i];
        }
        let f = 2.0 * s / vnorm2;
        for i in k..m {
            rhs[i] -= f * v[i - k];
        }
    }
    let mut x = vec![0.0; n];
    for k in (0..n).rev() {
        let mut s = rhs[k];
        for j in k + 1..n {
            s -= r[(k, j)] * x[j];
        }
        if r[(k, k)].abs() <= 1e-13 * scale {
            return None;
        }
        x[k] = s / r[(k, k)];
    }
    let residual = norm2(&rhs[n..]);
    Some((x, residual))
}

/// Solve a symmetric positive definite system by Cholesky factorization.
pub fn solve_spd(a: &Mat, b: &[f64]) -> Option<Vec<f64>> {
    let n = a.rows();
    assert_eq!(a.cols(), n);
    assert_eq!(b.len(), n);
    let mut l = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let mut s = a[(i, j)];
            for k in 0..j {
                s -= l[(i, k)] * l[(j, k)];
            }
            if i == j {
                if s <= 0.0 {
                    return None;
                }
                l[(i, i)] = s.sqrt();
            } else {
                l[(i, j)] = s / l[(j, j)];
            }
        }
    }
    let mut y = vec![0.0; n];
    for i in 0..n {
        let mut s = b[i];
        for k in 0..i {
            s -= l[(i, k)] * y[k];
        }
        y[i] = s / l[(i, i)];
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = y[i];
        for k in i + 1..n {
            s -= l[(k, i)] * x[k];
        }
        x[i] = s / l[(i, i)];
    }
    Some(x)
}

/// Linear feasibility/optimization problem with equality constraints
/// `a x = b`, sign restrictions on selected coordinates, and an optional
/// objective of maximizing a single variable.
#[derive(Debug, Clone)]
pub struct LpProblem {
    pub a: Mat,
    pub b: Vec<f64>,
    /// `nonneg[j]` requires `x_j >= 0`; other variables are free.
    pub nonneg: Vec<bool>,
    /// Index of the variable to maximize, if any.
    pub maximize: Option<usize>,
}

/// Outcome of an LP solve.
#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    /// A feasible (and, when an objective was given, optimal) point.
    Solved { point: Vec<f64>, objective: f64 },
    Infeasible,
    Unbounded,
}

impl LpProblem {
    pub fn num_vars(&self) -> usize {
        self.nonneg.len()
    }

    /// Largest violation of the equality constraints and sign restrictions
    /// at `x`.
    pub fn violation(&self, x: &[f64]) -> f64 {
        let mut v: f64 = 0.0;
        let ax = self.a.matvec(x);
        for (lhs, rhs) in ax.iter().zip(&self.b) {
            v = v.max((lhs - rhs).abs());
        }
        for (j, &nn) in self.nonneg.iter().enumerate() {
            if nn {
                v = v.max(-x[j]);
            }
        }
        v
    }
}

// Pivot magnitude below which a tableau entry is treated as zero.
const PIVOT_EPS: f64 = 1e-11;

/// Two-phase dense tableau simplex with Bland's rule. Deterministic: ties
/// are always broken by lowest index, so identical problems give identical
/// answers.
pub fn lp_solve(p: &LpProblem, tol: &Tolerances) -> LpOutcome {
    assert_eq!(p.a.rows(), p.b.len());
    assert_eq!(p.a.cols(), p.num_vars());

    // Standard form: split each free variable into a difference of two
    // nonnegative ones.
    let n_orig = p.num_vars();
    let mut col_of: Vec<(usize, Option<usize>)> = Vec::with_capacity(n_orig);
    let mut n_std = 0;
    for &nn in &p.nonneg {
        if nn {
            col_of.push((n_std, None));
            n_std += 1;
        } else {
            col_of.push((n_std, Some(n_std + 1)));
            n_std += 2;
        }
    }

    let m = p.a.rows();
    let mut a = Mat::zeros(m, n_std);
    let mut b = p.b.clone();
    for i in 0..m {
        for j in 0..n_orig {
            let v = p.a[(i, j)];
            let (cp, cm) = col_of[j];
            a[(i, cp)] = v;
            if let Some(cm) = cm {
                a[(i, cm)] = -v;
            }
        }
    }
    for i in 0..m {
        if b[i] < 0.0 {
            b[i] = -b[i];
            for j in 0..n_std {
                a[(i, j)] = -a[(i, j)];
            }
        }
    }

    // Phase 1: tableau [A | I][x; art] = b, minimize sum of artificials.
    let total = n_std + m;
    let mut t = Mat::zeros(m, total + 1);
    for i in 0..m {
        for j in 0..n_std {
            t[(i, j)] = a[(i, j)];
        }
        t[(i, n_std + i)] = 1.0;
        t[(i, total)] = b[i];
    }
    let mut basis: Vec<usize> = (n_std..total).collect();
    // Reduced costs for minimizing the artificial sum: z_j = -sum_i a_ij.
    let mut z = vec![0.0; total + 1];
    for j in 0..n_std {
        z[j] = -(0..m).map(|i| t[(i, j)]).sum::<f64>();
    }
    z[total] = -b.iter().sum::<f64>();

    if !run_simplex(&mut t, &mut z, &mut basis, n_std) {
        // Phase 1 is always bounded below by zero.
        unreachable!("phase 1 cannot be unbounded");
    }
    let phase1_obj = -z[total];
    if phase1_obj > tol.lp_feasibility {
        return LpOutcome::Infeasible;
    }

    // Drive artificial variables out of the basis; drop redundant rows.
    let mut live_rows: Vec<bool> = vec![true; m];
    for i in 0..m {
        if basis[i] >= n_std {
            let pivot_col = (0..n_std).find(|&j| t[(i, j)].abs() > PIVOT_EPS);
            match pivot_col {
                Some(j) => {
                    pivot(&mut t, &mut z, &mut basis, i, j);
                }
                None => live_rows[i] = false,
            }
        }
    }

    let objective_col = p.maximize.map(|k| col_of[k]);

    if let Some((cp, cm)) = objective_col {
        // Phase 2: minimize -(x_plus - x_minus) over the structural columns.
        let mut c = vec![0.0; total];
        c[cp] = -1.0;
        if let Some(cm) = cm {
            c[cm] = 1.0;
        }
        // Canonical reduced costs: c_j - c_B B^-1 A_j, using the tableau rows.
        for zj in z.iter_mut() {
            *zj = 0.0;
        }
        for j in 0..total + 1 {
            let cj = if j < total { c[j] } else { 0.0 };
            let mut adj = cj;
            for i in 0..m {
                if live_rows[i] && basis[i] < total {
                    adj -= c[basis[i]] * t[(i, j)];
                }
            }
            z[j] = adj;
        }
        // Forbid re-entering artificial columns.
        for j in n_std..total {
            z[j] = f64::INFINITY;
        }
        if !run_simplex_masked(&mut t, &mut z, &mut basis, n_std, &live_rows) {
            return LpOutcome::Unbounded;
        }
    }

    // Recover the solution in the original variables.
    let mut x_std = vec![0.0; total];
    for i in 0..m {
        if live_rows[i] {
            x_std[basis[i]] = t[(i, total)];
        }
    }
    let mut x = vec![0.0; n_orig];
    for (j, &(cp, cm)) in col_of.iter().enumerate() {
        x[j] = x_std[cp] - cm.map_or(0.0, |c| x_std[c]);
        // Clean up round-off on sign-restricted coordinates.
        if p.nonneg[j] && x[j] < 0.0 && x[j] > -tol.lp_feasibility {
            x[j] = 0.0;
        }
    }
    let objective = p.maximize.map_or(0.0, |k| x[k]);
    LpOutcome::Solved { point: x, objective }
}

fn run_simplex(t: &mut Mat, z: &mut [f64], basis: &mut [usize], entering_limit: usize) -> bool {
    let live = vec![true; t.rows()];
    run_simplex_masked(t, z, basis, entering_limit, &live)
}

/// Core simplex loop (minimization). Returns false on unboundedness.
fn run_simplex_masked(
    t: &mut Mat,
    z: &mut [f64],
    basis: &mut [usize],
    entering_limit: usize,
    live_rows: &[bool],
) -> bool {
    let m = t.rows();
    let rhs_col = t.cols() - 1;
    loop {
        // Bland: entering variable is the lowest index with negative
        // reduced cost.
        let entering = (0..entering_limit).find(|&j| z[j] < -1e-9);
        let Some(j) = entering else {
            return true;
        };
        // Ratio test; Bland ties broken by smallest basic variable index.
        let mut leave: Option<(usize, f64)> = None;
        for i in 0..m {
            if !live_rows[i] {
                continue;
            }
            let aij = t[(i, j)];
            if aij > PIVOT_EPS {
                let ratio = t[(i, rhs_col)] / aij;
                match leave {
                    None => leave = Some((i, ratio)),
                    Some((li, lr)) => {
                        if ratio < lr - 1e-12
                            || ((ratio - lr).abs() <= 1e-12 && basis[i] < basis[li])
                        {
                            leave = Some((i, ratio));
                        }
                    }
                }
            }
        }
        let Some((row, _)) = leave else {
            return false;
        };
        pivot(t, z, basis, row, j);
    }
}

fn pivot(t: &mut Mat, z: &mut [f64], basis: &mut [usize], row: usize, col: usize) {
    let m = t.rows();
    let w = t.cols();
    let p = t[(row, col)];
    for j in 0..w {
        t[(row, j)] /= p;
    }
    for i in 0..m {
        if i != row {
            let f = t[(i, col)];
            if f != 0.0 {
                for j in 0..w {
                    t[(i, j)] -= f * t[(row, j)];
                }
            }
        }
    }
    let f = z[col];
    if f != 0.0 && f.is_finite() {
        for j in 0..w {
            if z[j].is_finite() {
                z[j] -= f * t[(row, j)];
            }
        }
    }
    basis[row] = col;
}

/// Feasibility check: a point satisfying all constraints within the
/// tolerance, or `None`.
pub fn lp_feasible(p: &LpProblem, tol: &Tolerances) -> Option<Vec<f64>> {
    let q = LpProblem { maximize: None, ..p.clone() };
    match lp_solve(&q, tol) {
        LpOutcome::Solved { point, .. } => Some(point),
        _ => None,
    }
}

// Upper bound placed on the slack variable so the max-min-slack program is
// always bounded; only existence and the returned point matter above it.
const SLACK_CAP: f64 = 1.0;

/// Strict-positivity feasibility: maximize `t` subject to the constraints of
/// `p` plus `x_i >= t` for every `i` in `strict_vars`. Returns the point and
/// the optimal slack when it exceeds the strictness tolerance.
pub fn strict_interior_point(
    p: &LpProblem,
    strict_vars: &[usize],
    tol: &Tolerances,
) -> Option<(Vec<f64>, f64)> {
    let n = p.num_vars();
    let k = strict_vars.len();
    let m = p.a.rows();
    // Variables: x (n), t (1, free), slacks s_i (k), cap slack (1).
    let t_col = n;
    let total = n + 1 + k + 1;
    let mut a = Mat::zeros(m + k + 1, total);
    let mut b = vec![0.0; m + k + 1];
    for i in 0..m {
        for j in 0..n {
            a[(i, j)] = p.a[(i, j)];
        }
        b[i] = p.b[i];
    }
    for (r, &v) in strict_vars.iter().enumerate() {
        // x_v - t - s_r = 0
        a[(m + r, v)] = 1.0;
        a[(m + r, t_col)] = -1.0;
        a[(m + r, n + 1 + r)] = -1.0;
    }
    // t + s_cap = SLACK_CAP
    a[(m + k, t_col)] = 1.0;
    a[(m + k, n + 1 + k)] = 1.0;
    b[m + k] = SLACK_CAP;

    let mut nonneg = vec![false; total];
    nonneg[..n].copy_from_slice(&p.nonneg);
    for r in 0..k {
        nonneg[n + 1 + r] = true;
    }
    nonneg[n + 1 + k] = true;

    let q = LpProblem { a, b, nonneg, maximize: Some(t_col) };
    match lp_solve(&q, tol) {
        LpOutcome::Solved { point, objective } if objective > tol.strict_slack => {
            Some((point[..n].to_vec(), objective))
        }
        _ => None,
    }
}

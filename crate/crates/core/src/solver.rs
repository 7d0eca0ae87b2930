//! Weighted least squares over the probability simplex.
//!
//! Problems have the form
//!
//! ```text
//! minimize   Σ_l  weight_l · (row_l · x − target_l)²
//! subject to Σ_i x_i = 1,   x_i ≥ floor
//! ```
//!
//! which covers both the pairwise-difference design used for priority vectors
//! and the direct row design used for transition rows. [`solve`] is a primal
//! active-set method over the bound constraints; each subproblem is solved in
//! an orthonormal basis of `{d : Σ d = 0}` with a pseudo-inverse, so rank
//! deficient problems return the minimum-norm optimum of the final face.
//! [`brute_force_oracle`] is an exhaustive grid search used to check it.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::Serialize;

use crate::error::{Error, Result};

/// Lower bound that stands in for strict positivity.
pub const STRICT_FLOOR: f64 = 1e-9;

/// Relative eigenvalue cutoff for the reduced Hessian.
const RANK_TOLERANCE: f64 = 1e-12;

/// How the positivity constraint is realized.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    /// `x_i ≥ 1e-9`.
    Strict,
    /// `x_i ≥ 0`.
    NonNegative,
}

impl Positivity {
    pub fn floor(self) -> f64 {
        match self {
            Positivity::Strict => STRICT_FLOOR,
            Positivity::NonNegative => 0.0,
        }
    }
}

/// One residual `weight · (row · x − target)²`.
#[derive(Debug, Clone, PartialEq)]
pub struct WlsTerm {
    pub row: Vec<f64>,
    pub target: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimplexWlsProblem {
    dim: usize,
    terms: Vec<WlsTerm>,
    positivity: Positivity,
}

impl SimplexWlsProblem {
    pub fn new(dim: usize, terms: Vec<WlsTerm>, positivity: Positivity) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Shape("a simplex problem needs at least one unknown".into()));
        }
        if positivity.floor() * dim as f64 > 1.0 {
            return Err(Error::Shape(format!("{dim} unknowns cannot all exceed the floor")));
        }
        for (l, term) in terms.iter().enumerate() {
            if term.row.len() != dim {
                return Err(Error::Shape(format!(
                    "term {l} has {} coefficients, expected {dim}",
                    term.row.len()
                )));
            }
            if !(term.row.iter().all(|c| c.is_finite()) && term.target.is_finite()) {
                return Err(Error::Solver(format!("term {l} is not finite")));
            }
            if !(term.weight >= 0.0 && term.weight.is_finite()) {
                return Err(Error::Solver(format!("term {l} has weight {}", term.weight)));
            }
        }
        if !terms.iter().any(|t| t.weight > 0.0) {
            return Err(Error::Solver("no term carries positive weight".into()));
        }
        Ok(Self { dim, terms, positivity })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self) -> &[WlsTerm] {
        &self.terms
    }

    pub fn positivity(&self) -> Positivity {
        self.positivity
    }

    pub fn objective(&self, x: &[f64]) -> f64 {
        self.terms
            .iter()
            .map(|t| {
                let r: f64 = t.row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - t.target;
                t.weight * r * r
            })
            .sum()
    }

    pub fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut g = vec![0.0; self.dim];
        for t in &self.terms {
            let r: f64 = t.row.iter().zip(x).map(|(a, b)| a * b).sum::<f64>() - t.target;
            for (gi, a) in g.iter_mut().zip(&t.row) {
                *gi += 2.0 * t.weight * r * a;
            }
        }
        g
    }

    /// `f(x) = xᵀQx − 2qᵀx + c`.
    fn quadratic_form(&self) -> (DMatrix<f64>, DVector<f64>, f64) {
        let n = self.dim;
        let mut q_mat = DMatrix::zeros(n, n);
        let mut q_vec = DVector::zeros(n);
        let mut c = 0.0;
        for t in &self.terms {
            let row = DVector::from_column_slice(&t.row);
            q_mat += t.weight * &row * row.transpose();
            q_vec += t.weight * t.target * &row;
            c += t.weight * t.target * t.target;
        }
        (q_mat, q_vec, c)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Optimal,
    /// Optimal, but the optimum is not unique; the minimum-norm point was taken.
    Degenerate,
    IterationLimit,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimplexSolution {
    pub vector: Vec<f64>,
    pub objective: f64,
    /// Indices held at the floor.
    pub active_bounds: Vec<usize>,
    pub status: SolveStatus,
}

/// Solves a [`SimplexWlsProblem`] to KKT optimality.
pub fn solve(problem: &SimplexWlsProblem) -> Result<SimplexSolution> {
    let n = problem.dim;
    let lb = problem.positivity.floor();
    if n == 1 {
        return Ok(finish(problem, vec![1.0], vec![false], SolveStatus::Optimal));
    }
    let (q_mat, q_vec, _) = problem.quadratic_form();
    let scale = q_mat.amax().max(q_vec.amax()).max(f64::MIN_POSITIVE);
    let mut x = vec![1.0 / n as f64; n];
    let mut bound = vec![false; n];
    let max_iter = 20 * n + 50;

    for _ in 0..max_iter {
        let (target, degenerate) = face_minimizer(&q_mat, &q_vec, &bound, lb);
        let free: Vec<usize> = (0..n).filter(|&i| !bound[i]).collect();

        // longest feasible step toward the face minimizer
        let mut alpha = 1.0;
        let mut blocking = None;
        for &i in &free {
            let d = target[i] - x[i];
            if d < 0.0 && target[i] < lb {
                let a = (lb - x[i]) / d;
                if a < alpha {
                    alpha = a.max(0.0);
                    blocking = Some(i);
                }
            }
        }
        for &i in &free {
            x[i] += alpha * (target[i] - x[i]);
        }
        if let Some(i) = blocking {
            x[i] = lb;
            bound[i] = true;
            continue;
        }

        // at the face minimizer: check multipliers of the bound constraints
        let g = gradient_from_form(&q_mat, &q_vec, &x);
        let nu = free.iter().map(|&i| g[i]).sum::<f64>() / free.len() as f64;
        let release = (0..n)
            .filter(|&i| bound[i])
            .map(|i| (i, g[i] - nu))
            .filter(|&(_, mu)| mu < -1e-12 * scale)
            .min_by(|a, b| a.1.total_cmp(&b.1).then(a.0.cmp(&b.0)));
        match release {
            Some((i, _)) => bound[i] = false,
            None => {
                let status = if degenerate {
                    SolveStatus::Degenerate
                } else {
                    SolveStatus::Optimal
                };
                return Ok(finish(problem, x, bound, status));
            }
        }
    }
    Ok(finish(problem, x, bound, SolveStatus::IterationLimit))
}

fn gradient_from_form(q_mat: &DMatrix<f64>, q_vec: &DVector<f64>, x: &[f64]) -> Vec<f64> {
    let x = DVector::from_column_slice(x);
    (2.0 * (q_mat * x - q_vec)).data.into()
}

/// Minimum-norm minimizer of the objective on the face where `bound` indices
/// sit at `lb` and the rest sum to `1 − |bound|·lb`. Also reports whether the
/// reduced Hessian is singular.
fn face_minimizer(q_mat: &DMatrix<f64>, q_vec: &DVector<f64>, bound: &[bool], lb: f64) -> (Vec<f64>, bool) {
    let n = bound.len();
    let free: Vec<usize> = (0..n).filter(|&i| !bound[i]).collect();
    let fixed: Vec<usize> = (0..n).filter(|&i| bound[i]).collect();
    let nf = free.len();
    let mut out = vec![lb; n];
    let share = (1.0 - lb * fixed.len() as f64) / nf as f64;
    if nf == 1 {
        out[free[0]] = share;
        return (out, false);
    }

    let basis = sum_zero_basis(nf);
    let q_ff = DMatrix::from_fn(nf, nf, |a, b| q_mat[(free[a], free[b])]);
    let x_p = DVector::from_element(nf, share);
    let mut lin = &q_ff * &x_p;
    for (a, &i) in free.iter().enumerate() {
        lin[a] += fixed.iter().map(|&j| q_mat[(i, j)] * lb).sum::<f64>() - q_vec[i];
    }
    let hess = basis.transpose() * &q_ff * &basis;
    let rhs = -(basis.transpose() * lin);

    let eig = SymmetricEigen::new(hess);
    let cutoff = RANK_TOLERANCE * eig.eigenvalues.amax().max(f64::MIN_POSITIVE);
    let mut y = DVector::zeros(nf - 1);
    let mut degenerate = false;
    for (k, &lambda) in eig.eigenvalues.iter().enumerate() {
        if lambda > cutoff {
            let v = eig.eigenvectors.column(k);
            y += v * (v.dot(&rhs) / lambda);
        } else {
            degenerate = true;
        }
    }
    let x_f = x_p + &basis * y;
    for (a, &i) in free.iter().enumerate() {
        out[i] = x_f[a];
    }
    (out, degenerate)
}

/// Orthonormal basis (as columns) of the vectors in `R^n` summing to zero.
fn sum_zero_basis(n: usize) -> DMatrix<f64> {
    // Helmert contrasts
    DMatrix::from_fn(n, n - 1, |i, k| {
        let k1 = (k + 1) as f64;
        let norm = (k1 * (k1 + 1.0)).sqrt();
        if i <= k {
            1.0 / norm
        } else if i == k + 1 {
            -k1 / norm
        } else {
            0.0
        }
    })
}

fn finish(problem: &SimplexWlsProblem, mut x: Vec<f64>, bound: Vec<bool>, status: SolveStatus) -> SimplexSolution {
    let lb = problem.positivity.floor();
    for v in &mut x {
        if *v < lb {
            *v = lb;
        }
    }
    // restore the exact sum on the free coordinates
    let free: Vec<usize> = (0..x.len()).filter(|&i| !bound[i]).collect();
    let excess = x.iter().sum::<f64>() - 1.0;
    if !free.is_empty() {
        let share = excess / free.len() as f64;
        for &i in &free {
            x[i] = (x[i] - share).max(lb);
        }
    }
    let active_bounds = (0..x.len()).filter(|&i| x[i] <= lb).collect();
    SimplexSolution {
        objective: problem.objective(&x),
        vector: x,
        active_bounds,
        status,
    }
}

/// Projected-gradient KKT residual at `x`: the spread of the gradient over
/// coordinates above the floor, plus any bound coordinate whose gradient lies
/// below that common level.
pub fn stationarity_residual(problem: &SimplexWlsProblem, x: &[f64]) -> f64 {
    let lb = problem.positivity.floor();
    let g = problem.gradient(x);
    let at_bound: Vec<bool> = x.iter().map(|&v| v <= lb + 1e-12).collect();
    let free: Vec<f64> = g.iter().zip(&at_bound).filter(|(_, &b)| !b).map(|(g, _)| *g).collect();
    if free.is_empty() {
        return 0.0;
    }
    let nu = free.iter().sum::<f64>() / free.len() as f64;
    g.iter()
        .zip(&at_bound)
        .map(|(&gi, &b)| if b { (nu - gi).max(0.0) } else { (gi - nu).abs() })
        .fold(0.0, f64::max)
}

/// Exhaustive search over `x_i = floor + (1 − m·floor)·n_i/N`, `Σ n_i = N`,
/// `N = round(1/step)`.
///
/// The last two coordinates are resolved exactly along their line, so only the
/// first `m − 2` are enumerated.
pub fn brute_force_oracle(problem: &SimplexWlsProblem, step: f64) -> Result<SimplexSolution> {
    let m = problem.dim;
    if m > 4 || step.is_nan() || !(1e-3..=1.0).contains(&step) {
        return Err(Error::OracleScope { dim: m, step });
    }
    let lb = problem.positivity.floor();
    let grid = (1.0 / step).round() as usize;
    let unit = (1.0 - m as f64 * lb) / grid as f64;
    if m == 1 {
        return Ok(grid_solution(problem, vec![1.0], lb));
    }

    let (q_mat, q_vec, c) = problem.quadratic_form();
    let eval = |x: &DVector<f64>| (x.transpose() * &q_mat * x)[(0, 0)] - 2.0 * q_vec.dot(x) + c;
    // direction of one grid step moving mass from the last coordinate to the one before
    let mut dir = DVector::zeros(m);
    dir[m - 2] = unit;
    dir[m - 1] = -unit;
    let q_dir = &q_mat * &dir;
    let curvature = dir.dot(&q_dir);

    let mut best = (f64::INFINITY, DVector::zeros(m));
    let mut prefix = vec![0usize; m - 2];
    loop {
        let used: usize = prefix.iter().sum();
        if used <= grid {
            let rest = grid - used;
            let mut x0 = DVector::from_element(m, lb);
            for (i, &n) in prefix.iter().enumerate() {
                x0[i] += unit * n as f64;
            }
            x0[m - 1] += unit * rest as f64;
            // f(x0 + s·dir) = f(x0) + s·slope + s²·curvature
            let slope = 2.0 * (x0.dot(&q_dir) - q_vec.dot(&dir));
            let candidates = if curvature > 0.0 {
                let s = (-slope / (2.0 * curvature)).clamp(0.0, rest as f64);
                [s.floor() as usize, s.ceil() as usize]
            } else {
                [0, rest]
            };
            for s in candidates {
                let x = &x0 + &dir * s as f64;
                let f = eval(&x);
                if f < best.0 {
                    best = (f, x);
                }
            }
        }
        // odometer over the prefix
        let mut k = 0;
        loop {
            if k == prefix.len() {
                return Ok(grid_solution(problem, best.1.data.into(), lb));
            }
            prefix[k] += 1;
            if prefix.iter().sum::<usize>() <= grid {
                break;
            }
            prefix[k] = 0;
            k += 1;
        }
    }
}

fn grid_solution(problem: &SimplexWlsProblem, x: Vec<f64>, lb: f64) -> SimplexSolution {
    SimplexSolution {
        objective: problem.objective(&x),
        active_bounds: (0..x.len()).filter(|&i| x[i] <= lb).collect(),
        vector: x,
        status: SolveStatus::Optimal,
    }
}

//! Generic Dinkelbach solver for minimizing a ratio U(x)/R(x) over a finite-
//! dimensional feasible set with R > 0.
//!
//! The method iterates the parametric subproblem F(q) = min_x U(x) - q·R(x):
//! the ratio is optimal exactly when F(q) = 0, and updating q to the ratio at
//! the current minimizer drives F to zero monotonically. Both link
//! subproblems (downlink and intra-cloud) run through this one solver.

use crate::error::{Error, Result};

/// A ratio-minimization problem the solver can drive.
///
/// Implementations provide the numerator and denominator evaluators and an
/// inner solver returning a feasible minimizer of U(x) - q·R(x) for given q.
pub trait FractionalProblem {
    type Point: Clone;

    /// Numerator U at a feasible point.
    fn numerator(&self, x: &Self::Point) -> f64;

    /// Denominator R at a feasible point; must be positive on the feasible set.
    fn denominator(&self, x: &Self::Point) -> f64;

    /// Feasible minimizer of U(x) - q·R(x).
    fn solve_parametric(&self, q: f64) -> Result<Self::Point>;

    /// Any feasible point, used to seed the first ratio when the caller does
    /// not supply one.
    fn feasible_start(&self) -> Result<Self::Point>;
}

#[derive(Debug, Clone)]
pub struct DinkelbachOptions {
    /// Convergence threshold on |F(q)|, in objective units.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Starting ratio; defaults to the ratio at a feasible point.
    pub q0: Option<f64>,
}

impl Default for DinkelbachOptions {
    fn default() -> Self {
        Self {
            tolerance: 1e-8,
            max_iterations: 100,
            q0: None,
        }
    }
}

/// One solver iterate: the ratio parameter, the subproblem value at its
/// minimizer, and the minimizer itself.
#[derive(Debug, Clone)]
pub struct DinkelbachIterate<P> {
    pub q: f64,
    pub f_value: f64,
    pub point: P,
}

#[derive(Debug, Clone)]
pub struct DinkelbachTrace<P> {
    pub iterations: Vec<DinkelbachIterate<P>>,
    pub converged: bool,
    pub tolerance: f64,
}

impl<P> DinkelbachTrace<P> {
    /// (q, F) pairs, for CSV dumps and error reports.
    pub fn q_f_pairs(&self) -> Vec<(f64, f64)> {
        self.iterations
            .iter()
            .map(|it| (it.q, it.f_value))
            .collect()
    }

    /// +1 when the q iterates never decrease, -1 when they never increase,
    /// 0 for a single iterate; None when the sequence changes direction.
    /// Comparisons allow absolute slack `tol`.
    pub fn monotone_direction(&self, tol: f64) -> Option<i8> {
        let qs: Vec<f64> = self.iterations.iter().map(|it| it.q).collect();
        if qs.len() < 2 {
            return Some(0);
        }
        let non_decreasing = qs.windows(2).all(|w| w[1] >= w[0] - tol);
        let non_increasing = qs.windows(2).all(|w| w[1] <= w[0] + tol);
        match (non_decreasing, non_increasing) {
            (true, true) => Some(0),
            (true, false) => Some(1),
            (false, true) => Some(-1),
            (false, false) => None,
        }
    }
}

#[derive(Debug, Clone)]
pub struct DinkelbachSolution<P> {
    /// Optimal ratio U(x*)/R(x*).
    pub q_star: f64,
    pub minimizer: P,
    pub trace: DinkelbachTrace<P>,
}

/// Minimize U/R by Dinkelbach iteration.
///
/// On success, |U(x*) - q·R(x*)| ≤ tolerance at the final parameter and the
/// reported `q_star` is the exact ratio at the minimizer. Exceeding the
/// iteration budget yields a non-convergence error carrying the trace.
pub fn solve<F: FractionalProblem>(
    problem: &F,
    opts: &DinkelbachOptions,
) -> Result<DinkelbachSolution<F::Point>> {
    if opts.tolerance <= 0.0 || opts.tolerance.is_nan() {
        return Err(Error::InvalidConfig(format!(
            "tolerance must be positive, got {}",
            opts.tolerance
        )));
    }
    let mut q = match opts.q0 {
        Some(q0) if q0.is_finite() => q0,
        Some(q0) => {
            return Err(Error::InvalidConfig(format!(
                "starting ratio must be finite, got {q0}"
            )))
        }
        None => {
            let x0 = problem.feasible_start()?;
            let r0 = problem.denominator(&x0);
            debug_assert!(r0 > 0.0, "feasible start must have positive denominator");
            problem.numerator(&x0) / r0
        }
    };

    let mut iterations = Vec::new();
    for _ in 0..opts.max_iterations {
        let x = problem.solve_parametric(q)?;
        let u = problem.numerator(&x);
        let r = problem.denominator(&x);
        if r <= 0.0 || r.is_nan() {
            return Err(Error::InvalidConfig(format!(
                "inner solver returned a point with nonpositive denominator {r}"
            )));
        }
        let f_value = u - q * r;
        iterations.push(DinkelbachIterate {
            q,
            f_value,
            point: x.clone(),
        });
        if f_value.abs() <= opts.tolerance {
            let q_star = u / r;
            return Ok(DinkelbachSolution {
                q_star,
                minimizer: x,
                trace: DinkelbachTrace {
                    iterations,
                    converged: true,
                    tolerance: opts.tolerance,
                },
            });
        }
        q = u / r;
    }

    let last_residual = iterations
        .last()
        .map(|it| it.f_value.abs())
        .unwrap_or(f64::NAN);
    Err(Error::NonConvergence {
        max_iterations: opts.max_iterations,
        last_residual,
        iterates: iterations.iter().map(|it| (it.q, it.f_value)).collect(),
    })
}

/// The zero-subproblem optimality test: true exactly when
/// |min_x U(x) - q·R(x)| ≤ tol, i.e. when q is the optimal ratio.
pub fn check_optimality<F: FractionalProblem>(problem: &F, q: f64, tol: f64) -> Result<bool> {
    let x = problem.solve_parametric(q)?;
    let f = problem.numerator(&x) - q * problem.denominator(&x);
    Ok(f.abs() <= tol)
}

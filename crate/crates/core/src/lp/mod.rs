//! Simplex solver for the decoding LPs, in floating-point or exact rational
//! arithmetic.

mod scalar;
mod simplex;

use std::ops::Range;

use num_rational::BigRational;

pub use scalar::{exact, ratio, Scalar, FLOAT_TOL, PIVOT_TOL};
pub use simplex::DEGENERATE_RUN_LIMIT;
use simplex::Simplex;

/// Default tolerance when deciding whether a float solution is integral.
pub const INTEGRALITY_TOL: f64 = 1e-6;

/// `min c.x  s.t.  A x = b,  0 <= x <= u`, stored column-wise.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    num_rows: usize,
    columns: Vec<Vec<(usize, f64)>>,
    rhs: Vec<f64>,
    upper: Vec<Option<f64>>,
    objective: Vec<f64>,
}

impl LinearProgram {
    /// Builds a program from sparse columns of `(row, coefficient)` entries.
    pub fn new(
        num_rows: usize,
        columns: Vec<Vec<(usize, f64)>>,
        rhs: Vec<f64>,
        upper: Vec<Option<f64>>,
        objective: Vec<f64>,
    ) -> Self {
        assert_eq!(rhs.len(), num_rows);
        assert_eq!(upper.len(), columns.len());
        assert_eq!(objective.len(), columns.len());
        assert!(columns.iter().flatten().all(|&(r, _)| r < num_rows));
        LinearProgram {
            num_rows,
            columns,
            rhs,
            upper,
            objective,
        }
    }

    pub fn num_rows(&self) -> usize {
        self.num_rows
    }

    pub fn num_cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<(usize, f64)>] {
        &self.columns
    }

    pub fn rhs(&self) -> &[f64] {
        &self.rhs
    }

    pub fn upper(&self) -> &[Option<f64>] {
        &self.upper
    }

    pub fn objective(&self) -> &[f64] {
        &self.objective
    }

    pub fn set_objective(&mut self, objective: Vec<f64>) {
        assert_eq!(objective.len(), self.columns.len());
        self.objective = objective;
    }

    /// Largest violation of `A x = b` and of the bounds.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut row = vec![0.0; self.num_rows];
        let mut worst: f64 = 0.0;
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                row[r] += a * x[j];
            }
            worst = worst.max(-x[j]);
            if let Some(u) = self.upper[j] {
                worst = worst.max(x[j] - u);
            }
        }
        row.iter()
            .zip(&self.rhs)
            .fold(worst, |w, (ax, b)| w.max((ax - b).abs()))
    }

    /// Exact feasibility test for rational points.
    pub fn is_feasible_exact(&self, x: &[BigRational]) -> bool {
        let mut row = vec![BigRational::from_integer(0.into()); self.num_rows];
        for (j, col) in self.columns.iter().enumerate() {
            if Scalar::is_neg(&x[j]) {
                return false;
            }
            if let Some(u) = self.upper[j] {
                if Scalar::is_pos(&Scalar::sub(&x[j], &<BigRational as Scalar>::from_f64(u))) {
                    return false;
                }
            }
            for &(r, a) in col {
                row[r] += <BigRational as Scalar>::from_f64(a) * &x[j];
            }
        }
        row.iter()
            .zip(&self.rhs)
            .all(|(ax, &b)| *ax == <BigRational as Scalar>::from_f64(b))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    /// Iteration limit reached or the basis became numerically singular.
    Stalled,
}

/// A simplex basis over the structural columns followed by one artificial
/// column per row (index `num_cols + row`).
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Basis {
    pub basic: Vec<usize>,
    pub at_upper: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution<T> {
    pub status: LpStatus,
    /// Values of the structural variables; a basic feasible solution when optimal.
    pub values: Vec<T>,
    pub objective: T,
    pub basis: Basis,
    /// Pivots and bound flips over both phases.
    pub iterations: usize,
    pub phase1_iterations: usize,
    /// Whether the degeneracy guard switched pricing to Bland's rule.
    pub used_bland: bool,
}

impl<T: Scalar> LpSolution<T> {
    pub fn values_f64(&self) -> Vec<f64> {
        self.values.iter().map(Scalar::to_f64).collect()
    }

    pub fn is_optimal(&self) -> bool {
        self.status == LpStatus::Optimal
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Mode {
    #[default]
    Float,
    Rational,
}

/// Result of [`solve`] in either arithmetic.
#[derive(Debug, Clone, PartialEq)]
pub enum Solution {
    Float(LpSolution<f64>),
    Rational(LpSolution<BigRational>),
}

impl Solution {
    pub fn status(&self) -> LpStatus {
        match self {
            Solution::Float(s) => s.status,
            Solution::Rational(s) => s.status,
        }
    }

    pub fn values_f64(&self) -> Vec<f64> {
        match self {
            Solution::Float(s) => s.values.clone(),
            Solution::Rational(s) => s.values_f64(),
        }
    }

    pub fn objective_f64(&self) -> f64 {
        match self {
            Solution::Float(s) => s.objective,
            Solution::Rational(s) => s.objective.to_f64(),
        }
    }

    pub fn basis(&self) -> &Basis {
        match self {
            Solution::Float(s) => &s.basis,
            Solution::Rational(s) => &s.basis,
        }
    }
}

/// Solves with the program's own objective.
///
/// A float solve that stalls is repeated in exact arithmetic and returned as
/// a [`Solution::Rational`].
pub fn solve(lp: &LinearProgram, mode: Mode) -> Solution {
    match mode {
        Mode::Float => {
            let s = solve_float(lp);
            if s.status == LpStatus::Stalled {
                log::debug!("float simplex stalled after {} iterations; re-solving exactly", s.iterations);
                Solution::Rational(solve_rational(lp))
            } else {
                Solution::Float(s)
            }
        }
        Mode::Rational => Solution::Rational(solve_rational(lp)),
    }
}

pub fn solve_float(lp: &LinearProgram) -> LpSolution<f64> {
    Simplex::new(lp, lp.objective.clone()).solve()
}

/// Exact solve; the float objective is read exactly as dyadic rationals.
pub fn solve_rational(lp: &LinearProgram) -> LpSolution<BigRational> {
    let objective = lp.objective.iter().map(|&c| <BigRational as Scalar>::from_f64(c)).collect();
    Simplex::new(lp, objective).solve()
}

/// Two-phase solve with an explicit objective in any arithmetic.
pub fn solve_with<T: Scalar>(lp: &LinearProgram, objective: Vec<T>) -> LpSolution<T> {
    Simplex::new(lp, objective).solve()
}

/// Phase-two solve from a known primal-feasible basis, falling back to the
/// full two-phase method when the basis is singular or infeasible.
pub fn solve_from_basis<T: Scalar>(lp: &LinearProgram, objective: Vec<T>, start: &Basis) -> LpSolution<T> {
    match Simplex::new(lp, objective.clone()).solve_from(start) {
        Some(s) => s,
        None => Simplex::new(lp, objective).solve(),
    }
}

/// A feasible basis for the constraint set, independent of the objective.
pub fn feasible_basis(lp: &LinearProgram) -> Option<Basis> {
    let zero = vec![0.0; lp.num_cols()];
    let s = Simplex::new(lp, zero).solve();
    s.is_optimal().then_some(s.basis)
}

/// Whether every value in `range` lies within `tol` of 0 or 1.
pub fn is_integral(values: &[f64], range: Range<usize>, tol: f64) -> bool {
    values[range]
        .iter()
        .all(|&v| v.abs() <= tol || (v - 1.0).abs() <= tol)
}

/// Exact counterpart of [`is_integral`].
pub fn is_integral_exact(values: &[BigRational], range: Range<usize>) -> bool {
    values[range].iter().all(|v| v.is_integer())
}

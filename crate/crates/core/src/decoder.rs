//! The LP decoder and brute-force maximum-likelihood oracles.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_rational::BigRational;
use num_traits::Zero;

use crate::channel::CostVector;
use crate::code::Code;
use crate::error::{Error, Result};
use crate::lp::{self, Basis, LinearProgram, LpSolution, LpStatus, Scalar, INTEGRALITY_TOL};
use crate::polytope::{xi_inverse, VariableLayout};
use crate::ring::Elem;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DecodeMode {
    /// Floating-point simplex only.
    #[default]
    Float,
    /// Exact rational simplex only.
    Rational,
    /// Floating-point simplex, then an exact solve from the float basis;
    /// classification uses the exact solution.
    FloatRecheck,
}

impl std::str::FromStr for DecodeMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "float" => Ok(DecodeMode::Float),
            "rational" => Ok(DecodeMode::Rational),
            "float-recheck" | "recheck" => Ok(DecodeMode::FloatRecheck),
            other => Err(Error::Config(format!("unknown decode mode `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    /// Integral optimum; by the ML certificate this is an ML codeword.
    Codeword(Vec<Elem>),
    /// Fractional optimum; the decoder reports an error.
    Fractional,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub iterations: usize,
    pub used_bland: bool,
    /// The float solve stalled and was repeated exactly.
    pub rational_fallback: bool,
}

#[derive(Debug, Clone)]
pub struct DecodeResult {
    pub outcome: Outcome,
    /// Values of all LP variables (`f` first).
    pub values: Vec<f64>,
    /// `lambda . f` of the returned solution.
    pub objective: f64,
    /// The exact vertex, when the mode computed one.
    pub exact: Option<LpSolution<BigRational>>,
    pub basis: Basis,
    pub stats: SolveStats,
    q: usize,
    n: usize,
}

impl DecodeResult {
    pub fn is_codeword(&self) -> bool {
        matches!(self.outcome, Outcome::Codeword(_))
    }

    pub fn word(&self) -> Option<&[Elem]> {
        match &self.outcome {
            Outcome::Codeword(c) => Some(c),
            Outcome::Fractional => None,
        }
    }

    /// The `f` block.
    pub fn f(&self) -> &[f64] {
        &self.values[..self.n * (self.q - 1)]
    }

    /// Per-position symbol estimate: the decoded word when integral, else
    /// the symbol with the largest `f_i(a)`, taking `f_i(0) = 1 - sum_a f_i(a)`
    /// (ties to the smaller symbol).
    pub fn symbol_estimate(&self) -> Vec<Elem> {
        if let Outcome::Codeword(c) = &self.outcome {
            return c.clone();
        }
        self.f()
            .chunks(self.q - 1)
            .map(|block| {
                let mut best = (0, 1.0 - block.iter().sum::<f64>());
                for (a, &v) in block.iter().enumerate() {
                    if v > best.1 + INTEGRALITY_TOL {
                        best = (a + 1, v);
                    }
                }
                best.0
            })
            .collect()
    }
}

/// Relative cost tilt used by [`LpDecoder::tie_check`].
pub const TIE_TILT: f64 = 1e-6;

/// How one trial ended relative to the transmitted word.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrialOutcome {
    Success,
    /// Fractional LP optimum.
    Fractional,
    /// Integral optimum different from the transmitted word.
    MlError,
}

impl TrialOutcome {
    pub fn classify(result: &DecodeResult, sent: &[Elem]) -> Self {
        match &result.outcome {
            Outcome::Fractional => TrialOutcome::Fractional,
            Outcome::Codeword(c) if c == sent => TrialOutcome::Success,
            Outcome::Codeword(_) => TrialOutcome::MlError,
        }
    }

    pub fn is_failure(self) -> bool {
        self != TrialOutcome::Success
    }
}

/// LP decoder for a fixed code. The constraint matrix and a feasible
/// starting basis are built once and shared by every decode.
#[derive(Debug, Clone)]
pub struct LpDecoder {
    code: Code,
    layout: VariableLayout,
    lp: LinearProgram,
    start: Basis,
    // Optimal bases of codeword vertices, keyed by codeword.
    vertex_bases: Arc<Mutex<HashMap<Vec<Elem>, Basis>>>,
    mode: DecodeMode,
    tol: f64,
}

impl LpDecoder {
    pub fn new(code: Code, mode: DecodeMode) -> Result<Self> {
        let layout = VariableLayout::new(&code)?;
        let lp = layout.template();
        // Start every solve from the optimal basis for the all-zero codeword.
        let mut toward_zero = vec![1.0; layout.num_f()];
        toward_zero.resize(layout.num_vars(), 0.0);
        let s = lp::solve_with(&lp, toward_zero);
        if !s.is_optimal() {
            return Err(Error::Solver("decoding polytope reported infeasible".into()));
        }
        let start = s.basis;
        Ok(LpDecoder {
            code,
            layout,
            lp,
            start,
            vertex_bases: Arc::default(),
            mode,
            tol: INTEGRALITY_TOL,
        })
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn code(&self) -> &Code {
        &self.code
    }

    pub fn layout(&self) -> &VariableLayout {
        &self.layout
    }

    pub fn mode(&self) -> DecodeMode {
        self.mode
    }

    /// Constraint matrix with a zero objective.
    pub fn template(&self) -> &LinearProgram {
        &self.lp
    }

    /// Solves `min lambda . f` over `Q` and classifies the optimum.
    ///
    /// Infeasible, unbounded or stalled solves are returned as errors (decode
    /// aborts), as is an integral optimum that is not a codeword.
    pub fn decode(&self, costs: &CostVector) -> Result<DecodeResult> {
        self.decode_objective(self.layout.objective(costs)?, &self.start)
    }

    /// Like [`LpDecoder::decode`], but the simplex starts at the vertex of
    /// the codeword `hint`. The optimum does not depend on the start; a hint
    /// near the answer only saves pivots.
    pub fn decode_with_hint(&self, costs: &CostVector, hint: &[Elem]) -> Result<DecodeResult> {
        let objective = self.layout.objective(costs)?;
        if hint.iter().all(|&a| a == 0) {
            return self.decode_objective(objective, &self.start);
        }
        let start = self.vertex_basis(hint)?;
        self.decode_objective(objective, &start)
    }

    /// Optimal basis of the vertex `xi(c)`, solved once per codeword.
    pub fn vertex_basis(&self, c: &[Elem]) -> Result<Basis> {
        if let Some(b) = self.vertex_bases.lock().expect("cache lock").get(c) {
            return Ok(b.clone());
        }
        if !self.code.is_codeword(c) {
            return Err(Error::InvalidCode(format!("{c:?} is not a codeword")));
        }
        // Unit cost away from c and negative unit cost toward it.
        let mut objective = vec![1.0; self.layout.num_f()];
        objective.resize(self.layout.num_vars(), 0.0);
        for (i, &a) in c.iter().enumerate() {
            if a != 0 {
                objective[self.layout.f_col(i, a)] = -1.0;
            }
        }
        let s = lp::solve_from_basis(&self.lp, objective, &self.start);
        check_status(s.status)?;
        self.vertex_bases
            .lock()
            .expect("cache lock")
            .insert(c.to_vec(), s.basis.clone());
        Ok(s.basis)
    }

    /// Decides whether `sent` is the unique optimum for `costs`, given a
    /// decode that returned it. The costs are tilted by a relative
    /// [`TIE_TILT`] against agreement with `sent` and the LP is re-solved from
    /// the previous basis; a tie then surfaces as a different optimum, which is
    /// returned. `None` means `sent` survived.
    pub fn tie_check(&self, costs: &CostVector, sent: &[Elem], result: &DecodeResult) -> Result<Option<DecodeResult>> {
        let mut objective = self.layout.objective(costs)?;
        let scale = objective.iter().fold(0.0f64, |m, c| m.max(c.abs()));
        let delta = TIE_TILT * if scale > 0.0 { scale } else { 1.0 };
        for (i, &s) in sent.iter().enumerate() {
            if s == 0 {
                for a in 1..self.layout.q() {
                    objective[self.layout.f_col(i, a)] -= delta;
                }
            } else {
                objective[self.layout.f_col(i, s)] += delta;
            }
        }
        let tilted = self.decode_objective(objective, &result.basis)?;
        Ok((tilted.word() != Some(sent)).then_some(tilted))
    }

    fn decode_objective(&self, objective: Vec<f64>, start: &Basis) -> Result<DecodeResult> {
        let mut stats = SolveStats::default();
        let (values, obj, basis, exact) = match self.mode {
            DecodeMode::Float | DecodeMode::FloatRecheck => {
                let s = lp::solve_from_basis(&self.lp, objective.clone(), start);
                stats.iterations = s.iterations;
                stats.used_bland = s.used_bland;
                if s.status == LpStatus::Stalled {
                    stats.rational_fallback = true;
                    let r = self.solve_exact(&objective, None)?;
                    stats.iterations += r.iterations;
                    (r.values_f64(), r.objective.to_f64(), r.basis.clone(), Some(r))
                } else {
                    check_status(s.status)?;
                    if self.mode == DecodeMode::FloatRecheck {
                        let r = self.solve_exact(&objective, Some(&s.basis))?;
                        stats.iterations += r.iterations;
                        (r.values_f64(), r.objective.to_f64(), r.basis.clone(), Some(r))
                    } else {
                        (s.values, s.objective, s.basis, None)
                    }
                }
            }
            DecodeMode::Rational => {
                let r = self.solve_exact(&objective, None)?;
                stats.iterations = r.iterations;
                stats.used_bland = r.used_bland;
                (r.values_f64(), r.objective.to_f64(), r.basis.clone(), Some(r))
            }
        };
        let f_range = self.layout.f_range();
        let word = match &exact {
            Some(r) => lp::is_integral_exact(&r.values, f_range.clone())
                .then(|| xi_inverse(&values[f_range.clone()], self.layout.q(), 0.0))
                .flatten(),
            None => lp::is_integral(&values, f_range.clone(), self.tol)
                .then(|| xi_inverse(&values[f_range.clone()], self.layout.q(), self.tol))
                .flatten(),
        };
        let outcome = match word {
            Some(c) => {
                if !self.code.is_codeword(&c) {
                    return Err(Error::Solver(format!("integral LP optimum {c:?} is not a codeword")));
                }
                Outcome::Codeword(c)
            }
            None => Outcome::Fractional,
        };
        Ok(DecodeResult {
            outcome,
            values,
            objective: obj,
            exact,
            basis,
            stats,
            q: self.layout.q(),
            n: self.layout.n(),
        })
    }

    /// Exact optimum for the given costs, starting from `basis` when supplied
    /// (typically the float-optimal one).
    pub fn solve_exact_for(&self, costs: &CostVector, basis: Option<&Basis>) -> Result<LpSolution<BigRational>> {
        let objective = self.layout.objective(costs)?;
        self.solve_exact(&objective, basis)
    }

    fn solve_exact(&self, objective: &[f64], basis: Option<&Basis>) -> Result<LpSolution<BigRational>> {
        let obj: Vec<BigRational> = objective.iter().map(|&c| crate::lp::exact(c)).collect();
        let s = lp::solve_from_basis(&self.lp, obj, basis.unwrap_or(&self.start));
        check_status(s.status)?;
        Ok(s)
    }
}

fn check_status(status: LpStatus) -> Result<()> {
    match status {
        LpStatus::Optimal => Ok(()),
        other => Err(Error::Solver(format!("decoding LP ended with status {other:?}"))),
    }
}

/// Exact `lambda . xi(c)`, reading each cost as the dyadic rational it is.
pub fn exact_word_cost(costs: &CostVector, c: &[Elem]) -> BigRational {
    c.iter()
        .enumerate()
        .filter(|(_, &v)| v != 0)
        .fold(<BigRational as Zero>::zero(), |acc, (i, &v)| acc + crate::lp::exact(costs.get(i, v)))
}

/// Brute-force ML decoding over an explicit codeword list.
#[derive(Debug, Clone)]
pub struct MlOracle {
    codewords: Vec<Vec<Elem>>,
}

impl MlOracle {
    /// Enumerates the code; codewords are kept in lexicographic order.
    pub fn new(code: &Code) -> Result<Self> {
        let mut codewords: Vec<Vec<Elem>> = code.codewords()?.collect();
        codewords.sort();
        Ok(MlOracle { codewords })
    }

    pub fn codewords(&self) -> &[Vec<Elem>] {
        &self.codewords
    }

    /// Codeword of least cost; the lexicographically smallest among ties.
    pub fn decode_soft(&self, costs: &CostVector) -> (&[Elem], f64) {
        let mut best = (0, f64::INFINITY);
        for (k, c) in self.codewords.iter().enumerate() {
            let v = costs.word_cost(c);
            if v < best.1 {
                best = (k, v);
            }
        }
        (&self.codewords[best.0], best.1)
    }

    /// Exact minimum cost and the lexicographically first codeword attaining it.
    pub fn decode_soft_exact(&self, costs: &CostVector) -> (&[Elem], BigRational) {
        let mut best: Option<(usize, BigRational)> = None;
        for (k, c) in self.codewords.iter().enumerate() {
            let v = exact_word_cost(costs, c);
            if best.as_ref().map_or(true, |(_, b)| v < *b) {
                best = Some((k, v));
            }
        }
        let (k, v) = best.expect("a code contains the zero word");
        (&self.codewords[k], v)
    }

    /// Codeword nearest in Hamming distance; lexicographic tie-break.
    pub fn decode_hard(&self, y: &[Elem]) -> &[Elem] {
        self.codewords
            .iter()
            .min_by(|a, b| {
                let da = distance(a, y);
                let db = distance(b, y);
                da.cmp(&db).then_with(|| a.cmp(b))
            })
            .expect("a code contains the zero word")
    }

    /// All codewords at minimum Hamming distance from `y`.
    pub fn nearest_set(&self, y: &[Elem]) -> Vec<&[Elem]> {
        let d = self.codewords.iter().map(|c| distance(c, y)).min().unwrap_or(0);
        self.codewords
            .iter()
            .filter(|c| distance(c, y) == d)
            .map(Vec::as_slice)
            .collect()
    }
}

fn distance(a: &[Elem], b: &[Elem]) -> usize {
    a.iter().zip(b).filter(|(x, y)| x != y).count()
}

/// Number of positions where the estimate differs from the sent word.
pub fn symbol_errors(estimate: &[Elem], sent: &[Elem]) -> usize {
    debug_assert_eq!(estimate.len(), sent.len());
    distance(estimate, sent)
}

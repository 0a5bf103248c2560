//! Bounded-variable revised simplex with an explicit basis inverse.
//!
//! Problems are `min c.x  s.t.  A x = b,  0 <= x <= u`. One artificial
//! column per row gives the phase-one basis; in phase two the artificials
//! are fixed at zero, so rows that turn out to be redundant simply keep a
//! zero-valued artificial in the basis.
//!
//! Pricing is Dantzig's rule with smallest-index tie-breaking. After
//! [`DEGENERATE_RUN_LIMIT`] consecutive degenerate pivots the solve switches
//! permanently to Bland's rule, which cannot cycle.

use std::cmp::Ordering;

use super::scalar::Scalar;
use super::{Basis, LinearProgram, LpSolution, LpStatus};

pub const DEGENERATE_RUN_LIMIT: usize = 50;
const REFACTOR_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum VarState {
    Basic(usize),
    Lower,
    Upper,
}

enum Phase {
    Optimal,
    Unbounded,
    Stalled,
}

pub(crate) struct Simplex<T: Scalar> {
    m: usize,
    n: usize,
    col_start: Vec<usize>,
    row_idx: Vec<usize>,
    vals: Vec<T>,
    rhs: Vec<T>,
    upper: Vec<Option<T>>,
    objective: Vec<T>,
    cost: Vec<T>,
    basis: Vec<usize>,
    state: Vec<VarState>,
    binv: Vec<T>,
    xb: Vec<T>,
    iterations: usize,
    iteration_limit: usize,
    since_refactor: usize,
    degenerate_run: usize,
    bland: bool,
}

impl<T: Scalar> Simplex<T> {
    pub(crate) fn new(lp: &LinearProgram, objective: Vec<T>) -> Self {
        let m = lp.num_rows();
        let n = lp.num_cols();
        assert_eq!(objective.len(), n, "objective length");
        let mut col_start = Vec::with_capacity(n + m + 1);
        let mut row_idx = Vec::new();
        let mut vals = Vec::new();
        col_start.push(0);
        for col in lp.columns() {
            for &(r, v) in col {
                if v != 0.0 {
                    row_idx.push(r);
                    vals.push(T::from_f64(v));
                }
            }
            col_start.push(row_idx.len());
        }
        let rhs: Vec<T> = lp.rhs().iter().map(|&v| T::from_f64(v)).collect();
        let signs: Vec<T> = lp
            .rhs()
            .iter()
            .map(|&v| if v < 0.0 { T::one().neg() } else { T::one() })
            .collect();
        for (r, s) in signs.iter().enumerate() {
            row_idx.push(r);
            vals.push(s.clone());
            col_start.push(row_idx.len());
        }
        let mut upper: Vec<Option<T>> = lp.upper().iter().map(|u| u.map(T::from_f64)).collect();
        upper.extend((0..m).map(|_| None));

        let mut binv = vec![T::zero(); m * m];
        for (r, s) in signs.iter().enumerate() {
            binv[r * m + r] = s.clone();
        }
        let xb: Vec<T> = rhs.iter().zip(&signs).map(|(b, s)| b.mul(s)).collect();
        let mut state = vec![VarState::Lower; n + m];
        for r in 0..m {
            state[n + r] = VarState::Basic(r);
        }
        Simplex {
            m,
            n,
            col_start,
            row_idx,
            vals,
            rhs,
            upper,
            objective: objective.clone(),
            cost: objective,
            basis: (n..n + m).collect(),
            state,
            binv,
            xb,
            iterations: 0,
            iteration_limit: 50 * (n + 2 * m) + 1000,
            since_refactor: 0,
            degenerate_run: 0,
            bland: false,
        }
    }

    fn total(&self) -> usize {
        self.n + self.m
    }

    fn column(&self, j: usize) -> impl Iterator<Item = (usize, &T)> {
        let span = self.col_start[j]..self.col_start[j + 1];
        self.row_idx[span.clone()].iter().copied().zip(&self.vals[span])
    }

    fn fixed(&self, j: usize) -> bool {
        matches!(&self.upper[j], Some(u) if u.is_exact_zero())
    }

    fn nonbasic_value(&self, j: usize) -> T {
        match self.state[j] {
            VarState::Upper => self.upper[j].clone().expect("at upper bound implies finite bound"),
            _ => T::zero(),
        }
    }

    /// Two-phase solve from the artificial basis.
    pub(crate) fn solve(mut self) -> LpSolution<T> {
        let phase1_cost: Vec<T> = (0..self.total())
            .map(|j| if j >= self.n { T::one() } else { T::zero() })
            .collect();
        self.cost = phase1_cost;
        match self.run() {
            Phase::Optimal => {}
            Phase::Unbounded => unreachable!("phase one is bounded below by zero"),
            Phase::Stalled => return self.finish(LpStatus::Stalled, 0),
        }
        let infeasibility = self
            .basis
            .iter()
            .zip(&self.xb)
            .filter(|(&j, _)| j >= self.n)
            .fold(T::zero(), |acc, (_, x)| acc.add(x));
        if infeasibility.is_pos() {
            let it = self.iterations;
            return self.finish(LpStatus::Infeasible, it);
        }
        let phase1 = self.iterations;
        self.enter_phase_two();
        self.phase_two(phase1)
    }

    /// Phase-two solve from a caller-supplied basis. Returns `None` when the
    /// basis is singular or not primal feasible.
    pub(crate) fn solve_from(mut self, start: &Basis) -> Option<LpSolution<T>> {
        if start.basic.len() != self.m
            || start.basic.iter().chain(&start.at_upper).any(|&j| j >= self.total())
        {
            return None;
        }
        self.enter_phase_two();
        self.state = vec![VarState::Lower; self.total()];
        for (r, &j) in start.basic.iter().enumerate() {
            if self.state[j] != VarState::Lower {
                return None;
            }
            self.state[j] = VarState::Basic(r);
        }
        for &j in &start.at_upper {
            if self.state[j] != VarState::Lower || self.upper[j].is_none() {
                return None;
            }
            self.state[j] = VarState::Upper;
        }
        self.basis = start.basic.clone();
        if !self.refactor() {
            return None;
        }
        let feasible = self.basis.iter().zip(&self.xb).all(|(&j, x)| {
            !x.is_neg() && self.upper[j].as_ref().map_or(true, |u| !x.sub(u).is_pos())
        });
        if !feasible {
            return None;
        }
        Some(self.phase_two(0))
    }

    fn enter_phase_two(&mut self) {
        for r in 0..self.m {
            self.upper[self.n + r] = Some(T::zero());
        }
        let mut cost = self.objective.clone();
        cost.extend((0..self.m).map(|_| T::zero()));
        self.cost = cost;
    }

    fn phase_two(mut self, phase1: usize) -> LpSolution<T> {
        match self.run() {
            Phase::Optimal => self.finish(LpStatus::Optimal, phase1),
            Phase::Unbounded => self.finish(LpStatus::Unbounded, phase1),
            Phase::Stalled => self.finish(LpStatus::Stalled, phase1),
        }
    }

    fn duals(&self) -> Vec<T> {
        let m = self.m;
        let mut y = vec![T::zero(); m];
        for (r, &j) in self.basis.iter().enumerate() {
            let c = &self.cost[j];
            if c.is_exact_zero() {
                continue;
            }
            let row = &self.binv[r * m..(r + 1) * m];
            for (yk, b) in y.iter_mut().zip(row) {
                if !b.is_exact_zero() {
                    *yk = yk.add(&c.mul(b));
                }
            }
        }
        y
    }

    fn reduced_cost(&self, j: usize, y: &[T]) -> T {
        let mut d = self.cost[j].clone();
        for (r, a) in self.column(j) {
            d.sub_mul_assign(&y[r], a);
        }
        d
    }

    /// Entering candidate and whether it increases from its lower bound.
    fn price(&self) -> Option<(usize, bool)> {
        let y = self.duals();
        let mut best: Option<(usize, bool, T)> = None;
        for j in 0..self.total() {
            let increasing = match self.state[j] {
                VarState::Basic(_) => continue,
                VarState::Lower => true,
                VarState::Upper => false,
            };
            if self.fixed(j) {
                continue;
            }
            let d = self.reduced_cost(j, &y);
            let eligible = if increasing { d.is_neg() } else { d.is_pos() };
            if !eligible {
                continue;
            }
            if self.bland {
                return Some((j, increasing));
            }
            let better = best
                .as_ref()
                .map_or(true, |(_, _, b)| d.abs_cmp(b) == Ordering::Greater);
            if better {
                best = Some((j, increasing, d));
            }
        }
        best.map(|(j, inc, _)| (j, inc))
    }

    fn ftran(&self, j: usize) -> Vec<T> {
        let m = self.m;
        let mut alpha = vec![T::zero(); m];
        for (k, a) in self.column(j) {
            for (r, out) in alpha.iter_mut().enumerate() {
                let b = &self.binv[r * m + k];
                if !b.is_exact_zero() {
                    *out = out.add(&b.mul(a));
                }
            }
        }
        alpha
    }

    fn run(&mut self) -> Phase {
        loop {
            if self.iterations >= self.iteration_limit {
                return Phase::Stalled;
            }
            if !T::EXACT && self.since_refactor >= REFACTOR_EVERY && !self.refactor() {
                return Phase::Stalled;
            }
            let Some((q, increasing)) = self.price() else {
                // Confirm optimality against a fresh factorization.
                if !T::EXACT && self.since_refactor > 0 {
                    if !self.refactor() {
                        return Phase::Stalled;
                    }
                    if self.price().is_some() {
                        continue;
                    }
                }
                return Phase::Optimal;
            };
            self.iterations += 1;
            let alpha = self.ftran(q);
            let dir = if increasing { T::one() } else { T::one().neg() };

            // Ratio test: basic x_r moves by -t * g_r.
            let mut limits: Vec<(usize, T, T)> = Vec::new();
            for (r, a) in alpha.iter().enumerate() {
                if !a.pivotable() {
                    continue;
                }
                let g = a.mul(&dir);
                let j = self.basis[r];
                let lim = if g.is_pos() {
                    let x = &self.xb[r];
                    if x.is_neg() || x.is_exact_zero() {
                        T::zero()
                    } else {
                        x.div(&g)
                    }
                } else if let Some(u) = &self.upper[j] {
                    let room = u.sub(&self.xb[r]);
                    if room.is_neg() || room.is_exact_zero() {
                        T::zero()
                    } else {
                        room.div(&g.neg())
                    }
                } else {
                    continue;
                };
                limits.push((r, lim, g));
            }
            let t_min = limits.iter().map(|(_, l, _)| l).min_by(|a, b| a.cmp(b)).cloned();
            let flip = self.upper[q].clone();
            let leave = t_min.as_ref().and_then(|t_min| {
                let tied = |l: &T| {
                    if T::EXACT {
                        l.cmp(t_min) == Ordering::Equal
                    } else {
                        l.sub(t_min).is_negligible()
                    }
                };
                let ties = limits.iter().filter(|(_, l, _)| tied(l));
                if self.bland {
                    ties.min_by_key(|(r, _, _)| self.basis[*r])
                } else {
                    // Largest pivot among near-ties, then smallest variable index.
                    ties.max_by(|a, b| {
                        a.2.abs_cmp(&b.2)
                            .then_with(|| self.basis[b.0].cmp(&self.basis[a.0]))
                    })
                }
                .cloned()
            });

            let (t, pivot) = match (leave, flip) {
                (None, None) => return Phase::Unbounded,
                (None, Some(u)) => (u, None),
                (Some((_, lim, _)), Some(u)) if u.cmp(&lim) != Ordering::Greater => (u, None),
                (Some((r, lim, g)), _) => (lim, Some((r, g))),
            };

            if t.is_negligible() {
                self.degenerate_run += 1;
                if self.degenerate_run > DEGENERATE_RUN_LIMIT {
                    self.bland = true;
                }
            } else {
                self.degenerate_run = 0;
            }

            let step = t.mul(&dir);
            for (x, a) in self.xb.iter_mut().zip(&alpha) {
                x.sub_mul_assign(&step, a);
            }
            match pivot {
                None => {
                    self.state[q] = if increasing { VarState::Upper } else { VarState::Lower };
                }
                Some((p, g)) => {
                    let out = self.basis[p];
                    let entering_value = self.nonbasic_value(q).add(&step);
                    self.pivot(p, &alpha);
                    self.xb[p] = entering_value;
                    self.basis[p] = q;
                    self.state[q] = VarState::Basic(p);
                    self.state[out] = if g.is_pos() { VarState::Lower } else { VarState::Upper };
                    if self.state[out] == VarState::Upper && self.upper[out].is_none() {
                        self.state[out] = VarState::Lower;
                    }
                }
            }
        }
    }

    fn pivot(&mut self, p: usize, alpha: &[T]) {
        let m = self.m;
        let inv = T::one().div(&alpha[p]);
        for k in 0..m {
            let v = &mut self.binv[p * m + k];
            if !v.is_exact_zero() {
                *v = v.mul(&inv);
            }
        }
        let pivot_row: Vec<T> = self.binv[p * m..(p + 1) * m].to_vec();
        for (r, a) in alpha.iter().enumerate() {
            if r == p || a.is_exact_zero() {
                continue;
            }
            let row = &mut self.binv[r * m..(r + 1) * m];
            for (v, pr) in row.iter_mut().zip(&pivot_row) {
                v.sub_mul_assign(a, pr);
            }
        }
        self.since_refactor += 1;
    }

    /// Rebuilds the basis inverse and basic values from scratch.
    fn refactor(&mut self) -> bool {
        let m = self.m;
        let mut bmat = vec![T::zero(); m * m];
        for (c, &j) in self.basis.iter().enumerate() {
            for (r, a) in self.column(j) {
                bmat[r * m + c] = a.clone();
            }
        }
        let mut inv = vec![T::zero(); m * m];
        for r in 0..m {
            inv[r * m + r] = T::one();
        }
        // Gauss-Jordan with partial pivoting.
        for col in 0..m {
            let p = (col..m)
                .filter(|&r| bmat[r * m + col].pivotable())
                .max_by(|&a, &b| bmat[a * m + col].abs_cmp(&bmat[b * m + col]).then(b.cmp(&a)));
            let Some(p) = p else {
                return false;
            };
            if p != col {
                for k in 0..m {
                    bmat.swap(p * m + k, col * m + k);
                    inv.swap(p * m + k, col * m + k);
                }
            }
            let pinv = T::one().div(&bmat[col * m + col]);
            for k in 0..m {
                let idx = col * m + k;
                if !bmat[idx].is_exact_zero() {
                    bmat[idx] = bmat[idx].mul(&pinv);
                }
                if !inv[idx].is_exact_zero() {
                    inv[idx] = inv[idx].mul(&pinv);
                }
            }
            let brow: Vec<T> = bmat[col * m..(col + 1) * m].to_vec();
            let irow: Vec<T> = inv[col * m..(col + 1) * m].to_vec();
            for r in 0..m {
                if r == col {
                    continue;
                }
                let f = bmat[r * m + col].clone();
                if f.is_exact_zero() {
                    continue;
                }
                for k in 0..m {
                    bmat[r * m + k].sub_mul_assign(&f, &brow[k]);
                    inv[r * m + k].sub_mul_assign(&f, &irow[k]);
                }
            }
        }
        self.binv = inv;
        // x_B = B^-1 (b - sum_{j at upper} A_j u_j)
        let mut resid = self.rhs.clone();
        for j in 0..self.total() {
            if self.state[j] == VarState::Upper {
                let u = self.nonbasic_value(j);
                for (r, a) in self.column(j) {
                    resid[r].sub_mul_assign(a, &u);
                }
            }
        }
        self.xb = (0..m)
            .map(|r| {
                let row = &self.binv[r * m..(r + 1) * m];
                row.iter()
                    .zip(&resid)
                    .filter(|(b, _)| !b.is_exact_zero())
                    .fold(T::zero(), |acc, (b, x)| acc.add(&b.mul(x)))
            })
            .collect();
        self.since_refactor = 0;
        true
    }

    fn finish(self, status: LpStatus, phase1_iterations: usize) -> LpSolution<T> {
        let mut values = vec![T::zero(); self.n];
        for (j, v) in values.iter_mut().enumerate() {
            *v = match self.state[j] {
                VarState::Basic(r) => self.xb[r].clone(),
                _ => self.nonbasic_value(j),
            };
        }
        let objective = values
            .iter()
            .zip(&self.objective)
            .filter(|(x, _)| !x.is_exact_zero())
            .fold(T::zero(), |acc, (x, c)| acc.add(&x.mul(c)));
        let at_upper = (0..self.total())
            .filter(|&j| self.state[j] == VarState::Upper)
            .collect();
        LpSolution {
            status,
            values,
            objective,
            basis: Basis {
                basic: self.basis.clone(),
                at_upper,
            },
            iterations: self.iterations,
            phase1_iterations,
            used_bland: self.bland,
        }
    }
}

//! The relaxed decoding polytope `Q` and its variable layout.
//!
//! Columns are the indicator variables `f` (position-major, `n(q-1)` of
//! them) followed by one auxiliary variable `w` per local codeword of each
//! check. Rows are one normalization equality per check followed by the
//! linking equalities `f_i(a) - sum w = 0`, ordered by check, support
//! position and symbol.

use std::fmt::Write as _;
use std::ops::Range;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::channel::CostVector;
use crate::code::{Code, LocalConfig};
use crate::error::{Error, Result};
use crate::lp::LinearProgram;
use crate::ring::Elem;

/// Default membership tolerance in floating point.
pub const MEMBERSHIP_TOL: f64 = 1e-9;

/// Column and row indexing for the decoding LP of one code.
#[derive(Debug, Clone)]
pub struct VariableLayout {
    n: usize,
    q: usize,
    m: usize,
    w_offsets: Vec<usize>,
    link_offsets: Vec<usize>,
    local: Vec<Vec<LocalConfig>>,
    supports: Vec<Vec<usize>>,
}

impl VariableLayout {
    pub fn new(code: &Code) -> Result<Self> {
        let q = code.ring().q();
        let local = code.all_local_codewords()?;
        let f_len = code.n() * (q - 1);
        let mut w_offsets = Vec::with_capacity(code.m());
        let mut link_offsets = Vec::with_capacity(code.m());
        let (mut col, mut row) = (f_len, code.m());
        for (j, e) in local.iter().enumerate() {
            w_offsets.push(col);
            link_offsets.push(row);
            col += e.len();
            row += code.support(j).len() * (q - 1);
        }
        Ok(VariableLayout {
            n: code.n(),
            q,
            m: code.m(),
            w_offsets,
            link_offsets,
            local,
            supports: (0..code.m()).map(|j| code.support(j).to_vec()).collect(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Column of `f_i(a)`, `a != 0`.
    #[inline]
    pub fn f_col(&self, i: usize, a: Elem) -> usize {
        debug_assert!(a >= 1 && a < self.q);
        i * (self.q - 1) + a - 1
    }

    /// Column of `w_{j,S}` for the `k`-th local codeword of check `j`.
    #[inline]
    pub fn w_col(&self, j: usize, k: usize) -> usize {
        self.w_offsets[j] + k
    }

    pub fn f_range(&self) -> Range<usize> {
        0..self.n * (self.q - 1)
    }

    pub fn w_range(&self, j: usize) -> Range<usize> {
        self.w_offsets[j]..self.w_offsets[j] + self.local[j].len()
    }

    pub fn num_f(&self) -> usize {
        self.n * (self.q - 1)
    }

    pub fn num_w(&self) -> usize {
        self.local.iter().map(Vec::len).sum()
    }

    pub fn num_vars(&self) -> usize {
        self.num_f() + self.num_w()
    }

    pub fn num_rows(&self) -> usize {
        self.m + self.num_linking_rows()
    }

    pub fn num_linking_rows(&self) -> usize {
        self.supports.iter().map(|s| s.len() * (self.q - 1)).sum()
    }

    /// Row of the linking equality for check `j`, the `k`-th support
    /// position and symbol `a`.
    #[inline]
    pub fn link_row(&self, j: usize, k: usize, a: Elem) -> usize {
        self.link_offsets[j] + k * (self.q - 1) + a - 1
    }

    /// `E_j` in layout order.
    pub fn local_codewords(&self, j: usize) -> &[LocalConfig] {
        &self.local[j]
    }

    pub fn support(&self, j: usize) -> &[usize] {
        &self.supports[j]
    }

    /// Human-readable name of a column.
    pub fn column_name(&self, col: usize) -> String {
        if col < self.num_f() {
            format!("f_{}_{}", col / (self.q - 1), col % (self.q - 1) + 1)
        } else {
            let j = self.w_offsets.partition_point(|&o| o <= col) - 1;
            format!("w_{}_{}", j, col - self.w_offsets[j])
        }
    }

    /// Builds the constraint matrix with a zero objective.
    pub fn template(&self) -> LinearProgram {
        let total = self.num_vars();
        let mut columns: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
        for j in 0..self.m {
            for (k, cfg) in self.local[j].iter().enumerate() {
                let col = &mut columns[self.w_col(j, k)];
                col.push((j, 1.0));
                for (p, &v) in cfg.values.iter().enumerate() {
                    if v != 0 {
                        col.push((self.link_row(j, p, v), -1.0));
                    }
                }
            }
            for (p, &i) in self.supports[j].iter().enumerate() {
                for a in 1..self.q {
                    columns[self.f_col(i, a)].push((self.link_row(j, p, a), 1.0));
                }
            }
        }
        for col in &mut columns {
            col.sort_by_key(|&(r, _)| r);
        }
        let mut rhs = vec![0.0; self.num_rows()];
        rhs[..self.m].fill(1.0);
        LinearProgram::new(self.num_rows(), columns, rhs, vec![Some(1.0); total], vec![0.0; total])
    }

    /// LP objective: the costs on `f`, zero on `w`.
    pub fn objective(&self, costs: &CostVector) -> Result<Vec<f64>> {
        if costs.q() != self.q || costs.n() != self.n {
            return Err(Error::DimensionMismatch {
                expected: self.num_f(),
                actual: costs.as_slice().len(),
            });
        }
        let mut c = costs.as_slice().to_vec();
        c.resize(self.num_vars(), 0.0);
        Ok(c)
    }

    /// The integral point of `Q` induced by a codeword: `f = xi(c)` and
    /// `w` the indicator of each local view. `None` if `c` is not a codeword.
    pub fn codeword_point(&self, c: &[Elem]) -> Option<Vec<f64>> {
        let mut x = embed_codeword(c, self.q);
        x.resize(self.num_vars(), 0.0);
        for j in 0..self.m {
            let view: Vec<Elem> = self.supports[j].iter().map(|&i| c[i]).collect();
            let k = self.local[j].binary_search_by(|cfg| cfg.values.cmp(&view)).ok()?;
            x[self.w_col(j, k)] = 1.0;
        }
        Some(x)
    }

    /// Uniform `w = 1/|E_j|` with the matching `f`, exactly.
    pub fn uniform_point(&self) -> Vec<BigRational> {
        let mut x = vec![BigRational::zero(); self.num_vars()];
        for j in 0..self.m {
            let size = BigRational::from_integer(self.local[j].len().into());
            let share = BigRational::one() / size;
            for k in 0..self.local[j].len() {
                x[self.w_col(j, k)] = share.clone();
            }
        }
        // Any check gives the same f when the point is consistent; take the
        // first check containing each position.
        let mut f = vec![None; self.num_f()];
        for j in 0..self.m {
            for (p, &i) in self.supports[j].iter().enumerate() {
                if f[self.f_col(i, 1)].is_some() {
                    continue;
                }
                for a in 1..self.q {
                    let mut s = BigRational::zero();
                    for (k, cfg) in self.local[j].iter().enumerate() {
                        if cfg.values[p] == a {
                            s += &x[self.w_col(j, k)];
                        }
                    }
                    f[self.f_col(i, a)] = Some(s);
                }
            }
        }
        for (col, v) in f.into_iter().enumerate() {
            x[col] = v.unwrap_or_else(BigRational::zero);
        }
        x
    }

    /// Whether `(f, w)` satisfies every equality and bound of `Q` within `tol`.
    pub fn contains(&self, f: &[f64], w: &[f64], tol: f64) -> Result<bool> {
        let x = self.join(f, w)?;
        Ok(self.template().max_violation(&x) <= tol)
    }

    /// Exact membership test.
    pub fn contains_exact(&self, x: &[BigRational]) -> Result<bool> {
        if x.len() != self.num_vars() {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars(),
                actual: x.len(),
            });
        }
        Ok(self.template().is_feasible_exact(x))
    }

    fn join(&self, f: &[f64], w: &[f64]) -> Result<Vec<f64>> {
        if f.len() != self.num_f() {
            return Err(Error::DimensionMismatch { expected: self.num_f(), actual: f.len() });
        }
        if w.len() != self.num_w() {
            return Err(Error::DimensionMismatch { expected: self.num_w(), actual: w.len() });
        }
        Ok(f.iter().chain(w).copied().collect())
    }

    /// Writes the LP for `costs` in CPLEX LP text format.
    pub fn to_lp_text(&self, costs: &CostVector) -> Result<String> {
        let obj = self.objective(costs)?;
        let lp = self.template();
        let mut rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); lp.num_rows()];
        for (col, entries) in lp.columns().iter().enumerate() {
            for &(r, a) in entries {
                rows[r].push((col, a));
            }
        }
        let term = |out: &mut String, first: bool, a: f64, col: usize| {
            let sign = if a < 0.0 { " -" } else if first { "" } else { " +" };
            let mag = a.abs();
            let coef = if mag == 1.0 { String::new() } else { format!("{mag:e} ") };
            let _ = write!(out, "{sign} {coef}{}", self.column_name(col));
        };
        let mut out = String::from("\\ LP decoding relaxation\nMinimize\n obj:");
        let mut first = true;
        for (col, &c) in obj.iter().enumerate() {
            if c != 0.0 {
                term(&mut out, first, c, col);
                first = false;
            }
        }
        if first {
            out.push_str(" 0 f_0_1");
        }
        out.push_str("\nSubject To\n");
        for (r, entries) in rows.iter().enumerate() {
            let name = if r < self.m { format!("norm_{r}") } else { format!("link_{r}") };
            let _ = write!(out, " {name}:");
            for (t, &(col, a)) in entries.iter().enumerate() {
                term(&mut out, t == 0, a, col);
            }
            let _ = writeln!(out, " = {}", lp.rhs()[r]);
        }
        out.push_str("Bounds\n");
        for col in 0..self.num_vars() {
            let _ = writeln!(out, " 0 <= {} <= 1", self.column_name(col));
        }
        out.push_str("End\n");
        Ok(out)
    }
}

/// The decoding LP for a code and cost vector.
pub fn build_lp(code: &Code, costs: &CostVector) -> Result<(VariableLayout, LinearProgram)> {
    let layout = VariableLayout::new(code)?;
    let mut lp = layout.template();
    lp.set_objective(layout.objective(costs)?);
    Ok((layout, lp))
}

/// `xi` applied position-wise: the indicator of `c_i` among the nonzero
/// symbols, all zeros for `c_i = 0`.
pub fn embed_codeword(c: &[Elem], q: usize) -> Vec<f64> {
    let mut f = vec![0.0; c.len() * (q - 1)];
    for (i, &v) in c.iter().enumerate() {
        if v != 0 {
            f[i * (q - 1) + v - 1] = 1.0;
        }
    }
    f
}

/// Inverse of [`embed_codeword`] on points within `tol` of `{0,1}` whose
/// per-position blocks have at most one entry near 1.
pub fn xi_inverse(f: &[f64], q: usize, tol: f64) -> Option<Vec<Elem>> {
    f.chunks(q - 1)
        .map(|block| {
            let mut sym = 0;
            for (a, &v) in block.iter().enumerate() {
                if (v - 1.0).abs() <= tol {
                    if sym != 0 {
                        return None;
                    }
                    sym = a + 1;
                } else if v.abs() > tol {
                    return None;
                }
            }
            Some(sym)
        })
        .collect()
}

/// The inequalities `0 <= f_i(a) <= 1` and `sum_a f_i(a) <= 1`, which every
/// point of `Q` satisfies.
pub fn derived_bounds_hold(f: &[f64], q: usize, tol: f64) -> bool {
    f.chunks(q - 1).all(|block| {
        block.iter().all(|&v| v >= -tol && v <= 1.0 + tol) && block.iter().sum::<f64>() <= 1.0 + tol
    })
}

//! LP pseudocodewords, graph covers and the maps between them.

use std::collections::VecDeque;
use std::fmt::{self, Write as _};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::seq::SliceRandom;
use rand::Rng;

use crate::channel::CostVector;
use crate::code::Code;
use crate::error::{Error, Result};
use crate::lp;
use crate::polytope::VariableLayout;
use crate::ring::Elem;

/// Largest cover degree [`build_cover`] will materialize.
pub const MAX_COVER_DEGREE: u64 = 1 << 20;

/// An integer point `(h, z)` of the scaled polytope `M * Q`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LpPseudocodeword {
    n: usize,
    q: usize,
    /// `h[i * (q - 1) + a - 1] = h_i(a)` for `a != 0`.
    pub h: Vec<u64>,
    /// `h_i(0)`.
    pub h0: Vec<u64>,
    /// `z[j][k]` for the `k`-th local codeword of check `j`.
    pub z: Vec<Vec<u64>>,
    pub scale: u64,
}

impl LpPseudocodeword {
    /// Scales an exact point of `Q` by the least common denominator of its
    /// coordinates.
    pub fn extract(code: &Code, layout: &VariableLayout, x: &[BigRational]) -> Result<Self> {
        if !code.is_connected() {
            return Err(Error::Pseudocodeword(
                "Tanner graph is disconnected; the scale M is not well defined".into(),
            ));
        }
        if x.len() != layout.num_vars() {
            return Err(Error::DimensionMismatch { expected: layout.num_vars(), actual: x.len() });
        }
        if !layout.contains_exact(x)? {
            return Err(Error::Pseudocodeword("point is not in the polytope".into()));
        }
        let lcd = x.iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        let scale = to_u64(&lcd)?;
        let scaled = |v: &BigRational| -> Result<u64> {
            let s = v * BigRational::from_integer(lcd.clone());
            debug_assert!(s.is_integer());
            to_u64(&s.to_integer())
        };
        let h = x[layout.f_range()].iter().map(scaled).collect::<Result<Vec<_>>>()?;
        let z = (0..layout.m())
            .map(|j| x[layout.w_range(j)].iter().map(scaled).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        let q = layout.q();
        let mut h0 = vec![0; layout.n()];
        for (i, slot) in h0.iter_mut().enumerate() {
            let j = code.checks_of(i)[0];
            let p = layout.support(j).iter().position(|&s| s == i).expect("i in supp");
            *slot = layout
                .local_codewords(j)
                .iter()
                .zip(&z[j])
                .filter(|(cfg, _)| cfg.values[p] == 0)
                .map(|(_, &c)| c)
                .sum();
        }
        let pc = LpPseudocodeword { n: layout.n(), q, h, h0, z, scale };
        let violations = pc.violations(layout);
        if !violations.is_empty() {
            return Err(Error::Pseudocodeword(violations.join("; ")));
        }
        Ok(pc)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn q(&self) -> usize {
        self.q
    }

    #[inline]
    pub fn h(&self, i: usize, a: Elem) -> u64 {
        if a == 0 {
            self.h0[i]
        } else {
            self.h[i * (self.q - 1) + a - 1]
        }
    }

    pub fn is_zero(&self) -> bool {
        self.h.iter().all(|&v| v == 0)
    }

    /// `n x q` matrix with entry `(i, a) = h_i(a)`; rows sum to `M`.
    pub fn matrix_representation(&self) -> Vec<Vec<u64>> {
        (0..self.n)
            .map(|i| (0..self.q).map(|a| self.h(i, a)).collect())
            .collect()
    }

    /// `(f, w) = (h, z) / M` as exact rationals, in layout order.
    pub fn normalize(&self) -> Vec<BigRational> {
        let m = BigRational::from_integer(self.scale.into());
        self.h
            .iter()
            .chain(self.z.iter().flatten())
            .map(|&v| BigRational::from_integer(v.into()) / &m)
            .collect()
    }

    /// `sum_i sum_{a != 0} lambda_i(a) h_i(a)`.
    pub fn cost(&self, costs: &CostVector) -> f64 {
        self.h
            .iter()
            .zip(costs.as_slice())
            .map(|(&h, &l)| h as f64 * l)
            .sum()
    }

    /// [`LpPseudocodeword::cost`] in exact arithmetic.
    pub fn cost_exact(&self, costs: &CostVector) -> BigRational {
        self.h
            .iter()
            .zip(costs.as_slice())
            .filter(|(&h, _)| h != 0)
            .fold(BigRational::zero(), |acc, (&h, &l)| {
                acc + BigRational::from_integer(h.into()) * lp::exact(l)
            })
    }

    /// Violated defining conditions, one message each; empty when valid.
    pub fn violations(&self, layout: &VariableLayout) -> Vec<String> {
        let mut out = Vec::new();
        if self.h.len() != layout.num_f() || self.h0.len() != layout.n() || self.z.len() != layout.m() {
            out.push("dimensions do not match the code".into());
            return out;
        }
        for j in 0..layout.m() {
            let local = layout.local_codewords(j);
            if self.z[j].len() != local.len() {
                out.push(format!("check {j}: z has {} entries, expected {}", self.z[j].len(), local.len()));
                continue;
            }
            let total: u64 = self.z[j].iter().sum();
            if total != self.scale {
                out.push(format!("check {j}: z sums to {total}, expected M = {}", self.scale));
            }
            for (p, &i) in layout.support(j).iter().enumerate() {
                for a in 0..self.q {
                    let s: u64 = local
                        .iter()
                        .zip(&self.z[j])
                        .filter(|(cfg, _)| cfg.values[p] == a)
                        .map(|(_, &c)| c)
                        .sum();
                    if s != self.h(i, a) {
                        out.push(format!(
                            "check {j}, position {i}, symbol {a}: h = {} but z gives {s}",
                            self.h(i, a)
                        ));
                    }
                }
            }
        }
        for i in 0..self.n {
            let row: u64 = (0..self.q).map(|a| self.h(i, a)).sum();
            if row != self.scale {
                out.push(format!("position {i}: row sum {row} differs from M = {}", self.scale));
            }
        }
        out
    }

    /// Text report: scale, cost, matrix rows and a verification line.
    pub fn report(&self, layout: &VariableLayout, costs: Option<&CostVector>) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "M = {}", self.scale);
        if let Some(c) = costs {
            let _ = writeln!(s, "cost = {:.12e}", self.cost(c));
        }
        let _ = writeln!(s, "matrix:");
        for (i, row) in self.matrix_representation().iter().enumerate() {
            let cells: Vec<String> = row.iter().map(u64::to_string).collect();
            let _ = writeln!(s, "  {i}: {}", cells.join(" "));
        }
        let v = self.violations(layout);
        if v.is_empty() {
            let _ = writeln!(s, "verify = ok");
        } else {
            for msg in v {
                let _ = writeln!(s, "verify = {msg}");
            }
        }
        s
    }
}

fn to_u64(v: &BigInt) -> Result<u64> {
    if v.is_negative() {
        return Err(Error::Pseudocodeword(format!("negative entry {v}")));
    }
    v.to_u64()
        .ok_or_else(|| Error::Pseudocodeword(format!("entry {v} does not fit in 64 bits")))
}

/// An `M`-cover of a Tanner graph with an assignment to its variable copies.
///
/// `wiring[j][k][p]` is the copy of variable `support(j)[p]` joined to copy
/// `k` of check `j`; for a valid cover each edge's map `k -> wiring[j][k][p]`
/// is a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GraphCover {
    pub degree: usize,
    /// `values[i][l]`: value of copy `l` of variable `i`.
    pub values: Vec<Vec<Elem>>,
    pub wiring: Vec<Vec<Vec<usize>>>,
}

/// Problems found by [`verify_cover`], grouped by kind.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CoverReport {
    pub fibers: Vec<String>,
    pub bijectivity: Vec<String>,
    pub checks: Vec<String>,
}

impl CoverReport {
    pub fn is_valid(&self) -> bool {
        self.fibers.is_empty() && self.bijectivity.is_empty() && self.checks.is_empty()
    }
}

impl fmt::Display for CoverReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_valid() {
            return write!(f, "valid cover");
        }
        for (kind, list) in [("fiber", &self.fibers), ("bijectivity", &self.bijectivity), ("check", &self.checks)] {
            for msg in list {
                writeln!(f, "{kind}: {msg}")?;
            }
        }
        Ok(())
    }
}

/// Builds an `M`-cover realizing a pseudocodeword: `h_i(a)` copies of
/// variable `i` carry value `a`, `z_{j,S}` copies of check `j` take local
/// configuration `S`, and each check copy is joined to unused variable copies
/// holding the values its configuration requires.
pub fn build_cover(code: &Code, layout: &VariableLayout, pc: &LpPseudocodeword) -> Result<GraphCover> {
    if !code.is_connected() {
        return Err(Error::Pseudocodeword("Tanner graph is disconnected".into()));
    }
    let v = pc.violations(layout);
    if !v.is_empty() {
        return Err(Error::Pseudocodeword(v.join("; ")));
    }
    if pc.scale > MAX_COVER_DEGREE {
        return Err(Error::Pseudocodeword(format!(
            "cover degree {} exceeds the limit {MAX_COVER_DEGREE}",
            pc.scale
        )));
    }
    let degree = pc.scale as usize;
    let q = layout.q();
    let values: Vec<Vec<Elem>> = (0..layout.n())
        .map(|i| (0..q).flat_map(|a| std::iter::repeat(a).take(pc.h(i, a) as usize)).collect())
        .collect();
    let mut wiring = Vec::with_capacity(layout.m());
    for j in 0..layout.m() {
        let support = layout.support(j);
        // Free copies per (support position, value), in copy order.
        let mut free: Vec<Vec<VecDeque<usize>>> = support
            .iter()
            .map(|&i| {
                let mut by_value = vec![VecDeque::new(); q];
                for (l, &a) in values[i].iter().enumerate() {
                    by_value[a].push_back(l);
                }
                by_value
            })
            .collect();
        let mut copies = Vec::with_capacity(degree);
        for (cfg, &count) in layout.local_codewords(j).iter().zip(&pc.z[j]) {
            for _ in 0..count {
                let links = cfg
                    .values
                    .iter()
                    .enumerate()
                    .map(|(p, &a)| {
                        free[p][a].pop_front().ok_or_else(|| {
                            Error::Pseudocodeword(format!("check {j}: ran out of copies of value {a}"))
                        })
                    })
                    .collect::<Result<Vec<_>>>()?;
                copies.push(links);
            }
        }
        wiring.push(copies);
    }
    Ok(GraphCover { degree, values, wiring })
}

/// Checks fiber sizes, bijectivity on every edge and every lifted check.
pub fn verify_cover(code: &Code, cover: &GraphCover) -> CoverReport {
    let mut report = CoverReport::default();
    let m_deg = cover.degree;
    if cover.values.len() != code.n() {
        report.fibers.push(format!("{} variable fibers for {} variables", cover.values.len(), code.n()));
        return report;
    }
    if cover.wiring.len() != code.m() {
        report.fibers.push(format!("{} check fibers for {} checks", cover.wiring.len(), code.m()));
        return report;
    }
    for (i, copies) in cover.values.iter().enumerate() {
        if copies.len() != m_deg {
            report.fibers.push(format!("variable {i} has {} copies, expected {m_deg}", copies.len()));
        }
        if let Some(bad) = copies.iter().find(|&&a| a >= code.ring().q()) {
            report.fibers.push(format!("variable {i} carries out-of-range value {bad}"));
        }
    }
    if !report.fibers.is_empty() {
        return report;
    }
    let r = code.ring();
    for (j, copies) in cover.wiring.iter().enumerate() {
        let support = code.support(j);
        if copies.len() != m_deg {
            report.fibers.push(format!("check {j} has {} copies, expected {m_deg}", copies.len()));
            continue;
        }
        if copies.iter().any(|links| links.len() != support.len()) {
            report.bijectivity.push(format!("check {j}: a copy has the wrong degree"));
            continue;
        }
        for (p, &i) in support.iter().enumerate() {
            let mut hit = vec![false; m_deg];
            for links in copies {
                let l = links[p];
                if l >= m_deg || std::mem::replace(&mut hit[l], true) {
                    report
                        .bijectivity
                        .push(format!("edge (check {j}, variable {i}) is not a permutation"));
                    break;
                }
            }
        }
        for (k, links) in copies.iter().enumerate() {
            if links.iter().any(|&l| l >= m_deg) {
                continue;
            }
            let sum = support
                .iter()
                .zip(links)
                .fold(0, |acc, (&i, &l)| r.add(acc, r.mul(code.entry(j, i), cover.values[i][l])));
            if sum != 0 {
                report.checks.push(format!("copy {k} of check {j} is not satisfied"));
            }
        }
    }
    report
}

/// Counts copies per value and check copies per local configuration.
pub fn cover_to_lppc(code: &Code, layout: &VariableLayout, cover: &GraphCover) -> Result<LpPseudocodeword> {
    let report = verify_cover(code, cover);
    if !report.is_valid() {
        return Err(Error::Pseudocodeword(format!("invalid cover: {report}")));
    }
    let q = layout.q();
    let mut h = vec![0u64; layout.num_f()];
    let mut h0 = vec![0u64; layout.n()];
    for (i, copies) in cover.values.iter().enumerate() {
        for &a in copies {
            if a == 0 {
                h0[i] += 1;
            } else {
                h[layout.f_col(i, a)] += 1;
            }
        }
    }
    let mut z = Vec::with_capacity(layout.m());
    for (j, copies) in cover.wiring.iter().enumerate() {
        let local = layout.local_codewords(j);
        let mut counts = vec![0u64; local.len()];
        for links in copies {
            let view: Vec<Elem> = layout
                .support(j)
                .iter()
                .zip(links)
                .map(|(&i, &l)| cover.values[i][l])
                .collect();
            let k = local
                .binary_search_by(|cfg| cfg.values.cmp(&view))
                .map_err(|_| Error::Pseudocodeword(format!("check {j}: configuration {view:?} not in E_j")))?;
            counts[k] += 1;
        }
        z.push(counts);
    }
    let pc = LpPseudocodeword { n: layout.n(), q, h, h0, z, scale: cover.degree as u64 };
    let v = pc.violations(layout);
    if !v.is_empty() {
        return Err(Error::Pseudocodeword(v.join("; ")));
    }
    Ok(pc)
}

/// Value counts per variable; equal for two covers with the same matrix
/// representation.
pub fn cover_matrix(cover: &GraphCover, q: usize) -> Vec<Vec<u64>> {
    cover
        .values
        .iter()
        .map(|copies| {
            let mut row = vec![0u64; q];
            for &a in copies {
                row[a] += 1;
            }
            row
        })
        .collect()
}

/// A uniformly random `M`-cover with uniformly random values; it need not
/// satisfy the lifted checks.
pub fn random_cover<R: Rng + ?Sized>(code: &Code, degree: usize, rng: &mut R) -> GraphCover {
    let q = code.ring().q();
    let values = (0..code.n())
        .map(|_| (0..degree).map(|_| rng.gen_range(0..q)).collect())
        .collect();
    let wiring = (0..code.m())
        .map(|j| {
            let perms: Vec<Vec<usize>> = code
                .support(j)
                .iter()
                .map(|_| {
                    let mut p: Vec<usize> = (0..degree).collect();
                    p.shuffle(rng);
                    p
                })
                .collect();
            (0..degree).map(|k| perms.iter().map(|p| p[k]).collect()).collect()
        })
        .collect();
    GraphCover { degree, values, wiring }
}

/// Largest number of value assignments [`random_valid_cover`] will scan.
pub const MAX_COVER_ASSIGNMENTS: u128 = 1 << 24;

/// A random `M`-cover whose lifted checks all hold: the wiring is uniform and
/// the values are drawn uniformly from the codewords of the lifted code.
pub fn random_valid_cover<R: Rng + ?Sized>(code: &Code, degree: usize, rng: &mut R) -> Result<GraphCover> {
    let q = code.ring().q();
    let slots = code.n() * degree;
    let count = (q as u128).checked_pow(slots as u32).unwrap_or(u128::MAX);
    if count > MAX_COVER_ASSIGNMENTS {
        return Err(Error::EnumerationTooLarge {
            what: format!("{degree}-cover assignments"),
            count,
            limit: MAX_COVER_ASSIGNMENTS,
        });
    }
    let mut cover = random_cover(code, degree, rng);
    let mut flat = vec![0; slots];
    let mut chosen: Option<Vec<Elem>> = None;
    let mut seen = 0u64;
    loop {
        for (i, copies) in cover.values.iter_mut().enumerate() {
            copies.copy_from_slice(&flat[i * degree..(i + 1) * degree]);
        }
        if verify_cover(code, &cover).checks.is_empty() {
            // Reservoir sampling keeps the choice uniform.
            seen += 1;
            if rng.gen_range(0..seen) == 0 {
                chosen = Some(flat.clone());
            }
        }
        let mut pos = 0;
        while pos < slots {
            flat[pos] += 1;
            if flat[pos] < q {
                break;
            }
            flat[pos] = 0;
            pos += 1;
        }
        if pos == slots {
            break;
        }
    }
    let flat = chosen.expect("the all-zero assignment is always valid");
    for (i, copies) in cover.values.iter_mut().enumerate() {
        copies.copy_from_slice(&flat[i * degree..(i + 1) * degree]);
    }
    Ok(cover)
}

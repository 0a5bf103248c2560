//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use ringlp::code::Code;
use ringlp::ring::{Elem, RingSpec};

pub fn q(v: i64) -> BigRational {
    BigRational::from_integer(v.into())
}

pub fn zq_code(q: usize, rows: Vec<Vec<Elem>>) -> Code {
    Code::from_rows(Arc::new(RingSpec::zq(q).unwrap()), rows).unwrap()
}

/// Row-reduces `[A | b]` exactly and drops dependent rows. Returns `None` if
/// the system is inconsistent.
pub fn independent_rows(a: &[Vec<BigRational>], b: &[BigRational]) -> Option<(Vec<Vec<BigRational>>, Vec<BigRational>)> {
    let cols = a.first().map_or(0, |r| r.len());
    let mut m: Vec<Vec<BigRational>> = a.iter().zip(b).map(|(r, v)| r.iter().cloned().chain([v.clone()]).collect()).collect();
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..m.len()).find(|&r| !m[r][c].is_zero()) else { continue };
        m.swap(rank, p);
        let inv = BigRational::one() / &m[rank][c];
        for v in m[rank].iter_mut() {
            *v = &*v * &inv;
        }
        for r in 0..m.len() {
            if r != rank && !m[r][c].is_zero() {
                let f = m[r][c].clone();
                for k in 0..=cols {
                    let t = &f * &m[rank][k];
                    m[r][k] -= t;
                }
            }
        }
        rank += 1;
    }
    if m[rank..].iter().any(|r| !r[cols].is_zero()) {
        return None;
    }
    m.truncate(rank);
    let rhs = m.iter().map(|r| r[cols].clone()).collect();
    let rows = m.into_iter().map(|mut r| { r.pop(); r }).collect();
    Some((rows, rhs))
}

// Solves the square system exactly; `None` if singular.
fn solve_square(a: Vec<Vec<BigRational>>, b: Vec<BigRational>) -> Option<Vec<BigRational>> {
    let n = b.len();
    let mut m: Vec<Vec<BigRational>> = a.into_iter().zip(b).map(|(mut r, v)| { r.push(v); r }).collect();
    for c in 0..n {
        let p = (c..n).find(|&r| !m[r][c].is_zero())?;
        m.swap(c, p);
        for r in 0..n {
            if r != c && !m[r][c].is_zero() {
                let f = &m[r][c] / &m[c][c];
                for k in c..=n {
                    let t = &f * &m[c][k];
                    m[r][k] -= t;
                }
            }
        }
    }
    Some((0..n).map(|r| &m[r][n] / &m[r][r]).collect())
}

/// Every vertex of `{x : A x = b, 0 <= x <= u}` by exhaustive enumeration of
/// basic solutions (nonbasic variables at either bound).
pub fn vertices(a: &[Vec<BigRational>], b: &[BigRational], upper: &[Option<BigRational>]) -> Vec<Vec<BigRational>> {
    let n = upper.len();
    let Some((rows, rhs)) = independent_rows(a, b) else { return Vec::new() };
    let r = rows.len();
    let mut out: Vec<Vec<BigRational>> = Vec::new();
    let mut basis: Vec<usize> = (0..r).collect();
    loop {
        let nonbasic: Vec<usize> = (0..n).filter(|j| !basis.contains(j)).collect();
        let bounded: Vec<usize> = nonbasic.iter().copied().filter(|&j| upper[j].is_some()).collect();
        for mask in 0u64..(1u64 << bounded.len()) {
            let mut x = vec![BigRational::zero(); n];
            for (t, &j) in bounded.iter().enumerate() {
                if mask >> t & 1 == 1 {
                    x[j] = upper[j].clone().unwrap();
                }
            }
            let sub: Vec<Vec<BigRational>> = rows.iter().map(|row| basis.iter().map(|&j| row[j].clone()).collect()).collect();
            let rest: Vec<BigRational> = rows
                .iter()
                .zip(&rhs)
                .map(|(row, v)| v - nonbasic.iter().map(|&j| &row[j] * &x[j]).sum::<BigRational>())
                .collect();
            let Some(xb) = solve_square(sub, rest) else { break };
            let ok = basis.iter().zip(&xb).all(|(&j, v)| !v.is_negative() && upper[j].as_ref().map_or(true, |u| v <= u));
            if ok {
                for (&j, v) in basis.iter().zip(xb) {
                    x[j] = v;
                }
                if !out.contains(&x) {
                    out.push(x);
                }
            }
        }
        if !next_subset(&mut basis, n) {
            break;
        }
    }
    out
}

fn next_subset(s: &mut [usize], n: usize) -> bool {
    let k = s.len();
    for i in (0..k).rev() {
        if s[i] < n - k + i {
            s[i] += 1;
            for t in i + 1..k {
                s[t] = s[t - 1] + 1;
            }
            return true;
        }
    }
    false
}

/// Vertices of the decoding polytope in local-codeword coordinates, mapped
/// back to `f`. Every position must lie in some check.
///
/// `w_j` ranges over distributions on the local codewords of check `j`; checks
/// sharing a position must induce the same marginal there; `f` is that
/// marginal. The result lists the `f` of each vertex.
pub fn decoding_vertices_f(code: &Code) -> Vec<Vec<BigRational>> {
    let qq = code.ring().q();
    let locals: Vec<Vec<Vec<Elem>>> = (0..code.m())
        .map(|j| brute_local_codewords(code, j))
        .collect();
    let mut offset = vec![0];
    for l in &locals {
        offset.push(offset.last().unwrap() + l.len());
    }
    let nw = *offset.last().unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for j in 0..code.m() {
        let mut row = vec![q(0); nw];
        for k in 0..locals[j].len() {
            row[offset[j] + k] = q(1);
        }
        a.push(row);
        b.push(q(1));
    }
    // Marginal of check j at position i, value s.
    let marginal = |j: usize, i: usize, s: Elem| -> Vec<BigRational> {
        let p = code.support(j).iter().position(|&x| x == i).unwrap();
        let mut row = vec![q(0); nw];
        for (k, cfg) in locals[j].iter().enumerate() {
            if cfg[p] == s {
                row[offset[j] + k] = q(1);
            }
        }
        row
    };
    for i in 0..code.n() {
        let checks = code.checks_of(i);
        assert!(!checks.is_empty(), "position {i} is in no check");
        for pair in checks.windows(2) {
            for s in 1..qq {
                let (r0, r1) = (marginal(pair[0], i, s), marginal(pair[1], i, s));
                a.push(r0.iter().zip(&r1).map(|(x, y)| x - y).collect());
                b.push(q(0));
            }
        }
    }
    let upper = vec![None; nw];
    vertices(&a, &b, &upper)
        .into_iter()
        .map(|w| {
            let mut f = vec![q(0); code.n() * (qq - 1)];
            for i in 0..code.n() {
                let j = code.checks_of(i)[0];
                for s in 1..qq {
                    let row = marginal(j, i, s);
                    f[i * (qq - 1) + s - 1] = row.iter().zip(&w).map(|(x, y)| x * y).sum();
                }
            }
            f
        })
        .collect()
}

/// Local codewords of check `j` by testing all `q^d` assignments.
pub fn brute_local_codewords(code: &Code, j: usize) -> Vec<Vec<Elem>> {
    let r = code.ring();
    let support = code.support(j);
    let mut out = Vec::new();
    let mut v = vec![0; support.len()];
    loop {
        let s = support.iter().zip(&v).fold(0, |acc, (&i, &x)| r.add(acc, r.mul(code.entry(j, i), x)));
        if s == 0 {
            out.push(v.clone());
        }
        let mut p = 0;
        while p < v.len() {
            v[p] += 1;
            if v[p] < r.q() {
                break;
            }
            v[p] = 0;
            p += 1;
        }
        if p == v.len() {
            break;
        }
    }
    out
}

/// Exact minimum of `c . f` over the listed points.
pub fn min_over(points: &[Vec<BigRational>], c: &[BigRational]) -> BigRational {
    points
        .iter()
        .map(|f| f.iter().zip(c).map(|(x, y)| x * y).sum::<BigRational>())
        .min()
        .expect("nonempty vertex list")
}

/// All words of length `n` over `q` symbols, in lexicographic order.
pub fn all_words(q: usize, n: usize) -> Vec<Vec<Elem>> {
    let mut out = Vec::new();
    let mut v = vec![0; n];
    loop {
        out.push(v.clone());
        let mut p = n;
        loop {
            if p == 0 {
                return out;
            }
            p -= 1;
            v[p] += 1;
            if v[p] < q {
                break;
            }
            v[p] = 0;
        }
    }
}

/// Small codes with every position checked, for exhaustive LP comparisons.
pub fn oracle_codes() -> Vec<Code> {
    vec![
        zq_code(3, vec![vec![1, 1, 1, 0], vec![0, 0, 1, 2]]),
        zq_code(3, vec![vec![1, 2, 0, 1], vec![0, 1, 1, 1]]),
        zq_code(4, vec![vec![1, 1, 0, 0], vec![0, 1, 3, 0], vec![0, 0, 1, 1]]),
        zq_code(4, vec![vec![2, 1, 3, 0], vec![0, 0, 1, 1]]),
        zq_code(3, vec![vec![1, 1, 0], vec![0, 1, 1], vec![1, 0, 1]]),
    ]
}

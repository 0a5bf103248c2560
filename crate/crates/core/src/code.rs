//! Linear codes over a ring, defined by a parity-check matrix.

use std::collections::HashMap;
use std::fmt;
use std::path::Path;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::ring::{parse_row, Elem, RingSpec};

/// Largest local-codeword enumeration accepted for a single check.
pub const LOCAL_ENUMERATION_LIMIT: u128 = 10_000_000;
/// Largest message space streamed when a generator matrix is available.
pub const CODEWORD_ENUMERATION_LIMIT: u128 = 100_000_000;
/// Longest block length for the brute-force codeword filter over general rings.
pub const BRUTE_FORCE_MAX_N: usize = 14;

/// A parity-check code over a finite ring, together with its Tanner graph.
#[derive(Clone)]
pub struct Code {
    ring: Arc<RingSpec>,
    n: usize,
    m: usize,
    h: Vec<Elem>,
    supports: Vec<Vec<usize>>,
    var_checks: Vec<Vec<usize>>,
    d: usize,
    name: String,
}

impl fmt::Debug for Code {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Code")
            .field("name", &self.name)
            .field("q", &self.ring.q())
            .field("n", &self.n)
            .field("m", &self.m)
            .field("d", &self.d)
            .finish()
    }
}

/// An assignment of ring values to the support of one check row.
///
/// `values[k]` is the value at position `supports[check][k]`. Every
/// `LocalConfig` produced by [`Code::local_codewords`] satisfies its check.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LocalConfig {
    pub check: usize,
    pub values: Vec<Elem>,
}

impl LocalConfig {
    /// The tuple of disjoint position sets `(S_a)` for each nonzero value `a`,
    /// returned as `sets[a - 1]`.
    pub fn to_sets(&self, code: &Code) -> Vec<Vec<usize>> {
        let q = code.ring().q();
        let mut sets = vec![Vec::new(); q - 1];
        for (&i, &v) in code.support(self.check).iter().zip(&self.values) {
            if v != 0 {
                sets[v - 1].push(i);
            }
        }
        sets
    }

    /// Inverse of [`LocalConfig::to_sets`]. Fails if the sets overlap or
    /// leave the check's support.
    pub fn from_sets(code: &Code, check: usize, sets: &[Vec<usize>]) -> Result<Self> {
        let support = code.support(check);
        let mut values = vec![0; support.len()];
        let mut seen = vec![false; support.len()];
        for (a, set) in sets.iter().enumerate() {
            for &i in set {
                let k = support.iter().position(|&s| s == i).ok_or_else(|| {
                    Error::InvalidCode(format!("position {i} is not in the support of check {check}"))
                })?;
                if seen[k] {
                    return Err(Error::InvalidCode(format!("position {i} appears in two sets")));
                }
                seen[k] = true;
                values[k] = a + 1;
            }
        }
        Ok(LocalConfig { check, values })
    }
}

impl Code {
    /// Builds a code from the rows of its parity-check matrix.
    pub fn from_rows(ring: Arc<RingSpec>, rows: Vec<Vec<Elem>>) -> Result<Self> {
        let m = rows.len();
        if m == 0 {
            return Err(Error::InvalidCode("parity-check matrix has no rows".into()));
        }
        let n = rows[0].len();
        if n == 0 {
            return Err(Error::InvalidCode("parity-check matrix has no columns".into()));
        }
        let mut h = Vec::with_capacity(m * n);
        let mut supports = Vec::with_capacity(m);
        let mut var_checks = vec![Vec::new(); n];
        for (j, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(Error::InvalidCode(format!(
                    "row {j} has {} entries, expected {n}",
                    row.len()
                )));
            }
            for &v in row {
                ring.check(v)?;
            }
            let support: Vec<usize> = (0..n).filter(|&i| row[i] != 0).collect();
            if support.is_empty() {
                return Err(Error::InvalidCode(format!("row {j} is all zero")));
            }
            for &i in &support {
                var_checks[i].push(j);
            }
            supports.push(support);
            h.extend_from_slice(row);
        }
        let d = supports.iter().map(Vec::len).max().unwrap_or(0);
        Ok(Code {
            ring,
            n,
            m,
            h,
            supports,
            var_checks,
            d,
            name: String::new(),
        })
    }

    /// Loads a code file, warning when its Tanner graph is disconnected.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut code = Self::parse(&text, path.parent())?;
        code.name = path
            .file_name()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_default();
        if !code.is_connected() {
            log::warn!("{}: Tanner graph is disconnected", path.display());
        }
        Ok(code)
    }

    /// Parses the code text format; `ring=<path>` entries resolve against `base_dir`.
    pub fn parse(text: &str, base_dir: Option<&Path>) -> Result<Self> {
        let mut ring: Option<RingSpec> = None;
        let mut n: Option<usize> = None;
        let mut m: Option<usize> = None;
        let mut rows = Vec::new();
        for (k, raw) in text.lines().enumerate() {
            let ln = k + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some((key, value)) = line.split_once('=') {
                if !rows.is_empty() {
                    return Err(Error::parse(ln, "header line after matrix rows"));
                }
                let value = value.trim();
                let int = || {
                    value
                        .parse::<usize>()
                        .map_err(|_| Error::parse(ln, format!("bad integer `{value}`")))
                };
                match key.trim() {
                    "q" => ring = Some(RingSpec::zq(int()?)?),
                    "ring" => {
                        let p = base_dir.map_or_else(|| Path::new(value).to_path_buf(), |b| b.join(value));
                        ring = Some(RingSpec::load(p)?);
                    }
                    "n" => n = Some(int()?),
                    "m" => m = Some(int()?),
                    other => return Err(Error::parse(ln, format!("unknown key `{other}`"))),
                }
            } else {
                let row = parse_row(line, ln)?;
                let ring = ring
                    .as_ref()
                    .ok_or_else(|| Error::parse(ln, "matrix row before `q=` or `ring=`"))?;
                if let Some(&bad) = row.iter().find(|&&v| v >= ring.q()) {
                    return Err(Error::parse(
                        ln,
                        format!("entry {bad} out of range for q={}", ring.q()),
                    ));
                }
                if let Some(n) = n {
                    if row.len() != n {
                        return Err(Error::parse(ln, format!("expected {n} entries, got {}", row.len())));
                    }
                }
                rows.push(row);
            }
        }
        let ring = ring.ok_or_else(|| Error::parse(0, "missing `q=` or `ring=`"))?;
        let n = n.ok_or_else(|| Error::parse(0, "missing `n=`"))?;
        let m = m.ok_or_else(|| Error::parse(0, "missing `m=`"))?;
        if rows.len() != m {
            return Err(Error::parse(0, format!("expected {m} rows, found {}", rows.len())));
        }
        if n == 0 {
            return Err(Error::InvalidCode("n must be positive".into()));
        }
        Self::from_rows(Arc::new(ring), rows)
    }

    /// The shipped (11,6,5) ternary Golay code.
    pub fn ternary_golay() -> Self {
        let mut code = Self::parse(include_str!("../data/golay_11_6_3.code"), None)
            .expect("shipped Golay matrix parses");
        code.name = "golay_11_6_3.code".into();
        code
    }

    pub fn ring(&self) -> &RingSpec {
        &self.ring
    }

    pub fn ring_arc(&self) -> Arc<RingSpec> {
        Arc::clone(&self.ring)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Maximum check degree.
    pub fn d(&self) -> usize {
        self.d
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    #[inline]
    pub fn entry(&self, j: usize, i: usize) -> Elem {
        self.h[j * self.n + i]
    }

    pub fn row(&self, j: usize) -> &[Elem] {
        &self.h[j * self.n..(j + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<Elem>> {
        self.h.chunks(self.n).map(<[_]>::to_vec).collect()
    }

    /// Positions with a nonzero coefficient in check `j`, ascending.
    pub fn support(&self, j: usize) -> &[usize] {
        &self.supports[j]
    }

    /// Checks adjacent to variable `i`, ascending.
    pub fn checks_of(&self, i: usize) -> &[usize] {
        &self.var_checks[i]
    }

    /// Tanner graph edges as `(check, variable)` pairs.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.supports
            .iter()
            .enumerate()
            .flat_map(|(j, s)| s.iter().map(move |&i| (j, i)))
    }

    pub fn check_satisfied(&self, c: &[Elem], j: usize) -> bool {
        let r = &self.ring;
        let sum = self.supports[j]
            .iter()
            .fold(0, |acc, &i| r.add(acc, r.mul(self.entry(j, i), c[i])));
        sum == 0
    }

    pub fn is_codeword(&self, c: &[Elem]) -> bool {
        c.len() == self.n && (0..self.m).all(|j| self.check_satisfied(c, j))
    }

    /// Whether the Tanner graph (variables plus checks) is connected.
    pub fn is_connected(&self) -> bool {
        let total = self.n + self.m;
        let mut parent: Vec<usize> = (0..total).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for (j, i) in self.edges() {
            let a = find(&mut parent, i);
            let b = find(&mut parent, self.n + j);
            parent[a] = b;
        }
        let root = find(&mut parent, 0);
        (1..total).all(|x| find(&mut parent, x) == root)
    }

    /// The local codewords `E_j` of check `j`, in lexicographic order of
    /// their value tuples over the (ascending) support.
    pub fn local_codewords(&self, j: usize) -> Result<Vec<LocalConfig>> {
        let r = &*self.ring;
        let q = r.q();
        let support = &self.supports[j];
        let dj = support.len();
        let coeffs: Vec<Elem> = support.iter().map(|&i| self.entry(j, i)).collect();
        // Solve for the last unit coefficient when one exists.
        let solved = coeffs.iter().rposition(|&a| r.is_unit(a));
        let free = if solved.is_some() { dj - 1 } else { dj };
        let count = (q as u128).checked_pow(free as u32).unwrap_or(u128::MAX);
        if count > LOCAL_ENUMERATION_LIMIT {
            return Err(Error::EnumerationTooLarge {
                what: format!("local codewords of check {j}"),
                count,
                limit: LOCAL_ENUMERATION_LIMIT,
            });
        }
        let mut out = Vec::new();
        let mut odo = vec![0; free];
        let mut values = vec![0; dj];
        loop {
            match solved {
                Some(s) => {
                    let mut sum = 0;
                    for (k, slot) in values.iter_mut().enumerate() {
                        if k == s {
                            continue;
                        }
                        *slot = odo[if k < s { k } else { k - 1 }];
                        sum = r.add(sum, r.mul(coeffs[k], *slot));
                    }
                    let inv = r.inverse(coeffs[s]).expect("unit has an inverse");
                    values[s] = r.mul(inv, r.neg(sum));
                    out.push(LocalConfig { check: j, values: values.clone() });
                }
                None => {
                    let sum = odo
                        .iter()
                        .zip(&coeffs)
                        .fold(0, |acc, (&v, &a)| r.add(acc, r.mul(a, v)));
                    if sum == 0 {
                        out.push(LocalConfig { check: j, values: odo.clone() });
                    }
                }
            }
            if !odometer_step(&mut odo, q) {
                break;
            }
        }
        out.sort();
        Ok(out)
    }

    /// All local codeword lists, indexed by check.
    pub fn all_local_codewords(&self) -> Result<Vec<Vec<LocalConfig>>> {
        (0..self.m).map(|j| self.local_codewords(j)).collect()
    }

    /// Projects a word onto check `j`'s support.
    pub fn local_view(&self, c: &[Elem], j: usize) -> LocalConfig {
        LocalConfig {
            check: j,
            values: self.supports[j].iter().map(|&i| c[i]).collect(),
        }
    }

    /// Streams every codeword exactly once.
    ///
    /// Over a field the parity-check matrix is row-reduced and the message
    /// space is enumerated; otherwise all `q^n` words are filtered, which is
    /// limited to `n <= 14`.
    pub fn codewords(&self) -> Result<Codewords<'_>> {
        let q = self.ring.q();
        if self.ring.is_field() {
            let (rref, pivots) = self.row_reduce();
            let free: Vec<usize> = (0..self.n).filter(|i| !pivots.contains(i)).collect();
            let count = (q as u128).checked_pow(free.len() as u32).unwrap_or(u128::MAX);
            if count > CODEWORD_ENUMERATION_LIMIT {
                return Err(Error::EnumerationTooLarge {
                    what: "codewords".into(),
                    count,
                    limit: CODEWORD_ENUMERATION_LIMIT,
                });
            }
            let odo = vec![0; free.len()];
            Ok(Codewords {
                code: self,
                strategy: Strategy::Generator { rref, pivots, free },
                odo,
                done: false,
            })
        } else {
            if self.n > BRUTE_FORCE_MAX_N {
                return Err(Error::EnumerationTooLarge {
                    what: "codewords (brute force)".into(),
                    count: (q as u128).checked_pow(self.n as u32).unwrap_or(u128::MAX),
                    limit: (q as u128).pow(BRUTE_FORCE_MAX_N as u32),
                });
            }
            Ok(Codewords {
                code: self,
                strategy: Strategy::Filter,
                odo: vec![0; self.n],
                done: false,
            })
        }
    }

    /// Number of codewords of each Hamming weight `0..=n`.
    pub fn weight_enumerator(&self) -> Result<Vec<u64>> {
        let mut a = vec![0u64; self.n + 1];
        for c in self.codewords()? {
            a[hamming_weight(&c)] += 1;
        }
        Ok(a)
    }

    // Reduced row echelon form over a field; returns the nonzero rows and
    // their pivot columns.
    fn row_reduce(&self) -> (Vec<Vec<Elem>>, Vec<usize>) {
        let r = &*self.ring;
        let mut rows = self.rows();
        let mut pivots = Vec::new();
        let mut rank = 0;
        for col in 0..self.n {
            let Some(p) = (rank..self.m).find(|&k| rows[k][col] != 0) else {
                continue;
            };
            rows.swap(rank, p);
            let inv = r.inverse(rows[rank][col]).expect("field element is invertible");
            for v in rows[rank].iter_mut() {
                *v = r.mul(inv, *v);
            }
            for k in 0..self.m {
                if k != rank && rows[k][col] != 0 {
                    let factor = rows[k][col];
                    for c in 0..self.n {
                        let t = r.mul(factor, rows[rank][c]);
                        rows[k][c] = r.sub(rows[k][c], t);
                    }
                }
            }
            pivots.push(col);
            rank += 1;
            if rank == self.m {
                break;
            }
        }
        rows.truncate(rank);
        (rows, pivots)
    }

    /// Dimension `k` when the ring is a field.
    pub fn dimension(&self) -> Option<usize> {
        self.ring
            .is_field()
            .then(|| self.n - self.row_reduce().1.len())
    }

    /// Index map from local value tuples to their ordinal in `E_j`.
    pub fn local_index(configs: &[LocalConfig]) -> HashMap<Vec<Elem>, usize> {
        configs
            .iter()
            .enumerate()
            .map(|(k, c)| (c.values.clone(), k))
            .collect()
    }
}

pub fn hamming_weight(c: &[Elem]) -> usize {
    c.iter().filter(|&&v| v != 0).count()
}

// Increments a base-q counter, last digit fastest. Returns false on wrap.
fn odometer_step(digits: &mut [usize], q: usize) -> bool {
    for d in digits.iter_mut().rev() {
        *d += 1;
        if *d < q {
            return true;
        }
        *d = 0;
    }
    false
}

enum Strategy {
    Generator {
        rref: Vec<Vec<Elem>>,
        pivots: Vec<usize>,
        free: Vec<usize>,
    },
    Filter,
}

/// Iterator over the codewords of a [`Code`].
pub struct Codewords<'a> {
    code: &'a Code,
    strategy: Strategy,
    odo: Vec<usize>,
    done: bool,
}

impl Iterator for Codewords<'_> {
    type Item = Vec<Elem>;

    fn next(&mut self) -> Option<Vec<Elem>> {
        let r = self.code.ring();
        let q = r.q();
        while !self.done {
            let word = match &self.strategy {
                Strategy::Generator { rref, pivots, free } => {
                    let mut c = vec![0; self.code.n];
                    for (&i, &v) in free.iter().zip(&self.odo) {
                        c[i] = v;
                    }
                    for (row, &p) in rref.iter().zip(pivots) {
                        let s = free.iter().fold(0, |acc, &f| r.add(acc, r.mul(row[f], c[f])));
                        c[p] = r.neg(s);
                    }
                    Some(c)
                }
                Strategy::Filter => self.code.is_codeword(&self.odo).then(|| self.odo.clone()),
            };
            self.done = !odometer_step(&mut self.odo, q);
            if word.is_some() {
                return word;
            }
        }
        None
    }
}

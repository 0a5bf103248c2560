//! Finite commutative rings given by explicit operation tables.
//!
//! Elements are the indices `0..q`, with `0` always the additive identity.
//! Rings are immutable once built, so a single [`RingSpec`] can be shared
//! between decoder workers.

use std::fmt;
use std::path::Path;

use num_integer::Integer;

use crate::error::{Error, Result};

/// A ring element, identified by its index in the operation tables.
pub type Elem = usize;

/// A finite commutative ring with `q` elements.
#[derive(Clone, PartialEq, Eq)]
pub struct RingSpec {
    q: usize,
    add: Vec<Elem>,
    mul: Vec<Elem>,
    neg: Vec<Elem>,
    one: Option<Elem>,
    inverse: Vec<Option<Elem>>,
    units: Vec<Elem>,
    name: String,
}

impl fmt::Debug for RingSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RingSpec")
            .field("name", &self.name)
            .field("q", &self.q)
            .field("units", &self.units)
            .finish()
    }
}

/// A single failed ring axiom, with one witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum AxiomViolation {
    Shape { table: &'static str, rows: usize, q: usize },
    NotClosed { table: &'static str, a: Elem, b: Elem, value: usize },
    ZeroNotAdditiveIdentity { a: Elem },
    AddNotAssociative { a: Elem, b: Elem, c: Elem },
    AddNotCommutative { a: Elem, b: Elem },
    NoAdditiveInverse { a: Elem },
    MulNotAssociative { a: Elem, b: Elem, c: Elem },
    MulNotCommutative { a: Elem, b: Elem },
    NotDistributive { a: Elem, b: Elem, c: Elem },
}

impl fmt::Display for AxiomViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use AxiomViolation::*;
        match *self {
            Shape { table, rows, q } => write!(f, "{table} table is not {q}x{q} (row {rows})"),
            NotClosed { table, a, b, value } => {
                write!(f, "{table} table not closed: {a} op {b} = {value}")
            }
            ZeroNotAdditiveIdentity { a } => write!(f, "0 + {a} != {a}"),
            AddNotAssociative { a, b, c } => {
                write!(f, "addition not associative at ({a}, {b}, {c})")
            }
            AddNotCommutative { a, b } => write!(f, "addition not commutative at ({a}, {b})"),
            NoAdditiveInverse { a } => write!(f, "{a} has no additive inverse"),
            MulNotAssociative { a, b, c } => {
                write!(f, "multiplication not associative at ({a}, {b}, {c})")
            }
            MulNotCommutative { a, b } => {
                write!(f, "multiplication not commutative at ({a}, {b})")
            }
            NotDistributive { a, b, c } => {
                write!(f, "multiplication does not distribute at ({a}, {b}, {c})")
            }
        }
    }
}

/// Outcome of [`validate_tables`]; empty means the tables form a commutative ring.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<AxiomViolation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return write!(f, "ok");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

/// Checks the ring axioms exhaustively over all element triples.
///
/// Each axiom is reported at most once, with the first witness found in
/// lexicographic order. Associativity and distributivity are only checked
/// when both tables are closed.
pub fn validate_tables(q: usize, add: &[Vec<usize>], mul: &[Vec<usize>]) -> ValidationReport {
    let mut violations = Vec::new();
    for (name, table) in [("add", add), ("mul", mul)] {
        if table.len() != q {
            violations.push(AxiomViolation::Shape {
                table: name,
                rows: table.len(),
                q,
            });
        } else if let Some(r) = table.iter().position(|row| row.len() != q) {
            violations.push(AxiomViolation::Shape { table: name, rows: r, q });
        }
    }
    if !violations.is_empty() {
        return ValidationReport { violations };
    }

    let mut closed = true;
    for (name, table) in [("add", add), ("mul", mul)] {
        'scan: for a in 0..q {
            for b in 0..q {
                if table[a][b] >= q {
                    violations.push(AxiomViolation::NotClosed {
                        table: name,
                        a,
                        b,
                        value: table[a][b],
                    });
                    closed = false;
                    break 'scan;
                }
            }
        }
    }

    let ad = |a: usize, b: usize| add[a][b];
    let mu = |a: usize, b: usize| mul[a][b];

    if let Some(a) = (0..q).find(|&a| add[0][a] != a || add[a][0] != a) {
        violations.push(AxiomViolation::ZeroNotAdditiveIdentity { a });
    }
    if let Some((a, b)) = pairs(q).find(|&(a, b)| add[a][b] != add[b][a]) {
        violations.push(AxiomViolation::AddNotCommutative { a, b });
    }
    if let Some(a) = (0..q).find(|&a| !(0..q).any(|x| add[a][x] == 0 && add[x][a] == 0)) {
        violations.push(AxiomViolation::NoAdditiveInverse { a });
    }
    if let Some((a, b)) = pairs(q).find(|&(a, b)| mul[a][b] != mul[b][a]) {
        violations.push(AxiomViolation::MulNotCommutative { a, b });
    }
    if closed {
        if let Some((a, b, c)) = triples(q).find(|&(a, b, c)| ad(ad(a, b), c) != ad(a, ad(b, c))) {
            violations.push(AxiomViolation::AddNotAssociative { a, b, c });
        }
        if let Some((a, b, c)) = triples(q).find(|&(a, b, c)| mu(mu(a, b), c) != mu(a, mu(b, c))) {
            violations.push(AxiomViolation::MulNotAssociative { a, b, c });
        }
        if let Some((a, b, c)) = triples(q).find(|&(a, b, c)| {
            mu(a, ad(b, c)) != ad(mu(a, b), mu(a, c)) || mu(ad(b, c), a) != ad(mu(b, a), mu(c, a))
        }) {
            violations.push(AxiomViolation::NotDistributive { a, b, c });
        }
    }
    ValidationReport { violations }
}

fn pairs(q: usize) -> impl Iterator<Item = (usize, usize)> {
    (0..q).flat_map(move |a| (0..q).map(move |b| (a, b)))
}

fn triples(q: usize) -> impl Iterator<Item = (usize, usize, usize)> {
    (0..q).flat_map(move |a| pairs(q).map(move |(b, c)| (a, b, c)))
}

impl RingSpec {
    /// The integers modulo `q`.
    pub fn zq(q: usize) -> Result<Self> {
        if q < 2 {
            return Err(Error::RingTooSmall(q));
        }
        let add: Vec<Vec<usize>> = (0..q).map(|a| (0..q).map(|b| (a + b) % q).collect()).collect();
        let mul: Vec<Vec<usize>> = (0..q).map(|a| (0..q).map(|b| (a * b) % q).collect()).collect();
        let mut ring = Self::build(q, &add, &mul);
        ring.name = format!("Z{q}");
        debug_assert!(ring.units.iter().all(|&a| a.gcd(&q) == 1));
        Ok(ring)
    }

    /// Builds a ring from explicit tables, rejecting tables that fail
    /// [`validate_tables`].
    pub fn from_tables(add: Vec<Vec<usize>>, mul: Vec<Vec<usize>>) -> Result<Self> {
        let q = add.len();
        if q < 2 {
            return Err(Error::RingTooSmall(q));
        }
        let report = validate_tables(q, &add, &mul);
        if !report.is_valid() {
            return Err(Error::InvalidRing(report.to_string()));
        }
        let mut ring = Self::build(q, &add, &mul);
        ring.name = format!("custom{q}");
        Ok(ring)
    }

    // Tables must already be valid.
    fn build(q: usize, add: &[Vec<usize>], mul: &[Vec<usize>]) -> Self {
        let flat = |t: &[Vec<usize>]| t.iter().flatten().copied().collect::<Vec<_>>();
        let add_flat = flat(add);
        let mul_flat = flat(mul);
        let neg = (0..q)
            .map(|a| (0..q).find(|&x| add[a][x] == 0).expect("validated ring"))
            .collect();
        let one = (1..q).find(|&e| (0..q).all(|a| mul[e][a] == a && mul[a][e] == a));
        let inverse: Vec<Option<Elem>> = (0..q)
            .map(|a| one.and_then(|e| (0..q).find(|&b| mul[a][b] == e && mul[b][a] == e)))
            .collect();
        let units = (0..q).filter(|&a| inverse[a].is_some()).collect();
        RingSpec {
            q,
            add: add_flat,
            mul: mul_flat,
            neg,
            one,
            inverse,
            units,
            name: String::new(),
        }
    }

    /// Loads a ring table file.
    ///
    /// ```text
    /// q=4
    /// add:
    /// 0 1 2 3
    /// ...
    /// mul:
    /// ...
    /// ```
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let mut ring = Self::parse(&text)?;
        ring.name = path.display().to_string();
        Ok(ring)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .map(|(k, l)| (k + 1, l.split('#').next().unwrap_or("").trim()))
            .filter(|(_, l)| !l.is_empty());

        let (ln, first) = lines.next().ok_or_else(|| Error::parse(1, "empty ring file"))?;
        let q = parse_key_usize(first, "q").ok_or_else(|| Error::parse(ln, "expected `q=<int>`"))?;
        if q < 2 {
            return Err(Error::RingTooSmall(q));
        }
        let mut read_table = |header: &str| -> Result<Vec<Vec<usize>>> {
            let (ln, l) = lines
                .next()
                .ok_or_else(|| Error::parse(0, format!("missing `{header}` section")))?;
            if l != header {
                return Err(Error::parse(ln, format!("expected `{header}`")));
            }
            (0..q)
                .map(|_| {
                    let (ln, l) = lines
                        .next()
                        .ok_or_else(|| Error::parse(ln, format!("`{header}` table too short")))?;
                    let row = parse_row(l, ln)?;
                    if row.len() != q {
                        return Err(Error::parse(ln, format!("expected {q} entries")));
                    }
                    Ok(row)
                })
                .collect()
        };
        let add = read_table("add:")?;
        let mul = read_table("mul:")?;
        if let Some((ln, _)) = lines.next() {
            return Err(Error::parse(ln, "trailing content after `mul:` table"));
        }
        Self::from_tables(add, mul)
    }

    pub fn q(&self) -> usize {
        self.q
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Nonzero elements, in index order.
    pub fn nonzero(&self) -> std::ops::Range<Elem> {
        1..self.q
    }

    #[inline]
    pub fn add(&self, a: Elem, b: Elem) -> Elem {
        self.add[a * self.q + b]
    }

    #[inline]
    pub fn mul(&self, a: Elem, b: Elem) -> Elem {
        self.mul[a * self.q + b]
    }

    #[inline]
    pub fn neg(&self, a: Elem) -> Elem {
        self.neg[a]
    }

    #[inline]
    pub fn sub(&self, a: Elem, b: Elem) -> Elem {
        self.add(a, self.neg(b))
    }

    pub fn checked_add(&self, a: Elem, b: Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.add(a, b))
    }

    pub fn checked_mul(&self, a: Elem, b: Elem) -> Result<Elem> {
        self.check(a)?;
        self.check(b)?;
        Ok(self.mul(a, b))
    }

    pub fn checked_neg(&self, a: Elem) -> Result<Elem> {
        self.check(a)?;
        Ok(self.neg(a))
    }

    pub fn check(&self, a: Elem) -> Result<()> {
        if a < self.q {
            Ok(())
        } else {
            Err(Error::ElementOutOfRange { element: a, q: self.q })
        }
    }

    /// Multiplicative identity, if the ring is unital.
    pub fn one(&self) -> Option<Elem> {
        self.one
    }

    pub fn inverse(&self, a: Elem) -> Option<Elem> {
        self.inverse.get(a).copied().flatten()
    }

    pub fn units(&self) -> &[Elem] {
        &self.units
    }

    pub fn is_unit(&self, a: Elem) -> bool {
        self.inverse(a).is_some()
    }

    /// True when every nonzero element is a unit.
    pub fn is_field(&self) -> bool {
        self.one.is_some() && self.units.len() == self.q - 1
    }

    /// True when the tables are exactly those of the integers modulo `q`.
    pub fn is_zq(&self) -> bool {
        (0..self.q).all(|a| {
            (0..self.q)
                .all(|b| self.add(a, b) == (a + b) % self.q && self.mul(a, b) == (a * b) % self.q)
        })
    }

    pub fn add_table(&self) -> Vec<Vec<Elem>> {
        self.add.chunks(self.q).map(<[_]>::to_vec).collect()
    }

    pub fn mul_table(&self) -> Vec<Vec<Elem>> {
        self.mul.chunks(self.q).map(<[_]>::to_vec).collect()
    }

    /// Re-runs the axiom checks on this ring's tables.
    pub fn validate(&self) -> ValidationReport {
        validate_tables(self.q, &self.add_table(), &self.mul_table())
    }
}

pub(crate) fn parse_key_usize(line: &str, key: &str) -> Option<usize> {
    let (k, v) = line.split_once('=')?;
    if k.trim() != key {
        return None;
    }
    v.trim().parse().ok()
}

pub(crate) fn parse_row(line: &str, ln: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|t| {
            t.parse::<usize>()
                .map_err(|_| Error::parse(ln, format!("not a nonnegative integer: `{t}`")))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn z3_tables() {
        let r = RingSpec::zq(3).unwrap();
        assert_eq!(r.add(1, 2), 0);
        assert_eq!(r.neg(1), 2);
        assert_eq!(r.units(), &[1, 2]);
        assert!(r.is_field());
    }

    #[test]
    fn z4_zero_divisors() {
        let r = RingSpec::zq(4).unwrap();
        assert_eq!(r.units(), &[1, 3]);
        assert_eq!(r.mul(2, 2), 0);
        assert!(!r.is_field());
    }

    #[test]
    fn z8_units() {
        let r = RingSpec::zq(8).unwrap();
        let brute = (0..8usize).filter(|a| a.gcd(&8) == 1).count();
        assert_eq!(brute, 4);
        assert_eq!(r.units().len(), brute);
        assert_eq!(r.mul(5, 5), 25 % 8);
    }

    #[test]
    fn rejects_tiny_rings() {
        assert!(matches!(RingSpec::zq(1), Err(Error::RingTooSmall(1))));
        assert!(matches!(RingSpec::zq(0), Err(Error::RingTooSmall(0))));
    }

    #[test]
    fn out_of_range_element() {
        let r = RingSpec::zq(3).unwrap();
        assert!(matches!(
            r.checked_add(1, 3),
            Err(Error::ElementOutOfRange { element: 3, q: 3 })
        ));
        assert!(r.checked_neg(5).is_err());
        assert_eq!(r.checked_mul(2, 2).unwrap(), 1);
    }

    #[test]
    fn zq_satisfies_axioms_up_to_16() {
        for q in 2..=16 {
            let r = RingSpec::zq(q).unwrap();
            assert!(r.validate().is_valid(), "Z{q}");
            for a in 0..q {
                assert_eq!(r.add(a, r.neg(a)), 0);
                for b in 0..q {
                    assert_eq!(r.add(a, b), r.add(b, a));
                    for c in 0..q {
                        assert_eq!(r.add(r.add(a, b), c), r.add(a, r.add(b, c)));
                        assert_eq!(r.mul(a, r.add(b, c)), r.add(r.mul(a, b), r.mul(a, c)));
                    }
                }
            }
        }
    }

    #[test]
    fn non_commutative_addition_reported() {
        let r = RingSpec::zq(3).unwrap();
        let mut add = r.add_table();
        add[1][2] = 1;
        let report = validate_tables(3, &add, &r.mul_table());
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::AddNotCommutative { .. })));
        assert!(RingSpec::from_tables(add, r.mul_table()).is_err());
    }

    #[test]
    fn non_commutative_multiplication_rejected() {
        // Left-projection multiplication a*b = a is associative but not commutative.
        let add = RingSpec::zq(2).unwrap().add_table();
        let mul = vec![vec![0, 0], vec![1, 1]];
        let report = validate_tables(2, &add, &mul);
        assert!(report
            .violations
            .iter()
            .any(|v| matches!(v, AxiomViolation::MulNotCommutative { a: 0, b: 1 })));
    }

    /// Exhaustive triple scan used as the independent oracle for random tables.
    fn brute_is_ring(q: usize, add: &[Vec<usize>], mul: &[Vec<usize>]) -> bool {
        let t = |x: usize| x < q;
        if !add.iter().chain(mul).flatten().all(|&x| t(x)) {
            return false;
        }
        for a in 0..q {
            if add[0][a] != a || !(0..q).any(|x| add[a][x] == 0) {
                return false;
            }
            for b in 0..q {
                if add[a][b] != add[b][a] || mul[a][b] != mul[b][a] {
                    return false;
                }
                for c in 0..q {
                    if add[add[a][b]][c] != add[a][add[b][c]]
                        || mul[mul[a][b]][c] != mul[a][mul[b][c]]
                        || mul[a][add[b][c]] != add[mul[a][b]][mul[a][c]]
                    {
                        return false;
                    }
                }
            }
        }
        true
    }

    #[test]
    fn random_tables_agree_with_brute_force() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let mut invalid = 0;
        for _ in 0..500 {
            let mut table = || -> Vec<Vec<usize>> {
                (0..3).map(|_| (0..3).map(|_| rng.gen_range(0..3)).collect()).collect()
            };
            let add = table();
            let mul = table();
            let report = validate_tables(3, &add, &mul);
            assert_eq!(report.is_valid(), brute_is_ring(3, &add, &mul));
            invalid += usize::from(!report.is_valid());
        }
        assert!(invalid > 450);
    }

    #[test]
    fn parse_ring_file() {
        // GF(4) with elements 0, 1, x, x+1.
        let text = "q=4\nadd:\n0 1 2 3\n1 0 3 2\n2 3 0 1\n3 2 1 0\nmul:\n0 0 0 0\n0 1 2 3\n0 2 3 1\n0 3 1 2\n";
        let r = RingSpec::parse(text).unwrap();
        assert!(r.is_field());
        assert!(!r.is_zq());
        assert_eq!(r.neg(2), 2);
        assert_eq!(r.inverse(2), Some(3));
    }

    #[test]
    fn parse_rejects_bad_tables() {
        let bad = "q=2\nadd:\n0 1\n1 1\nmul:\n0 0\n0 1\n";
        assert!(matches!(RingSpec::parse(bad), Err(Error::InvalidRing(_))));
        let short = "q=2\nadd:\n0 1\nmul:\n0 0\n0 1\n";
        assert!(matches!(RingSpec::parse(short), Err(Error::Parse { .. })));
    }

    #[test]
    fn zero_ring_multiplication_is_non_unital() {
        let add = RingSpec::zq(3).unwrap().add_table();
        let mul = vec![vec![0; 3]; 3];
        let r = RingSpec::from_tables(add, mul).unwrap();
        assert_eq!(r.one(), None);
        assert!(r.units().is_empty());
        assert!(!r.is_field());
    }
}

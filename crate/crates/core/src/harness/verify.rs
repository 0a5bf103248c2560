use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::code::Code;
use crate::error::Result;
use crate::lp::exact;
use crate::polytope::{embed_codeword, xi_inverse, VariableLayout};
use crate::pseudocodeword::{build_cover, cover_matrix, cover_to_lppc, random_valid_cover, verify_cover, LpPseudocodeword};
use crate::ring::{validate_tables, Elem, RingSpec};

/// Weight distribution of the shipped ternary Golay code.
pub const GOLAY_WEIGHTS: [u64; 12] = [1, 0, 0, 0, 0, 132, 132, 0, 330, 110, 0, 24];

/// One named check and what it found.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl CheckResult {
    fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        CheckResult { name: name.into(), passed, detail: detail.into() }
    }
}

impl fmt::Display for CheckResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tag = if self.passed { "PASS" } else { "FAIL" };
        write!(f, "[{tag}] {}: {}", self.name, self.detail)
    }
}

/// Counts from an exhaustive integral-point check of `Q`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct IntegralReport {
    pub words: u64,
    pub codewords: u64,
    pub integral_points: u64,
    pub violations: Vec<String>,
}

/// Checks both directions between codewords and integral points of `Q`.
///
/// Every word of `R^n` is embedded and tested for exact membership, which must
/// hold exactly for codewords. Every `f` in `{0,1}^{n(q-1)}` is then paired with
/// each integral `w`: since `w` lies in `[0,1]` and sums to one per check, it
/// is one-hot, and the linking rows force the chosen local configuration to
/// reproduce `f` on the check's support. Each resulting point must map back to
/// a codeword.
pub fn integral_points_are_codewords(code: &Code) -> Result<IntegralReport> {
    let layout = VariableLayout::new(code)?;
    let (n, q) = (code.n(), code.ring().q());
    let mut report = IntegralReport::default();

    let mut word = vec![0; n];
    loop {
        report.words += 1;
        let is_cw = code.is_codeword(&word);
        report.codewords += is_cw as u64;
        let member = match layout.codeword_point(&word) {
            Some(x) => layout.contains_exact(&exact_vec(&x))?,
            None => false,
        };
        if member != is_cw {
            report
                .violations
                .push(format!("word {word:?}: codeword = {is_cw}, integral point of Q = {member}"));
        }
        if !odometer(&mut word, q) {
            break;
        }
    }

    let nf = layout.num_f();
    let mut bits = vec![0usize; nf];
    loop {
        let f: Vec<f64> = bits.iter().map(|&b| b as f64).collect();
        if let Some(x) = integral_lift(&layout, &f) {
            if !layout.contains_exact(&exact_vec(&x))? {
                report.violations.push(format!("lift of f = {bits:?} left Q"));
            }
            report.integral_points += 1;
            match xi_inverse(&f, q, 0.0) {
                Some(c) if code.is_codeword(&c) => {
                    if embed_codeword(&c, q) != f {
                        report.violations.push(format!("f = {bits:?} does not re-embed"));
                    }
                }
                other => report
                    .violations
                    .push(format!("integral point f = {bits:?} maps to non-codeword {other:?}")),
            }
        }
        if !odometer(&mut bits, 2) {
            break;
        }
    }
    if report.integral_points != report.codewords {
        report.violations.push(format!(
            "{} integral points for {} codewords",
            report.integral_points, report.codewords
        ));
    }
    Ok(report)
}

// The unique one-hot w consistent with f, if any.
fn integral_lift(layout: &VariableLayout, f: &[f64]) -> Option<Vec<f64>> {
    let q = layout.q();
    let mut x = f.to_vec();
    x.resize(layout.num_vars(), 0.0);
    for j in 0..layout.m() {
        let support = layout.support(j);
        let k = layout.local_codewords(j).iter().position(|cfg| {
            support.iter().zip(&cfg.values).all(|(&i, &v)| {
                (1..q).all(|a| f[layout.f_col(i, a)] == (v == a) as u8 as f64)
            })
        })?;
        x[layout.w_col(j, k)] = 1.0;
    }
    Some(x)
}

fn exact_vec(x: &[f64]) -> Vec<BigRational> {
    x.iter().map(|&v| exact(v)).collect()
}

fn odometer(v: &mut [usize], base: usize) -> bool {
    for d in v.iter_mut() {
        *d += 1;
        if *d < base {
            return true;
        }
        *d = 0;
    }
    false
}

/// Small codes with `n <= 5` over `Z_3` and `Z_4`.
pub fn small_codes() -> Vec<Code> {
    let z3 = Arc::new(RingSpec::zq(3).expect("Z3"));
    let z4 = Arc::new(RingSpec::zq(4).expect("Z4"));
    let build = |ring: &Arc<RingSpec>, rows: Vec<Vec<Elem>>| Code::from_rows(ring.clone(), rows).expect("valid code");
    vec![
        build(&z3, vec![vec![1, 1, 1, 0], vec![0, 1, 2, 1]]),
        build(&z3, vec![vec![1, 2, 0, 1, 1], vec![0, 1, 1, 2, 0], vec![1, 0, 1, 0, 2]]),
        build(&z4, vec![vec![1, 1, 3, 0], vec![0, 2, 1, 1]]),
        build(&z4, vec![vec![2, 1, 3]]),
    ]
}

pub fn check_ring_axioms() -> Vec<CheckResult> {
    let mut out = Vec::new();
    for q in 2..=9 {
        let r = RingSpec::zq(q).expect("q >= 2");
        let report = r.validate();
        out.push(CheckResult::new(format!("ring axioms Z{q}"), report.is_valid(), report.to_string()));
    }
    // Z4 with a broken product must be rejected.
    let add: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| (a + b) % 4).collect()).collect();
    let mut mul: Vec<Vec<usize>> = (0..4).map(|a| (0..4).map(|b| (a * b) % 4).collect()).collect();
    mul[2][3] = 1;
    let bad = validate_tables(4, &add, &mul);
    out.push(CheckResult::new("ring axioms reject broken table", !bad.is_valid(), bad.to_string()));
    out
}

pub fn check_weight_enumerator() -> CheckResult {
    match Code::ternary_golay().weight_enumerator() {
        Ok(a) => CheckResult::new("Golay weight enumerator", a == GOLAY_WEIGHTS, format!("{a:?}")),
        Err(e) => CheckResult::new("Golay weight enumerator", false, e.to_string()),
    }
}

pub fn check_integral_points() -> Vec<CheckResult> {
    small_codes()
        .iter()
        .map(|code| {
            let name = format!("integral points of Q ({}, n = {})", code.ring().name(), code.n());
            match integral_points_are_codewords(code) {
                Ok(r) => CheckResult::new(
                    name,
                    r.violations.is_empty(),
                    format!(
                        "{} words, {} codewords, {} integral points, {} violations",
                        r.words,
                        r.codewords,
                        r.integral_points,
                        r.violations.len()
                    ),
                ),
                Err(e) => CheckResult::new(name, false, e.to_string()),
            }
        })
        .collect()
}

/// Pseudocodeword to cover and back, starting from both sides.
pub fn check_cover_round_trips(samples: usize, seed: u64) -> Vec<CheckResult> {
    let mut out = Vec::new();
    let code = small_codes().swap_remove(0);
    let layout = match VariableLayout::new(&code) {
        Ok(l) => l,
        Err(e) => return vec![CheckResult::new("cover round trips", false, e.to_string())],
    };

    let mut bad = Vec::new();
    match LpPseudocodeword::extract(&code, &layout, &layout.uniform_point()) {
        Ok(pc) => match build_cover(&code, &layout, &pc) {
            Ok(cover) => {
                let report = verify_cover(&code, &cover);
                if !report.is_valid() {
                    bad.push(report.to_string());
                } else if cover_matrix(&cover, code.ring().q()) != pc.matrix_representation() {
                    bad.push("matrix representation changed".into());
                }
            }
            Err(e) => bad.push(e.to_string()),
        },
        Err(e) => bad.push(e.to_string()),
    }
    out.push(CheckResult::new(
        "uniform point to cover",
        bad.is_empty(),
        if bad.is_empty() { "ok".into() } else { bad.join("; ") },
    ));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut failures = 0;
    let mut first = String::new();
    for _ in 0..samples {
        let result = random_valid_cover(&code, 2, &mut rng).and_then(|cover| {
            let pc = cover_to_lppc(&code, &layout, &cover)?;
            let mut errs = pc.violations(&layout);
            if pc.matrix_representation() != cover_matrix(&cover, code.ring().q()) {
                errs.push("matrix representation changed".into());
            }
            Ok(errs)
        });
        let errs = result.unwrap_or_else(|e| vec![e.to_string()]);
        if !errs.is_empty() {
            failures += 1;
            if first.is_empty() {
                first = errs.join("; ");
            }
        }
    }
    out.push(CheckResult::new(
        "random valid 2-covers to pseudocodewords",
        failures == 0,
        format!("{samples} covers, {failures} failures {first}").trim_end().to_string(),
    ));
    out
}

/// Every suite run by the `verify` command.
pub fn run_all(seed: u64) -> Vec<CheckResult> {
    let mut out = check_ring_axioms();
    out.push(check_weight_enumerator());
    out.extend(check_integral_points());
    out.extend(check_cover_round_trips(100, seed));
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_codes_pass_exhaustively() {
        for code in small_codes() {
            let r = integral_points_are_codewords(&code).unwrap();
            assert!(r.violations.is_empty(), "{:?}", r.violations);
            assert_eq!(r.words, (code.ring().q() as u64).pow(code.n() as u32));
            assert_eq!(r.integral_points, code.codewords().unwrap().count() as u64);
        }
    }

    #[test]
    fn parity_code_counts() {
        // x0 + x1 + x2 = 0 over Z3 has 9 codewords among 27 words.
        let code = Code::from_rows(Arc::new(RingSpec::zq(3).unwrap()), vec![vec![1, 1, 1]]).unwrap();
        let r = integral_points_are_codewords(&code).unwrap();
        assert_eq!((r.words, r.codewords, r.integral_points), (27, 9, 9));
    }

    #[test]
    fn all_suites_pass() {
        let results = run_all(5);
        assert!(results.iter().all(|r| r.passed), "{results:#?}");
    }
}

use statrs::function::beta::beta_reg;

/// Two-sided 95% normal quantile.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Below this many errors the interval is exact (Clopper-Pearson).
pub const EXACT_CI_BELOW: u64 = 10;

/// 95% confidence interval for a binomial proportion: normal approximation,
/// or Clopper-Pearson when fewer than [`EXACT_CI_BELOW`] errors were seen.
pub fn wer_interval(errors: u64, trials: u64) -> (f64, f64) {
    if errors < EXACT_CI_BELOW || trials - errors < EXACT_CI_BELOW {
        clopper_pearson(errors, trials, 0.05)
    } else {
        normal_interval(errors, trials)
    }
}

pub fn normal_interval(errors: u64, trials: u64) -> (f64, f64) {
    let n = trials as f64;
    let p = errors as f64 / n;
    let half = Z95 * (p * (1.0 - p) / n).sqrt();
    ((p - half).max(0.0), (p + half).min(1.0))
}

/// Exact interval from beta quantiles.
pub fn clopper_pearson(errors: u64, trials: u64, alpha: f64) -> (f64, f64) {
    assert!(trials > 0 && errors <= trials);
    let (k, n) = (errors as f64, trials as f64);
    let lo = if errors == 0 {
        0.0
    } else {
        beta_quantile(k, n - k + 1.0, alpha / 2.0)
    };
    let hi = if errors == trials {
        1.0
    } else {
        beta_quantile(k + 1.0, n - k, 1.0 - alpha / 2.0)
    };
    (lo, hi)
}

// Inverse of the regularized incomplete beta function by bisection.
fn beta_quantile(a: f64, b: f64, p: f64) -> f64 {
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if beta_reg(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Whether two closed intervals intersect.
pub fn overlaps(a: (f64, f64), b: (f64, f64)) -> bool {
    a.0 <= b.1 && b.0 <= a.1
}

//! Analytic reference curves for PSK transmission: exact hard-decision word
//! error rate of perfect codes and the soft-decision union bound.

use std::f64::consts::PI;
use std::fmt::Write as _;

use crate::error::{Error, Result};

/// Absolute tolerance of the phase-density quadrature.
pub const QUADRATURE_TOL: f64 = 1e-12;

/// Complementary error function, accurate to a few ulp.
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Standard normal distribution function.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / std::f64::consts::SQRT_2)
}

/// Density of the received phase for a PSK point at angle 0 with
/// `rho = E / N0`.
pub fn phase_density(theta: f64, rho: f64) -> f64 {
    let c = theta.cos();
    let s = theta.sin();
    (-rho).exp() / (2.0 * PI) + (rho / PI).sqrt() * c * (-rho * s * s).exp() * normal_cdf((2.0 * rho).sqrt() * c)
}

/// Probability that AWGN moves a `q`-PSK point out of its decision sector,
/// for symbol SNR `rho = E_ch / N0` (linear).
pub fn psk_symbol_error(rho: f64, q: usize) -> f64 {
    psk_symbol_error_tol(rho, q, QUADRATURE_TOL)
}

pub fn psk_symbol_error_tol(rho: f64, q: usize, tol: f64) -> f64 {
    assert!(q >= 2, "PSK needs at least two points");
    assert!(rho >= 0.0, "SNR must be nonnegative");
    if rho == 0.0 {
        return (q - 1) as f64 / q as f64;
    }
    // Twice the mass outside the sector on the upper half circle, split where
    // cos(theta) changes sign.
    let edge = PI / q as f64;
    let f = |t: f64| phase_density(t, rho);
    let mut total = 0.0;
    let mut pieces = vec![edge, PI];
    if edge < PI / 2.0 {
        pieces.insert(1, PI / 2.0);
    }
    for w in pieces.windows(2) {
        total += adaptive_simpson(&f, w[0], w[1], tol / 4.0);
    }
    (2.0 * total).clamp(0.0, 1.0)
}

/// Adaptive Simpson quadrature to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 50)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
}

/// `sum_{l > t} C(n, l) p^l (1 - p)^(n - l)`.
pub fn binomial_tail(n: usize, t: usize, p: f64) -> f64 {
    if t >= n {
        return 0.0;
    }
    let mut total = 0.0;
    for l in t + 1..=n {
        total += binomial(n, l) * p.powi(l as i32) * (1.0 - p).powi((n - l) as i32);
    }
    total.clamp(0.0, 1.0)
}

pub fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// Linear symbol SNR `E_ch / N0 = r * 10^(dB/10)` for SNR per information
/// symbol `snr_db` and rate `r`.
pub fn channel_snr(snr_db: f64, rate: f64) -> f64 {
    rate * 10f64.powf(snr_db / 10.0)
}

/// Word error rate of bounded-distance (equivalently ML) hard-decision
/// decoding of a perfect `t`-error-correcting code of length `n` with
/// `q`-PSK demodulation.
pub fn hard_ml_wer_perfect(snr_db: f64, n: usize, t: usize, rate: f64, q: usize) -> f64 {
    binomial_tail(n, t, psk_symbol_error(channel_snr(snr_db, rate), q))
}

/// `1/2 sum_{w >= 1} A_w erfc(sqrt(3/4 * w * r * gamma_s))`.
pub fn union_bound_wer(snr_db: f64, weights: &[u64], rate: f64) -> f64 {
    let g = channel_snr(snr_db, rate);
    0.5 * weights
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, &a)| a != 0)
        .map(|(w, &a)| a as f64 * erfc((0.75 * w as f64 * g).sqrt()))
        .sum::<f64>()
}

/// SNR in `[lo, hi]` where the decreasing function `curve` equals `target`,
/// by bisection to `1e-10` dB.
pub fn crossing<F: Fn(f64) -> f64>(curve: F, target: f64, lo: f64, hi: f64) -> Result<f64> {
    let (mut a, mut b) = (lo, hi);
    let (fa, fb) = (curve(a) - target, curve(b) - target);
    if fa < 0.0 || fb > 0.0 {
        return Err(Error::Config(format!(
            "curve does not cross {target:e} between {lo} and {hi} dB"
        )));
    }
    while b - a > 1e-10 {
        let m = 0.5 * (a + b);
        if curve(m) > target {
            a = m;
        } else {
            b = m;
        }
    }
    Ok(0.5 * (a + b))
}

/// `start, start + step, ...` up to and including `stop` (within rounding).
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
    assert!(step > 0.0);
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    (0..count).map(|k| start + k as f64 * step).collect()
}

/// A named `(snr_db, wer)` curve.
#[derive(Debug, Clone, PartialEq)]
pub struct AnalyticCurve {
    pub kind: String,
    pub code: String,
    pub modulation: String,
    pub points: Vec<(f64, f64)>,
}

impl AnalyticCurve {
    pub fn tabulate<F: Fn(f64) -> f64>(kind: &str, code: &str, modulation: &str, grid: &[f64], f: F) -> Self {
        AnalyticCurve {
            kind: kind.into(),
            code: code.into(),
            modulation: modulation.into(),
            points: grid.iter().map(|&s| (s, f(s))).collect(),
        }
    }

    /// Whether the error rate never increases along the grid.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].1 <= w[0].1)
    }

    pub fn to_csv(&self) -> String {
        let mut s = format!(
            "# curve: {}, code: {}, modulation: {}\nsnr_db,wer\n",
            self.kind, self.code, self.modulation
        );
        for (snr, wer) in &self.points {
            let _ = writeln!(s, "{snr},{wer:.10e}");
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::{Distribution, StandardNormal};

    use super::*;

    #[test]
    fn erfc_reference_values() {
        assert_eq!(erfc(0.0), 1.0);
        assert!((erfc(1.0) - 0.157_299_207_050_285_13).abs() < 1e-15);
        assert!((erfc(-0.7) - (2.0 - erfc(0.7))).abs() < 1e-15);
        assert!(erfc(30.0) < 1e-300);
    }

    // Continued-fraction evaluation of erfc for x >= 2, summed backwards.
    fn erfc_continued_fraction(x: f64) -> f64 {
        let mut t = 0.0;
        for k in (1..200).rev() {
            t = (k as f64 / 2.0) / (x + t);
        }
        (-x * x).exp() / (PI.sqrt() * (x + t))
    }

    // Maclaurin series of erf for small x.
    fn erfc_series(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        for k in 1..80 {
            term *= -x * x / k as f64;
            sum += term / (2 * k + 1) as f64;
        }
        1.0 - 2.0 / PI.sqrt() * sum
    }

    #[test]
    fn erfc_matches_independent_evaluations() {
        for k in 0..=20 {
            let x = k as f64 * 0.1;
            assert!((erfc(x) - erfc_series(x)).abs() < 1e-14, "x = {x}");
        }
        for k in 0..=16 {
            let x = 2.0 + k as f64 * 0.5;
            let r = erfc_continued_fraction(x);
            assert!(((erfc(x) - r) / r).abs() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn psk_limits_and_closed_forms() {
        assert!((psk_symbol_error(0.0, 3) - 2.0 / 3.0).abs() < 1e-15);
        assert!((psk_symbol_error(1e-9, 3) - 2.0 / 3.0).abs() < 1e-4);
        assert!(psk_symbol_error(200.0, 3) < 1e-40);
        for rho in [0.3f64, 1.0, 4.0, 9.0] {
            // Binary: Q(sqrt(2 rho)).
            let bpsk = 0.5 * erfc(rho.sqrt());
            assert!((psk_symbol_error(rho, 2) - bpsk).abs() < 1e-11, "rho {rho}");
            // Quaternary: independent binary decisions per dimension.
            let p = 0.5 * erfc((rho / 2.0).sqrt());
            let qpsk = 1.0 - (1.0 - p) * (1.0 - p);
            assert!((psk_symbol_error(rho, 4) - qpsk).abs() < 1e-11, "rho {rho}");
        }
    }

    #[test]
    fn psk_quadrature_is_stable() {
        for rho in [0.5, 2.0, 4.0, 12.0] {
            let a = psk_symbol_error_tol(rho, 3, 1e-12);
            let b = psk_symbol_error_tol(rho, 3, 5e-13);
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn ternary_psk_matches_monte_carlo() {
        let rho: f64 = 4.0;
        let p = psk_symbol_error(rho, 3);
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let sigma = (0.5f64).sqrt();
        let edge = PI / 3.0;
        let samples = 2_000_000;
        let mut errors = 0u64;
        for _ in 0..samples {
            let x: f64 = rho.sqrt() + sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            let y: f64 = sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng);
            if y.atan2(x).abs() > edge {
                errors += 1;
            }
        }
        let est = errors as f64 / samples as f64;
        let sd = (p * (1.0 - p) / samples as f64).sqrt();
        assert!((est - p).abs() < 3.0 * sd, "est {est}, p {p}");
    }

    #[test]
    fn perfect_code_tail() {
        assert_eq!(binomial_tail(11, 2, 0.0), 0.0);
        assert!((binomial_tail(11, 2, 1.0) - 1.0).abs() < 1e-15);
        let direct = 1.0 - (0.99f64.powi(11) + 11.0 * 0.01 * 0.99f64.powi(10) + 55.0 * 1e-4 * 0.99f64.powi(9));
        let tail = binomial_tail(11, 2, 0.01);
        assert!((tail - direct).abs() < 1e-15);
        assert!((tail - 1.5537e-4).abs() < 1e-8, "{tail}");
        let mut prev = 0.0;
        for k in 0..=20 {
            let v = binomial_tail(11, 2, k as f64 / 20.0);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn union_bound_edges() {
        let golay = [1, 0, 0, 0, 0, 132, 132, 0, 330, 110, 0, 24];
        assert_eq!(union_bound_wer(f64::NEG_INFINITY, &golay, 6.0 / 11.0), 364.0);
        let single = [1, 0, 0, 0, 0, 1];
        assert!(union_bound_wer(40.0, &single, 0.5) < 1e-100);
    }

    #[test]
    fn grid_and_csv() {
        let grid = snr_grid(0.0, 9.0, 0.5);
        assert_eq!(grid.len(), 19);
        assert_eq!(grid[18], 9.0);
        let curve = AnalyticCurve::tabulate("hard-decision", "golay", "3-PSK", &grid, |s| {
            hard_ml_wer_perfect(s, 11, 2, 6.0 / 11.0, 3)
        });
        assert!(curve.is_monotone());
        let csv = curve.to_csv();
        assert!(csv.starts_with("# curve: hard-decision, code: golay, modulation: 3-PSK\nsnr_db,wer\n0,"));
        assert_eq!(csv.lines().count(), 21);
    }

    #[test]
    fn crossing_bisection() {
        let x = crossing(|s| 10f64.powf(-s), 1e-3, 0.0, 10.0).unwrap();
        assert!((x - 3.0).abs() < 1e-9);
        assert!(crossing(|s| 10f64.powf(-s), 1e-30, 0.0, 10.0).is_err());
    }
}
